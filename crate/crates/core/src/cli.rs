//! Command-line front end.
//!
//! Exit codes: 0 success (all suites pass, claim certified or consistent);
//! 1 usage or parse error; 2 an internal verification failed; 3 a probe
//! produced a witness or counterexample.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::decomposition::{DecompositionError, Tolerances};
use crate::instance::{parse_instance, resolve, Instance, InstanceError};
use crate::phi::PhiError;
use crate::report::{
    decomposition_report, measure_summary, phi_summary, profile, run_probe, Claim, InstanceEcho,
    ProbeError, Report, TOOL_VERSION,
};
use crate::verify::{run_suite, CheckStatus, Suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INTERNAL: i32 = 2;
pub const EXIT_WITNESS: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "homogeneous", version, about = "Invariant measures, φ maps and Peter-Weyl decompositions of finite transitive actions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol_ortho: f64,
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol_inv: f64,
    #[arg(long, global = true, default_value_t = 1e-7)]
    pub tol_rank: f64,
    /// Write the JSON report here (`-` for stdout).
    #[arg(long, global = true)]
    pub json: Option<PathBuf>,
    /// No human-readable summary.
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Action profile, invariant measure and φ summary.
    Analyze { instance: PathBuf },
    /// Adds the decomposition into minimal invariant subspaces.
    Decompose { instance: PathBuf },
    /// Runs invariant suites; exits 0 iff all pass.
    Verify {
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
    },
    /// Tests one claim on the instance; exits 3 on a witness.
    Probe {
        instance: PathBuf,
        #[arg(long, value_enum)]
        claim: Claim,
        /// Random trials for the conjecture probe.
        #[arg(long, default_value_t = 64)]
        trials: usize,
    },
}

impl Command {
    fn instance(&self) -> &PathBuf {
        match self {
            Command::Analyze { instance }
            | Command::Decompose { instance }
            | Command::Verify { instance, .. }
            | Command::Probe { instance, .. } => instance,
        }
    }

    fn label(&self) -> String {
        match self {
            Command::Analyze { .. } => "analyze".into(),
            Command::Decompose { .. } => "decompose".into(),
            Command::Verify { suite, .. } => format!("verify --suite {}", suite.name()),
            Command::Probe { claim, .. } => format!("probe --claim {}", claim.name()),
        }
    }
}

enum Failure {
    Usage(String),
    Internal(String),
}

impl From<InstanceError> for Failure {
    fn from(e: InstanceError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<PhiError> for Failure {
    fn from(e: PhiError) -> Self {
        match e {
            PhiError::Action(a) => Failure::Usage(a.to_string()),
            other => Failure::Internal(other.to_string()),
        }
    }
}

impl From<DecompositionError> for Failure {
    fn from(e: DecompositionError) -> Self {
        match e {
            DecompositionError::Action(a) => Failure::Usage(a.to_string()),
            other => Failure::Internal(other.to_string()),
        }
    }
}

impl From<ProbeError> for Failure {
    fn from(e: ProbeError) -> Self {
        match e {
            ProbeError::NotTransitive => Failure::Usage("probes need a transitive action".into()),
            ProbeError::Phi(p) => p.into(),
            ProbeError::Decomposition(d) => d.into(),
        }
    }
}

/// Builds the report for a parsed command line; returns it with its exit code.
pub fn build_report(cli: &Cli, instance: &Instance) -> Result<(Report, i32), String> {
    build(cli, instance).map_err(|f| match f {
        Failure::Usage(m) | Failure::Internal(m) => m,
    })
}

fn build(cli: &Cli, instance: &Instance) -> Result<(Report, i32), Failure> {
    let tol = Tolerances {
        ortho: cli.tol_ortho,
        inv: cli.tol_inv,
        rank: cli.tol_rank,
        ..Tolerances::default()
    };
    let action = &instance.action;
    let mut report = Report {
        tool_version: TOOL_VERSION,
        command: cli.command.label(),
        seed: cli.seed,
        tolerances: tol,
        instance: InstanceEcho {
            spec: instance.spec.clone(),
            group_order: instance.group.order(),
            degree: action.degree(),
        },
        profile: profile(action),
        measure: measure_summary(action),
        phi: None,
        decomposition: None,
        suites: None,
        probe: None,
    };
    let mut code = EXIT_OK;
    match &cli.command {
        Command::Analyze { .. } => {
            report.phi = phi_summary(action)?;
        }
        Command::Decompose { .. } => {
            report.phi = phi_summary(action)?;
            report.decomposition = Some(decomposition_report(action, cli.seed, &tol)?.0);
        }
        Command::Verify { suite, .. } => {
            let results = run_suite(*suite, action, cli.seed, &tol);
            if results.iter().any(|r| !r.passed) {
                code = EXIT_INTERNAL;
            }
            report.suites = Some(results);
        }
        Command::Probe { claim, trials, .. } => {
            let record = run_probe(*claim, action, *trials, cli.seed, &tol)?;
            if record.status.is_refutation() {
                code = EXIT_WITNESS;
            }
            report.probe = Some(record);
        }
    }
    Ok((report, code))
}

fn summary(report: &Report) -> String {
    let mut out = String::new();
    let p = &report.profile;
    out.push_str(&format!(
        "instance: |G| = {}, |X| = {}; transitive = {}, free = {}, faithful = {}, orbits = {}\n",
        report.instance.group_order, report.instance.degree, p.transitive, p.free, p.faithful, p.orbit_count
    ));
    if let Some(w) = &report.measure.weights {
        let shown: Vec<&str> = w.iter().take(8).map(String::as_str).collect();
        out.push_str(&format!(
            "measure: [{}{}], invariant = {}\n",
            shown.join(", "),
            if w.len() > 8 { ", …" } else { "" },
            report.measure.invariant.unwrap_or(false)
        ));
    }
    if let Some(phi) = &report.phi {
        let ok = phi.points.iter().filter(|p| p.well_defined).count();
        out.push_str(&format!("phi: well-defined at {ok} of {} points\n", phi.points.len()));
    }
    if let Some(d) = &report.decomposition {
        out.push_str(&format!(
            "decomposition: dims {:?}, commutant {} = orbitals {} = Σm² {}\n",
            d.dims, d.commutant_dim, d.orbital_count, d.sum_multiplicity_squares
        ));
    }
    if let Some(suites) = &report.suites {
        for s in suites {
            for c in &s.checks {
                let tag = match c.status {
                    CheckStatus::Pass => "PASS",
                    CheckStatus::Fail => "FAIL",
                    CheckStatus::Skipped => "SKIP",
                };
                out.push_str(&format!("[{tag}] {}: {}", s.suite.name(), c.name));
                if !c.detail.is_empty() {
                    out.push_str(&format!(" ({})", c.detail));
                }
                out.push('\n');
            }
        }
    }
    if let Some(pr) = &report.probe {
        out.push_str(&format!("probe {}: {:?}", pr.claim.name(), pr.status));
        if let Some(a) = &pr.alpha {
            out.push_str(&format!(", α = {}", a.cycles.clone().unwrap_or_else(|| a.index.to_string())));
        }
        if let Some(x) = pr.x {
            out.push_str(&format!(", x = {x}"));
        }
        out.push('\n');
    }
    out
}

/// Runs the CLI on `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            if e.use_stderr() {
                let _ = write!(err, "{e}");
            } else {
                let _ = write!(out, "{e}");
            }
            return code;
        }
    };
    let instance = match parse_instance(cli.command.instance()).and_then(|s| resolve(&s)) {
        Ok(i) => i,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let (report, code) = match build(&cli, &instance) {
        Ok(r) => r,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            return EXIT_USAGE;
        }
        Err(Failure::Internal(m)) => {
            let _ = writeln!(err, "internal verification failure: {m}");
            return EXIT_INTERNAL;
        }
    };
    let json = report.to_json();
    match &cli.json {
        Some(p) if p.as_os_str() == "-" => {
            let _ = out.write_all(json.as_bytes());
        }
        Some(p) => {
            if let Err(e) = std::fs::write(p, &json) {
                let _ = writeln!(err, "error: cannot write {}: {e}", p.display());
                return EXIT_USAGE;
            }
        }
        None => {}
    }
    if !cli.quiet {
        let text = summary(&report);
        if matches!(&cli.json, Some(p) if p.as_os_str() == "-") {
            let _ = err.write_all(text.as_bytes());
        } else {
            let _ = out.write_all(text.as_bytes());
        }
    }
    code
}
