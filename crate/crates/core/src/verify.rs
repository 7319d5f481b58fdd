//! Invariant suites run by `verify`. Each check either passes or records
//! what broke; a suite never aborts on the first failure.

use serde::Serialize;

use crate::action::{classify, coset_action, identity_coset, stabilizer, GroupAction};
use crate::decomposition::{
    commutant_dimension, decompose, h_space, subcollection_match, unitary_rep, Tolerances,
};
use crate::group::{is_normal, left_cosets, normal_core, DEFAULT_TRIPLE_BUDGET};
use crate::measure::{
    haar, haar_is_bi_invariant, invariant_measure, invariant_measure_space_dim, verify_invariance,
    InvariantMeasure,
};
use crate::phi::{
    check_operator_identities, check_phi_properties, check_u_isometry, phi_map,
    phi_well_defined_iff_normal, stabilizer_invariance_probe, verify_translations, PhiOutcome,
    StabilizerProbe,
};

/// Random functions per point in the isometry check.
pub const ISOMETRY_SAMPLES: usize = 100;

/// Degree up to which conjugacy of stabilizers along orbits is checked.
pub const CONJUGACY_MAX_DEGREE: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Axioms,
    Measure,
    Phi,
    Operators,
    Peterweyl,
    All,
}

impl Suite {
    pub fn expand(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![Suite::Axioms, Suite::Measure, Suite::Phi, Suite::Operators, Suite::Peterweyl],
            s => vec![s],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::Axioms => "axioms",
            Suite::Measure => "measure",
            Suite::Phi => "phi",
            Suite::Operators => "operators",
            Suite::Peterweyl => "peterweyl",
            Suite::All => "all",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: CheckStatus,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteResult {
    pub suite: Suite,
    pub passed: bool,
    pub checks: Vec<Check>,
}

#[derive(Default)]
struct Recorder {
    checks: Vec<Check>,
}

impl Recorder {
    fn check(&mut self, name: &str, ok: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.to_string(),
            status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
            detail: if ok { String::new() } else { detail.into() },
        });
    }

    fn result<E: std::fmt::Display>(&mut self, name: &str, r: Result<(), E>) {
        match r {
            Ok(()) => self.check(name, true, ""),
            Err(e) => self.check(name, false, e.to_string()),
        }
    }

    fn skip(&mut self, name: &str, why: &str) {
        self.checks.push(Check {
            name: name.to_string(),
            status: CheckStatus::Skipped,
            detail: why.to_string(),
        });
    }

    fn finish(self, suite: Suite) -> SuiteResult {
        SuiteResult {
            suite,
            passed: self.checks.iter().all(|c| c.status != CheckStatus::Fail),
            checks: self.checks,
        }
    }
}

pub fn run_suite(suite: Suite, action: &GroupAction, seed: u64, tol: &Tolerances) -> Vec<SuiteResult> {
    suite
        .expand()
        .into_iter()
        .map(|s| match s {
            Suite::Axioms => axioms(action, seed),
            Suite::Measure => measure(action),
            Suite::Phi => phi(action),
            Suite::Operators => operators(action, seed),
            Suite::Peterweyl => peter_weyl(action, seed, tol),
            Suite::All => unreachable!("expanded"),
        })
        .collect()
}

fn axioms(action: &GroupAction, seed: u64) -> SuiteResult {
    let mut r = Recorder::default();
    let g = action.group();
    r.result("group identity and inverses", g.check_unit_axioms());
    r.result(
        "group associativity",
        g.check_associativity(DEFAULT_TRIPLE_BUDGET, seed).map(|_| ()),
    );
    r.result("action axioms", action.check_axioms());

    let p = classify(action);
    r.check("free implies faithful", !p.free || p.faithful, format!("{p:?}"));
    r.check(
        "transitive iff one orbit",
        p.transitive == (p.orbit_count == 1),
        format!("{p:?}"),
    );

    let mut orbit_stab = Ok(());
    let mut conjugacy = Ok(());
    let mut cosets = Ok(());
    for x in 0..action.degree() {
        let s = stabilizer(action, x).expect("point in range");
        if action.orbit(x).len() * s.order() != g.order() {
            orbit_stab = Err(format!("|orbit| · |S(x)| ≠ |G| at x = {x}"));
        }
        if is_normal(g, &s) != (normal_core(g, &s) == s) {
            cosets = Err(format!("normality and normal core disagree at x = {x}"));
        }
        if left_cosets(g, &s).len() * s.order() != g.order() {
            cosets = Err(format!("Lagrange fails for S({x})"));
        }
        let ca = coset_action(action.group_arc().clone(), &s);
        if !classify(&ca).transitive || stabilizer(&ca, identity_coset(g, &s)).ok() != Some(s.clone()) {
            cosets = Err(format!("coset action of S({x}) is malformed"));
        }
        if action.degree() <= CONJUGACY_MAX_DEGREE {
            for a in g.elements() {
                let moved = stabilizer(action, action.act(a, x)).expect("point in range");
                let mut conj: Vec<usize> = s.members().iter().map(|&h| g.conjugate(a, h)).collect();
                conj.sort_unstable();
                if conj != moved.members() {
                    conjugacy = Err(format!("S(αx) ≠ αS(x)α⁻¹ at x = {x}, α = {a}"));
                }
            }
        }
    }
    r.result("orbit-stabilizer", orbit_stab);
    r.result("normal core and Lagrange on stabilizers", cosets);
    if action.degree() <= CONJUGACY_MAX_DEGREE {
        r.result("stabilizers conjugate along orbits", conjugacy);
    } else {
        r.skip("stabilizers conjugate along orbits", "degree above 50");
    }
    r.finish(Suite::Axioms)
}

fn measure(action: &GroupAction) -> SuiteResult {
    let mut r = Recorder::default();
    let g = action.group();
    r.check("haar bi-invariant", haar_is_bi_invariant(g, &haar(g)), "");
    let orbits = classify(action).orbit_count;
    let dim = invariant_measure_space_dim(action);
    r.check(
        "invariant measure space dimension equals orbit count",
        dim == orbits,
        format!("dimension {dim}, orbits {orbits}"),
    );
    if !action.is_transitive() {
        r.skip("induced measure", "action is not transitive");
        return r.finish(Suite::Measure);
    }
    let mut ok = Ok(());
    for base in 0..action.degree() {
        match invariant_measure(action, base) {
            Ok(m) if !m.is_uniform() => ok = Err(format!("measure at base {base} is not uniform")),
            Ok(m) if !verify_invariance(&m, action) => {
                ok = Err(format!("measure at base {base} is not invariant"))
            }
            Ok(_) => {}
            Err(e) => ok = Err(e.to_string()),
        }
    }
    r.result("induced measure uniform and invariant at every base", ok);
    r.finish(Suite::Measure)
}

/// Whether `φ_y` exists for every point.
pub fn all_well_defined(action: &GroupAction) -> bool {
    (0..action.degree()).all(|x| matches!(phi_map(action, x), Ok(PhiOutcome::WellDefined(_))))
}

fn phi(action: &GroupAction) -> SuiteResult {
    let mut r = Recorder::default();
    if !action.is_transitive() {
        r.skip("phi", "action is not transitive");
        return r.finish(Suite::Phi);
    }
    r.result(
        "well-defined iff stabilizer normal",
        phi_well_defined_iff_normal(action).map(|_| ()),
    );
    let mut maps = Ok(());
    for x in 0..action.degree() {
        match phi_map(action, x) {
            Ok(PhiOutcome::WellDefined(m)) => {
                let p = m.mapping.images();
                if p[x] != x || (0..p.len()).any(|y| p[p[y]] != y) {
                    maps = Err(format!("φ at {x} is not an involution fixing {x}"));
                }
            }
            Ok(PhiOutcome::IllDefined(w)) => {
                if !w.holds(action) {
                    maps = Err(format!("witness at {x} does not hold"));
                }
            }
            Err(e) => maps = Err(e.to_string()),
        }
    }
    r.result("maps fix their base and are involutions; witnesses hold", maps);
    if all_well_defined(action) {
        let res = (0..action.degree()).try_for_each(|x| check_phi_properties(action, x));
        r.result("point-map properties", res);
    } else {
        r.skip("point-map properties", "some φ is ill-defined");
    }
    r.finish(Suite::Phi)
}

fn operators(action: &GroupAction, seed: u64) -> SuiteResult {
    let mut r = Recorder::default();
    let uniform = InvariantMeasure::uniform(action.degree());
    if !action.is_transitive() {
        r.skip("operators", "action is not transitive");
        return r.finish(Suite::Operators);
    }
    r.result(
        "translations: homomorphism, anti-homomorphism, unitary",
        verify_translations(action, &uniform),
    );
    let mut iso = Ok(());
    for x in 0..action.degree() {
        if let Ok(PhiOutcome::WellDefined(_)) = phi_map(action, x) {
            if let Err(e) = check_u_isometry(action, x, &uniform, ISOMETRY_SAMPLES, seed.wrapping_add(x as u64)) {
                iso = Err(e.to_string());
            }
        }
    }
    r.result("U involutive, unitary and isometric for p = 1, 2, ∞", iso);
    if all_well_defined(action) {
        let res = (0..action.degree()).try_for_each(|x| check_operator_identities(action, x));
        r.result("operator identities", res);
        let cert = stabilizer_invariance_probe(action);
        r.check(
            "stabilizers fix every function",
            matches!(cert, Ok(StabilizerProbe::Certified)),
            format!("{cert:?}"),
        );
    } else {
        r.skip("operator identities", "some φ is ill-defined");
    }
    r.finish(Suite::Operators)
}

fn peter_weyl(action: &GroupAction, seed: u64, tol: &Tolerances) -> SuiteResult {
    let mut r = Recorder::default();
    if !action.is_transitive() {
        r.skip("peterweyl", "action is not transitive");
        return r.finish(Suite::Peterweyl);
    }
    let m = InvariantMeasure::uniform(action.degree());
    let rep = match unitary_rep(action, &m) {
        Ok(rep) => rep,
        Err(e) => {
            r.check("unitary representation", false, e.to_string());
            return r.finish(Suite::Peterweyl);
        }
    };
    r.check("unitary representation", true, "");
    let d = match decompose(&rep, seed, tol) {
        Ok(d) => d,
        Err(e) => {
            r.check("decomposition", false, e.to_string());
            return r.finish(Suite::Peterweyl);
        }
    };
    r.check(
        "decomposition orthogonal, invariant, minimal, complete",
        true,
        "",
    );
    match commutant_dimension(&rep, tol) {
        Ok(c) => r.check(
            "commutant rank = orbital count = Σ m²",
            c.spectral_rank == d.commutant_dim(),
            format!("{c:?}, Σ m² = {}", d.commutant_dim()),
        ),
        Err(e) => r.check("commutant rank = orbital count = Σ m²", false, e.to_string()),
    }
    let mut round_trip = Ok(());
    let n = d.pieces.len();
    let mut subsets: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    subsets.push((0..n).collect());
    subsets.extend((0..n).flat_map(|i| (i + 1..n).map(move |j| vec![i, j])).take(32));
    for idx in subsets {
        let s = d.sum_of(&idx);
        match subcollection_match(&s, &d, tol.subspace) {
            crate::decomposition::MatchOutcome::Matched { indices, .. } if indices == idx => {}
            other => round_trip = Err(format!("{idx:?} matched as {other:?}")),
        }
    }
    r.result("sums of pieces match their subcollections", round_trip);
    let mut hs = Ok(());
    for x in 0..action.degree() {
        let s = stabilizer(action, x).expect("point in range");
        let orbits = action.suborbits(&s).len();
        match h_space(action, &m, x) {
            Ok(h) => {
                let trivial = s.members().iter().all(|&a| action.acts_trivially(a));
                if h.dim() != orbits || (h.dim() == action.degree()) != trivial {
                    hs = Err(format!("H({x}) has dimension {}", h.dim()));
                }
                if rep.invariance_residual(h.frame()) > tol.inv && h.dim() == action.degree() {
                    hs = Err(format!("H({x}) is the full space but not invariant"));
                }
            }
            Err(e) => hs = Err(e.to_string()),
        }
    }
    r.result("dim H(x) = number of S(x)-orbits", hs);
    let again = decompose(&rep, seed, tol);
    let same = again
        .map(|e| e.dims() == d.dims() && e.pieces.iter().zip(&d.pieces).all(|(a, b)| a.frame() == b.frame()))
        .unwrap_or(false);
    r.check("decomposition reproducible for a fixed seed", same, "");
    r.finish(Suite::Peterweyl)
}
