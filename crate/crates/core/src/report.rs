//! Deterministic JSON reports.
//!
//! Complex numbers are written as `[re, im]` pairs with 17 significant
//! digits. Reports carry no timings, so identical inputs give identical bytes.

use serde::ser::Error as _;
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use crate::action::{classify, stabilizer, ActionProfile, GroupAction};
use crate::decomposition::{
    commutant_dimension, conjecture_probe, decompose, h_space, fixed_intersection_dims, h_space_probe,
    unitary_rep, ConjectureOutcome, CounterexampleSource, Decomposition, DecompositionChecks,
    DecompositionError, HSpaceProbe, Multiplicity, Subspace, Tolerances,
};
use crate::group::{is_normal, FiniteGroup};
use crate::instance::InstanceSpec;
use crate::measure::{invariant_measure, invariant_measure_space_dim, verify_invariance};
use crate::phi::{
    faithful_free_probe, phi_map, stabilizer_invariance_probe, Convention, FaithfulFreeProbe,
    PhiError, PhiOutcome, StabilizerProbe,
};
use crate::verify::SuiteResult;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// A float written with 17 significant digits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sig17(pub f64);

impl Serialize for Sig17 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        // -0.0 prints as 0
        let v = if self.0 == 0.0 { 0.0 } else { self.0 };
        if !v.is_finite() {
            return Err(S::Error::custom("non-finite value in report"));
        }
        RawValue::from_string(format!("{v:.16e}"))
            .map_err(S::Error::custom)?
            .serialize(s)
    }
}

fn complex_columns(s: &Subspace) -> Vec<Vec<[Sig17; 2]>> {
    s.basis()
        .column_iter()
        .map(|c| c.iter().map(|v| [Sig17(v.re), Sig17(v.im)]).collect())
        .collect()
}

/// A group element by index, with its permutation when known.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ElementRecord {
    pub index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub images: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cycles: Option<String>,
}

impl ElementRecord {
    pub fn new(group: &FiniteGroup, index: usize) -> Self {
        let label = group.label(index);
        Self {
            index,
            images: label.map(|p| p.images().to_vec()),
            cycles: label.map(|p| p.to_string()),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InstanceEcho {
    pub spec: InstanceSpec,
    pub group_order: usize,
    pub degree: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct MeasureSummary {
    /// `"p/q"` weights; absent for intransitive actions.
    pub weights: Option<Vec<String>>,
    pub invariant: Option<bool>,
    pub invariant_space_dim: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessRecord {
    pub beta: ElementRecord,
    pub sigma: ElementRecord,
    pub y: usize,
    pub image1: usize,
    pub image2: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct PhiPoint {
    pub point: usize,
    pub stabilizer_order: usize,
    pub stabilizer_normal: bool,
    pub well_defined: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mapping: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessRecord>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PhiSummary {
    pub convention: Convention,
    pub all_well_defined: bool,
    pub points: Vec<PhiPoint>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PieceRecord {
    pub dim: usize,
    pub isotypic_label: usize,
    pub basis: Vec<Vec<[Sig17; 2]>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecompositionProbes {
    pub h_space_dims: Vec<usize>,
    /// `dim(H ∩ H(x))`, one row per piece and one column per point.
    pub fixed_intersection_dims: Vec<Vec<usize>>,
    pub h_space_full: HSpaceProbe,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecompositionReport {
    pub dims: Vec<usize>,
    pub pieces: Vec<PieceRecord>,
    pub multiplicities: Vec<Multiplicity>,
    pub multiplicity_free: bool,
    pub commutant_dim: usize,
    pub orbital_count: usize,
    pub sum_multiplicity_squares: usize,
    pub checks: DecompositionChecks,
    pub probes: DecompositionProbes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Claim {
    #[value(name = "cor34")]
    #[serde(rename = "cor34")]
    StabilizerFixesFunctions,
    #[value(name = "thm13")]
    #[serde(rename = "thm13")]
    FaithfulImpliesFree,
    #[value(name = "thm44")]
    #[serde(rename = "thm44")]
    StabilizerFixedSpace,
    Conjecture,
}

impl Claim {
    pub fn name(self) -> &'static str {
        match self {
            Claim::StabilizerFixesFunctions => "cor34",
            Claim::FaithfulImpliesFree => "thm13",
            Claim::StabilizerFixedSpace => "thm44",
            Claim::Conjecture => "conjecture",
        }
    }

    pub fn statement(self) -> &'static str {
        match self {
            Claim::StabilizerFixesFunctions => "for a transitive action, any element fixing a point satisfies f∘φ_α = f for every function f",
            Claim::FaithfulImpliesFree => "for a transitive action, if the induced action on functions is faithful then the point action is free",
            Claim::StabilizerFixedSpace => "for a transitive action, the functions fixed by the stabilizer of x are all functions, for every x",
            Claim::Conjecture => "every invariant subspace is the direct sum of a subcollection of one fixed decomposition into minimal invariant subspaces",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeStatus {
    Certified,
    Consistent,
    Witness,
    Counterexample,
}

impl ProbeStatus {
    pub fn is_refutation(self) -> bool {
        matches!(self, ProbeStatus::Witness | ProbeStatus::Counterexample)
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum ProbeDetails {
    Text(String),
    Conjecture {
        random_trials: usize,
        random_failures: usize,
        #[serde(skip_serializing_if = "Option::is_none")]
        source: Option<CounterexampleSource>,
        #[serde(skip_serializing_if = "Option::is_none")]
        defect: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        invariance_residual: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        subspace_basis: Option<Vec<Vec<[Sig17; 2]>>>,
    },
    HSpace {
        dim: usize,
        degree: usize,
    },
}

/// `{claim, status, alpha, x, f_support, details}` plus the claim statement.
#[derive(Debug, Clone, Serialize)]
pub struct ProbeRecord {
    pub claim: Claim,
    pub statement: &'static str,
    pub status: ProbeStatus,
    pub alpha: Option<ElementRecord>,
    pub x: Option<usize>,
    pub f_support: Option<Vec<usize>>,
    pub details: ProbeDetails,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool_version: &'static str,
    pub command: String,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub instance: InstanceEcho,
    pub profile: ActionProfile,
    pub measure: MeasureSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<PhiSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<DecompositionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suites: Option<Vec<SuiteResult>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probe: Option<ProbeRecord>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

pub fn measure_summary(action: &GroupAction) -> MeasureSummary {
    let measure = invariant_measure(action, 0).ok();
    MeasureSummary {
        invariant: measure.as_ref().map(|m| verify_invariance(m, action)),
        weights: measure.map(|m| m.to_strings()),
        invariant_space_dim: invariant_measure_space_dim(action),
    }
}

pub fn phi_summary(action: &GroupAction) -> Result<Option<PhiSummary>, PhiError> {
    if !action.is_transitive() {
        return Ok(None);
    }
    let g = action.group();
    let mut points = Vec::new();
    for x in 0..action.degree() {
        let s = stabilizer(action, x)?;
        let stabilizer_normal = is_normal(g, &s);
        let (mapping, witness) = match phi_map(action, x)? {
            PhiOutcome::WellDefined(m) => (Some(m.mapping.images().to_vec()), None),
            PhiOutcome::IllDefined(w) => (
                None,
                Some(WitnessRecord {
                    beta: ElementRecord::new(g, w.beta),
                    sigma: ElementRecord::new(g, w.sigma),
                    y: w.y,
                    image1: w.image1,
                    image2: w.image2,
                }),
            ),
        };
        if mapping.is_some() != stabilizer_normal {
            return Err(PhiError::Internal(format!("normality criterion fails at {x}")));
        }
        points.push(PhiPoint {
            point: x,
            stabilizer_order: s.order(),
            stabilizer_normal,
            well_defined: mapping.is_some(),
            mapping,
            witness,
        });
    }
    Ok(Some(PhiSummary {
        convention: Convention::Left,
        all_well_defined: points.iter().all(|p| p.well_defined),
        points,
    }))
}

/// Decomposes `L²(μ)` and gathers the structural checks and per-point
/// probes that depend on it.
pub fn decomposition_report(
    action: &GroupAction,
    seed: u64,
    tol: &Tolerances,
) -> Result<(DecompositionReport, Decomposition), DecompositionError> {
    let measure = invariant_measure(action, 0).map_err(|e| match e {
        crate::measure::MeasureError::Action(a) => DecompositionError::Action(a),
        other => DecompositionError::Verification(other.to_string()),
    })?;
    let rep = unitary_rep(action, &measure)?;
    let d = decompose(&rep, seed, tol)?;
    let comm = commutant_dimension(&rep, tol)?;
    if comm.spectral_rank != d.commutant_dim() {
        return Err(DecompositionError::Verification(format!(
            "commutant dimension {} differs from Σ m² = {}",
            comm.spectral_rank,
            d.commutant_dim()
        )));
    }
    let h_space_dims = (0..action.degree())
        .map(|x| h_space(action, &measure, x).map(|h| h.dim()))
        .collect::<Result<_, _>>()?;
    let probes = DecompositionProbes {
        h_space_dims,
        fixed_intersection_dims: fixed_intersection_dims(action, &measure, &d, tol)?,
        h_space_full: h_space_probe(action)?,
    };
    let report = DecompositionReport {
        dims: d.dims(),
        pieces: d
            .pieces
            .iter()
            .zip(&d.isotypic_labels)
            .map(|(p, &label)| PieceRecord {
                dim: p.dim(),
                isotypic_label: label,
                basis: complex_columns(p),
            })
            .collect(),
        multiplicities: d.multiplicities.clone(),
        multiplicity_free: d.is_multiplicity_free(),
        commutant_dim: comm.spectral_rank,
        orbital_count: comm.orbital_count,
        sum_multiplicity_squares: d.commutant_dim(),
        checks: d.checks,
        probes,
    };
    Ok((report, d))
}

#[derive(Debug, thiserror::Error)]
pub enum ProbeError {
    #[error("the action is not transitive")]
    NotTransitive,
    #[error(transparent)]
    Phi(#[from] PhiError),
    #[error(transparent)]
    Decomposition(#[from] DecompositionError),
}

pub fn run_probe(
    claim: Claim,
    action: &GroupAction,
    trials: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<ProbeRecord, ProbeError> {
    if !action.is_transitive() {
        return Err(ProbeError::NotTransitive);
    }
    let g = action.group();
    let base = |status| ProbeRecord {
        claim,
        statement: claim.statement(),
        status,
        alpha: None,
        x: None,
        f_support: None,
        details: ProbeDetails::Text(String::new()),
    };
    Ok(match claim {
        Claim::StabilizerFixesFunctions => match stabilizer_invariance_probe(action)? {
            StabilizerProbe::Certified => ProbeRecord {
                details: ProbeDetails::Text("every element with a fixed point acts as the identity".into()),
                ..base(ProbeStatus::Certified)
            },
            StabilizerProbe::Witness {
                alpha,
                x,
                f_support,
                moved_support,
            } => ProbeRecord {
                alpha: Some(ElementRecord::new(g, alpha)),
                x: Some(x),
                details: ProbeDetails::Text(format!(
                    "f is the indicator of {f_support:?}; f∘φ_α is the indicator of {moved_support:?}"
                )),
                f_support: Some(f_support),
                ..base(ProbeStatus::Witness)
            },
        },
        Claim::FaithfulImpliesFree => match faithful_free_probe(action)? {
            FaithfulFreeProbe::Consistent { faithful, free } => ProbeRecord {
                details: ProbeDetails::Text(format!("faithful = {faithful}, free = {free}")),
                ..base(ProbeStatus::Consistent)
            },
            FaithfulFreeProbe::Witness { alpha, x } => ProbeRecord {
                alpha: Some(ElementRecord::new(g, alpha)),
                x: Some(x),
                details: ProbeDetails::Text("the action is faithful but α ≠ e fixes x".into()),
                ..base(ProbeStatus::Witness)
            },
        },
        Claim::StabilizerFixedSpace => match h_space_probe(action)? {
            HSpaceProbe::Certified => ProbeRecord {
                details: ProbeDetails::HSpace {
                    dim: action.degree(),
                    degree: action.degree(),
                },
                ..base(ProbeStatus::Certified)
            },
            HSpaceProbe::Witness { x, dim, degree } => ProbeRecord {
                x: Some(x),
                details: ProbeDetails::HSpace { dim, degree },
                ..base(ProbeStatus::Witness)
            },
        },
        Claim::Conjecture => {
            let measure = crate::measure::InvariantMeasure::uniform(action.degree());
            let rep = unitary_rep(action, &measure)?;
            let d = decompose(&rep, seed, tol)?;
            let probe = conjecture_probe(&rep, &d, trials, seed, tol)?;
            match probe.outcome {
                ConjectureOutcome::Certified { .. } => ProbeRecord {
                    details: ProbeDetails::Conjecture {
                        random_trials: probe.random_trials,
                        random_failures: probe.random_failures,
                        source: None,
                        defect: None,
                        invariance_residual: None,
                        subspace_basis: None,
                    },
                    ..base(ProbeStatus::Certified)
                },
                ConjectureOutcome::Counterexample {
                    source,
                    subspace,
                    defect,
                    invariance_residual,
                } => ProbeRecord {
                    details: ProbeDetails::Conjecture {
                        random_trials: probe.random_trials,
                        random_failures: probe.random_failures,
                        source: Some(source),
                        defect: Some(defect),
                        invariance_residual: Some(invariance_residual),
                        subspace_basis: Some(complex_columns(&subspace)),
                    },
                    ..base(ProbeStatus::Counterexample)
                },
            }
        }
    })
}

pub fn profile(action: &GroupAction) -> ActionProfile {
    classify(action)
}
