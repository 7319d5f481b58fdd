//! Finite transitive group actions: exact group and action machinery, the
//! induced invariant measure, the involutive point maps `φₓ` with their
//! operators, and the decomposition of `L²(μ)` into minimal invariant
//! subspaces, each paired with probes that certify or refute the
//! corresponding claims instance by instance.

pub mod action;
pub mod cli;
pub mod decomposition;
pub mod families;
pub mod group;
pub mod instance;
pub mod linalg;
pub mod measure;
pub mod phi;
pub mod report;
pub mod verify;

pub use action::{classify, coset_action, make_action, natural_action, regular_action, stabilizer, ActionProfile, GroupAction};
pub use decomposition::{decompose, unitary_rep, Decomposition, Subspace, Tolerances, UnitaryRep};
pub use group::{group_from_generators, FiniteGroup, Permutation, Subgroup};
pub use measure::{invariant_measure, FunctionVector, InvariantMeasure};
