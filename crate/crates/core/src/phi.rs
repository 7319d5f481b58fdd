//! The involutive point maps `φₓ(α·x) = α⁻¹·x`, the operators `Uₓ f = f∘φₓ`
//! and translations `f ↦ f∘φ_α`, together with their identity suites and
//! the claim probes built on them.
//!
//! `φₓ` exists only when `α·x ↦ α⁻¹·x` does not depend on the choice of `α`,
//! which happens exactly when the stabilizer of `x` is normal. Where it does
//! not exist, [`phi_map`] returns an [`IllDefinedWitness`] instead.
//!
//! Every operator here precomposes with a point map, so it is stored as that
//! map and compared exactly; [`PointOperator::to_matrix`] gives the 0/1
//! complex matrix.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::action::{stabilizer, ActionError, GroupAction};
use crate::group::{is_normal, Permutation};
use crate::measure::{lp_norm, Exponent, FunctionVector, InvariantMeasure};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PhiError {
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error("φ is ill-defined at x = {}", .0.base)]
    IllDefined(Box<IllDefinedWitness>),
    #[error("property ({property}) fails for α = {alpha} at y = {point}")]
    PropertyFailure { property: u8, alpha: usize, point: usize },
    #[error("identity ({identity}) fails for α = {alpha}")]
    IdentityFailure { identity: u8, alpha: usize },
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

/// The point bijection `φₓ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PhiMap {
    pub base: usize,
    pub mapping: Permutation,
}

/// Two elements sending `base` to the same `y` whose inverses send `base`
/// to different points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IllDefinedWitness {
    pub base: usize,
    pub beta: usize,
    /// An element of the stabilizer of `base`.
    pub sigma: usize,
    pub y: usize,
    /// `β⁻¹·base`.
    pub image1: usize,
    /// `(βσ)⁻¹·base`.
    pub image2: usize,
}

impl IllDefinedWitness {
    pub fn holds(&self, action: &GroupAction) -> bool {
        let g = action.group();
        let bs = g.mul(self.beta, self.sigma);
        action.act(self.sigma, self.base) == self.base
            && action.act(self.beta, self.base) == self.y
            && action.act(bs, self.base) == self.y
            && action.act(g.inv(self.beta), self.base) == self.image1
            && action.act(g.inv(bs), self.base) == self.image2
            && self.image1 != self.image2
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhiOutcome {
    WellDefined(PhiMap),
    IllDefined(IllDefinedWitness),
}

impl PhiOutcome {
    pub fn is_well_defined(&self) -> bool {
        matches!(self, PhiOutcome::WellDefined(_))
    }

    pub fn into_result(self) -> Result<PhiMap, PhiError> {
        match self {
            PhiOutcome::WellDefined(m) => Ok(m),
            PhiOutcome::IllDefined(w) => Err(PhiError::IllDefined(Box::new(w))),
        }
    }
}

/// Builds `φₓ`, or the first witness of ill-definedness in the order
/// (y ascending, σ ∈ S(x) ascending), with `β` the smallest element sending
/// `x` to `y`.
pub fn phi_map(action: &GroupAction, x: usize) -> Result<PhiOutcome, PhiError> {
    action.check_point(x)?;
    action.require_transitive()?;
    let g = action.group();
    let stab = stabilizer(action, x)?;
    let n = action.degree();
    let mut transversal = vec![usize::MAX; n];
    for a in g.elements() {
        let y = action.act(a, x);
        if transversal[y] == usize::MAX {
            transversal[y] = a;
        }
    }
    let mut images = vec![0; n];
    for y in 0..n {
        let beta = transversal[y];
        let image1 = action.act(g.inv(beta), x);
        for &sigma in stab.members() {
            let image2 = action.act(g.inv(g.mul(beta, sigma)), x);
            if image2 != image1 {
                let w = IllDefinedWitness {
                    base: x,
                    beta,
                    sigma,
                    y,
                    image1,
                    image2,
                };
                if !w.holds(action) {
                    return Err(PhiError::Internal(format!("malformed witness {w:?}")));
                }
                return Ok(PhiOutcome::IllDefined(w));
            }
        }
        images[y] = image1;
    }
    let mapping = Permutation::new(images)
        .map_err(|_| PhiError::Internal(format!("φ at {x} is not a bijection")))?;
    Ok(PhiOutcome::WellDefined(PhiMap { base: x, mapping }))
}

/// `φ_y` for every point, or the first ill-definedness witness.
pub fn phi_family(action: &GroupAction) -> Result<Vec<PhiMap>, PhiError> {
    (0..action.degree())
        .map(|y| phi_map(action, y)?.into_result())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NormalityRow {
    pub point: usize,
    pub well_defined: bool,
    pub stabilizer_normal: bool,
}

/// Per point: whether `φₓ` exists and whether `S(x)` is normal. Fails with
/// [`PhiError::Internal`] if the two ever disagree.
pub fn phi_well_defined_iff_normal(action: &GroupAction) -> Result<Vec<NormalityRow>, PhiError> {
    let mut rows = Vec::with_capacity(action.degree());
    for x in 0..action.degree() {
        let well_defined = phi_map(action, x)?.is_well_defined();
        let stabilizer_normal = is_normal(action.group(), &stabilizer(action, x)?);
        if well_defined != stabilizer_normal {
            return Err(PhiError::Internal(format!(
                "at x = {x}: well-defined = {well_defined}, normal stabilizer = {stabilizer_normal}"
            )));
        }
        rows.push(NormalityRow {
            point: x,
            well_defined,
            stabilizer_normal,
        });
    }
    Ok(rows)
}

/// Checks, for every `α`:
/// (1) `φₓ(x) = x`; (2) `φₓ∘φₓ = id`; (3) `φ_{αx} = φ_α∘φₓ∘φ_{α⁻¹}`;
/// (4) `φ_{αx} = φₓ∘φ_{α⁻¹x}∘φₓ`, where `φ_α` is the point map of `α`.
pub fn check_phi_properties(action: &GroupAction, x: usize) -> Result<(), PhiError> {
    action.check_point(x)?;
    let family = phi_family(action)?;
    let g = action.group();
    let phi = |y: usize| family[y].mapping.images();
    let px = phi(x);
    if px[x] != x {
        return Err(PhiError::PropertyFailure {
            property: 1,
            alpha: g.identity(),
            point: x,
        });
    }
    if let Some(y) = (0..action.degree()).find(|&y| px[px[y]] != y) {
        return Err(PhiError::PropertyFailure {
            property: 2,
            alpha: g.identity(),
            point: y,
        });
    }
    for alpha in g.elements() {
        let ax = action.act(alpha, x);
        let ainv = g.inv(alpha);
        let pax = phi(ax);
        let pinner = phi(action.act(ainv, x));
        for y in 0..action.degree() {
            let rhs3 = action.act(alpha, px[action.act(ainv, y)]);
            if pax[y] != rhs3 {
                return Err(PhiError::PropertyFailure {
                    property: 3,
                    alpha,
                    point: y,
                });
            }
            let rhs4 = px[pinner[px[y]]];
            if pax[y] != rhs4 {
                return Err(PhiError::PropertyFailure {
                    property: 4,
                    alpha,
                    point: y,
                });
            }
        }
    }
    Ok(())
}

/// A dense complex matrix acting on functions on the point set.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearOperator {
    pub matrix: DMatrix<Complex64>,
}

impl LinearOperator {
    pub fn apply(&self, f: &FunctionVector) -> FunctionVector {
        let v = nalgebra::DVector::from_column_slice(&f.values);
        FunctionVector::new((&self.matrix * v).iter().copied().collect())
    }
}

/// The operator `f ↦ f∘π` for a point map `π`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct PointOperator {
    map: Vec<usize>,
}

impl PointOperator {
    pub fn from_map(map: Vec<usize>) -> Self {
        Self { map }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            map: (0..n).collect(),
        }
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn dim(&self) -> usize {
        self.map.len()
    }

    /// Operator product `self · other`: apply `other`, then `self`.
    /// `(A(Bf))(y) = (Bf)(a(y)) = f(b(a(y)))`.
    pub fn then_after(&self, other: &Self) -> Self {
        Self {
            map: self.map.iter().map(|&y| other.map[y]).collect(),
        }
    }

    pub fn apply(&self, f: &FunctionVector) -> FunctionVector {
        f.precompose(&self.map)
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &y)| i == y)
    }

    /// Matrix with `M[y][π(y)] = 1`.
    pub fn to_matrix(&self) -> LinearOperator {
        let n = self.map.len();
        let mut matrix = DMatrix::zeros(n, n);
        for (y, &z) in self.map.iter().enumerate() {
            matrix[(y, z)] = Complex64::one();
        }
        LinearOperator { matrix }
    }

    /// Unitarity with respect to `μ`: `w∘π⁻¹ = w`, exactly.
    pub fn is_unitary(&self, measure: &InvariantMeasure) -> bool {
        let w = measure.weights();
        self.map.iter().enumerate().all(|(y, &z)| w[z] == w[y])
    }
}

/// Which of the two translation conventions an operator uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// `f ↦ f∘φ_α`; an anti-homomorphism in `α`.
    #[default]
    Left,
    /// `f ↦ f∘φ_{α⁻¹}`; a homomorphism in `α`.
    Induced,
}

pub fn translation_operator(action: &GroupAction, alpha: usize, convention: Convention) -> PointOperator {
    let a = match convention {
        Convention::Left => alpha,
        Convention::Induced => action.group().inv(alpha),
    };
    PointOperator::from_map(action.point_map(a).to_vec())
}

/// Verifies over all pairs that `induced(α)·induced(β) = induced(αβ)` and
/// `left(α)·left(β) = left(βα)`, and that every operator is unitary for `μ`.
pub fn verify_translations(action: &GroupAction, measure: &InvariantMeasure) -> Result<(), PhiError> {
    let g = action.group();
    let left: Vec<_> = g.elements().map(|a| translation_operator(action, a, Convention::Left)).collect();
    let induced: Vec<_> =
        g.elements().map(|a| translation_operator(action, a, Convention::Induced)).collect();
    if !induced[g.identity()].is_identity() || !left[g.identity()].is_identity() {
        return Err(PhiError::Internal("identity does not act as the identity operator".into()));
    }
    for a in g.elements() {
        if !induced[a].is_unitary(measure) || !left[a].is_unitary(measure) {
            return Err(PhiError::Internal(format!("translation by {a} is not unitary")));
        }
        for b in g.elements() {
            let ab = g.mul(a, b);
            if induced[a].then_after(&induced[b]) != induced[ab] {
                return Err(PhiError::Internal(format!("induced operators fail at ({a}, {b})")));
            }
            if left[a].then_after(&left[b]) != left[g.mul(b, a)] {
                return Err(PhiError::Internal(format!("left operators fail at ({a}, {b})")));
            }
        }
    }
    Ok(())
}

/// `Uₓ f = f∘φₓ`.
pub fn u_operator(action: &GroupAction, x: usize) -> Result<PointOperator, PhiError> {
    let phi = phi_map(action, x)?.into_result()?;
    Ok(PointOperator::from_map(phi.mapping.images().to_vec()))
}

/// Checks, with `L_α f = f∘φ_α`:
/// (1) `L_α U_{αx} = Uₓ L_α` for all `α`;
/// (2) `U_{αx} = Uₓ U_{α⁻¹x} Uₓ` for all `α`;
/// (3) `L_α Uₓ = Uₓ` for all `α ∈ S(x)`.
pub fn check_operator_identities(action: &GroupAction, x: usize) -> Result<(), PhiError> {
    action.check_point(x)?;
    let us: Vec<PointOperator> = phi_family(action)?
        .into_iter()
        .map(|p| PointOperator::from_map(p.mapping.images().to_vec()))
        .collect();
    let g = action.group();
    let ux = &us[x];
    for alpha in g.elements() {
        let l = translation_operator(action, alpha, Convention::Left);
        let u_ax = &us[action.act(alpha, x)];
        if l.then_after(u_ax) != ux.then_after(&l) {
            return Err(PhiError::IdentityFailure { identity: 1, alpha });
        }
        let u_inner = &us[action.act(g.inv(alpha), x)];
        if *u_ax != ux.then_after(u_inner).then_after(ux) {
            return Err(PhiError::IdentityFailure { identity: 2, alpha });
        }
        if action.act(alpha, x) == x && l.then_after(ux) != *ux {
            return Err(PhiError::IdentityFailure { identity: 3, alpha });
        }
    }
    Ok(())
}

/// Random complex functions with entries uniform in the unit square.
pub fn random_functions(n: usize, count: usize, seed: u64) -> Vec<FunctionVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            FunctionVector::new(
                (0..n)
                    .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect(),
            )
        })
        .collect()
}

/// Exact (bitwise) `‖Uₓf‖_p = ‖f‖_p` for `p ∈ {1, 2, ∞}` on `samples`
/// seeded random functions, plus `∫ Uₓf dμ = ∫ f dμ` and `Uₓ² = I`.
/// Returns the number of functions checked.
pub fn check_u_isometry(
    action: &GroupAction,
    x: usize,
    measure: &InvariantMeasure,
    samples: usize,
    seed: u64,
) -> Result<usize, PhiError> {
    let u = u_operator(action, x)?;
    if !u.then_after(&u).is_identity() {
        return Err(PhiError::Internal(format!("U at {x} is not an involution")));
    }
    if !u.is_unitary(measure) {
        return Err(PhiError::Internal(format!("U at {x} is not unitary")));
    }
    let len_err = |e: crate::measure::MeasureError| PhiError::Internal(e.to_string());
    for f in random_functions(action.degree(), samples, seed) {
        let uf = u.apply(&f);
        for p in [Exponent::Finite(1.0), Exponent::Finite(2.0), Exponent::Infinity] {
            let a = lp_norm(&f, p, measure).map_err(len_err)?;
            let b = lp_norm(&uf, p, measure).map_err(len_err)?;
            if a.to_bits() != b.to_bits() {
                return Err(PhiError::Internal(format!("‖U f‖ ≠ ‖f‖ at x = {x} for {p:?}")));
            }
        }
        if integral(&f, measure) != integral(&uf, measure) {
            return Err(PhiError::Internal(format!("∫U f ≠ ∫f at x = {x}")));
        }
    }
    Ok(samples)
}

/// `∫ f dμ` with the terms of each component summed in sorted order.
fn integral(f: &FunctionVector, measure: &InvariantMeasure) -> (u64, u64) {
    let w = measure.weights_f64();
    let sorted_sum = |mut v: Vec<f64>| {
        v.sort_by(f64::total_cmp);
        v.iter().sum::<f64>().to_bits()
    };
    let re = f.values.iter().zip(&w).map(|(v, w)| v.re * w).collect();
    let im = f.values.iter().zip(&w).map(|(v, w)| v.im * w).collect();
    (sorted_sum(re), sorted_sum(im))
}

/// Outcome of a claim probe: the claim holds on this instance, or a
/// concrete refutation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum StabilizerProbe {
    Certified,
    Witness {
        alpha: usize,
        x: usize,
        /// Support of the indicator `f`.
        f_support: Vec<usize>,
        /// Support of `f∘φ_α`.
        moved_support: Vec<usize>,
    },
}

/// Whether every element fixing some point fixes every function, i.e.
/// acts as the identity on the point set.
pub fn stabilizer_invariance_probe(action: &GroupAction) -> Result<StabilizerProbe, PhiError> {
    action.require_transitive()?;
    let n = action.degree();
    for x in 0..n {
        for &alpha in stabilizer(action, x)?.members() {
            if let Some(z) = (0..n).find(|&z| action.act(alpha, z) != z) {
                let f = FunctionVector::indicator(n, z);
                let moved = translation_operator(action, alpha, Convention::Left).apply(&f);
                if moved == f {
                    return Err(PhiError::Internal("indicator witness did not move".into()));
                }
                return Ok(StabilizerProbe::Witness {
                    alpha,
                    x,
                    f_support: f.support(),
                    moved_support: moved.support(),
                });
            }
        }
    }
    Ok(StabilizerProbe::Certified)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum FaithfulFreeProbe {
    Consistent { faithful: bool, free: bool },
    Witness { alpha: usize, x: usize },
}

/// Whether faithfulness of the action on functions implies freeness on
/// points for this instance.
///
/// The operator kernel is found by applying each translation to every
/// indicator function, and must coincide with the point-action kernel.
pub fn faithful_free_probe(action: &GroupAction) -> Result<FaithfulFreeProbe, PhiError> {
    action.require_transitive()?;
    let g = action.group();
    let n = action.degree();
    let indicators: Vec<_> = (0..n).map(|x| FunctionVector::indicator(n, x)).collect();
    let operator_kernel: Vec<usize> = g
        .elements()
        .filter(|&a| {
            let op = translation_operator(action, a, Convention::Induced);
            indicators.iter().all(|f| op.apply(f) == *f)
        })
        .collect();
    if operator_kernel != action.kernel() {
        return Err(PhiError::Internal(
            "operator kernel differs from the point-action kernel".into(),
        ));
    }
    let faithful = operator_kernel == vec![g.identity()];
    let fixer = (0..n).find_map(|x| {
        stabilizer(action, x)
            .ok()?
            .members()
            .iter()
            .find(|&&a| a != g.identity())
            .map(|&a| (a, x))
    });
    let free = fixer.is_none();
    match fixer {
        Some((alpha, x)) if faithful => Ok(FaithfulFreeProbe::Witness { alpha, x }),
        _ => Ok(FaithfulFreeProbe::Consistent { faithful, free }),
    }
}

/// Exact comparison of a dense operator against a point operator.
pub fn matrix_equals(op: &LinearOperator, p: &PointOperator) -> bool {
    op.matrix == p.to_matrix().matrix
}

/// Whether a dense matrix is exactly the zero/one permutation pattern.
pub fn is_permutation_matrix(m: &DMatrix<Complex64>) -> bool {
    m.is_square()
        && m.row_iter().all(|r| {
            r.iter().filter(|v| **v == Complex64::one()).count() == 1
                && r.iter().all(|v| *v == Complex64::one() || *v == Complex64::zero())
        })
}
