//! Splitting `L²(μ)` into pairwise orthogonal minimal invariant subspaces.
//!
//! Invariant subspaces are split by eigenspaces of random Hermitian elements
//! of the commutant, obtained by group averaging. A piece is minimal when
//! its restricted commutant is one-dimensional; the dimension of the
//! commutant of a unitary representation is the trace of the averaging
//! projector, `(1/|G|) Σ_α |tr A_α|²`. Pieces are grouped into isotypic
//! classes by whether an averaged cross map between them is nonzero.
//!
//! Internally every subspace is held as a Euclidean orthonormal frame in the
//! coordinates `v = √w ∘ f`, where `w` are the measure weights; in those
//! coordinates the `μ`-inner product is the standard one.

use std::collections::VecDeque;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::action::{stabilizer, ActionError, GroupAction};
use crate::linalg::{
    canonical_frame, cluster_sorted, hermitian_eigen, hermitian_norm, hermitize, max_abs,
    orthonormal_range, permute_rows, projector, random_complex, random_hermitian, singular_values,
    CMatrix,
};
use crate::measure::{verify_invariance, FunctionVector, InvariantMeasure};
use crate::phi::{translation_operator, Convention, PointOperator};

/// Above this degree the spectral commutant dimension is read from the
/// trace of the averaging projector instead of its full spectrum.
pub const DENSE_COMMUTANT_MAX_DEGREE: usize = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecompositionError {
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error("measure is not invariant under the action")]
    NotInvariantMeasure,
    #[error("decomposition stalled after {max_rounds} rounds without splitting a piece")]
    Stalled { max_rounds: u32 },
    #[error("function has length {found}, expected {expected}")]
    Length { expected: usize, found: usize },
    #[error("verification failed: {0}")]
    Verification(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Orthonormality and pairwise orthogonality of bases.
    pub ortho: f64,
    /// Invariance residual `‖(I − P) L_α P‖`.
    pub inv: f64,
    /// Relative singular-value cutoff for numerical rank.
    pub rank: f64,
    /// Projector distance at which two subspaces count as equal.
    pub subspace: f64,
    /// Relative gap below which eigenvalues are merged.
    pub cluster: f64,
    pub max_rounds: u32,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            ortho: 1e-9,
            inv: 1e-8,
            rank: 1e-7,
            subspace: 1e-8,
            cluster: 1e-8,
            max_rounds: 8,
        }
    }
}

/// The representation `α ↦ (f ↦ f∘φ_{α⁻¹})` on `L²(μ)`.
#[derive(Debug, Clone)]
pub struct UnitaryRep {
    action: GroupAction,
    measure: InvariantMeasure,
    operators: Vec<PointOperator>,
    sqrt_weights: Vec<f64>,
}

impl UnitaryRep {
    pub fn action(&self) -> &GroupAction {
        &self.action
    }

    pub fn measure(&self) -> &InvariantMeasure {
        &self.measure
    }

    pub fn operators(&self) -> &[PointOperator] {
        &self.operators
    }

    pub fn degree(&self) -> usize {
        self.action.degree()
    }

    pub fn order(&self) -> usize {
        self.operators.len()
    }

    /// Euclidean coordinates of a function.
    fn to_coords(&self, f: &FunctionVector) -> nalgebra::DVector<Complex64> {
        nalgebra::DVector::from_iterator(
            f.len(),
            f.values.iter().zip(&self.sqrt_weights).map(|(v, s)| v * *s),
        )
    }

    /// `L_α Q` for a frame `Q`.
    fn apply_to_frame(&self, alpha: usize, frame: &CMatrix) -> CMatrix {
        permute_rows(frame, self.operators[alpha].map())
    }

    /// The restricted operators `Q* L_α Q`.
    pub fn restrict(&self, frame: &CMatrix) -> Vec<CMatrix> {
        let qa = frame.adjoint();
        (0..self.order())
            .map(|a| &qa * self.apply_to_frame(a, frame))
            .collect()
    }

    /// `E(M) = (1/|G|) Σ_α L_α M L_α⁻¹`.
    pub fn commutant_average(&self, m: &CMatrix) -> CMatrix {
        let n = self.degree();
        let mut acc = CMatrix::zeros(n, n);
        for op in &self.operators {
            let p = op.map();
            for r in 0..n {
                for c in 0..n {
                    acc[(r, c)] += m[(p[r], p[c])];
                }
            }
        }
        acc.unscale(self.order() as f64)
    }

    fn subspace(&self, frame: CMatrix) -> Subspace {
        Subspace {
            frame,
            sqrt_weights: self.sqrt_weights.clone(),
        }
    }

    /// `max_α ‖L_α Q − Q (Q* L_α Q)‖_F`.
    pub fn invariance_residual(&self, frame: &CMatrix) -> f64 {
        (0..self.order())
            .map(|a| {
                let lq = self.apply_to_frame(a, frame);
                let inner = frame.adjoint() * &lq;
                (lq - frame * inner).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// Builds the representation and checks it is a unitary homomorphism.
pub fn unitary_rep(action: &GroupAction, measure: &InvariantMeasure) -> Result<UnitaryRep, DecompositionError> {
    action.require_transitive()?;
    if !verify_invariance(measure, action) {
        return Err(DecompositionError::NotInvariantMeasure);
    }
    let g = action.group();
    let operators: Vec<PointOperator> = g
        .elements()
        .map(|a| translation_operator(action, a, Convention::Induced))
        .collect();
    for a in g.elements() {
        if !operators[a].is_unitary(measure) {
            return Err(DecompositionError::Verification(format!("operator {a} is not unitary")));
        }
        for b in g.elements() {
            if operators[a].then_after(&operators[b]) != operators[g.mul(a, b)] {
                return Err(DecompositionError::Verification(format!(
                    "operators fail the homomorphism law at ({a}, {b})"
                )));
            }
        }
    }
    Ok(UnitaryRep {
        action: action.clone(),
        measure: measure.clone(),
        operators,
        sqrt_weights: measure.weights_f64().iter().map(|w| w.sqrt()).collect(),
    })
}

/// Applies the commutant average to a [`LinearOperator`](crate::phi::LinearOperator).
pub fn commutant_average(
    rep: &UnitaryRep,
    m: &crate::phi::LinearOperator,
) -> Result<crate::phi::LinearOperator, DecompositionError> {
    let n = rep.degree();
    if m.matrix.nrows() != n || m.matrix.ncols() != n {
        return Err(DecompositionError::Length {
            expected: n,
            found: m.matrix.nrows(),
        });
    }
    Ok(crate::phi::LinearOperator {
        matrix: rep.commutant_average(&m.matrix),
    })
}

/// A subspace of `L²(μ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    frame: CMatrix,
    sqrt_weights: Vec<f64>,
}

impl Subspace {
    pub fn zero(n: usize, sqrt_weights: Vec<f64>) -> Self {
        Self {
            frame: CMatrix::zeros(n, 0),
            sqrt_weights,
        }
    }

    pub fn dim(&self) -> usize {
        self.frame.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.frame.nrows()
    }

    /// Orthonormal frame in Euclidean coordinates.
    pub fn frame(&self) -> &CMatrix {
        &self.frame
    }

    /// Basis of functions, orthonormal for the `μ`-inner product.
    pub fn basis(&self) -> CMatrix {
        CMatrix::from_fn(self.frame.nrows(), self.frame.ncols(), |r, c| {
            self.frame[(r, c)] / self.sqrt_weights[r]
        })
    }

    /// Basis columns as functions.
    pub fn basis_functions(&self) -> Vec<FunctionVector> {
        let b = self.basis();
        (0..b.ncols())
            .map(|c| FunctionVector::new(b.column(c).iter().copied().collect()))
            .collect()
    }

    /// Orthogonal projector in Euclidean coordinates.
    pub fn projector(&self) -> CMatrix {
        projector(&self.frame)
    }

    /// `max |⟨b_i, b_j⟩_μ − δ_ij|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let d = self.dim();
        max_abs(&(self.frame.adjoint() * &self.frame - CMatrix::identity(d, d)))
    }

    /// Operator-norm distance between orthogonal projectors.
    pub fn distance(&self, other: &Subspace) -> f64 {
        hermitian_norm(&(self.projector() - other.projector()))
    }

    /// Direct sum of mutually orthogonal subspaces.
    pub fn direct_sum(parts: &[&Subspace], n: usize, sqrt_weights: Vec<f64>) -> Self {
        let total: usize = parts.iter().map(|p| p.dim()).sum();
        let mut frame = CMatrix::zeros(n, total);
        let mut c = 0;
        for p in parts {
            frame.columns_mut(c, p.dim()).copy_from(&p.frame);
            c += p.dim();
        }
        Self { frame, sqrt_weights }
    }

    /// Whether a function lies in the subspace within `tol` (Euclidean
    /// residual of the projection).
    pub fn contains_coords(&self, v: &nalgebra::DVector<Complex64>, tol: f64) -> bool {
        let proj = &self.frame * (self.frame.adjoint() * v);
        (proj - v).norm() <= tol
    }
}

/// `(1/|G|) Σ |tr A_α|²`, the dimension of the commutant of the restricted
/// representation, rounded after checking it is within `1e-6` of an integer.
fn restricted_commutant_dim(ops: &[CMatrix]) -> Result<usize, DecompositionError> {
    let c: f64 = ops.iter().map(|a| a.trace().norm_sqr()).sum::<f64>() / ops.len() as f64;
    let r = c.round();
    if (c - r).abs() > 1e-6 || r < 1.0 {
        return Err(DecompositionError::Verification(format!(
            "restricted commutant dimension {c} is not a positive integer"
        )));
    }
    Ok(r as usize)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CommutantDimension {
    /// Numerical rank of the averaging map on matrices.
    pub spectral_rank: usize,
    /// Exact number of orbits of `G` on `X × X`.
    pub orbital_count: usize,
}

/// Orbits of the group on ordered pairs of points, counted exactly.
pub fn orbital_count(action: &GroupAction) -> usize {
    let n = action.degree();
    let mut seen = vec![false; n * n];
    let mut count = 0;
    for start in 0..n * n {
        if seen[start] {
            continue;
        }
        count += 1;
        let (y, z) = (start / n, start % n);
        for a in action.group().elements() {
            seen[action.act(a, y) * n + action.act(a, z)] = true;
        }
    }
    count
}

/// Commutant dimension by two routes, which must agree.
///
/// Up to [`DENSE_COMMUTANT_MAX_DEGREE`] the averaging map on `n × n`
/// matrices is assembled as an `n² × n²` real symmetric matrix and its rank
/// read from the spectrum with the relative cutoff `tol.rank`. Above it the
/// map, being an orthogonal projector, has its rank read from its trace.
pub fn commutant_dimension(rep: &UnitaryRep, tol: &Tolerances) -> Result<CommutantDimension, DecompositionError> {
    let n = rep.degree();
    let order = rep.order() as f64;
    let spectral_rank = if n <= DENSE_COMMUTANT_MAX_DEGREE {
        let mut s = DMatrix::<f64>::zeros(n * n, n * n);
        for op in rep.operators() {
            let p = op.map();
            for y in 0..n {
                for z in 0..n {
                    s[(y * n + z, p[y] * n + p[z])] += 1.0 / order;
                }
            }
        }
        let eig = nalgebra::SymmetricEigen::new(s);
        let max = eig.eigenvalues.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        eig.eigenvalues.iter().filter(|v| v.abs() > tol.rank * max).count()
    } else {
        let trace: f64 = rep
            .operators()
            .iter()
            .map(|op| {
                let fixed = op.map().iter().enumerate().filter(|(i, &y)| *i == y).count() as f64;
                fixed * fixed
            })
            .sum::<f64>()
            / order;
        trace.round() as usize
    };
    let orbital_count = orbital_count(rep.action());
    if spectral_rank != orbital_count {
        return Err(DecompositionError::Verification(format!(
            "commutant rank {spectral_rank} differs from orbital count {orbital_count}"
        )));
    }
    Ok(CommutantDimension {
        spectral_rank,
        orbital_count,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Multiplicity {
    pub label: usize,
    pub dim: usize,
    pub multiplicity: usize,
}

/// Residuals measured on a finished decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Default)]
pub struct DecompositionChecks {
    pub max_orthonormality_defect: f64,
    pub max_cross_gram: f64,
    pub max_invariance_residual: f64,
    pub rounds: u32,
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    pub pieces: Vec<Subspace>,
    pub isotypic_labels: Vec<usize>,
    pub multiplicities: Vec<Multiplicity>,
    pub checks: DecompositionChecks,
}

impl Decomposition {
    pub fn dims(&self) -> Vec<usize> {
        self.pieces.iter().map(|p| p.dim()).collect()
    }

    /// `Σ m²` over isotypic classes.
    pub fn commutant_dim(&self) -> usize {
        self.multiplicities.iter().map(|m| m.multiplicity * m.multiplicity).sum()
    }

    pub fn is_multiplicity_free(&self) -> bool {
        self.multiplicities.iter().all(|m| m.multiplicity == 1)
    }

    /// Sum of the pieces with the given indices.
    pub fn sum_of(&self, indices: &[usize]) -> Subspace {
        let parts: Vec<&Subspace> = indices.iter().map(|&i| &self.pieces[i]).collect();
        let n = self.pieces[0].ambient_dim();
        Subspace::direct_sum(&parts, n, self.pieces[0].sqrt_weights.clone())
    }
}

/// Fingerprint used to order pieces of equal dimension: entries of the first
/// basis vector rounded to six decimals, compared lexicographically.
fn fingerprint(frame: &CMatrix) -> Vec<(i64, i64)> {
    frame
        .column(0)
        .iter()
        .map(|v| ((v.re * 1e6).round() as i64, (v.im * 1e6).round() as i64))
        .collect()
}

/// Averaged cross map `(1/|G|) Σ B_α X A_α*` from a piece with restricted
/// operators `a` to one with `b`; it intertwines the two.
fn intertwiner(a: &[CMatrix], b: &[CMatrix], x: &CMatrix) -> CMatrix {
    let mut acc = CMatrix::zeros(x.nrows(), x.ncols());
    for (aa, bb) in a.iter().zip(b) {
        acc += bb * x * aa.adjoint();
    }
    acc.unscale(a.len() as f64)
}

/// Splits `L²(μ)` into minimal invariant subspaces.
///
/// Pieces are ordered by dimension, then by [`fingerprint`]; each basis is
/// the canonical basis of its subspace (see
/// [`canonical_frame`](crate::linalg::canonical_frame)).
pub fn decompose(rep: &UnitaryRep, seed: u64, tol: &Tolerances) -> Result<Decomposition, DecompositionError> {
    let n = rep.degree();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut queue: VecDeque<(CMatrix, u32)> = VecDeque::from([(CMatrix::identity(n, n), 0)]);
    let mut done: Vec<CMatrix> = Vec::new();
    let mut rounds = 0;
    while let Some((frame, stalls)) = queue.pop_front() {
        let ops = rep.restrict(&frame);
        if restricted_commutant_dim(&ops)? == 1 {
            done.push(frame);
            continue;
        }
        if stalls >= tol.max_rounds {
            return Err(DecompositionError::Stalled {
                max_rounds: tol.max_rounds,
            });
        }
        rounds += 1;
        let d = frame.ncols();
        let h = random_hermitian(d, &mut rng);
        let mut avg = CMatrix::zeros(d, d);
        for a in &ops {
            avg += a * &h * a.adjoint();
        }
        let avg = hermitize(&avg.unscale(ops.len() as f64));
        let (values, vectors) = hermitian_eigen(&avg);
        let clusters = cluster_sorted(&values, tol.cluster);
        if clusters.len() == 1 {
            queue.push_back((frame, stalls + 1));
            continue;
        }
        for range in clusters {
            let sub = vectors.columns(range.start, range.len()).into_owned();
            queue.push_back((&frame * sub, 0));
        }
    }

    let mut frames: Vec<CMatrix> = done.iter().map(canonical_frame).collect();
    frames.sort_by(|a, b| {
        a.ncols()
            .cmp(&b.ncols())
            .then_with(|| fingerprint(a).cmp(&fingerprint(b)))
    });
    let pieces: Vec<Subspace> = frames.into_iter().map(|f| rep.subspace(f)).collect();

    let checks = verify_pieces(rep, &pieces, tol, rounds)?;
    let (isotypic_labels, multiplicities) = isotypic_classes(rep, &pieces, &mut rng, tol)?;
    Ok(Decomposition {
        pieces,
        isotypic_labels,
        multiplicities,
        checks,
    })
}

fn verify_pieces(
    rep: &UnitaryRep,
    pieces: &[Subspace],
    tol: &Tolerances,
    rounds: u32,
) -> Result<DecompositionChecks, DecompositionError> {
    let fail = |m: String| Err(DecompositionError::Verification(m));
    let total: usize = pieces.iter().map(|p| p.dim()).sum();
    if total != rep.degree() {
        return fail(format!("dimensions sum to {total}, not {}", rep.degree()));
    }
    let mut checks = DecompositionChecks {
        rounds,
        ..Default::default()
    };
    for (i, p) in pieces.iter().enumerate() {
        let defect = p.orthonormality_defect();
        checks.max_orthonormality_defect = checks.max_orthonormality_defect.max(defect);
        if defect > tol.ortho {
            return fail(format!("piece {i} basis is not orthonormal ({defect:e})"));
        }
        let res = rep.invariance_residual(p.frame());
        checks.max_invariance_residual = checks.max_invariance_residual.max(res);
        if res > tol.inv {
            return fail(format!("piece {i} is not invariant ({res:e})"));
        }
        if restricted_commutant_dim(&rep.restrict(p.frame()))? != 1 {
            return fail(format!("piece {i} is not minimal"));
        }
        for (j, q) in pieces.iter().enumerate().skip(i + 1) {
            let cross = max_abs(&(p.frame().adjoint() * q.frame()));
            checks.max_cross_gram = checks.max_cross_gram.max(cross);
            if cross > tol.ortho {
                return fail(format!("pieces {i} and {j} are not orthogonal ({cross:e})"));
            }
        }
    }
    Ok(checks)
}

/// Labels pieces by equivalence class, using nonzero intertwiners and
/// cross-checking against equality of characters.
fn isotypic_classes(
    rep: &UnitaryRep,
    pieces: &[Subspace],
    rng: &mut ChaCha8Rng,
    tol: &Tolerances,
) -> Result<(Vec<usize>, Vec<Multiplicity>), DecompositionError> {
    let restricted: Vec<Vec<CMatrix>> = pieces.iter().map(|p| rep.restrict(p.frame())).collect();
    let characters: Vec<Vec<Complex64>> = restricted
        .iter()
        .map(|ops| ops.iter().map(|a| a.trace()).collect())
        .collect();
    let mut labels = vec![usize::MAX; pieces.len()];
    let mut multiplicities: Vec<Multiplicity> = Vec::new();
    for i in 0..pieces.len() {
        if labels[i] != usize::MAX {
            continue;
        }
        let label = multiplicities.len();
        labels[i] = label;
        let mut count = 1;
        for j in i + 1..pieces.len() {
            if labels[j] != usize::MAX || pieces[j].dim() != pieces[i].dim() {
                continue;
            }
            let x = random_complex(pieces[j].dim(), pieces[i].dim(), rng);
            let t = intertwiner(&restricted[i], &restricted[j], &x);
            let equivalent = t.norm() > tol.rank * x.norm();
            let same_character = characters[i]
                .iter()
                .zip(&characters[j])
                .all(|(a, b)| (a - b).norm() <= 1e-6);
            if equivalent != same_character {
                return Err(DecompositionError::Verification(format!(
                    "intertwiner and character tests disagree on pieces {i} and {j}"
                )));
            }
            if equivalent {
                labels[j] = label;
                count += 1;
            }
        }
        multiplicities.push(Multiplicity {
            label,
            dim: pieces[i].dim(),
            multiplicity: count,
        });
    }
    Ok((labels, multiplicities))
}

/// Smallest invariant subspace containing the given functions.
pub fn invariant_subspace_generated(
    rep: &UnitaryRep,
    fs: &[FunctionVector],
    tol: &Tolerances,
) -> Result<Subspace, DecompositionError> {
    let n = rep.degree();
    for f in fs {
        if f.len() != n {
            return Err(DecompositionError::Length {
                expected: n,
                found: f.len(),
            });
        }
    }
    let coords: Vec<_> = fs.iter().map(|f| rep.to_coords(f)).collect();
    let cols = coords.len() * rep.order();
    let mut m = CMatrix::zeros(n, cols);
    let mut c = 0;
    for v in &coords {
        let vm = CMatrix::from_column_slice(n, 1, v.as_slice());
        for op in rep.operators() {
            m.set_column(c, &permute_rows(&vm, op.map()).column(0));
            c += 1;
        }
    }
    let range = orthonormal_range(&m, tol.rank);
    if range.ncols() == 0 {
        return Ok(Subspace::zero(n, rep.sqrt_weights.clone()));
    }
    Ok(rep.subspace(canonical_frame(&range)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum MatchOutcome {
    Matched { indices: Vec<usize>, distance: f64 },
    NoMatch { indices: Vec<usize>, defect: f64 },
}

impl MatchOutcome {
    pub fn is_match(&self) -> bool {
        matches!(self, MatchOutcome::Matched { .. })
    }
}

/// Selects the pieces lying inside `s` and compares their sum with `s`.
pub fn subcollection_match(s: &Subspace, d: &Decomposition, tol: f64) -> MatchOutcome {
    let ps = s.projector();
    let indices: Vec<usize> = d
        .pieces
        .iter()
        .enumerate()
        .filter(|(_, h)| {
            let f = h.frame();
            (&ps * f - f)
                .column_iter()
                .all(|col| col.norm() <= tol)
        })
        .map(|(i, _)| i)
        .collect();
    let distance = if indices.is_empty() {
        hermitian_norm(&ps)
    } else {
        hermitian_norm(&(ps - d.sum_of(&indices).projector()))
    };
    if distance <= tol {
        MatchOutcome::Matched { indices, distance }
    } else {
        MatchOutcome::NoMatch {
            indices,
            defect: distance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CounterexampleSource {
    /// Graph of an intertwiner between two equivalent pieces.
    Graph { piece_a: usize, piece_b: usize },
    /// Subspace generated by random functions in a random trial.
    RandomTrial { trial: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConjectureOutcome {
    Certified { trials: usize },
    Counterexample {
        source: CounterexampleSource,
        subspace: Subspace,
        defect: f64,
        invariance_residual: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConjectureProbe {
    pub random_trials: usize,
    pub random_failures: usize,
    pub outcome: ConjectureOutcome,
}

/// Tests whether invariant subspaces are sums of pieces of `d`.
///
/// Random phase: each trial picks a random nonempty set of isotypic classes
/// and one or two random functions inside their sum, and matches the
/// subspace they generate. Constructive phase: if some class has
/// multiplicity at least two, the graph of a unitary intertwiner between two
/// of its pieces is invariant but is not a sum of pieces.
pub fn conjecture_probe(
    rep: &UnitaryRep,
    d: &Decomposition,
    trials: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<ConjectureProbe, DecompositionError> {
    let n = rep.degree();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let classes = d.multiplicities.len();
    let class_projectors: Vec<CMatrix> = (0..classes)
        .map(|label| {
            let idx: Vec<usize> =
                (0..d.pieces.len()).filter(|&i| d.isotypic_labels[i] == label).collect();
            d.sum_of(&idx).projector()
        })
        .collect();

    let mut first_failure = None;
    let mut failures = 0;
    for trial in 0..trials {
        let mut chosen: Vec<usize> = (0..classes).filter(|_| rng.gen_bool(0.5)).collect();
        if chosen.is_empty() {
            chosen.push(rng.gen_range(0..classes));
        }
        let mut p = CMatrix::zeros(n, n);
        for &c in &chosen {
            p += &class_projectors[c];
        }
        let count = rng.gen_range(1..=2);
        let fs: Vec<FunctionVector> = (0..count)
            .map(|_| {
                let v = &p * random_complex(n, 1, &mut rng);
                FunctionVector::new(
                    v.iter().zip(&rep.sqrt_weights).map(|(x, s)| x / *s).collect(),
                )
            })
            .collect();
        let s = invariant_subspace_generated(rep, &fs, tol)?;
        if let MatchOutcome::NoMatch { defect, .. } = subcollection_match(&s, d, tol.subspace) {
            failures += 1;
            if first_failure.is_none() {
                let invariance_residual = rep.invariance_residual(s.frame());
                first_failure = Some(ConjectureOutcome::Counterexample {
                    source: CounterexampleSource::RandomTrial { trial },
                    subspace: s,
                    defect,
                    invariance_residual,
                });
            }
        }
    }

    let repeated = d.multiplicities.iter().find(|m| m.multiplicity >= 2);
    let outcome = if let Some(m) = repeated {
        let members: Vec<usize> =
            (0..d.pieces.len()).filter(|&i| d.isotypic_labels[i] == m.label).collect();
        let (a, b) = (members[0], members[1]);
        let (qa, qb) = (d.pieces[a].frame(), d.pieces[b].frame());
        let ra = rep.restrict(qa);
        let rb = rep.restrict(qb);
        let x = random_complex(qb.ncols(), qa.ncols(), &mut rng);
        let t = intertwiner(&ra, &rb, &x);
        let smax = singular_values(&t).first().copied().unwrap_or(0.0);
        if smax <= tol.rank * x.norm() {
            return Err(DecompositionError::Verification(format!(
                "no intertwiner between equivalent pieces {a} and {b}"
            )));
        }
        let t = t.unscale(smax);
        let graph = qa + qb * t;
        let frame = canonical_frame(&orthonormal_range(&graph, tol.rank));
        let s = rep.subspace(frame);
        let invariance_residual = rep.invariance_residual(s.frame());
        if invariance_residual > tol.inv {
            return Err(DecompositionError::Verification(format!(
                "graph subspace is not invariant ({invariance_residual:e})"
            )));
        }
        match subcollection_match(&s, d, tol.subspace) {
            MatchOutcome::NoMatch { defect, .. } => ConjectureOutcome::Counterexample {
                source: CounterexampleSource::Graph { piece_a: a, piece_b: b },
                subspace: s,
                defect,
                invariance_residual,
            },
            MatchOutcome::Matched { .. } => {
                return Err(DecompositionError::Verification(
                    "graph subspace unexpectedly matched a subcollection".into(),
                ))
            }
        }
    } else if let Some(found) = first_failure {
        found
    } else {
        ConjectureOutcome::Certified { trials }
    };
    Ok(ConjectureProbe {
        random_trials: trials,
        random_failures: failures,
        outcome,
    })
}

/// Functions fixed by the stabilizer of `x`: those constant on each orbit
/// of `S(x)`. The basis is the normalized orbit indicators, orbits ordered
/// by smallest point.
pub fn h_space(action: &GroupAction, measure: &InvariantMeasure, x: usize) -> Result<Subspace, DecompositionError> {
    action.require_transitive()?;
    let n = action.degree();
    let orbits = action.suborbits(&stabilizer(action, x)?);
    let sqrt_weights: Vec<f64> = measure.weights_f64().iter().map(|w| w.sqrt()).collect();
    let mut frame = CMatrix::zeros(n, orbits.len());
    for (c, orbit) in orbits.iter().enumerate() {
        let mass: f64 = orbit.iter().map(|&y| sqrt_weights[y] * sqrt_weights[y]).sum();
        for &y in orbit {
            frame[(y, c)] = Complex64::new(sqrt_weights[y] / mass.sqrt(), 0.0);
        }
    }
    Ok(Subspace { frame, sqrt_weights })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum HSpaceProbe {
    Certified,
    Witness { x: usize, dim: usize, degree: usize },
}

/// Whether the stabilizer-fixed space of every point is the whole space.
pub fn h_space_probe(action: &GroupAction) -> Result<HSpaceProbe, DecompositionError> {
    action.require_transitive()?;
    let n = action.degree();
    for x in 0..n {
        let dim = action.suborbits(&stabilizer(action, x)?).len();
        if dim != n {
            return Ok(HSpaceProbe::Witness { x, dim, degree: n });
        }
    }
    Ok(HSpaceProbe::Certified)
}

/// `dim(H ∩ H(x))` for every piece `H` (rows) and point `x` (columns): the
/// number of principal angles between the two subspaces whose cosine is
/// within `tol.rank` of one.
pub fn fixed_intersection_dims(
    action: &GroupAction,
    measure: &InvariantMeasure,
    d: &Decomposition,
    tol: &Tolerances,
) -> Result<Vec<Vec<usize>>, DecompositionError> {
    let hs: Vec<Subspace> = (0..action.degree())
        .map(|x| h_space(action, measure, x))
        .collect::<Result<_, _>>()?;
    Ok(d.pieces
        .iter()
        .map(|piece| {
            hs.iter()
                .map(|h| {
                    singular_values(&(piece.frame().adjoint() * h.frame()))
                        .iter()
                        .filter(|&&s| s >= 1.0 - tol.rank)
                        .count()
                })
                .collect()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::{natural_action, regular_action};
    use crate::families;
    use crate::measure::invariant_measure;
    use std::sync::Arc;

    fn rep_of(a: &GroupAction) -> UnitaryRep {
        unitary_rep(a, &invariant_measure(a, 0).unwrap()).unwrap()
    }

    #[test]
    fn rep_examples() {
        let z4 = regular_action(Arc::new(families::cyclic(4).unwrap()));
        let r = rep_of(&z4);
        assert_eq!(r.order(), 4);
        for a in r.operators() {
            for b in r.operators() {
                assert_eq!(a.then_after(b), b.then_after(a));
            }
        }
        let one = regular_action(Arc::new(families::cyclic(1).unwrap()));
        assert_eq!(rep_of(&one).operators()[0].map(), &[0]);
    }

    #[test]
    fn rep_rejects_bad_measure() {
        let a = natural_action(Arc::new(families::symmetric(3).unwrap())).unwrap();
        let m = InvariantMeasure::from_weights(vec![
            num_rational::Rational64::new(1, 2),
            num_rational::Rational64::new(1, 4),
            num_rational::Rational64::new(1, 4),
        ])
        .unwrap();
        assert!(matches!(unitary_rep(&a, &m), Err(DecompositionError::NotInvariantMeasure)));
    }

    #[test]
    fn averaging_examples() {
        let z5 = regular_action(Arc::new(families::cyclic(5).unwrap()));
        let r = rep_of(&z5);
        assert_eq!(r.commutant_average(&CMatrix::identity(5, 5)), CMatrix::identity(5, 5));
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m = random_complex(5, 5, &mut rng);
        let e = r.commutant_average(&m);
        // circulant: entries depend only on column minus row
        for i in 0..5 {
            for j in 0..5 {
                assert!((e[(i, j)] - e[((i + 1) % 5, (j + 1) % 5)]).norm() < 1e-14);
            }
        }
        assert!(max_abs(&(r.commutant_average(&e) - &e)) < 1e-14);
    }

    #[test]
    fn commutant_dimension_examples() {
        let tol = Tolerances::default();
        let s3 = natural_action(Arc::new(families::symmetric(3).unwrap())).unwrap();
        assert_eq!(commutant_dimension(&rep_of(&s3), &tol).unwrap().spectral_rank, 2);
        let z7 = regular_action(Arc::new(families::cyclic(7).unwrap()));
        assert_eq!(commutant_dimension(&rep_of(&z7), &tol).unwrap().orbital_count, 7);
        let one = regular_action(Arc::new(families::cyclic(1).unwrap()));
        assert_eq!(commutant_dimension(&rep_of(&one), &tol).unwrap().spectral_rank, 1);
        // trace route above the dense cutoff
        let z24 = regular_action(Arc::new(families::cyclic(24).unwrap()));
        assert_eq!(commutant_dimension(&rep_of(&z24), &tol).unwrap().spectral_rank, 24);
    }

    #[test]
    fn generated_subspaces() {
        let tol = Tolerances::default();
        let z4 = regular_action(Arc::new(families::cyclic(4).unwrap()));
        let r = rep_of(&z4);
        let s = invariant_subspace_generated(&r, &[FunctionVector::indicator(4, 0)], &tol).unwrap();
        assert_eq!(s.dim(), 4);
        let chi1 = FunctionVector::new((0..4).map(|k| Complex64::i().powu(k)).collect());
        assert_eq!(invariant_subspace_generated(&r, &[chi1], &tol).unwrap().dim(), 1);
        let c = FunctionVector::constant(4, Complex64::new(2.0, 0.0));
        assert_eq!(invariant_subspace_generated(&r, &[c], &tol).unwrap().dim(), 1);
        let z = FunctionVector::constant(4, Complex64::new(0.0, 0.0));
        assert_eq!(invariant_subspace_generated(&r, &[z], &tol).unwrap().dim(), 0);
    }

    #[test]
    fn s3_natural_splits_into_one_and_two() {
        let tol = Tolerances::default();
        let a = natural_action(Arc::new(families::symmetric(3).unwrap())).unwrap();
        let r = rep_of(&a);
        let d = decompose(&r, 42, &tol).unwrap();
        assert_eq!(d.dims(), vec![1, 2]);
        assert!(d.is_multiplicity_free());
        // the line is the constants
        let b = d.pieces[0].basis();
        assert!((b[(0, 0)] - b[(1, 0)]).norm() < 1e-12 && (b[(0, 0)] - b[(2, 0)]).norm() < 1e-12);
        let table = fixed_intersection_dims(&a, r.measure(), &d, &tol).unwrap();
        assert_eq!(table[1], vec![1, 1, 1]);
        assert_eq!(h_space(&a, r.measure(), 0).unwrap().dim(), 2);
    }

    #[test]
    fn stall_is_reported() {
        let a = natural_action(Arc::new(families::symmetric(3).unwrap())).unwrap();
        let r = rep_of(&a);
        let tol = Tolerances {
            max_rounds: 0,
            ..Default::default()
        };
        assert!(matches!(decompose(&r, 42, &tol), Err(DecompositionError::Stalled { max_rounds: 0 })));
    }

    #[test]
    fn h_space_examples() {
        let a = natural_action(Arc::new(families::symmetric(3).unwrap())).unwrap();
        assert_eq!(h_space_probe(&a).unwrap(), HSpaceProbe::Witness { x: 0, dim: 2, degree: 3 });
        let z = regular_action(Arc::new(families::cyclic(6).unwrap()));
        assert_eq!(h_space_probe(&z).unwrap(), HSpaceProbe::Certified);
    }
}
