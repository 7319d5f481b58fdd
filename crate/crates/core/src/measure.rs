//! Haar measure, the induced invariant measure on the point set, and the
//! inner products and norms of `L²(μ)` and `Lᵖ(μ)`.
//!
//! Weights are exact rationals. Norms are computed in floating point but
//! sum their terms in sorted order, so permuting the entries of a function
//! while preserving the weights gives bit-identical results.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::{BigRational, Rational64};
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::action::{ActionError, GroupAction};
use crate::group::FiniteGroup;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MeasureError {
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error("function has length {found}, measure has {expected} points")]
    Length { expected: usize, found: usize },
}

/// A probability measure on a finite set, by exact point weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantMeasure {
    weights: Vec<Rational64>,
}

impl InvariantMeasure {
    /// The uniform probability measure on `n` points.
    pub fn uniform(n: usize) -> Self {
        let w = Rational64::new(1, n as i64);
        Self { weights: vec![w; n] }
    }

    /// Fails unless the weights are nonnegative and sum to one.
    pub fn from_weights(weights: Vec<Rational64>) -> Option<Self> {
        let total: Rational64 = weights.iter().copied().sum();
        if total != Rational64::one() || weights.iter().any(|w| *w < Rational64::zero()) {
            return None;
        }
        Some(Self { weights })
    }

    pub fn weights(&self) -> &[Rational64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights_f64(&self) -> Vec<f64> {
        self.weights.iter().map(|w| w.to_f64().unwrap_or(0.0)).collect()
    }

    /// Weights as `"p/q"` strings.
    pub fn to_strings(&self) -> Vec<String> {
        self.weights
            .iter()
            .map(|w| format!("{}/{}", w.numer(), w.denom()))
            .collect()
    }

    pub fn is_uniform(&self) -> bool {
        let n = self.weights.len() as i64;
        self.weights.iter().all(|w| *w == Rational64::new(1, n))
    }
}

impl Serialize for InvariantMeasure {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

/// Haar probability measure on a finite group: uniform over the elements.
pub fn haar(group: &FiniteGroup) -> InvariantMeasure {
    InvariantMeasure::uniform(group.order())
}

/// Invariance of the Haar weights under left translation, right
/// translation and inversion, checked exactly.
pub fn haar_is_bi_invariant(group: &FiniteGroup, m: &InvariantMeasure) -> bool {
    let w = m.weights();
    group.elements().all(|a| {
        group.elements().all(|g| {
            w[group.mul(a, g)] == w[g] && w[group.mul(g, a)] == w[g] && w[group.inv(g)] == w[g]
        })
    })
}

/// The measure `f ↦ Σ_γ f(γ·base) / |G|` on the point set.
pub fn invariant_measure(action: &GroupAction, base: usize) -> Result<InvariantMeasure, MeasureError> {
    action.check_point(base)?;
    action.require_transitive()?;
    let order = action.group().order() as i64;
    let mut counts = vec![0i64; action.degree()];
    for g in action.group().elements() {
        counts[action.act(g, base)] += 1;
    }
    Ok(InvariantMeasure {
        weights: counts.into_iter().map(|c| Rational64::new(c, order)).collect(),
    })
}

/// Pushforward of `μ` under the point map of `α`: `(α_*μ)(y) = μ({z : α·z = y})`.
pub fn pushforward(measure: &InvariantMeasure, action: &GroupAction, alpha: usize) -> Vec<Rational64> {
    let mut out = vec![Rational64::zero(); action.degree()];
    for (z, w) in measure.weights.iter().enumerate() {
        out[action.act(alpha, z)] += w;
    }
    out
}

/// Whether every pushforward `α_*μ` equals `μ`, compared on singletons.
pub fn verify_invariance(measure: &InvariantMeasure, action: &GroupAction) -> bool {
    measure.len() == action.degree()
        && action
            .group()
            .elements()
            .all(|a| pushforward(measure, action, a) == measure.weights)
}

/// Dimension of the space of invariant signed weight vectors, from the exact
/// rank of the constraints `w(α·y) − w(y) = 0`. Equals the number of orbits.
pub fn invariant_measure_space_dim(action: &GroupAction) -> usize {
    let n = action.degree();
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for a in action.group().elements() {
        for y in 0..n {
            let z = action.act(a, y);
            if z == y || !seen.insert((y.min(z), y.max(z))) {
                continue;
            }
            let mut row = vec![BigRational::zero(); n];
            row[z] = BigRational::one();
            row[y] = -BigRational::one();
            rows.push(row);
        }
    }
    n - exact_rank(rows, n)
}

/// Rank over ℚ by fraction-exact Gaussian elimination.
pub fn exact_rank(mut rows: Vec<Vec<BigRational>>, cols: usize) -> usize {
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank][c].clone();
        for r in 0..rows.len() {
            if r == rank || rows[r][c].is_zero() {
                continue;
            }
            let factor = &rows[r][c] / &pivot;
            let pivot_row = rows[rank].clone();
            for (entry, p) in rows[r].iter_mut().zip(&pivot_row).skip(c) {
                *entry -= &factor * p;
            }
        }
        rank += 1;
    }
    rank
}

/// Converts an integer matrix for [`exact_rank`].
pub fn rational_rows(rows: &[Vec<i64>]) -> Vec<Vec<BigRational>> {
    rows.iter()
        .map(|r| r.iter().map(|&v| BigRational::from_integer(BigInt::from(v))).collect())
        .collect()
}

/// A complex function on the point set.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionVector {
    pub values: Vec<Complex64>,
}

impl FunctionVector {
    pub fn new(values: Vec<Complex64>) -> Self {
        Self { values }
    }

    pub fn real(values: &[f64]) -> Self {
        Self {
            values: values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }

    pub fn constant(n: usize, c: Complex64) -> Self {
        Self { values: vec![c; n] }
    }

    pub fn indicator(n: usize, x: usize) -> Self {
        let mut values = vec![Complex64::zero(); n];
        values[x] = Complex64::new(1.0, 0.0);
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `y ↦ f(map[y])`.
    pub fn precompose(&self, map: &[usize]) -> Self {
        Self {
            values: map.iter().map(|&y| self.values[y]).collect(),
        }
    }

    /// Points where the function is nonzero.
    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.values[i] != Complex64::zero()).collect()
    }
}

/// Exponent of an `Lᵖ` norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

fn check_len(f: &FunctionVector, m: &InvariantMeasure) -> Result<(), MeasureError> {
    if f.len() == m.len() {
        Ok(())
    } else {
        Err(MeasureError::Length {
            expected: m.len(),
            found: f.len(),
        })
    }
}

/// `Σ f(x)·conj(g(x))·w(x)`.
pub fn inner_product(
    f: &FunctionVector,
    g: &FunctionVector,
    m: &InvariantMeasure,
) -> Result<Complex64, MeasureError> {
    check_len(f, m)?;
    check_len(g, m)?;
    let w = m.weights_f64();
    Ok(f.values
        .iter()
        .zip(&g.values)
        .zip(&w)
        .map(|((a, b), w)| a * b.conj() * w)
        .sum())
}

/// `(Σ |f|ᵖ w)^{1/p}`, or the sup of `|f|` over points of positive weight.
pub fn lp_norm(f: &FunctionVector, p: Exponent, m: &InvariantMeasure) -> Result<f64, MeasureError> {
    check_len(f, m)?;
    let w = m.weights_f64();
    match p {
        Exponent::Infinity => Ok(f
            .values
            .iter()
            .zip(&w)
            .filter(|(_, &w)| w > 0.0)
            .map(|(v, _)| v.norm())
            .fold(0.0, f64::max)),
        Exponent::Finite(p) => {
            let mut terms: Vec<f64> = f
                .values
                .iter()
                .zip(&w)
                .map(|(v, w)| v.norm().powf(p) * w)
                .collect();
            terms.sort_by(f64::total_cmp);
            Ok(terms.iter().sum::<f64>().powf(1.0 / p))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::{natural_action, regular_action};
    use crate::families;
    use crate::group::{group_from_generators, Permutation};
    use std::sync::Arc;

    fn r(p: i64, q: i64) -> Rational64 {
        Rational64::new(p, q)
    }

    #[test]
    fn haar_examples() {
        let c4 = families::cyclic(4).unwrap();
        assert_eq!(haar(&c4).weights(), &[r(1, 4); 4]);
        assert_eq!(haar(&families::cyclic(1).unwrap()).weights(), &[r(1, 1)]);
        let s3 = families::symmetric(3).unwrap();
        let h = haar(&s3);
        assert_eq!(h.weights(), &[r(1, 6); 6]);
        assert!(haar_is_bi_invariant(&s3, &h));
        assert_eq!(h.to_strings()[0], "1/6");
    }

    #[test]
    fn induced_measure_is_uniform_and_base_independent() {
        let nat = natural_action(Arc::new(families::symmetric(3).unwrap())).unwrap();
        for base in 0..3 {
            let m = invariant_measure(&nat, base).unwrap();
            assert!(m.is_uniform());
            assert!(verify_invariance(&m, &nat));
        }
        let one = regular_action(Arc::new(families::cyclic(1).unwrap()));
        assert_eq!(invariant_measure(&one, 0).unwrap().weights(), &[r(1, 1)]);
    }

    #[test]
    fn induced_measure_requires_transitivity() {
        let g = Arc::new(
            group_from_generators(4, &[Permutation::parse("(0 1)(2 3)", 4).unwrap()]).unwrap(),
        );
        let a = natural_action(g).unwrap();
        assert_eq!(
            invariant_measure(&a, 0),
            Err(MeasureError::Action(ActionError::NotTransitive))
        );
        assert_eq!(invariant_measure_space_dim(&a), 2);
    }

    #[test]
    fn non_uniform_weights_fail_invariance() {
        let nat = natural_action(Arc::new(families::symmetric(3).unwrap())).unwrap();
        let m = InvariantMeasure::from_weights(vec![r(1, 2), r(1, 4), r(1, 4)]).unwrap();
        assert!(!verify_invariance(&m, &nat));
        assert!(InvariantMeasure::from_weights(vec![r(1, 2), r(1, 4)]).is_none());
        let trivial = natural_action(Arc::new(group_from_generators(3, &[]).unwrap())).unwrap();
        assert!(verify_invariance(&m, &trivial));
        assert_eq!(invariant_measure_space_dim(&trivial), 3);
    }

    #[test]
    fn space_dim_transitive_is_one() {
        let nat = natural_action(Arc::new(families::dihedral(5).unwrap())).unwrap();
        assert_eq!(invariant_measure_space_dim(&nat), 1);
    }

    #[test]
    fn exact_rank_small() {
        assert_eq!(exact_rank(rational_rows(&[vec![1, 2], vec![2, 4]]), 2), 1);
        assert_eq!(exact_rank(rational_rows(&[vec![0, 1], vec![1, 0]]), 2), 2);
        assert_eq!(exact_rank(Vec::new(), 3), 0);
    }

    #[test]
    fn norms() {
        let m = InvariantMeasure::uniform(4);
        let one = FunctionVector::constant(4, Complex64::new(1.0, 0.0));
        for p in [Exponent::Finite(1.0), Exponent::Finite(2.0), Exponent::Finite(3.5), Exponent::Infinity] {
            assert!((lp_norm(&one, p, &m).unwrap() - 1.0).abs() < 1e-15);
        }
        let d = FunctionVector::indicator(4, 2);
        assert!((lp_norm(&d, Exponent::Finite(2.0), &m).unwrap() - 0.5).abs() < 1e-15);
        assert!(lp_norm(&FunctionVector::indicator(3, 0), Exponent::Infinity, &m).is_err());
    }

    #[test]
    fn characters_are_orthogonal() {
        let m = InvariantMeasure::uniform(4);
        let chi = |k: u32| {
            FunctionVector::new((0..4).map(|x| Complex64::i().powu(k * x)).collect())
        };
        for a in 0..4 {
            for b in 0..4 {
                let ip = inner_product(&chi(a), &chi(b), &m).unwrap();
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((ip - Complex64::new(expect, 0.0)).norm() < 1e-15);
            }
        }
    }
}
