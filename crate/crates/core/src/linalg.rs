//! Dense complex helpers on top of nalgebra.

use nalgebra::{DMatrix, SymmetricEigen, SVD};
use num_complex::Complex64;
use rand::Rng;

pub type CMatrix = DMatrix<Complex64>;

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// `(M + M*) / 2`.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Largest absolute eigenvalue of a Hermitian matrix: its operator norm.
pub fn hermitian_norm(m: &CMatrix) -> f64 {
    hermitian_eigen(&hermitize(m))
        .0
        .iter()
        .fold(0.0, |acc: f64, v| acc.max(v.abs()))
}

/// Singular values, descending.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = SVD::new(m.clone(), false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Orthonormal basis of the column space, dropping singular values below
/// `rel_tol` times the largest.
pub fn orthonormal_range(m: &CMatrix, rel_tol: f64) -> CMatrix {
    let n = m.nrows();
    if n == 0 || m.ncols() == 0 {
        return CMatrix::zeros(n, 0);
    }
    let svd = SVD::new(m.clone(), true, false);
    let u = svd.u.expect("requested U");
    let sv = &svd.singular_values;
    let smax = sv.iter().fold(0.0_f64, |a, &b| a.max(b));
    if smax == 0.0 || !smax.is_finite() {
        return CMatrix::zeros(n, 0);
    }
    let keep: Vec<usize> = (0..sv.len()).filter(|&i| sv[i] > rel_tol * smax).collect();
    CMatrix::from_fn(n, keep.len(), |r, c| u[(r, keep[c])])
}

/// Orthogonal projector `Q Q*` onto the span of an orthonormal frame.
pub fn projector(frame: &CMatrix) -> CMatrix {
    frame * frame.adjoint()
}

/// A basis of `span(frame)` that depends only on the subspace: greedy
/// Gram–Schmidt on the columns of the projector, taking at each step the
/// first column whose residual is within a relative `1e-6` of the largest.
/// Each vector has a real positive entry at its pivot.
pub fn canonical_frame(frame: &CMatrix) -> CMatrix {
    let n = frame.nrows();
    let d = frame.ncols();
    let mut residual = projector(frame);
    let mut out = CMatrix::zeros(n, d);
    for k in 0..d {
        let norms: Vec<f64> = (0..n).map(|j| residual.column(j).norm()).collect();
        let max = norms.iter().fold(0.0_f64, |a, &b| a.max(b));
        let j = norms.iter().position(|&v| v >= max * (1.0 - 1e-6)).unwrap_or(0);
        let v = residual.column(j) / Complex64::new(norms[j], 0.0);
        let coeffs = v.adjoint() * &residual;
        residual -= &v * coeffs;
        out.set_column(k, &v);
    }
    out
}

pub fn random_complex<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

pub fn random_hermitian<R: Rng>(d: usize, rng: &mut R) -> CMatrix {
    hermitize(&random_complex(d, d, rng))
}

/// Rows permuted by a point map: `out[y, :] = m[map[y], :]`. For a frame
/// `Q` this is `L Q` where `(L f)(y) = f(map[y])`.
pub fn permute_rows(m: &CMatrix, map: &[usize]) -> CMatrix {
    CMatrix::from_fn(m.nrows(), m.ncols(), |r, c| m[(map[r], c)])
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |a, v| a.max(v.norm()))
}

/// Groups consecutive ascending eigenvalues whose gap is at most
/// `rel_tol · max(1, max |λ|)`. Returns index ranges.
pub fn cluster_sorted(values: &[f64], rel_tol: f64) -> Vec<std::ops::Range<usize>> {
    if values.is_empty() {
        return Vec::new();
    }
    let scale = values.iter().fold(1.0_f64, |a, v| a.max(v.abs()));
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..values.len() {
        if values[i] - values[i - 1] > rel_tol * scale {
            out.push(start..i);
            start = i;
        }
    }
    out.push(start..values.len());
    out
}
