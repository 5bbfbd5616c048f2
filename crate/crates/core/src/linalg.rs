//! Small dense linear-algebra helpers shared across modules.

use nalgebra::{DMatrix, DVector};

/// Spectral norm (largest singular value) via power iteration on `AᵀA`,
/// run to 1e-12 relative convergence with at most 10 000 iterations.
pub fn spectral_norm(a: &DMatrix<f64>) -> f64 {
    let n = a.ncols();
    if n == 0 || a.iter().all(|&v| v == 0.0) {
        return 0.0;
    }
    let gram = a.transpose() * a;
    // Deterministic start with energy in every coordinate.
    let mut v = DVector::from_iterator(n, (0..n).map(|i| 1.0 + (i as f64) * 0.1));
    v /= v.norm();
    let mut lambda = 0.0;
    for _ in 0..10_000 {
        let w = &gram * &v;
        let norm = w.norm();
        if norm == 0.0 {
            return 0.0;
        }
        let next = norm;
        v = w / norm;
        if (next - lambda).abs() <= 1e-12 * next.max(1.0) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    lambda.sqrt()
}

/// Eigenvalue range of a symmetric matrix.
pub fn symmetric_eigen_bounds(m: &DMatrix<f64>) -> (f64, f64) {
    let eig = m.clone().symmetric_eigen();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &l in eig.eigenvalues.iter() {
        lo = lo.min(l);
        hi = hi.max(l);
    }
    (lo, hi)
}
