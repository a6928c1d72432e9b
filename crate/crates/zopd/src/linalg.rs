//! Small dense linear-algebra helpers shared by the solver modules.
//!
//! Everything here operates on symmetric matrices of modest size (the
//! problem dimensions in this crate are at most a few hundred), so a full
//! symmetric eigendecomposition is affordable wherever a spectral bound is
//! needed.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

/// All eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_eigenvalues(m: &ArrayView2<f64>) -> Array1<f64> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "eigenvalues of a non-square matrix");
    let dm = nalgebra::DMatrix::from_fn(n, n, |i, j| m[[i, j]]);
    let mut ev: Vec<f64> = dm.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Array1::from_vec(ev)
}

/// Largest eigenvalue of a symmetric matrix.
pub fn max_eigenvalue(m: &ArrayView2<f64>) -> f64 {
    let ev = symmetric_eigenvalues(m);
    ev[ev.len() - 1]
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(m: &ArrayView2<f64>) -> f64 {
    symmetric_eigenvalues(m)[0]
}

/// Gram matrix `AᵀA`.
pub fn gram(a: &ArrayView2<f64>) -> Array2<f64> {
    a.t().dot(a)
}

/// Weighted squared norm `vᵀ G v`.
pub fn weighted_norm_sq(g: &ArrayView2<f64>, v: &ArrayView1<f64>) -> f64 {
    v.dot(&g.dot(v))
}

/// Max absolute asymmetry `|M - Mᵀ|`.
pub fn asymmetry(m: &ArrayView2<f64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            worst = worst.max((m[[i, j]] - m[[j, i]]).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn eigenvalues_of_diagonal() {
        let m = array![[3.0, 0.0], [0.0, -1.0]];
        let ev = symmetric_eigenvalues(&m.view());
        assert!((ev[0] + 1.0).abs() < 1e-12);
        assert!((ev[1] - 3.0).abs() < 1e-12);
        assert!((max_eigenvalue(&m.view()) - 3.0).abs() < 1e-12);
        assert!((min_eigenvalue(&m.view()) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn gram_is_psd() {
        let a = array![[1.0, 2.0], [0.0, 1.0], [3.0, -1.0]];
        let g = gram(&a.view());
        assert!(min_eigenvalue(&g.view()) >= -1e-12);
        assert!(asymmetry(&g.view()) < 1e-14);
    }

    #[test]
    fn weighted_norm_matches_direct() {
        let g = array![[2.0, 1.0], [1.0, 2.0]];
        let v = array![1.0, -1.0];
        // vᵀGv = 2 - 1 - 1 + 2 = 2
        assert!((weighted_norm_sq(&g.view(), &v.view()) - 2.0).abs() < 1e-14);
    }
}
