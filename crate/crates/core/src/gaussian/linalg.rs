//! Small linear-algebra helpers shared by the Gaussian machinery.

use nalgebra::{DMatrix, DVector};

/// Standard symplectic form for `n` modes in `(X1, P1, ...)` ordering.
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

/// Symplectic eigenvalues of a covariance matrix, one per mode.
///
/// Computed as the singular values of the antisymmetric matrix
/// `cov^{1/2} Omega cov^{1/2}` (similar to `i Omega cov`), which only needs
/// a symmetric eigendecomposition and an SVD — no non-Hermitian solver.
pub fn symplectic_eigenvalues(cov: &DMatrix<f64>) -> Vec<f64> {
    let n = cov.nrows() / 2;
    let sym = (cov + cov.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let mut root = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for k in 0..2 * n {
        let lam = eig.eigenvalues[k].max(0.0).sqrt();
        let v = eig.eigenvectors.column(k);
        for r in 0..2 * n {
            for c in 0..2 * n {
                root[(r, c)] += lam * v[r] * v[c];
            }
        }
    }
    let k: DMatrix<f64> = &root * symplectic_form(n) * &root;
    let mut sv: Vec<f64> = k.svd(false, false).singular_values.iter().cloned().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    // singular values come in equal pairs, one per mode
    sv.into_iter().step_by(2).take(n).collect()
}

/// Deviation of `S` from being symplectic: max |S Omega S^T - Omega|.
pub fn symplectic_defect(s: &DMatrix<f64>) -> f64 {
    let n = s.nrows() / 2;
    let omega = symplectic_form(n);
    let d = s * &omega * s.transpose() - omega;
    d.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// Minimum eigenvalue of the Hermitian matrix `A + iB` (`A` symmetric, `B`
/// antisymmetric), computed through the real embedding `[[A, -B], [B, A]]`.
pub fn min_eig_hermitian(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut emb = DMatrix::zeros(2 * n, 2 * n);
    emb.view_mut((0, 0), (n, n)).copy_from(a);
    emb.view_mut((n, n), (n, n)).copy_from(a);
    emb.view_mut((0, n), (n, n)).copy_from(&(-b));
    emb.view_mut((n, 0), (n, n)).copy_from(b);
    // embedding doubles every eigenvalue's multiplicity; min is unaffected
    let sym = (&emb + emb.transpose()) * 0.5;
    sym.symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |m, &x| m.min(x))
}

/// Maximum absolute asymmetry of a square matrix.
pub fn asymmetry(m: &DMatrix<f64>) -> f64 {
    let d = m - m.transpose();
    d.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// Solve `M x = rhs` by LU with partial pivoting; `None` if singular.
pub fn solve(m: &DMatrix<f64>, rhs: &DVector<f64>) -> Option<DVector<f64>> {
    m.clone().lu().solve(rhs)
}
