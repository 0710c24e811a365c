use nalgebra::DMatrix;
use num_complex::Complex64;

use super::state::FockVec;
use crate::error::{Error, Result};

/// Density operator over a multi-mode truncated Fock space.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    n_modes: usize,
    cutoff: usize,
    rho: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn zeros(n_modes: usize, cutoff: usize) -> Self {
        let dim = (cutoff + 1).pow(n_modes as u32);
        DensityMatrix {
            n_modes,
            cutoff,
            rho: DMatrix::zeros(dim, dim),
        }
    }

    pub fn from_pure(psi: &FockVec) -> Self {
        let dim = (psi.cutoff() + 1).pow(psi.n_modes() as u32);
        let mut rho = DMatrix::zeros(dim, dim);
        let entries: Vec<(usize, Complex64)> = psi
            .iter_amps()
            .map(|(occ, a)| (flat_index(&occ, psi.cutoff()), a))
            .collect();
        for &(i, a) in &entries {
            for &(j, b) in &entries {
                rho[(i, j)] = a * b.conj();
            }
        }
        DensityMatrix {
            n_modes: psi.n_modes(),
            cutoff: psi.cutoff(),
            rho,
        }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.rho
    }

    pub fn trace(&self) -> f64 {
        (0..self.rho.nrows()).map(|i| self.rho[(i, i)].re).sum()
    }

    /// Accumulate `weight * |psi><psi|` (used for mixture assembly).
    pub fn add_pure(&mut self, psi: &FockVec, weight: f64) {
        let entries: Vec<(usize, Complex64)> = psi
            .iter_amps()
            .map(|(occ, a)| (flat_index(&occ, psi.cutoff()), a))
            .collect();
        for &(i, a) in &entries {
            for &(j, b) in &entries {
                self.rho[(i, j)] += weight * a * b.conj();
            }
        }
    }

    pub fn scale(&mut self, s: f64) {
        self.rho.iter_mut().for_each(|x| *x *= s);
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        if other.cutoff != self.cutoff {
            return Err(Error::DimensionMismatch("tensor requires equal cutoffs".into()));
        }
        let rho = other.rho.kronecker(&self.rho); // other's modes appended (higher strides)
        Ok(DensityMatrix {
            n_modes: self.n_modes + other.n_modes,
            cutoff: self.cutoff,
            rho,
        })
    }

    /// Apply a single-mode Kraus operator (matrix on the per-mode space) to
    /// `mode`, accumulating `K rho K†` into a fresh density.
    pub fn apply_kraus_set(&self, mode: usize, kraus: &[DMatrix<Complex64>]) -> DensityMatrix {
        let mut out = DensityMatrix::zeros(self.n_modes, self.cutoff);
        for k in kraus {
            let full = self.embed_one_mode(mode, k);
            out.rho += &full * &self.rho * full.adjoint();
        }
        out
    }

    /// Apply a unitary acting on two modes (given as a matrix on the
    /// two-mode subspace with mode `i` fast, mode `j` slow).
    pub fn apply_two_mode_unitary(
        &self,
        i: usize,
        j: usize,
        u: &DMatrix<Complex64>,
    ) -> DensityMatrix {
        let full = self.embed_two_modes(i, j, u);
        DensityMatrix {
            n_modes: self.n_modes,
            cutoff: self.cutoff,
            rho: &full * &self.rho * full.adjoint(),
        }
    }

    fn embed_one_mode(&self, mode: usize, op: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let base = self.cutoff + 1;
        let dim = base.pow(self.n_modes as u32);
        let mut full = DMatrix::zeros(dim, dim);
        for row in 0..dim {
            let occ_r = unflatten(row, self.n_modes, self.cutoff);
            for a in 0..base {
                let v = op[(occ_r[mode], a)];
                if v == Complex64::default() {
                    continue;
                }
                let mut occ_c = occ_r.clone();
                occ_c[mode] = a;
                full[(row, flat_index(&occ_c, self.cutoff))] += v;
            }
        }
        full
    }

    fn embed_two_modes(&self, i: usize, j: usize, op: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let base = self.cutoff + 1;
        let dim = base.pow(self.n_modes as u32);
        let mut full = DMatrix::zeros(dim, dim);
        for row in 0..dim {
            let occ_r = unflatten(row, self.n_modes, self.cutoff);
            let r_sub = occ_r[i] + base * occ_r[j];
            for a in 0..base {
                for b in 0..base {
                    let v = op[(r_sub, a + base * b)];
                    if v == Complex64::default() {
                        continue;
                    }
                    let mut occ_c = occ_r.clone();
                    occ_c[i] = a;
                    occ_c[j] = b;
                    full[(row, flat_index(&occ_c, self.cutoff))] += v;
                }
            }
        }
        full
    }

    /// Condition on a number-diagonal POVM over two modes with weight
    /// `w(n_i, n_j)`, tracing those modes out. Returns the probability and
    /// the unnormalized reduced density over the remaining modes.
    pub fn number_povm_two_modes<F>(&self, i: usize, j: usize, weight: F) -> (f64, DensityMatrix)
    where
        F: Fn(usize, usize) -> f64,
    {
        let keep: Vec<usize> = (0..self.n_modes).filter(|&m| m != i && m != j).collect();
        let mut out = DensityMatrix::zeros(keep.len(), self.cutoff);
        let dim = self.rho.nrows();
        for row in 0..dim {
            let occ_r = unflatten(row, self.n_modes, self.cutoff);
            let w = weight(occ_r[i], occ_r[j]);
            if w == 0.0 {
                continue;
            }
            for col in 0..dim {
                let occ_c = unflatten(col, self.n_modes, self.cutoff);
                if occ_c[i] != occ_r[i] || occ_c[j] != occ_r[j] {
                    continue;
                }
                let v = self.rho[(row, col)];
                if v == Complex64::default() {
                    continue;
                }
                let ro: Vec<usize> = keep.iter().map(|&m| occ_r[m]).collect();
                let co: Vec<usize> = keep.iter().map(|&m| occ_c[m]).collect();
                out.rho[(flat_index(&ro, self.cutoff), flat_index(&co, self.cutoff))] += w * v;
            }
        }
        (out.trace(), out)
    }

    /// Reduce a two-mode density to the `{0, 1}` occupation subspace,
    /// returning the qubit density and the discarded weight.
    pub fn to_two_qubit(&self) -> Result<(DensityTwoQubit, f64)> {
        if self.n_modes != 2 {
            return Err(Error::DimensionMismatch(
                "two-qubit reduction needs a two-mode density".into(),
            ));
        }
        let mut rho4 = DMatrix::zeros(4, 4);
        for (r, (m_r, n_r)) in qubit_basis().iter().enumerate() {
            for (c, (m_c, n_c)) in qubit_basis().iter().enumerate() {
                rho4[(r, c)] = self.rho[(
                    flat_index(&[*m_r, *n_r], self.cutoff),
                    flat_index(&[*m_c, *n_c], self.cutoff),
                )];
            }
        }
        let total = self.trace();
        let kept = (0..4).map(|i| rho4[(i, i)].re).sum::<f64>();
        if kept <= 0.0 {
            return Err(Error::ZeroSuccessProbability(
                "no weight in the qubit subspace".into(),
            ));
        }
        rho4.iter_mut().for_each(|x| *x /= Complex64::from(kept));
        Ok((DensityTwoQubit::new(rho4)?, (total - kept).max(0.0)))
    }
}

fn qubit_basis() -> [(usize, usize); 4] {
    // |00>, |01>, |10>, |11> with first mode as the first qubit
    [(0, 0), (0, 1), (1, 0), (1, 1)]
}

fn flat_index(occ: &[usize], cutoff: usize) -> usize {
    let base = cutoff + 1;
    occ.iter().rev().fold(0, |acc, &n| acc * base + n)
}

fn unflatten(mut idx: usize, n_modes: usize, cutoff: usize) -> Vec<usize> {
    let base = cutoff + 1;
    let mut occ = vec![0usize; n_modes];
    for slot in occ.iter_mut() {
        *slot = idx % base;
        idx /= base;
    }
    occ
}

/// Two-qubit density matrix in the `|00>, |01>, |10>, |11>` basis.
#[derive(Debug, Clone)]
pub struct DensityTwoQubit {
    rho: DMatrix<Complex64>,
}

impl DensityTwoQubit {
    pub fn new(rho: DMatrix<Complex64>) -> Result<Self> {
        if rho.nrows() != 4 || rho.ncols() != 4 {
            return Err(Error::DimensionMismatch("two-qubit density must be 4x4".into()));
        }
        let herm = (&rho - rho.adjoint()).norm();
        if herm > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "density not Hermitian (defect {herm:.3e})"
            )));
        }
        let tr: f64 = (0..4).map(|i| rho[(i, i)].re).sum();
        if (tr - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!("trace {tr} != 1")));
        }
        let min_eig = hermitian_eigenvalues(&rho)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -1e-9 {
            return Err(Error::InvalidArgument(format!(
                "density not positive semidefinite (min eig {min_eig:.3e})"
            )));
        }
        Ok(DensityTwoQubit { rho })
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.rho
    }

    pub fn from_bell_plus() -> Self {
        let mut rho = DMatrix::zeros(4, 4);
        for (i, j) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            rho[(i, j)] = Complex64::new(0.5, 0.0);
        }
        DensityTwoQubit::new(rho).unwrap()
    }
}

/// Eigendecomposition of a complex Hermitian matrix via its real embedding
/// `[[A, -B], [B, A]]`; every eigenvalue appears twice and each real
/// eigenvector `(p; q)` lifts to the complex eigenvector `p + iq`.
fn hermitian_eigen(m: &DMatrix<Complex64>) -> (Vec<f64>, Vec<nalgebra::DVector<Complex64>>) {
    let n = m.nrows();
    let mut emb = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let v = m[(i, j)];
            emb[(i, j)] = v.re;
            emb[(n + i, n + j)] = v.re;
            emb[(i, n + j)] = -v.im;
            emb[(n + i, j)] = v.im;
        }
    }
    let sym = (&emb + emb.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let mut vals = Vec::with_capacity(2 * n);
    let mut vecs = Vec::with_capacity(2 * n);
    for k in 0..2 * n {
        vals.push(eig.eigenvalues[k]);
        let col = eig.eigenvectors.column(k);
        let w = nalgebra::DVector::from_iterator(
            n,
            (0..n).map(|r| Complex64::new(col[r], col[n + r])),
        );
        vecs.push(w);
    }
    (vals, vecs)
}

fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let (mut vals, _) = hermitian_eigen(m);
    vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
    vals.into_iter().step_by(2).collect()
}

/// Hermitian square root of a PSD matrix (negative dust clipped at zero).
fn hermitian_sqrt(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = m.nrows();
    let (vals, vecs) = hermitian_eigen(m);
    let mut out = DMatrix::<Complex64>::zeros(n, n);
    for (lam, w) in vals.iter().zip(vecs.iter()) {
        let wl = lam.max(0.0).sqrt() * 0.5; // embedding double-counts
        for r in 0..n {
            for c in 0..n {
                out[(r, c)] += Complex64::from(wl) * w[r] * w[c].conj();
            }
        }
    }
    out
}

/// Wootters concurrence of a two-qubit density matrix.
pub fn concurrence(rho: &DensityTwoQubit) -> Result<f64> {
    let m = rho.matrix();
    // sigma_y x sigma_y in the |00>, |01>, |10>, |11> basis
    let mut yy = DMatrix::<Complex64>::zeros(4, 4);
    yy[(0, 3)] = Complex64::new(-1.0, 0.0);
    yy[(1, 2)] = Complex64::new(1.0, 0.0);
    yy[(2, 1)] = Complex64::new(1.0, 0.0);
    yy[(3, 0)] = Complex64::new(-1.0, 0.0);
    let rho_tilde = &yy * m.map(|x| x.conj()) * &yy;
    // eig(rho rho_tilde) equals the spectrum of the Hermitian PSD matrix
    // sqrt(rho_tilde) rho sqrt(rho_tilde)
    let root = hermitian_sqrt(&rho_tilde);
    let herm = &root * m * &root;
    let mut lams: Vec<f64> = hermitian_eigenvalues(&herm)
        .into_iter()
        .map(|x| x.max(0.0).sqrt())
        .collect();
    lams.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok((lams[0] - lams[1] - lams[2] - lams[3]).max(0.0))
}
