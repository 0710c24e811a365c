use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::channel::GaussianChannel;
use super::linalg;
use super::{DEGENERATE_VARIANCE, PHYSICALITY_TOL};
use crate::error::{Error, Result};

/// Which quadrature of a mode is addressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quadrature {
    X,
    P,
}

impl Quadrature {
    fn offset(self) -> usize {
        match self {
            Quadrature::X => 0,
            Quadrature::P => 1,
        }
    }
}

/// Result of a homodyne measurement together with the feedback gain that a
/// protocol attaches to it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub mode: String,
    pub quadrature: Quadrature,
    pub outcome: f64,
    pub gain: f64,
}

impl MeasurementRecord {
    pub fn new(mode: impl Into<String>, quadrature: Quadrature, outcome: f64, gain: f64) -> Self {
        Self {
            mode: mode.into(),
            quadrature,
            outcome,
            gain,
        }
    }
}

/// How a homodyne outcome is produced: pinned externally or sampled from the
/// marginal of the measured quadrature with an explicit seed.
#[derive(Debug, Clone, Copy)]
pub enum HomodyneOutcome {
    Fixed(f64),
    Sample(u64),
}

/// Gaussian state of `n` bosonic modes: mean vector and covariance matrix in
/// `(X1, P1, X2, P2, ...)` ordering, vacuum variance 1/2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianState {
    labels: Vec<String>,
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

impl GaussianState {
    /// Vacuum of `n` modes labeled `m0, m1, ...`.
    pub fn vacuum(n_modes: usize) -> Self {
        Self::vacuum_labeled(&(0..n_modes).map(|k| format!("m{k}")).collect::<Vec<_>>())
    }

    /// Vacuum with explicit mode labels.
    pub fn vacuum_labeled<S: AsRef<str>>(labels: &[S]) -> Self {
        let n = labels.len();
        GaussianState {
            labels: labels.iter().map(|s| s.as_ref().to_string()).collect(),
            mean: DVector::zeros(2 * n),
            cov: DMatrix::identity(2 * n, 2 * n) * 0.5,
        }
    }

    /// Coherent/squeezed product state. `displacements` are `(x, p)` means,
    /// `scalings` multiply the vacuum variance of each quadrature, so
    /// `(1, 1)` is coherent and `(s, 1/s)` with `s < 1` squeezes X.
    ///
    /// States violating the uncertainty bound are rejected.
    pub fn prepare(
        n_modes: usize,
        displacements: &[(f64, f64)],
        scalings: &[(f64, f64)],
    ) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::InvalidArgument("need at least one mode".into()));
        }
        if displacements.len() > n_modes || scalings.len() > n_modes {
            return Err(Error::DimensionMismatch(format!(
                "{} displacements / {} scalings for {} modes",
                displacements.len(),
                scalings.len(),
                n_modes
            )));
        }
        let mut st = Self::vacuum(n_modes);
        for (k, &(dx, dp)) in displacements.iter().enumerate() {
            st.mean[2 * k] = dx;
            st.mean[2 * k + 1] = dp;
        }
        for (k, &(sx, sp)) in scalings.iter().enumerate() {
            if sx <= 0.0 || sp <= 0.0 {
                return Err(Error::UnphysicalVariance(format!(
                    "scaling ({sx}, {sp}) on mode {k} must be positive"
                )));
            }
            st.cov[(2 * k, 2 * k)] = 0.5 * sx;
            st.cov[(2 * k + 1, 2 * k + 1)] = 0.5 * sp;
        }
        st.check_physical()?;
        Ok(st)
    }

    /// Build a state from raw parts (validated).
    pub fn from_parts(labels: Vec<String>, mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let n = labels.len();
        if mean.len() != 2 * n || cov.nrows() != 2 * n || cov.ncols() != 2 * n {
            return Err(Error::DimensionMismatch(format!(
                "{} labels vs mean {} / cov {}x{}",
                n,
                mean.len(),
                cov.nrows(),
                cov.ncols()
            )));
        }
        if linalg::asymmetry(&cov) > 1e-12 {
            return Err(Error::UnphysicalVariance(
                "covariance matrix is not symmetric".into(),
            ));
        }
        let st = GaussianState { labels, mean, cov };
        st.check_physical()?;
        Ok(st)
    }

    pub fn n_modes(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn mode_index(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownMode(label.to_string()))
    }

    fn quad_index(&self, mode: &str, quad: Quadrature) -> Result<usize> {
        Ok(2 * self.mode_index(mode)? + quad.offset())
    }

    pub fn rename_mode(&mut self, from: &str, to: impl Into<String>) -> Result<()> {
        let i = self.mode_index(from)?;
        self.labels[i] = to.into();
        Ok(())
    }

    pub fn mean_of(&self, mode: &str, quad: Quadrature) -> Result<f64> {
        Ok(self.mean[self.quad_index(mode, quad)?])
    }

    pub fn var_of(&self, mode: &str, quad: Quadrature) -> Result<f64> {
        let i = self.quad_index(mode, quad)?;
        Ok(self.cov[(i, i)])
    }

    pub fn cov_of(
        &self,
        mode_a: &str,
        quad_a: Quadrature,
        mode_b: &str,
        quad_b: Quadrature,
    ) -> Result<f64> {
        let i = self.quad_index(mode_a, quad_a)?;
        let j = self.quad_index(mode_b, quad_b)?;
        Ok(self.cov[(i, j)])
    }

    /// Mean and variance of an arbitrary quadrature combination `c . xi`.
    pub fn linear_stats(&self, coeffs: &DVector<f64>) -> Result<(f64, f64)> {
        if coeffs.len() != self.mean.len() {
            return Err(Error::DimensionMismatch(format!(
                "coefficient vector length {} vs 2n = {}",
                coeffs.len(),
                self.mean.len()
            )));
        }
        let mean = coeffs.dot(&self.mean);
        let var = (coeffs.transpose() * &self.cov * coeffs)[(0, 0)];
        Ok((mean, var))
    }

    /// Basis vector for `mode`'s quadrature, for use with [`linear_stats`].
    pub fn quad_selector(&self, mode: &str, quad: Quadrature) -> Result<DVector<f64>> {
        let mut v = DVector::zeros(self.mean.len());
        v[self.quad_index(mode, quad)?] = 1.0;
        Ok(v)
    }

    /// Reduced state of a subset of modes (in the order given).
    pub fn marginal<S: AsRef<str>>(&self, modes: &[S]) -> Result<GaussianState> {
        let idx: Vec<usize> = modes
            .iter()
            .map(|m| self.mode_index(m.as_ref()))
            .collect::<Result<_>>()?;
        let rows: Vec<usize> = idx.iter().flat_map(|&k| [2 * k, 2 * k + 1]).collect();
        let mean = DVector::from_iterator(rows.len(), rows.iter().map(|&r| self.mean[r]));
        let mut cov = DMatrix::zeros(rows.len(), rows.len());
        for (a, &ra) in rows.iter().enumerate() {
            for (b, &rb) in rows.iter().enumerate() {
                cov[(a, b)] = self.cov[(ra, rb)];
            }
        }
        Ok(GaussianState {
            labels: idx.iter().map(|&k| self.labels[k].clone()).collect(),
            mean,
            cov,
        })
    }

    /// Tensor a fresh mode in a given single-mode state onto `self`.
    pub fn append(&mut self, label: impl Into<String>, single: &GaussianState) -> Result<()> {
        if single.n_modes() != 1 {
            return Err(Error::DimensionMismatch(
                "append expects a single-mode state".into(),
            ));
        }
        let n_old = self.mean.len();
        let mut mean = DVector::zeros(n_old + 2);
        mean.rows_mut(0, n_old).copy_from(&self.mean);
        mean[n_old] = single.mean[0];
        mean[n_old + 1] = single.mean[1];
        let mut cov = DMatrix::zeros(n_old + 2, n_old + 2);
        cov.view_mut((0, 0), (n_old, n_old)).copy_from(&self.cov);
        cov.view_mut((n_old, n_old), (2, 2)).copy_from(&single.cov);
        self.labels.push(label.into());
        self.mean = mean;
        self.cov = cov;
        Ok(())
    }

    pub fn append_vacuum(&mut self, label: impl Into<String>) {
        self.append(label, &GaussianState::vacuum(1)).unwrap();
    }

    /// Symplectic eigenvalues of the covariance matrix.
    pub fn symplectic_eigenvalues(&self) -> Vec<f64> {
        linalg::symplectic_eigenvalues(&self.cov)
    }

    /// Error unless all symplectic eigenvalues respect the uncertainty
    /// bound; the slack scales with the covariance magnitude so strongly
    /// squeezed states are not rejected on roundoff.
    pub fn check_physical(&self) -> Result<()> {
        let nu_min = self
            .symplectic_eigenvalues()
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        let scale = self.cov.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
        if nu_min < 0.5 - PHYSICALITY_TOL * scale {
            return Err(Error::UnphysicalState { nu_min });
        }
        Ok(())
    }

    /// Apply a channel covering the full state.
    pub fn apply_channel(&self, ch: &GaussianChannel) -> Result<GaussianState> {
        let all: Vec<&str> = self.labels.iter().map(|s| s.as_str()).collect();
        self.apply_channel_on(ch, &all)
    }

    /// Apply a `k`-mode channel to the listed modes (the channel's mode order
    /// is matched against the list).
    pub fn apply_channel_on<S: AsRef<str>>(
        &self,
        ch: &GaussianChannel,
        modes: &[S],
    ) -> Result<GaussianState> {
        if ch.n_modes() != modes.len() {
            return Err(Error::DimensionMismatch(format!(
                "channel acts on {} modes, {} given",
                ch.n_modes(),
                modes.len()
            )));
        }
        ch.check_cp()?;
        let idx: Vec<usize> = modes
            .iter()
            .map(|m| self.mode_index(m.as_ref()))
            .collect::<Result<_>>()?;
        let dim = self.mean.len();
        // embed channel into the full space
        let rows: Vec<usize> = idx.iter().flat_map(|&k| [2 * k, 2 * k + 1]).collect();
        let mut s_full = DMatrix::identity(dim, dim);
        let mut n_full = DMatrix::zeros(dim, dim);
        let mut d_full = DVector::zeros(dim);
        for (a, &ra) in rows.iter().enumerate() {
            d_full[ra] = ch.displacement()[a];
            for (b, &rb) in rows.iter().enumerate() {
                s_full[(ra, rb)] = ch.linear()[(a, b)];
                n_full[(ra, rb)] = ch.noise()[(a, b)];
            }
            // clear the identity rows we are replacing
            for c in 0..dim {
                if !rows.contains(&c) {
                    s_full[(ra, c)] = 0.0;
                }
            }
        }
        let mean = &s_full * &self.mean + d_full;
        let cov = &s_full * &self.cov * s_full.transpose() + n_full;
        let out = GaussianState {
            labels: self.labels.clone(),
            mean,
            cov: (&cov + cov.transpose()) * 0.5,
        };
        out.check_physical()?;
        Ok(out)
    }

    /// Homodyne a quadrature of one mode. Returns the outcome and the
    /// conditioned state with the measured mode removed.
    pub fn homodyne_condition(
        &self,
        mode: &str,
        quad: Quadrature,
        outcome: HomodyneOutcome,
    ) -> Result<(f64, GaussianState)> {
        let k = self.mode_index(mode)?;
        let v = 2 * k + quad.offset();
        let var_v = self.cov[(v, v)];
        if var_v < DEGENERATE_VARIANCE {
            return Err(Error::DegenerateQuadrature { var: var_v });
        }
        let xi = match outcome {
            HomodyneOutcome::Fixed(x) => x,
            HomodyneOutcome::Sample(seed) => {
                let mut rng = ChaCha12Rng::seed_from_u64(seed);
                Normal::new(self.mean[v], var_v.sqrt()).unwrap().sample(&mut rng)
            }
        };
        if !xi.is_finite() {
            return Err(Error::InvalidArgument("non-finite homodyne outcome".into()));
        }

        let keep: Vec<usize> = (0..self.mean.len())
            .filter(|&r| r != 2 * k && r != 2 * k + 1)
            .collect();
        let mut mean = DVector::zeros(keep.len());
        let mut cov = DMatrix::zeros(keep.len(), keep.len());
        for (a, &ra) in keep.iter().enumerate() {
            mean[a] = self.mean[ra] + self.cov[(ra, v)] / var_v * (xi - self.mean[v]);
            for (b, &rb) in keep.iter().enumerate() {
                cov[(a, b)] = self.cov[(ra, rb)] - self.cov[(ra, v)] * self.cov[(v, rb)] / var_v;
            }
        }
        let labels = self
            .labels
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != k)
            .map(|(_, l)| l.clone())
            .collect();
        Ok((xi, GaussianState { labels, mean, cov }))
    }

    /// Displace `target` by `gain * outcome` of an earlier measurement.
    pub fn feedback_displace(
        &self,
        record: &MeasurementRecord,
        target_mode: &str,
        target_quad: Quadrature,
    ) -> Result<GaussianState> {
        if self.labels.iter().any(|l| l == &record.mode) {
            return Err(Error::InvalidArgument(format!(
                "mode {} is still part of the state; feedback applies to an already-measured mode",
                record.mode
            )));
        }
        if !record.outcome.is_finite() || !record.gain.is_finite() {
            return Err(Error::InvalidArgument(
                "measurement record must be finite".into(),
            ));
        }
        let mut out = self.clone();
        let i = out.quad_index(target_mode, target_quad)?;
        out.mean[i] += record.gain * record.outcome;
        Ok(out)
    }

    /// Draw one phase-space sample (Wigner distribution) of all quadratures.
    pub fn sample(&self, rng: &mut impl rand::Rng) -> DVector<f64> {
        let dim = self.mean.len();
        // jitter keeps the Cholesky stable for conditioned (rank-deficient) covs
        let mut cov = self.cov.clone();
        for i in 0..dim {
            cov[(i, i)] += 1e-12;
        }
        let chol = cov.cholesky().expect("covariance not PSD");
        let normal = Normal::new(0.0, 1.0).unwrap();
        let z = DVector::from_iterator(dim, (0..dim).map(|_| normal.sample(rng)));
        &self.mean + chol.l() * z
    }
}
