use num_complex::Complex64;

use super::state::FockVec;
use super::TRUNCATION_TAIL_LIMIT;
use crate::error::{Error, Result};

/// Two-mode state with amplitudes `c[m][n]` on `|m n>`, `m, n <= cutoff`.
/// Mode 0 is the collective atomic oscillator, mode 1 the scattered light.
#[derive(Debug, Clone)]
pub struct TwoModeFock {
    cutoff: usize,
    amps: Vec<Vec<Complex64>>,
}

impl TwoModeFock {
    pub fn new(cutoff: usize, amps: Vec<Vec<Complex64>>) -> Result<Self> {
        if amps.len() != cutoff + 1 || amps.iter().any(|r| r.len() != cutoff + 1) {
            return Err(Error::DimensionMismatch(format!(
                "amplitude grid must be {0}x{0}",
                cutoff + 1
            )));
        }
        let mut st = TwoModeFock { cutoff, amps };
        let n = st.norm_sq();
        if n < 1e-300 {
            return Err(Error::ZeroSuccessProbability("null state".into()));
        }
        st.scale(1.0 / n.sqrt());
        Ok(st)
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn amplitude(&self, m: usize, n: usize) -> Complex64 {
        self.amps[m][n]
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps
            .iter()
            .flat_map(|r| r.iter())
            .map(|a| a.norm_sqr())
            .sum()
    }

    fn scale(&mut self, s: f64) {
        for row in &mut self.amps {
            for a in row {
                *a *= s;
            }
        }
    }

    /// Mean photon number of a mode (0 = atoms, 1 = light).
    pub fn mean_photons(&self, mode: usize) -> f64 {
        let mut acc = 0.0;
        for (m, row) in self.amps.iter().enumerate() {
            for (n, a) in row.iter().enumerate() {
                let occ = if mode == 0 { m } else { n };
                acc += occ as f64 * a.norm_sqr();
            }
        }
        acc
    }

    /// Quadrature covariance entries `(Var X_a, Var X_l, Cov X_a X_l,
    /// Cov P_a P_l)` computed from the number-basis amplitudes, with
    /// `X = (a + a†)/√2`.
    pub fn quadrature_moments(&self) -> (f64, f64, f64, f64) {
        // <a_0† a_0>, <a_1† a_1>, <a_0 a_1>
        let mut n0 = 0.0;
        let mut n1 = 0.0;
        let mut a01 = Complex64::default();
        for (m, row) in self.amps.iter().enumerate() {
            for (n, a) in row.iter().enumerate() {
                n0 += m as f64 * a.norm_sqr();
                n1 += n as f64 * a.norm_sqr();
                if m + 1 <= self.cutoff && n + 1 <= self.cutoff {
                    // <psi| a_0 a_1 |psi>: connects |m+1, n+1> to |m, n>
                    let upper = self.amps[m + 1][n + 1];
                    a01 += a.conj() * upper * ((m + 1) as f64 * (n + 1) as f64).sqrt();
                }
            }
        }
        let var_xa = n0 + 0.5; // <X²> for zero-mean states with <a a> = 0
        let var_xl = n1 + 0.5;
        let cov_x = a01.re; // <X_a X_l> = Re <a_0 a_1> + Re <a_0† a_1>, cross term 0 here
        let cov_p = -a01.re; // <P_a P_l> = -Re <a_0 a_1> for the same class
        (var_xa, var_xl, cov_x, cov_p)
    }

    /// Convert to a general multi-mode vector (atom mode first).
    pub fn to_fock_vec(&self) -> FockVec {
        let mut v = FockVec::vacuum(2, self.cutoff);
        v.set_amplitude(&[0, 0], Complex64::default());
        for (m, row) in self.amps.iter().enumerate() {
            for (n, &a) in row.iter().enumerate() {
                v.set_amplitude(&[m, n], a);
            }
        }
        v
    }
}

/// Weak-drive write interaction: the two-mode squeezed state
/// `sech(κ/2) Σ tanh(κ/2)^n |nn>`, truncated at `cutoff`.
///
/// The truncated weight must stay below [`TRUNCATION_TAIL_LIMIT`].
pub fn dlcz_write(kappa: f64, cutoff: usize) -> Result<TwoModeFock> {
    if kappa < 0.0 {
        return Err(Error::InvalidArgument("kappa must be >= 0".into()));
    }
    if cutoff < 2 {
        return Err(Error::InvalidArgument("cutoff must be >= 2".into()));
    }
    let r = kappa / 2.0;
    let t = r.tanh();
    let sech = 1.0 / r.cosh();
    // exact tail of the untruncated state beyond n = cutoff - 1
    let tail = t.powi(2 * cutoff as i32) ; // sech² Σ_{n>=cutoff} t^{2n} = t^{2N} (geometric)
    if tail > TRUNCATION_TAIL_LIMIT {
        return Err(Error::TruncationTail {
            tail,
            limit: TRUNCATION_TAIL_LIMIT,
        });
    }
    let mut amps = vec![vec![Complex64::default(); cutoff + 1]; cutoff + 1];
    for n in 0..=cutoff {
        amps[n][n] = Complex64::new(sech * t.powi(n as i32), 0.0);
    }
    TwoModeFock::new(cutoff, amps)
}

/// `g² = <n(n-1)>/<n>²` of a photon-number distribution.
pub fn g2_of_distribution(p: &[f64]) -> Result<f64> {
    let norm: f64 = p.iter().sum();
    if norm <= 0.0 {
        return Err(Error::ZeroSuccessProbability("empty distribution".into()));
    }
    let mean: f64 = p.iter().enumerate().map(|(n, w)| n as f64 * w).sum::<f64>() / norm;
    if mean == 0.0 {
        return Err(Error::ZeroSuccessProbability("zero mean photon number".into()));
    }
    let nn: f64 = p
        .iter()
        .enumerate()
        .map(|(n, w)| (n * n.saturating_sub(1)) as f64 * w)
        .sum::<f64>()
        / norm;
    Ok(nn / (mean * mean))
}

/// Second-order correlation of `signal_mode` conditioned on exactly one
/// photon in `herald_mode` (modes 0/1 of a [`TwoModeFock`]).
pub fn g2_conditional(state: &TwoModeFock, herald_mode: usize, signal_mode: usize) -> Result<f64> {
    if herald_mode > 1 || signal_mode > 1 || herald_mode == signal_mode {
        return Err(Error::InvalidArgument("modes must be 0 and 1".into()));
    }
    let mut p = vec![0.0; state.cutoff() + 1];
    for s in 0..=state.cutoff() {
        let a = if herald_mode == 0 {
            state.amplitude(1, s)
        } else {
            state.amplitude(s, 1)
        };
        p[s] = a.norm_sqr();
    }
    if p.iter().sum::<f64>() <= 0.0 {
        return Err(Error::ZeroSuccessProbability(
            "herald click has zero probability".into(),
        ));
    }
    g2_of_distribution(&p)
}
