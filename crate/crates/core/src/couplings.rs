//! Physical ensemble parameters, derived coupling constants and the Gaussian
//! channels for every light-atom interaction used by the protocol drivers.
//!
//! The coupling bookkeeping follows the single-pass conventions:
//! `h = \int dt d γ |Ω|² / (4Δ² + γ²)`, `κ² = h · 4Δ²/(4Δ²+γ²)`,
//! `η_A = κ²/d` and `η_L = (d/2) γ²/(4Δ²+γ²)`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::GaussianChannel;

/// Classical drive profile Ω(t) in rad/s.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum DriveProfile {
    Constant(f64),
    /// Piecewise-linear samples `(t, Ω)`, sorted in `t`; zero outside.
    Tabulated(Vec<(f64, f64)>),
}

impl DriveProfile {
    pub fn omega(&self, t: f64) -> f64 {
        match self {
            DriveProfile::Constant(w) => *w,
            DriveProfile::Tabulated(pts) => {
                if pts.is_empty() {
                    return 0.0;
                }
                if t <= pts[0].0 || t >= pts[pts.len() - 1].0 {
                    if t == pts[0].0 {
                        return pts[0].1;
                    }
                    if t == pts[pts.len() - 1].0 {
                        return pts[pts.len() - 1].1;
                    }
                    return 0.0;
                }
                let j = pts.partition_point(|&(tp, _)| tp <= t);
                let (t0, w0) = pts[j - 1];
                let (t1, w1) = pts[j];
                w0 + (w1 - w0) * (t - t0) / (t1 - t0)
            }
        }
    }

    /// `\int_{t0}^{t1} |Ω|² dt` by composite Simpson quadrature.
    pub fn omega_sq_integral(&self, t0: f64, t1: f64) -> f64 {
        if t1 <= t0 {
            return 0.0;
        }
        if let DriveProfile::Constant(w) = self {
            return w * w * (t1 - t0);
        }
        let n = 4000; // even
        let h = (t1 - t0) / n as f64;
        let f = |t: f64| self.omega(t).powi(2);
        let mut acc = f(t0) + f(t1);
        for k in 1..n {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(t0 + k as f64 * h);
        }
        acc * h / 3.0
    }
}

/// Physical parameters of one ensemble-light configuration.
///
/// Only `d`, `gamma`, `delta` and the drive are needed for most protocols;
/// geometric and counting fields feed the derived quantities.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleParams {
    /// Resonant optical depth (dimensionless).
    pub d: f64,
    /// Total excited-state decay rate (rad/s).
    pub gamma: f64,
    /// Partial decay rate into the interface ground state (rad/s).
    pub gamma0: f64,
    /// Detuning from the excited state (rad/s).
    pub delta: f64,
    /// Larmor frequency (rad/s).
    pub omega_larmor: f64,
    /// Classical drive Ω(t).
    pub rabi: DriveProfile,
    /// Medium length (m).
    pub length: f64,
    /// Beam cross-section (m²).
    pub area: f64,
    /// Optical wavelength (m).
    pub wavelength: f64,
    /// Atom number.
    pub n_atoms: Option<f64>,
    /// Photon number of the classical drive pulse.
    pub n_photons: Option<f64>,
    /// Atomic number density (m⁻³).
    pub density: Option<f64>,
    /// External light loss (windows, detection) in [0, 1].
    pub epsilon: f64,
    /// Cavity finesse, when the ensemble sits in a resonator.
    pub finesse: Option<f64>,
}

impl Default for EnsembleParams {
    fn default() -> Self {
        EnsembleParams {
            d: 10.0,
            gamma: 1.0,
            gamma0: 0.5,
            delta: 0.0,
            omega_larmor: 0.0,
            rabi: DriveProfile::Constant(0.0),
            length: 1.0,
            area: 1.0,
            wavelength: 852e-9,
            n_atoms: None,
            n_photons: None,
            density: None,
            epsilon: 0.0,
            finesse: None,
        }
    }
}

impl EnsembleParams {
    pub fn validate(&self) -> Result<()> {
        if self.d < 0.0 {
            return Err(Error::InvalidArgument("optical depth must be >= 0".into()));
        }
        if self.gamma <= 0.0 {
            return Err(Error::InvalidArgument("gamma must be positive".into()));
        }
        if !(0.0..=self.gamma).contains(&self.gamma0) {
            return Err(Error::InvalidArgument("need 0 <= gamma0 <= gamma".into()));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::LossOutOfRange { value: self.epsilon });
        }
        Ok(())
    }

    /// Photon number that balances the scattering budget
    /// `N_A η_A = N_P η_L` for this parameter set over `[0, T]`.
    pub fn balanced_photon_number(&self, duration: f64) -> Result<f64> {
        let n_a = self
            .n_atoms
            .ok_or_else(|| Error::InvalidArgument("n_atoms required".into()))?;
        let c = derive_couplings_unbalanced(self, duration)?;
        if c.eta_l == 0.0 {
            return Err(Error::InvalidArgument("eta_L = 0; cannot balance".into()));
        }
        Ok(n_a * c.eta_a / c.eta_l)
    }
}

/// Couplings derived from [`EnsembleParams`] for a pulse of duration `T`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DerivedCouplings {
    /// Integrated interaction strength h(0, T).
    pub h: f64,
    /// Coupling constant κ.
    pub kappa: f64,
    /// Spontaneous-emission probability per atom.
    pub eta_a: f64,
    /// Light damping fraction.
    pub eta_l: f64,
    /// Group velocity for a constant drive (m/s).
    pub vg: f64,
    /// Cavity cooperativity `C ≈ F·d`, when a finesse is given.
    pub cooperativity: Option<f64>,
}

fn derive_couplings_unbalanced(p: &EnsembleParams, duration: f64) -> Result<DerivedCouplings> {
    p.validate()?;
    if duration <= 0.0 {
        return Err(Error::InvalidArgument("pulse duration must be positive".into()));
    }
    let denom = 4.0 * p.delta * p.delta + p.gamma * p.gamma;
    let omega_sq = p.rabi.omega_sq_integral(0.0, duration);
    if !omega_sq.is_finite() {
        return Err(Error::InvalidArgument("drive profile is not integrable".into()));
    }
    let h = p.d * p.gamma * omega_sq / denom;
    let kappa_sq = h * 4.0 * p.delta * p.delta / denom;
    let eta_a = if p.d > 0.0 { kappa_sq / p.d } else { 0.0 };
    let eta_l = 0.5 * p.d * p.gamma * p.gamma / denom;
    let mean_omega_sq = omega_sq / duration;
    let vg = if p.d > 0.0 {
        mean_omega_sq * p.length / (p.gamma * p.d)
    } else {
        f64::INFINITY
    };
    Ok(DerivedCouplings {
        h,
        kappa: kappa_sq.sqrt(),
        eta_a,
        eta_l,
        vg,
        cooperativity: p.finesse.map(|f| f * p.d),
    })
}

/// Derive `h`, `κ`, `η_A`, `η_L`, `v_g` (and cooperativity) for a pulse of
/// duration `T`. When both atom and photon numbers are supplied the
/// scattering budget `N_A η_A = N_P η_L` is validated.
pub fn derive_couplings(p: &EnsembleParams, duration: f64) -> Result<DerivedCouplings> {
    let c = derive_couplings_unbalanced(p, duration)?;
    if let (Some(n_a), Some(n_p)) = (p.n_atoms, p.n_photons) {
        let lhs = n_a * c.eta_a;
        let rhs = n_p * c.eta_l;
        let scale = lhs.abs().max(rhs.abs()).max(1e-300);
        if (lhs - rhs).abs() / scale > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "atom/photon scattering budget violated: N_A eta_A = {lhs:.6e} vs N_P eta_L = {rhs:.6e}"
            )));
        }
    }
    Ok(c)
}

fn check_loss(loss: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&loss) {
        return Err(Error::LossOutOfRange { value: loss });
    }
    Ok(())
}

/// Total light loss from absorption `eta_l` followed by external loss
/// `epsilon` (sequential beam splitters).
pub fn compose_light_losses(eta_l: f64, epsilon: f64) -> f64 {
    1.0 - (1.0 - eta_l) * (1.0 - epsilon)
}

/// Faraday (QND) channel over modes `(L, A)`:
///
/// `X_L' = X_L + κ P_A`, `X_A' = X_A + κ P_L`, momenta conserved.
///
/// Losses damp the full output by `sqrt(1-η)` and admix vacuum, which keeps
/// the channel CP and reproduces the measured-and-fed-back variances.
pub fn faraday_channel(kappa: f64, eta_a: f64, light_loss: f64) -> Result<GaussianChannel> {
    if !kappa.is_finite() {
        return Err(Error::InvalidArgument("kappa must be finite".into()));
    }
    check_loss(eta_a)?;
    check_loss(light_loss)?;
    let mut s = DMatrix::identity(4, 4);
    // ordering (X_L, P_L, X_A, P_A)
    s[(0, 3)] = kappa;
    s[(2, 1)] = kappa;
    let tl = (1.0 - light_loss).sqrt();
    let ta = (1.0 - eta_a).sqrt();
    for col in 0..4 {
        s[(0, col)] *= tl;
        s[(1, col)] *= tl;
        s[(2, col)] *= ta;
        s[(3, col)] *= ta;
    }
    let mut noise = DMatrix::zeros(4, 4);
    noise[(0, 0)] = light_loss * 0.5;
    noise[(1, 1)] = light_loss * 0.5;
    noise[(2, 2)] = eta_a * 0.5;
    noise[(3, 3)] = eta_a * 0.5;
    GaussianChannel::new(s, DVector::zeros(4), noise)
}

/// Two-mode squeezing channel over `(L, A)` with squeeze parameter `κ/2`
/// (the weak-coupling write interaction): `Var(X_L - X_A)` and
/// `Var(P_L + P_A)` contract by `e^{-κ}` on vacuum.
pub fn parametric_gain_channel(kappa: f64) -> Result<GaussianChannel> {
    if !kappa.is_finite() {
        return Err(Error::InvalidArgument("kappa must be finite".into()));
    }
    let c = (kappa / 2.0).cosh();
    let s = (kappa / 2.0).sinh();
    let mut m = DMatrix::identity(4, 4);
    m[(0, 0)] = c;
    m[(0, 2)] = s;
    m[(1, 1)] = c;
    m[(1, 3)] = -s;
    m[(2, 0)] = s;
    m[(2, 2)] = c;
    m[(3, 1)] = -s;
    m[(3, 3)] = c;
    GaussianChannel::symplectic(m)
}

/// Mixing-angle beam splitter (reflection convention) over two modes:
/// `X1' = cosθ X1 + sinθ X2`, `X2' = sinθ X1 - cosθ X2`, same in P.
/// `θ = π/2` swaps the modes exactly.
pub fn beam_splitter_swap_channel(theta: f64) -> Result<GaussianChannel> {
    let (c, s) = (theta.cos(), theta.sin());
    let mut m = DMatrix::zeros(4, 4);
    for q in 0..2 {
        m[(q, q)] = c;
        m[(q, 2 + q)] = s;
        m[(2 + q, q)] = s;
        m[(2 + q, 2 + q)] = -c;
    }
    GaussianChannel::symplectic(m)
}

/// Single-pass-loop channel over `(A, L+)` that exchanges atoms with the
/// upper-sideband light mode with transmissivity `e^{-κ²}`:
///
/// `X_A' = e^{-κ²/2} X_A + sqrt(1-e^{-κ²}) X_L`, mirrored for light.
pub fn multipass_swap_channel(kappa: f64) -> Result<GaussianChannel> {
    if kappa < 0.0 {
        return Err(Error::InvalidArgument("kappa must be >= 0".into()));
    }
    let c = (-kappa * kappa / 2.0).exp();
    let s = (1.0 - c * c).sqrt();
    let mut m = DMatrix::zeros(4, 4);
    for q in 0..2 {
        m[(q, q)] = c;
        m[(q, 2 + q)] = s;
        m[(2 + q, q)] = -s;
        m[(2 + q, 2 + q)] = c;
    }
    GaussianChannel::symplectic(m)
}

/// Single-pulse channel for two oppositely precessing ensembles in a
/// magnetic field, over `(L_c, L_s, A+, A-)`:
///
/// ```text
/// X_Lc' = X_Lc + κ P_A+        X_Ls' = X_Ls - κ X_A-
/// X_A+' = X_A+ + κ P_Lc        P_A-' = P_A- + κ P_Ls
/// ```
/// with `P_Lc`, `P_Ls`, `P_A+`, `X_A-` conserved.
pub fn two_cell_magnetic_channel(kappa: f64) -> Result<GaussianChannel> {
    if !kappa.is_finite() {
        return Err(Error::InvalidArgument("kappa must be finite".into()));
    }
    // ordering (X_Lc, P_Lc, X_Ls, P_Ls, X_A+, P_A+, X_A-, P_A-)
    let mut m = DMatrix::identity(8, 8);
    m[(0, 5)] = kappa; // X_Lc += k P_A+
    m[(2, 6)] = -kappa; // X_Ls -= k X_A-
    m[(4, 1)] = kappa; // X_A+ += k P_Lc
    m[(7, 3)] = kappa; // P_A- += k P_Ls
    GaussianChannel::symplectic(m)
}

/// Entangling interaction of a Larmor-precessing ensemble with the cosine
/// and sine modulation modes, over `(A, L_c, L_s, back_c, back_s)`.
///
/// Besides the `κ/√2` couplings the light picks up `(κ/2)²` self terms and
/// `(κ/2)²/√3` contributions from two independent vacuum back-action modes.
/// The back-action outputs carry compensating terms so the map stays
/// exactly symplectic; protocols discard them.
pub fn teleport_entangling_channel(kappa: f64) -> Result<GaussianChannel> {
    if !kappa.is_finite() {
        return Err(Error::InvalidArgument("kappa must be finite".into()));
    }
    let k2 = kappa / 2.0_f64.sqrt();
    let kq = (kappa / 2.0) * (kappa / 2.0);
    // back-action coupling; the sqrt(2) folds the unit-variance convention
    // of the back-mode noise into our vacuum-1/2 units
    let kb = kq * (2.0_f64 / 3.0).sqrt();
    // ordering (X_A, P_A, X_Lc, P_Lc, X_Ls, P_Ls, X_bc, P_bc, X_bs, P_bs)
    let mut m = DMatrix::identity(10, 10);
    m[(0, 3)] = k2; // X_A  += k/sqrt2 P_Lc
    m[(1, 5)] = k2; // P_A  += k/sqrt2 P_Ls
    m[(2, 1)] = k2; // X_Lc += k/sqrt2 P_A
    m[(2, 5)] = kq; // X_Lc += (k/2)^2 P_Ls
    m[(2, 9)] = kb; // X_Lc += (k/2)^2/sqrt3 P_bs
    m[(4, 0)] = -k2; // X_Ls -= k/sqrt2 X_A
    m[(4, 3)] = -kq; // X_Ls -= (k/2)^2 P_Lc
    m[(4, 7)] = -kb; // X_Ls -= (k/2)^2/sqrt3 P_bc
    // compensating rows on the (discarded) back-action outputs
    m[(8, 3)] = kb; // X_bs += (k/2)^2/sqrt3 P_Lc
    m[(6, 5)] = -kb; // X_bc -= (k/2)^2/sqrt3 P_Ls
    GaussianChannel::symplectic(m)
}

/// Symplectic basis change from cosine/sine modulation modes to upper/lower
/// sideband modes, over `(c, s) -> (upper, lower)`:
///
/// `X+ = (X_s - P_c)/√2`, `P+ = (X_c + P_s)/√2`,
/// `X- = (X_s + P_c)/√2`, `P- = -(X_c - P_s)/√2`.
pub fn sideband_transform() -> GaussianChannel {
    let r = 1.0 / 2.0_f64.sqrt();
    // input ordering (X_c, P_c, X_s, P_s) -> output (X+, P+, X-, P-)
    let mut m = DMatrix::zeros(4, 4);
    m[(0, 2)] = r;
    m[(0, 1)] = -r;
    m[(1, 0)] = r;
    m[(1, 3)] = r;
    m[(2, 2)] = r;
    m[(2, 1)] = r;
    m[(3, 0)] = -r;
    m[(3, 3)] = r;
    GaussianChannel::symplectic(m).expect("sideband transform is symplectic")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{GaussianState, Quadrature};
    use approx::assert_abs_diff_eq;

    fn vac(n: usize) -> GaussianState {
        GaussianState::vacuum(n)
    }

    #[test]
    fn derive_couplings_zero_drive() {
        let p = EnsembleParams {
            rabi: DriveProfile::Constant(0.0),
            ..Default::default()
        };
        let c = derive_couplings(&p, 1.0).unwrap();
        assert_eq!(c.h, 0.0);
        assert_eq!(c.kappa, 0.0);
        assert_eq!(c.eta_a, 0.0);
    }

    #[test]
    fn kappa_sq_approaches_h_far_detuned() {
        let p = EnsembleParams {
            delta: 1e6,
            rabi: DriveProfile::Constant(2e3),
            ..Default::default()
        };
        let c = derive_couplings(&p, 1.0).unwrap();
        assert_abs_diff_eq!(c.kappa * c.kappa / c.h, 1.0, epsilon = 1e-9);
        // kappa^2 = d eta_A identically
        assert_abs_diff_eq!(c.kappa * c.kappa, p.d * c.eta_a, epsilon = 1e-12);
    }

    #[test]
    fn h_constant_drive_closed_form() {
        let p = EnsembleParams {
            d: 25.0,
            gamma: 2.0,
            delta: 30.0,
            rabi: DriveProfile::Constant(1.5),
            ..Default::default()
        };
        let t = 0.7;
        let c = derive_couplings(&p, t).unwrap();
        let expect = p.d * p.gamma * 1.5 * 1.5 * t / (4.0 * 30.0 * 30.0 + 4.0);
        assert_abs_diff_eq!(c.h, expect, epsilon = 1e-12 * expect);
    }

    #[test]
    fn tabulated_drive_matches_trapezoid_oracle() {
        // independent fine-grid trapezoid on the same profile
        let pts: Vec<(f64, f64)> = (0..=100)
            .map(|k| {
                let t = k as f64 / 100.0;
                (t, (std::f64::consts::PI * t).sin())
            })
            .collect();
        let drive = DriveProfile::Tabulated(pts.clone());
        let n = 200_000;
        let mut acc = 0.0;
        for k in 0..n {
            let t0 = k as f64 / n as f64;
            let t1 = (k + 1) as f64 / n as f64;
            acc += 0.5 * (drive.omega(t0).powi(2) + drive.omega(t1).powi(2)) * (t1 - t0);
        }
        let got = drive.omega_sq_integral(0.0, 1.0);
        assert_abs_diff_eq!(got, acc, epsilon = 1e-10);
    }

    #[test]
    fn photon_balance_validates() {
        let mut p = EnsembleParams {
            d: 30.0,
            gamma: 1.0,
            delta: 200.0,
            rabi: DriveProfile::Constant(5.0),
            n_atoms: Some(1e8),
            ..Default::default()
        };
        let n_p = p.balanced_photon_number(1.0).unwrap();
        p.n_photons = Some(n_p);
        let c = derive_couplings(&p, 1.0).unwrap();
        assert_abs_diff_eq!(1e8 * c.eta_a, n_p * c.eta_l, epsilon = 1e-9 * n_p * c.eta_l);
        // an inconsistent budget is rejected
        p.n_photons = Some(n_p * 1.5);
        assert!(derive_couplings(&p, 1.0).is_err());
    }

    #[test]
    fn faraday_lossless_variances() {
        let ch = faraday_channel(1.0, 0.0, 0.0).unwrap();
        assert!(ch.symplectic_defect() < 1e-12);
        let out = vac(2).apply_channel(&ch).unwrap();
        assert_abs_diff_eq!(out.var_of("m0", Quadrature::X).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(out.var_of("m0", Quadrature::P).unwrap(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(out.var_of("m1", Quadrature::X).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(out.var_of("m1", Quadrature::P).unwrap(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn faraday_zero_coupling_is_identity() {
        let ch = faraday_channel(0.0, 0.0, 0.0).unwrap();
        let st = GaussianState::prepare(2, &[(1.0, 2.0), (-0.5, 0.3)], &[]).unwrap();
        let out = st.apply_channel(&ch).unwrap();
        assert_abs_diff_eq!((out.mean() - st.mean()).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn beam_splitter_invariance_of_vacuum_and_swap() {
        let ch = beam_splitter_swap_channel(std::f64::consts::FRAC_PI_4).unwrap();
        let out = vac(2).apply_channel(&ch).unwrap();
        assert_abs_diff_eq!((out.cov() - vac(2).cov()).norm(), 0.0, epsilon = 1e-12);

        let alpha = GaussianState::prepare(2, &[(2.0, 0.0)], &[]).unwrap();
        let split = alpha.apply_channel(&ch).unwrap();
        let r = 2.0 / 2.0_f64.sqrt();
        assert_abs_diff_eq!(split.mean_of("m0", Quadrature::X).unwrap(), r, epsilon = 1e-12);
        assert_abs_diff_eq!(split.mean_of("m1", Quadrature::X).unwrap(), r, epsilon = 1e-12);

        let swap = beam_splitter_swap_channel(std::f64::consts::FRAC_PI_2).unwrap();
        let sw = alpha.apply_channel(&swap).unwrap();
        assert_abs_diff_eq!(sw.mean_of("m1", Quadrature::X).unwrap(), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sw.mean_of("m0", Quadrature::X).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn parametric_gain_squeezes_difference() {
        let kappa = 0.8;
        let ch = parametric_gain_channel(kappa).unwrap();
        let out = vac(2).apply_channel(&ch).unwrap();
        let xdiff = out.quad_selector("m0", Quadrature::X).unwrap()
            - out.quad_selector("m1", Quadrature::X).unwrap();
        let (_, v) = out.linear_stats(&xdiff).unwrap();
        assert_abs_diff_eq!(v, (-kappa).exp(), epsilon = 1e-12);
        let xsum = out.quad_selector("m0", Quadrature::X).unwrap()
            + out.quad_selector("m1", Quadrature::X).unwrap();
        let (_, va) = out.linear_stats(&xsum).unwrap();
        assert_abs_diff_eq!(v * va, 1.0, epsilon = 1e-12); // product preserved
    }

    #[test]
    fn multipass_limits() {
        // kappa = 0: identity
        let id = multipass_swap_channel(0.0).unwrap();
        assert_abs_diff_eq!(
            (id.linear() - DMatrix::<f64>::identity(4, 4)).norm(),
            0.0,
            epsilon = 1e-14
        );
        // large kappa: full swap (atomic output = light input)
        let sw = multipass_swap_channel(8.0).unwrap();
        let st = GaussianState::prepare(2, &[(0.0, 0.0), (1.7, -0.4)], &[]).unwrap();
        let out = st.apply_channel(&sw).unwrap();
        assert_abs_diff_eq!(out.mean_of("m0", Quadrature::X).unwrap(), 1.7, epsilon = 1e-10);
        // kappa^2 = ln 2: equal mixing weights
        let half = multipass_swap_channel((2.0_f64.ln()).sqrt()).unwrap();
        assert_abs_diff_eq!(half.linear()[(0, 0)], 1.0 / 2.0_f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(half.linear()[(0, 2)], 1.0 / 2.0_f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn two_cell_channel_structure() {
        let ch = two_cell_magnetic_channel(0.0).unwrap();
        assert_abs_diff_eq!(
            (ch.linear() - DMatrix::<f64>::identity(8, 8)).norm(),
            0.0,
            epsilon = 1e-14
        );
        let ch = two_cell_magnetic_channel(1.3).unwrap();
        assert!(ch.symplectic_defect() < 1e-12);
        // conserved rows
        let s = ch.linear();
        for row in [1usize, 3, 5, 6] {
            for col in 0..8 {
                let expect = if col == row { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(s[(row, col)], expect, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn commuting_nonlocal_observables() {
        // [P1+P2, X1-X2] = 0: in the (A+, A-) representation these are
        // P_A+ and X_A-, block off-diagonals of the channel must vanish.
        let ch = two_cell_magnetic_channel(0.9).unwrap();
        let s = ch.linear();
        // P_A+ row (5) has no X_A- column (6) component and vice versa
        assert_eq!(s[(5, 6)], 0.0);
        assert_eq!(s[(6, 5)], 0.0);
    }

    #[test]
    fn teleport_channel_symplectic_and_identity_at_zero() {
        let id = teleport_entangling_channel(0.0).unwrap();
        assert_abs_diff_eq!(
            (id.linear() - DMatrix::<f64>::identity(10, 10)).norm(),
            0.0,
            epsilon = 1e-14
        );
        for kappa in [0.3, 1.0, 1.48, 2.5] {
            let ch = teleport_entangling_channel(kappa).unwrap();
            assert!(ch.symplectic_defect() < 1e-10, "kappa = {kappa}");
        }
    }

    #[test]
    fn sideband_transform_is_symplectic() {
        assert!(sideband_transform().symplectic_defect() < 1e-12);
    }

    #[test]
    fn lossy_faraday_matches_minimal_variance_formula() {
        // conditional variance after measuring X_L with optimal feedback:
        // (1 + eta_A (1-eps) k^2) / (1 + (1-eps) k^2) / 2 = 0.3 at
        // k = 1, eta_A = 0.1, eps = 0.2
        let (kappa, eta_a, eps) = (1.0, 0.1, 0.2);
        let ch = faraday_channel(kappa, eta_a, eps).unwrap();
        let out = vac(2).apply_channel(&ch).unwrap();
        let cov_px = out
            .cov_of("m1", Quadrature::P, "m0", Quadrature::X)
            .unwrap();
        let var_x = out.var_of("m0", Quadrature::X).unwrap();
        let var_p = out.var_of("m1", Quadrature::P).unwrap();
        let conditional = var_p - cov_px * cov_px / var_x;
        assert_abs_diff_eq!(conditional, 0.3, epsilon = 1e-12);
    }
}
