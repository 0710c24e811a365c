//! Figures of merit on Gaussian states: overlap fidelity, EPR variance and
//! the two-mode entanglement of formation.

use super::state::{GaussianState, Quadrature};
use crate::error::{Error, Result};

/// Overlap fidelity of two single-mode Gaussian states with uncorrelated
/// X/P quadratures,
///
/// `F = [(Vx+Vx')(Vp+Vp')]^{-1/2} exp[-dx^2/2(Vx+Vx') - dp^2/2(Vp+Vp')]`.
///
/// `mode` names the mode to compare in both states. X-P covariances are
/// required to be negligible; the protocols in this crate only produce
/// axis-aligned states.
pub fn gaussian_fidelity(a: &GaussianState, b: &GaussianState, mode: &str) -> Result<f64> {
    for st in [a, b] {
        let c = st.cov_of(mode, Quadrature::X, mode, Quadrature::P)?;
        if c.abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "mode {mode} has X-P correlation {c:.3e}; fidelity formula assumes none"
            )));
        }
    }
    let sx = a.var_of(mode, Quadrature::X)? + b.var_of(mode, Quadrature::X)?;
    let sp = a.var_of(mode, Quadrature::P)? + b.var_of(mode, Quadrature::P)?;
    let dx = a.mean_of(mode, Quadrature::X)? - b.mean_of(mode, Quadrature::X)?;
    let dp = a.mean_of(mode, Quadrature::P)? - b.mean_of(mode, Quadrature::P)?;
    Ok((sx * sp).powf(-0.5) * (-dx * dx / (2.0 * sx) - dp * dp / (2.0 * sp)).exp())
}

/// EPR variance `Var(X1 - X2) + Var(P1 + P2)` of two modes. A value below 2
/// certifies entanglement for symmetric Gaussian states; two independent
/// vacua give exactly 2.
pub fn epr_variance(state: &GaussianState, mode_1: &str, mode_2: &str) -> Result<f64> {
    let mut x_diff = state.quad_selector(mode_1, Quadrature::X)?;
    x_diff -= state.quad_selector(mode_2, Quadrature::X)?;
    let mut p_sum = state.quad_selector(mode_1, Quadrature::P)?;
    p_sum += state.quad_selector(mode_2, Quadrature::P)?;
    let (_, vx) = state.linear_stats(&x_diff)?;
    let (_, vp) = state.linear_stats(&p_sum)?;
    Ok(vx + vp)
}

/// Entanglement of formation (ebits) of a symmetric two-mode Gaussian state
/// with EPR variance `delta_epr`, via the squeezing parameter
/// `r = -ln(delta_epr/2)/2`:
///
/// `E = cosh^2(r) log2 cosh^2(r) - sinh^2(r) log2 sinh^2(r)`.
///
/// Only meaningful for symmetric states; 0 at the separability boundary.
pub fn eof_from_epr(delta_epr: f64) -> Result<f64> {
    if delta_epr <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "EPR variance must be positive, got {delta_epr}"
        )));
    }
    if delta_epr >= 2.0 {
        return Ok(0.0);
    }
    let r = -0.5 * (delta_epr / 2.0).ln();
    let ch = r.cosh().powi(2);
    let sh = r.sinh().powi(2);
    if sh == 0.0 {
        return Ok(0.0);
    }
    Ok(ch * ch.log2() - sh * sh.log2())
}

/// Wootters entanglement of formation from the concurrence of a two-qubit
/// state: `h((1 + sqrt(1 - C^2))/2)` with `h` the binary entropy.
pub fn eof_from_concurrence(c: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&c) {
        return Err(Error::InvalidArgument(format!(
            "concurrence must lie in [0, 1], got {c}"
        )));
    }
    let x = 0.5 * (1.0 + (1.0 - c * c).sqrt());
    Ok(binary_entropy(x))
}

fn binary_entropy(x: f64) -> f64 {
    let term = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.log2() };
    term(x) + term(1.0 - x)
}
