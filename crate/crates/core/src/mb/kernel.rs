//! Analytic solution of the beam-splitter equations: the Bessel-kernel
//! `m(Ω; t, z)` and the interaction-strength integral `h(t, t')`.

use num_complex::Complex64;

use super::grid::PulseGrid;
use crate::couplings::EnsembleParams;
use crate::error::{Error, Result};

/// Series/asymptotic switch point for `I_0` of complex argument; validated
/// against the series on both sides.
const I0_SWITCH: f64 = 12.0;

/// `I_0(x) e^{-x}` for complex `x` with `Re x >= 0` (modulus bounded), via
/// the power series below [`I0_SWITCH`] and the large-argument expansion
/// above it.
pub fn bessel_i0_scaled(x: Complex64) -> Complex64 {
    if x.norm() < I0_SWITCH {
        let mut term = Complex64::new(1.0, 0.0);
        let mut acc = term;
        let q = x * x / 4.0;
        for k in 1..=60 {
            term *= q / ((k * k) as f64);
            acc += term;
            if term.norm() < 1e-18 * acc.norm() {
                break;
            }
        }
        acc * (-x).exp()
    } else {
        // two-exponential asymptotics (both saddle contributions), needed
        // near the imaginary axis where e^{-x} is not subdominant:
        // I_0(x) ~ [S+(x) e^x ± i S-(x) e^{-x}] / sqrt(2 pi x),
        // S±(x) = sum_k (±1)^k a_k / x^k, a_k = ((2k-1)!!)^2 / (k! 8^k)
        let mut s_plus = Complex64::new(1.0, 0.0);
        let mut s_minus = Complex64::new(1.0, 0.0);
        let mut coeff = 1.0;
        let mut pow = Complex64::new(1.0, 0.0);
        let mut last = f64::INFINITY;
        for k in 1..=16 {
            let kk = k as f64;
            coeff *= (2.0 * kk - 1.0) * (2.0 * kk - 1.0) / (kk * 8.0);
            pow /= x;
            let term = pow * coeff;
            let t = term.norm();
            if t > last {
                break; // asymptotic series started diverging
            }
            s_plus += term;
            if k % 2 == 0 {
                s_minus += term;
            } else {
                s_minus -= term;
            }
            last = t;
        }
        let branch = if x.im >= 0.0 {
            Complex64::new(0.0, 1.0)
        } else {
            Complex64::new(0.0, -1.0)
        };
        (s_plus + branch * (-2.0 * x).exp() * s_minus)
            / (2.0 * std::f64::consts::PI * x).sqrt()
    }
}

/// Interaction strength `h(t0, t1) = ∫ d γ |Ω|² / (4Δ² + γ²) dt`.
pub fn h_function(p: &EnsembleParams, t0: f64, t1: f64) -> Result<f64> {
    if t1 < t0 {
        return Err(Error::InvalidArgument("need t0 <= t1".into()));
    }
    let denom = 4.0 * p.delta * p.delta + p.gamma * p.gamma;
    Ok(p.d * p.gamma * p.rabi.omega_sq_integral(t0, t1) / denom)
}

/// Kernel evaluation: the complex value and the detuning phase
/// `tan(φ) = γ / 2Δ`.
#[derive(Debug, Clone, Copy)]
pub struct KernelEval {
    pub value: Complex64,
    pub phase: f64,
}

/// Analytic retrieval kernel of the beam-splitter interaction,
///
/// ```text
/// m(Ω; t, z) = sqrt(γ d / L) (-i) Ω(t) / (4 (Δ - iγ/2))
///              exp(i [ (2Δ+iγ)/(2γ) h(0,t)/d + d γ z / (4 L (Δ - iγ/2)) ])
///              I_0( -i e^{iφ} sqrt(h(0,t) z / L) )
/// ```
///
/// evaluated with the scaled Bessel function so large arguments cannot
/// overflow. Retrieval maps a spin wave to output light through
/// `a_L,out(t) = ∫ dz m(t, L - z) a_A(z)`; by time-reversal symmetry the
/// same kernel at `(T - t, z)` with conjugate drive governs storage.
pub fn analytic_bs_kernel(p: &EnsembleParams, t: f64, z: f64) -> Result<KernelEval> {
    if t < 0.0 || z < 0.0 {
        return Err(Error::InvalidArgument("kernel needs t, z >= 0".into()));
    }
    let i = Complex64::i();
    let gamma = p.gamma;
    let delta = p.delta;
    let dtilde = Complex64::new(delta, -0.5 * gamma);
    let h_t = h_function(p, 0.0, t)?;
    let omega_t = p.rabi.omega(t);
    let phase = f64::atan2(gamma, 2.0 * delta);

    // sign fixed against direct integration of the equations of motion
    let pref = (gamma * p.d / p.length).sqrt() * i * omega_t / (4.0 * dtilde);
    let stark = i * Complex64::new(2.0 * delta, gamma) / (2.0 * gamma) * (h_t / p.d);
    let refr = i * p.d * gamma * z / (4.0 * p.length * dtilde);
    let e_iphi = Complex64::new(2.0 * delta, gamma) / (4.0 * delta * delta + gamma * gamma).sqrt();
    let arg = -i * e_iphi * (h_t * z / p.length).sqrt();
    // exp(stark + refr + arg) * [I0(arg) e^{-arg}] keeps the growth of I0
    // cancelled against the decaying exponentials
    let value = pref * (stark + refr + arg).exp() * bessel_i0_scaled(arg);
    Ok(KernelEval { value, phase })
}

/// Storage kernel obtained from the retrieval kernel by time reversal:
/// `m_store(t, z) = m(Ω*(T - t); T - t, z)` for a pulse of duration
/// `t_total`. Drive profiles here are real, so conjugation is a no-op.
pub fn storage_bs_kernel(p: &EnsembleParams, t_total: f64, t: f64, z: f64) -> Result<KernelEval> {
    if t > t_total {
        return Err(Error::InvalidArgument("t beyond the pulse duration".into()));
    }
    analytic_bs_kernel(p, t_total - t, z)
}

/// Quadrature of the retrieval map `a_L,out(t_j) = ∫ m(t_j, L - z) a_A(z) dz`
/// on the nodes of `grid` (trapezoid in z).
pub fn retrieve_with_kernel(p: &EnsembleParams, grid: &PulseGrid) -> Result<Vec<Complex64>> {
    let zs = &grid.zs;
    let mut out = Vec::with_capacity(grid.ts.len());
    for &t in &grid.ts {
        let mut acc = Complex64::default();
        for k in 0..zs.len() - 1 {
            let dz = zs[k + 1] - zs[k];
            let m0 = analytic_bs_kernel(p, t, p.length - zs[k])?.value;
            let m1 = analytic_bs_kernel(p, t, p.length - zs[k + 1])?.value;
            acc += 0.5 * dz * (m0 * grid.spin[k] + m1 * grid.spin[k + 1]);
        }
        out.push(acc);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::couplings::DriveProfile;
    use approx::assert_abs_diff_eq;

    fn params(d: f64, delta: f64, omega: f64) -> EnsembleParams {
        EnsembleParams {
            d,
            gamma: 1.0,
            delta,
            rabi: DriveProfile::Constant(omega),
            length: 1.0,
            ..Default::default()
        }
    }

    #[test]
    fn i0_scaed_matches_series_everywhere_relevant() {
        // series oracle with 40 terms, |arg| < 10
        let series = |x: Complex64| -> Complex64 {
            let mut term = Complex64::new(1.0, 0.0);
            let mut acc = term;
            for k in 1..=40 {
                term *= x * x / 4.0 / ((k * k) as f64);
                acc += term;
            }
            acc * (-x).exp()
        };
        for r in [0.1, 1.0, 5.0, 9.9] {
            for ang in [-1.2, -0.5, 0.0, 0.5, 1.2] {
                let x = Complex64::from_polar(r, ang);
                let got = bessel_i0_scaled(x);
                let want = series(x);
                assert!(
                    (got - want).norm() < 1e-12 * want.norm().max(1.0),
                    "x = {x}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn i0_series_asymptotic_agree_at_switch() {
        // both branches evaluated just across the switch point
        let series_long = |x: Complex64| -> Complex64 {
            let mut term = Complex64::new(1.0, 0.0);
            let mut acc = term;
            for k in 1..=120 {
                term *= x * x / 4.0 / ((k * k) as f64);
                acc += term;
            }
            acc * (-x).exp()
        };
        for ang in [-1.3, -0.6, 0.0, 0.6, 1.3] {
            let below = Complex64::from_polar(I0_SWITCH - 1e-9, ang);
            let above = Complex64::from_polar(I0_SWITCH + 1e-9, ang);
            let a = bessel_i0_scaled(below);
            let b = bessel_i0_scaled(above);
            // the truncated asymptotic floors out around 1e-10 at the switch
            assert!((a - b).norm() < 1e-9 * a.norm(), "angle {ang}: {a} vs {b}");
            assert!((b - series_long(above)).norm() < 1e-9 * b.norm());
        }
    }

    #[test]
    fn kernel_at_t_zero_is_prefactor_only() {
        let p = params(20.0, 5.0, 2.0);
        let k = analytic_bs_kernel(&p, 0.0, 0.4).unwrap();
        // I0(0) = 1: value equals prefactor times the z-only exponential
        let i = Complex64::i();
        let dtilde = Complex64::new(p.delta, -0.5 * p.gamma);
        let pref = (p.gamma * p.d / p.length).sqrt() * i * 2.0 / (4.0 * dtilde);
        let refr = (i * p.d * p.gamma * 0.4 / (4.0 * p.length * dtilde)).exp();
        let want = pref * refr;
        assert!((k.value - want).norm() < 1e-12 * want.norm());
    }

    #[test]
    fn storage_retrieval_kernel_symmetry() {
        // the storage kernel is the retrieval kernel under t -> T - t with
        // conjugated drive, pointwise
        let p = params(30.0, 8.0, 1.5);
        let t_total = 2.0;
        for frac in [0.1, 0.35, 0.7, 0.95] {
            let t = frac * t_total;
            for z in [0.05, 0.4, 0.9] {
                let storage = storage_bs_kernel(&p, t_total, t, z).unwrap().value;
                let retrieval = analytic_bs_kernel(&p, t_total - t, z).unwrap().value;
                assert_abs_diff_eq!((storage - retrieval).norm(), 0.0, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn phase_follows_detuning() {
        let p = params(10.0, 50.0, 1.0);
        let k = analytic_bs_kernel(&p, 0.3, 0.3).unwrap();
        assert_abs_diff_eq!(k.phase, (1.0 / 100.0f64).atan(), epsilon = 1e-12);
        // far detuned: phase -> 0
        let p2 = params(10.0, 5e4, 1.0);
        assert!(analytic_bs_kernel(&p2, 0.3, 0.3).unwrap().phase < 1e-4);
    }

    #[test]
    fn h_function_closed_form_and_limits() {
        let p = params(25.0, 3.0, 2.0);
        assert_eq!(h_function(&p, 0.0, 0.0).unwrap(), 0.0);
        let h = h_function(&p, 0.0, 1.5).unwrap();
        let want = 25.0 * 1.0 * 4.0 * 1.5 / (4.0 * 9.0 + 1.0);
        assert_abs_diff_eq!(h, want, epsilon = 1e-12);
        // zero drive
        let p0 = params(25.0, 3.0, 0.0);
        assert_eq!(h_function(&p0, 0.0, 10.0).unwrap(), 0.0);
    }
}
