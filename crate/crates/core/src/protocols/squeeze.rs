use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::result::{LossBudget, ProtocolResult, TraceStep};
use crate::couplings::{compose_light_losses, faraday_channel};
use crate::error::Result;
use crate::gaussian::{GaussianState, HomodyneOutcome, MeasurementRecord, Quadrature};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub enum SqueezeGain {
    Fixed(f64),
    /// Minimize the final variance over the gain.
    Optimal,
}

/// Spin squeezing by QND probing, homodyne detection of `X_L` and feedback
/// onto `P_A`.
///
/// Reports the conditional variance, the ensemble feedback variance at the
/// used gain, the anti-squeezed `Var(X_A)` and the gain itself. With losses
/// the minimal variance is `(1 + η_A(1-ε)κ²) / (1 + (1-ε)κ²) / 2`.
pub fn spin_squeeze(
    kappa: f64,
    eta_a: f64,
    epsilon: f64,
    gain: SqueezeGain,
) -> Result<ProtocolResult> {
    let losses = LossBudget { eta_a, epsilon };
    losses.validate()?;
    let ch = faraday_channel(kappa, eta_a, compose_light_losses(0.0, epsilon))?;
    let state = GaussianState::vacuum_labeled(&["light", "atoms"]).apply_channel(&ch)?;

    let var_x_l = state.var_of("light", Quadrature::X)?;
    let cov = state.cov_of("atoms", Quadrature::P, "light", Quadrature::X)?;
    let var_p_a = state.var_of("atoms", Quadrature::P)?;
    let conditional = var_p_a - cov * cov / var_x_l;

    let g_opt = -cov / var_x_l;
    let g = match gain {
        SqueezeGain::Fixed(g) => g,
        SqueezeGain::Optimal => g_opt,
    };
    // ensemble-average feedback variance: Var(P_A + g X_L)
    let feedback_var = var_p_a + 2.0 * g * cov + g * g * var_x_l;

    // realize the conditioned+displaced state (outcome pinned at the mean
    // for the deterministic figure set)
    let (outcome, cond) =
        state.homodyne_condition("light", Quadrature::X, HomodyneOutcome::Fixed(0.0))?;
    let rec = MeasurementRecord::new("light", Quadrature::X, outcome, g);
    let final_state = cond.feedback_displace(&rec, "atoms", Quadrature::P)?;

    let mut figures = BTreeMap::new();
    figures.insert("var_p_conditional".into(), conditional);
    figures.insert("var_p_feedback".into(), feedback_var);
    figures.insert("var_x_anti".into(), state.var_of("atoms", Quadrature::X)?);
    figures.insert("gain".into(), g);
    figures.insert("gain_optimal".into(), g_opt);
    Ok(ProtocolResult {
        final_state,
        figures,
        trace: vec![
            TraceStep::Channel {
                name: "faraday".into(),
                kappa,
            },
            TraceStep::Measurement {
                mode: "light".into(),
                quadrature: Quadrature::X,
                outcome,
            },
            TraceStep::Feedback {
                mode: "atoms".into(),
                quadrature: Quadrature::P,
                gain: g,
                outcome,
            },
        ],
    })
}

/// Best spin squeezing reachable at optical depth `d`: minimize the lossless
/// feedback variance over the per-atom decay with `κ² = d η_A`. Returns
/// `(η_A*, Var*)`; analytically both equal `(1 + sqrt(1+d))^{-1}`.
pub fn optimal_squeezing_for_depth(d: f64) -> Result<(f64, f64)> {
    if d <= 0.0 {
        return Err(crate::error::Error::InvalidArgument(
            "optical depth must be positive".into(),
        ));
    }
    let objective = |eta: f64| -> f64 { (1.0 + d * eta * eta) / (1.0 + d * eta) / 2.0 };
    // golden-section search on (0, 1]
    let phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (1e-12, 1.0);
    let mut c = b - phi * (b - a);
    let mut e = a + phi * (b - a);
    let (mut fc, mut fe) = (objective(c), objective(e));
    for _ in 0..200 {
        if fc < fe {
            b = e;
            e = c;
            fe = fc;
            c = b - phi * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + phi * (b - a);
            fe = objective(e);
        }
    }
    let eta = 0.5 * (a + b);
    Ok((eta, objective(eta)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn lossless_reference_points() {
        // kappa = 1: Var(P_A) = 1/4, Var(X_A) = 1
        let r = spin_squeeze(1.0, 0.0, 0.0, SqueezeGain::Optimal).unwrap();
        assert_abs_diff_eq!(r.figure("var_p_conditional").unwrap(), 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(r.figure("var_p_feedback").unwrap(), 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(r.figure("var_x_anti").unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.figure("gain").unwrap(), -0.5, epsilon = 1e-12);
        // the realized final state carries the squeezed variance
        assert_abs_diff_eq!(
            r.final_state.var_of("atoms", Quadrature::P).unwrap(),
            0.25,
            epsilon = 1e-12
        );
    }

    #[test]
    fn zero_coupling_stays_coherent() {
        let r = spin_squeeze(0.0, 0.0, 0.0, SqueezeGain::Optimal).unwrap();
        assert_abs_diff_eq!(r.figure("var_p_feedback").unwrap(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(r.figure("var_x_anti").unwrap(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn explicit_gain_formula_points() {
        // g = -kappa/(1+kappa^2) reproduces the conditional variance
        for kappa in [0.5, 1.0, 2.0] {
            let g = -kappa / (1.0 + kappa * kappa);
            let r = spin_squeeze(kappa, 0.0, 0.0, SqueezeGain::Fixed(g)).unwrap();
            let expect = 0.5 / (1.0 + kappa * kappa);
            assert_abs_diff_eq!(r.figure("var_p_feedback").unwrap(), expect, epsilon = 1e-12);
        }
        // kappa = 2 point quoted as 1/10
        let r = spin_squeeze(2.0, 0.0, 0.0, SqueezeGain::Fixed(-0.4)).unwrap();
        assert_abs_diff_eq!(r.figure("var_p_feedback").unwrap(), 0.1, epsilon = 1e-12);
    }

    #[test]
    fn lossy_minimal_variance() {
        let r = spin_squeeze(1.0, 0.1, 0.2, SqueezeGain::Optimal).unwrap();
        assert_abs_diff_eq!(r.figure("var_p_feedback").unwrap(), 0.3, epsilon = 1e-12);
        // optimal gain matches the closed form sqrt((1-eta)(1-eps)) kappa /
        // (1 + (1-eps) kappa^2), frozen from the covariance minimization
        let g_expect = -(0.9_f64 * 0.8).sqrt() / 1.8;
        assert_abs_diff_eq!(r.figure("gain_optimal").unwrap(), g_expect, epsilon = 1e-12);
    }

    #[test]
    fn depth_optimum_matches_closed_form() {
        for d in [1.0, 3.0, 10.0, 100.0, 1e4] {
            let (eta, var) = optimal_squeezing_for_depth(d).unwrap();
            let expect = 1.0 / (1.0 + (1.0 + d).sqrt());
            assert_abs_diff_eq!(var, expect, epsilon = 1e-9);
            assert_abs_diff_eq!(eta, expect, epsilon = 1e-7);
        }
        // d -> 0: variance -> 1/2
        let (_, var) = optimal_squeezing_for_depth(1e-9).unwrap();
        assert_abs_diff_eq!(var, 0.5, epsilon = 1e-4);
        // large-d asymptote ~ d^{-1/2}
        let (_, v1) = optimal_squeezing_for_depth(1e4).unwrap();
        assert_abs_diff_eq!(v1 * 1e2, 1.0, epsilon = 0.02);
    }
}
