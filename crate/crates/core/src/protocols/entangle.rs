use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::result::{LossBudget, ProtocolResult, TraceStep};
use crate::couplings::{compose_light_losses, faraday_channel, two_cell_magnetic_channel};
use crate::error::Result;
use crate::gaussian::{
    eof_from_epr, epr_variance, GaussianChannel, GaussianState, HomodyneOutcome,
    MeasurementRecord, Quadrature,
};

/// How the two ensembles are entangled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EntangleScheme {
    /// Two probe pulses with counter-wise π/2 spin rotations in between.
    TwoPulseRotations,
    /// One probe through two oppositely Larmor-precessing cells, reading the
    /// cosine and sine modulation modes.
    MagneticSinglePulse,
}

/// π/2 rotation `X -> -P, P -> X` (counter-wise for the second ensemble).
fn quarter_rotation(sign: f64) -> GaussianChannel {
    let mut m = DMatrix::zeros(2, 2);
    m[(0, 1)] = -sign;
    m[(1, 0)] = sign;
    GaussianChannel::symplectic(m).expect("rotation is symplectic")
}

fn optimal_feedback_gain(
    state: &GaussianState,
    target: &nalgebra::DVector<f64>,
    measured_mode: &str,
) -> Result<f64> {
    let meas = state.quad_selector(measured_mode, Quadrature::X)?;
    let (_, var_m) = state.linear_stats(&meas)?;
    let combo = target + &meas;
    let (_, v_plus) = state.linear_stats(&combo)?;
    let (_, v_t) = state.linear_stats(target)?;
    let cov = (v_plus - v_t - var_m) / 2.0;
    Ok(-cov / var_m)
}

/// Deterministic entanglement of two ensembles. Reports `delta_epr`
/// (`Var(X1-X2) + Var(P1+P2)`, 2 for separable coherent states) and the
/// entanglement of formation.
pub fn entangle_ensembles(
    kappa: f64,
    scheme: EntangleScheme,
    losses: LossBudget,
) -> Result<ProtocolResult> {
    losses.validate()?;
    match scheme {
        EntangleScheme::TwoPulseRotations => two_pulse(kappa, losses),
        EntangleScheme::MagneticSinglePulse => magnetic_single_pulse(kappa, losses),
    }
}

fn two_pulse(kappa: f64, losses: LossBudget) -> Result<ProtocolResult> {
    // each pulse couples to the symmetric mode of the pair with total
    // strength kappa, i.e. kappa/sqrt(2) per ensemble
    let kappa_each = kappa / 2.0_f64.sqrt();
    let light_loss = compose_light_losses(0.0, losses.epsilon);
    let pass = faraday_channel(kappa_each, losses.eta_a, 0.0)?;
    let light_att = GaussianChannel::attenuate(1, &[(0, light_loss)])?;
    let mut trace = Vec::new();

    let run_pulse = |state: &GaussianState,
                     light: &str,
                     trace: &mut Vec<TraceStep>|
     -> Result<(f64, GaussianState)> {
        let st = state.apply_channel_on(&pass, &[light, "a1"])?;
        let st = st.apply_channel_on(&pass, &[light, "a2"])?;
        let st = st.apply_channel_on(&light_att, &[light])?;
        trace.push(TraceStep::Channel {
            name: format!("faraday x2 on {light}"),
            kappa: kappa_each,
        });
        // feedback minimizing Var(P_a1 + P_a2)
        let target = st.quad_selector("a1", Quadrature::P)? + st.quad_selector("a2", Quadrature::P)?;
        let g2 = optimal_feedback_gain(&st, &target, light)?;
        let g_each = g2 / 2.0;
        let (outcome, cond) =
            st.homodyne_condition(light, Quadrature::X, HomodyneOutcome::Fixed(0.0))?;
        trace.push(TraceStep::Measurement {
            mode: light.into(),
            quadrature: Quadrature::X,
            outcome,
        });
        let rec1 = MeasurementRecord::new(light, Quadrature::X, outcome, g_each);
        let cond = cond.feedback_displace(&rec1, "a1", Quadrature::P)?;
        let cond = cond.feedback_displace(&rec1, "a2", Quadrature::P)?;
        trace.push(TraceStep::Feedback {
            mode: "a1+a2".into(),
            quadrature: Quadrature::P,
            gain: g_each,
            outcome,
        });
        Ok((g_each, cond))
    };

    let state = GaussianState::vacuum_labeled(&["l1", "a1", "a2"]);
    let (g1, state) = run_pulse(&state, "l1", &mut trace)?;

    // counter-wise quarter rotations
    let state = state.apply_channel_on(&quarter_rotation(1.0), &["a1"])?;
    let mut state = state.apply_channel_on(&quarter_rotation(-1.0), &["a2"])?;
    trace.push(TraceStep::Rotation {
        mode: "a1".into(),
        angle: std::f64::consts::FRAC_PI_2,
    });
    trace.push(TraceStep::Rotation {
        mode: "a2".into(),
        angle: -std::f64::consts::FRAC_PI_2,
    });

    state.append_vacuum("l2");
    let (g2, state) = run_pulse(&state, "l2", &mut trace)?;

    let delta_epr = epr_variance(&state, "a1", "a2")?;
    let mut figures = BTreeMap::new();
    figures.insert("delta_epr".into(), delta_epr);
    figures.insert("eof".into(), eof_from_epr(delta_epr)?);
    figures.insert("gain_pulse1".into(), g1);
    figures.insert("gain_pulse2".into(), g2);
    Ok(ProtocolResult {
        final_state: state,
        figures,
        trace,
    })
}

fn magnetic_single_pulse(kappa: f64, losses: LossBudget) -> Result<ProtocolResult> {
    let ch = two_cell_magnetic_channel(kappa)?;
    let mut trace = vec![TraceStep::Channel {
        name: "two-cell magnetic".into(),
        kappa,
    }];
    let state = GaussianState::vacuum_labeled(&["lc", "ls", "aplus", "aminus"]);
    let mut state = state.apply_channel(&ch)?;
    if losses.eta_a > 0.0 {
        let att = GaussianChannel::attenuate(2, &[(0, losses.eta_a), (1, losses.eta_a)])?;
        state = state.apply_channel_on(&att, &["aplus", "aminus"])?;
    }
    if losses.epsilon > 0.0 {
        let att = GaussianChannel::attenuate(2, &[(0, losses.epsilon), (1, losses.epsilon)])?;
        state = state.apply_channel_on(&att, &["lc", "ls"])?;
    }

    // cosine quadrature squeezes P_A+, sine quadrature squeezes X_A-
    let tgt_p = state.quad_selector("aplus", Quadrature::P)?;
    let g_c = optimal_feedback_gain(&state, &tgt_p, "lc")?;
    let (xi_c, state) = state.homodyne_condition("lc", Quadrature::X, HomodyneOutcome::Fixed(0.0))?;
    let rec_c = MeasurementRecord::new("lc", Quadrature::X, xi_c, g_c);
    let state = state.feedback_displace(&rec_c, "aplus", Quadrature::P)?;
    trace.push(TraceStep::Feedback {
        mode: "aplus".into(),
        quadrature: Quadrature::P,
        gain: g_c,
        outcome: xi_c,
    });

    let tgt_x = state.quad_selector("aminus", Quadrature::X)?;
    let g_s = optimal_feedback_gain(&state, &tgt_x, "ls")?;
    let (xi_s, state) = state.homodyne_condition("ls", Quadrature::X, HomodyneOutcome::Fixed(0.0))?;
    let rec_s = MeasurementRecord::new("ls", Quadrature::X, xi_s, g_s);
    let state = state.feedback_displace(&rec_s, "aminus", Quadrature::X)?;
    trace.push(TraceStep::Feedback {
        mode: "aminus".into(),
        quadrature: Quadrature::X,
        gain: g_s,
        outcome: xi_s,
    });

    // Var(P1 + P2) = 2 Var(P_A+), Var(X1 - X2) = 2 Var(X_A-)
    let delta_epr =
        2.0 * (state.var_of("aplus", Quadrature::P)? + state.var_of("aminus", Quadrature::X)?);
    let mut figures = BTreeMap::new();
    figures.insert("delta_epr".into(), delta_epr);
    figures.insert("eof".into(), eof_from_epr(delta_epr)?);
    figures.insert("gain_cos".into(), g_c);
    figures.insert("gain_sin".into(), g_s);
    Ok(ProtocolResult {
        final_state: state,
        figures,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_coupling_is_separable() {
        for scheme in [EntangleScheme::TwoPulseRotations, EntangleScheme::MagneticSinglePulse] {
            let r = entangle_ensembles(0.0, scheme, LossBudget::lossless()).unwrap();
            assert_abs_diff_eq!(r.figure("delta_epr").unwrap(), 2.0, epsilon = 1e-12);
            assert_abs_diff_eq!(r.figure("eof").unwrap(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn lossless_schemes_agree_with_closed_form() {
        for kappa in [0.5, 1.0, 2.0] {
            let expect = 2.0 / (1.0 + kappa * kappa);
            for scheme in [EntangleScheme::TwoPulseRotations, EntangleScheme::MagneticSinglePulse] {
                let r = entangle_ensembles(kappa, scheme, LossBudget::lossless()).unwrap();
                assert_abs_diff_eq!(r.figure("delta_epr").unwrap(), expect, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn experimental_epr_point_gives_quoted_eof() {
        // measured EPR variance 1.3 corresponds to 0.28 ebits
        assert_abs_diff_eq!(eof_from_epr(1.3).unwrap(), 0.28, epsilon = 0.005);
    }

    #[test]
    fn entanglement_condition_consistency() {
        // E_oF > 0 exactly when delta_epr < 2
        for kappa in [0.05, 0.3, 1.0, 3.0] {
            let r = entangle_ensembles(
                kappa,
                EntangleScheme::MagneticSinglePulse,
                LossBudget::lossless(),
            )
            .unwrap();
            let epr = r.figure("delta_epr").unwrap();
            let eof = r.figure("eof").unwrap();
            assert_eq!(epr < 2.0 - 1e-9, eof > 1e-9, "kappa {kappa}");
        }
    }

    #[test]
    fn losses_degrade_entanglement() {
        let ideal = entangle_ensembles(1.0, EntangleScheme::TwoPulseRotations, LossBudget::lossless())
            .unwrap();
        let lossy = entangle_ensembles(
            1.0,
            EntangleScheme::TwoPulseRotations,
            LossBudget {
                eta_a: 0.1,
                epsilon: 0.2,
            },
        )
        .unwrap();
        assert!(lossy.figure("delta_epr").unwrap() > ideal.figure("delta_epr").unwrap());
        assert!(lossy.figure("eof").unwrap() < ideal.figure("eof").unwrap());
    }
}
