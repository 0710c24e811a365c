use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};

use super::result::{LossBudget, ProtocolResult, TraceStep};
use crate::couplings::{compose_light_losses, faraday_channel};
use crate::error::{Error, Result};
use crate::gaussian::{
    gaussian_fidelity, GaussianState, HomodyneOutcome, MeasurementRecord, Quadrature,
};

/// QND+feedback write-in of a single light mode onto the collective spin:
/// probe, measure `X_L`, displace `P_A` by `-g ξ`. The light quadratures
/// land on the atoms as `<X_A> = κ <P_L,in>`, `<P_A> = -g <X_L,in>`.
pub fn memory_store(
    kappa: f64,
    gain: f64,
    input: &GaussianState,
    losses: LossBudget,
) -> Result<ProtocolResult> {
    losses.validate()?;
    if input.n_modes() != 1 {
        return Err(Error::DimensionMismatch("memory stores one light mode".into()));
    }
    let mut state = input.clone();
    let in_label = state.labels()[0].clone();
    state.rename_mode(&in_label, "light")?;
    state.append_vacuum("atoms");

    let ch = faraday_channel(kappa, losses.eta_a, compose_light_losses(0.0, losses.epsilon))?;
    let state = state.apply_channel_on(&ch, &["light", "atoms"])?;

    let mean_xl = state.mean_of("light", Quadrature::X)?;
    // ensemble figures before conditioning
    let p_fin = state.quad_selector("atoms", Quadrature::P)?
        - state.quad_selector("light", Quadrature::X)? * gain;
    let (mean_p_fin, var_p_fin) = state.linear_stats(&p_fin)?;
    let var_x_a = state.var_of("atoms", Quadrature::X)?;
    let mean_x_a = state.mean_of("atoms", Quadrature::X)?;

    // realized state at the mean outcome
    let (outcome, cond) =
        state.homodyne_condition("light", Quadrature::X, HomodyneOutcome::Fixed(mean_xl))?;
    let rec = MeasurementRecord::new("light", Quadrature::X, outcome, -gain);
    let final_state = cond.feedback_displace(&rec, "atoms", Quadrature::P)?;

    let mut figures = BTreeMap::new();
    figures.insert("var_x_out".into(), var_x_a);
    figures.insert("var_p_out".into(), var_p_fin);
    figures.insert("mean_x_out".into(), mean_x_a);
    figures.insert("mean_p_out".into(), mean_p_fin);
    figures.insert("gain".into(), gain);
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
                gain: -gain,
                outcome,
            },
        ],
    })
}

/// Closed-form average fidelity of the memory over the Gaussian-distributed
/// coherent class with mean photon number `n_bar`:
///
/// `F = [(n̄(1-c_x)² + 1/2 + ΔX²)(n̄(1-c_p)² + 1/2 + ΔP²)]^{-1/2}`
///
/// where `c_x`, `c_p` are the mean-transfer coefficients (κ and g when
/// lossless) and the variances are those of the stored state.
pub fn memory_average_fidelity(
    kappa: f64,
    gain: f64,
    n_bar: f64,
    losses: LossBudget,
) -> Result<f64> {
    if n_bar < 0.0 {
        return Err(Error::InvalidArgument("n_bar must be >= 0".into()));
    }
    losses.validate()?;
    let ch = faraday_channel(kappa, losses.eta_a, compose_light_losses(0.0, losses.epsilon))?;
    let s = ch.linear();
    // ordering (X_L, P_L, X_A, P_A)
    let c_x = s[(2, 1)]; // <X_A> per <P_L,in>
    let c_p = gain * s[(0, 0)]; // -<P_A,fin> per <X_L,in>
    let vac = GaussianState::vacuum_labeled(&["light", "atoms"]).apply_channel(&ch)?;
    let var_x = vac.var_of("atoms", Quadrature::X)?;
    let p_fin = vac.quad_selector("atoms", Quadrature::P)?
        - vac.quad_selector("light", Quadrature::X)? * gain;
    let (_, var_p) = vac.linear_stats(&p_fin)?;
    let fx = n_bar * (1.0 - c_x).powi(2) + 0.5 + var_x;
    let fp = n_bar * (1.0 - c_p).powi(2) + 0.5 + var_p;
    Ok(1.0 / (fx * fp).sqrt())
}

/// Monte-Carlo estimate of the same average fidelity: draw coherent inputs
/// from the class, run the protocol with sampled homodyne outcomes and
/// average the overlap with the ideal stored state.
pub fn memory_store_coherent_mc(
    kappa: f64,
    gain: f64,
    n_bar: f64,
    losses: LossBudget,
    n_samples: usize,
    seed: u64,
) -> Result<f64> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let amp = Normal::new(0.0, (n_bar.max(0.0)).sqrt()).unwrap();
    let mut acc = 0.0;
    for k in 0..n_samples {
        let (x, p) = (amp.sample(&mut rng), amp.sample(&mut rng));
        let input = GaussianState::prepare(1, &[(x, p)], &[])?;
        // replay the protocol with a sampled measurement outcome
        let mut state = input.clone();
        state.rename_mode("m0", "light")?;
        state.append_vacuum("atoms");
        let ch = faraday_channel(kappa, losses.eta_a, compose_light_losses(0.0, losses.epsilon))?;
        let state = state.apply_channel_on(&ch, &["light", "atoms"])?;
        let (outcome, cond) = state.homodyne_condition(
            "light",
            Quadrature::X,
            HomodyneOutcome::Sample(seed ^ (k as u64).wrapping_mul(0x9e3779b97f4a7c15)),
        )?;
        let rec = MeasurementRecord::new("light", Quadrature::X, outcome, -gain);
        let stored = cond.feedback_displace(&rec, "atoms", Quadrature::P)?;
        // target: the input state mapped into the atomic quadratures
        // (X, P) -> (P, -X)
        let mut target = GaussianState::prepare(1, &[(p, -x)], &[])?;
        target.rename_mode("m0", "atoms")?;
        acc += gaussian_fidelity(&stored, &target, "atoms")?;
    }
    Ok(acc / n_samples as f64)
}
