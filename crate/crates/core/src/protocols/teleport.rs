use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::result::{InputClass, ProtocolResult, TraceStep};
use crate::couplings::{beam_splitter_swap_channel, sideband_transform, teleport_entangling_channel};
use crate::error::{Error, Result};
use crate::gaussian::{
    gaussian_fidelity, GaussianState, HomodyneOutcome, MeasurementRecord, Quadrature,
};

/// What is being teleported.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum TeleportInput {
    /// A concrete single-mode Gaussian state.
    State(GaussianState),
    /// A state family; figures then report class-averaged fidelities.
    Class(InputClass),
}

/// EPR variance `Var(X_A + X_+) + Var(P_A - P_+)` between the atoms and the
/// upper-sideband light mode after the entangling pulse.
pub fn teleport_resource_epr(kappa: f64) -> Result<f64> {
    let st = resource_state(kappa)?;
    resource_epr_of(&st)
}

fn resource_state(kappa: f64) -> Result<GaussianState> {
    let ch = teleport_entangling_channel(kappa)?;
    let st = GaussianState::vacuum_labeled(&["atoms", "lc", "ls", "bc", "bs"]);
    st.apply_channel(&ch)
}

fn resource_epr_of(st: &GaussianState) -> Result<f64> {
    // X+ = (X_ls - P_lc)/sqrt2, P+ = (X_lc + P_ls)/sqrt2
    let r = 1.0 / 2.0_f64.sqrt();
    let x_plus = (st.quad_selector("ls", Quadrature::X)?
        - st.quad_selector("lc", Quadrature::P)?)
        * r;
    let p_plus = (st.quad_selector("lc", Quadrature::X)?
        + st.quad_selector("ls", Quadrature::P)?)
        * r;
    let cx = st.quad_selector("atoms", Quadrature::X)? + x_plus;
    let cp = st.quad_selector("atoms", Quadrature::P)? - p_plus;
    let (_, vx) = st.linear_stats(&cx)?;
    let (_, vp) = st.linear_stats(&cp)?;
    Ok(vx + vp)
}

/// Closed form of the resource EPR variance, used as the analytic oracle:
/// `(1/2)[1 + (1 - κ/2)²]² + (κ/2)⁴/3`.
pub fn resource_epr_closed_form(kappa: f64) -> f64 {
    let u = 1.0 - kappa / 2.0;
    let q = kappa / 2.0;
    0.5 * (1.0 + u * u).powi(2) + q.powi(4) / 3.0
}

/// Deterministic teleportation of a light state onto the collective spin.
///
/// The input rides in the lower sideband of its own pulse; a joint Bell
/// measurement of the input and resource modulation modes feeds the atomic
/// displacements. Figures carry the resource EPR variance, the final
/// per-quadrature variances for a fixed input, added noise relative to the
/// (gain-scaled) input, and class fidelities where applicable.
pub fn teleport(
    kappa: f64,
    gain: f64,
    input: TeleportInput,
    seed: u64,
) -> Result<ProtocolResult> {
    if gain <= 0.0 {
        return Err(Error::InvalidArgument("teleportation gain must be positive".into()));
    }
    let resource = resource_state(kappa)?;
    teleport_with_resource(&resource, kappa, gain, input, seed)
}

/// As [`teleport`], but with an explicit resource state over modes
/// `(atoms, lc, ls)` (extra modes permitted and ignored) — e.g. an ideal
/// EPR pair for limit checks.
pub fn teleport_with_resource(
    resource: &GaussianState,
    kappa: f64,
    gain: f64,
    input: TeleportInput,
    seed: u64,
) -> Result<ProtocolResult> {
    let delta_epr = resource_epr_of(resource)?;

    let (in_state, class) = match &input {
        TeleportInput::State(st) => {
            if st.n_modes() != 1 {
                return Err(Error::DimensionMismatch("teleport takes one input mode".into()));
            }
            (st.clone(), None)
        }
        TeleportInput::Class(c) => {
            c.validate()?;
            (GaussianState::vacuum(1), Some(*c))
        }
    };

    // encode the input in the lower sideband of its own pulse:
    // (upper, lower) = (vacuum, input), rotated into (in_c, in_s)
    let mut st = resource.clone();
    st.append("upper_in", &GaussianState::vacuum(1))?;
    st.append("lower_in", &in_state)?;
    let to_cs = crate::gaussian::GaussianChannel::symplectic(
        sideband_transform().linear().transpose(),
    )?;
    let mut st = st.apply_channel_on(&to_cs, &["upper_in", "lower_in"])?;
    st.rename_mode("upper_in", "in_c")?;
    st.rename_mode("lower_in", "in_s")?;

    // ensemble operator combos before any measurement:
    // X_A,fin = X_A + g (X+ + Y), P_A,fin = P_A - g (P+ - Q)
    let r = 1.0 / 2.0_f64.sqrt();
    let x_plus = (st.quad_selector("ls", Quadrature::X)? - st.quad_selector("lc", Quadrature::P)?) * r;
    let p_plus = (st.quad_selector("lc", Quadrature::X)? + st.quad_selector("ls", Quadrature::P)?) * r;
    let y_in = (st.quad_selector("in_s", Quadrature::X)? + st.quad_selector("in_c", Quadrature::P)?) * r;
    let q_in = (st.quad_selector("in_c", Quadrature::X)? - st.quad_selector("in_s", Quadrature::P)?) * -r;
    let x_fin = st.quad_selector("atoms", Quadrature::X)? + (x_plus + &y_in) * gain;
    let p_fin = st.quad_selector("atoms", Quadrature::P)? - (p_plus - &q_in) * gain;
    let (mean_x_fin, var_x_fin) = st.linear_stats(&x_fin)?;
    let (mean_p_fin, var_p_fin) = st.linear_stats(&p_fin)?;
    let (_, var_y) = st.linear_stats(&y_in)?;
    let (_, var_q) = st.linear_stats(&q_in)?;

    // Bell measurement: 50/50 splitters, then X on the sum ports and P on
    // the difference ports
    let bs = beam_splitter_swap_channel(std::f64::consts::FRAC_PI_4)?;
    let st = st.apply_channel_on(&bs, &["lc", "in_c"])?;
    let mut st = st.apply_channel_on(&bs, &["ls", "in_s"])?;
    let mut outcomes = BTreeMap::new();
    let mut trace = vec![TraceStep::Channel {
        name: "teleport entangling + bell splitters".into(),
        kappa,
    }];
    for (k, (mode, quad, name)) in [
        ("lc", Quadrature::X, "x_tilde_c"),
        ("in_c", Quadrature::P, "q_tilde_c"),
        ("ls", Quadrature::X, "x_tilde_s"),
        ("in_s", Quadrature::P, "q_tilde_s"),
    ]
    .into_iter()
    .enumerate()
    {
        let (xi, next) = st.homodyne_condition(
            mode,
            quad,
            HomodyneOutcome::Sample(seed.wrapping_add(k as u64)),
        )?;
        trace.push(TraceStep::Measurement {
            mode: mode.into(),
            quadrature: quad,
            outcome: xi,
        });
        outcomes.insert(name.to_string(), xi);
        st = next;
    }

    // displacements: X_A += g(x~_s - q~_c), P_A += -g(x~_c + q~_s)
    let dx = gain * (outcomes["x_tilde_s"] - outcomes["q_tilde_c"]);
    let dp = -gain * (outcomes["x_tilde_c"] + outcomes["q_tilde_s"]);
    let rec_x = MeasurementRecord::new("ls", Quadrature::X, dx, 1.0);
    let rec_p = MeasurementRecord::new("lc", Quadrature::X, dp, 1.0);
    let st = st.feedback_displace(&rec_x, "atoms", Quadrature::X)?;
    let final_state = st.feedback_displace(&rec_p, "atoms", Quadrature::P)?;
    trace.push(TraceStep::Feedback {
        mode: "atoms".into(),
        quadrature: Quadrature::X,
        gain,
        outcome: dx,
    });
    trace.push(TraceStep::Feedback {
        mode: "atoms".into(),
        quadrature: Quadrature::P,
        gain,
        outcome: dp,
    });

    let mut figures = BTreeMap::new();
    figures.insert("delta_epr_resource".into(), delta_epr);
    figures.insert("var_x_out".into(), var_x_fin);
    figures.insert("var_p_out".into(), var_p_fin);
    figures.insert("added_noise_x".into(), var_x_fin - gain * gain * var_y);
    figures.insert("added_noise_p".into(), var_p_fin - gain * gain * var_q);
    figures.insert("gain".into(), gain);

    match class {
        Some(InputClass::CoherentGaussian { n_bar }) => {
            figures.insert(
                "fidelity_class".into(),
                teleport_fidelity_from_measured(gain, var_x_fin, var_p_fin, n_bar)?,
            );
        }
        Some(_) => {}
        None => {
            // ensemble-average output state from the operator combos
            let labels = final_state.marginal(&["atoms"])?.labels().to_vec();
            let mean = nalgebra::DVector::from_vec(vec![mean_x_fin, mean_p_fin]);
            let cov = nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
                var_x_fin, var_p_fin,
            ]));
            let avg = GaussianState::from_parts(labels, mean, cov)?;
            let mut target = in_state.clone();
            let lbl = target.labels()[0].clone();
            target.rename_mode(&lbl, "atoms")?;
            figures.insert(
                "fidelity_vs_input".into(),
                gaussian_fidelity(&avg, &target, "atoms")?,
            );
        }
    }

    Ok(ProtocolResult {
        final_state,
        figures,
        trace,
    })
}

/// Teleportation fidelity over the coherent class with mean photon number
/// `n_bar`, from the measured gain and output variances:
///
/// `F = [(n̄(1-g)² + 1/2 + ΔX²)(n̄(1-g)² + 1/2 + ΔP²)]^{-1/2}`.
pub fn teleport_fidelity_from_measured(
    gain: f64,
    var_x_out: f64,
    var_p_out: f64,
    n_bar: f64,
) -> Result<f64> {
    if n_bar < 0.0 || var_x_out <= 0.0 || var_p_out <= 0.0 {
        return Err(Error::InvalidArgument("bad teleport fidelity inputs".into()));
    }
    let fx = n_bar * (1.0 - gain).powi(2) + 0.5 + var_x_out;
    let fp = n_bar * (1.0 - gain).powi(2) + 0.5 + var_p_out;
    Ok(1.0 / (fx * fp).sqrt())
}

/// Qubit-teleportation fidelity from the quality of the continuous-variable
/// map,
///
/// `F_q = [6 + 16s² + 24s⁴ + 4(g-1)(1-2s²) + (g-1)²(1-6s²)] / [6(1+2s²)³]`
///
/// with `s² = 2 ΔX_out² - 1` (equal X/P mapping quality assumed).
pub fn qubit_teleport_fidelity(s_sq: f64, gain: f64) -> Result<f64> {
    if s_sq < 0.0 {
        return Err(Error::InvalidArgument("s² must be >= 0".into()));
    }
    let g1 = gain - 1.0;
    let num = 6.0 + 16.0 * s_sq + 24.0 * s_sq * s_sq
        + 4.0 * g1 * (1.0 - 2.0 * s_sq)
        + g1 * g1 * (1.0 - 6.0 * s_sq);
    let den = 6.0 * (1.0 + 2.0 * s_sq).powi(3);
    Ok(num / den)
}
