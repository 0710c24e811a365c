//! Light storage and retrieval in the beam-splitter (EIT/Raman) regime:
//! slow-light propagation, storage efficiency bookkeeping and the iterative
//! time-reversal optimization of the input pulse shape.

use num_complex::Complex64;

use super::grid::{mode_overlap, normalize_mode, PulseGrid};
use super::systems::integrate_beam_splitter;
use crate::couplings::EnsembleParams;
use crate::error::{Error, Result};

/// Geometry and discretization of one storage/retrieval experiment. The
/// drive profile of `params` is used as-is during storage and retrieval and
/// is switched off in between by construction (separate integrations).
#[derive(Debug, Clone)]
pub struct EitSetup {
    pub params: EnsembleParams,
    /// Storage window `[0, t_store]`.
    pub t_store: f64,
    /// Retrieval window length.
    pub t_retrieve: f64,
    pub nz: usize,
    pub nt_store: usize,
    pub nt_retrieve: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RetrievalDirection {
    Forward,
    /// Spin wave read out against the storage direction (the time-reversal
    /// optimum); modeled by mirroring the spin wave in z.
    Backward,
}

#[derive(Debug, Clone)]
pub struct EitResult {
    /// Light that escaped during storage (at `z = L`).
    pub leaked: Vec<Complex64>,
    /// Spin wave at the end of the storage window.
    pub stored: Vec<Complex64>,
    /// Retrieved light at `z = L` over the retrieval window.
    pub retrieved: Vec<Complex64>,
    pub retrieve_ts: Vec<f64>,
    /// `∫|retrieved|² / ∫|input|²` (intensity ratio).
    pub efficiency_intensity: f64,
    /// Squared overlap with the time-reversed input template, normalized to
    /// the input.
    pub efficiency_overlap: f64,
    pub leakage_fraction: f64,
    pub input_norm_sq: f64,
    /// `L / v_g` for the given drive.
    pub group_delay_expected: f64,
}

/// Effective duration of a sampled pulse (participation ratio).
fn effective_duration(ts: &[f64], field: &[Complex64]) -> f64 {
    let mut n2 = 0.0;
    let mut n4 = 0.0;
    for k in 0..ts.len() - 1 {
        let dx = ts[k + 1] - ts[k];
        n2 += 0.5 * dx * (field[k].norm_sqr() + field[k + 1].norm_sqr());
        n4 += 0.5
            * dx
            * (field[k].norm_sqr().powi(2) + field[k + 1].norm_sqr().powi(2));
    }
    if n4 == 0.0 {
        f64::INFINITY
    } else {
        n2 * n2 / n4
    }
}

fn group_velocity(p: &EnsembleParams, duration: f64) -> f64 {
    let mean_omega_sq = p.rabi.omega_sq_integral(0.0, duration) / duration;
    mean_omega_sq * p.length / (p.gamma * p.d)
}

/// Store an input pulse and retrieve it after the dark interval.
///
/// The input is sampled on the storage grid; pulses whose bandwidth exceeds
/// the interface limit `d γ` are rejected.
pub fn eit_transfer(
    setup: &EitSetup,
    input: &dyn Fn(f64) -> Complex64,
    direction: RetrievalDirection,
) -> Result<EitResult> {
    let p = &setup.params;
    p.validate()?;

    let mut store_grid = PulseGrid::uniform(setup.nz, setup.nt_store, p.length, setup.t_store)?;
    store_grid.set_light(|t| input(t));
    let input_norm_sq = store_grid.light_norm_sq();
    if input_norm_sq <= 0.0 {
        return Err(Error::InvalidArgument("input pulse is empty".into()));
    }
    let t_eff = effective_duration(&store_grid.ts, &store_grid.light);
    let bw = 1.0 / t_eff;
    let limit = p.d * p.gamma;
    if bw > limit {
        return Err(Error::BandwidthTooLarge { bw, limit });
    }

    let store_out = integrate_beam_splitter(p, &store_grid)?;
    let leaked = store_out.light.clone();
    let stored = store_out.spin.clone();
    let leakage_fraction = store_out.light_norm_sq() / input_norm_sq;

    let mut retrieve_grid =
        PulseGrid::uniform(setup.nz, setup.nt_retrieve, p.length, setup.t_retrieve)?;
    match direction {
        RetrievalDirection::Forward => {
            retrieve_grid.spin = stored.clone();
        }
        RetrievalDirection::Backward => {
            retrieve_grid.spin = stored.iter().rev().cloned().collect();
        }
    }
    let retrieve_out = integrate_beam_splitter(p, &retrieve_grid)?;
    let retrieved = retrieve_out.light.clone();
    let efficiency_intensity = retrieve_out.light_norm_sq() / input_norm_sq;

    // template: time-reversed (conjugated) input on the retrieval window
    let mut template: Vec<Complex64> = retrieve_grid
        .ts
        .iter()
        .map(|&t| {
            let src = setup.t_store - t;
            if src >= 0.0 && src <= setup.t_store {
                input(src).conj()
            } else {
                Complex64::default()
            }
        })
        .collect();
    let efficiency_overlap = match normalize_mode(&retrieve_grid.ts, &mut template) {
        Ok(()) => {
            let amp = mode_overlap(&retrieve_grid.ts, &retrieved, &template)?;
            amp.norm_sqr() / input_norm_sq
        }
        Err(_) => 0.0,
    };

    Ok(EitResult {
        leaked,
        stored,
        retrieved,
        retrieve_ts: retrieve_grid.ts,
        efficiency_intensity,
        efficiency_overlap,
        leakage_fraction,
        input_norm_sq,
        group_delay_expected: p.length / group_velocity(p, setup.t_store),
    })
}

/// Propagate a pulse with the drive held on and measure the group delay as
/// the intensity-centroid shift between input and output. Returns
/// `(measured_delay, l_over_vg)`.
pub fn slow_light_delay(
    p: &EnsembleParams,
    input: &dyn Fn(f64) -> Complex64,
    duration: f64,
    nz: usize,
    nt: usize,
) -> Result<(f64, f64)> {
    p.validate()?;
    let mut grid = PulseGrid::uniform(nz, nt, p.length, duration)?;
    grid.set_light(|t| input(t));
    let out = integrate_beam_splitter(p, &grid)?;
    let centroid = |ts: &[f64], f: &[Complex64]| -> f64 {
        let mut w = 0.0;
        let mut s = 0.0;
        for k in 0..ts.len() - 1 {
            let dx = ts[k + 1] - ts[k];
            let seg = 0.5 * dx * (f[k].norm_sqr() + f[k + 1].norm_sqr());
            w += seg;
            s += seg * 0.5 * (ts[k] + ts[k + 1]);
        }
        s / w
    };
    let delay = centroid(&grid.ts, &out.light) - centroid(&grid.ts, &grid.light);
    Ok((delay, p.length / group_velocity(p, duration)))
}

/// Iterative pulse-shape optimization: store, retrieve backwards,
/// time-reverse the retrieved pulse and feed it back in. Returns the input
/// shapes tried (on the storage time grid) and the total efficiency of each
/// round.
pub fn iterate_optimal_input(
    setup: &EitSetup,
    n_iter: usize,
) -> Result<(Vec<Vec<Complex64>>, Vec<f64>)> {
    if n_iter == 0 {
        return Err(Error::InvalidArgument("need at least one iteration".into()));
    }
    if (setup.t_retrieve - setup.t_store).abs() > 1e-12 || setup.nt_store != setup.nt_retrieve {
        return Err(Error::InvalidArgument(
            "shape iteration needs matching storage/retrieval windows".into(),
        ));
    }
    let nt = setup.nt_store;
    let ts: Vec<f64> = (0..=nt)
        .map(|j| setup.t_store * j as f64 / nt as f64)
        .collect();
    // smooth positive start
    let t0 = 0.45 * setup.t_store;
    let sigma = 0.12 * setup.t_store;
    let mut shape: Vec<Complex64> = ts
        .iter()
        .map(|&t| Complex64::new((-(t - t0) * (t - t0) / (2.0 * sigma * sigma)).exp(), 0.0))
        .collect();
    normalize_mode(&ts, &mut shape)?;

    let mut shapes = Vec::with_capacity(n_iter);
    let mut efficiencies = Vec::with_capacity(n_iter);
    for _ in 0..n_iter {
        shapes.push(shape.clone());
        let input_shape = shape.clone();
        let ts_for_lookup = ts.clone();
        let input = move |t: f64| sample_linear(&ts_for_lookup, &input_shape, t);
        let res = eit_transfer(setup, &input, RetrievalDirection::Backward)?;
        efficiencies.push(res.efficiency_intensity);
        let mut next: Vec<Complex64> = res.retrieved.iter().rev().map(|a| a.conj()).collect();
        normalize_mode(&ts, &mut next)?;
        shape = next;
    }
    Ok((shapes, efficiencies))
}

fn sample_linear(ts: &[f64], vals: &[Complex64], t: f64) -> Complex64 {
    if t <= ts[0] || t >= ts[ts.len() - 1] {
        if t == ts[0] {
            return vals[0];
        }
        if t == ts[ts.len() - 1] {
            return vals[vals.len() - 1];
        }
        return Complex64::default();
    }
    let j = ts.partition_point(|&x| x <= t);
    let (t0, t1) = (ts[j - 1], ts[j]);
    let w = (t - t0) / (t1 - t0);
    vals[j - 1] * (1.0 - w) + vals[j] * w
}
