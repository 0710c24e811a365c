//! Scenario dispatch: translate a validated configuration into library
//! calls and tabulated figures.

use std::collections::BTreeMap;

use lightmatter::couplings::{DriveProfile, EnsembleParams};
use lightmatter::fock::{
    concurrence, dlcz_write, g2_conditional, herald_entangle, DetectorModel, DetectorPort,
};
use lightmatter::gaussian::eof_from_concurrence;
use lightmatter::mb::{eit_transfer, iterate_optimal_input, EitSetup, RetrievalDirection};
use lightmatter::protocols::{
    classical_benchmark, entangle_ensembles, memory_average_fidelity, teleport, EntangleScheme,
    InputClass, LossBudget, SqueezeGain, TeleportInput,
};

use crate::config::{ConfigError, ScenarioConfig};

pub type Row = BTreeMap<String, f64>;

pub enum RunError {
    Config(String),
    Numeric(String),
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e.0)
    }
}

impl From<lightmatter::Error> for RunError {
    fn from(e: lightmatter::Error) -> Self {
        RunError::Numeric(e.to_string())
    }
}

type RunResult = Result<Vec<Row>, RunError>;

/// Extra payload for JSON output (heralded density matrices).
pub struct ScenarioOutput {
    pub rows: Vec<Row>,
    pub extra_json: Option<serde_json::Value>,
}

pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioOutput, RunError> {
    let scenario = cfg
        .scenario
        .clone()
        .ok_or_else(|| RunError::Config("no scenario selected".into()))?;

    // expand the sweep into per-point configs, keeping grid order
    let points: Vec<ScenarioConfig> = match &cfg.sweep {
        None => vec![cfg.clone()],
        Some(sw) => sw
            .grid
            .iter()
            .map(|v| {
                let mut point = cfg.clone();
                point.sweep = None;
                point.params.insert(sw.param.clone(), format!("{v}"));
                point
            })
            .collect(),
    };

    let runner: fn(&ScenarioConfig) -> RunResult = match scenario.as_str() {
        "squeeze" => run_squeeze,
        "entangle" => run_entangle,
        "memory" => run_memory,
        "teleport" => run_teleport,
        "eit" => run_eit,
        "dlcz" => run_dlcz,
        "polarizability" => run_polarizability,
        other => return Err(RunError::Config(format!("unknown scenario `{other}`"))),
    };

    // fan points out across threads, then emit rows in grid order
    let mut results: Vec<Option<RunResult>> = (0..points.len()).map(|_| None).collect();
    let workers = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(points.len().max(1));
    std::thread::scope(|scope| {
        let chunks: Vec<Vec<usize>> = (0..workers)
            .map(|w| (w..points.len()).step_by(workers).collect())
            .collect();
        let mut handles = Vec::new();
        for chunk in chunks {
            let points = &points;
            handles.push(scope.spawn(move || {
                chunk
                    .into_iter()
                    .map(|idx| (idx, runner(&points[idx])))
                    .collect::<Vec<_>>()
            }));
        }
        for h in handles {
            for (idx, res) in h.join().expect("scenario worker panicked") {
                results[idx] = Some(res);
            }
        }
    });

    let mut rows = Vec::new();
    for res in results.into_iter().flatten() {
        rows.extend(res?);
    }

    let extra_json = if scenario == "dlcz" {
        Some(dlcz_density_json(cfg)?)
    } else {
        None
    };
    Ok(ScenarioOutput { rows, extra_json })
}

fn base_row(cfg: &ScenarioConfig) -> Result<Row, RunError> {
    let mut row = Row::new();
    for (k, v) in &cfg.params {
        if let Ok(x) = v.parse::<f64>() {
            row.insert(k.clone(), x);
        }
    }
    if let Some(seed) = cfg.seed {
        row.insert("seed".into(), seed as f64);
    }
    Ok(row)
}

fn run_squeeze(cfg: &ScenarioConfig) -> RunResult {
    cfg.check_keys(&["kappa", "eta_a", "epsilon", "gain"])?;
    let kappa = cfg.require_f64("kappa", None)?;
    let eta_a = cfg.require_f64("eta_a", Some(0.0))?;
    let epsilon = cfg.require_f64("epsilon", Some(0.0))?;
    let gain = match cfg.params.get("gain") {
        Some(_) => SqueezeGain::Fixed(cfg.require_f64("gain", None)?),
        None => SqueezeGain::Optimal,
    };
    let r = lightmatter::protocols::spin_squeeze(kappa, eta_a, epsilon, gain)?;
    let mut row = base_row(cfg)?;
    for (k, v) in &r.figures {
        row.insert(k.clone(), *v);
    }
    Ok(vec![row])
}

fn run_entangle(cfg: &ScenarioConfig) -> RunResult {
    cfg.check_keys(&["kappa", "scheme", "eta_a", "epsilon"])?;
    let kappa = cfg.require_f64("kappa", None)?;
    let scheme = match cfg.get_str("scheme", "magnetic").as_str() {
        "two-pulse" | "twopulse" => EntangleScheme::TwoPulseRotations,
        "magnetic" => EntangleScheme::MagneticSinglePulse,
        other => return Err(RunError::Config(format!("unknown scheme `{other}`"))),
    };
    let losses = LossBudget {
        eta_a: cfg.require_f64("eta_a", Some(0.0))?,
        epsilon: cfg.require_f64("epsilon", Some(0.0))?,
    };
    let r = entangle_ensembles(kappa, scheme, losses)?;
    let mut row = base_row(cfg)?;
    for (k, v) in &r.figures {
        row.insert(k.clone(), *v);
    }
    Ok(vec![row])
}

fn run_memory(cfg: &ScenarioConfig) -> RunResult {
    cfg.check_keys(&["kappa", "gain", "n_bar", "eta_a", "epsilon"])?;
    let kappa = cfg.require_f64("kappa", None)?;
    let gain = cfg.require_f64("gain", Some(kappa))?;
    let n_bar = cfg.require_f64("n_bar", Some(8.0))?;
    let losses = LossBudget {
        eta_a: cfg.require_f64("eta_a", Some(0.0))?,
        epsilon: cfg.require_f64("epsilon", Some(0.0))?,
    };
    let f = memory_average_fidelity(kappa, gain, n_bar, losses)?;
    let bench = classical_benchmark(InputClass::CoherentGaussian { n_bar })?;
    let vac = lightmatter::gaussian::GaussianState::vacuum(1);
    let r = lightmatter::protocols::memory_store(kappa, gain, &vac, losses)?;
    let mut row = base_row(cfg)?;
    row.insert("fidelity".into(), f);
    row.insert("classical_benchmark".into(), bench);
    row.insert("var_x_out".into(), r.figure("var_x_out")?);
    row.insert("var_p_out".into(), r.figure("var_p_out")?);
    Ok(vec![row])
}

fn run_teleport(cfg: &ScenarioConfig) -> RunResult {
    cfg.check_keys(&["kappa", "gain", "n_bar"])?;
    let seed = cfg
        .seed
        .ok_or_else(|| RunError::Config("teleport samples Bell outcomes; seed required".into()))?;
    let kappa = cfg.require_f64("kappa", None)?;
    let gain = cfg.require_f64("gain", Some(1.0))?;
    let n_bar = cfg.require_f64("n_bar", Some(5.0))?;
    let r = teleport(
        kappa,
        gain,
        TeleportInput::Class(InputClass::CoherentGaussian { n_bar }),
        seed,
    )?;
    let mut row = base_row(cfg)?;
    for (k, v) in &r.figures {
        row.insert(k.clone(), *v);
    }
    row.insert(
        "classical_benchmark".into(),
        classical_benchmark(InputClass::CoherentGaussian { n_bar })?,
    );
    Ok(vec![row])
}

fn eit_setup_from(cfg: &ScenarioConfig) -> Result<(EitSetup, f64, f64), RunError> {
    let d = cfg.require_f64("d", None)?;
    let gamma = cfg.require_f64("gamma", Some(1.0))?;
    let length = cfg.require_f64("length", Some(1.0))?;
    let vg = cfg.require_f64("vg", Some(0.05 * length))?;
    let omega = (vg * gamma * d / length).sqrt();
    let t_store = cfg.require_f64("t_store", Some(20.0))?;
    let t_retrieve = cfg.require_f64("t_retrieve", Some(t_store))?;
    let nz = cfg.require_f64("nz", Some(160.0_f64.max(9.0 * d)))? as usize;
    let nt = cfg.require_f64("nt", Some(1100.0_f64.max(26.0 * d)))? as usize;
    let params = EnsembleParams {
        d,
        gamma,
        delta: cfg.require_f64("delta", Some(0.0))?,
        rabi: DriveProfile::Constant(omega),
        length,
        ..Default::default()
    };
    let center = cfg.require_f64("pulse_center", Some(0.5 * t_store))?;
    let sigma = cfg.require_f64("pulse_sigma", Some(0.125 * t_store))?;
    Ok((
        EitSetup {
            params,
            t_store,
            t_retrieve,
            nz,
            nt_store: nt,
            nt_retrieve: nt,
        },
        center,
        sigma,
    ))
}

fn run_eit(cfg: &ScenarioConfig) -> RunResult {
    cfg.check_keys(&[
        "d",
        "gamma",
        "delta",
        "length",
        "vg",
        "t_store",
        "t_retrieve",
        "nz",
        "nt",
        "pulse_center",
        "pulse_sigma",
        "iterations",
        "direction",
    ])?;
    let (setup, center, sigma) = eit_setup_from(cfg)?;
    let direction = match cfg.get_str("direction", "forward").as_str() {
        "forward" => RetrievalDirection::Forward,
        "backward" => RetrievalDirection::Backward,
        other => return Err(RunError::Config(format!("unknown direction `{other}`"))),
    };
    let input = move |t: f64| {
        num_complex::Complex64::new((-(t - center) * (t - center) / (2.0 * sigma * sigma)).exp(), 0.0)
    };
    let res = eit_transfer(&setup, &input, direction)?;
    let mut row = base_row(cfg)?;
    row.insert("efficiency_intensity".into(), res.efficiency_intensity);
    row.insert("efficiency_overlap".into(), res.efficiency_overlap);
    row.insert("leakage_fraction".into(), res.leakage_fraction);
    row.insert("group_delay_expected".into(), res.group_delay_expected);
    let n_iter = cfg.require_f64("iterations", Some(0.0))? as usize;
    if n_iter > 0 {
        let (_, effs) = iterate_optimal_input(&setup, n_iter)?;
        row.insert("optimized_efficiency".into(), *effs.last().unwrap());
        row.insert("optimized_inefficiency".into(), 1.0 - effs.last().unwrap());
    }
    Ok(vec![row])
}

fn detector_from(cfg: &ScenarioConfig) -> Result<(DetectorModel, DetectorPort), RunError> {
    let det = DetectorModel {
        efficiency: cfg.require_f64("efficiency", Some(1.0))?,
        dark_mean: cfg.require_f64("dark_rate", Some(0.0))?,
    };
    let port = match cfg.get_str("port", "plus").as_str() {
        "plus" | "+" => DetectorPort::Plus,
        "minus" | "-" => DetectorPort::Minus,
        other => return Err(RunError::Config(format!("unknown port `{other}`"))),
    };
    Ok((det, port))
}

fn run_dlcz(cfg: &ScenarioConfig) -> RunResult {
    cfg.check_keys(&["kappa", "cutoff", "efficiency", "dark_rate", "port"])?;
    let kappa = cfg.require_f64("kappa", None)?;
    let cutoff = cfg.require_f64("cutoff", Some(4.0))? as usize;
    let (det, port) = detector_from(cfg)?;
    let write = dlcz_write(kappa, cutoff)?;
    let heralded = herald_entangle(&write, &write, port, &det)?;
    let conc = concurrence(&heralded.qubit)?;
    let mut row = base_row(cfg)?;
    row.insert("success_probability".into(), heralded.success_probability);
    row.insert("concurrence".into(), conc);
    row.insert("eof".into(), eof_from_concurrence(conc.clamp(0.0, 1.0))?);
    row.insert("discarded_weight".into(), heralded.discarded_weight);
    row.insert("g2_heralded".into(), g2_conditional(&write, 1, 0)?);
    row.insert("mean_photons".into(), write.mean_photons(1));
    Ok(vec![row])
}

/// Tomography payload: the heralded two-qubit density matrix as real and
/// imaginary grids.
fn dlcz_density_json(cfg: &ScenarioConfig) -> Result<serde_json::Value, RunError> {
    let kappa = cfg.require_f64("kappa", None)?;
    let cutoff = cfg.require_f64("cutoff", Some(4.0))? as usize;
    let (det, port) = detector_from(cfg)?;
    let write = dlcz_write(kappa, cutoff)?;
    let heralded = herald_entangle(&write, &write, port, &det)?;
    let m = heralded.qubit.matrix();
    let grid = |f: &dyn Fn(usize, usize) -> f64| -> Vec<Vec<f64>> {
        (0..4).map(|r| (0..4).map(|c| f(r, c)).collect()).collect()
    };
    Ok(serde_json::json!({
        "basis": ["00", "01", "10", "11"],
        "rho_re": grid(&|r, c| m[(r, c)].re),
        "rho_im": grid(&|r, c| m[(r, c)].im),
    }))
}

fn run_polarizability(cfg: &ScenarioConfig) -> RunResult {
    cfg.check_keys(&["delta", "delta_min", "delta_max", "n_points"])?;
    let spec = lightmatter::atomic::LevelSpec::cesium_d2_f4();
    let rows = if let Some(delta) = cfg.params.get("delta") {
        let delta: f64 = delta
            .parse()
            .map_err(|_| RunError::Config("bad delta".into()))?;
        vec![delta]
    } else {
        let lo = cfg.require_f64("delta_min", None)?;
        let hi = cfg.require_f64("delta_max", None)?;
        let n = cfg.require_f64("n_points", Some(200.0))? as usize;
        (0..n)
            .map(|k| lo + (hi - lo) * k as f64 / (n - 1).max(1) as f64)
            .collect()
    };
    let mut out = Vec::new();
    for delta in rows {
        let c = lightmatter::atomic::polarizability_coeffs(&spec, delta)?;
        let mut row = base_row(cfg)?;
        row.insert("delta".into(), delta);
        row.insert("a0".into(), c.a0);
        row.insert("a1".into(), c.a1);
        row.insert("a2".into(), c.a2);
        out.push(row);
    }
    Ok(out)
}
