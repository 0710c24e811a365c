//! The release gate: every quantitative benchmark the library must
//! reproduce, run end to end with its tolerance pinned in code. Each
//! criterion reports one pass/fail line; `run_all` drives the full table.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::atomic::{asymptotic_coeffs, polarizability_coeffs, wigner_6j, LevelSpec};
use crate::couplings::{
    beam_splitter_swap_channel, faraday_channel, multipass_swap_channel, parametric_gain_channel,
    DriveProfile, EnsembleParams,
};
use crate::fock::{
    concurrence, dlcz_write, g2_conditional, herald_entangle, DetectorModel, DetectorPort,
};
use crate::gaussian::{eof_from_epr, GaussianChannel, GaussianState, Quadrature};
use crate::mb::{
    analytic_bs_kernel, from_dimensionless, integrate_beam_splitter, integrate_faraday,
    integrate_parametric, iterate_optimal_input, retrieve_with_kernel, slow_light_delay,
    storage_bs_kernel, to_dimensionless, EitSetup, PulseGrid,
};
use crate::protocols::{
    classical_benchmark, entangle_ensembles, memory_average_fidelity, resource_epr_closed_form,
    spin_squeeze, teleport_fidelity_from_measured, teleport_resource_epr, EntangleScheme,
    InputClass, LossBudget, SqueezeGain,
};

/// Outcome of one acceptance criterion.
#[derive(Debug, Clone)]
pub struct CriterionOutcome {
    pub id: &'static str,
    pub description: &'static str,
    pub passed: bool,
    pub details: String,
    pub elapsed: Duration,
}

impl CriterionOutcome {
    pub fn line(&self) -> String {
        format!(
            "[{}] {} — {} ({}; {:.2?})",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.description,
            self.details,
            self.elapsed
        )
    }
}

pub const CRITERIA: &[&str] = &[
    "squeezing",
    "squeezing-bound",
    "entanglement",
    "memory",
    "teleportation",
    "maxwell-bloch",
    "atomic-structure",
    "dlcz",
    "physicality-fuzz",
];

/// Run every criterion in order.
pub fn run_all() -> Vec<CriterionOutcome> {
    CRITERIA.iter().map(|id| run_criterion(id)).collect()
}

/// Run one criterion by name (see [`CRITERIA`]).
pub fn run_criterion(id: &str) -> CriterionOutcome {
    let start = Instant::now();
    let (found, description, result): (&'static str, &'static str, CheckResult) = match id {
        "squeezing" => (
            "squeezing",
            "QND spin squeezing, analytic + Monte-Carlo",
            squeezing(),
        ),
        "squeezing-bound" => (
            "squeezing-bound",
            "optimal squeezing equals (1+sqrt(1+d))^-1",
            squeezing_bound(),
        ),
        "entanglement" => (
            "entanglement",
            "two-ensemble EPR variance and E_oF",
            entanglement(),
        ),
        "memory" => (
            "memory",
            "QND+feedback memory beats the classical channel",
            memory(),
        ),
        "teleportation" => (
            "teleportation",
            "resource EPR minimum and fidelity replication",
            teleportation(),
        ),
        "maxwell-bloch" => (
            "maxwell-bloch",
            "integrator vs Bessel kernel, EIT delay and scaling",
            maxwell_bloch(),
        ),
        "atomic-structure" => (
            "atomic-structure",
            "polarizability asymptotes and 6j identities",
            atomic_structure(),
        ),
        "dlcz" => ("dlcz", "heralded photon statistics and concurrence", dlcz()),
        "physicality-fuzz" => (
            "physicality-fuzz",
            "random channel/state compositions stay physical",
            physicality_fuzz(),
        ),
        other => {
            return CriterionOutcome {
                id: "unknown",
                description: "unknown criterion",
                passed: false,
                details: format!("no criterion named {other}"),
                elapsed: start.elapsed(),
            }
        }
    };
    let (passed, details) = match result {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    CriterionOutcome {
        id: found,
        description,
        passed,
        details,
        elapsed: start.elapsed(),
    }
}

type CheckResult = std::result::Result<String, String>;

fn ensure(cond: bool, msg: String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg)
    }
}

fn squeezing() -> CheckResult {
    let t0 = Instant::now();
    let n = 100_000usize;
    let mut worst_pull = 0.0_f64;
    for (i, kappa) in [0.5, 1.0, 2.0].into_iter().enumerate() {
        let analytic = 0.5 / (1.0 + kappa * kappa);
        let r = spin_squeeze(kappa, 0.0, 0.0, SqueezeGain::Optimal).map_err(|e| e.to_string())?;
        let got = r.figure("var_p_feedback").map_err(|e| e.to_string())?;
        ensure(
            (got - analytic).abs() < 1e-12,
            format!("analytic Var(P) at kappa={kappa}: {got} vs {analytic}"),
        )?;
        // Monte-Carlo trajectories: probe, sample, feed back
        let ch = faraday_channel(kappa, 0.0, 0.0).map_err(|e| e.to_string())?;
        let st = GaussianState::vacuum_labeled(&["l", "a"])
            .apply_channel(&ch)
            .map_err(|e| e.to_string())?;
        let gain = -kappa / (1.0 + kappa * kappa);
        let mut rng = ChaCha12Rng::seed_from_u64(1000 + i as u64);
        let (mut s1, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let v = st.sample(&mut rng);
            let p_fin = v[3] + gain * v[0]; // ordering (X_L, P_L, X_A, P_A)
            s1 += p_fin;
            s2 += p_fin * p_fin;
        }
        let mean = s1 / n as f64;
        let var = s2 / n as f64 - mean * mean;
        let se = analytic * (2.0 / n as f64).sqrt();
        let pull = (var - analytic).abs() / se;
        worst_pull = worst_pull.max(pull);
        ensure(
            pull < 3.0,
            format!("MC variance at kappa={kappa}: {var:.6} vs {analytic:.6} ({pull:.2} SE)"),
        )?;
    }
    let elapsed = t0.elapsed();
    ensure(
        elapsed < Duration::from_secs(5),
        format!("runtime {elapsed:.2?} exceeds 5 s"),
    )?;
    Ok(format!(
        "Var(P) = 1/(2(1+k^2)) for k in {{0.5,1,2}}; 1e5 trajectories, worst pull {worst_pull:.2} SE"
    ))
}

fn squeezing_bound() -> CheckResult {
    let mut worst = 0.0_f64;
    for d in [1.0, 10.0, 100.0, 1e4] {
        let (_, var) =
            crate::protocols::optimal_squeezing_for_depth(d).map_err(|e| e.to_string())?;
        let expect = 1.0 / (1.0 + (1.0 + d).sqrt());
        worst = worst.max((var - expect).abs());
        ensure(
            (var - expect).abs() < 1e-9,
            format!("optimum at d={d}: {var} vs {expect}"),
        )?;
    }
    Ok(format!("d in {{1,10,100,1e4}}, worst deviation {worst:.2e}"))
}

fn entanglement() -> CheckResult {
    for kappa in [0.5, 1.0, 2.0] {
        let expect = 2.0 / (1.0 + kappa * kappa);
        for scheme in [
            EntangleScheme::TwoPulseRotations,
            EntangleScheme::MagneticSinglePulse,
        ] {
            let r = entangle_ensembles(kappa, scheme, LossBudget::lossless())
                .map_err(|e| e.to_string())?;
            let got = r.figure("delta_epr").map_err(|e| e.to_string())?;
            ensure(
                (got - expect).abs() < 1e-9,
                format!("{scheme:?} at kappa={kappa}: {got} vs {expect}"),
            )?;
        }
    }
    let eof = eof_from_epr(1.3).map_err(|e| e.to_string())?;
    ensure(
        (eof - 0.28).abs() < 0.005,
        format!("E_oF(1.3) = {eof}, want 0.28 +- 0.005"),
    )?;
    Ok(format!(
        "Delta_EPR = 2/(1+k^2) both schemes to 1e-9; E_oF(1.3) = {eof:.4}"
    ))
}

fn memory() -> CheckResult {
    let f = memory_average_fidelity(1.0, 1.0, 8.0, LossBudget::lossless())
        .map_err(|e| e.to_string())?;
    let expect = (2.0_f64 / 3.0).sqrt();
    ensure(
        (f - expect).abs() < 1e-9,
        format!("F(kappa=g=1) = {f} vs sqrt(2/3) = {expect}"),
    )?;
    // dominance over the classical channel (n_bar = 0 is degenerate: that
    // class is vacuum only and classically perfect)
    for n in 1..=50 {
        let n_bar = n as f64;
        let fq = memory_average_fidelity(1.0, 1.0, n_bar, LossBudget::lossless())
            .map_err(|e| e.to_string())?;
        let fc = classical_benchmark(InputClass::CoherentGaussian { n_bar })
            .map_err(|e| e.to_string())?;
        ensure(fq > fc, format!("no dominance at n_bar={n_bar}: {fq} <= {fc}"))?;
    }
    let bench8 = classical_benchmark(InputClass::CoherentGaussian { n_bar: 8.0 })
        .map_err(|e| e.to_string())?;
    ensure(
        (bench8 - 9.0 / 17.0).abs() < 1e-12,
        format!("benchmark(8) = {bench8} vs 9/17"),
    )?;
    Ok(format!(
        "F = sqrt(2/3) to 1e-9; beats (1+n)/(1+2n) on 1..=50; benchmark(8) = {bench8:.4}"
    ))
}

fn teleportation() -> CheckResult {
    // dense-grid scan of the channel-derived EPR variance
    let mut best = (f64::INFINITY, 0.0_f64);
    let mut k = 0.0;
    while k <= 3.0 {
        let v = teleport_resource_epr(k).map_err(|e| e.to_string())?;
        if v < best.0 {
            best = (v, k);
        }
        k += 1e-3;
    }
    // refined by golden-section search on the closed form
    let f = resource_epr_closed_form;
    let phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (1.0, 2.0);
    for _ in 0..80 {
        let c = b - phi * (b - a);
        let e = a + phi * (b - a);
        if f(c) < f(e) {
            b = e;
        } else {
            a = c;
        }
    }
    let k_star = 0.5 * (a + b);
    let v_star = f(k_star);
    ensure(
        (best.0 - v_star).abs() < 1e-4 && (best.1 - k_star).abs() < 2e-3,
        format!(
            "channel scan ({:.4} @ {:.3}) vs closed form ({v_star:.4} @ {k_star:.3})",
            best.0, best.1
        ),
    )?;
    ensure(
        (v_star - 0.66).abs() < 0.01,
        format!("min EPR = {v_star}, want 0.66 +- 0.01"),
    )?;
    ensure(
        (k_star - 1.48).abs() < 0.02,
        format!("argmin = {k_star}, want 1.48 +- 0.02"),
    )?;
    let f_exp = teleport_fidelity_from_measured(0.95, 1.2, 1.2, 5.0).map_err(|e| e.to_string())?;
    ensure(
        (f_exp - 0.60).abs() < 0.03,
        format!("replication fidelity {f_exp}, want 0.60 +- 0.03"),
    )?;
    Ok(format!(
        "min EPR {v_star:.4} at kappa {k_star:.3}; replication F = {f_exp:.4}"
    ))
}

fn maxwell_bloch() -> CheckResult {
    // (a) zero-drive resonant transmission
    let p = EnsembleParams {
        d: 5.0,
        gamma: 1.0,
        delta: 0.0,
        rabi: DriveProfile::Constant(0.0),
        length: 1.0,
        ..Default::default()
    };
    let mut g = PulseGrid::uniform(64, 64, 1.0, 4.0).map_err(|e| e.to_string())?;
    g.set_light(|t| Complex64::new((-(t - 2.0) * (t - 2.0)).exp(), 0.0));
    let out = integrate_beam_splitter(&p, &g).map_err(|e| e.to_string())?;
    let trans = out.light_norm_sq() / g.light_norm_sq();
    let rel_a = (trans / (-5.0_f64).exp() - 1.0).abs();
    ensure(rel_a < 5e-3, format!("transmission off by {rel_a:.2e}"))?;

    // (b) integrator vs analytic kernel at d = 50, 512x512, under 60 s
    let t_b = Instant::now();
    let t_total = 10.0;
    let p2 = EnsembleParams {
        d: 50.0,
        gamma: 1.0,
        delta: 0.0,
        rabi: DriveProfile::Constant(1.0),
        length: 1.0,
        ..Default::default()
    };
    let mut g2 = PulseGrid::uniform(512, 512, 1.0, t_total).map_err(|e| e.to_string())?;
    g2.set_spin(|z| Complex64::new((std::f64::consts::PI * z).sin(), 0.0));
    let out2 = integrate_beam_splitter(&p2, &g2).map_err(|e| e.to_string())?;
    let kernel_out = retrieve_with_kernel(&p2, &g2).map_err(|e| e.to_string())?;
    let h_total = crate::mb::h_function(&p2, 0.0, t_total).map_err(|e| e.to_string())?;
    let t_skip = t_total / (4.0 * h_total); // early boundary layer
    let (mut num, mut den) = (0.0, 0.0);
    for (j, &t) in g2.ts.iter().enumerate() {
        if t < t_skip {
            continue;
        }
        num += (out2.light[j] - kernel_out[j]).norm_sqr();
        den += kernel_out[j].norm_sqr();
    }
    let l2 = (num / den).sqrt();
    let kernel_elapsed = t_b.elapsed();
    ensure(l2 < 1e-3, format!("kernel L2 = {l2:.2e}"))?;
    ensure(
        kernel_elapsed < Duration::from_secs(60),
        format!("kernel run took {kernel_elapsed:.1?}"),
    )?;

    // (c) kernel time-reversal symmetry
    for frac in [0.1, 0.4, 0.8] {
        for z in [0.1, 0.5, 0.9] {
            let t = frac * t_total;
            let s = storage_bs_kernel(&p2, t_total, t, z)
                .map_err(|e| e.to_string())?
                .value;
            let r = analytic_bs_kernel(&p2, t_total - t, z)
                .map_err(|e| e.to_string())?
                .value;
            ensure(
                (s - r).norm() < 1e-10,
                format!("kernel symmetry off at t={t}, z={z}"),
            )?;
        }
    }

    // (d) EIT group delay at d = 100
    let d = 100.0;
    let vg = 0.05;
    let pe = EnsembleParams {
        d,
        gamma: 1.0,
        delta: 0.0,
        rabi: DriveProfile::Constant((vg * d).sqrt()),
        length: 1.0,
        ..Default::default()
    };
    let sigma = 3.0_f64;
    let input =
        move |t: f64| Complex64::new((-(t - 12.0) * (t - 12.0) / (2.0 * sigma * sigma)).exp(), 0.0);
    let (delay, expected) =
        slow_light_delay(&pe, &input, 60.0, 512, 7000).map_err(|e| e.to_string())?;
    let rel_d = (delay / expected - 1.0).abs();
    ensure(
        rel_d < 0.02,
        format!("delay {delay:.3} vs {expected:.3} ({rel_d:.1e})"),
    )?;

    // (e) optimized per-stage inefficiency scales as 1/d. Storage and
    // retrieval efficiencies are equal at the converged fixed point, so one
    // stage's inefficiency is 1 - sqrt(total); the fit runs over a decade.
    let mut pts = Vec::new();
    for (d, iters) in [(10.0, 25usize), (30.0, 30), (100.0, 60)] {
        let vg = 0.05;
        let psc = EnsembleParams {
            d,
            gamma: 1.0,
            delta: 0.0,
            rabi: DriveProfile::Constant((vg * d).sqrt()),
            length: 1.0,
            ..Default::default()
        };
        let nz = 170.max((5.5 * d) as usize);
        let nt = 1400.max((36.0 * d) as usize);
        let setup = EitSetup {
            params: psc,
            t_store: 30.0,
            t_retrieve: 30.0,
            nz,
            nt_store: nt,
            nt_retrieve: nt,
        };
        let (_, effs) = iterate_optimal_input(&setup, iters).map_err(|e| e.to_string())?;
        let eta = *effs.last().unwrap();
        pts.push((d.ln(), (1.0 - eta.sqrt()).ln()));
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    ensure(
        (slope + 1.0).abs() < 0.2,
        format!("inefficiency exponent {slope:.3}, want -1 +- 0.2"),
    )?;

    // (f) dimensionless vs physical integration, all three interactions
    let profile = DriveProfile::Tabulated(
        (0..=400)
            .map(|k| {
                let t = 2.0 * k as f64 / 400.0;
                (t, 1.5 + 0.9 * (2.5 * t).sin())
            })
            .collect(),
    );
    let mut worst_f = 0.0_f64;
    for (name, delta) in [("bs", 6.0), ("gain", 60.0), ("faraday", 60.0)] {
        let p = EnsembleParams {
            d: 8.0,
            gamma: 1.0,
            delta,
            rabi: profile.clone(),
            length: 1.0,
            ..Default::default()
        };
        let mut g = PulseGrid::uniform(448, 2560, 1.0, 2.0).map_err(|e| e.to_string())?;
        g.set_light(|t| Complex64::new((-(t - 1.0) * (t - 1.0) * 6.0).exp(), 0.0));
        g.set_spin(|z| Complex64::new((std::f64::consts::PI * z).sin(), -0.3));
        let dg = to_dimensionless(&g, &p).map_err(|e| e.to_string())?;
        let (phys, dim) = match name {
            "bs" => (
                integrate_beam_splitter(&p, &g).map_err(|e| e.to_string())?,
                integrate_beam_splitter(&p, &dg).map_err(|e| e.to_string())?,
            ),
            "gain" => (
                integrate_parametric(&p, &g).map_err(|e| e.to_string())?,
                integrate_parametric(&p, &dg).map_err(|e| e.to_string())?,
            ),
            _ => (
                integrate_faraday(&p, &g, None).map_err(|e| e.to_string())?,
                integrate_faraday(&p, &dg, None).map_err(|e| e.to_string())?,
            ),
        };
        let mut dim_out = dg.clone();
        dim_out.light = dim.light;
        dim_out.spin = dim.spin;
        let back = from_dimensionless(&dim_out, &p).map_err(|e| e.to_string())?;
        let l2 = |a: &[Complex64], b: &[Complex64]| -> f64 {
            let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
            let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
            (num / den).sqrt()
        };
        let worst = l2(&back.light, &phys.light).max(l2(&back.spin, &phys.spin));
        worst_f = worst_f.max(worst);
        ensure(worst < 1e-6, format!("{name} dual path L2 = {worst:.2e}"))?;
    }

    Ok(format!(
        "exp(-d) {rel_a:.1e}; kernel L2 {l2:.1e} in {kernel_elapsed:.1?}; delay {rel_d:.1e}; \
         scaling {slope:.2}; dual-path {worst_f:.1e}"
    ))
}

fn atomic_structure() -> CheckResult {
    let spec = LevelSpec::cesium_d2_f4();
    let max_offset = spec
        .delta_fprime
        .iter()
        .map(|&(_, d)| d)
        .fold(0.0_f64, f64::max);
    let c = polarizability_coeffs(&spec, -1e6 * max_offset).map_err(|e| e.to_string())?;
    ensure((c.a0 - 1.0 / 6.0).abs() < 1e-6, format!("a0 = {} vs 1/6", c.a0))?;
    ensure(
        (c.a1 - 1.0 / 24.0).abs() < 1e-6,
        format!("a1 = {} vs 1/24", c.a1),
    )?;
    ensure(c.a2.abs() < 1e-6, format!("a2 = {} should vanish", c.a2))?;
    let asym = asymptotic_coeffs(&spec).map_err(|e| e.to_string())?;
    ensure(
        (asym.a0 - 1.0 / 6.0).abs() < 1e-12 && (asym.a1 - 1.0 / 24.0).abs() < 1e-12,
        "contracted asymptotes off".to_string(),
    )?;

    let i0 = LevelSpec::spin_half_i0();
    for delta in [-1e9, -1e7, 3e7, 2e9] {
        let c = polarizability_coeffs(&i0, delta).map_err(|e| e.to_string())?;
        ensure(c.a2 == 0.0, format!("a2 = {} at I=0", c.a2))?;
    }

    // 6j orthogonality on seeded random triads
    let mut rng = ChaCha12Rng::seed_from_u64(2024);
    let mut checked = 0;
    while checked < 50 {
        let j: Vec<f64> = (0..6).map(|_| rng.gen_range(0..=6) as f64 / 2.0).collect();
        let (j1, j2, _j3, j4, j5, j6) = (j[0], j[1], j[2], j[3], j[4], j[5]);
        let lo = (j1 - j2).abs().max((j4 - j5).abs());
        let hi = (j1 + j2).min(j4 + j5);
        if hi < lo {
            continue;
        }
        let sum_with = |target: f64| -> f64 {
            let mut acc = 0.0;
            let mut x = lo;
            while x <= hi + 0.1 {
                acc += (2.0 * x + 1.0)
                    * wigner_6j(j1, j2, x, j4, j5, j6).unwrap()
                    * wigner_6j(j1, j2, x, j4, j5, target).unwrap();
                x += 1.0;
            }
            acc
        };
        let diag = sum_with(j6);
        if diag.abs() == 0.0 {
            continue;
        }
        ensure(
            (diag - 1.0 / (2.0 * j6 + 1.0)).abs() < 1e-10,
            format!("orthogonality diagonal off for {j:?}"),
        )?;
        let other = j6 + 1.0;
        if other <= j1 + j5 + 0.1 {
            ensure(
                sum_with(other).abs() < 1e-10,
                format!("orthogonality off-diagonal off for {j:?}"),
            )?;
        }
        checked += 1;
    }
    Ok("Cs F=4 a0=1/6, a1=1/24, a2->0; a2=0 at I=0; 6j orthogonality on 50 triads".to_string())
}

fn dlcz() -> CheckResult {
    // heralded single-photon statistics are exactly antibunched
    let st = dlcz_write(0.2, 6).map_err(|e| e.to_string())?;
    let g2 = g2_conditional(&st, 1, 0).map_err(|e| e.to_string())?;
    ensure(g2 == 0.0, format!("heralded g2 = {g2}, want exactly 0"))?;

    // heralded concurrence at kappa = 0.05, cutoff 4
    let w = dlcz_write(0.05, 4).map_err(|e| e.to_string())?;
    let out = herald_entangle(&w, &w, DetectorPort::Plus, &DetectorModel::ideal())
        .map_err(|e| e.to_string())?;
    let conc = concurrence(&out.qubit).map_err(|e| e.to_string())?;
    ensure(conc >= 0.99, format!("heralded concurrence {conc}"))?;

    // Gaussian-Fock moment agreement for kappa <= 0.5
    let mut worst = 0.0_f64;
    for kappa in [0.1, 0.3, 0.5] {
        let st = dlcz_write(kappa, 8).map_err(|e| e.to_string())?;
        let (var_xa, var_xl, cov_x, cov_p) = st.quadrature_moments();
        let ch = parametric_gain_channel(kappa).map_err(|e| e.to_string())?;
        let gauss = GaussianState::vacuum_labeled(&["l", "a"])
            .apply_channel(&ch)
            .map_err(|e| e.to_string())?;
        let gv_x = gauss.var_of("a", Quadrature::X).map_err(|e| e.to_string())?;
        let gc_x = gauss
            .cov_of("l", Quadrature::X, "a", Quadrature::X)
            .map_err(|e| e.to_string())?;
        let gc_p = gauss
            .cov_of("l", Quadrature::P, "a", Quadrature::P)
            .map_err(|e| e.to_string())?;
        for (a, b) in [
            (var_xa, gv_x),
            (var_xl, gv_x),
            (cov_x.abs(), gc_x.abs()),
            (cov_p.abs(), gc_p.abs()),
        ] {
            worst = worst.max((a - b).abs());
        }
        ensure(
            worst < 1e-6,
            format!("moment mismatch {worst:.2e} at kappa={kappa}"),
        )?;
    }
    Ok(format!(
        "heralded g2 = 0; concurrence {conc:.4} >= 0.99; Gaussian-Fock moments to {worst:.1e}"
    ))
}

fn physicality_fuzz() -> CheckResult {
    let mut rng = ChaCha12Rng::seed_from_u64(77);
    for trial in 0..1000 {
        let n_modes = rng.gen_range(1..=3usize);
        let mut st = GaussianState::vacuum(n_modes);
        for _step in 0..rng.gen_range(1..=4usize) {
            let ch: GaussianChannel = match rng.gen_range(0..5) {
                0 => faraday_channel(
                    rng.gen_range(-2.0..2.0),
                    rng.gen_range(0.0..0.5),
                    rng.gen_range(0.0..0.5),
                )
                .map_err(|e| e.to_string())?,
                1 => parametric_gain_channel(rng.gen_range(-1.0..1.0)).map_err(|e| e.to_string())?,
                2 => beam_splitter_swap_channel(rng.gen_range(0.0..std::f64::consts::PI))
                    .map_err(|e| e.to_string())?,
                3 => multipass_swap_channel(rng.gen_range(0.0..2.0)).map_err(|e| e.to_string())?,
                _ => GaussianChannel::attenuate(1, &[(0, rng.gen_range(0.0..1.0))])
                    .map_err(|e| e.to_string())?,
            };
            ch.check_cp().map_err(|e| format!("trial {trial}: {e}"))?;
            let need = ch.n_modes();
            if need > st.n_modes() {
                for k in st.n_modes()..need {
                    st.append_vacuum(format!("extra{trial}_{k}"));
                }
            }
            let modes: Vec<String> = st.labels()[..need].to_vec();
            st = st
                .apply_channel_on(&ch, &modes)
                .map_err(|e| format!("trial {trial}: {e}"))?;
            let nu_min = st
                .symplectic_eigenvalues()
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            ensure(nu_min >= 0.5 - 1e-9, format!("trial {trial}: nu_min = {nu_min}"))?;
        }
    }
    // the two-cell channel participates through its own CP check
    two_cell_magnetic_channel_check().map_err(|e| e)?;
    Ok("1000 random compositions kept nu_min >= 1/2 - 1e-9 and CP".to_string())
}

fn two_cell_magnetic_channel_check() -> std::result::Result<(), String> {
    for kappa in [-1.5, 0.3, 2.0] {
        crate::couplings::two_cell_magnetic_channel(kappa)
            .map_err(|e| e.to_string())?
            .check_cp()
            .map_err(|e| e.to_string())?;
    }
    Ok(())
}
