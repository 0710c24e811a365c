//! Coefficient matrices of the three interactions and the public
//! integration entry points.
//!
//! Complex fields are carried as (Re, Im) pairs; the field layout is
//! `[light..., spin...]` with light components propagating in z and spin
//! components in t.

use nalgebra::SMatrix;
use num_complex::Complex64;

use super::grid::{Coords, PulseGrid};
use super::scheme::{integrate_box, MbSolution};
use crate::couplings::EnsembleParams;
use crate::error::{Error, Result};

/// 2x2 real block for multiplication by a complex scalar, `u -> c u`.
fn block_linear(c: Complex64) -> [[f64; 2]; 2] {
    [[c.re, -c.im], [c.im, c.re]]
}

/// 2x2 real block for `u -> c conj(u)`.
fn block_conj(c: Complex64) -> [[f64; 2]; 2] {
    [[c.re, c.im], [c.im, -c.re]]
}

fn put_block<const N: usize>(m: &mut SMatrix<f64, N, N>, row: usize, col: usize, b: [[f64; 2]; 2]) {
    for r in 0..2 {
        for c in 0..2 {
            m[(row + r, col + c)] += b[r][c];
        }
    }
}

/// Single-photon coupling constant `g = sqrt(d γ / 4 L)` of a uniform
/// medium.
fn coupling_g(p: &EnsembleParams) -> f64 {
    (p.d * p.gamma / (4.0 * p.length)).sqrt()
}

/// Beam-splitter coefficients at `(z, t)` (z-independent medium).
fn bs_coeff(p: &EnsembleParams, t: f64) -> SMatrix<f64, 4, 4> {
    let i = Complex64::i();
    let dtilde = Complex64::new(p.delta, -0.5 * p.gamma);
    let g = coupling_g(p);
    let omega = p.rabi.omega(t);
    let c_ll = i * g * g / dtilde;
    let c_la = i * g * omega / (2.0 * dtilde);
    let c_aa = i * omega * omega / (4.0 * dtilde);
    let c_al = i * g * omega / (2.0 * dtilde);
    let mut m = SMatrix::zeros();
    put_block(&mut m, 0, 0, block_linear(c_ll));
    put_block(&mut m, 0, 2, block_linear(c_la));
    put_block(&mut m, 2, 2, block_linear(c_aa));
    put_block(&mut m, 2, 0, block_linear(c_al));
    m
}

/// Parametric-gain coefficients: light couples to the conjugate spin wave
/// and the spin picks up the AC-Stark rotation.
fn gain_coeff(p: &EnsembleParams, t: f64) -> SMatrix<f64, 4, 4> {
    let i = Complex64::i();
    let g = coupling_g(p);
    let omega = p.rabi.omega(t);
    let denom = Complex64::new(2.0 * p.delta, -p.gamma);
    let c_cross = i * g * omega / denom;
    let stark = -i * omega * omega * p.delta
        / (4.0 * p.delta * p.delta + p.gamma * p.gamma);
    let mut m = SMatrix::zeros();
    put_block(&mut m, 0, 2, block_conj(c_cross));
    put_block(&mut m, 2, 2, block_linear(stark));
    put_block(&mut m, 2, 0, block_conj(c_cross));
    m
}

/// Coupling constant entering the Faraday quadrature equations. The probe
/// is linearly polarized there, which doubles the effective cross-section
/// relative to the circular-polarization convention of [`coupling_g`]; this
/// normalization makes the integrated map land exactly on the κ of
/// `derive_couplings`.
fn coupling_g_faraday(p: &EnsembleParams) -> f64 {
    (p.d * p.gamma / (2.0 * p.length)).sqrt()
}

/// Faraday quadrature coefficients, layout `[x_L, p_L, x_A, p_A]`. The sign
/// convention of the drive is fixed so the integrated map matches
/// `X_out = X_in + κ P_in` with κ > 0, and the damping rates integrate to
/// the `e^{-η/2}` factors of the weak-decay solution.
fn faraday_coeff(p: &EnsembleParams, t: f64) -> SMatrix<f64, 4, 4> {
    let g = coupling_g_faraday(p);
    let omega = p.rabi.omega(t);
    let denom = 4.0 * p.delta * p.delta + p.gamma * p.gamma;
    let a_d = 2.0 * 2.0_f64.sqrt() * p.delta * g * omega / denom;
    let a_g = 2.0_f64.sqrt() * p.gamma * g * omega / denom;
    let b_l = p.d * p.gamma * p.gamma / (4.0 * p.length * denom);
    let b_a = p.gamma * omega * omega / (2.0 * denom);
    let mut m = SMatrix::zeros();
    m[(0, 3)] = a_d;
    m[(0, 0)] = -b_l;
    m[(1, 3)] = -a_g;
    m[(1, 1)] = -b_l;
    m[(2, 1)] = a_d;
    m[(2, 2)] = -b_a;
    m[(3, 1)] = -a_g;
    m[(3, 3)] = -b_a;
    m
}

/// Faraday in the rotating frame of a Larmor precession (decay dropped, as
/// in the far-detuned regime where it is negligible over one pulse).
fn faraday_rotframe_coeff(p: &EnsembleParams, omega_larmor: f64, t: f64) -> SMatrix<f64, 4, 4> {
    let g = coupling_g_faraday(p);
    let c = g * p.rabi.omega(t) / (2.0_f64.sqrt() * p.delta);
    let (s, co) = (omega_larmor * t).sin_cos();
    let mut m = SMatrix::zeros();
    m[(0, 3)] = c * co; // x_L <- cos p_A
    m[(0, 2)] = c * s; // x_L <- sin x_A
    m[(2, 1)] = c * co; // x_A <- cos p_L
    m[(3, 1)] = -c * s; // p_A <- -sin p_L
    m
}

/// Two counter-rotating cells sharing one probe, layout
/// `[x_L, p_L, x_A1, p_A1, x_A2, p_A2]`.
fn two_cell_coeff(p: &EnsembleParams, omega_larmor: f64, t: f64) -> SMatrix<f64, 6, 6> {
    let g = coupling_g_faraday(p);
    let c = g * p.rabi.omega(t) / (2.0_f64.sqrt() * p.delta);
    let (s, co) = (omega_larmor * t).sin_cos();
    let mut m = SMatrix::zeros();
    m[(0, 3)] = c * co;
    m[(0, 2)] = c * s;
    m[(0, 5)] = c * co;
    m[(0, 4)] = -c * s;
    m[(2, 1)] = c * co;
    m[(3, 1)] = -c * s;
    m[(4, 1)] = c * co;
    m[(5, 1)] = c * s;
    m
}

/// Resolution the box scheme needs for a coefficient field: eight nodes per
/// unit of integrated rate in each direction, calibrated against the
/// analytic kernel.
pub fn resolution_bound<const N: usize>(
    zs: &[f64],
    ts: &[f64],
    n_zfields: usize,
    coeff: &dyn Fn(f64, f64) -> SMatrix<f64, N, N>,
) -> (usize, usize) {
    let length = zs[zs.len() - 1] - zs[0];
    let duration = ts[ts.len() - 1] - ts[0];
    let mut rate_z = 0.0_f64;
    let mut rate_t = 0.0_f64;
    for k in 0..=16 {
        let t = ts[0] + duration * k as f64 / 16.0;
        let m = coeff(zs[0] + 0.5 * length, t);
        for r in 0..N {
            let row_sum: f64 = (0..N).map(|c| m[(r, c)].abs()).sum();
            if r < n_zfields {
                rate_z = rate_z.max(row_sum * length);
            } else {
                rate_t = rate_t.max(row_sum * duration);
            }
        }
    }
    (
        ((8.0 * rate_z).ceil() as usize).max(16),
        ((8.0 * rate_t).ceil() as usize).max(16),
    )
}

fn check_resolution<const N: usize>(
    grid: &PulseGrid,
    n_zfields: usize,
    coeff: &dyn Fn(f64, f64) -> SMatrix<f64, N, N>,
) -> Result<()> {
    let (nz_min, nt_min) = resolution_bound(&grid.zs, &grid.ts, n_zfields, coeff);
    if grid.nz() < nz_min || grid.nt() < nt_min {
        return Err(Error::GridTooCoarse {
            nz: grid.nz(),
            nt: grid.nt(),
            nz_min,
            nt_min,
        });
    }
    Ok(())
}

fn complex_faces(sol: &MbSolution<4>, grid: &PulseGrid) -> PulseGrid {
    let nz = grid.nz();
    let nt = grid.nt();
    let light = (0..=nt)
        .map(|j| {
            let n = sol.node(nz, j);
            Complex64::new(n[0], n[1])
        })
        .collect();
    let spin = (0..=nz)
        .map(|i| {
            let n = sol.node(i, nt);
            Complex64::new(n[2], n[3])
        })
        .collect();
    PulseGrid {
        coords: grid.coords,
        zs: grid.zs.clone(),
        ts: grid.ts.clone(),
        light,
        spin,
        time_map: grid.time_map.clone(),
    }
}

fn run_complex_system(
    grid: &PulseGrid,
    coeff: &dyn Fn(f64, f64) -> SMatrix<f64, 4, 4>,
) -> Result<(PulseGrid, MbSolution<4>)> {
    grid.validate()?;
    check_resolution(grid, 2, coeff)?;
    let light_in = grid.light.clone();
    let spin_in = grid.spin.clone();
    let sol = integrate_box::<4>(
        &grid.zs,
        &grid.ts,
        2,
        coeff,
        &|j| [light_in[j].re, light_in[j].im, 0.0, 0.0],
        &|i| [0.0, 0.0, spin_in[i].re, spin_in[i].im],
    )?;
    Ok((complex_faces(&sol, grid), sol))
}

/// Beam-splitter interaction: propagate the input faces of `grid` through
/// the medium, returning the output faces (`a_L` at `z = L`, `a_A` at
/// `t = T`).
pub fn integrate_beam_splitter(p: &EnsembleParams, grid: &PulseGrid) -> Result<PulseGrid> {
    Ok(integrate_beam_splitter_full(p, grid)?.0)
}

/// As [`integrate_beam_splitter`], also returning the interior solution.
pub fn integrate_beam_splitter_full(
    p: &EnsembleParams,
    grid: &PulseGrid,
) -> Result<(PulseGrid, MbSolution<4>)> {
    p.validate()?;
    match grid.coords {
        Coords::Physical => run_complex_system(grid, &|_z, t| bs_coeff(p, t)),
        Coords::Dimensionless => {
            let c = dimensionless_bs_coeff(p, kappa_e(p, grid)?);
            run_complex_system(grid, &move |_s, _v| c)
        }
    }
}

/// Parametric-gain interaction on the input faces of `grid`.
pub fn integrate_parametric(p: &EnsembleParams, grid: &PulseGrid) -> Result<PulseGrid> {
    p.validate()?;
    match grid.coords {
        Coords::Physical => Ok(run_complex_system(grid, &|_z, t| gain_coeff(p, t))?.0),
        Coords::Dimensionless => {
            let c = dimensionless_gain_coeff(p, kappa_e(p, grid)?);
            Ok(run_complex_system(grid, &move |_s, _v| c)?.0)
        }
    }
}

/// Faraday interaction on quadrature fields encoded as
/// `a = (x + i p)/√2`. With `larmor` set, the rotating-frame equations are
/// integrated instead (momenta are then no longer conserved).
pub fn integrate_faraday(
    p: &EnsembleParams,
    grid: &PulseGrid,
    larmor: Option<f64>,
) -> Result<PulseGrid> {
    p.validate()?;
    match (grid.coords, larmor) {
        (Coords::Physical, None) => Ok(run_complex_system(grid, &|_z, t| faraday_coeff(p, t))?.0),
        (Coords::Physical, Some(w)) => {
            Ok(run_complex_system(grid, &move |_z, t| faraday_rotframe_coeff(p, w, t))?.0)
        }
        (Coords::Dimensionless, None) => {
            let c = dimensionless_faraday_coeff(p, kappa_e(p, grid)?);
            Ok(run_complex_system(grid, &move |_s, _v| c)?.0)
        }
        (Coords::Dimensionless, Some(_)) => Err(Error::InvalidArgument(
            "rotating-frame integration works in physical coordinates".into(),
        )),
    }
}

/// Output faces of a two-cell counter-rotating integration.
#[derive(Debug, Clone)]
pub struct TwoCellResult {
    pub light_out: PulseGrid,
    pub spin2_out: Vec<Complex64>,
    /// max drift of the conserved combinations `p_A1 + p_A2` and
    /// `x_A1 - x_A2` over the integration
    pub conserved_drift: f64,
}

/// Probe traversing two oppositely precessing ensembles (the second cell's
/// spin wave rides in `spin2`). Output `light_out.spin` is cell 1.
pub fn integrate_faraday_two_cell(
    p: &EnsembleParams,
    grid: &PulseGrid,
    spin2: &[Complex64],
    omega_larmor: f64,
) -> Result<TwoCellResult> {
    p.validate()?;
    grid.validate()?;
    if spin2.len() != grid.zs.len() {
        return Err(Error::DimensionMismatch("spin2 length vs grid".into()));
    }
    let coeff = move |_z: f64, t: f64| two_cell_coeff(p, omega_larmor, t);
    check_resolution(grid, 2, &coeff)?;
    let light_in = grid.light.clone();
    let spin_in = grid.spin.clone();
    let spin2_in = spin2.to_vec();
    let sol = integrate_box::<6>(
        &grid.zs,
        &grid.ts,
        2,
        &coeff,
        &|j| [light_in[j].re, light_in[j].im, 0.0, 0.0, 0.0, 0.0],
        &|i| {
            [
                0.0,
                0.0,
                spin_in[i].re,
                spin_in[i].im,
                spin2_in[i].re,
                spin2_in[i].im,
            ]
        },
    )?;
    let nz = grid.nz();
    let nt = grid.nt();
    let light = (0..=nt)
        .map(|j| {
            let n = sol.node(nz, j);
            Complex64::new(n[0], n[1])
        })
        .collect();
    let spin = (0..=nz)
        .map(|i| {
            let n = sol.node(i, nt);
            Complex64::new(n[2], n[3])
        })
        .collect();
    let spin2_out = (0..=nz)
        .map(|i| {
            let n = sol.node(i, nt);
            Complex64::new(n[4], n[5])
        })
        .collect();
    // conserved nonlocal combinations: integrate over z at each time level
    let mut drift = 0.0_f64;
    let sum_at = |j: usize, f: &dyn Fn(&[f64; 6]) -> f64| -> f64 {
        let mut acc = 0.0;
        for i in 0..nz {
            let a = f(sol.node(i, j));
            let b = f(sol.node(i + 1, j));
            acc += 0.5 * (a + b) * (grid.zs[i + 1] - grid.zs[i]);
        }
        acc
    };
    let p_sum_0 = sum_at(0, &|n| n[3] + n[5]);
    let x_diff_0 = sum_at(0, &|n| n[2] - n[4]);
    for j in 0..=nt {
        drift = drift
            .max((sum_at(j, &|n| n[3] + n[5]) - p_sum_0).abs())
            .max((sum_at(j, &|n| n[2] - n[4]) - x_diff_0).abs());
    }
    Ok(TwoCellResult {
        light_out: PulseGrid {
            coords: grid.coords,
            zs: grid.zs.clone(),
            ts: grid.ts.clone(),
            light,
            spin,
            time_map: grid.time_map.clone(),
        },
        spin2_out,
        conserved_drift: drift,
    })
}

// ---- dimensionless (s, v) coefficient sets; constants of the grid ----

/// The rescaled coupling `κ = sqrt(h(0,T))`; `T` comes from the stored
/// physical time map of a dimensionless grid.
fn kappa_e(p: &EnsembleParams, grid: &PulseGrid) -> Result<f64> {
    let t_total = grid
        .time_map
        .as_ref()
        .and_then(|m| m.last().copied())
        .ok_or_else(|| {
            Error::InvalidArgument(
                "dimensionless grid lacks its physical time map".into(),
            )
        })?;
    let h = super::kernel::h_function(p, 0.0, t_total)?;
    if h <= 0.0 {
        return Err(Error::InvalidArgument(
            "dimensionless integration needs h(0,T) > 0".into(),
        ));
    }
    Ok(h.sqrt())
}

fn e_iphi(p: &EnsembleParams) -> Complex64 {
    Complex64::new(2.0 * p.delta, p.gamma) / (4.0 * p.delta * p.delta + p.gamma * p.gamma).sqrt()
}

fn dimensionless_bs_coeff(p: &EnsembleParams, k: f64) -> SMatrix<f64, 4, 4> {
    let i = Complex64::i();
    let c_ll = i * p.gamma * p.d / (2.0 * Complex64::new(2.0 * p.delta, -p.gamma));
    let c_aa = i * k * k * Complex64::new(p.delta, 0.5 * p.gamma) / (p.gamma * p.d);
    let c_cross = -i * k * e_iphi(p) / 2.0;
    let mut m = SMatrix::zeros();
    put_block(&mut m, 0, 0, block_linear(c_ll));
    put_block(&mut m, 0, 2, block_linear(c_cross));
    put_block(&mut m, 2, 2, block_linear(c_aa));
    put_block(&mut m, 2, 0, block_linear(c_cross));
    m
}

fn dimensionless_gain_coeff(p: &EnsembleParams, k: f64) -> SMatrix<f64, 4, 4> {
    let i = Complex64::i();
    let stark = -i * k * k * p.delta / (p.gamma * p.d);
    let c_cross = -i * k * e_iphi(p) / 2.0;
    let mut m = SMatrix::zeros();
    put_block(&mut m, 0, 2, block_conj(c_cross));
    put_block(&mut m, 2, 2, block_linear(stark));
    put_block(&mut m, 2, 0, block_conj(c_cross));
    m
}

fn dimensionless_faraday_coeff(p: &EnsembleParams, k: f64) -> SMatrix<f64, 4, 4> {
    let denom = 4.0 * p.delta * p.delta + p.gamma * p.gamma;
    // the light rescaling carries a sign, mirrored here so that mapping a
    // physical integration into (s, v) and integrating there agree exactly
    let coupling = -k * 2.0 * p.delta / denom.sqrt();
    // momentum cross terms, suppressed by gamma/2Delta but kept so the two
    // coordinate systems agree to solver precision
    let cross = k * p.gamma / denom.sqrt();
    let b_l = p.d * p.gamma * p.gamma / (4.0 * denom);
    let b_a = k * k / (2.0 * p.d);
    let mut m = SMatrix::zeros();
    m[(0, 3)] = coupling;
    m[(0, 0)] = -b_l;
    m[(1, 3)] = cross;
    m[(1, 1)] = -b_l;
    m[(2, 1)] = coupling;
    m[(2, 2)] = -b_a;
    m[(3, 1)] = cross;
    m[(3, 3)] = -b_a;
    m
}
