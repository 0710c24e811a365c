//! Rescaling between physical `(z, t)` and dimensionless `(s, v)`
//! coordinates, `s = z/L`, `v = h(0,t)/h(0,T)`; field operators are
//! renormalized so delta commutators survive the change of variables:
//!
//! `ã_A(s) = sqrt(L) a_A(z)`,
//! `ã_L(v) = -κ sqrt(4Δ²+γ²) / (sqrt(dγ) Ω(t)) a_L(t)`.

use num_complex::Complex64;

use super::grid::{Coords, PulseGrid};
use super::kernel::h_function;
use crate::couplings::EnsembleParams;
use crate::error::{Error, Result};

fn light_scale(p: &EnsembleParams, kappa: f64, t: f64) -> Result<Complex64> {
    let omega = p.rabi.omega(t);
    if omega == 0.0 {
        return Err(Error::InvalidArgument(format!(
            "drive vanishes at t = {t}; the rescaling is singular there"
        )));
    }
    let denom = (4.0 * p.delta * p.delta + p.gamma * p.gamma).sqrt();
    Ok(Complex64::from(
        -kappa * denom / ((p.d * p.gamma).sqrt() * omega),
    ))
}

/// Map a physical grid to `(s, v)` coordinates. Node positions become the
/// images of the physical nodes (generally non-uniform in `v`), and the
/// physical times are retained so the transform inverts exactly.
pub fn to_dimensionless(grid: &PulseGrid, p: &EnsembleParams) -> Result<PulseGrid> {
    if grid.coords != Coords::Physical {
        return Err(Error::InvalidArgument("grid is already dimensionless".into()));
    }
    grid.validate()?;
    let t_total = grid.duration();
    let h_total = h_function(p, 0.0, t_total)?;
    if h_total <= 0.0 {
        return Err(Error::InvalidArgument("h(0,T) must be positive".into()));
    }
    let kappa = h_total.sqrt();
    let length = grid.length();
    let ss: Vec<f64> = grid.zs.iter().map(|&z| z / length).collect();
    let mut vs = Vec::with_capacity(grid.ts.len());
    for &t in &grid.ts {
        vs.push(h_function(p, 0.0, t)? / h_total);
    }
    for w in vs.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::InvalidArgument(
                "v(t) must be strictly increasing; drive vanishes on an interval".into(),
            ));
        }
    }
    let mut light = Vec::with_capacity(grid.ts.len());
    for (j, &t) in grid.ts.iter().enumerate() {
        light.push(light_scale(p, kappa, t)? * grid.light[j]);
    }
    let spin: Vec<Complex64> = grid.spin.iter().map(|&a| a * length.sqrt()).collect();
    Ok(PulseGrid {
        coords: Coords::Dimensionless,
        zs: ss,
        ts: vs,
        light,
        spin,
        time_map: Some(grid.ts.clone()),
    })
}

/// Inverse of [`to_dimensionless`]; requires the stored time map.
pub fn from_dimensionless(grid: &PulseGrid, p: &EnsembleParams) -> Result<PulseGrid> {
    if grid.coords != Coords::Dimensionless {
        return Err(Error::InvalidArgument("grid is not dimensionless".into()));
    }
    let ts = grid
        .time_map
        .clone()
        .ok_or_else(|| Error::InvalidArgument("dimensionless grid lacks its time map".into()))?;
    if ts.len() != grid.ts.len() {
        return Err(Error::DimensionMismatch("time map vs v nodes".into()));
    }
    let t_total = ts[ts.len() - 1] - ts[0];
    let h_total = h_function(p, ts[0], ts[0] + t_total)?;
    let kappa = h_total.sqrt();
    // the s axis spans [0, 1]; infer L from the stored physical scale of the
    // spin normalization: ã_A = sqrt(L) a_A with s = z / L
    let length = p.length;
    let zs: Vec<f64> = grid.zs.iter().map(|&s| s * length).collect();
    let mut light = Vec::with_capacity(ts.len());
    for (j, &t) in ts.iter().enumerate() {
        light.push(grid.light[j] / light_scale(p, kappa, t)?);
    }
    let spin: Vec<Complex64> = grid.spin.iter().map(|&a| a / length.sqrt()).collect();
    Ok(PulseGrid {
        coords: Coords::Physical,
        zs,
        ts,
        light,
        spin,
        time_map: None,
    })
}
