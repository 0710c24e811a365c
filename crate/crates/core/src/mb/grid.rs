use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Coords {
    /// Physical `(z, t)` in meters / seconds, co-moving frame.
    Physical,
    /// Rescaled `(s, v)` with `s = z/L`, `v = h(0,t)/h(0,T)`.
    Dimensionless,
}

/// Discretized boundary data of one integration: the light amplitude on the
/// time axis (photon-flux normalization) and the spin-wave amplitude on the
/// space axis. Before integration these are the input faces (`z = 0`,
/// `t = 0`); integrators return a grid holding the output faces.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PulseGrid {
    pub coords: Coords,
    /// Node positions along z (or s); `nz + 1` entries, ascending.
    pub zs: Vec<f64>,
    /// Node positions along t (or v); `nt + 1` entries, ascending.
    pub ts: Vec<f64>,
    /// `a_L` on the light face, one value per time node.
    pub light: Vec<Complex64>,
    /// `a_A` on the spin face, one value per space node.
    pub spin: Vec<Complex64>,
    /// For dimensionless grids: the physical time of each `v` node, kept so
    /// the transform inverts exactly.
    pub time_map: Option<Vec<f64>>,
}

impl PulseGrid {
    /// Uniform empty grid over `[0, length] x [0, duration]`.
    pub fn uniform(nz: usize, nt: usize, length: f64, duration: f64) -> Result<Self> {
        if nz < 2 || nt < 2 || length <= 0.0 || duration <= 0.0 {
            return Err(Error::InvalidArgument("bad grid extents".into()));
        }
        Ok(PulseGrid {
            coords: Coords::Physical,
            zs: (0..=nz).map(|i| length * i as f64 / nz as f64).collect(),
            ts: (0..=nt).map(|j| duration * j as f64 / nt as f64).collect(),
            light: vec![Complex64::default(); nt + 1],
            spin: vec![Complex64::default(); nz + 1],
            time_map: None,
        })
    }

    pub fn nz(&self) -> usize {
        self.zs.len() - 1
    }

    pub fn nt(&self) -> usize {
        self.ts.len() - 1
    }

    pub fn length(&self) -> f64 {
        self.zs[self.zs.len() - 1] - self.zs[0]
    }

    pub fn duration(&self) -> f64 {
        self.ts[self.ts.len() - 1] - self.ts[0]
    }

    pub fn set_light<F: Fn(f64) -> Complex64>(&mut self, f: F) {
        for (j, t) in self.ts.iter().enumerate() {
            self.light[j] = f(*t);
        }
    }

    pub fn set_spin<F: Fn(f64) -> Complex64>(&mut self, f: F) {
        for (i, z) in self.zs.iter().enumerate() {
            self.spin[i] = f(*z);
        }
    }

    /// `∫ |a_L|² dt` over the time face (trapezoid).
    pub fn light_norm_sq(&self) -> f64 {
        trapezoid_norm(&self.ts, &self.light)
    }

    /// `∫ |a_A|² dz` over the space face (trapezoid).
    pub fn spin_norm_sq(&self) -> f64 {
        trapezoid_norm(&self.zs, &self.spin)
    }

    pub fn validate(&self) -> Result<()> {
        if self.light.len() != self.ts.len() || self.spin.len() != self.zs.len() {
            return Err(Error::DimensionMismatch("face data vs node counts".into()));
        }
        let fin = self.light.iter().all(|a| a.re.is_finite() && a.im.is_finite())
            && self.spin.iter().all(|a| a.re.is_finite() && a.im.is_finite());
        if !fin || !self.light_norm_sq().is_finite() || !self.spin_norm_sq().is_finite() {
            return Err(Error::InvalidArgument("non-finite field data".into()));
        }
        Ok(())
    }
}

fn trapezoid_norm(xs: &[f64], vals: &[Complex64]) -> f64 {
    let mut acc = 0.0;
    for k in 0..xs.len() - 1 {
        let dx = xs[k + 1] - xs[k];
        acc += 0.5 * dx * (vals[k].norm_sqr() + vals[k + 1].norm_sqr());
    }
    acc
}

/// Complex inner product `∫ u*(x) f(x) dx` of a field with a mode function
/// sampled on the same nodes. The mode must be normalized.
pub fn mode_overlap(xs: &[f64], field: &[Complex64], mode: &[Complex64]) -> Result<Complex64> {
    if field.len() != xs.len() || mode.len() != xs.len() {
        return Err(Error::DimensionMismatch("field/mode vs nodes".into()));
    }
    let mode_norm = trapezoid_norm(xs, mode);
    if (mode_norm - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidArgument(format!(
            "mode function norm² = {mode_norm}, expected 1"
        )));
    }
    let mut acc = Complex64::default();
    for k in 0..xs.len() - 1 {
        let dx = xs[k + 1] - xs[k];
        acc += 0.5 * dx * (mode[k].conj() * field[k] + mode[k + 1].conj() * field[k + 1]);
    }
    Ok(acc)
}

/// Normalize a sampled mode function to unit L2 norm.
pub fn normalize_mode(xs: &[f64], mode: &mut [Complex64]) -> Result<()> {
    let n = trapezoid_norm(xs, mode);
    if n <= 0.0 {
        return Err(Error::InvalidArgument("cannot normalize a null mode".into()));
    }
    let s = 1.0 / n.sqrt();
    for a in mode {
        *a *= s;
    }
    Ok(())
}
