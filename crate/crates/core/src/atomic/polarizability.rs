//! Irreducible-tensor decomposition of the ground-level polarizability:
//! scalar, vector and rank-2 weights `a0(Δ)`, `a1(Δ)`, `a2(Δ)` as sums over
//! the excited hyperfine manifold with `1/(1 - δ_F'/Δ)` resonance weights.

use serde::{Deserialize, Serialize};

use super::wigner::{wigner_6j, HalfInt};
use crate::error::{Error, Result};

/// Ground/excited level layout of one alkali line.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LevelSpec {
    /// Ground hyperfine spin F.
    pub f: f64,
    /// Nuclear spin I.
    pub i: f64,
    /// Ground electronic angular momentum J (1/2 for alkali).
    pub j: f64,
    /// Excited electronic angular momentum J' (3/2 on the D2 line).
    pub j_prime: f64,
    /// Excited hyperfine offsets `δ_F' = Δ_{F+1} - Δ_F'` (rad/s), one entry
    /// per allowed F' in ascending F'.
    pub delta_fprime: Vec<(f64, f64)>,
}

impl LevelSpec {
    /// Build a level spec, listing offsets for each allowed `F'`.
    pub fn new(f: f64, i: f64, j: f64, j_prime: f64, offsets: &[(f64, f64)]) -> Result<Self> {
        for &(fp, _) in offsets {
            HalfInt::from_f64(fp)?;
            if fp < (f - 1.0).abs() - 1e-9 || fp > f + 1.0 + 1e-9 {
                return Err(Error::InvalidArgument(format!(
                    "F' = {fp} violates |F-1| <= F' <= F+1 for F = {f}"
                )));
            }
        }
        for v in [f, i, j, j_prime] {
            HalfInt::from_f64(v)?;
        }
        Ok(LevelSpec {
            f,
            i,
            j,
            j_prime,
            delta_fprime: offsets.to_vec(),
        })
    }

    /// Cs D2 line (`6S_1/2 F=4 -> 6P_3/2`), hyperfine offsets in rad/s.
    pub fn cesium_d2_f4() -> Self {
        let tau = 2.0 * std::f64::consts::PI;
        LevelSpec::new(
            4.0,
            3.5,
            0.5,
            1.5,
            &[
                (3.0, tau * 452.24e6),
                (4.0, tau * 251.09e6),
                (5.0, 0.0),
            ],
        )
        .unwrap()
    }

    /// Spin-1/2 ground state without nuclear spin (I = 0), where the rank-2
    /// component vanishes identically.
    pub fn spin_half_i0() -> Self {
        LevelSpec::new(0.5, 0.0, 0.5, 1.5, &[(0.5, 1.0e8), (1.5, 0.0)]).unwrap()
    }
}

/// Decomposition weights at one detuning.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TensorCoeffs {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
}

fn sign_pow(x: f64) -> Result<f64> {
    let r = x.round();
    if (x - r).abs() > 1e-6 {
        return Err(Error::BadHalfInteger(format!(
            "phase exponent {x} is not an integer"
        )));
    }
    Ok(if (r as i64).rem_euclid(2) == 0 { 1.0 } else { -1.0 })
}

fn ck(k: usize, f: f64, i: f64) -> f64 {
    match k {
        0 => 1.0,
        1 => (2.0 / (f * (f + 1.0))).sqrt(),
        2 => {
            if i == 0.0 {
                0.0
            } else {
                -3.0 / (10.0 * f * (f + 1.0) * (2.0 * f - 1.0) * (2.0 * f + 3.0)).sqrt()
            }
        }
        _ => unreachable!(),
    }
}

fn a_k_at(spec: &LevelSpec, k: usize, delta: f64) -> Result<f64> {
    let c = ck(k, spec.f, spec.i);
    if c == 0.0 {
        return Ok(0.0);
    }
    let mut sum = 0.0;
    for &(fp, dfp) in &spec.delta_fprime {
        let weight_den = 1.0 - dfp / delta;
        if weight_den.abs() < 1e-12 {
            return Err(Error::ResonancePole {
                fprime: format!("F' = {fp}"),
            });
        }
        let six_a = wigner_6j(spec.j_prime, fp, spec.i, spec.f, spec.j, 1.0)?;
        let six_b = wigner_6j(spec.f, k as f64, spec.f, 1.0, fp, 1.0)?;
        let sign = sign_pow(1.0 + spec.f + fp)?;
        sum += sign / weight_den * (2.0 * fp + 1.0) * six_a * six_a * six_b;
    }
    Ok(c * (2.0 * k as f64 + 1.0) * ((2.0 * spec.f + 1.0) / 3.0).sqrt() * sum)
}

/// Evaluate `(a0, a1, a2)` at detuning `delta` (rad/s) from the uppermost
/// excited level. Exact resonances `Δ = δ_F'` are rejected, naming the
/// offending level.
pub fn polarizability_coeffs(spec: &LevelSpec, delta: f64) -> Result<TensorCoeffs> {
    if delta == 0.0 {
        return Err(Error::ResonancePole {
            fprime: "F' = F+1 (Δ = 0)".into(),
        });
    }
    Ok(TensorCoeffs {
        a0: a_k_at(spec, 0, delta)?,
        a1: a_k_at(spec, 1, delta)?,
        a2: a_k_at(spec, 2, delta)?,
    })
}

/// Large-detuning limits via the contracted 6j identity:
/// `a_k = (-1)^{2J+F+J'+I+k+1} c_k (2k+1) sqrt((2F+1)/3)
///        {J I F; F k J} {J J k; 1 1 J'}`.
pub fn asymptotic_coeffs(spec: &LevelSpec) -> Result<TensorCoeffs> {
    let mut out = [0.0; 3];
    for (k, slot) in out.iter_mut().enumerate() {
        let c = ck(k, spec.f, spec.i);
        if c == 0.0 {
            continue;
        }
        let sign = sign_pow(2.0 * spec.j + spec.f + spec.j_prime + spec.i + k as f64 + 1.0)?;
        let six_a = wigner_6j(spec.j, spec.i, spec.f, spec.f, k as f64, spec.j)?;
        let six_b = wigner_6j(spec.j, spec.j, k as f64, 1.0, 1.0, spec.j_prime)?;
        *slot = sign
            * c
            * (2.0 * k as f64 + 1.0)
            * ((2.0 * spec.f + 1.0) / 3.0).sqrt()
            * six_a
            * six_b;
    }
    Ok(TensorCoeffs {
        a0: out[0],
        a1: out[1],
        a2: out[2],
    })
}
