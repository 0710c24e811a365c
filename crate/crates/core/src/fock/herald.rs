use nalgebra::DMatrix;
use num_complex::Complex64;

use super::density::{DensityMatrix, DensityTwoQubit};
use super::state::FockVec;
use super::two_mode::TwoModeFock;
use crate::error::{Error, Result};

/// Which beam-splitter output the herald click is required on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectorPort {
    Plus,
    Minus,
}

/// Number-resolving detector with finite efficiency and Poissonian dark
/// counts (mean per detection window).
#[derive(Debug, Clone, Copy)]
pub struct DetectorModel {
    pub efficiency: f64,
    pub dark_mean: f64,
}

impl DetectorModel {
    pub fn ideal() -> Self {
        DetectorModel {
            efficiency: 1.0,
            dark_mean: 0.0,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.efficiency) {
            return Err(Error::LossOutOfRange {
                value: self.efficiency,
            });
        }
        if self.dark_mean < 0.0 {
            return Err(Error::InvalidArgument("dark rate must be >= 0".into()));
        }
        Ok(())
    }

    /// P(detector registers exactly `clicks` | `n` photons incident).
    fn p_reading(&self, clicks: usize, n: usize) -> f64 {
        let eta = self.efficiency;
        let mut acc = 0.0;
        for k in 0..=clicks.min(n) {
            acc += binom_pmf(k, n, eta) * poisson_pmf(clicks - k, self.dark_mean);
        }
        acc
    }
}

fn binom_pmf(k: usize, n: usize, p: f64) -> f64 {
    let mut c = 1.0;
    for j in 0..k {
        c *= (n - j) as f64 / (k - j) as f64;
    }
    c * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32)
}

fn poisson_pmf(k: usize, lambda: f64) -> f64 {
    if lambda == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let mut fact = 1.0;
    for j in 2..=k {
        fact *= j as f64;
    }
    (-lambda).exp() * lambda.powi(k as i32) / fact
}

/// Result of a heralding step.
#[derive(Debug, Clone)]
pub struct HeraldOutcome {
    /// Probability of the required click pattern.
    pub success_probability: f64,
    /// Heralded state truncated to the two-qubit subspace.
    pub qubit: DensityTwoQubit,
    /// Weight discarded by the qubit truncation.
    pub discarded_weight: f64,
    /// Full heralded density over the two remaining (atomic) modes.
    pub atoms: DensityMatrix,
}

/// Interfere the photon modes of two write states on a 50/50 beam splitter
/// and condition on a single click at `port` (nothing at the other port).
///
/// Returns the heralded two-ensemble state; ideally `(|01> ± |10>)/√2`.
pub fn herald_entangle(
    write1: &TwoModeFock,
    write2: &TwoModeFock,
    port: DetectorPort,
    detector: &DetectorModel,
) -> Result<HeraldOutcome> {
    detector.validate()?;
    if write1.cutoff() != write2.cutoff() {
        return Err(Error::DimensionMismatch("write states need equal cutoffs".into()));
    }
    let cutoff = write1.cutoff();
    // modes: [atom1, photon1, atom2, photon2]
    let joint = write1.to_fock_vec().tensor(&write2.to_fock_vec())?;
    let mixed = joint.beam_splitter_5050(1, 3)?; // mode 1 -> plus, mode 3 -> minus
    let (plus_mode, minus_mode) = (1usize, 3usize);
    let (click_mode, silent_mode) = match port {
        DetectorPort::Plus => (plus_mode, minus_mode),
        DetectorPort::Minus => (minus_mode, plus_mode),
    };

    let mut atoms = DensityMatrix::zeros(2, cutoff);
    let mut success = 0.0;
    for n_click in 0..=cutoff {
        let after_click = mixed.project_number(click_mode, n_click);
        // silent mode index shifts down if it sat above the removed mode
        let silent_idx = if silent_mode > click_mode {
            silent_mode - 1
        } else {
            silent_mode
        };
        for n_silent in 0..=cutoff {
            let w = detector.p_reading(1, n_click) * detector.p_reading(0, n_silent);
            if w == 0.0 {
                continue;
            }
            let atomic = after_click.project_number(silent_idx, n_silent);
            let p = atomic.norm_sq();
            if p == 0.0 {
                continue;
            }
            atoms.add_pure(&atomic, w);
            success += w * p;
        }
    }
    if success <= 0.0 {
        return Err(Error::ZeroSuccessProbability(
            "required click pattern cannot occur".into(),
        ));
    }
    atoms.scale(1.0 / success);
    let (qubit, discarded_weight) = atoms.to_two_qubit()?;
    Ok(HeraldOutcome {
        success_probability: success,
        qubit,
        discarded_weight,
        atoms,
    })
}

/// Beam-splitter unitary on the two-mode subspace, built from the pure-state
/// implementation.
fn bs_matrix(cutoff: usize) -> Result<DMatrix<Complex64>> {
    let base = cutoff + 1;
    let dim = base * base;
    let mut u = DMatrix::zeros(dim, dim);
    for m in 0..base {
        for n in 0..base {
            if m + n > cutoff {
                // leave out-of-range columns as identity; they never carry
                // weight in the protocols below
                u[(m + base * n, m + base * n)] = Complex64::new(1.0, 0.0);
                continue;
            }
            let mut basis = FockVec::vacuum(2, cutoff);
            basis.set_amplitude(&[0, 0], Complex64::default());
            basis.set_amplitude(&[m, n], Complex64::new(1.0, 0.0));
            let out = basis.beam_splitter_5050(0, 1)?;
            for (occ, a) in out.iter_amps() {
                u[(occ[0] + base * occ[1], m + base * n)] = a;
            }
        }
    }
    Ok(u)
}

/// Loss (transmission `eta`) Kraus set on one mode.
fn loss_kraus(cutoff: usize, eta: f64) -> Vec<DMatrix<Complex64>> {
    let base = cutoff + 1;
    (0..base)
        .map(|l| {
            let mut k = DMatrix::zeros(base, base);
            for n in l..base {
                let mut c = 1.0;
                for j in 0..l {
                    c *= (n - j) as f64 / (l - j) as f64;
                }
                k[(n - l, n)] =
                    Complex64::new((c * eta.powi((n - l) as i32) * (1.0 - eta).powi(l as i32)).sqrt(), 0.0);
            }
            k
        })
        .collect()
}

/// Extend entanglement by reading the inner ensembles of two heralded pairs
/// onto photons (with `read_efficiency`), interfering them and conditioning
/// on a single click at `port`. Inputs are densities over modes `(A, B)`
/// and `(C, D)`; the outer pair `(A, D)` is returned.
pub fn entanglement_swap(
    pair_ab: &DensityMatrix,
    pair_cd: &DensityMatrix,
    read_efficiency: f64,
    port: DetectorPort,
) -> Result<HeraldOutcome> {
    if !(0.0..=1.0).contains(&read_efficiency) {
        return Err(Error::LossOutOfRange {
            value: read_efficiency,
        });
    }
    if pair_ab.n_modes() != 2 || pair_cd.n_modes() != 2 {
        return Err(Error::DimensionMismatch("pairs must be two-mode densities".into()));
    }
    let cutoff = pair_ab.cutoff();
    // modes: [A, B, C, D]
    let mut rho = pair_ab.tensor(pair_cd)?;
    // readout: excitations in B and C become photons, attenuated
    if read_efficiency < 1.0 {
        let kraus = loss_kraus(cutoff, read_efficiency);
        rho = rho.apply_kraus_set(1, &kraus);
        rho = rho.apply_kraus_set(2, &kraus);
    }
    let u = bs_matrix(cutoff)?;
    let rho = rho.apply_two_mode_unitary(1, 2, &u);
    // B carries the plus port, C the minus port
    let want = |n_plus: usize, n_minus: usize| -> f64 {
        let (click, silent) = match port {
            DetectorPort::Plus => (n_plus, n_minus),
            DetectorPort::Minus => (n_minus, n_plus),
        };
        if click == 1 && silent == 0 {
            1.0
        } else {
            0.0
        }
    };
    let (success, mut outer) = rho.number_povm_two_modes(1, 2, want);
    if success <= 0.0 {
        return Err(Error::ZeroSuccessProbability(
            "swap click pattern cannot occur".into(),
        ));
    }
    outer.scale(1.0 / success);
    let (qubit, discarded_weight) = outer.to_two_qubit()?;
    Ok(HeraldOutcome {
        success_probability: success,
        qubit,
        discarded_weight,
        atoms: outer,
    })
}
