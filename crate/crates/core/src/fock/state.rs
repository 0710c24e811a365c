use num_complex::Complex64;

use crate::error::{Error, Result};

/// Pure state of `n_modes` bosonic modes, each truncated at `cutoff`
/// photons, stored as a dense amplitude tensor.
#[derive(Debug, Clone)]
pub struct FockVec {
    n_modes: usize,
    cutoff: usize,
    amps: Vec<Complex64>,
}

fn binom(n: usize, k: usize) -> f64 {
    let mut acc = 1.0;
    for j in 0..k {
        acc *= (n - j) as f64 / (k - j) as f64;
    }
    acc
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

impl FockVec {
    pub fn vacuum(n_modes: usize, cutoff: usize) -> Self {
        let dim = (cutoff + 1).pow(n_modes as u32);
        let mut amps = vec![Complex64::default(); dim];
        amps[0] = Complex64::new(1.0, 0.0);
        FockVec {
            n_modes,
            cutoff,
            amps,
        }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim_per_mode(&self) -> usize {
        self.cutoff + 1
    }

    fn index(&self, occ: &[usize]) -> usize {
        debug_assert_eq!(occ.len(), self.n_modes);
        let base = self.cutoff + 1;
        occ.iter().rev().fold(0, |acc, &n| acc * base + n)
    }

    fn occupation(&self, mut idx: usize, out: &mut [usize]) {
        let base = self.cutoff + 1;
        for slot in out.iter_mut() {
            *slot = idx % base;
            idx /= base;
        }
    }

    pub fn amplitude(&self, occ: &[usize]) -> Complex64 {
        self.amps[self.index(occ)]
    }

    pub fn set_amplitude(&mut self, occ: &[usize], a: Complex64) {
        let idx = self.index(occ);
        self.amps[idx] = a;
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm_sq().sqrt();
        if n < 1e-300 {
            return Err(Error::ZeroSuccessProbability("null state vector".into()));
        }
        for a in &mut self.amps {
            *a /= n;
        }
        Ok(())
    }

    /// Tensor product `self ⊗ other` (modes of `other` appended).
    pub fn tensor(&self, other: &FockVec) -> Result<FockVec> {
        if other.cutoff != self.cutoff {
            return Err(Error::DimensionMismatch(
                "tensor product requires equal cutoffs".into(),
            ));
        }
        let mut out = FockVec::vacuum(self.n_modes + other.n_modes, self.cutoff);
        out.amps.fill(Complex64::default());
        let d_self = self.amps.len();
        for (j, &b) in other.amps.iter().enumerate() {
            if b == Complex64::default() {
                continue;
            }
            for (i, &a) in self.amps.iter().enumerate() {
                out.amps[j * d_self + i] = a * b;
            }
        }
        Ok(out)
    }

    /// 50/50 beam splitter mixing modes `i` and `j` (Hadamard convention):
    /// `a_i† -> (a_i† + a_j†)/√2`, `a_j† -> (a_i† - a_j†)/√2`.
    ///
    /// Photon number is conserved exactly; components pushed past the
    /// cutoff are an error.
    pub fn beam_splitter_5050(&self, i: usize, j: usize) -> Result<FockVec> {
        if i == j || i >= self.n_modes || j >= self.n_modes {
            return Err(Error::InvalidArgument("bad beam-splitter modes".into()));
        }
        let mut out = self.clone();
        out.amps.fill(Complex64::default());
        let mut occ = vec![0usize; self.n_modes];
        let inv_sqrt2 = 1.0 / 2.0_f64.sqrt();
        let mut dropped = 0.0_f64;
        for (idx, &a) in self.amps.iter().enumerate() {
            if a == Complex64::default() {
                continue;
            }
            self.occupation(idx, &mut occ);
            let (m, n) = (occ[i], occ[j]);
            if m + n > self.cutoff {
                // mixing can push photons past the cutoff; only negligible
                // weight may be discarded
                dropped += a.norm_sqr();
                if dropped > 1e-7 {
                    return Err(Error::TruncationTail {
                        tail: dropped,
                        limit: 1e-7,
                    });
                }
                continue;
            }
            // expand (a_i'† + a_j'†)^m (a_i'† - a_j'†)^n
            let pref = a * inv_sqrt2.powi((m + n) as i32)
                / (factorial(m) * factorial(n)).sqrt();
            for p in 0..=m {
                for q in 0..=n {
                    let up = p + q; // photons in output mode i
                    let down = m + n - up;
                    let sign = if (n - q) % 2 == 0 { 1.0 } else { -1.0 };
                    let coeff = binom(m, p)
                        * binom(n, q)
                        * sign
                        * (factorial(up) * factorial(down)).sqrt();
                    let mut occ_out = occ.clone();
                    occ_out[i] = up;
                    occ_out[j] = down;
                    let t = self.index(&occ_out);
                    out.amps[t] += pref * coeff;
                }
            }
        }
        Ok(out)
    }

    /// Photon-number distribution of one mode (marginal over the rest).
    pub fn number_distribution(&self, mode: usize) -> Vec<f64> {
        let mut p = vec![0.0; self.cutoff + 1];
        let mut occ = vec![0usize; self.n_modes];
        for (idx, a) in self.amps.iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            self.occupation(idx, &mut occ);
            p[occ[mode]] += a.norm_sqr();
        }
        p
    }

    /// Project a mode onto photon number `n`, removing the mode.
    /// Returns the unnormalized remainder (its norm² is the probability).
    pub fn project_number(&self, mode: usize, n: usize) -> FockVec {
        let mut out = FockVec::vacuum(self.n_modes - 1, self.cutoff);
        out.amps.fill(Complex64::default());
        let mut occ = vec![0usize; self.n_modes];
        for (idx, &a) in self.amps.iter().enumerate() {
            if a == Complex64::default() {
                continue;
            }
            self.occupation(idx, &mut occ);
            if occ[mode] != n {
                continue;
            }
            let reduced: Vec<usize> = occ
                .iter()
                .enumerate()
                .filter(|&(m, _)| m != mode)
                .map(|(_, &o)| o)
                .collect();
            let t = out.index(&reduced);
            out.amps[t] += a;
        }
        out
    }

    /// Iterate over non-zero basis amplitudes as `(occupation, amplitude)`.
    pub fn iter_amps(&self) -> impl Iterator<Item = (Vec<usize>, Complex64)> + '_ {
        self.amps.iter().enumerate().filter_map(move |(idx, &a)| {
            if a == Complex64::default() {
                None
            } else {
                let mut occ = vec![0usize; self.n_modes];
                self.occupation(idx, &mut occ);
                Some((occ, a))
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn single_photon_splits_symmetrically() {
        let mut st = FockVec::vacuum(2, 3);
        st.set_amplitude(&[0, 0], Complex64::default());
        st.set_amplitude(&[1, 0], Complex64::new(1.0, 0.0));
        let out = st.beam_splitter_5050(0, 1).unwrap();
        let r = 1.0 / 2.0_f64.sqrt();
        assert_abs_diff_eq!(out.amplitude(&[1, 0]).re, r, epsilon = 1e-12);
        assert_abs_diff_eq!(out.amplitude(&[0, 1]).re, r, epsilon = 1e-12);
    }

    #[test]
    fn hong_ou_mandel_dip() {
        // |11> in -> photons bunch: no coincidence term
        let mut st = FockVec::vacuum(2, 4);
        st.set_amplitude(&[0, 0], Complex64::default());
        st.set_amplitude(&[1, 1], Complex64::new(1.0, 0.0));
        let out = st.beam_splitter_5050(0, 1).unwrap();
        assert_abs_diff_eq!(out.amplitude(&[1, 1]).norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(out.amplitude(&[2, 0]).norm_sqr(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(out.amplitude(&[0, 2]).norm_sqr(), 0.5, epsilon = 1e-12);
        // photon number conserved, norm preserved
        assert_abs_diff_eq!(out.norm_sq(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn beam_splitter_is_unitary_on_random_state() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(3);
        let mut st = FockVec::vacuum(2, 5);
        for m in 0..=2usize {
            for n in 0..=2usize {
                st.set_amplitude(
                    &[m, n],
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                );
            }
        }
        st.normalize().unwrap();
        let out = st.beam_splitter_5050(0, 1).unwrap();
        assert_abs_diff_eq!(out.norm_sq(), 1.0, epsilon = 1e-12);
        // total photon number distribution is conserved
        let total = |s: &FockVec| -> f64 {
            s.iter_amps()
                .map(|(occ, a)| (occ[0] + occ[1]) as f64 * a.norm_sqr())
                .sum()
        };
        assert_abs_diff_eq!(total(&st), total(&out), epsilon = 1e-12);
    }

    #[test]
    fn projection_extracts_component() {
        let mut st = FockVec::vacuum(2, 2);
        st.set_amplitude(&[0, 0], Complex64::new(0.8, 0.0));
        st.set_amplitude(&[1, 1], Complex64::new(0.6, 0.0));
        let proj = st.project_number(1, 1);
        assert_abs_diff_eq!(proj.norm_sq(), 0.36, epsilon = 1e-12);
        assert_abs_diff_eq!(proj.amplitude(&[1]).re, 0.6, epsilon = 1e-12);
    }
}
