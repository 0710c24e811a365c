use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::linalg;
use crate::error::{Error, Result};

/// Gaussian channel `cov -> S cov S^T + N`, `mean -> S mean + disp`.
///
/// Complete positivity requires `N + (i/2)(Omega - S Omega S^T) >= 0`; a
/// noiseless channel must therefore be exactly symplectic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianChannel {
    s: DMatrix<f64>,
    disp: DVector<f64>,
    noise: DMatrix<f64>,
}

impl GaussianChannel {
    /// Build and validate a general channel.
    pub fn new(s: DMatrix<f64>, disp: DVector<f64>, noise: DMatrix<f64>) -> Result<Self> {
        let dim = s.nrows();
        if dim % 2 != 0 || s.ncols() != dim || disp.len() != dim || noise.nrows() != dim {
            return Err(Error::DimensionMismatch(format!(
                "S {}x{}, disp {}, N {}x{}",
                s.nrows(),
                s.ncols(),
                disp.len(),
                noise.nrows(),
                noise.ncols()
            )));
        }
        if linalg::asymmetry(&noise) > 1e-10 {
            return Err(Error::InvalidArgument("noise matrix must be symmetric".into()));
        }
        let ch = GaussianChannel { s, disp, noise };
        ch.check_cp()?;
        Ok(ch)
    }

    /// Lossless channel from a symplectic matrix.
    pub fn symplectic(s: DMatrix<f64>) -> Result<Self> {
        let defect = linalg::symplectic_defect(&s);
        let scale = s.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
        if defect > 1e-10 * scale * scale {
            return Err(Error::InvalidArgument(format!(
                "matrix is not symplectic (defect {defect:.3e})"
            )));
        }
        let dim = s.nrows();
        Ok(GaussianChannel {
            s,
            disp: DVector::zeros(dim),
            noise: DMatrix::zeros(dim, dim),
        })
    }

    pub fn identity(n_modes: usize) -> Self {
        let dim = 2 * n_modes;
        GaussianChannel {
            s: DMatrix::identity(dim, dim),
            disp: DVector::zeros(dim),
            noise: DMatrix::zeros(dim, dim),
        }
    }

    /// Pure displacement channel.
    pub fn displace(disp_vec: DVector<f64>) -> Self {
        let dim = disp_vec.len();
        GaussianChannel {
            s: DMatrix::identity(dim, dim),
            disp: disp_vec,
            noise: DMatrix::zeros(dim, dim),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.s.nrows() / 2
    }

    pub fn linear(&self) -> &DMatrix<f64> {
        &self.s
    }

    pub fn displacement(&self) -> &DVector<f64> {
        &self.disp
    }

    pub fn noise(&self) -> &DMatrix<f64> {
        &self.noise
    }

    /// Deviation of the linear part from symplecticity.
    pub fn symplectic_defect(&self) -> f64 {
        linalg::symplectic_defect(&self.s)
    }

    /// Complete-positivity check: `N + (i/2)(Omega - S Omega S^T) >= 0`.
    pub fn check_cp(&self) -> Result<()> {
        let n = self.n_modes();
        let omega = linalg::symplectic_form(n);
        let b = (&omega - &self.s * &omega * self.s.transpose()) * 0.5;
        let min_eig = linalg::min_eig_hermitian(&self.noise, &b);
        if min_eig < -1e-9 {
            return Err(Error::NotCompletelyPositive { min_eig });
        }
        Ok(())
    }

    /// `other` after `self` (composition `other . self`).
    pub fn then(&self, other: &GaussianChannel) -> Result<GaussianChannel> {
        if other.n_modes() != self.n_modes() {
            return Err(Error::DimensionMismatch(
                "composing channels of different sizes".into(),
            ));
        }
        let s = &other.s * &self.s;
        let disp = &other.s * &self.disp + &other.disp;
        let noise = &other.s * &self.noise * other.s.transpose() + &other.noise;
        Ok(GaussianChannel { s, disp, noise })
    }

    /// Attenuate each of the listed modes with transmission `1 - loss` and
    /// admix vacuum, i.e. a beam-splitter loss on those modes.
    pub fn attenuate(n_modes: usize, losses: &[(usize, f64)]) -> Result<GaussianChannel> {
        let dim = 2 * n_modes;
        let mut s = DMatrix::identity(dim, dim);
        let mut noise = DMatrix::zeros(dim, dim);
        for &(mode, loss) in losses {
            if !(0.0..=1.0).contains(&loss) {
                return Err(Error::LossOutOfRange { value: loss });
            }
            let t = (1.0 - loss).sqrt();
            for q in 0..2 {
                let i = 2 * mode + q;
                s[(i, i)] = t;
                noise[(i, i)] = loss * 0.5;
            }
        }
        GaussianChannel::new(s, DVector::zeros(dim), noise)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::GaussianState;
    use approx::assert_abs_diff_eq;

    #[test]
    fn identity_preserves_vacuum() {
        let st = GaussianState::vacuum(2);
        let out = st.apply_channel(&GaussianChannel::identity(2)).unwrap();
        assert_eq!(out, st);
    }

    #[test]
    fn non_symplectic_noiseless_rejected() {
        let mut s = DMatrix::identity(2, 2);
        s[(0, 0)] = 0.9; // pure damping without noise is not CP
        let r = GaussianChannel::new(s, DVector::zeros(2), DMatrix::zeros(2, 2));
        assert!(matches!(r, Err(Error::NotCompletelyPositive { .. })));
    }

    #[test]
    fn attenuation_is_cp_and_contracts_mean() {
        let ch = GaussianChannel::attenuate(1, &[(0, 0.19)]).unwrap();
        ch.check_cp().unwrap();
        let st = GaussianState::prepare(1, &[(2.0, 0.0)], &[]).unwrap();
        let out = st.apply_channel(&ch).unwrap();
        assert_abs_diff_eq!(
            out.mean_of("m0", crate::gaussian::Quadrature::X).unwrap(),
            2.0 * (0.81f64).sqrt(),
            epsilon = 1e-12
        );
        // vacuum stays vacuum under loss
        assert_abs_diff_eq!(
            out.var_of("m0", crate::gaussian::Quadrature::X).unwrap(),
            0.5 * 0.81 + 0.19 * 0.5,
            epsilon = 1e-12
        );
    }
}
