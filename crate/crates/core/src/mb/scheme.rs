//! Implicit box scheme for linear hyperbolic systems with one family of
//! fields propagating in `z` and one in `t`.
//!
//! Each grid cell couples the four corner values through the cell-centered
//! coefficient matrix; the unknown corner is obtained from a small linear
//! solve. The scheme is unconditionally stable and second-order accurate.

use nalgebra::{SMatrix, SVector};

use crate::error::{Error, Result};

/// Gaussian elimination with partial pivoting for the small per-cell
/// systems (avoids trait-bound gymnastics on const-generic LU).
fn solve_small<const N: usize>(
    mut m: SMatrix<f64, N, N>,
    mut rhs: SVector<f64, N>,
) -> Option<SVector<f64, N>> {
    for col in 0..N {
        let mut piv = col;
        for r in col + 1..N {
            if m[(r, col)].abs() > m[(piv, col)].abs() {
                piv = r;
            }
        }
        if m[(piv, col)].abs() < 1e-300 {
            return None;
        }
        if piv != col {
            m.swap_rows(piv, col);
            rhs.swap_rows(piv, col);
        }
        let d = m[(col, col)];
        for r in col + 1..N {
            let f = m[(r, col)] / d;
            if f == 0.0 {
                continue;
            }
            for c in col..N {
                m[(r, c)] -= f * m[(col, c)];
            }
            rhs[r] -= f * rhs[col];
        }
    }
    let mut x = SVector::<f64, N>::zeros();
    for r in (0..N).rev() {
        let mut acc = rhs[r];
        for c in r + 1..N {
            acc -= m[(r, c)] * x[c];
        }
        x[r] = acc / m[(r, r)];
    }
    Some(x)
}

/// Full solution of one integration: `n_fields` real components on every
/// grid node.
#[derive(Debug, Clone)]
pub struct MbSolution<const N: usize> {
    pub zs: Vec<f64>,
    pub ts: Vec<f64>,
    /// First `n_zfields` components propagate in z (light-like), the rest
    /// in t (spin-like).
    pub n_zfields: usize,
    fields: Vec<[f64; N]>,
}

impl<const N: usize> MbSolution<N> {
    fn idx(&self, i: usize, j: usize) -> usize {
        i * self.ts.len() + j
    }

    pub fn node(&self, i: usize, j: usize) -> &[f64; N] {
        &self.fields[self.idx(i, j)]
    }

    /// Field values along constant z index `i` (all times).
    pub fn t_line(&self, i: usize, component: usize) -> Vec<f64> {
        (0..self.ts.len())
            .map(|j| self.fields[self.idx(i, j)][component])
            .collect()
    }

    /// Field values along constant t index `j` (all positions).
    pub fn z_line(&self, j: usize, component: usize) -> Vec<f64> {
        (0..self.zs.len())
            .map(|i| self.fields[self.idx(i, j)][component])
            .collect()
    }
}

/// Integrate the system `∂_z u_z = (C u)_z-rows`, `∂_t u_t = (C u)_t-rows`
/// with coefficient matrix `C(z, t)`.
///
/// * `z_init[j]` supplies the z-propagating components at `z = zs[0]`,
/// * `t_init[i]` supplies the t-propagating components at `t = ts[0]`
///   (irrelevant entries of either are ignored).
pub fn integrate_box<const N: usize>(
    zs: &[f64],
    ts: &[f64],
    n_zfields: usize,
    coeff: &dyn Fn(f64, f64) -> SMatrix<f64, N, N>,
    z_init: &dyn Fn(usize) -> [f64; N],
    t_init: &dyn Fn(usize) -> [f64; N],
) -> Result<MbSolution<N>> {
    let (nz, nt) = (zs.len() - 1, ts.len() - 1);
    if nz < 1 || nt < 1 || n_zfields == 0 || n_zfields >= N {
        return Err(Error::InvalidArgument("bad box-scheme setup".into()));
    }
    let mut sol = MbSolution::<N> {
        zs: zs.to_vec(),
        ts: ts.to_vec(),
        n_zfields,
        fields: vec![[0.0; N]; (nz + 1) * (nt + 1)],
    };

    // seed boundary faces
    for j in 0..=nt {
        let v = z_init(j);
        let k = sol.idx(0, j);
        sol.fields[k][..n_zfields].copy_from_slice(&v[..n_zfields]);
    }
    for i in 0..=nz {
        let v = t_init(i);
        let k = sol.idx(i, 0);
        sol.fields[k][n_zfields..].copy_from_slice(&v[n_zfields..]);
    }

    // t = 0 line: trapezoid ODE in z for the z-fields (t-fields known)
    for i in 0..nz {
        let dz = zs[i + 1] - zs[i];
        let c = coeff(0.5 * (zs[i] + zs[i + 1]), ts[0]);
        let u0 = SVector::<f64, N>::from_column_slice(sol.node(i, 0));
        let known1 = SVector::<f64, N>::from_column_slice(sol.node(i + 1, 0));
        // (u1 - u0)/dz = C (u0 + u1)/2 restricted to z-rows; t-components of
        // u1 are already set
        let mut m = SMatrix::<f64, N, N>::identity();
        let mut rhs = u0 + (c * u0) * (dz / 2.0);
        for r in 0..n_zfields {
            for l in 0..N {
                if l < n_zfields {
                    m[(r, l)] -= dz / 2.0 * c[(r, l)];
                } else {
                    rhs[r] += dz / 2.0 * c[(r, l)] * known1[l];
                }
            }
        }
        for r in n_zfields..N {
            rhs[r] = known1[r];
        }
        let u1 = solve_small(m, rhs)
            .ok_or_else(|| Error::InvalidArgument("singular edge system".into()))?;
        let k = sol.idx(i + 1, 0);
        for r in 0..n_zfields {
            sol.fields[k][r] = u1[r];
        }
    }

    // z = 0 line: trapezoid ODE in t for the t-fields
    for j in 0..nt {
        let dt = ts[j + 1] - ts[j];
        let c = coeff(zs[0], 0.5 * (ts[j] + ts[j + 1]));
        let u0 = SVector::<f64, N>::from_column_slice(sol.node(0, j));
        let known1 = SVector::<f64, N>::from_column_slice(sol.node(0, j + 1));
        let mut m = SMatrix::<f64, N, N>::identity();
        let mut rhs = u0 + (c * u0) * (dt / 2.0);
        for r in n_zfields..N {
            for l in 0..N {
                if l >= n_zfields {
                    m[(r, l)] -= dt / 2.0 * c[(r, l)];
                } else {
                    rhs[r] += dt / 2.0 * c[(r, l)] * known1[l];
                }
            }
        }
        for r in 0..n_zfields {
            rhs[r] = known1[r];
        }
        let u1 = solve_small(m, rhs)
            .ok_or_else(|| Error::InvalidArgument("singular edge system".into()))?;
        let k = sol.idx(0, j + 1);
        for r in n_zfields..N {
            sol.fields[k][r] = u1[r];
        }
    }

    // interior cells
    for j in 0..nt {
        let dt = ts[j + 1] - ts[j];
        for i in 0..nz {
            let dz = zs[i + 1] - zs[i];
            let c = coeff(0.5 * (zs[i] + zs[i + 1]), 0.5 * (ts[j] + ts[j + 1]));
            let u00 = SVector::<f64, N>::from_column_slice(sol.node(i, j));
            let u10 = SVector::<f64, N>::from_column_slice(sol.node(i + 1, j));
            let u01 = SVector::<f64, N>::from_column_slice(sol.node(i, j + 1));
            let known_sum = u00 + u10 + u01;
            let c_known = c * known_sum;
            let mut m = SMatrix::<f64, N, N>::zeros();
            let mut rhs = SVector::<f64, N>::zeros();
            for r in 0..N {
                let h = if r < n_zfields { dz } else { dt };
                for l in 0..N {
                    m[(r, l)] = -c[(r, l)] / 4.0;
                }
                m[(r, r)] += 1.0 / (2.0 * h);
                rhs[r] = c_known[r] / 4.0
                    + if r < n_zfields {
                        (u00[r] + u01[r] - u10[r]) / (2.0 * h)
                    } else {
                        (u00[r] + u10[r] - u01[r]) / (2.0 * h)
                    };
            }
            let u11 = solve_small(m, rhs)
                .ok_or_else(|| Error::InvalidArgument("singular cell system".into()))?;
            let k = sol.idx(i + 1, j + 1);
            for r in 0..N {
                sol.fields[k][r] = u11[r];
            }
        }
    }
    Ok(sol)
}
