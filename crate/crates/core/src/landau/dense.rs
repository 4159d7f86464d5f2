//! Dense assembly of the discrete `L` from direct kernel sums (no FFT), used
//! for spectral studies and as an independent check of the matrix-free path.

use nalgebra::DMatrix;

use crate::error::{Result, VmlError};

use super::conv::{lattice_kernel, sym_index};
use super::CollisionTables;

pub const DENSE_MAX_NV: usize = 12;

/// `2N × 2N` matrix of `L` acting on `[f₊; f₋]`.
pub fn assemble_dense_l(tables: &CollisionTables) -> Result<DMatrix<f64>> {
    let grid = tables.grid();
    let n = grid.n_v();
    if n > DENSE_MAX_NV {
        return Err(VmlError::InvalidParameter(format!(
            "dense assembly is limited to n_v <= {DENSE_MAX_NV}, got {n}"
        )));
    }
    let len = grid.len();
    let h = grid.spacing();
    let h3 = grid.quad_weight();
    let gamma = tables.gamma();
    let sm = grid.sqrt_mu();
    let mu = grid.mu();
    let coord = |p: usize| [p / (n * n), (p / n) % n, p % n];

    // kernel blocks and the directly summed σ
    let mut kern = vec![[0.0; 6]; len * len];
    let mut sigma = vec![[0.0; 6]; len];
    for a in 0..len {
        let ca = coord(a);
        for b in 0..len {
            let cb = coord(b);
            let d = [0, 1, 2].map(|k| ca[k] as i64 - cb[k] as i64);
            let k = lattice_kernel(d, h, gamma);
            kern[a * len + b] = k;
            for s in 0..6 {
                sigma[a][s] += h3 * k[s] * mu[b];
            }
        }
    }

    // sparse folded derivative rows per axis: (row p) -> [(q, c)]
    let st = tables.folded_stencil();
    let rows: Vec<Vec<Vec<(usize, f64)>>> = (0..3)
        .map(|axis| {
            let stride = grid.stride(axis);
            (0..len)
                .map(|p| {
                    let i = coord(p)[axis];
                    st.rows()[i]
                        .iter()
                        .map(|&(j, c)| (p - i * stride + j * stride, c))
                        .collect()
                })
                .collect()
        })
        .collect();

    let mut a_mat = DMatrix::<f64>::zeros(len, len);
    let mut t_mat = DMatrix::<f64>::zeros(len, len);
    for i in 0..3 {
        for j in 0..3 {
            let s_ij = sym_index(i, j);
            // M = B_ij D̃_j, then accumulate D̃_iᵀ M
            let mut m_a = DMatrix::<f64>::zeros(len, len);
            let mut m_t = DMatrix::<f64>::zeros(len, len);
            for r in 0..len {
                for &(q, c) in &rows[j][r] {
                    // column q of D̃_j has entry c at row r
                    let loc = sigma[r][s_ij] * c;
                    m_a[(r, q)] += loc;
                    m_t[(r, q)] += loc;
                    for a in 0..len {
                        m_t[(a, q)] -= sm[a] * h3 * kern[a * len + r][s_ij] * sm[r] * c;
                    }
                }
            }
            for r in 0..len {
                for &(p, c) in &rows[i][r] {
                    // (D̃_iᵀ)_{p r} = c
                    for q in 0..len {
                        a_mat[(p, q)] += c * m_a[(r, q)];
                        t_mat[(p, q)] += c * m_t[(r, q)];
                    }
                }
            }
        }
    }

    let mut l = DMatrix::<f64>::zeros(2 * len, 2 * len);
    for p in 0..len {
        for q in 0..len {
            let (t, a) = (t_mat[(p, q)], a_mat[(p, q)]);
            l[(p, q)] = t + a;
            l[(p, q + len)] = t - a;
            l[(p + len, q)] = t - a;
            l[(p + len, q + len)] = t + a;
        }
    }
    Ok(l)
}
