use crate::error::{Result, VmlError};
use crate::phase_grid::{C64, ZERO};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PcgOutcome {
    pub iterations: usize,
    pub residual: f64,
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Preconditioned conjugate gradients for a Hermitian positive definite
/// operator. `precond` holds the diagonal that is inverted as Jacobi
/// preconditioner. Stops once `‖b − Ax‖ ≤ tol ‖b‖`; `x` holds the initial
/// guess on entry.
pub fn pcg(
    apply: impl Fn(&[C64]) -> Vec<C64>,
    b: &[C64],
    x: &mut [C64],
    precond: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<PcgOutcome> {
    let bnorm = dot(b, b).re.sqrt();
    if bnorm == 0.0 {
        x.iter_mut().for_each(|z| *z = ZERO);
        return Ok(PcgOutcome {
            iterations: 0,
            residual: 0.0,
        });
    }
    let ax = apply(x);
    let mut r: Vec<C64> = b.iter().zip(&ax).map(|(p, q)| p - q).collect();
    let mut z: Vec<C64> = r.iter().zip(precond).map(|(v, d)| v / d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z).re;
    let mut res = dot(&r, &r).re.sqrt() / bnorm;
    let mut it = 0;
    while res > tol {
        if it >= max_iter {
            return Err(VmlError::SolverDiverged {
                iterations: it,
                residual: res,
            });
        }
        let ap = apply(&p);
        let alpha = rz / dot(&p, &ap).re;
        for k in 0..x.len() {
            x[k] += p[k] * alpha;
            r[k] -= ap[k] * alpha;
        }
        for k in 0..z.len() {
            z[k] = r[k] / precond[k];
        }
        let rz_new = dot(&r, &z).re;
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..p.len() {
            p[k] = z[k] + p[k] * beta;
        }
        res = dot(&r, &r).re.sqrt() / bnorm;
        it += 1;
    }
    Ok(PcgOutcome {
        iterations: it,
        residual: res,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_spd_system() {
        // tridiagonal 2 -1 with a shift
        let n = 20;
        let apply = |x: &[C64]| -> Vec<C64> {
            (0..n)
                .map(|i| {
                    let mut s = x[i] * 3.0;
                    if i > 0 {
                        s -= x[i - 1];
                    }
                    if i + 1 < n {
                        s -= x[i + 1];
                    }
                    s
                })
                .collect()
        };
        let b: Vec<C64> = (0..n).map(|i| C64::new(i as f64, 1.0)).collect();
        let mut x = vec![ZERO; n];
        let out = pcg(apply, &b, &mut x, &vec![3.0; n], 1e-12, 100).unwrap();
        assert!(out.residual <= 1e-12);
        let ax = apply(&x);
        for (p, q) in ax.iter().zip(&b) {
            assert!((p - q).norm() < 1e-9);
        }
    }

    #[test]
    fn reports_non_convergence() {
        let b = vec![C64::new(1.0, 0.0); 4];
        let mut x = vec![ZERO; 4];
        let apply = |x: &[C64]| x.iter().enumerate().map(|(i, z)| z * (1.0 + i as f64 * 100.0)).collect();
        let err = pcg(apply, &b, &mut x, &[1.0; 4], 1e-14, 1).unwrap_err();
        assert!(matches!(err, VmlError::SolverDiverged { .. }));
    }
}
