//! Matrix-free conjugate gradient and a small symmetric eigensolver.

use alloc::vec::Vec;

use crate::{Error, Result};

/// Symmetric positive (semi)definite operator `y = A x`.
pub trait LinearOperator {
    fn len(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
    /// Diagonal of `A`, used for Jacobi preconditioning when available.
    fn diagonal(&self) -> Option<Vec<f64>> {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgConfig {
    /// Stop when `|r| <= rel_tol |b|`.
    pub rel_tol: f64,
    pub max_iter: usize,
    pub jacobi: bool,
}

impl Default for CgConfig {
    fn default() -> Self {
        CgConfig {
            rel_tol: 1e-10,
            max_iter: 20_000,
            jacobi: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgStats {
    pub iterations: usize,
    /// Final `|b - A x| / |b|` (recomputed, not the recursive estimate).
    pub residual: f64,
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

/// Solves `A x = b` starting from the given `x`.
pub fn cg(op: &impl LinearOperator, b: &[f64], x: &mut [f64], cfg: &CgConfig) -> Result<CgStats> {
    let n = op.len();
    assert_eq!(b.len(), n);
    assert_eq!(x.len(), n);
    let bnorm = norm(b);
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(CgStats {
            iterations: 0,
            residual: 0.0,
        });
    }
    let inv_diag: Option<Vec<f64>> = if cfg.jacobi {
        op.diagonal()
            .map(|d| d.iter().map(|&v| if v > 0.0 { 1.0 / v } else { 1.0 }).collect())
    } else {
        None
    };
    let precond = |r: &[f64], z: &mut [f64]| match &inv_diag {
        Some(m) => z.iter_mut().zip(r.iter().zip(m)).for_each(|(z, (r, m))| *z = r * m),
        None => z.copy_from_slice(r),
    };

    let mut r = alloc::vec![0.0; n];
    op.apply(x, &mut r);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    let mut z = alloc::vec![0.0; n];
    precond(&r, &mut z);
    let mut p = z.clone();
    let mut ap = alloc::vec![0.0; n];
    let mut rz = dot(&r, &z);
    let target = cfg.rel_tol * bnorm;
    let mut it = 0;
    while norm(&r) > target {
        if it == cfg.max_iter {
            return Err(Error::SolverDiverged {
                iterations: it,
                residual: norm(&r) / bnorm,
            });
        }
        op.apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            break;
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        precond(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
        it += 1;
        // Guard against drift of the recursive residual.
        if it % 200 == 0 {
            op.apply(x, &mut r);
            for i in 0..n {
                r[i] = b[i] - r[i];
            }
        }
    }
    op.apply(x, &mut ap);
    let res = (0..n).map(|i| (b[i] - ap[i]) * (b[i] - ap[i])).sum::<f64>();
    let residual = libm::sqrt(res) / bnorm;
    if residual > 10.0 * cfg.rel_tol && it >= cfg.max_iter {
        return Err(Error::SolverDiverged {
            iterations: it,
            residual,
        });
    }
    Ok(CgStats {
        iterations: it,
        residual,
    })
}

/// Eigenvalues of a symmetric `d × d` matrix (row-major, `d <= 3`) by cyclic
/// Jacobi rotations, ascending.
pub fn symmetric_eigenvalues(a: &[[f64; 3]; 3], d: usize) -> [f64; 3] {
    let mut m = *a;
    for _ in 0..100 {
        let mut off = 0.0;
        for i in 0..d {
            for j in i + 1..d {
                off += m[i][j] * m[i][j];
            }
        }
        if off < 1e-300 {
            break;
        }
        for p in 0..d {
            for q in p + 1..d {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..d {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..d {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut ev = [f64::NAN; 3];
    for i in 0..d {
        ev[i] = m[i][i];
    }
    ev[..d].sort_by(f64::total_cmp);
    ev
}
