//! The shared semi-implicit stepper.

use alloc::vec::Vec;

use super::grid::{EpsScenario, FaceKind, PerforatedGrid};
use super::{HomogenizedCoefficients, InitialScaling, PdeParams, PdeSolution};
use crate::linalg::{cg, norm, CgConfig, LinearOperator};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub cg: CgConfig,
    /// Extra sweeps re-freezing `A` at the latest iterate (at most 5).
    pub picard_sweeps: usize,
    /// Sweeps stop once the relative change drops below this.
    pub picard_tol: f64,
    /// A step whose final relative change still exceeds this is rejected.
    pub reject_bound: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            // Mass drift per step is the residual sum, so 1e-10 is too loose here.
            cg: CgConfig {
                rel_tol: 1e-13,
                ..CgConfig::default()
            },
            picard_sweeps: 0,
            picard_tol: 1e-8,
            reject_bound: 1e-2,
        }
    }
}

pub const MAX_PICARD_SWEEPS: usize = 5;

struct Setup<'a> {
    params: &'a PdeParams,
    nx: usize,
    ny: usize,
    dx: f64,
    dy: f64,
    active: Vec<bool>,
    capacity: f64,
    tensor: [[f64; 2]; 2],
    /// `(fluid cell, face area)` of every Robin face.
    robin: Vec<(usize, f64)>,
    robin_scale: f64,
    reaction: f64,
    dt: f64,
    cfg: SolverConfig,
}

/// Frozen operator `capacity |V| / dt + L(a)` for one step.
struct StepOperator<'s> {
    s: &'s Setup<'s>,
    mass: f64,
    /// Coefficient of the x-face between `c` and `c + 1`.
    cx: Vec<f64>,
    /// Coefficient of the y-face between `c` and `c + nx`.
    cy: Vec<f64>,
    /// Cross coefficient `a_block K12 dx dy` of the block with lower-left
    /// cell `c` (zero when the block is incomplete).
    cb: Vec<f64>,
}

impl<'s> StepOperator<'s> {
    fn new(s: &'s Setup<'s>, u: &[f64]) -> Self {
        let n = s.nx * s.ny;
        let a: Vec<f64> = u.iter().map(|&v| s.params.a_clamped(v)).collect();
        let harm = |p: f64, q: f64| 2.0 * p * q / (p + q);
        let mut cx = alloc::vec![0.0; n];
        let mut cy = alloc::vec![0.0; n];
        let mut cb = alloc::vec![0.0; n];
        let k = s.tensor;
        for j in 0..s.ny {
            for i in 0..s.nx {
                let c = i + s.nx * j;
                if !s.active[c] {
                    continue;
                }
                if i + 1 < s.nx && s.active[c + 1] {
                    cx[c] = harm(a[c], a[c + 1]) * k[0][0] * s.dy / s.dx;
                }
                if j + 1 < s.ny && s.active[c + s.nx] {
                    cy[c] = harm(a[c], a[c + s.nx]) * k[1][1] * s.dx / s.dy;
                }
                if k[0][1] != 0.0 && i + 1 < s.nx && j + 1 < s.ny {
                    let block = [c, c + 1, c + s.nx, c + s.nx + 1];
                    if block.iter().all(|&b| s.active[b]) {
                        let amin = block.iter().map(|&b| a[b]).fold(f64::INFINITY, f64::min);
                        cb[c] = amin * k[0][1] * s.dx * s.dy;
                    }
                }
            }
        }
        StepOperator {
            s,
            mass: s.capacity * s.dx * s.dy / s.dt,
            cx,
            cy,
            cb,
        }
    }
}

impl LinearOperator for StepOperator<'_> {
    fn len(&self) -> usize {
        self.s.nx * self.s.ny
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let s = self.s;
        let nx = s.nx;
        for c in 0..x.len() {
            y[c] = if s.active[c] { self.mass * x[c] } else { x[c] };
        }
        for c in 0..x.len() {
            let w = self.cx[c];
            if w != 0.0 {
                let f = w * (x[c] - x[c + 1]);
                y[c] += f;
                y[c + 1] -= f;
            }
            let w = self.cy[c];
            if w != 0.0 {
                let f = w * (x[c] - x[c + nx]);
                y[c] += f;
                y[c + nx] -= f;
            }
            let w = self.cb[c];
            if w != 0.0 {
                // block cells: 00 = c, 10 = c+1, 01 = c+nx, 11 = c+nx+1
                let (u00, u10, u01, u11) = (x[c], x[c + 1], x[c + nx], x[c + nx + 1]);
                let gx = (u10 + u11 - u00 - u01) / (2.0 * s.dx);
                let gy = (u01 + u11 - u00 - u10) / (2.0 * s.dy);
                let ax = gy / (2.0 * s.dx);
                let ay = gx / (2.0 * s.dy);
                y[c] += w * (-ax - ay);
                y[c + 1] += w * (ax - ay);
                y[c + nx] += w * (-ax + ay);
                y[c + nx + 1] += w * (ax + ay);
            }
        }
    }

    fn diagonal(&self) -> Option<Vec<f64>> {
        let s = self.s;
        let nx = s.nx;
        let n = self.len();
        let mut d: Vec<f64> = (0..n).map(|c| if s.active[c] { self.mass } else { 1.0 }).collect();
        for c in 0..n {
            if self.cx[c] != 0.0 {
                d[c] += self.cx[c];
                d[c + 1] += self.cx[c];
            }
            if self.cy[c] != 0.0 {
                d[c] += self.cy[c];
                d[c + nx] += self.cy[c];
            }
            let w = self.cb[c];
            if w != 0.0 {
                let q = w / (2.0 * s.dx * s.dy);
                d[c] += q;
                d[c + 1] -= q;
                d[c + nx] -= q;
                d[c + nx + 1] += q;
            }
        }
        Some(d)
    }
}

impl Setup<'_> {
    fn center(&self, c: usize) -> [f64; 2] {
        let q = &self.params.q;
        [
            q.lo[0] + ((c % self.nx) as f64 + 0.5) * self.dx,
            q.lo[1] + ((c / self.nx) as f64 + 0.5) * self.dy,
        ]
    }

    fn diagnostics(&self, u: &[f64]) -> (f64, f64, f64) {
        let vol = self.dx * self.dy;
        let mut l2 = 0.0;
        let mut mass = 0.0;
        let mut grad = 0.0;
        for c in 0..u.len() {
            if !self.active[c] {
                continue;
            }
            l2 += u[c] * u[c] * vol;
            mass += u[c] * vol;
            let (i, j) = (c % self.nx, c / self.nx);
            if i + 1 < self.nx && self.active[c + 1] {
                let d = u[c + 1] - u[c];
                grad += d * d * self.dy / self.dx;
            }
            if j + 1 < self.ny && self.active[c + self.nx] {
                let d = u[c + self.nx] - u[c];
                grad += d * d * self.dx / self.dy;
            }
        }
        (l2, grad, self.capacity * mass)
    }

    fn explicit_rhs(&self, u: &[f64], t: f64, mass: f64) -> Vec<f64> {
        let vol = self.dx * self.dy;
        let p = self.params;
        let mut b = alloc::vec![0.0; u.len()];
        for c in 0..u.len() {
            if !self.active[c] {
                continue;
            }
            let x = self.center(c);
            b[c] = mass * u[c] + self.capacity * vol * (p.f)(t, &x);
            if self.reaction != 0.0 {
                b[c] += self.reaction * (p.h)(u[c]) * vol;
            }
        }
        for &(c, area) in &self.robin {
            b[c] += self.robin_scale * (p.h)(u[c]) * area;
        }
        b
    }

    fn run(&self, u0: Vec<f64>) -> Result<PdeSolution> {
        let t_final = self.params.t_final;
        let steps = libm::ceil(t_final / self.dt - 1e-9).max(1.0) as usize;
        let mut u = u0;
        let mut times = Vec::with_capacity(steps + 1);
        let mut snapshots = Vec::with_capacity(steps + 1);
        let mut l2_sq = Vec::with_capacity(steps + 1);
        let mut grad_sq = Vec::with_capacity(steps + 1);
        let mut masses = Vec::with_capacity(steps + 1);
        let mut record = |t: f64, u: &[f64]| {
            let (l2, g, m) = self.diagnostics(u);
            times.push(t);
            snapshots.push(u.to_vec());
            l2_sq.push(l2);
            grad_sq.push(g);
            masses.push(m);
        };
        record(0.0, &u);
        let mut total_iters = 0;
        let mut max_residual: f64 = 0.0;
        let mut t = 0.0;
        for k in 0..steps {
            let dt = if k + 1 == steps { t_final - t } else { self.dt };
            let local = Setup { dt, ..self.shallow() };
            let op = StepOperator::new(&local, &u);
            let b = local.explicit_rhs(&u, t, op.mass);
            let mut next = u.clone();
            let st = cg(&op, &b, &mut next, &self.cfg.cg)?;
            total_iters += st.iterations;
            max_residual = max_residual.max(st.residual);
            let sweeps = self.cfg.picard_sweeps.min(MAX_PICARD_SWEEPS);
            let mut change = 0.0;
            for _ in 0..sweeps {
                let op = StepOperator::new(&local, &next);
                let mut iter = next.clone();
                let st = cg(&op, &b, &mut iter, &self.cfg.cg)?;
                total_iters += st.iterations;
                max_residual = max_residual.max(st.residual);
                let diff: Vec<f64> = iter.iter().zip(&next).map(|(a, b)| a - b).collect();
                change = norm(&diff) / norm(&iter).max(f64::MIN_POSITIVE);
                next = iter;
                if change <= self.cfg.picard_tol {
                    break;
                }
            }
            if sweeps > 0 && change > self.cfg.reject_bound {
                return Err(Error::TimeStepRejected {
                    time: t + dt,
                    residual: change,
                    bound: self.cfg.reject_bound,
                });
            }
            u = next;
            t += dt;
            record(t, &u);
        }
        Ok(PdeSolution {
            nx: self.nx,
            ny: self.ny,
            dx: self.dx,
            dy: self.dy,
            active: self.active.clone(),
            times,
            snapshots,
            l2_sq,
            grad_sq,
            mass: masses,
            cg_iterations: total_iters,
            max_residual,
        })
    }

    fn shallow(&self) -> Setup<'_> {
        Setup {
            params: self.params,
            nx: self.nx,
            ny: self.ny,
            dx: self.dx,
            dy: self.dy,
            active: self.active.clone(),
            capacity: self.capacity,
            tensor: self.tensor,
            robin: self.robin.clone(),
            robin_scale: self.robin_scale,
            reaction: self.reaction,
            dt: self.dt,
            cfg: self.cfg,
        }
    }
}

fn check_grid(grid: &PerforatedGrid, params: &PdeParams) -> Result<()> {
    if grid.q != params.q {
        return Err(Error::param("grid", "grid rectangle differs from Q"));
    }
    Ok(())
}

/// Perforated problem: fluid cells only, Robin flux `ε h(u)` on hole faces.
pub fn solve_eps(
    grid: &PerforatedGrid,
    params: &PdeParams,
    scenario: &EpsScenario,
    cfg: &SolverConfig,
) -> Result<PdeSolution> {
    params.validate()?;
    check_grid(grid, params)?;
    if !(scenario.dt > 0.0) {
        return Err(Error::param("dt", "must be positive"));
    }
    let active = grid.fluid_mask();
    let robin = grid
        .faces()
        .into_iter()
        .filter(|f| f.kind == FaceKind::HoleRobin)
        .map(|f| (f.a, f.area))
        .collect();
    let setup = Setup {
        params,
        nx: grid.nx,
        ny: grid.ny,
        dx: grid.dx,
        dy: grid.dy,
        active,
        capacity: 1.0,
        tensor: [[1.0, 0.0], [0.0, 1.0]],
        robin,
        robin_scale: grid.eps,
        reaction: 0.0,
        dt: scenario.dt,
        cfg: *cfg,
    };
    let u0 = initial(&setup, 1.0);
    setup.run(u0)
}

/// Homogenized problem on the full rectangle with capacity `C1`, tensor
/// `A(u) 𝒜`, reaction `C2 h(u)` and source `C1 f`.
///
/// Off-diagonal conductivity requires `|a12| <= min(a11, a22)`, which keeps
/// the discrete operator positive definite.
pub fn solve_homogenized(
    coeffs: &HomogenizedCoefficients,
    params: &PdeParams,
    cells_per_unit: usize,
    dt: f64,
    scaling: InitialScaling,
    cfg: &SolverConfig,
) -> Result<PdeSolution> {
    params.validate()?;
    coeffs.validate()?;
    if !(dt > 0.0) {
        return Err(Error::param("dt", "must be positive"));
    }
    let k = coeffs.a_matrix;
    if k[0][1].abs() > k[0][0].min(k[1][1]) {
        return Err(Error::param(
            "a_matrix",
            "off-diagonal entry exceeds the smaller diagonal entry; the discrete operator would not be definite",
        ));
    }
    let grid = PerforatedGrid::plain(&params.q, cells_per_unit);
    let setup = Setup {
        params,
        nx: grid.nx,
        ny: grid.ny,
        dx: grid.dx,
        dy: grid.dy,
        active: grid.fluid_mask(),
        capacity: coeffs.c1,
        tensor: k,
        robin: Vec::new(),
        robin_scale: 0.0,
        reaction: coeffs.c2,
        dt,
        cfg: *cfg,
    };
    let scale = match scaling {
        InitialScaling::Paper => coeffs.c1,
        InitialScaling::Plain => 1.0,
    };
    let u0 = initial(&setup, scale);
    setup.run(u0)
}

fn initial(setup: &Setup<'_>, scale: f64) -> Vec<f64> {
    (0..setup.nx * setup.ny)
        .map(|c| {
            if setup.active[c] {
                scale * (setup.params.u0)(&setup.center(c))
            } else {
                0.0
            }
        })
        .collect()
}
