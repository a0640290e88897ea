//! Finite-volume solvers for the perforated parabolic problem and its
//! homogenized limit.
//!
//! Both solvers share one cell-centered, semi-implicit Euler stepper: the
//! diffusion coefficient `A(u^k)` is frozen per step (harmonic averages on
//! faces), the Robin datum, the reaction and the source are explicit, and the
//! SPD system of each step is solved by Jacobi-preconditioned CG.
//!
//! Sign convention: on a hole face the flux `ε h(u) · area` enters the fluid
//! cell, so a positive `h` adds mass.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::point::Window;
use crate::{Error, Result};

mod grid;
mod solver;
mod study;

pub use grid::{build_perforated_grid, CellKind, EpsScenario, Face, FaceKind, PerforatedGrid};
pub use solver::{solve_eps, solve_homogenized, SolverConfig};
pub use study::{convergence_study, extend_to_holes, l2_space_time_difference, ConvergenceRow, ConvergenceTable};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type SpaceFn = Arc<dyn Fn(&[f64; 2]) -> f64 + Send + Sync>;
pub type SpaceTimeFn = Arc<dyn Fn(f64, &[f64; 2]) -> f64 + Send + Sync>;

/// Data of the parabolic problem on the rectangle `q`.
#[derive(Clone)]
pub struct PdeParams {
    pub q: Window,
    pub t_final: f64,
    pub u0: SpaceFn,
    pub f: SpaceTimeFn,
    /// Diffusion coefficient, clamped into `a_bounds`.
    pub a: ScalarFn,
    pub a_bounds: (f64, f64),
    /// Robin/reaction nonlinearity with declared Lipschitz constant.
    pub h: ScalarFn,
    pub h_lipschitz: f64,
}

impl fmt::Debug for PdeParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PdeParams")
            .field("q", &self.q)
            .field("t_final", &self.t_final)
            .field("a_bounds", &self.a_bounds)
            .field("h_lipschitz", &self.h_lipschitz)
            .finish_non_exhaustive()
    }
}

impl PdeParams {
    /// `A ≡ 1`, `h ≡ 0`, `f ≡ 0` and the given initial field.
    pub fn heat(q: Window, t_final: f64, u0: SpaceFn) -> Self {
        PdeParams {
            q,
            t_final,
            u0,
            f: Arc::new(|_, _| 0.0),
            a: Arc::new(|_| 1.0),
            a_bounds: (1.0, 1.0),
            h: Arc::new(|_| 0.0),
            h_lipschitz: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.q.dim != 2 || self.q.side(0) <= 0.0 || self.q.side(1) <= 0.0 {
            return Err(Error::param("q", "must be a nondegenerate rectangle"));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(Error::param("t_final", "must be positive"));
        }
        let (lo, hi) = self.a_bounds;
        if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
            return Err(Error::param("a_bounds", "need 0 < inf A <= sup A < ∞"));
        }
        if !(self.h_lipschitz >= 0.0 && self.h_lipschitz.is_finite()) {
            return Err(Error::param("h_lipschitz", "must be finite"));
        }
        Ok(())
    }

    pub(crate) fn a_clamped(&self, u: f64) -> f64 {
        (self.a)(u).clamp(self.a_bounds.0, self.a_bounds.1)
    }
}

/// Initial value of the homogenized problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum InitialScaling {
    /// `C1 · u0`.
    Paper,
    /// `u0`.
    #[default]
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomogenizedCoefficients {
    /// Vacancy of the filled model, in `(0, 1]`.
    pub c1: f64,
    /// Surface intensity of the filled model, `>= 0`.
    pub c2: f64,
    /// Effective conductivity (2×2 block used).
    pub a_matrix: [[f64; 2]; 2],
}

impl HomogenizedCoefficients {
    pub fn identity() -> Self {
        HomogenizedCoefficients {
            c1: 1.0,
            c2: 0.0,
            a_matrix: [[1.0, 0.0], [0.0, 1.0]],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c1 > 0.0 && self.c1 <= 1.0) {
            return Err(Error::param("c1", "must lie in (0, 1]"));
        }
        if !(self.c2 >= 0.0 && self.c2.is_finite()) {
            return Err(Error::param("c2", "must be nonnegative"));
        }
        let a = self.a_matrix;
        if (a[0][1] - a[1][0]).abs() > 1e-12 * (1.0 + a[0][1].abs()) {
            return Err(Error::param("a_matrix", "must be symmetric"));
        }
        if a[0][0] < 0.0 || a[1][1] < 0.0 || a[0][0] * a[1][1] - a[0][1] * a[0][1] < -1e-12 {
            return Err(Error::param("a_matrix", "must be positive semidefinite"));
        }
        Ok(())
    }
}

/// Time series on a uniform cell grid over `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct PdeSolution {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    /// Cells carrying unknowns; holes hold 0 in the snapshots.
    pub active: Vec<bool>,
    pub times: Vec<f64>,
    pub snapshots: Vec<Vec<f64>>,
    /// `Σ u² |V|` over active cells, per snapshot.
    pub l2_sq: Vec<f64>,
    /// `Σ_faces |Δu / Δx|² |V|` over interior faces between active cells.
    pub grad_sq: Vec<f64>,
    /// `capacity · Σ u |V|`, per snapshot.
    pub mass: Vec<f64>,
    pub cg_iterations: usize,
    pub max_residual: f64,
}

impl PdeSolution {
    pub fn cell_volume(&self) -> f64 {
        self.dx * self.dy
    }

    /// `sup_t ‖u(t)‖²` and `∫ ‖∇u‖² dt` (trapezoid in time).
    pub fn a_priori_norms(&self) -> (f64, f64) {
        let sup = self.l2_sq.iter().copied().fold(0.0, f64::max);
        let mut int = 0.0;
        for k in 1..self.times.len() {
            int += 0.5 * (self.times[k] - self.times[k - 1]) * (self.grad_sq[k] + self.grad_sq[k - 1]);
        }
        (sup, int)
    }
}
