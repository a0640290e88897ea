//! ε-ladder comparison of extended perforated solutions with the homogenized
//! solution.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use super::grid::{build_perforated_grid, EpsScenario};
use super::solver::{solve_eps, solve_homogenized, SolverConfig};
use super::{HomogenizedCoefficients, InitialScaling, PdeParams, PdeSolution};
use crate::{Error, Result};

/// Fills inactive cells with the value of the nearest active cell
/// (4-neighbor multi-source BFS, ties broken by visiting order).
pub fn extend_to_holes(sol: &PdeSolution) -> Vec<Vec<f64>> {
    let n = sol.nx * sol.ny;
    let mut source = alloc::vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for c in 0..n {
        if sol.active[c] {
            source[c] = c;
            queue.push_back(c);
        }
    }
    while let Some(c) = queue.pop_front() {
        let (i, j) = (c % sol.nx, c / sol.nx);
        let mut visit = |d: usize| {
            if source[d] == usize::MAX {
                source[d] = source[c];
                queue.push_back(d);
            }
        };
        if i > 0 {
            visit(c - 1);
        }
        if i + 1 < sol.nx {
            visit(c + 1);
        }
        if j > 0 {
            visit(c - sol.nx);
        }
        if j + 1 < sol.ny {
            visit(c + sol.nx);
        }
    }
    sol.snapshots
        .iter()
        .map(|u| (0..n).map(|c| if source[c] == usize::MAX { 0.0 } else { u[source[c]] }).collect())
        .collect()
}

/// `‖a - b‖_{L²(I × Q)}` with the trapezoid rule over the shared time grid.
pub fn l2_space_time_difference(a: &[Vec<f64>], b: &[Vec<f64>], times: &[f64], cell_volume: f64) -> Result<f64> {
    if a.len() != b.len() || a.len() != times.len() {
        return Err(Error::param("snapshots", "time grids differ"));
    }
    let sq: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q) * (p - q)).sum::<f64>() * cell_volume)
        .collect();
    let mut total = 0.0;
    for k in 1..times.len() {
        total += 0.5 * (times[k] - times[k - 1]) * (sq[k] + sq[k - 1]);
    }
    Ok(libm::sqrt(total))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub eps: f64,
    pub error: f64,
    pub hole_cells: usize,
    pub kept_clusters: usize,
    /// `sup_t ‖u^ε‖²` and `∫ ‖∇u^ε‖² dt` of the perforated solution.
    pub sup_l2_sq: f64,
    pub grad_l2l2_sq: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub scaling: InitialScaling,
    pub rows: Vec<ConvergenceRow>,
    /// Errors nonincreasing along the ladder as given.
    pub monotone: bool,
}

/// Solves every scenario and the homogenized problem on the same grid and
/// time steps, then reports the extended L²(I × Q) differences.
pub fn convergence_study(
    ladder: &[EpsScenario],
    coeffs: &HomogenizedCoefficients,
    params: &PdeParams,
    scaling: InitialScaling,
    cfg: &SolverConfig,
) -> Result<ConvergenceTable> {
    let mut rows = Vec::with_capacity(ladder.len());
    let mut homogenized: Option<(usize, f64, PdeSolution)> = None;
    for sc in ladder {
        let grid = build_perforated_grid(sc, &params.q)?;
        let eps_sol = solve_eps(&grid, params, sc, cfg)?;
        let reuse = matches!(&homogenized, Some((n, dt, _)) if *n == sc.cells_per_unit && *dt == sc.dt);
        if !reuse {
            let h = solve_homogenized(coeffs, params, sc.cells_per_unit, sc.dt, scaling, cfg)?;
            homogenized = Some((sc.cells_per_unit, sc.dt, h));
        }
        let hom = &homogenized.as_ref().expect("set above").2;
        let extended = extend_to_holes(&eps_sol);
        let error = l2_space_time_difference(&extended, &hom.snapshots, &eps_sol.times, eps_sol.cell_volume())?;
        let (sup, grad) = eps_sol.a_priori_norms();
        rows.push(ConvergenceRow {
            eps: sc.eps,
            error,
            hole_cells: grid.hole_count(),
            kept_clusters: grid.kept_clusters,
            sup_l2_sq: sup,
            grad_l2l2_sq: grad,
        });
    }
    let monotone = rows.windows(2).all(|w| w[1].error <= w[0].error);
    Ok(ConvergenceTable {
        scaling,
        rows,
        monotone,
    })
}
