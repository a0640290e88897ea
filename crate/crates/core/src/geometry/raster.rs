//! Raster construction of the filled-up Boolean model.
//!
//! Cells whose center lies in the Boolean model are `Covered`. The remaining
//! cells are flood-filled from the raster border (4-connectivity in 2D,
//! 6-connectivity in 3D); vacant cells the fill cannot reach are islands and
//! belong to the filled model.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use super::{clusters_of_points, GeometryParams};
use crate::point::{Point, PointCloud, Window};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum CellState {
    Covered = 0,
    VacantUnbounded = 1,
    VacantIsland = 2,
}

/// Uniform cell grid; in 2D `shape[2] == 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RasterGrid {
    pub dim: usize,
    pub h: f64,
    pub origin: Point,
    pub shape: [usize; 3],
}

impl RasterGrid {
    /// Grid of cells of side `h` covering `window` grown by `pad`.
    pub fn covering(window: &Window, pad: f64, h: f64) -> Self {
        let mut origin = [0.0; 3];
        let mut shape = [1usize; 3];
        for k in 0..window.dim {
            origin[k] = window.lo[k] - pad;
            let extent = window.side(k) + 2.0 * pad;
            shape[k] = (libm::ceil(extent / h) as usize).max(1);
        }
        RasterGrid {
            dim: window.dim,
            h,
            origin,
            shape,
        }
    }

    pub fn len(&self) -> usize {
        self.shape[0] * self.shape[1] * self.shape[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.shape[0] * (j + self.shape[1] * k)
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let i = idx % self.shape[0];
        let rest = idx / self.shape[0];
        [i, rest % self.shape[1], rest / self.shape[1]]
    }

    pub fn center(&self, idx: usize) -> Point {
        let c = self.coords(idx);
        let mut p = [0.0; 3];
        for a in 0..self.dim {
            p[a] = self.origin[a] + (c[a] as f64 + 0.5) * self.h;
        }
        p
    }

    /// Cell containing `p`, if inside the grid.
    pub fn locate(&self, p: &Point) -> Option<usize> {
        let mut c = [0usize; 3];
        for a in 0..self.dim {
            let t = libm::floor((p[a] - self.origin[a]) / self.h);
            if t < 0.0 || t >= self.shape[a] as f64 {
                return None;
            }
            c[a] = t as usize;
        }
        Some(self.index(c[0], c[1], c[2]))
    }

    pub(crate) fn on_border(&self, idx: usize) -> bool {
        let c = self.coords(idx);
        (0..self.dim).any(|a| c[a] == 0 || c[a] + 1 == self.shape[a])
    }

    /// Face neighbors of a cell.
    pub(crate) fn for_each_neighbor(&self, idx: usize, mut f: impl FnMut(usize)) {
        let c = self.coords(idx);
        for a in 0..self.dim {
            if c[a] > 0 {
                let mut n = c;
                n[a] -= 1;
                f(self.index(n[0], n[1], n[2]));
            }
            if c[a] + 1 < self.shape[a] {
                let mut n = c;
                n[a] += 1;
                f(self.index(n[0], n[1], n[2]));
            }
        }
    }

    /// Index range of cells whose center can be within `r` of `p` on axis `a`.
    fn span(&self, p: &Point, r: f64, a: usize) -> (usize, usize) {
        if a >= self.dim {
            return (0, 1);
        }
        let lo = libm::ceil((p[a] - r - self.origin[a]) / self.h - 0.5).max(0.0);
        let hi = libm::floor((p[a] + r - self.origin[a]) / self.h - 0.5) + 1.0;
        let hi = hi.min(self.shape[a] as f64).max(lo);
        (lo as usize, hi as usize)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilledRaster {
    pub grid: RasterGrid,
    pub states: Vec<CellState>,
}

impl FilledRaster {
    pub fn state(&self, idx: usize) -> CellState {
        self.states[idx]
    }

    /// State of the cell containing `p`; points off the raster are vacant and
    /// connected to infinity.
    pub fn state_at(&self, p: &Point) -> CellState {
        match self.grid.locate(p) {
            Some(idx) => self.states[idx],
            None => CellState::VacantUnbounded,
        }
    }

    /// Membership in the filled-up model (covered or island).
    pub fn in_filled(&self, p: &Point) -> bool {
        self.state_at(p) != CellState::VacantUnbounded
    }

    pub fn count(&self, state: CellState) -> usize {
        self.states.iter().filter(|&&s| s == state).count()
    }

    pub fn has_islands(&self) -> bool {
        self.states.contains(&CellState::VacantIsland)
    }

    /// Checks the flood-fill invariant by an independent re-walk: every
    /// unbounded vacant cell reaches the border through vacant cells and no
    /// island does.
    pub fn verify_reachability(&self) -> bool {
        let reach = border_reachable(&self.grid, |i| self.states[i] != CellState::Covered);
        self.states.iter().zip(reach.iter()).all(|(s, &r)| match s {
            CellState::Covered => true,
            CellState::VacantUnbounded => r,
            CellState::VacantIsland => !r,
        })
    }

    /// Fraction of cells with center in `w` that are not in the Boolean model
    /// (`filled == false`) or not in the filled model (`filled == true`).
    pub fn vacant_fraction(&self, w: &Window, filled: bool) -> Option<f64> {
        let mut inside = 0usize;
        let mut vacant = 0usize;
        for (idx, s) in self.states.iter().enumerate() {
            if !w.contains(&self.grid.center(idx)) {
                continue;
            }
            inside += 1;
            let is_vacant = match s {
                CellState::Covered => false,
                CellState::VacantUnbounded => true,
                CellState::VacantIsland => !filled,
            };
            if is_vacant {
                vacant += 1;
            }
        }
        (inside > 0).then(|| vacant as f64 / inside as f64)
    }
}

/// Marks cells whose center lies within `r` of some point (closed balls).
pub(crate) fn stamp_disks(grid: &RasterGrid, points: &[Point], r: f64) -> Vec<bool> {
    let mut covered = alloc::vec![false; grid.len()];
    let r2 = r * r;
    for p in points {
        let (i0, i1) = grid.span(p, r, 0);
        let (j0, j1) = grid.span(p, r, 1);
        let (k0, k1) = grid.span(p, r, 2);
        for k in k0..k1 {
            for j in j0..j1 {
                for i in i0..i1 {
                    let idx = grid.index(i, j, k);
                    let c = grid.center(idx);
                    let d2 = (c[0] - p[0]) * (c[0] - p[0])
                        + (c[1] - p[1]) * (c[1] - p[1])
                        + (c[2] - p[2]) * (c[2] - p[2]);
                    if d2 <= r2 {
                        covered[idx] = true;
                    }
                }
            }
        }
    }
    covered
}

fn border_reachable(grid: &RasterGrid, passable: impl Fn(usize) -> bool) -> Vec<bool> {
    let mut seen = alloc::vec![false; grid.len()];
    let mut queue = VecDeque::new();
    for idx in 0..grid.len() {
        if grid.on_border(idx) && passable(idx) {
            seen[idx] = true;
            queue.push_back(idx);
        }
    }
    while let Some(idx) = queue.pop_front() {
        grid.for_each_neighbor(idx, |n| {
            if !seen[n] && passable(n) {
                seen[n] = true;
                queue.push_back(n);
            }
        });
    }
    seen
}

/// Filled raster of the balls around `points` on a caller-chosen grid.
pub fn fill_on_grid(grid: RasterGrid, points: &[Point], r: f64) -> FilledRaster {
    let covered = stamp_disks(&grid, points, r);
    let reach = border_reachable(&grid, |i| !covered[i]);
    let states = covered
        .iter()
        .zip(reach.iter())
        .map(|(&c, &reached)| {
            if c {
                CellState::Covered
            } else if reached {
                CellState::VacantUnbounded
            } else {
                CellState::VacantIsland
            }
        })
        .collect();
    FilledRaster { grid, states }
}

/// Padding that keeps every ball and every island off the raster border.
pub fn fill_padding(cloud: &PointCloud, params: &GeometryParams, resolution: f64) -> f64 {
    let clusters = clusters_of_points(cloud.points(), cloud.dim(), params.r);
    params.r + clusters.max_diameter(cloud) + 2.0 * resolution
}

/// Raster of the filled-up Boolean model over the cloud's window.
pub fn fill(cloud: &PointCloud, params: &GeometryParams, resolution: f64) -> Result<FilledRaster> {
    if !(resolution > 0.0 && resolution.is_finite()) {
        return Err(Error::param("resolution", "must be positive"));
    }
    let pad = fill_padding(cloud, params, resolution);
    let grid = RasterGrid::covering(cloud.window(), pad, resolution);
    Ok(fill_on_grid(grid, cloud.points(), params.r))
}
