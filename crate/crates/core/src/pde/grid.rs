//! Perforation of the rectangle by the scaled, filled, thinned Boolean model.

use alloc::vec::Vec;

use crate::geometry::raster::{fill_on_grid, RasterGrid};
use crate::geometry::{clusters_of_points, BooleanModel, CellState, GeometryParams};
use crate::point::{Point, PointCloud, Window};
use crate::thinning::{thin, ThinningLevel};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct EpsScenario {
    pub eps: f64,
    /// Unscaled cloud; the perforation is `ε` times its filled model.
    pub cloud: PointCloud,
    pub geometry: GeometryParams,
    pub level: ThinningLevel,
    /// Grid cells per unit length.
    pub cells_per_unit: usize,
    pub dt: f64,
}

impl EpsScenario {
    pub fn validate(&self, q: &Window) -> Result<()> {
        if !(self.eps > 0.0 && self.eps <= 1.0) {
            return Err(Error::param("eps", "must lie in (0, 1]"));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::param("dt", "must be positive"));
        }
        if self.cells_per_unit == 0 {
            return Err(Error::param("cells_per_unit", "must be positive"));
        }
        if self.cloud.dim() != 2 || q.dim != 2 {
            return Err(Error::UnsupportedDimension {
                op: "perforation",
                dim: self.cloud.dim(),
                supported: "2",
            });
        }
        let diam = 2.0 * self.level.get() as f64 * self.geometry.r;
        if self.eps * diam >= q.side(0).min(q.side(1)) {
            return Err(Error::param("eps", "scaled cluster diameter bound 2εnr must be below the sides of Q"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum CellKind {
    Fluid = 0,
    Hole = 1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FaceKind {
    Interior,
    OuterNeumann,
    HoleRobin,
}

/// Face of a fluid cell `a`. `b` is the other cell, absent on `∂Q`; for
/// Robin faces it is the hole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Face {
    pub a: usize,
    pub b: Option<usize>,
    pub kind: FaceKind,
    /// 0 for faces normal to x, 1 for faces normal to y.
    pub axis: usize,
    pub area: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerforatedGrid {
    pub q: Window,
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub eps: f64,
    pub kinds: Vec<CellKind>,
    pub kept_clusters: usize,
    pub dropped_clusters: usize,
}

impl PerforatedGrid {
    /// Uniform grid over `q` without holes.
    pub fn plain(q: &Window, cells_per_unit: usize) -> Self {
        let (nx, ny) = grid_shape(q, cells_per_unit);
        PerforatedGrid {
            q: *q,
            nx,
            ny,
            dx: q.side(0) / nx as f64,
            dy: q.side(1) / ny as f64,
            eps: 1.0,
            kinds: alloc::vec![CellKind::Fluid; nx * ny],
            kept_clusters: 0,
            dropped_clusters: 0,
        }
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i + self.nx * j
    }

    pub fn center(&self, idx: usize) -> [f64; 2] {
        let i = idx % self.nx;
        let j = idx / self.nx;
        [
            self.q.lo[0] + (i as f64 + 0.5) * self.dx,
            self.q.lo[1] + (j as f64 + 0.5) * self.dy,
        ]
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn fluid_mask(&self) -> Vec<bool> {
        self.kinds.iter().map(|&k| k == CellKind::Fluid).collect()
    }

    pub fn hole_count(&self) -> usize {
        self.kinds.iter().filter(|&&k| k == CellKind::Hole).count()
    }

    /// Every face of every fluid cell, interior faces listed once.
    pub fn faces(&self) -> Vec<Face> {
        let mut out = Vec::new();
        let fluid = |idx: usize| self.kinds[idx] == CellKind::Fluid;
        for j in 0..self.ny {
            for i in 0..self.nx {
                let c = self.index(i, j);
                for axis in 0..2 {
                    let area = if axis == 0 { self.dy } else { self.dx };
                    let (pos, len) = if axis == 0 { (i, self.nx) } else { (j, self.ny) };
                    // low side only reports the outer face
                    if pos == 0 && fluid(c) {
                        out.push(Face {
                            a: c,
                            b: None,
                            kind: FaceKind::OuterNeumann,
                            axis,
                            area,
                        });
                    }
                    if pos + 1 == len {
                        if fluid(c) {
                            out.push(Face {
                                a: c,
                                b: None,
                                kind: FaceKind::OuterNeumann,
                                axis,
                                area,
                            });
                        }
                        continue;
                    }
                    let d = if axis == 0 { self.index(i + 1, j) } else { self.index(i, j + 1) };
                    match (fluid(c), fluid(d)) {
                        (true, true) => out.push(Face {
                            a: c,
                            b: Some(d),
                            kind: FaceKind::Interior,
                            axis,
                            area,
                        }),
                        (true, false) => out.push(Face {
                            a: c,
                            b: Some(d),
                            kind: FaceKind::HoleRobin,
                            axis,
                            area,
                        }),
                        (false, true) => out.push(Face {
                            a: d,
                            b: Some(c),
                            kind: FaceKind::HoleRobin,
                            axis,
                            area,
                        }),
                        (false, false) => {}
                    }
                }
            }
        }
        out
    }
}

fn grid_shape(q: &Window, cells_per_unit: usize) -> (usize, usize) {
    let nx = (libm::round(q.side(0) * cells_per_unit as f64) as usize).max(1);
    let ny = (libm::round(q.side(1) * cells_per_unit as f64) as usize).max(1);
    (nx, ny)
}

/// Distance from `p` to the complement of the rectangle `q` (0 outside).
fn depth_in(q: &Window, p: &[f64; 2]) -> f64 {
    let mut d = f64::INFINITY;
    for k in 0..2 {
        d = d.min(p[k] - q.lo[k]).min(q.hi[k] - p[k]);
    }
    d.max(0.0)
}

/// Thins the cloud, keeps the clusters whose scaled centers are all farther
/// than `2εr` from the complement of `q`, and classifies grid cells by
/// whether their center lies in `ε` times the filled model of those clusters.
pub fn build_perforated_grid(scenario: &EpsScenario, q: &Window) -> Result<PerforatedGrid> {
    scenario.validate(q)?;
    let eps = scenario.eps;
    let r = scenario.geometry.r;
    let margin = 2.0 * r + 2.0 * scenario.level.get() as f64 * r;
    let unscaled_q = Window::new(2, &[q.lo[0] / eps, q.lo[1] / eps], &[q.hi[0] / eps, q.hi[1] / eps])?;
    if !scenario.cloud.window().covers(&unscaled_q.grow(margin)) {
        return Err(Error::WindowCoverage(alloc::format!(
            "cloud window must contain Q/ε grown by 2r + 2nr = {margin}"
        )));
    }
    let thinned = thin(&scenario.cloud, &scenario.geometry, scenario.level)?;
    let pts = thinned.points();
    let clusters = clusters_of_points(pts, 2, r);
    let mut kept: Vec<Point> = Vec::new();
    let mut kept_clusters = 0;
    for members in &clusters.clusters {
        let inside = members
            .iter()
            .all(|&i| depth_in(q, &[eps * pts[i][0], eps * pts[i][1]]) > 2.0 * eps * r);
        if inside {
            kept_clusters += 1;
            kept.extend(members.iter().map(|&i| pts[i]));
        }
    }

    let mut grid = PerforatedGrid::plain(q, scenario.cells_per_unit);
    grid.eps = eps;
    grid.kept_clusters = kept_clusters;
    grid.dropped_clusters = clusters.len() - kept_clusters;
    if kept.is_empty() {
        return Ok(grid);
    }
    let model = BooleanModel::from_points(&kept, 2, r);
    let h = scenario.geometry.default_resolution();
    let raster = fill_on_grid(RasterGrid::covering(&unscaled_q, r + 2.0 * h, h), &kept, r);
    for idx in 0..grid.len() {
        let y = grid.center(idx);
        let x = [y[0] / eps, y[1] / eps, 0.0];
        if model.covered(&x) || raster.state_at(&x) == CellState::VacantIsland {
            grid.kinds[idx] = CellKind::Hole;
        }
    }
    Ok(grid)
}
