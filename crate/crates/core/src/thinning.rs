//! Regularizing thinning maps.
//!
//! `f1` removes every point with a neighbor at distance in `(0, 1/n)` or in
//! `(2r - 1/n, 2r + 1/n)`. `f2` removes whole clusters with more than `n`
//! points or with smoothness estimate below `1/n`. `thin = f2 ∘ f1` is
//! idempotent, and its fixed points are exactly the clouds satisfying
//! [`conditions_hold`].
//!
//! The smoothness test uses [`delta_hat`], a conservative surrogate, so the
//! set of clouds kept is a subset of what an exact radius would keep.

use alloc::format;
use alloc::vec::Vec;

use crate::geometry::raster::{fill_on_grid, fill_padding, RasterGrid};
use crate::geometry::{clusters_of_points, delta_hat, CellState, GeometryParams};
use crate::point::{dist2, Point, PointCloud, Window};
use crate::spatial::CellIndex;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ThinningLevel(usize);

impl ThinningLevel {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("n", "thinning level must be at least 1"));
        }
        Ok(ThinningLevel(n))
    }

    pub fn get(self) -> usize {
        self.0
    }

    fn inv(self) -> f64 {
        1.0 / self.0 as f64
    }
}

/// Mask of points that have a neighbor in one of the forbidden distance bands.
fn band_violators(cloud: &PointCloud, r: f64, level: ThinningLevel) -> Vec<bool> {
    let pts = cloud.points();
    let mut bad = alloc::vec![false; pts.len()];
    if pts.len() < 2 {
        return bad;
    }
    let eps = level.inv();
    let reach = (2.0 * r + eps).max(eps);
    let index = CellIndex::new(pts, cloud.dim(), reach);
    index.for_each_pair_within(reach, |i, j, d2| {
        let d = libm::sqrt(d2);
        let near = d > 0.0 && d < eps;
        let band = d > 2.0 * r - eps && d < 2.0 * r + eps;
        if near || band {
            bad[i] = true;
            bad[j] = true;
        }
    });
    bad
}

pub fn f1(cloud: &PointCloud, params: &GeometryParams, level: ThinningLevel) -> PointCloud {
    let bad = band_violators(cloud, params.r, level);
    cloud.subset(|i| !bad[i])
}

pub fn is_f1_stable(cloud: &PointCloud, params: &GeometryParams, level: ThinningLevel) -> bool {
    !band_violators(cloud, params.r, level).contains(&true)
}

/// Per-point keep mask of the cluster rule; requires an `f1`-stable cloud.
fn cluster_rule(cloud: &PointCloud, params: &GeometryParams, level: ThinningLevel) -> Result<Vec<bool>> {
    if cloud.dim() != 2 {
        return Err(Error::UnsupportedDimension {
            op: "f2",
            dim: cloud.dim(),
            supported: "2",
        });
    }
    let n = level.get();
    let threshold = level.inv();
    let pts = cloud.points();
    let clusters = clusters_of_points(pts, 2, params.r);
    let mut keep = alloc::vec![false; pts.len()];
    let mut members: Vec<Point> = Vec::new();
    for cluster in &clusters.clusters {
        if cluster.len() > n {
            continue;
        }
        members.clear();
        members.extend(cluster.iter().map(|&i| pts[i]));
        if delta_hat(&members, 2, params)?.value >= threshold {
            for &i in cluster {
                keep[i] = true;
            }
        }
    }
    Ok(keep)
}

pub fn f2(cloud: &PointCloud, params: &GeometryParams, level: ThinningLevel) -> Result<PointCloud> {
    if !is_f1_stable(cloud, params, level) {
        return Err(Error::Precondition {
            op: "f2",
            reason: format!("cloud is not stable under the distance bands at n = {}", level.get()),
        });
    }
    let keep = cluster_rule(cloud, params, level)?;
    Ok(cloud.subset(|i| keep[i]))
}

/// `f2 ∘ f1`.
pub fn thin(cloud: &PointCloud, params: &GeometryParams, level: ThinningLevel) -> Result<PointCloud> {
    if cloud.dim() != 2 {
        return Err(Error::UnsupportedDimension {
            op: "thin",
            dim: cloud.dim(),
            supported: "2",
        });
    }
    let out = f2(&f1(cloud, params, level), params, level)?;
    #[cfg(debug_assertions)]
    {
        debug_assert!(conditions_hold(&out, params, level)?, "thinned cloud violates its fixed-point conditions");
    }
    Ok(out)
}

/// Fixed-point conditions: distance bands respected, cluster sizes at most
/// `n`, smoothness estimate at least `1/n` on every cluster.
pub fn conditions_hold(cloud: &PointCloud, params: &GeometryParams, level: ThinningLevel) -> Result<bool> {
    if !is_f1_stable(cloud, params, level) {
        return Ok(false);
    }
    Ok(cluster_rule(cloud, params, level)?.iter().all(|&k| k))
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub window: Window,
    /// Smallest `n` with `thin_n(x) ∩ Λ = x ∩ Λ`.
    pub n_points: usize,
    /// Smallest `n` whose filled raster agrees with the unthinned one on
    /// every cell centered in `Λ`.
    pub n_filled: usize,
}

pub const STABILITY_CAP: usize = 10_000;

pub fn stability_index(cloud: &PointCloud, params: &GeometryParams, window: &Window) -> Result<StabilityReport> {
    stability_index_capped(cloud, params, window, STABILITY_CAP)
}

pub fn stability_index_capped(
    cloud: &PointCloud,
    params: &GeometryParams,
    window: &Window,
    cap: usize,
) -> Result<StabilityReport> {
    let inside: Vec<Point> = cloud
        .points()
        .iter()
        .filter(|p| window.contains(p))
        .copied()
        .collect();
    let resolution = params.default_resolution();
    let pad = fill_padding(cloud, params, resolution);
    let grid = RasterGrid::covering(cloud.window(), pad, resolution);
    let reference = fill_on_grid(grid, cloud.points(), params.r);
    let cells_in_window: Vec<usize> = (0..grid.len())
        .filter(|&i| window.contains(&grid.center(i)))
        .collect();
    let filled = |s: CellState| s != CellState::VacantUnbounded;

    let mut n_points = None;
    let mut n_filled = None;
    for n in 1..=cap {
        let level = ThinningLevel(n);
        let thinned = thin(cloud, params, level)?;
        if n_points.is_none() {
            let kept: Vec<Point> = thinned
                .points()
                .iter()
                .filter(|p| window.contains(p))
                .copied()
                .collect();
            if same_points(&kept, &inside) {
                n_points = Some(n);
            }
        }
        if n_filled.is_none() {
            let raster = fill_on_grid(grid, thinned.points(), params.r);
            if cells_in_window
                .iter()
                .all(|&i| filled(raster.states[i]) == filled(reference.states[i]))
            {
                n_filled = Some(n);
            }
        }
        if let (Some(a), Some(b)) = (n_points, n_filled) {
            return Ok(StabilityReport {
                window: *window,
                n_points: a,
                n_filled: b,
            });
        }
    }
    Err(Error::StabilityCapExceeded { cap })
}

fn same_points(a: &[Point], b: &[Point]) -> bool {
    // Thinning preserves order, so subsets of the same sequence compare
    // elementwise.
    a.len() == b.len() && a.iter().zip(b).all(|(p, q)| dist2(p, q) == 0.0)
}
