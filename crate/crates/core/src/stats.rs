//! Monte Carlo estimators and the small statistics toolbox they use.
//!
//! Estimators sample replica `i` of a process on substream `i` inside a
//! sampling window and evaluate on an interior window shrunk by a margin
//! (minus-sampling). Each estimator has a per-replica function so that
//! drivers may run replicas in any order or in parallel and then reduce with
//! [`MeanEstimate::from_samples`].

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::geometry::arcs::boundary_arcs;
use crate::geometry::raster::{fill_on_grid, RasterGrid};
use crate::geometry::{clusters_of_points, BooleanModel, CellState, GeometryParams};
use crate::point::{Point, PointCloud, Window};
use crate::spatial::CellIndex;
use crate::process::{sample_poisson_replica, ProcessParams};
use crate::thinning::{thin, ThinningLevel};
use crate::{Error, Result};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Mean and standard error of i.i.d. samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanEstimate {
    pub mean: f64,
    pub se: f64,
    pub count: usize,
}

impl MeanEstimate {
    pub fn from_samples(xs: &[f64]) -> Self {
        let m = xs.len();
        if m == 0 {
            return MeanEstimate {
                mean: f64::NAN,
                se: f64::NAN,
                count: 0,
            };
        }
        let mean = xs.iter().sum::<f64>() / m as f64;
        let se = if m > 1 {
            let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (m - 1) as f64;
            libm::sqrt(var / m as f64)
        } else {
            0.0
        };
        MeanEstimate { mean, se, count: m }
    }
}

/// Wilson score interval for `hits` successes out of `trials`.
pub fn wilson_interval(hits: usize, trials: usize, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * libm::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub points: usize,
}

/// Ordinary least squares `y = slope x + intercept`; `None` with fewer than
/// two points or constant `x`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    let m = xs.len().min(ys.len());
    if m < 2 {
        return None;
    }
    let mx = xs[..m].iter().sum::<f64>() / m as f64;
    let my = ys[..m].iter().sum::<f64>() / m as f64;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for i in 0..m {
        let dx = xs[i] - mx;
        let dy = ys[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some(LinearFit {
        slope,
        intercept: my - slope * mx,
        r2,
        points: m,
    })
}

/// Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    if a.is_empty() || b.is_empty() {
        return (0.0, 1.0);
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len(), b.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let x = if a[i] <= b[j] { a[i] } else { b[j] };
        while i < n && a[i] <= x {
            i += 1;
        }
        while j < m && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let ne = (n * m) as f64 / (n + m) as f64;
    let sq = libm::sqrt(ne);
    let lambda = (sq + 0.12 + 0.11 / sq) * d;
    (d, kolmogorov_q(lambda))
}

/// `Q(λ) = 2 Σ (-1)^{k-1} exp(-2k²λ²)`.
fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = sign * libm::exp(-2.0 * kf * kf * lambda * lambda);
        sum += term;
        if term.abs() < 1e-12 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorReport {
    pub estimate: f64,
    pub se: f64,
    pub replicas: usize,
    /// Evaluation window (sampling window shrunk by `margin`).
    pub window: Window,
    pub margin: f64,
    pub samples: Vec<f64>,
}

impl EstimatorReport {
    pub fn from_samples(samples: Vec<f64>, window: Window, margin: f64) -> Self {
        let m = MeanEstimate::from_samples(&samples);
        EstimatorReport {
            estimate: m.mean,
            se: m.se,
            replicas: m.count,
            window,
            margin,
            samples,
        }
    }
}

/// Minus-sampling margin: `2nr` when thinned at level `n`, otherwise `extra`.
pub fn thinning_margin(geometry: &GeometryParams, level: Option<ThinningLevel>, extra: f64) -> f64 {
    match level {
        Some(l) => 2.0 * l.get() as f64 * geometry.r + extra,
        None => extra,
    }
}

fn interior(window: &Window, margin: f64) -> Result<Window> {
    let w = window.shrink(margin);
    if (0..w.dim).any(|k| w.side(k) <= 0.0) {
        return Err(Error::param("window", "too small for the boundary margin"));
    }
    Ok(w)
}

fn realize(
    window: &Window,
    process: &ProcessParams,
    geometry: &GeometryParams,
    level: Option<ThinningLevel>,
    replica: u64,
) -> Result<(PointCloud, PointCloud)> {
    let raw = sample_poisson_replica(window, process, replica)?;
    let kept = match level {
        Some(l) => thin(&raw, geometry, l)?,
        None => raw.clone(),
    };
    Ok((raw, kept))
}

/// Counts of the raw and the (optionally thinned) replica in the interior
/// window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountPair {
    pub raw: usize,
    pub kept: usize,
}

pub fn point_count_replica(
    window: &Window,
    process: &ProcessParams,
    geometry: &GeometryParams,
    level: Option<ThinningLevel>,
    replica: u64,
) -> Result<CountPair> {
    let inner = interior(window, thinning_margin(geometry, level, 0.0))?;
    let (raw, kept) = realize(window, process, geometry, level, replica)?;
    let pair = CountPair {
        raw: raw.count_in(&inner),
        kept: kept.count_in(&inner),
    };
    assert!(pair.kept <= pair.raw, "thinning produced points not in the input");
    Ok(pair)
}

/// Points per unit volume of the (thinned) process.
pub fn estimate_point_intensity(
    window: &Window,
    process: &ProcessParams,
    geometry: &GeometryParams,
    level: Option<ThinningLevel>,
    replicas: usize,
) -> Result<EstimatorReport> {
    let margin = thinning_margin(geometry, level, 0.0);
    let inner = interior(window, margin)?;
    let vol = inner.volume();
    let mut samples = Vec::with_capacity(replicas);
    for i in 0..replicas {
        let c = point_count_replica(window, process, geometry, level, i as u64)?;
        samples.push(c.kept as f64 / vol);
    }
    Ok(EstimatorReport::from_samples(samples, inner, margin))
}

/// Vacant area fraction of one replica over the interior window.
///
/// The margin keeps the interior clear of truncation effects: `r` for the
/// Boolean model, plus `2nr` under thinning, plus the largest cluster
/// diameter when islands matter and no thinning bounds it.
pub fn vacancy_replica(
    window: &Window,
    process: &ProcessParams,
    geometry: &GeometryParams,
    level: Option<ThinningLevel>,
    filled: bool,
    replica: u64,
) -> Result<(f64, f64)> {
    let (_, kept) = realize(window, process, geometry, level, replica)?;
    let mut margin = thinning_margin(geometry, level, geometry.r);
    if filled && level.is_none() {
        let clusters = clusters_of_points(kept.points(), kept.dim(), geometry.r);
        margin += clusters.max_diameter(&kept);
    }
    let inner = interior(window, margin)?;
    let h = geometry.default_resolution();
    let grid = RasterGrid::covering(window, geometry.r + 2.0 * h, h);
    let raster = fill_on_grid(grid, kept.points(), geometry.r);
    let frac = raster
        .vacant_fraction(&inner, filled)
        .ok_or_else(|| Error::param("window", "interior window contains no raster cell"))?;
    Ok((frac, margin))
}

pub fn estimate_vacancy(
    window: &Window,
    process: &ProcessParams,
    geometry: &GeometryParams,
    level: Option<ThinningLevel>,
    filled: bool,
    replicas: usize,
) -> Result<EstimatorReport> {
    let mut samples = Vec::with_capacity(replicas);
    let mut margin: f64 = 0.0;
    for i in 0..replicas {
        let (v, m) = vacancy_replica(window, process, geometry, level, filled, i as u64)?;
        samples.push(v);
        margin = margin.max(m);
    }
    Ok(EstimatorReport::from_samples(samples, window.shrink(margin), margin))
}

/// Vacancy of the Boolean model by uniform point probes, independent of the
/// raster code.
pub fn vacancy_by_probes(cloud: &PointCloud, geometry: &GeometryParams, window: &Window, probes: &[Point]) -> f64 {
    let model = BooleanModel::new(cloud, geometry);
    let mut vacant = 0usize;
    for u in probes {
        let mut p = [0.0; 3];
        for k in 0..window.dim {
            p[k] = window.lo[k] + u[k] * window.side(k);
        }
        if !model.covered(&p) {
            vacant += 1;
        }
    }
    vacant as f64 / probes.len().max(1) as f64
}

/// `exp(-λπr²)`, the vacancy of a planar Poisson Boolean model.
pub fn poisson_vacancy_2d(intensity: f64, r: f64) -> f64 {
    libm::exp(-intensity * PI * r * r)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PerimeterBreakdown {
    /// Boundary length of the filled model with arc midpoint in the window.
    pub perimeter: f64,
    /// Length of the Boolean-model boundary with midpoint in the window.
    pub boolean_perimeter: f64,
    pub arcs_total: usize,
    pub arcs_counted: usize,
    /// Arcs facing an island (interior to the filled model).
    pub island_arcs: usize,
    /// Pairs at center distance exactly `2r`.
    pub tangencies: usize,
}

/// Exact arc decomposition of the boundary of the filled model, with arcs
/// classified by the raster state just outside their midpoint. Arcs are
/// attributed to `window` by their midpoint.
pub fn filled_perimeter(cloud: &PointCloud, geometry: &GeometryParams, window: &Window) -> Result<PerimeterBreakdown> {
    if cloud.dim() != 2 {
        return Err(Error::UnsupportedDimension {
            op: "filled_perimeter",
            dim: cloud.dim(),
            supported: "2",
        });
    }
    let r = geometry.r;
    let pts = cloud.points();
    let mut out = PerimeterBreakdown::default();
    if pts.is_empty() {
        return Ok(out);
    }
    let h = geometry.default_resolution();
    let clusters = clusters_of_points(pts, 2, r);
    let pad = r + clusters.max_diameter(cloud) + 2.0 * h;
    let grid = RasterGrid::covering(cloud.window(), pad, h);
    let raster = fill_on_grid(grid, pts, r);
    let model = BooleanModel::from_points(pts, 2, r);

    CellIndex::new(pts, 2, 2.0 * r).for_each_pair_within(2.0 * r, |_, _, d2| {
        if libm::sqrt(d2) == 2.0 * r {
            out.tangencies += 1;
        }
    });

    for arc in boundary_arcs(pts, r) {
        out.arcs_total += 1;
        let mid = 0.5 * (arc.start + arc.end);
        let m = arc.point_at(pts, r, mid);
        if !window.contains(&[m[0], m[1], 0.0]) {
            continue;
        }
        let len = arc.length(r);
        out.boolean_perimeter += len;
        let c = pts[arc.circle];
        let dir = [libm::cos(mid), libm::sin(mid)];
        // Step outward until the probe is vacant both exactly and in the
        // raster; short arcs squeezed between disks may need a few tries.
        let mut state = CellState::VacantUnbounded;
        for step in [0.75, 1.5, 3.0, 6.0] {
            let q = [c[0] + (r + step * h) * dir[0], c[1] + (r + step * h) * dir[1], 0.0];
            if model.covered(&q) {
                continue;
            }
            state = raster.state_at(&q);
            if state != CellState::Covered {
                break;
            }
        }
        match state {
            CellState::VacantIsland => out.island_arcs += 1,
            _ => {
                out.arcs_counted += 1;
                out.perimeter += len;
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceIntensityEstimate {
    pub estimate: f64,
    pub se: f64,
    pub replicas: usize,
    pub window: Window,
    pub margin: f64,
    pub arcs_total: usize,
    pub arcs_counted: usize,
    pub island_arcs: usize,
    /// Degenerate tangencies met; these arcs are kept as computed.
    pub tangencies: usize,
}

impl SurfaceIntensityEstimate {
    /// Combines per-replica outputs of [`surface_intensity_replica`].
    pub fn from_replicas(window: &Window, samples: &[f64], parts: &[PerimeterBreakdown], inners: &[Window]) -> Self {
        let m = MeanEstimate::from_samples(samples);
        let margin = inners.iter().map(|w| w.lo[0] - window.lo[0]).fold(0.0, f64::max);
        SurfaceIntensityEstimate {
            estimate: m.mean,
            se: m.se,
            replicas: m.count,
            window: window.shrink(margin),
            margin,
            arcs_total: parts.iter().map(|b| b.arcs_total).sum(),
            arcs_counted: parts.iter().map(|b| b.arcs_counted).sum(),
            island_arcs: parts.iter().map(|b| b.island_arcs).sum(),
            tangencies: parts.iter().map(|b| b.tangencies).sum(),
        }
    }
}

pub fn surface_intensity_replica(
    window: &Window,
    process: &ProcessParams,
    geometry: &GeometryParams,
    level: Option<ThinningLevel>,
    replica: u64,
) -> Result<(f64, PerimeterBreakdown, Window)> {
    let (_, kept) = realize(window, process, geometry, level, replica)?;
    let mut margin = thinning_margin(geometry, level, geometry.r);
    if level.is_none() {
        let clusters = clusters_of_points(kept.points(), kept.dim(), geometry.r);
        margin += clusters.max_diameter(&kept);
    }
    let inner = interior(window, margin)?;
    let b = filled_perimeter(&kept, geometry, &inner)?;
    Ok((b.perimeter / inner.volume(), b, inner))
}

/// Boundary length of the filled model per unit area.
pub fn estimate_surface_intensity(
    window: &Window,
    process: &ProcessParams,
    geometry: &GeometryParams,
    level: Option<ThinningLevel>,
    replicas: usize,
) -> Result<SurfaceIntensityEstimate> {
    if process.dim != 2 {
        return Err(Error::UnsupportedDimension {
            op: "estimate_surface_intensity",
            dim: process.dim,
            supported: "2",
        });
    }
    let mut samples = Vec::with_capacity(replicas);
    let mut parts = Vec::with_capacity(replicas);
    let mut inners = Vec::with_capacity(replicas);
    for i in 0..replicas {
        let (s, b, inner) = surface_intensity_replica(window, process, geometry, level, i as u64)?;
        samples.push(s);
        parts.push(b);
        inners.push(inner);
    }
    Ok(SurfaceIntensityEstimate::from_replicas(window, &samples, &parts, &inners))
}
