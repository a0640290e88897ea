//! Stationary Poisson sampling and admissibility diagnostics.
//!
//! Random streams are ChaCha8 ([`rand_chacha::ChaCha8Rng`]) keyed by the
//! master seed, with the replica index selecting the stream. Replica `i` of a
//! study therefore draws the same numbers regardless of how replicas are
//! scheduled. Changing this scheme is a versioned, golden-file-breaking
//! change; see [`RNG_SCHEME`].

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::geometry::{clusters_of_points, GeometryParams};
use crate::point::{dist2, Point, PointCloud, Window};
use crate::spatial::CellIndex;
use crate::{Error, Result};

pub const RNG_SCHEME: &str = "chacha8-stream-v1";

/// Stream `stream` of the generator keyed by `seed`.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProcessParams {
    pub intensity: f64,
    pub seed: u64,
    pub dim: usize,
}

impl ProcessParams {
    pub fn new(intensity: f64, seed: u64, dim: usize) -> Result<Self> {
        if !(intensity > 0.0 && intensity.is_finite()) {
            return Err(Error::param("intensity", "must be positive and finite"));
        }
        crate::point::check_dim(dim)?;
        Ok(ProcessParams {
            intensity,
            seed,
            dim,
        })
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        ProcessParams { seed, ..*self }
    }
}

/// Assumed critical radius; never computed here, always supplied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubcriticalityConfig {
    pub r_c: f64,
}

impl SubcriticalityConfig {
    pub fn check(&self, geometry: &GeometryParams) -> Result<()> {
        if geometry.r < self.r_c {
            Ok(())
        } else {
            Err(Error::param(
                "r",
                alloc::format!("r = {} is not below the assumed r_c = {}", geometry.r, self.r_c),
            ))
        }
    }
}

/// Samples the process in `window` on stream 0 of `params.seed`.
pub fn sample_poisson(window: &Window, params: &ProcessParams) -> Result<PointCloud> {
    sample_poisson_replica(window, params, 0)
}

/// Samples replica `replica` (an independent substream of the same seed).
pub fn sample_poisson_replica(
    window: &Window,
    params: &ProcessParams,
    replica: u64,
) -> Result<PointCloud> {
    if window.dim != params.dim {
        return Err(Error::param("window", "dimension differs from the process dimension"));
    }
    let volume = window.volume();
    if volume <= 0.0 {
        return Ok(PointCloud::empty(*window));
    }
    let mut rng = substream(params.seed, replica);
    let mean = params.intensity * volume;
    let count = Poisson::new(mean)
        .map_err(|_| Error::param("intensity", "Poisson mean out of range"))?
        .sample(&mut rng) as usize;
    let mut points: Vec<Point> = Vec::with_capacity(count);
    for _ in 0..count {
        let mut p = [0.0; 3];
        for (k, c) in p.iter_mut().enumerate().take(window.dim) {
            let u: f64 = rng.random();
            *c = window.lo[k] + u * window.side(k);
        }
        points.push(p);
    }
    Ok(PointCloud::from_parts_unchecked(*window, points))
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AdmissibilityReport {
    /// Smallest `| |x - y| - 2r |` over pairs within `2r + tolerance`;
    /// infinite when there are none.
    pub min_pair_gap_to_2r: f64,
    pub max_cluster_size: usize,
    pub max_cluster_diameter: f64,
    pub equidistance_violations: usize,
}

pub fn default_equidistance_tolerance(params: &GeometryParams) -> f64 {
    1e-12 * params.r
}

/// Exhaustive pairwise scan accelerated by a uniform cell hash.
pub fn admissibility_report(
    cloud: &PointCloud,
    params: &GeometryParams,
    tolerance: f64,
) -> AdmissibilityReport {
    if cloud.is_empty() {
        return AdmissibilityReport::default();
    }
    let reach = 2.0 * params.r + tolerance.max(0.0);
    let index = CellIndex::new(cloud.points(), cloud.dim(), reach);
    let mut gap = f64::INFINITY;
    let mut violations = 0;
    let pts = cloud.points();
    index.for_each_pair_within(reach, |i, j, _| {
        let g = (libm::sqrt(dist2(&pts[i], &pts[j])) - 2.0 * params.r).abs();
        gap = gap.min(g);
        if g < tolerance {
            violations += 1;
        }
    });
    let clusters = clusters_of_points(pts, cloud.dim(), params.r);
    AdmissibilityReport {
        min_pair_gap_to_2r: gap,
        max_cluster_size: clusters.max_size(),
        max_cluster_diameter: clusters.max_diameter(cloud),
        equidistance_violations: violations,
    }
}
