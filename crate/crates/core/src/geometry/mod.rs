//! Boolean-model geometry driven by a point cloud.
//!
//! The Boolean model is the closed union of radius-`r` balls around the
//! points. Its filled-up version additionally contains every bounded
//! component of the complement ("islands"); see [`raster`] for the flood-fill
//! construction.

use alloc::vec::Vec;

use crate::point::{dist, dist2, Point, PointCloud};
use crate::spatial::CellIndex;
use crate::union_find::DisjointSet;
use crate::{Error, Result};

pub mod arcs;
pub mod delta;
pub mod raster;

pub use delta::{delta_hat, DeltaEstimate};
pub use raster::{fill, CellState, FilledRaster, RasterGrid};

/// Ball radius of the Boolean model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryParams {
    pub r: f64,
}

impl GeometryParams {
    pub fn new(r: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::param("r", "ball radius must be positive and finite"));
        }
        Ok(GeometryParams { r })
    }

    /// Default raster resolution for flood fills.
    pub fn default_resolution(&self) -> f64 {
        self.r / 8.0
    }
}

/// Partition of a cloud into overlap-connected clusters.
///
/// Clusters are ordered by their smallest member and list members in
/// ascending order, so `clusters[c][0]` is the cluster's canonical id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterSet {
    pub clusters: Vec<Vec<usize>>,
    pub cluster_of: Vec<usize>,
}

impl ClusterSet {
    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    /// Canonical id (smallest member index) of the cluster holding `point`.
    pub fn canonical_id(&self, point: usize) -> usize {
        self.clusters[self.cluster_of[point]][0]
    }

    pub fn max_size(&self) -> usize {
        self.clusters.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Largest center-to-center distance inside cluster `c`.
    pub fn diameter(&self, cloud: &PointCloud, c: usize) -> f64 {
        set_diameter(cloud.points(), &self.clusters[c])
    }

    pub fn max_diameter(&self, cloud: &PointCloud) -> f64 {
        (0..self.len())
            .map(|c| self.diameter(cloud, c))
            .fold(0.0, f64::max)
    }
}

pub(crate) fn set_diameter(points: &[Point], members: &[usize]) -> f64 {
    let mut best = 0.0f64;
    for (a, &i) in members.iter().enumerate() {
        for &j in &members[a + 1..] {
            best = best.max(dist2(&points[i], &points[j]));
        }
    }
    libm::sqrt(best)
}

/// Union-find partition where `i` and `j` join iff `|p_i - p_j| < 2r`.
pub fn clusters(cloud: &PointCloud, params: &GeometryParams) -> ClusterSet {
    clusters_of_points(cloud.points(), cloud.dim(), params.r)
}

pub(crate) fn clusters_of_points(points: &[Point], dim: usize, r: f64) -> ClusterSet {
    let mut dsu = DisjointSet::new(points.len());
    if !points.is_empty() {
        let reach = 2.0 * r;
        let index = CellIndex::new(points, dim, reach);
        index.for_each_pair_within(reach, |i, j, d2| {
            if d2 < reach * reach {
                dsu.union(i, j);
            }
        });
    }
    let clusters = dsu.groups();
    let mut cluster_of = alloc::vec![0; points.len()];
    for (c, members) in clusters.iter().enumerate() {
        for &i in members {
            cluster_of[i] = c;
        }
    }
    ClusterSet {
        clusters,
        cluster_of,
    }
}

/// Closed-ball membership test for the Boolean model.
pub fn covered(point: &Point, cloud: &PointCloud, params: &GeometryParams) -> bool {
    cloud
        .points()
        .iter()
        .any(|c| dist(point, c) <= params.r)
}

/// Indexed Boolean model for repeated membership queries.
pub struct BooleanModel<'a> {
    index: CellIndex<'a>,
    r: f64,
}

impl<'a> BooleanModel<'a> {
    pub fn new(cloud: &'a PointCloud, params: &GeometryParams) -> Self {
        Self::from_points(cloud.points(), cloud.dim(), params.r)
    }

    pub(crate) fn from_points(points: &'a [Point], dim: usize, r: f64) -> Self {
        BooleanModel {
            index: CellIndex::new(points, dim, r),
            r,
        }
    }

    pub fn covered(&self, p: &Point) -> bool {
        self.index.nearest_within(p, self.r).is_some()
    }

    /// Distance to the nearest center when it is at most `r`.
    pub fn nearest_center(&self, p: &Point) -> Option<f64> {
        self.index.nearest_within(p, self.r)
    }
}

/// Closed-form constants of the minimal-smoothness guarantee for a thinned
/// cloud at level `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothnessCertificate {
    pub delta: f64,
    pub lipschitz_bound: f64,
    pub diameter_bound: f64,
}

impl SmoothnessCertificate {
    pub fn for_level(n: usize, params: &GeometryParams) -> Self {
        let n = n as f64;
        SmoothnessCertificate {
            delta: 1.0 / n,
            lipschitz_bound: libm::sqrt(2.0 * n * params.r),
            diameter_bound: 2.0 * n * params.r,
        }
    }
}
