//! Conservative estimate of the Lipschitz-graph radius of a planar disk
//! cluster boundary.
//!
//! Without corners the boundary is a single circle whose graph radius is
//! `r/√2`. With corners, every corner `p` bounds the estimate by half of the
//! smallest of: the distance to the nearest other boundary feature, the
//! opening cap `r·cos(α/2)` (α the angle between the two radii at `p`) and
//! `r/√2`.

use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use super::arcs::{boundary_arcs, corners, distance_to_arc, Arc};
use super::GeometryParams;
use crate::point::Point;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaEstimate {
    pub value: f64,
    pub corner_count: usize,
    /// Always true: the estimate never exceeds the true radius.
    pub conservative: bool,
}

pub fn delta_hat(points: &[Point], dim: usize, params: &GeometryParams) -> Result<DeltaEstimate> {
    if dim != 2 {
        return Err(Error::UnsupportedDimension {
            op: "delta_hat",
            dim,
            supported: "2",
        });
    }
    if points.is_empty() {
        return Err(Error::param("cluster_points", "cluster must be nonempty"));
    }
    let r = params.r;
    // Two disjoint disks of one cluster leave a channel of width d - 2r
    // that no corner sees; the graph radius cannot exceed it.
    let mut gap = f64::INFINITY;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            let d = planar_dist([a[0], a[1]], [b[0], b[1]]);
            if d >= 2.0 * r {
                gap = gap.min(d - 2.0 * r);
            }
        }
    }
    let corners = corners(points, r);
    if corners.is_empty() {
        return Ok(DeltaEstimate {
            value: (r * FRAC_1_SQRT_2).min(0.5 * gap),
            corner_count: 0,
            conservative: true,
        });
    }
    let arcs = boundary_arcs(points, r);
    let ends: Vec<([f64; 2], [f64; 2])> = arcs.iter().map(|a| a.endpoints(points, r)).collect();
    let tol = 1e-9 * r;

    let mut best = gap.min(r * FRAC_1_SQRT_2);
    for (ci, corner) in corners.iter().enumerate() {
        let p = corner.point;
        let mut feature = f64::INFINITY;
        for (cj, other) in corners.iter().enumerate() {
            if cj != ci {
                feature = feature.min(planar_dist(p, other.point));
            }
        }
        for (arc, &(a, b)) in arcs.iter().zip(ends.iter()) {
            if adjacent(arc, a, b, p, tol) {
                continue;
            }
            feature = feature.min(distance_to_arc(p, arc, points, r));
        }
        let opening = r * libm::cos(0.5 * corner.angle);
        best = best.min(feature).min(opening.max(0.0));
    }
    Ok(DeltaEstimate {
        value: 0.5 * best,
        corner_count: corners.len(),
        conservative: true,
    })
}

fn adjacent(arc: &Arc, a: [f64; 2], b: [f64; 2], p: [f64; 2], tol: f64) -> bool {
    !arc.is_full() && (planar_dist(a, p) <= tol || planar_dist(b, p) <= tol)
}

fn planar_dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    libm::hypot(a[0] - b[0], a[1] - b[1])
}
