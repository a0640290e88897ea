//! Exact boundary structure of a planar union of equal disks.
//!
//! Each circle contributes the angular arcs not strictly inside another
//! disk; arc endpoints are the corners of the union.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use crate::point::Point;
use crate::spatial::CellIndex;

/// Arc of circle `circle` for angles in `[start, end]`, `start` in `[0, 2π)`
/// and `start < end <= start + 2π`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub circle: usize,
    pub start: f64,
    pub end: f64,
}

impl Arc {
    pub fn is_full(&self) -> bool {
        self.end - self.start >= TAU
    }

    pub fn length(&self, r: f64) -> f64 {
        r * (self.end - self.start)
    }

    pub fn point_at(&self, centers: &[Point], r: f64, angle: f64) -> [f64; 2] {
        let c = centers[self.circle];
        [c[0] + r * libm::cos(angle), c[1] + r * libm::sin(angle)]
    }

    pub fn endpoints(&self, centers: &[Point], r: f64) -> ([f64; 2], [f64; 2]) {
        (
            self.point_at(centers, r, self.start),
            self.point_at(centers, r, self.end),
        )
    }

    pub fn contains_angle(&self, angle: f64) -> bool {
        if self.is_full() {
            return true;
        }
        let t = self.start + wrap(angle - self.start);
        t <= self.end
    }
}

/// Angle reduced to `[0, 2π)`.
pub(crate) fn wrap(a: f64) -> f64 {
    let w = a - TAU * libm::floor(a / TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Open angular intervals of circle `i` that lie strictly inside other
/// disks, as `(start, end)` pairs with `start` in `[0, 2π)`.
fn covered_intervals(centers: &[Point], r: f64, i: usize, index: &CellIndex) -> Vec<(f64, f64)> {
    let ci = centers[i];
    let mut out = Vec::new();
    index.for_each_within(&ci, 2.0 * r, |j, d2| {
        if j == i {
            return;
        }
        let d = libm::sqrt(d2);
        let ratio = d / (2.0 * r);
        if ratio >= 1.0 || d == 0.0 {
            return;
        }
        let cj = centers[j];
        let theta = libm::atan2(cj[1] - ci[1], cj[0] - ci[0]);
        let half = libm::acos(ratio);
        out.push((wrap(theta - half), 2.0 * half));
    });
    out.into_iter().map(|(s, w)| (s, s + w)).collect()
}

/// Uncovered arcs of every circle.
pub fn boundary_arcs(centers: &[Point], r: f64) -> Vec<Arc> {
    let mut arcs = Vec::new();
    if centers.is_empty() {
        return arcs;
    }
    let index = CellIndex::new(centers, 2, 2.0 * r);
    for i in 0..centers.len() {
        arcs.extend(circle_arcs(i, &covered_intervals(centers, r, i, &index)));
    }
    arcs
}

fn circle_arcs(i: usize, covered: &[(f64, f64)]) -> Vec<Arc> {
    if covered.is_empty() {
        return alloc::vec![Arc {
            circle: i,
            start: 0.0,
            end: TAU,
        }];
    }
    // Unroll wrapping intervals onto [0, 2π) and merge.
    let mut iv: Vec<(f64, f64)> = Vec::new();
    for &(s, e) in covered {
        if e > TAU {
            iv.push((s, TAU));
            iv.push((0.0, e - TAU));
        } else {
            iv.push((s, e));
        }
    }
    iv.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (s, e) in iv {
        match merged.last_mut() {
            Some(last) if s <= last.1 => last.1 = last.1.max(e),
            _ => merged.push((s, e)),
        }
    }
    if merged.len() == 1 && merged[0].0 <= 0.0 && merged[0].1 >= TAU {
        return Vec::new();
    }
    let mut gaps: Vec<(f64, f64)> = Vec::new();
    let mut cursor = 0.0;
    for &(s, e) in &merged {
        if s > cursor {
            gaps.push((cursor, s));
        }
        cursor = cursor.max(e);
    }
    if cursor < TAU {
        gaps.push((cursor, TAU));
    }
    // Join a gap ending at 2π with one starting at 0.
    if gaps.len() >= 2 && gaps[0].0 == 0.0 && gaps[gaps.len() - 1].1 == TAU {
        let first = gaps.remove(0);
        let last = gaps.last_mut().unwrap();
        last.1 = TAU + first.1;
    }
    gaps.into_iter()
        .filter(|(s, e)| e - s > 1e-14)
        .map(|(s, e)| Arc {
            circle: i,
            start: s,
            end: e,
        })
        .collect()
}

/// Pairwise circle intersection not strictly inside a third disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Corner {
    pub point: [f64; 2],
    pub circles: (usize, usize),
    /// Angle between the two radii at the corner, in `[0, π]`. Equals π at a
    /// tangency.
    pub angle: f64,
}

pub fn corners(centers: &[Point], r: f64) -> Vec<Corner> {
    let mut out = Vec::new();
    if centers.len() < 2 {
        return out;
    }
    let index = CellIndex::new(centers, 2, 2.0 * r);
    index.for_each_pair_within(2.0 * r, |i, j, d2| {
        let ci = centers[i];
        let cj = centers[j];
        let d = libm::sqrt(d2);
        if d == 0.0 {
            return;
        }
        let a = 0.5 * d;
        let h = libm::sqrt((r * r - a * a).max(0.0));
        let ux = (cj[0] - ci[0]) / d;
        let uy = (cj[1] - ci[1]) / d;
        let mx = ci[0] + a * ux;
        let my = ci[1] + a * uy;
        let candidates: &[[f64; 2]] = if h == 0.0 {
            &[[mx, my]]
        } else {
            &[[mx - h * uy, my + h * ux], [mx + h * uy, my - h * ux]]
        };
        for &p in candidates {
            let q = [p[0], p[1], 0.0];
            let mut inside = false;
            index.for_each_within(&q, r, |k, d2k| {
                if k != i && k != j && d2k < r * r {
                    inside = true;
                }
            });
            if !inside {
                out.push(Corner {
                    point: p,
                    circles: (i, j),
                    angle: radius_angle(&ci, &cj, p),
                });
            }
        }
    });
    out
}

fn radius_angle(ci: &Point, cj: &Point, p: [f64; 2]) -> f64 {
    let a = [p[0] - ci[0], p[1] - ci[1]];
    let b = [p[0] - cj[0], p[1] - cj[1]];
    let na = libm::hypot(a[0], a[1]);
    let nb = libm::hypot(b[0], b[1]);
    let cos = ((a[0] * b[0] + a[1] * b[1]) / (na * nb)).clamp(-1.0, 1.0);
    libm::acos(cos).clamp(0.0, PI)
}

/// Euclidean distance from `p` to an arc.
pub fn distance_to_arc(p: [f64; 2], arc: &Arc, centers: &[Point], r: f64) -> f64 {
    let c = centers[arc.circle];
    let dx = p[0] - c[0];
    let dy = p[1] - c[1];
    let rho = libm::hypot(dx, dy);
    if rho == 0.0 {
        return r;
    }
    if arc.contains_angle(libm::atan2(dy, dx)) {
        return (rho - r).abs();
    }
    let (a, b) = arc.endpoints(centers, r);
    libm::hypot(p[0] - a[0], p[1] - a[1]).min(libm::hypot(p[0] - b[0], p[1] - b[1]))
}
