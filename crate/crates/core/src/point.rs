//! Point clouds and their axis-aligned sampling windows.
//!
//! Points are stored as `[f64; 3]` for both supported dimensions; in 2D the
//! third coordinate is always zero, so Euclidean distances need no branching.

use alloc::format;
use alloc::vec::Vec;

use crate::{Error, Result};

pub type Point = [f64; 3];

#[inline]
pub fn dist2(a: &Point, b: &Point) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    dx * dx + dy * dy + dz * dz
}

#[inline]
pub fn dist(a: &Point, b: &Point) -> f64 {
    libm::sqrt(dist2(a, b))
}

/// Closed axis-aligned box `[lo, hi]`. Axes beyond `dim` are pinned to zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub dim: usize,
    pub lo: Point,
    pub hi: Point,
}

impl Window {
    pub fn new(dim: usize, lo: &[f64], hi: &[f64]) -> Result<Self> {
        check_dim(dim)?;
        if lo.len() != dim || hi.len() != dim {
            return Err(Error::param("window", "corner length must equal dim"));
        }
        let mut w = Window {
            dim,
            lo: [0.0; 3],
            hi: [0.0; 3],
        };
        for k in 0..dim {
            if !lo[k].is_finite() || !hi[k].is_finite() || hi[k] < lo[k] {
                return Err(Error::param("window", "corners must be finite with lo <= hi"));
            }
            w.lo[k] = lo[k];
            w.hi[k] = hi[k];
        }
        Ok(w)
    }

    pub fn square(lo: f64, hi: f64) -> Self {
        Window {
            dim: 2,
            lo: [lo, lo, 0.0],
            hi: [hi, hi, 0.0],
        }
    }

    pub fn cube(lo: f64, hi: f64) -> Self {
        Window {
            dim: 3,
            lo: [lo; 3],
            hi: [hi; 3],
        }
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim).map(|k| self.hi[k] - self.lo[k]).product()
    }

    pub fn side(&self, axis: usize) -> f64 {
        self.hi[axis] - self.lo[axis]
    }

    pub fn contains(&self, p: &Point) -> bool {
        (0..self.dim).all(|k| p[k] >= self.lo[k] && p[k] <= self.hi[k])
    }

    /// Shrinks every side by `margin`; sides that would invert collapse to
    /// their midpoint.
    pub fn shrink(&self, margin: f64) -> Window {
        let mut w = *self;
        for k in 0..self.dim {
            let mid = 0.5 * (self.lo[k] + self.hi[k]);
            w.lo[k] = (self.lo[k] + margin).min(mid);
            w.hi[k] = (self.hi[k] - margin).max(mid);
        }
        w
    }

    pub fn grow(&self, margin: f64) -> Window {
        let mut w = *self;
        for k in 0..self.dim {
            w.lo[k] -= margin;
            w.hi[k] += margin;
        }
        w
    }

    pub fn covers(&self, other: &Window) -> bool {
        (0..self.dim).all(|k| self.lo[k] <= other.lo[k] && self.hi[k] >= other.hi[k])
    }

    pub fn translate(&self, t: &Point) -> Window {
        let mut w = *self;
        for k in 0..self.dim {
            w.lo[k] += t[k];
            w.hi[k] += t[k];
        }
        w
    }
}

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 3 {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension {
            op: "point cloud",
            dim,
            supported: "2 or 3",
        })
    }
}

/// A finite simple point cloud together with its sampling window.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    window: Window,
    points: Vec<Point>,
}

impl PointCloud {
    /// Validates the window containment and distinctness invariants.
    pub fn new(window: Window, points: Vec<Point>) -> Result<Self> {
        check_dim(window.dim)?;
        for (i, p) in points.iter().enumerate() {
            if p.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidCloud(format!("point {i} is not finite")));
            }
            if window.dim == 2 && p[2] != 0.0 {
                return Err(Error::InvalidCloud(format!(
                    "point {i} has a third coordinate in a 2D cloud"
                )));
            }
            if !window.contains(p) {
                return Err(Error::InvalidCloud(format!("point {i} lies outside the window")));
            }
        }
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&a, &b| points[a].partial_cmp(&points[b]).unwrap());
        for w in order.windows(2) {
            if points[w[0]] == points[w[1]] {
                return Err(Error::InvalidCloud(format!(
                    "points {} and {} coincide",
                    w[0], w[1]
                )));
            }
        }
        Ok(PointCloud { window, points })
    }

    /// Builds a 2D cloud from planar coordinates.
    pub fn planar(window: Window, xy: &[[f64; 2]]) -> Result<Self> {
        Self::new(window, xy.iter().map(|p| [p[0], p[1], 0.0]).collect())
    }

    pub fn empty(window: Window) -> Self {
        PointCloud {
            window,
            points: Vec::new(),
        }
    }

    /// Subset of `self` that keeps the window; distinctness and containment
    /// are inherited.
    pub(crate) fn subset(&self, keep: impl Fn(usize) -> bool) -> Self {
        PointCloud {
            window: self.window,
            points: (0..self.points.len())
                .filter(|&i| keep(i))
                .map(|i| self.points[i])
                .collect(),
        }
    }

    pub(crate) fn from_parts_unchecked(window: Window, points: Vec<Point>) -> Self {
        PointCloud { window, points }
    }

    pub fn dim(&self) -> usize {
        self.window.dim
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Shifts points and window by `t`.
    pub fn translate(&self, t: &Point) -> Self {
        let mut t = *t;
        if self.dim() == 2 {
            t[2] = 0.0;
        }
        PointCloud {
            window: self.window.translate(&t),
            points: self
                .points
                .iter()
                .map(|p| [p[0] + t[0], p[1] + t[1], p[2] + t[2]])
                .collect(),
        }
    }

    /// Replaces the window, checking that it still contains every point.
    pub fn with_window(&self, window: Window) -> Result<Self> {
        if window.dim != self.dim() {
            return Err(Error::param("window", "dimension mismatch"));
        }
        if let Some(i) = self.points.iter().position(|p| !window.contains(p)) {
            return Err(Error::InvalidCloud(format!("point {i} lies outside the new window")));
        }
        Ok(PointCloud {
            window,
            points: self.points.clone(),
        })
    }

    /// Number of points inside `w`.
    pub fn count_in(&self, w: &Window) -> usize {
        self.points.iter().filter(|p| w.contains(p)).count()
    }
}
