//! Lattice percolation of the Boolean-model vacancy.
//!
//! Vertex `z` of `Z_n^d` stands for the closed cube `k⁻¹[z, z+1]`; it is open
//! iff that cube misses the Boolean model. Channels are vertex-disjoint open
//! left-right paths in the l¹ graph ([`count_channels`]); vertical crossings
//! are bottom-top paths in the l∞ graph, and in 2D the minimal number of open
//! vertices on a crossing equals the maximal number of channels.

use alloc::format;
use alloc::vec::Vec;

use crate::geometry::GeometryParams;
use crate::point::{PointCloud, Window};
use crate::{Error, Result};

mod crossing;
mod diagnostics;
mod flow;

pub use crossing::{min_open_crossing, verify_crossing, Crossing};
pub use diagnostics::{
    blocked_cluster_diameter, blocked_diameter_replica, blocked_diameter_stats, crossing_probability,
    crossing_replica, CrossingRow, DecayRow, DecayTable, DEFAULT_FIT_RANGE,
};
pub use flow::{count_channels, count_channels_with, verify_channels, ChannelFlow, FlowStrategy};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeParams {
    pub k_scale: usize,
    pub n: usize,
}

impl LatticeParams {
    pub fn new(k_scale: usize, n: usize) -> Result<Self> {
        if k_scale == 0 {
            return Err(Error::param("k_scale", "must be at least 1"));
        }
        if n == 0 {
            return Err(Error::param("n", "lattice side must be at least 1"));
        }
        Ok(LatticeParams { k_scale, n })
    }

    /// `ceil(2√d / (r_c - r)) + 1`.
    pub fn default_k_scale(dim: usize, r: f64, r_c: f64) -> Result<usize> {
        if !(r_c > r) {
            return Err(Error::param("r_c", "must exceed r"));
        }
        Ok(libm::ceil(2.0 * libm::sqrt(dim as f64) / (r_c - r)) as usize + 1)
    }

    /// Side length `n / k_scale` of the scaled box.
    pub fn box_side(&self) -> f64 {
        self.n as f64 / self.k_scale as f64
    }

    /// Sampling window that covers the r-neighborhood of the scaled box.
    pub fn sampling_window(&self, dim: usize, geometry: &GeometryParams) -> Window {
        let side = self.box_side();
        let mut w = if dim == 3 {
            Window::cube(0.0, side)
        } else {
            Window::square(0.0, side)
        };
        w = w.grow(geometry.r);
        w
    }
}

/// Open/blocked state of each vertex of `Z_n^d`, indexed `z1 + n z2 + n² z3`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeField {
    dim: usize,
    n: usize,
    open: Vec<bool>,
}

impl LatticeField {
    pub fn from_open(dim: usize, n: usize, open: Vec<bool>) -> Result<Self> {
        crate::point::check_dim(dim)?;
        if open.len() != n.pow(dim as u32) {
            return Err(Error::param("open", format!("expected {} entries", n.pow(dim as u32))));
        }
        Ok(LatticeField { dim, n, open })
    }

    pub fn all_open(dim: usize, n: usize) -> Self {
        LatticeField {
            dim,
            n,
            open: alloc::vec![true; n.pow(dim as u32)],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.open.len()
    }

    pub fn is_empty(&self) -> bool {
        self.open.is_empty()
    }

    pub fn open_bits(&self) -> &[bool] {
        &self.open
    }

    #[inline]
    pub fn is_open(&self, v: usize) -> bool {
        self.open[v]
    }

    pub fn set_open(&mut self, v: usize, open: bool) {
        self.open[v] = open;
    }

    #[inline]
    pub fn index(&self, z: [usize; 3]) -> usize {
        z[0] + self.n * (z[1] + self.n * z[2])
    }

    #[inline]
    pub fn coords(&self, v: usize) -> [usize; 3] {
        [v % self.n, (v / self.n) % self.n, v / (self.n * self.n)]
    }

    pub fn open_count(&self) -> usize {
        self.open.iter().filter(|&&o| o).count()
    }

    /// l¹ neighbors (4 in 2D, 6 in 3D).
    pub(crate) fn for_each_l1_neighbor(&self, v: usize, mut f: impl FnMut(usize)) {
        let z = self.coords(v);
        for a in 0..self.dim {
            if z[a] > 0 {
                let mut w = z;
                w[a] -= 1;
                f(self.index(w));
            }
            if z[a] + 1 < self.n {
                let mut w = z;
                w[a] += 1;
                f(self.index(w));
            }
        }
    }

    /// l∞ neighbors (8 in 2D, 26 in 3D).
    pub(crate) fn for_each_linf_neighbor(&self, v: usize, mut f: impl FnMut(usize)) {
        let z = self.coords(v);
        let n = self.n as isize;
        let zr: isize = if self.dim == 3 { 1 } else { 0 };
        for dz in -zr..=zr {
            for dy in -1isize..=1 {
                for dx in -1isize..=1 {
                    if dx == 0 && dy == 0 && dz == 0 {
                        continue;
                    }
                    let w = [z[0] as isize + dx, z[1] as isize + dy, z[2] as isize + dz];
                    if (0..self.dim).all(|a| w[a] >= 0 && w[a] < n) {
                        f(self.index([w[0] as usize, w[1] as usize, w[2] as usize]));
                    }
                }
            }
        }
    }
}

/// Exact cube-ball test: vertex `z` is blocked iff some center lies within
/// `r` of the closed cube `k⁻¹[z, z+1]`.
pub fn build_field(cloud: &PointCloud, geometry: &GeometryParams, lattice: &LatticeParams) -> Result<LatticeField> {
    let dim = cloud.dim();
    let required = lattice.sampling_window(dim, geometry);
    if !cloud.window().covers(&required) {
        return Err(Error::WindowCoverage(format!(
            "the r-neighborhood of the box [0, {}]^{} is not inside the cloud window",
            lattice.box_side(),
            dim
        )));
    }
    let n = lattice.n;
    let k = lattice.k_scale as f64;
    let r = geometry.r;
    let mut field = LatticeField::all_open(dim, n);
    for p in cloud.points() {
        let mut lo = [0usize; 3];
        let mut hi = [1usize; 3];
        let mut skip = false;
        for a in 0..dim {
            // One extra cube on each side; the distance test decides.
            let a0 = libm::floor((p[a] - r) * k) - 1.0;
            let a1 = libm::floor((p[a] + r) * k) + 1.0;
            if a1 < 0.0 || a0 > (n - 1) as f64 {
                skip = true;
                break;
            }
            lo[a] = a0.max(0.0) as usize;
            hi[a] = (a1.min((n - 1) as f64) as usize) + 1;
        }
        if skip {
            continue;
        }
        for z2 in lo[2]..hi[2] {
            for z1 in lo[1]..hi[1] {
                for z0 in lo[0]..hi[0] {
                    let z = [z0, z1, z2];
                    if point_box_dist2(p, z, k, dim) <= r * r {
                        let v = field.index(z);
                        field.open[v] = false;
                    }
                }
            }
        }
    }
    Ok(field)
}

pub(crate) fn point_box_dist2(p: &crate::point::Point, z: [usize; 3], k: f64, dim: usize) -> f64 {
    let mut d2 = 0.0;
    for a in 0..dim {
        let lo = z[a] as f64 / k;
        let hi = (z[a] + 1) as f64 / k;
        let d = if p[a] < lo {
            lo - p[a]
        } else if p[a] > hi {
            p[a] - hi
        } else {
            0.0
        };
        d2 += d * d;
    }
    d2
}
