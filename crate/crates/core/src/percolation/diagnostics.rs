//! Monte Carlo diagnostics of the subcritical lattice field.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use super::{build_field, min_open_crossing, LatticeField, LatticeParams};
use crate::geometry::GeometryParams;
use crate::process::{sample_poisson_replica, ProcessParams};
use crate::stats::{linear_fit, wilson_interval, LinearFit, Z95};
use crate::Result;

/// Euclidean diameter (in vertex units) of the blocked l∞ cluster containing
/// `origin`; `None` when the origin is open.
pub fn blocked_cluster_diameter(field: &LatticeField, origin: usize) -> Option<f64> {
    if field.is_open(origin) {
        return None;
    }
    let mut seen = alloc::vec![false; field.len()];
    let mut queue = VecDeque::new();
    let mut members: Vec<[usize; 3]> = Vec::new();
    seen[origin] = true;
    queue.push_back(origin);
    while let Some(v) = queue.pop_front() {
        members.push(field.coords(v));
        field.for_each_linf_neighbor(v, |w| {
            if !seen[w] && !field.is_open(w) {
                seen[w] = true;
                queue.push_back(w);
            }
        });
    }
    let mut best = 0usize;
    for (a, p) in members.iter().enumerate() {
        for q in &members[a + 1..] {
            let d2: usize = (0..3).map(|k| p[k].abs_diff(q[k]).pow(2)).sum();
            best = best.max(d2);
        }
    }
    Some(libm::sqrt(best as f64))
}

/// Origin cluster diameter of one replica (0 when the origin is open).
pub fn blocked_diameter_replica(
    process: &ProcessParams,
    geometry: &GeometryParams,
    lattice: &LatticeParams,
    replica: u64,
) -> Result<f64> {
    let window = lattice.sampling_window(process.dim, geometry);
    let cloud = sample_poisson_replica(&window, process, replica)?;
    let field = build_field(&cloud, geometry, lattice)?;
    let c = lattice.n / 2;
    let origin = field.index([c, c, if process.dim == 3 { c } else { 0 }]);
    Ok(blocked_cluster_diameter(&field, origin).unwrap_or(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayRow {
    pub m: usize,
    pub hits: usize,
    pub replicas: usize,
    pub p: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayTable {
    pub rows: Vec<DecayRow>,
    /// Fit of `ln p` against `m` over the fit range, using rows with `p > 0`.
    pub fit: Option<LinearFit>,
    pub fit_range: (usize, usize),
}

impl DecayTable {
    /// Tail table `P(diameter >= m)` for `m = 1..=m_max`.
    pub fn from_diameters(diameters: &[f64], m_max: usize, fit_range: (usize, usize)) -> Self {
        let replicas = diameters.len();
        let mut rows = Vec::with_capacity(m_max);
        for m in 1..=m_max {
            let hits = diameters.iter().filter(|&&d| d >= m as f64).count();
            let (ci_lo, ci_hi) = wilson_interval(hits, replicas, Z95);
            rows.push(DecayRow {
                m,
                hits,
                replicas,
                p: if replicas == 0 { 0.0 } else { hits as f64 / replicas as f64 },
                ci_lo,
                ci_hi,
            });
        }
        let (xs, ys): (Vec<f64>, Vec<f64>) = rows
            .iter()
            .filter(|r| r.m >= fit_range.0 && r.m <= fit_range.1 && r.p > 0.0)
            .map(|r| (r.m as f64, libm::log(r.p)))
            .unzip();
        DecayTable {
            fit: linear_fit(&xs, &ys),
            rows,
            fit_range,
        }
    }
}

pub const DEFAULT_FIT_RANGE: (usize, usize) = (2, 10);

/// `P(origin lies on a blocked path of diameter >= m)` for `m = 1..=m_max`.
pub fn blocked_diameter_stats(
    process: &ProcessParams,
    geometry: &GeometryParams,
    lattice: &LatticeParams,
    replicas: usize,
    m_max: usize,
) -> Result<DecayTable> {
    let mut diameters = Vec::with_capacity(replicas);
    for i in 0..replicas {
        diameters.push(blocked_diameter_replica(process, geometry, lattice, i as u64)?);
    }
    Ok(DecayTable::from_diameters(&diameters, m_max, DEFAULT_FIT_RANGE))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingRow {
    pub n: usize,
    pub hits: usize,
    pub replicas: usize,
    pub p: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

impl CrossingRow {
    pub fn from_hits(n: usize, hits: usize, replicas: usize) -> Self {
        let (ci_lo, ci_hi) = wilson_interval(hits, replicas, Z95);
        CrossingRow {
            n,
            hits,
            replicas,
            p: if replicas == 0 { 0.0 } else { hits as f64 / replicas as f64 },
            ci_lo,
            ci_hi,
        }
    }
}

/// `L(n)` of one replica. Each `n` uses its own seed offset so that rows of a
/// ladder are independent.
pub fn crossing_replica(
    process: &ProcessParams,
    geometry: &GeometryParams,
    lattice: &LatticeParams,
    replica: u64,
) -> Result<usize> {
    let p = process.with_seed(process.seed.wrapping_add(lattice.n as u64));
    let window = lattice.sampling_window(p.dim, geometry);
    let cloud = sample_poisson_replica(&window, &p, replica)?;
    let field = build_field(&cloud, geometry, lattice)?;
    Ok(min_open_crossing(&field)?.open_count)
}

/// `P(L(n) <= c1 n)` over a ladder of `n`.
pub fn crossing_probability(
    process: &ProcessParams,
    geometry: &GeometryParams,
    k_scale: usize,
    ns: &[usize],
    c1: f64,
    replicas: usize,
) -> Result<Vec<CrossingRow>> {
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let lattice = LatticeParams::new(k_scale, n)?;
        let mut hits = 0;
        for i in 0..replicas {
            if crossing_replica(process, geometry, &lattice, i as u64)? as f64 <= c1 * n as f64 {
                hits += 1;
            }
        }
        rows.push(CrossingRow::from_hits(n, hits, replicas));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diameter_of_blocked_diagonal() {
        let mut f = LatticeField::all_open(2, 5);
        for i in 0..4 {
            let v = f.index([i, i, 0]);
            f.set_open(v, false);
        }
        let d = blocked_cluster_diameter(&f, f.index([2, 2, 0])).unwrap();
        assert!((d - libm::sqrt(18.0)).abs() < 1e-12);
        assert_eq!(blocked_cluster_diameter(&f, f.index([4, 0, 0])), None);
    }

    #[test]
    fn sparse_process_has_no_tail() {
        let p = ProcessParams::new(1e-6, 1, 2).unwrap();
        let g = GeometryParams::new(0.3).unwrap();
        let lat = LatticeParams::new(11, 21).unwrap();
        let t = blocked_diameter_stats(&p, &g, &lat, 50, 5).unwrap();
        assert!(t.rows.iter().all(|r| r.hits == 0));
    }

    #[test]
    fn c1_one_always_crosses() {
        let p = ProcessParams::new(1.0, 2, 2).unwrap();
        let g = GeometryParams::new(0.3).unwrap();
        let rows = crossing_probability(&p, &g, 11, &[8], 1.0, 20).unwrap();
        assert_eq!(rows[0].hits, 20);
    }
}
