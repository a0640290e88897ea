//! Uniform cell hash over a point set, stored as a sorted key table so no
//! hashing or dense grid allocation is needed.

use alloc::vec::Vec;

use crate::point::{dist2, Point};

type Key = [i64; 3];

pub(crate) struct CellIndex<'a> {
    points: &'a [Point],
    dim: usize,
    cell: f64,
    entries: Vec<(Key, u32)>,
}

impl<'a> CellIndex<'a> {
    /// `cell` must be at least the largest query radius.
    pub(crate) fn new(points: &'a [Point], dim: usize, cell: f64) -> Self {
        debug_assert!(cell > 0.0);
        let mut entries: Vec<(Key, u32)> = points
            .iter()
            .enumerate()
            .map(|(i, p)| (key_of(p, dim, cell), i as u32))
            .collect();
        entries.sort_unstable();
        CellIndex {
            points,
            dim,
            cell,
            entries,
        }
    }

    fn bucket(&self, key: &Key) -> &[(Key, u32)] {
        let start = self.entries.partition_point(|e| e.0 < *key);
        let end = start + self.entries[start..].partition_point(|e| e.0 == *key);
        &self.entries[start..end]
    }

    /// Calls `f(j)` for every indexed point in the 3^dim cells around `p`.
    pub(crate) fn for_each_candidate(&self, p: &Point, mut f: impl FnMut(usize)) {
        let k = key_of(p, self.dim, self.cell);
        let zr: i64 = if self.dim == 3 { 1 } else { 0 };
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -zr..=zr {
                    let key = [k[0] + dx, k[1] + dy, k[2] + dz];
                    for e in self.bucket(&key) {
                        f(e.1 as usize);
                    }
                }
            }
        }
    }

    /// Indices `j` with `|p - p_j| <= radius` (radius <= cell size).
    pub(crate) fn for_each_within(&self, p: &Point, radius: f64, mut f: impl FnMut(usize, f64)) {
        let r2 = radius * radius;
        self.for_each_candidate(p, |j| {
            let d2 = dist2(p, &self.points[j]);
            if d2 <= r2 {
                f(j, d2);
            }
        });
    }

    /// Every unordered pair `(i, j)`, `i < j`, at distance `<= radius`.
    pub(crate) fn for_each_pair_within(&self, radius: f64, mut f: impl FnMut(usize, usize, f64)) {
        for (i, p) in self.points.iter().enumerate() {
            self.for_each_within(p, radius, |j, d2| {
                if j > i {
                    f(i, j, d2);
                }
            });
        }
    }

    /// Distance from `p` to the nearest indexed point if it is `<= radius`.
    pub(crate) fn nearest_within(&self, p: &Point, radius: f64) -> Option<f64> {
        let mut best = f64::INFINITY;
        self.for_each_within(p, radius, |_, d2| best = best.min(d2));
        if best.is_finite() {
            Some(libm::sqrt(best))
        } else {
            None
        }
    }
}

fn key_of(p: &Point, dim: usize, cell: f64) -> Key {
    let mut k = [0i64; 3];
    for a in 0..dim {
        k[a] = libm::floor(p[a] / cell) as i64;
    }
    k
}
