//! Minimal number of open vertices on a bottom-top l∞ crossing.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use super::LatticeField;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Crossing {
    /// `L(n)`.
    pub open_count: usize,
    /// Vertex list from row `z2 = 0` to row `z2 = n-1`.
    pub path: Vec<usize>,
}

/// 0-1 breadth-first search: entering an open vertex costs 1, a blocked one 0.
pub fn min_open_crossing(field: &LatticeField) -> Result<Crossing> {
    if field.dim() != 2 {
        return Err(Error::UnsupportedDimension {
            op: "min_open_crossing",
            dim: field.dim(),
            supported: "2",
        });
    }
    let n = field.n();
    let len = field.len();
    let mut dist = alloc::vec![usize::MAX; len];
    let mut pred = alloc::vec![usize::MAX; len];
    let mut deque = VecDeque::new();
    for x in 0..n {
        let v = field.index([x, 0, 0]);
        let c = field.is_open(v) as usize;
        dist[v] = c;
        if c == 0 {
            deque.push_front(v);
        } else {
            deque.push_back(v);
        }
    }
    let mut done = alloc::vec![false; len];
    while let Some(u) = deque.pop_front() {
        if done[u] {
            continue;
        }
        done[u] = true;
        let du = dist[u];
        field.for_each_linf_neighbor(u, |w| {
            let c = field.is_open(w) as usize;
            if du + c < dist[w] {
                dist[w] = du + c;
                pred[w] = u;
                if c == 0 {
                    deque.push_front(w);
                } else {
                    deque.push_back(w);
                }
            }
        });
    }
    let mut best = field.index([0, n - 1, 0]);
    for x in 0..n {
        let v = field.index([x, n - 1, 0]);
        if dist[v] < dist[best] {
            best = v;
        }
    }
    let mut path = alloc::vec![best];
    let mut v = best;
    while pred[v] != usize::MAX {
        v = pred[v];
        path.push(v);
    }
    path.reverse();
    Ok(Crossing {
        open_count: dist[best],
        path,
    })
}

/// Independent check: l∞ steps, bottom row to top row, open count matches.
pub fn verify_crossing(field: &LatticeField, crossing: &Crossing) -> bool {
    let n = field.n();
    let (Some(&first), Some(&last)) = (crossing.path.first(), crossing.path.last()) else {
        return false;
    };
    if field.coords(first)[1] != 0 || field.coords(last)[1] != n - 1 {
        return false;
    }
    for w in crossing.path.windows(2) {
        let a = field.coords(w[0]);
        let b = field.coords(w[1]);
        let linf = a[0].abs_diff(b[0]).max(a[1].abs_diff(b[1]));
        if linf != 1 {
            return false;
        }
    }
    let open = crossing.path.iter().filter(|&&v| field.is_open(v)).count();
    open == crossing.open_count
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_open_needs_n() {
        let f = LatticeField::all_open(2, 5);
        let c = min_open_crossing(&f).unwrap();
        assert_eq!(c.open_count, 5);
        assert!(verify_crossing(&f, &c));
    }

    #[test]
    fn all_blocked_is_free() {
        let f = LatticeField::from_open(2, 4, alloc::vec![false; 16]).unwrap();
        let c = min_open_crossing(&f).unwrap();
        assert_eq!(c.open_count, 0);
        assert!(verify_crossing(&f, &c));
    }

    #[test]
    fn diagonal_blocked_path_is_used() {
        let mut f = LatticeField::all_open(2, 4);
        for i in 0..4 {
            let v = f.index([i, i, 0]);
            f.set_open(v, false);
        }
        assert_eq!(min_open_crossing(&f).unwrap().open_count, 0);
    }

    #[test]
    fn rejects_3d() {
        assert!(min_open_crossing(&LatticeField::all_open(3, 2)).is_err());
    }
}
