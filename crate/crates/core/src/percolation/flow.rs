//! Vertex-disjoint left-right channels as unit-capacity max-flow.
//!
//! Every open vertex `v` is split into `in(v) -> out(v)` with capacity 1;
//! l¹ neighbors are joined `out(v) -> in(w)`. The source feeds the face
//! `z1 = 0`, the face `z1 = n-1` drains into the sink.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use super::LatticeField;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FlowStrategy {
    /// Level graph plus blocking flow (shortest augmenting paths).
    #[default]
    ShortestAugmenting,
    /// One depth-first augmenting path at a time.
    DepthFirst,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelFlow {
    pub count: usize,
    /// Vertex lists from `z1 = 0` to `z1 = n-1`.
    pub channels: Vec<Vec<usize>>,
}

struct Graph {
    head: Vec<u32>,
    to: Vec<u32>,
    next: Vec<u32>,
    cap: Vec<u8>,
}

const NONE: u32 = u32::MAX;

impl Graph {
    fn new(nodes: usize) -> Self {
        Graph {
            head: alloc::vec![NONE; nodes],
            to: Vec::new(),
            next: Vec::new(),
            cap: Vec::new(),
        }
    }

    fn add(&mut self, a: usize, b: usize) {
        let e = self.to.len() as u32;
        self.to.push(b as u32);
        self.cap.push(1);
        self.next.push(self.head[a]);
        self.head[a] = e;
        self.to.push(a as u32);
        self.cap.push(0);
        self.next.push(self.head[b]);
        self.head[b] = e + 1;
    }

    fn edges(&self, v: usize) -> EdgeIter<'_> {
        EdgeIter {
            g: self,
            e: self.head[v],
        }
    }
}

struct EdgeIter<'a> {
    g: &'a Graph,
    e: u32,
}

impl Iterator for EdgeIter<'_> {
    type Item = usize;
    fn next(&mut self) -> Option<usize> {
        if self.e == NONE {
            return None;
        }
        let e = self.e as usize;
        self.e = self.g.next[e];
        Some(e)
    }
}

struct Network {
    g: Graph,
    source: usize,
    sink: usize,
}

fn build_network(field: &LatticeField) -> Network {
    let v = field.len();
    let source = 2 * v;
    let sink = 2 * v + 1;
    let mut g = Graph::new(2 * v + 2);
    let n = field.n();
    for u in 0..v {
        if !field.is_open(u) {
            continue;
        }
        g.add(2 * u, 2 * u + 1);
        let z = field.coords(u);
        if z[0] == 0 {
            g.add(source, 2 * u);
        }
        if z[0] == n - 1 {
            g.add(2 * u + 1, sink);
        }
        field.for_each_l1_neighbor(u, |w| {
            if field.is_open(w) {
                g.add(2 * u + 1, 2 * w);
            }
        });
    }
    Network { g, source, sink }
}

impl Network {
    fn dinic(&mut self) -> usize {
        let nodes = self.g.head.len();
        let mut level = alloc::vec![u32::MAX; nodes];
        let mut iter = alloc::vec![NONE; nodes];
        let mut total = 0;
        loop {
            level.fill(u32::MAX);
            level[self.source] = 0;
            let mut queue = VecDeque::new();
            queue.push_back(self.source);
            while let Some(u) = queue.pop_front() {
                for e in self.g.edges(u) {
                    let w = self.g.to[e] as usize;
                    if self.g.cap[e] > 0 && level[w] == u32::MAX {
                        level[w] = level[u] + 1;
                        queue.push_back(w);
                    }
                }
            }
            if level[self.sink] == u32::MAX {
                return total;
            }
            iter.copy_from_slice(&self.g.head);
            while self.augment_in_level(&level, &mut iter) {
                total += 1;
            }
        }
    }

    /// One source-sink path in the level graph, iterative with current-arc
    /// pointers.
    fn augment_in_level(&mut self, level: &[u32], iter: &mut [u32]) -> bool {
        let mut path: Vec<usize> = Vec::new();
        let mut u = self.source;
        loop {
            if u == self.sink {
                for &e in &path {
                    self.g.cap[e] -= 1;
                    self.g.cap[e ^ 1] += 1;
                }
                return true;
            }
            let mut advanced = false;
            while iter[u] != NONE {
                let e = iter[u] as usize;
                let w = self.g.to[e] as usize;
                if self.g.cap[e] > 0 && level[w] == level[u] + 1 {
                    path.push(e);
                    u = w;
                    advanced = true;
                    break;
                }
                iter[u] = self.g.next[e];
            }
            if !advanced {
                // Dead end: retreat and skip the edge that led here.
                match path.pop() {
                    None => return false,
                    Some(e) => {
                        u = self.g.to[e ^ 1] as usize;
                        iter[u] = self.g.next[e];
                    }
                }
            }
        }
    }

    fn depth_first(&mut self) -> usize {
        let nodes = self.g.head.len();
        let mut total = 0;
        let mut seen = alloc::vec![false; nodes];
        let mut via = alloc::vec![usize::MAX; nodes];
        loop {
            seen.fill(false);
            let mut stack = alloc::vec![self.source];
            seen[self.source] = true;
            while let Some(u) = stack.pop() {
                if u == self.sink {
                    break;
                }
                for e in self.g.edges(u) {
                    let w = self.g.to[e] as usize;
                    if self.g.cap[e] > 0 && !seen[w] {
                        seen[w] = true;
                        via[w] = e;
                        stack.push(w);
                    }
                }
            }
            if !seen[self.sink] {
                return total;
            }
            let mut v = self.sink;
            while v != self.source {
                let e = via[v];
                self.g.cap[e] -= 1;
                self.g.cap[e ^ 1] += 1;
                v = self.g.to[e ^ 1] as usize;
            }
            total += 1;
        }
    }

    /// Follows saturated forward edges from the source. Flow on split
    /// vertices is at most 1, so each walk is unambiguous.
    fn channels(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for e in self.g.edges(self.source) {
            // Forward edges carry even ids; used iff residual capacity is 0.
            if e % 2 != 0 || self.g.cap[e] != 0 {
                continue;
            }
            let mut path = Vec::new();
            let mut node = self.g.to[e] as usize;
            loop {
                let vertex = node / 2;
                path.push(vertex);
                let out_node = 2 * vertex + 1;
                let mut next = None;
                for f in self.g.edges(out_node) {
                    if f % 2 == 0 && self.g.cap[f] == 0 {
                        next = Some(self.g.to[f] as usize);
                        break;
                    }
                }
                match next {
                    Some(t) if t == self.sink => break,
                    Some(t) => node = t,
                    None => break,
                }
            }
            out.push(path);
        }
        out
    }
}

/// `N(n)`: maximal number of vertex-disjoint open left-right l¹ paths.
pub fn count_channels(field: &LatticeField) -> usize {
    count_channels_with(field, FlowStrategy::default()).count
}

pub fn count_channels_with(field: &LatticeField, strategy: FlowStrategy) -> ChannelFlow {
    if field.is_empty() {
        return ChannelFlow {
            count: 0,
            channels: Vec::new(),
        };
    }
    let mut net = build_network(field);
    let count = match strategy {
        FlowStrategy::ShortestAugmenting => net.dinic(),
        FlowStrategy::DepthFirst => net.depth_first(),
    };
    let channels = net.channels();
    ChannelFlow { count, channels }
}

/// Independent check of a channel witness: open vertices, l¹ steps, left to
/// right, pairwise vertex-disjoint, one path per counted channel.
pub fn verify_channels(field: &LatticeField, flow: &ChannelFlow) -> bool {
    if flow.channels.len() != flow.count {
        return false;
    }
    let n = field.n();
    let mut used = alloc::vec![false; field.len()];
    for path in &flow.channels {
        let (Some(&first), Some(&last)) = (path.first(), path.last()) else {
            return false;
        };
        if field.coords(first)[0] != 0 || field.coords(last)[0] != n - 1 {
            return false;
        }
        for (i, &v) in path.iter().enumerate() {
            if v >= field.len() || !field.is_open(v) || used[v] {
                return false;
            }
            used[v] = true;
            if i > 0 {
                let a = field.coords(path[i - 1]);
                let b = field.coords(v);
                let l1: usize = (0..3).map(|k| a[k].abs_diff(b[k])).sum();
                if l1 != 1 {
                    return false;
                }
            }
        }
    }
    true
}
