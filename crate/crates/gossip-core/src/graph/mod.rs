//! Undirected graphs with positive integer edge latencies, plus the cut
//! bookkeeping every conductance quantity is built from.

pub mod generate;
pub mod io;

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::collections::BTreeMap;

use crate::error::{Error, Result};

pub type NodeId = usize;
pub type Latency = u64;

/// Latency class of an edge. Class 1 holds latencies 1 and 2; class `i >= 2`
/// holds the range `(2^(i-1), 2^i]`. Total and monotone in the latency.
pub fn latency_class(latency: Latency) -> u32 {
    debug_assert!(latency >= 1);
    if latency <= 2 {
        1
    } else {
        u64::BITS - (latency - 1).leading_zeros()
    }
}

/// Simple undirected graph; nodes are `0..n`, every edge carries a latency
/// `>= 1`. Self-loops and parallel edges are rejected at construction.
#[derive(Clone, Debug)]
pub struct LatencyGraph {
    n: usize,
    /// Canonically sorted: `u < v`, lexicographic.
    edges: Vec<(NodeId, NodeId, Latency)>,
    /// Per node, `(neighbor, latency)` sorted by neighbor id.
    adj: Vec<Vec<(NodeId, Latency)>>,
}

impl LatencyGraph {
    pub fn new(n: usize, raw_edges: &[(NodeId, NodeId, Latency)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParam("graph needs at least one node".into()));
        }
        let mut edges = Vec::with_capacity(raw_edges.len());
        for &(a, b, lat) in raw_edges {
            if a == b {
                return Err(Error::SelfLoop { node: a });
            }
            if a >= n || b >= n {
                return Err(Error::InvalidParam(format!(
                    "edge {a}-{b} references a node >= {n}"
                )));
            }
            if lat < 1 {
                return Err(Error::InvalidParam(format!("edge {a}-{b} has latency 0")));
            }
            // keeps 2^class within i128 headroom for the exact arithmetic
            if lat > 1 << 62 {
                return Err(Error::InvalidParam(format!(
                    "edge {a}-{b} latency exceeds 2^62"
                )));
            }
            edges.push((a.min(b), a.max(b), lat));
        }
        edges.sort_unstable();
        for w in edges.windows(2) {
            if w[0].0 == w[1].0 && w[0].1 == w[1].1 {
                return Err(Error::DuplicateEdge { u: w[0].0, v: w[0].1 });
            }
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v, lat) in &edges {
            adj[u].push((v, lat));
            adj[v].push((u, lat));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(LatencyGraph { n, edges, adj })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(NodeId, NodeId, Latency)] {
        &self.edges
    }

    pub fn adj(&self, v: NodeId) -> &[(NodeId, Latency)] {
        &self.adj[v]
    }

    pub fn neighbors(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.adj[v].iter().map(|&(u, _)| u)
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn latency(&self, u: NodeId, v: NodeId) -> Option<Latency> {
        let list = &self.adj[u];
        list.binary_search_by_key(&v, |&(w, _)| w).ok().map(|i| list[i].1)
    }

    /// Index of the undirected edge in canonical order, usable as a compact
    /// edge id.
    pub fn edge_index(&self, u: NodeId, v: NodeId) -> Option<usize> {
        let key = (u.min(v), u.max(v));
        self.edges
            .binary_search_by(|&(a, b, _)| (a, b).cmp(&key))
            .ok()
    }

    /// Sorted deduplicated latencies present in the graph.
    pub fn distinct_latencies(&self) -> Vec<Latency> {
        let mut lats: Vec<Latency> = self.edges.iter().map(|&(_, _, l)| l).collect();
        lats.sort_unstable();
        lats.dedup();
        lats
    }

    pub fn max_latency(&self) -> Latency {
        self.edges.iter().map(|&(_, _, l)| l).max().unwrap_or(0)
    }

    /// Sum of degrees of all nodes, i.e. `2m`.
    pub fn total_volume(&self) -> u64 {
        2 * self.m() as u64
    }

    pub fn is_connected(&self) -> bool {
        self.unreachable_pair().is_none()
    }

    /// `None` when connected, otherwise a witness pair with no path.
    pub fn unreachable_pair(&self) -> Option<(NodeId, NodeId)> {
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(u, _) in &self.adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        seen.iter().position(|s| !s).map(|v| (0, v))
    }

    /// Single-source shortest path distances where the length of a path is
    /// the sum of its edge latencies.
    pub fn dijkstra(&self, src: NodeId) -> Vec<Option<u64>> {
        let mut dist: Vec<Option<u64>> = vec![None; self.n];
        let mut heap = BinaryHeap::new();
        dist[src] = Some(0);
        heap.push(Reverse((0u64, src)));
        while let Some(Reverse((d, v))) = heap.pop() {
            if dist[v] != Some(d) {
                continue;
            }
            for &(u, lat) in &self.adj[v] {
                let nd = d + lat;
                if dist[u].is_none_or(|cur| nd < cur) {
                    dist[u] = Some(nd);
                    heap.push(Reverse((nd, u)));
                }
            }
        }
        dist
    }

    /// Largest latency-weighted shortest-path distance over all node pairs.
    pub fn weighted_diameter(&self) -> Result<u64> {
        if let Some((u, v)) = self.unreachable_pair() {
            return Err(Error::Disconnected { u, v });
        }
        let mut best = 0;
        for v in 0..self.n {
            for d in self.dijkstra(v).into_iter().flatten() {
                best = best.max(d);
            }
        }
        Ok(best)
    }

    /// Cut bookkeeping for one side of a bipartition. `side` may be in any
    /// order; empty and full sides are rejected.
    pub fn make_cut(&self, side: &[NodeId]) -> Result<Cut> {
        let mut in_side = vec![false; self.n];
        let mut side_sorted: Vec<NodeId> = Vec::with_capacity(side.len());
        for &v in side {
            if v >= self.n {
                return Err(Error::InvalidParam(format!("cut references node {v} >= {}", self.n)));
            }
            if !in_side[v] {
                in_side[v] = true;
                side_sorted.push(v);
            }
        }
        if side_sorted.is_empty() || side_sorted.len() == self.n {
            return Err(Error::ImproperCut);
        }
        side_sorted.sort_unstable();

        let volume_side: u64 = side_sorted.iter().map(|&v| self.degree(v) as u64).sum();
        let volume_rest = self.total_volume() - volume_side;
        let mut cross_latencies = Vec::new();
        for &(u, v, lat) in &self.edges {
            if in_side[u] != in_side[v] {
                cross_latencies.push(lat);
            }
        }
        cross_latencies.sort_unstable();
        let mut class_counts = BTreeMap::new();
        for &lat in &cross_latencies {
            *class_counts.entry(latency_class(lat)).or_insert(0u64) += 1;
        }
        Ok(Cut { side: side_sorted, volume_side, volume_rest, cross_latencies, class_counts })
    }
}

/// One side of a bipartition together with everything conductance needs:
/// both volumes (degree sums, all incident edges counted) and the latencies
/// of the crossing edges, also bucketed by latency class.
#[derive(Clone, Debug)]
pub struct Cut {
    side: Vec<NodeId>,
    volume_side: u64,
    volume_rest: u64,
    cross_latencies: Vec<Latency>,
    class_counts: BTreeMap<u32, u64>,
}

impl Cut {
    pub fn side(&self) -> &[NodeId] {
        &self.side
    }

    pub fn volumes(&self) -> (u64, u64) {
        (self.volume_side, self.volume_rest)
    }

    pub fn min_volume(&self) -> u64 {
        self.volume_side.min(self.volume_rest)
    }

    pub fn class_counts(&self) -> &BTreeMap<u32, u64> {
        &self.class_counts
    }

    pub fn cross_total(&self) -> u64 {
        self.cross_latencies.len() as u64
    }

    /// Number of crossing edges of latency at most `l`.
    pub fn cross_within(&self, l: Latency) -> u64 {
        self.cross_latencies.partition_point(|&x| x <= l) as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate;

    fn triangle_114() -> LatencyGraph {
        // a=0, b=1, c=2; ab=1, bc=1, ac=4
        LatencyGraph::new(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 4)]).unwrap()
    }

    #[test]
    fn classes_follow_powers_of_two() {
        assert_eq!(latency_class(1), 1);
        assert_eq!(latency_class(2), 1);
        assert_eq!(latency_class(3), 2);
        assert_eq!(latency_class(4), 2);
        assert_eq!(latency_class(5), 3);
        assert_eq!(latency_class(8), 3);
        assert_eq!(latency_class(9), 4);
        let distinct: std::collections::BTreeSet<u32> =
            [1u64, 2, 3, 4, 8].iter().map(|&l| latency_class(l)).collect();
        assert_eq!(distinct.len(), 3);
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(matches!(
            LatencyGraph::new(3, &[(1, 1, 1)]),
            Err(Error::SelfLoop { node: 1 })
        ));
        assert!(matches!(
            LatencyGraph::new(3, &[(0, 1, 1), (1, 0, 2)]),
            Err(Error::DuplicateEdge { u: 0, v: 1 })
        ));
        assert!(LatencyGraph::new(3, &[(0, 1, 0)]).is_err());
        assert!(LatencyGraph::new(2, &[(0, 2, 1)]).is_err());
    }

    #[test]
    fn adjacency_is_symmetric_and_sorted() {
        let g = triangle_114();
        for &(u, v, lat) in g.edges() {
            assert_eq!(g.latency(u, v), Some(lat));
            assert_eq!(g.latency(v, u), Some(lat));
        }
        assert_eq!(g.adj(0), &[(1, 1), (2, 4)]);
    }

    #[test]
    fn cut_on_two_node_graph() {
        let g = LatencyGraph::new(2, &[(0, 1, 5)]).unwrap();
        let cut = g.make_cut(&[0]).unwrap();
        assert_eq!(cut.volumes(), (1, 1));
        assert_eq!(cut.class_counts().get(&3), Some(&1));
        assert_eq!(cut.class_counts().len(), 1);
    }

    #[test]
    fn cut_on_triangle() {
        let cut = triangle_114().make_cut(&[0]).unwrap();
        assert_eq!(cut.volumes(), (2, 4));
        assert_eq!(cut.class_counts().get(&1), Some(&1));
        assert_eq!(cut.class_counts().get(&2), Some(&1));
        assert_eq!(cut.cross_within(1), 1);
        assert_eq!(cut.cross_within(4), 2);
    }

    #[test]
    fn cut_on_k4() {
        let g = generate::clique(4, 1).unwrap();
        let cut = g.make_cut(&[0, 1]).unwrap();
        assert_eq!(cut.volumes(), (6, 6));
        assert_eq!(cut.class_counts().get(&1), Some(&4));
    }

    #[test]
    fn improper_cuts_rejected() {
        let g = triangle_114();
        assert!(matches!(g.make_cut(&[]), Err(Error::ImproperCut)));
        assert!(matches!(g.make_cut(&[0, 1, 2]), Err(Error::ImproperCut)));
        // duplicates collapse before the check
        assert!(matches!(g.make_cut(&[0, 0, 1, 1, 2]), Err(Error::ImproperCut)));
    }

    #[test]
    fn diameter_examples() {
        let p = generate::path(&[2, 3]).unwrap();
        assert_eq!(p.weighted_diameter().unwrap(), 5);
        let k4 = generate::clique(4, 1).unwrap();
        assert_eq!(k4.weighted_diameter().unwrap(), 1);
        assert_eq!(triangle_114().weighted_diameter().unwrap(), 2);
    }

    #[test]
    fn diameter_reports_disconnected_witness() {
        let g = LatencyGraph::new(4, &[(0, 1, 1), (2, 3, 1)]).unwrap();
        match g.weighted_diameter() {
            Err(Error::Disconnected { u: 0, v }) => assert!(v == 2 || v == 3),
            other => panic!("expected disconnected error, got {other:?}"),
        }
    }

    #[test]
    fn star_max_degree() {
        let g = generate::star(&[1, 2, 3, 1, 2]).unwrap();
        assert_eq!(g.max_degree(), 5);
    }
}
