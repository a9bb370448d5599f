//! Graph families used by the experiments: standard shapes, pairing-model
//! regular graphs, the two-sided guessing gadget and the ring of gadgets.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{Latency, LatencyGraph, NodeId};
use crate::util::seeded_rng;

pub fn clique(n: usize, latency: Latency) -> Result<LatencyGraph> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            edges.push((u, v, latency));
        }
    }
    LatencyGraph::new(n, &edges)
}

/// Path on `latencies.len() + 1` nodes, edge `i` connecting `i` and `i+1`.
pub fn path(latencies: &[Latency]) -> Result<LatencyGraph> {
    if latencies.is_empty() {
        return Err(Error::InvalidParam("path needs at least one edge".into()));
    }
    let edges: Vec<_> = latencies.iter().enumerate().map(|(i, &l)| (i, i + 1, l)).collect();
    LatencyGraph::new(latencies.len() + 1, &edges)
}

/// Star with center 0 and one leaf per entry.
pub fn star(leaf_latencies: &[Latency]) -> Result<LatencyGraph> {
    if leaf_latencies.is_empty() {
        return Err(Error::InvalidParam("star needs at least one leaf".into()));
    }
    let edges: Vec<_> =
        leaf_latencies.iter().enumerate().map(|(i, &l)| (0, i + 1, l)).collect();
    LatencyGraph::new(leaf_latencies.len() + 1, &edges)
}

/// Two `q`-cliques of unit-latency edges joined by a single bridge edge
/// between nodes `q-1` and `q`.
pub fn two_cliques_bridge(q: usize, bridge_latency: Latency) -> Result<LatencyGraph> {
    if q < 2 {
        return Err(Error::InvalidParam("cliques need at least 2 nodes".into()));
    }
    let mut edges = Vec::new();
    for u in 0..q {
        for v in u + 1..q {
            edges.push((u, v, 1));
            edges.push((q + u, q + v, 1));
        }
    }
    edges.push((q - 1, q, bridge_latency));
    LatencyGraph::new(2 * q, &edges)
}

/// Random `d`-regular graph via the pairing model: `n*d` points are matched
/// by a shuffled pairing, resampled until the pairing induces neither
/// self-loops nor parallel edges. All edges get the given latency.
pub fn random_regular(n: usize, d: usize, latency: Latency, seed: u64) -> Result<LatencyGraph> {
    if d == 0 || d >= n || !(n * d).is_multiple_of(2) {
        return Err(Error::InvalidParam(format!("no {d}-regular graph on {n} nodes")));
    }
    let mut rng = seeded_rng(seed, 0x5e6);
    let mut points: Vec<NodeId> = (0..n * d).map(|p| p / d).collect();
    for _attempt in 0..10_000 {
        points.shuffle(&mut rng);
        let mut edges: Vec<(NodeId, NodeId, Latency)> = points
            .chunks_exact(2)
            .map(|c| (c[0].min(c[1]), c[0].max(c[1]), latency))
            .collect();
        edges.sort_unstable();
        let simple = edges.iter().all(|&(u, v, _)| u != v)
            && edges.windows(2).all(|w| (w[0].0, w[0].1) != (w[1].0, w[1].1));
        if simple {
            return LatencyGraph::new(n, &edges);
        }
    }
    Err(Error::InvalidParam(format!(
        "pairing model failed to produce a simple {d}-regular graph on {n} nodes"
    )))
}

/// Connected random graph: a random spanning tree plus random extra edges up
/// to `m` edges total, latencies uniform in `1..=max_latency`.
pub fn random_connected(
    n: usize,
    m: usize,
    max_latency: Latency,
    seed: u64,
) -> Result<LatencyGraph> {
    if n < 2 || max_latency < 1 {
        return Err(Error::InvalidParam("need n >= 2 and max_latency >= 1".into()));
    }
    let complete = n * (n - 1) / 2;
    let m = m.clamp(n - 1, complete);
    let mut rng = seeded_rng(seed, 0xc411);

    let mut order: Vec<NodeId> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut present = vec![vec![false; n]; n];
    let mut edges = Vec::with_capacity(m);
    let add = |edges: &mut Vec<(NodeId, NodeId, Latency)>,
                   present: &mut Vec<Vec<bool>>,
                   u: NodeId,
                   v: NodeId,
                   lat: Latency| {
        present[u][v] = true;
        present[v][u] = true;
        edges.push((u, v, lat));
    };
    for i in 1..n {
        let u = order[i];
        let v = order[rng.gen_range(0..i)];
        let lat = rng.gen_range(1..=max_latency);
        add(&mut edges, &mut present, u, v, lat);
    }
    while edges.len() < m {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v && !present[u][v] {
            let lat = rng.gen_range(1..=max_latency);
            add(&mut edges, &mut present, u, v, lat);
        }
    }
    LatencyGraph::new(n, &edges)
}

/// How the fast cross pairs of a gadget are chosen.
#[derive(Clone, Debug)]
pub enum TargetPredicate {
    /// One uniformly random pair.
    Singleton,
    /// Every pair independently with probability `p` in `(0, 1]`.
    RandomP(f64),
    /// Exactly these `(a, b)` index pairs.
    Explicit(Vec<(usize, usize)>),
}

/// Gadget graph on `2m` nodes: side `A` is nodes `0..m`, side `B` is nodes
/// `m..2m`. `A` is a unit-latency clique (`B` too when symmetric), and all
/// `m*m` cross edges are present, carrying latency `lo` exactly on target
/// pairs and `hi` elsewhere.
#[derive(Clone, Debug)]
pub struct Gadget {
    pub graph: LatencyGraph,
    pub m: usize,
    pub lo: Latency,
    pub hi: Latency,
    /// Sorted `(a, b)` index pairs (`a, b` in `0..m`); node ids are `a` and
    /// `m + b`.
    pub targets: Vec<(usize, usize)>,
}

pub fn gadget(
    m: usize,
    lo: Latency,
    hi: Latency,
    predicate: &TargetPredicate,
    symmetric: bool,
    seed: u64,
) -> Result<Gadget> {
    if m < 2 {
        return Err(Error::InvalidParam("gadget needs m >= 2".into()));
    }
    if lo >= hi {
        return Err(Error::InvalidParam(format!(
            "gadget needs lo < hi, got lo={lo} hi={hi}"
        )));
    }
    let mut rng = seeded_rng(seed, 0x9ad6);
    let mut targets: Vec<(usize, usize)> = match predicate {
        TargetPredicate::Singleton => {
            vec![(rng.gen_range(0..m), rng.gen_range(0..m))]
        }
        TargetPredicate::RandomP(p) => {
            if !(*p > 0.0 && *p <= 1.0) {
                return Err(Error::InvalidParam(format!("p={p} outside (0, 1]")));
            }
            let mut t = Vec::new();
            for a in 0..m {
                for b in 0..m {
                    if rng.gen_bool(*p) {
                        t.push((a, b));
                    }
                }
            }
            t
        }
        TargetPredicate::Explicit(pairs) => {
            for &(a, b) in pairs {
                if a >= m || b >= m {
                    return Err(Error::GuessOutOfRange { a, b, m });
                }
            }
            pairs.clone()
        }
    };
    targets.sort_unstable();
    targets.dedup();

    let mut edges = Vec::new();
    for u in 0..m {
        for v in u + 1..m {
            edges.push((u, v, 1));
            if symmetric {
                edges.push((m + u, m + v, 1));
            }
        }
    }
    let mut ti = 0;
    for a in 0..m {
        for b in 0..m {
            let fast = {
                while ti < targets.len() && targets[ti] < (a, b) {
                    ti += 1;
                }
                ti < targets.len() && targets[ti] == (a, b)
            };
            edges.push((a, m + b, if fast { lo } else { hi }));
        }
    }
    let graph = LatencyGraph::new(2 * m, &edges)?;
    Ok(Gadget { graph, m, lo, hi, targets })
}

/// Ring of `k` gadget layers (`k` even, at least 4), each layer a
/// unit-latency clique on `s` nodes. Node `j*s + i` is member `i` of layer
/// `j`. Consecutive layers (cyclically) are joined by all `s*s` cross edges
/// of latency `ell`, except that one uniformly chosen cross pair per layer
/// boundary is fast (latency 1). Every node ends up with degree `3s - 1`.
pub fn ring_of_gadgets(s: usize, k: usize, ell: Latency, seed: u64) -> Result<LatencyGraph> {
    if s < 2 {
        return Err(Error::InvalidParam("ring needs s >= 2".into()));
    }
    if k < 4 || !k.is_multiple_of(2) {
        return Err(Error::InvalidParam(format!(
            "ring needs an even layer count >= 4, got {k}"
        )));
    }
    let mut rng = seeded_rng(seed, 0x2177);
    let node = |layer: usize, i: usize| layer * s + i;
    let mut edges = Vec::new();
    for layer in 0..k {
        for i in 0..s {
            for j in i + 1..s {
                edges.push((node(layer, i), node(layer, j), 1));
            }
        }
    }
    for layer in 0..k {
        let next = (layer + 1) % k;
        let fast = (rng.gen_range(0..s), rng.gen_range(0..s));
        for i in 0..s {
            for j in 0..s {
                let lat = if (i, j) == fast { 1 } else { ell };
                edges.push((node(layer, i), node(next, j), lat));
            }
        }
    }
    LatencyGraph::new(k * s, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_is_3s_minus_1_regular() {
        for (s, k) in [(3, 6), (4, 8), (5, 10)] {
            let g = ring_of_gadgets(s, k, 16, 42).unwrap();
            assert_eq!(g.n(), k * s);
            for v in 0..g.n() {
                assert_eq!(g.degree(v), 3 * s - 1, "node {v} of ring ({s},{k})");
            }
        }
    }

    #[test]
    fn ring_rejects_bad_layer_counts() {
        assert!(ring_of_gadgets(3, 5, 4, 0).is_err());
        assert!(ring_of_gadgets(3, 2, 4, 0).is_err());
        assert!(ring_of_gadgets(1, 6, 4, 0).is_err());
    }

    #[test]
    fn ring_max_degree_example() {
        let g = ring_of_gadgets(4, 8, 16, 7).unwrap();
        assert_eq!(g.n(), 32);
        assert_eq!(g.max_degree(), 11);
    }

    #[test]
    fn gadget_latencies_match_target_set() {
        let pred = TargetPredicate::RandomP(0.25);
        let gad = gadget(8, 1, 64, &pred, false, 3).unwrap();
        let g = &gad.graph;
        assert_eq!(g.n(), 16);
        for a in 0..8 {
            for b in 0..8 {
                let lat = g.latency(a, 8 + b).unwrap();
                let is_target = gad.targets.binary_search(&(a, b)).is_ok();
                assert_eq!(lat == 1, is_target);
                assert_eq!(lat == 64, !is_target);
            }
        }
        // asymmetric: B side has no clique edges
        assert_eq!(g.degree(8), 8);
    }

    #[test]
    fn symmetric_gadget_has_b_clique() {
        let pred = TargetPredicate::Singleton;
        let gad = gadget(5, 1, 25, &pred, true, 11).unwrap();
        assert_eq!(gad.targets.len(), 1);
        assert_eq!(gad.graph.degree(7), 5 + 4);
        let ones = gad
            .graph
            .edges()
            .iter()
            .filter(|&&(u, v, l)| u < 5 && v >= 5 && l == 1)
            .count();
        assert_eq!(ones, 1);
    }

    #[test]
    fn gadget_rejects_bad_params() {
        assert!(gadget(4, 5, 5, &TargetPredicate::Singleton, false, 0).is_err());
        assert!(gadget(4, 1, 9, &TargetPredicate::RandomP(0.0), false, 0).is_err());
        assert!(gadget(4, 1, 9, &TargetPredicate::RandomP(1.5), false, 0).is_err());
        assert!(gadget(4, 1, 9, &TargetPredicate::Explicit(vec![(4, 0)]), false, 0).is_err());
        // p = 1 is legal and selects everything
        let full = gadget(3, 1, 9, &TargetPredicate::RandomP(1.0), false, 0).unwrap();
        assert_eq!(full.targets.len(), 9);
    }

    #[test]
    fn pairing_model_is_regular_and_seeded() {
        let g = random_regular(10, 3, 1, 5).unwrap();
        for v in 0..10 {
            assert_eq!(g.degree(v), 3);
        }
        let h = random_regular(10, 3, 1, 5).unwrap();
        assert_eq!(g.edges(), h.edges());
        assert!(random_regular(5, 3, 1, 0).is_err(), "odd n*d");
    }

    #[test]
    fn random_connected_is_connected() {
        for seed in 0..20 {
            let g = random_connected(9, 14, 8, seed).unwrap();
            assert!(g.is_connected());
            assert_eq!(g.m(), 14);
            assert!(g.edges().iter().all(|&(_, _, l)| (1..=8).contains(&l)));
        }
    }

    #[test]
    fn two_cliques_bridge_shape() {
        let g = two_cliques_bridge(4, 9).unwrap();
        assert_eq!(g.n(), 8);
        assert_eq!(g.m(), 13);
        assert_eq!(g.latency(3, 4), Some(9));
        assert_eq!(g.weighted_diameter().unwrap(), 11);
    }
}
