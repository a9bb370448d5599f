//! Randomized clustering spanner with oriented edges, runnable either on the
//! whole graph or locally on a node's collected neighborhood.
//!
//! The construction performs `k` iterations over a shrinking clustering.
//! Iterations 1..k-1 keep each cluster alive independently with probability
//! n_hat^(-1/k); a node whose own cluster survives does nothing, every other
//! node either connects once to each adjacent cluster and retires (none of
//! its adjacent clusters survived) or joins the cheapest surviving cluster
//! and connects to every strictly cheaper one. The final iteration connects
//! every remaining node to each adjacent cluster. Added edges are oriented
//! away from the node that added them, which caps per-node out-degree; the
//! undirected result is a (2k-1)-spanner.
//!
//! Cluster survival is a pure function of (seed, center id, iteration), so
//! any two runs that see the relevant part of the graph make identical
//! decisions — this is what makes the local variant consistent.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::graph::{Latency, LatencyGraph, NodeId};
use crate::util::{derive_seed, mix64};

/// Spanner edges grouped by the endpoint that added them.
#[derive(Clone, Debug)]
pub struct OrientedSpanner {
    n: usize,
    out: Vec<Vec<(NodeId, Latency)>>,
}

impl OrientedSpanner {
    pub(crate) fn from_out(n: usize, out: Vec<Vec<(NodeId, Latency)>>) -> Self {
        OrientedSpanner { n, out }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn out_edges(&self, v: NodeId) -> &[(NodeId, Latency)] {
        &self.out[v]
    }

    pub fn out_degree(&self, v: NodeId) -> usize {
        self.out[v].len()
    }

    pub fn max_out_degree(&self) -> usize {
        self.out.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Undirected edge list, normalized and deduplicated.
    pub fn edges(&self) -> Vec<(NodeId, NodeId, Latency)> {
        let mut set = BTreeSet::new();
        for (u, list) in self.out.iter().enumerate() {
            for &(v, lat) in list {
                set.insert((u.min(v), u.max(v), lat));
            }
        }
        set.into_iter().collect()
    }

    pub fn edge_count(&self) -> usize {
        self.edges().len()
    }

    /// The spanner as an ordinary graph (undirected closure).
    pub fn to_graph(&self) -> Result<LatencyGraph> {
        LatencyGraph::new(self.n, &self.edges())
    }

    /// All-pairs check that spanner distances stay within `factor` times the
    /// distances of `g`.
    pub fn stretch_within(&self, g: &LatencyGraph, factor: u64) -> Result<bool> {
        let h = self.to_graph()?;
        for u in 0..self.n {
            let dg = g.dijkstra(u);
            let dh = h.dijkstra(u);
            for v in 0..self.n {
                match (dg[v], dh[v]) {
                    (Some(a), Some(b)) => {
                        if b > factor.saturating_mul(a) {
                            return Ok(false);
                        }
                    }
                    (Some(_), None) => return Ok(false),
                    _ => {}
                }
            }
        }
        Ok(true)
    }
}

/// Cluster survival decision: a PRF of (seed, center, iteration) compared
/// against n_hat^(-1/k).
fn cluster_survives(base: u64, center: NodeId, iteration: u32, p: f64) -> bool {
    let h = mix64(base ^ mix64(center as u64).rotate_left(17) ^ mix64(iteration as u64));
    ((h >> 11) as f64) * (1.0 / (1u64 << 53) as f64) < p
}

/// Totally ordered edge weight: latency first, endpoint ids as tie-breakers.
fn weight_key(u: NodeId, v: NodeId, lat: Latency) -> (Latency, NodeId, NodeId) {
    (lat, u.min(v), u.max(v))
}

struct Builder {
    out: Vec<Vec<(NodeId, Latency)>>,
    added: BTreeSet<(NodeId, NodeId)>,
}

impl Builder {
    fn new(n: usize) -> Self {
        Builder { out: vec![Vec::new(); n], added: BTreeSet::new() }
    }

    /// The first endpoint to claim an edge owns its direction; the mirrored
    /// add from the other side is dropped.
    fn add(&mut self, from: NodeId, to: NodeId, lat: Latency) {
        if self.added.insert((from.min(to), from.max(to))) {
            self.out[from].push((to, lat));
        }
    }
}

/// Core clustering run over an explicit vertex/edge list (global ids). The
/// result is indexed by global id; vertices outside `nodes` have empty
/// out-lists.
pub(crate) fn cluster_spanner(
    universe: usize,
    nodes: &[NodeId],
    edge_list: &[(NodeId, NodeId, Latency)],
    n_hat: u64,
    k: u32,
    seed: u64,
) -> Vec<Vec<(NodeId, Latency)>> {
    let base = derive_seed(seed, 0x5350_414e);
    let p = (n_hat as f64).powf(-1.0 / k as f64);

    // symmetric adjacency of still-undecided edges
    let mut alive: Vec<BTreeMap<NodeId, Latency>> = vec![BTreeMap::new(); universe];
    for &(u, v, lat) in edge_list {
        alive[u].insert(v, lat);
        alive[v].insert(u, lat);
    }
    // cluster membership by center id; None = retired
    let mut cluster: Vec<Option<NodeId>> = vec![None; universe];
    for &v in nodes {
        cluster[v] = Some(v);
    }
    let mut centers: BTreeSet<NodeId> = nodes.iter().copied().collect();
    let mut builder = Builder::new(universe);

    for i in 1..k {
        let survivors: BTreeSet<NodeId> =
            centers.iter().copied().filter(|&c| cluster_survives(base, c, i, p)).collect();

        // decisions are made against the clustering as of the iteration
        // start, so membership changes and edge removals commit afterwards
        let mut next_cluster: Vec<(NodeId, Option<NodeId>)> = Vec::new();
        let mut killed: Vec<(NodeId, NodeId)> = Vec::new();
        for &u in nodes {
            let Some(own) = cluster[u] else { continue };
            if survivors.contains(&own) {
                continue;
            }
            // least-weight alive edge into each adjacent cluster, own included
            let mut best: BTreeMap<NodeId, (NodeId, Latency)> = BTreeMap::new();
            for (&w, &lat) in &alive[u] {
                let c = cluster[w].expect("alive edges join clustered vertices");
                let better = match best.get(&c) {
                    Some(&(bw, blat)) => weight_key(u, w, lat) < weight_key(u, bw, blat),
                    None => true,
                };
                if better {
                    best.insert(c, (w, lat));
                }
            }
            let chosen = best
                .iter()
                .filter(|(c, _)| survivors.contains(c))
                .min_by_key(|&(_, &(w, lat))| weight_key(u, w, lat))
                .map(|(&c, &(w, lat))| (c, w, lat));
            match chosen {
                None => {
                    // no surviving cluster in reach: connect everywhere once
                    // and drop out of the clustering
                    for &(w, lat) in best.values() {
                        builder.add(u, w, lat);
                    }
                    for &w in alive[u].keys() {
                        killed.push((u, w));
                    }
                    next_cluster.push((u, None));
                }
                Some((c_star, jw, jlat)) => {
                    let join_key = weight_key(u, jw, jlat);
                    builder.add(u, jw, jlat);
                    next_cluster.push((u, Some(c_star)));
                    let mut drop_clusters = vec![c_star];
                    for (&c, &(w, lat)) in &best {
                        if c != c_star && weight_key(u, w, lat) < join_key {
                            builder.add(u, w, lat);
                            drop_clusters.push(c);
                        }
                    }
                    for &w in alive[u].keys() {
                        if drop_clusters.contains(&cluster[w].expect("clustered")) {
                            killed.push((u, w));
                        }
                    }
                }
            }
        }
        for (u, w) in killed {
            alive[u].remove(&w);
            alive[w].remove(&u);
        }
        for (u, c) in next_cluster {
            cluster[u] = c;
        }
        centers = survivors;
    }

    // last pass: one least-weight edge into every adjacent cluster
    for &u in nodes {
        let mut best: BTreeMap<NodeId, (NodeId, Latency)> = BTreeMap::new();
        for (&w, &lat) in &alive[u] {
            let c = cluster[w].expect("alive edges join clustered vertices");
            let better = match best.get(&c) {
                Some(&(bw, blat)) => weight_key(u, w, lat) < weight_key(u, bw, blat),
                None => true,
            };
            if better {
                best.insert(c, (w, lat));
            }
        }
        for &(w, lat) in best.values() {
            builder.add(u, w, lat);
        }
    }

    for list in &mut builder.out {
        list.sort_unstable();
    }
    builder.out
}

fn validate(n_hat: u64, k: u32) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidParam("spanner parameter k must be >= 1".into()));
    }
    if n_hat < 2 {
        return Err(Error::InvalidParam("n_hat must be >= 2".into()));
    }
    Ok(())
}

/// Run the construction with full knowledge of the graph.
pub fn spanner_construct(g: &LatencyGraph, n_hat: u64, k: u32, seed: u64) -> Result<OrientedSpanner> {
    validate(n_hat, k)?;
    let nodes: Vec<NodeId> = (0..g.n()).collect();
    let out = cluster_spanner(g.n(), &nodes, g.edges(), n_hat, k, seed);
    Ok(OrientedSpanner { n: g.n(), out })
}

/// The part of the graph a node can see: everything within `radius` hops,
/// with all edges among those vertices.
#[derive(Clone, Debug)]
pub struct LocalView {
    pub center: NodeId,
    pub nodes: Vec<NodeId>,
    pub edges: Vec<(NodeId, NodeId, Latency)>,
}

pub fn local_view(g: &LatencyGraph, center: NodeId, radius: usize) -> LocalView {
    let mut hops = vec![usize::MAX; g.n()];
    hops[center] = 0;
    let mut queue = std::collections::VecDeque::from([center]);
    while let Some(u) = queue.pop_front() {
        if hops[u] == radius {
            continue;
        }
        for w in g.neighbors(u) {
            if hops[w] == usize::MAX {
                hops[w] = hops[u] + 1;
                queue.push_back(w);
            }
        }
    }
    let nodes: Vec<NodeId> = (0..g.n()).filter(|&v| hops[v] != usize::MAX).collect();
    let edges: Vec<(NodeId, NodeId, Latency)> = g
        .edges()
        .iter()
        .copied()
        .filter(|&(u, v, _)| hops[u] != usize::MAX && hops[v] != usize::MAX)
        .collect();
    LocalView { center, nodes, edges }
}

/// Run the construction independently at every node on its own
/// `radius`-hop view and keep only that node's out-edges. Decisions at a
/// node depend on at most k+1 hops, so any radius past that reproduces the
/// full-knowledge run exactly.
pub fn spanner_construct_local(
    g: &LatencyGraph,
    n_hat: u64,
    k: u32,
    seed: u64,
    radius: usize,
) -> Result<OrientedSpanner> {
    validate(n_hat, k)?;
    let mut out = vec![Vec::new(); g.n()];
    for v in 0..g.n() {
        if radius < k as usize + 1 {
            return Err(Error::ViewTooShallow { node: v, have: radius, need: k as usize + 1 });
        }
        let view = local_view(g, v, radius);
        let local_out = cluster_spanner(g.n(), &view.nodes, &view.edges, n_hat, k, seed);
        out[v] = local_out[v].clone();
    }
    Ok(OrientedSpanner { n: g.n(), out })
}
