//! Deterministic tree gossip restricted to edges of latency <= ell, and the
//! recursive parameter sequence built from it.
//!
//! One logical tree-gossip step spans `ell` engine rounds so that the
//! exchange started at the step's first round lands within the step. Nodes
//! progress through iterations in lock step: iteration `i` lasts `4*i*ell`
//! rounds and consists of four sweeps over the node's accumulated links — the
//! newest link first, then oldest first twice, then newest first again. At
//! each iteration start, a node that still misses some <=ell neighbor links
//! to its smallest uncovered neighbor. A node is done once the rumors of all
//! its <=ell neighbors have reached it; done nodes keep serving their links
//! but add no more.

use crate::error::{Error, Result};
use crate::graph::{LatencyGraph, NodeId};
use crate::protocols::Packet;
use crate::sim::{self, Metrics, NodeView, Protocol, Round, SimConfig};
use crate::util::IdSet;

/// Lock-step state of one tree-gossip phase; reusable as a building block of
/// the composite protocols.
pub struct DtgCore {
    ell: u64,
    phase: u64,
    gamma: Vec<IdSet>,
    gamma_list: Vec<Vec<NodeId>>,
    links: Vec<Vec<NodeId>>,
    reached: Vec<IdSet>,
    iter: u64,
    pos: u64,
}

impl DtgCore {
    /// Start a fresh phase. `gamma_list` holds each node's neighbors over
    /// edges of latency <= ell, ascending.
    pub fn begin(phase: u64, ell: u64, gamma_list: Vec<Vec<NodeId>>) -> Self {
        let n = gamma_list.len();
        let gamma = gamma_list
            .iter()
            .map(|l| {
                let mut s = IdSet::new(n);
                for &u in l {
                    s.insert(u);
                }
                s
            })
            .collect();
        let mut core = DtgCore {
            ell,
            phase,
            gamma,
            gamma_list,
            links: vec![Vec::new(); n],
            reached: (0..n).map(|v| IdSet::singleton(n, v)).collect(),
            iter: 1,
            pos: 0,
        };
        core.add_links();
        core
    }

    pub fn phase(&self) -> u64 {
        self.phase
    }

    fn add_links(&mut self) {
        for v in 0..self.links.len() {
            if self.done(v) {
                continue;
            }
            if let Some(&w) = self.gamma_list[v].iter().find(|&&w| !self.reached[v].contains(w)) {
                self.links[v].push(w);
            }
        }
    }

    /// Advance the lock-step clock by one round; call once per round after
    /// the first.
    pub fn advance(&mut self) {
        self.pos += 1;
        if self.pos == 4 * self.iter * self.ell {
            self.iter += 1;
            self.pos = 0;
            self.add_links();
        }
    }

    /// The link this node serves in the current round, if the round opens a
    /// step and the node holds a link in the step's slot.
    pub fn target(&self, v: NodeId) -> Option<NodeId> {
        if !self.pos.is_multiple_of(self.ell) {
            return None;
        }
        let step = self.pos / self.ell;
        let sweep = step / self.iter;
        let t = step % self.iter;
        let slot = match sweep {
            0 | 3 => self.iter - t,
            _ => t + 1,
        };
        self.links[v].get(slot as usize - 1).copied()
    }

    /// Merge a counterpart's coverage set; ignored when it belongs to a
    /// different phase.
    pub fn deliver(&mut self, v: NodeId, packet: &Packet) {
        if packet.phase == self.phase {
            if let Some(r) = &packet.reached {
                self.reached[v].union_with(r);
            }
        }
    }

    pub fn done(&self, v: NodeId) -> bool {
        self.reached[v].is_superset(&self.gamma[v])
    }

    pub fn all_done(&self) -> bool {
        (0..self.reached.len()).all(|v| self.done(v))
    }

    pub fn reached(&self, v: NodeId) -> &IdSet {
        &self.reached[v]
    }
}

/// Neighbor lists over edges of latency <= ell, ascending per node.
pub fn gamma_lists(g: &LatencyGraph, ell: u64) -> Vec<Vec<NodeId>> {
    (0..g.n())
        .map(|v| g.adj(v).iter().filter(|&&(_, lat)| lat <= ell).map(|&(u, _)| u).collect())
        .collect()
}

/// Standalone single-phase tree gossip.
pub struct LDtg {
    ell: u64,
    core: Option<DtgCore>,
    bags: Vec<IdSet>,
    seen_round: Round,
}

impl LDtg {
    pub fn new(ell: u64) -> Self {
        LDtg { ell, core: None, bags: Vec::new(), seen_round: 0 }
    }

    pub fn bags(&self) -> &[IdSet] {
        &self.bags
    }

    /// Which nodes' rumors reached each node during the phase.
    pub fn coverage(&self, v: NodeId) -> &IdSet {
        self.core.as_ref().expect("initialized").reached(v)
    }

    fn core_mut(&mut self) -> &mut DtgCore {
        self.core.as_mut().expect("initialized")
    }
}

impl Protocol for LDtg {
    type Payload = Packet;

    fn init(&mut self, g: &LatencyGraph, _seed: u64) {
        self.bags = (0..g.n()).map(|v| IdSet::singleton(g.n(), v)).collect();
        self.core = Some(DtgCore::begin(1, self.ell, gamma_lists(g, self.ell)));
        self.seen_round = 0;
    }

    fn on_round(&mut self, view: &NodeView<'_>) -> Option<NodeId> {
        if view.round() > self.seen_round {
            if self.seen_round > 0 {
                self.core_mut().advance();
            }
            self.seen_round = view.round();
        }
        self.core.as_ref().unwrap().target(view.node())
    }

    fn snapshot(&self, node: NodeId) -> Packet {
        let core = self.core.as_ref().unwrap();
        Packet {
            bag: self.bags[node].clone(),
            phase: core.phase(),
            reached: Some(core.reached(node).clone()),
            knowledge: None,
            gather: None,
            failed: None,
        }
    }

    fn on_deliver(&mut self, node: NodeId, _from: NodeId, payload: &Packet, _view: &NodeView<'_>) {
        self.bags[node].union_with(&payload.bag);
        self.core_mut().deliver(node, payload);
    }

    fn is_done(&self, node: NodeId) -> bool {
        self.core.as_ref().is_some_and(|c| c.done(node))
    }
}

/// Run one ell-phase of tree gossip; the returned protocol exposes final
/// bags and per-node coverage.
pub fn l_dtg(g: &LatencyGraph, ell: u64, cfg: &SimConfig) -> Result<(Metrics, LDtg)> {
    if ell == 0 {
        return Err(Error::InvalidParam("ell must be >= 1".into()));
    }
    let mut p = LDtg::new(ell);
    let m = sim::run(g, &mut p, cfg)?;
    Ok((m, p))
}

/// The recursive parameter pattern: S(1) = [1], S(k) = S(k/2) ++ [k] ++ S(k/2).
pub fn t_sequence(k: u64) -> Result<Vec<u64>> {
    if k == 0 || !k.is_power_of_two() {
        return Err(Error::InvalidParam(format!("sequence parameter {k} must be a power of two")));
    }
    fn build(k: u64, out: &mut Vec<u64>) {
        if k == 1 {
            out.push(1);
        } else {
            build(k / 2, out);
            out.push(k);
            build(k / 2, out);
        }
    }
    let mut out = Vec::new();
    build(k, &mut out);
    Ok(out)
}

/// Runs tree-gossip phases back to back following a parameter sequence;
/// rumor bags persist across phases, coverage resets per phase.
pub struct TSequence {
    seq: Vec<u64>,
    idx: usize,
    core: Option<DtgCore>,
    bags: Vec<IdSet>,
    adj: Vec<Vec<(NodeId, u64)>>,
    finished: bool,
    seen_round: Round,
    phase_counter: u64,
}

impl TSequence {
    pub fn new(seq: Vec<u64>) -> Self {
        TSequence {
            seq,
            idx: 0,
            core: None,
            bags: Vec::new(),
            adj: Vec::new(),
            finished: false,
            seen_round: 0,
            phase_counter: 0,
        }
    }

    pub fn bags(&self) -> &[IdSet] {
        &self.bags
    }

    fn gamma_for(&self, ell: u64) -> Vec<Vec<NodeId>> {
        self.adj
            .iter()
            .map(|l| l.iter().filter(|&&(_, lat)| lat <= ell).map(|&(u, _)| u).collect())
            .collect()
    }

    fn start_phase(&mut self) {
        let ell = self.seq[self.idx];
        self.phase_counter += 1;
        self.core = Some(DtgCore::begin(self.phase_counter, ell, self.gamma_for(ell)));
    }

    fn settle(&mut self) {
        while !self.finished && self.core.as_ref().is_none_or(|c| c.all_done()) {
            if self.core.is_some() {
                self.idx += 1;
            }
            if self.idx >= self.seq.len() {
                self.finished = true;
            } else {
                self.start_phase();
            }
        }
    }
}

impl Protocol for TSequence {
    type Payload = Packet;

    fn init(&mut self, g: &LatencyGraph, _seed: u64) {
        let n = g.n();
        self.bags = (0..n).map(|v| IdSet::singleton(n, v)).collect();
        self.adj = (0..n).map(|v| g.adj(v).to_vec()).collect();
        self.idx = 0;
        self.finished = self.seq.is_empty();
        self.seen_round = 0;
        self.settle();
    }

    fn on_round(&mut self, view: &NodeView<'_>) -> Option<NodeId> {
        if view.round() > self.seen_round {
            let first = self.seen_round == 0;
            self.seen_round = view.round();
            if !self.finished {
                if !first && !self.core.as_ref().unwrap().all_done() {
                    self.core.as_mut().unwrap().advance();
                }
                self.settle();
            }
        }
        if self.finished {
            return None;
        }
        self.core.as_ref().unwrap().target(view.node())
    }

    fn snapshot(&self, node: NodeId) -> Packet {
        let (phase, reached) = match &self.core {
            Some(c) if !self.finished => (c.phase(), Some(c.reached(node).clone())),
            _ => (0, None),
        };
        Packet {
            bag: self.bags[node].clone(),
            phase,
            reached,
            knowledge: None,
            gather: None,
            failed: None,
        }
    }

    fn on_deliver(&mut self, node: NodeId, _from: NodeId, payload: &Packet, _view: &NodeView<'_>) {
        self.bags[node].union_with(&payload.bag);
        if let Some(core) = &mut self.core {
            core.deliver(node, payload);
        }
    }

    fn is_done(&self, _node: NodeId) -> bool {
        self.finished
    }

    fn is_complete(&self, node: NodeId) -> bool {
        self.bags.get(node).is_some_and(|b| b.is_full())
    }
}

/// Execute the full pattern for parameter `k` (a power of two).
pub fn run_t_sequence(g: &LatencyGraph, k: u64, cfg: &SimConfig) -> Result<(Metrics, TSequence)> {
    let seq = t_sequence(k)?;
    let mut p = TSequence::new(seq);
    let m = sim::run(g, &mut p, cfg)?;
    Ok((m, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate;
    use crate::util::median;

    fn cfg(max: u64) -> SimConfig {
        SimConfig::new(0, max)
    }

    #[test]
    fn sequence_pattern_matches_recursion() {
        assert_eq!(t_sequence(1).unwrap(), vec![1]);
        assert_eq!(t_sequence(2).unwrap(), vec![1, 2, 1]);
        assert_eq!(t_sequence(4).unwrap(), vec![1, 2, 1, 4, 1, 2, 1]);
        assert_eq!(
            t_sequence(8).unwrap(),
            vec![1, 2, 1, 4, 1, 2, 1, 8, 1, 2, 1, 4, 1, 2, 1]
        );
        assert!(t_sequence(3).is_err());
        assert!(t_sequence(0).is_err());
        assert!(t_sequence(12).is_err());
    }

    #[test]
    fn star_center_exchanges_with_every_leaf() {
        let g = generate::star(&[1, 1, 1, 1, 1]).unwrap();
        let (m, p) = l_dtg(&g, 1, &cfg(500)).unwrap();
        assert!(m.completed);
        assert!(p.bags()[0].is_full());
        for leaf in 1..=5 {
            assert!(p.bags()[leaf].contains(0));
        }
    }

    #[test]
    fn skips_edges_above_the_latency_bound() {
        // edges (0,1,1), (0,2,1), (1,2,4): at ell=1 the pair 1-2 is out of
        // scope and the run must not wait for it
        let g = LatencyGraph::new(3, &[(0, 1, 1), (0, 2, 1), (1, 2, 4)]).unwrap();
        let (m, p) = l_dtg(&g, 1, &cfg(500)).unwrap();
        assert!(m.completed);
        assert!(p.bags()[0].contains(1) && p.bags()[0].contains(2));
        assert!(p.bags()[1].contains(0) && p.bags()[2].contains(0));
        assert!(!p.bags()[1].contains(2), "pair above the bound must not be required");
        assert!(m.rounds_elapsed < 4);
    }

    #[test]
    fn mutual_exchange_holds_for_every_qualifying_pair() {
        for seed in 0..10 {
            let g = generate::random_connected(14, 24, 6, seed).unwrap();
            let ell = 3;
            let (m, p) = l_dtg(&g, ell, &cfg(5_000)).unwrap();
            assert!(m.completed, "seed {seed}");
            for (u, v, lat) in g.edges() {
                if *lat <= ell {
                    assert!(p.bags()[*u].contains(*v), "seed {seed} edge {u}-{v}");
                    assert!(p.bags()[*v].contains(*u), "seed {seed} edge {v}-{u}");
                }
            }
        }
    }

    #[test]
    fn unit_path_rounds_stay_polylogarithmic() {
        let g = generate::path(&[1; 31]).unwrap();
        let (m, _) = l_dtg(&g, 1, &cfg(10_000)).unwrap();
        assert!(m.completed);
        // log2(32)^2 = 25; the lock-step schedule costs a constant factor
        assert!(m.rounds_elapsed <= 8 * 25, "rounds {}", m.rounds_elapsed);
    }

    #[test]
    fn clique_completion_rounds_concentrate() {
        let g = generate::clique(64, 1).unwrap();
        let mut rounds: Vec<u64> = (0..5)
            .map(|s| {
                let (m, _) = l_dtg(&g, 1, &SimConfig::new(s, 10_000)).unwrap();
                assert!(m.completed);
                m.rounds_elapsed
            })
            .collect();
        // deterministic protocol: every seed takes the same count
        assert_eq!(rounds.iter().min(), rounds.iter().max());
        assert!(median(&mut rounds) <= 8 * 36);
    }

    #[test]
    fn paths_pair_up_in_one_step() {
        // every node initiates toward its smaller neighbor in round 1, so a
        // path exchanges all pairs simultaneously: done once that step lands
        for ell in [1u64, 2, 5] {
            let g = generate::path(&[ell; 7]).unwrap();
            let (m, _) = l_dtg(&g, ell, &cfg(10_000)).unwrap();
            assert_eq!(m.rounds_elapsed, ell + 1);
        }
    }

    #[test]
    fn latency_scales_rounds_linearly() {
        // all exchange deliveries land exactly at step boundaries, so the
        // per-step dynamics are identical for every ell and round counts
        // scale linearly. A cycle needs several steps (the ring-closing
        // edge is nobody's first link), which keeps the ratio near ell.
        fn cycle(n: usize, lat: u64) -> LatencyGraph {
            let mut edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1, lat)).collect();
            edges.push((0, n - 1, lat));
            LatencyGraph::new(n, &edges).unwrap()
        }
        let (m1, _) = l_dtg(&cycle(8, 1), 1, &cfg(10_000)).unwrap();
        let (m5, _) = l_dtg(&cycle(8, 5), 5, &cfg(10_000)).unwrap();
        assert!(m1.rounds_elapsed >= 4, "cycle should need multiple steps");
        assert!(
            m5.rounds_elapsed >= 4 * m1.rounds_elapsed && m5.rounds_elapsed <= 6 * m1.rounds_elapsed,
            "{} vs {}",
            m5.rounds_elapsed,
            m1.rounds_elapsed
        );
    }

    #[test]
    fn pattern_run_covers_distance_bounded_pairs() {
        // 0-1 latency 2, 1-2 latency 2: distance(0,2)=4, covered by k=4
        let g = generate::path(&[2, 2]).unwrap();
        let (m, p) = run_t_sequence(&g, 4, &cfg(5_000)).unwrap();
        assert!(m.completed);
        assert!(p.bags().iter().all(|b| b.is_full()));
    }

    #[test]
    fn pattern_run_scopes_to_the_distance_bound() {
        // path with one latency-8 edge: k=2 cannot ferry across it
        let g = generate::path(&[1, 8, 1]).unwrap();
        let (m, p) = run_t_sequence(&g, 2, &cfg(5_000)).unwrap();
        assert!(m.completed);
        assert!(p.bags()[0].contains(1));
        assert!(p.bags()[3].contains(2));
        assert!(!p.bags()[0].contains(2), "pair at distance 9 not required at k=2");
    }

    #[test]
    fn single_node_terminates_immediately() {
        let g = LatencyGraph::new(1, &[]).unwrap();
        let (m, _) = run_t_sequence(&g, 8, &cfg(100)).unwrap();
        assert!(m.completed);
        assert_eq!(m.rounds_elapsed, 0);
    }

    #[test]
    fn middle_nodes_ferry_between_halves() {
        // the four shapes of a distance-2k path: both halves light; an
        // endpoint-heavy edge; a middle-heavy edge; asymmetric split
        let cases: Vec<Vec<u64>> = vec![
            vec![2, 2],       // equidistant midpoint
            vec![1, 1, 1, 1], // midpoint between inner nodes
            vec![3, 1],       // heavy edge at one end
            vec![1, 2, 1],    // heavy-ish edge between inner nodes
        ];
        for lats in cases {
            let total: u64 = lats.iter().sum();
            let k = total.next_power_of_two();
            let g = generate::path(&lats).unwrap();
            let (m, p) = run_t_sequence(&g, k, &cfg(20_000)).unwrap();
            assert!(m.completed, "{lats:?}");
            assert!(
                p.bags().iter().all(|b| b.is_full()),
                "{lats:?} should fully exchange at k={k}"
            );
        }
    }
}
