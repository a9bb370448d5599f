//! All-to-all dissemination built from the low-latency toolbox: round-robin
//! forwarding over an oriented spanner, guess-and-double pipelines for
//! unknown diameters, a distributed termination check, and latency probing
//! for the unknown-latency scenario.
//!
//! The guess-and-double protocols share one shape. For the current estimate
//! `k` they disseminate over edges of latency ≤ k, then run a check pass:
//! one more k-bounded local-broadcast phase, a gather pass that compares
//! frozen rumor sets and flag bits across the k-neighborhood, and a
//! propagate pass that floods any failure. A node's flag is raised when a
//! graph neighbor's rumor is missing or when the check phase itself changed
//! the node's rumor set (it then owes its neighbors another exchange). If
//! anyone failed, everyone doubles `k` and retries; otherwise all nodes
//! terminate in the same round.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::graph::{Latency, LatencyGraph, NodeId};
use crate::protocols::dtg::{t_sequence, DtgCore};
use crate::protocols::push_pull::{push_pull, PushPullMode};
use crate::protocols::spanner::{cluster_spanner, OrientedSpanner};
use crate::protocols::{Packet, PeerReport};
use crate::sim::{run, Metrics, NodeView, Protocol, Round, SimConfig};
use crate::util::{derive_seed, IdSet};

const SPANNER_SALT: u64 = 0x4549_4453;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scenario {
    /// Nodes can read incident edge latencies from the start.
    Known,
    /// Latencies must be probed; each doubling starts with a discovery stage.
    Unknown,
}

#[derive(Clone, Copy, Debug)]
pub struct PipelineParams {
    /// Size estimate handed to the spanner construction; defaults to n².
    pub n_hat: Option<u64>,
    /// Multiplier on the round-robin reach `k·(2k_sp − 1)`.
    pub rr_scale: u64,
}

impl Default for PipelineParams {
    fn default() -> Self {
        PipelineParams { n_hat: None, rr_scale: 1 }
    }
}

fn ceil_log2(x: u64) -> u32 {
    debug_assert!(x >= 2);
    64 - (x - 1).leading_zeros()
}

// ---------------------------------------------------------------------------
// Round-robin broadcast over an oriented spanner.
// ---------------------------------------------------------------------------

/// Each node cycles through its spanner out-edges of latency ≤ k for
/// `k·Δ_out + k` rounds; any two nodes at spanner distance ≤ k exchange.
pub struct RrBroadcast {
    lists: Vec<Vec<NodeId>>,
    bags: Vec<IdSet>,
    duration: Round,
    seen_round: Round,
}

impl RrBroadcast {
    fn new(spanner: &OrientedSpanner, k: u64) -> Self {
        let n = spanner.n();
        let lists: Vec<Vec<NodeId>> = (0..n)
            .map(|v| {
                spanner
                    .out_edges(v)
                    .iter()
                    .filter(|&&(_, lat)| lat <= k)
                    .map(|&(w, _)| w)
                    .collect()
            })
            .collect();
        let delta = lists.iter().map(Vec::len).max().unwrap_or(0) as u64;
        RrBroadcast { lists, bags: Vec::new(), duration: k * delta + k, seen_round: 0 }
    }

    pub fn bags(&self) -> &[IdSet] {
        &self.bags
    }
}

impl Protocol for RrBroadcast {
    type Payload = Packet;

    fn init(&mut self, g: &LatencyGraph, _seed: u64) {
        self.bags = (0..g.n()).map(|v| IdSet::singleton(g.n(), v)).collect();
        self.seen_round = 0;
    }

    fn on_round(&mut self, view: &NodeView<'_>) -> Option<NodeId> {
        let round = view.round();
        self.seen_round = self.seen_round.max(round);
        if round > self.duration {
            return None;
        }
        let list = &self.lists[view.node()];
        if list.is_empty() {
            return None;
        }
        Some(list[((round - 1) as usize) % list.len()])
    }

    fn snapshot(&self, node: NodeId) -> Packet {
        Packet::bag_only(self.bags[node].clone(), 0)
    }

    fn on_deliver(&mut self, node: NodeId, _from: NodeId, payload: &Packet, _view: &NodeView<'_>) {
        self.bags[node].union_with(&payload.bag);
    }

    fn is_done(&self, _node: NodeId) -> bool {
        self.seen_round >= self.duration
    }

    fn is_complete(&self, node: NodeId) -> bool {
        self.bags[node].is_full()
    }
}

/// Run the round-robin stage standalone and return the final rumor sets.
pub fn rr_broadcast(
    g: &LatencyGraph,
    spanner: &OrientedSpanner,
    k: u64,
    cfg: &SimConfig,
) -> Result<(Metrics, Vec<IdSet>)> {
    if k == 0 {
        return Err(Error::InvalidParam("round-robin reach k must be at least 1".into()));
    }
    if spanner.n() != g.n() {
        return Err(Error::InvalidParam("spanner and graph node counts differ".into()));
    }
    let mut proto = RrBroadcast::new(spanner, k);
    let metrics = run(g, &mut proto, cfg)?;
    Ok((metrics, proto.bags))
}

// ---------------------------------------------------------------------------
// Shared termination-check bookkeeping.
// ---------------------------------------------------------------------------

struct CheckState {
    /// Rumor sets as they were when the check phase started.
    baseline: Vec<IdSet>,
    /// Rumor sets frozen when the check phase ended; gather compares these.
    frozen: Vec<IdSet>,
    flags: Vec<bool>,
    collected: Vec<BTreeMap<NodeId, PeerReport>>,
    failed: Vec<bool>,
    gather_min: u64,
    propagate_min: u64,
}

impl CheckState {
    fn new(n: usize) -> Self {
        CheckState {
            baseline: vec![IdSet::new(n); n],
            frozen: vec![IdSet::new(n); n],
            flags: vec![false; n],
            collected: vec![BTreeMap::new(); n],
            failed: vec![false; n],
            gather_min: u64::MAX,
            propagate_min: u64::MAX,
        }
    }

    fn reset(&mut self) {
        for v in 0..self.flags.len() {
            self.baseline[v].clear();
            self.frozen[v].clear();
            self.collected[v].clear();
            self.flags[v] = false;
            self.failed[v] = false;
        }
        self.gather_min = u64::MAX;
        self.propagate_min = u64::MAX;
    }

    fn record_baseline(&mut self, bags: &[IdSet]) {
        self.baseline.clone_from_slice(bags);
    }

    fn freeze(&mut self, bags: &[IdSet], neighbor_ids: &[Vec<NodeId>]) {
        for v in 0..bags.len() {
            self.frozen[v] = bags[v].clone();
            self.flags[v] = neighbor_ids[v].iter().any(|&w| !bags[v].contains(w))
                || bags[v] != self.baseline[v];
            self.collected[v].clear();
            self.collected[v]
                .insert(v, PeerReport { bag: self.frozen[v].clone(), flag: self.flags[v] });
        }
    }

    fn compute_statuses(&mut self) {
        for v in 0..self.flags.len() {
            self.failed[v] =
                self.collected[v].values().any(|rep| rep.flag || rep.bag != self.frozen[v]);
        }
    }

    fn deliver(&mut self, node: NodeId, payload: &Packet) {
        if let Some(reports) = &payload.gather {
            if payload.phase >= self.gather_min {
                for (id, rep) in reports {
                    self.collected[node].entry(*id).or_insert_with(|| rep.clone());
                }
            }
        }
        if payload.failed == Some(true) && payload.phase >= self.propagate_min {
            self.failed[node] = true;
        }
    }
}

// ---------------------------------------------------------------------------
// The spanner pipeline: DTG neighborhood collection, local spanner, round
// robin, then the termination check; doubles the estimate until it passes.
// ---------------------------------------------------------------------------

enum Stage {
    Discover { start: Round, until: Round },
    Dtg { rep: u32 },
    Rr { start: Round, until: Round },
    CheckDtg,
    Gather { start: Round, until: Round },
    Propagate { start: Round, until: Round },
    Finished,
}

pub struct SpannerPipeline {
    scenario: Scenario,
    params: PipelineParams,
    doubling: bool,
    initial_k: u64,
    // Resolved at init.
    n: usize,
    n_hat: u64,
    k_sp: u32,
    spanner_seed: u64,
    neighbor_ids: Vec<Vec<NodeId>>,
    edge_info: Vec<(NodeId, NodeId, Latency)>,
    incident: Vec<Vec<usize>>,
    // Run state.
    k: u64,
    stage: Stage,
    core: Option<DtgCore>,
    core_started: Round,
    phase_counter: u64,
    seen_round: Round,
    bags: Vec<IdSet>,
    knowledge: Vec<IdSet>,
    known_lat: Vec<BTreeMap<NodeId, Latency>>,
    rr_lists: Vec<Vec<NodeId>>,
    rr_duration: Round,
    spanner: Option<OrientedSpanner>,
    check: CheckState,
    terminated: Vec<bool>,
}

impl SpannerPipeline {
    fn new(scenario: Scenario, params: PipelineParams, doubling: bool, initial_k: u64) -> Self {
        SpannerPipeline {
            scenario,
            params,
            doubling,
            initial_k,
            n: 0,
            n_hat: 2,
            k_sp: 1,
            spanner_seed: 0,
            neighbor_ids: Vec::new(),
            edge_info: Vec::new(),
            incident: Vec::new(),
            k: initial_k,
            stage: Stage::Finished,
            core: None,
            core_started: 0,
            phase_counter: 0,
            seen_round: 0,
            bags: Vec::new(),
            knowledge: Vec::new(),
            known_lat: Vec::new(),
            rr_lists: Vec::new(),
            rr_duration: 0,
            spanner: None,
            check: CheckState::new(0),
            terminated: Vec::new(),
        }
    }

    pub fn bags(&self) -> &[IdSet] {
        &self.bags
    }

    pub fn spanner(&self) -> Option<&OrientedSpanner> {
        self.spanner.as_ref()
    }

    /// The estimate in force when the run ended.
    pub fn final_k(&self) -> u64 {
        self.k
    }

    pub fn terminated(&self) -> &[bool] {
        &self.terminated
    }

    fn reach(&self) -> u64 {
        self.params.rr_scale.max(1) * self.k * (2 * self.k_sp as u64 - 1).max(1)
    }

    fn reps(&self) -> u32 {
        self.k_sp + 1
    }

    fn gammas(&self) -> Vec<Vec<NodeId>> {
        (0..self.n)
            .map(|v| {
                self.known_lat[v]
                    .iter()
                    .filter(|&(_, &lat)| lat <= self.k)
                    .map(|(&w, _)| w)
                    .collect()
            })
            .collect()
    }

    fn begin_core(&mut self, round: Round) {
        self.phase_counter += 1;
        self.core = Some(DtgCore::begin(self.phase_counter, self.k, self.gammas()));
        self.core_started = round;
    }

    fn begin_iteration(&mut self, round: Round) {
        match self.scenario {
            Scenario::Unknown => {
                self.phase_counter += 1;
                self.core = None;
                self.stage = Stage::Discover { start: round, until: round + 2 * self.k - 1 };
            }
            Scenario::Known => self.begin_dtg(0, round),
        }
    }

    fn begin_dtg(&mut self, rep: u32, round: Round) {
        if rep == 0 {
            self.seed_knowledge();
        }
        self.begin_core(round);
        self.stage = Stage::Dtg { rep };
    }

    fn seed_knowledge(&mut self) {
        for v in 0..self.n {
            for &e in &self.incident[v] {
                let (a, b, lat) = self.edge_info[e];
                let w = if a == v { b } else { a };
                if lat <= self.k && self.known_lat[v].contains_key(&w) {
                    self.knowledge[v].insert(e);
                }
            }
        }
    }

    fn begin_rr(&mut self, round: Round) {
        let reach = self.reach();
        let mut out = vec![Vec::new(); self.n];
        for (v, out_v) in out.iter_mut().enumerate() {
            let mut nodes = BTreeSet::new();
            nodes.insert(v);
            let mut edges = Vec::new();
            for e in self.knowledge[v].iter() {
                let (a, b, lat) = self.edge_info[e];
                nodes.insert(a);
                nodes.insert(b);
                edges.push((a, b, lat));
            }
            let node_list: Vec<NodeId> = nodes.into_iter().collect();
            *out_v = cluster_spanner(
                self.n,
                &node_list,
                &edges,
                self.n_hat,
                self.k_sp,
                self.spanner_seed,
            )[v]
                .clone();
        }
        self.rr_lists = out
            .iter()
            .map(|list| list.iter().filter(|&&(_, lat)| lat <= reach).map(|&(w, _)| w).collect())
            .collect();
        self.spanner = Some(OrientedSpanner::from_out(self.n, out));
        let delta = self.rr_lists.iter().map(Vec::len).max().unwrap_or(0) as u64;
        self.rr_duration = reach * delta + reach;
        self.phase_counter += 1;
        self.core = None;
        self.stage = Stage::Rr { start: round, until: round + self.rr_duration - 1 };
    }

    fn begin_check(&mut self, round: Round) {
        self.check.record_baseline(&self.bags);
        self.begin_core(round);
        self.stage = Stage::CheckDtg;
    }

    fn begin_gather(&mut self, round: Round) {
        self.check.freeze(&self.bags, &self.neighbor_ids);
        self.phase_counter += 1;
        self.check.gather_min = self.phase_counter;
        self.core = None;
        self.stage = Stage::Gather { start: round, until: round + self.rr_duration - 1 };
    }

    fn begin_propagate(&mut self, round: Round) {
        self.check.compute_statuses();
        self.phase_counter += 1;
        self.check.propagate_min = self.phase_counter;
        self.stage = Stage::Propagate { start: round, until: round + self.rr_duration - 1 };
    }

    fn decide(&mut self, round: Round) {
        for v in 0..self.n {
            if !self.check.failed[v] {
                self.terminated[v] = true;
            }
        }
        if self.terminated.iter().all(|&t| t) {
            self.core = None;
            self.stage = Stage::Finished;
        } else {
            self.k = self.k.saturating_mul(2);
            self.check.reset();
            self.begin_iteration(round);
        }
    }

    fn tick(&mut self, round: Round) {
        loop {
            match self.stage {
                Stage::Finished => return,
                Stage::Discover { until, .. } => {
                    if round > until {
                        self.begin_dtg(0, round);
                        continue;
                    }
                    return;
                }
                Stage::Dtg { rep } => {
                    let core = self.core.as_ref().expect("dtg stage has a core");
                    if core.all_done() {
                        if rep + 1 < self.reps() {
                            self.begin_dtg(rep + 1, round);
                        } else {
                            self.begin_rr(round);
                        }
                        continue;
                    }
                    if round > self.core_started {
                        self.core.as_mut().unwrap().advance();
                    }
                    return;
                }
                Stage::Rr { until, .. } => {
                    if round > until {
                        if self.doubling {
                            self.begin_check(round);
                        } else {
                            for t in &mut self.terminated {
                                *t = true;
                            }
                            self.core = None;
                            self.stage = Stage::Finished;
                        }
                        continue;
                    }
                    return;
                }
                Stage::CheckDtg => {
                    let core = self.core.as_ref().expect("check stage has a core");
                    if core.all_done() {
                        self.begin_gather(round);
                        continue;
                    }
                    if round > self.core_started {
                        self.core.as_mut().unwrap().advance();
                    }
                    return;
                }
                Stage::Gather { until, .. } => {
                    if round > until {
                        self.begin_propagate(round);
                        continue;
                    }
                    return;
                }
                Stage::Propagate { until, .. } => {
                    if round > until {
                        self.decide(round);
                        continue;
                    }
                    return;
                }
            }
        }
    }
}

impl Protocol for SpannerPipeline {
    type Payload = Packet;

    fn init(&mut self, g: &LatencyGraph, seed: u64) {
        let n = g.n();
        self.n = n;
        self.n_hat = self.params.n_hat.unwrap_or((n as u64).saturating_mul(n as u64)).max(2);
        self.k_sp = ceil_log2(self.n_hat);
        self.spanner_seed = derive_seed(seed, SPANNER_SALT);
        self.neighbor_ids = (0..n).map(|v| g.neighbors(v).collect()).collect();
        self.edge_info = g.edges().to_vec();
        self.incident = {
            let mut inc = vec![Vec::new(); n];
            for (i, &(a, b, _)) in self.edge_info.iter().enumerate() {
                inc[a].push(i);
                inc[b].push(i);
            }
            inc
        };
        self.k = self.initial_k;
        self.phase_counter = 0;
        self.seen_round = 0;
        self.core = None;
        self.bags = (0..n).map(|v| IdSet::singleton(n, v)).collect();
        self.knowledge = vec![IdSet::new(self.edge_info.len()); n];
        self.known_lat = match self.scenario {
            Scenario::Known => (0..n).map(|v| g.adj(v).iter().copied().collect()).collect(),
            Scenario::Unknown => vec![BTreeMap::new(); n],
        };
        self.rr_lists = vec![Vec::new(); n];
        self.rr_duration = 0;
        self.spanner = None;
        self.check = CheckState::new(n);
        self.terminated = vec![false; n];
        self.begin_iteration(1);
    }

    fn on_round(&mut self, view: &NodeView<'_>) -> Option<NodeId> {
        let round = view.round();
        if round > self.seen_round {
            self.seen_round = round;
            self.tick(round);
        }
        let v = view.node();
        if self.terminated[v] {
            return None;
        }
        match self.stage {
            Stage::Discover { start, .. } => {
                let i = (round - start + 1) as usize;
                if i as u64 <= self.k {
                    self.neighbor_ids[v].get(i - 1).copied()
                } else {
                    None
                }
            }
            Stage::Dtg { .. } | Stage::CheckDtg => self.core.as_ref().unwrap().target(v),
            Stage::Rr { start, .. } | Stage::Gather { start, .. } | Stage::Propagate { start, .. } => {
                let list = &self.rr_lists[v];
                if list.is_empty() {
                    return None;
                }
                Some(list[((round - start) as usize) % list.len()])
            }
            Stage::Finished => None,
        }
    }

    fn snapshot(&self, node: NodeId) -> Packet {
        // Discovery probes only reveal latencies. Rumors may move solely over
        // exchanges the current estimate sanctions, otherwise the termination
        // conditions lose their meaning.
        let bag = match self.stage {
            Stage::Discover { .. } => IdSet::new(self.n),
            _ => self.bags[node].clone(),
        };
        let mut p = Packet::bag_only(bag, self.phase_counter);
        match self.stage {
            Stage::Dtg { .. } | Stage::CheckDtg => {
                let core = self.core.as_ref().unwrap();
                p.reached = Some(core.reached(node).clone());
                p.knowledge = Some(self.knowledge[node].clone());
            }
            Stage::Rr { .. } => {
                p.knowledge = Some(self.knowledge[node].clone());
            }
            Stage::Gather { .. } => {
                p.gather = Some(self.check.collected[node].clone());
            }
            Stage::Propagate { .. } => {
                p.failed = Some(self.check.failed[node]);
            }
            Stage::Discover { .. } | Stage::Finished => {}
        }
        p
    }

    fn on_deliver(&mut self, node: NodeId, from: NodeId, payload: &Packet, view: &NodeView<'_>) {
        self.bags[node].union_with(&payload.bag);
        if let Some(lat) = view.latency_to(from) {
            self.known_lat[node].insert(from, lat);
        }
        if let Some(knowledge) = &payload.knowledge {
            self.knowledge[node].union_with(knowledge);
        }
        if let Some(core) = &mut self.core {
            core.deliver(node, payload);
        }
        self.check.deliver(node, payload);
    }

    fn is_done(&self, node: NodeId) -> bool {
        self.terminated[node]
    }

    fn is_complete(&self, node: NodeId) -> bool {
        if self.doubling {
            self.terminated[node]
        } else {
            self.bags[node].is_full()
        }
    }
}

/// One dissemination pass with a fixed diameter guess (latencies known).
pub fn eid(
    g: &LatencyGraph,
    d_guess: u64,
    params: PipelineParams,
    cfg: &SimConfig,
) -> Result<(Metrics, SpannerPipeline)> {
    if d_guess == 0 {
        return Err(Error::InvalidParam("diameter guess must be at least 1".into()));
    }
    let mut proto = SpannerPipeline::new(Scenario::Known, params, false, d_guess);
    let metrics = run(g, &mut proto, cfg)?;
    Ok((metrics, proto))
}

/// Guess-and-double dissemination; doubles the estimate until the
/// termination check passes everywhere.
pub fn general_eid(
    g: &LatencyGraph,
    scenario: Scenario,
    params: PipelineParams,
    cfg: &SimConfig,
) -> Result<(Metrics, SpannerPipeline)> {
    let mut proto = SpannerPipeline::new(scenario, params, true, 1);
    let metrics = run(g, &mut proto, cfg)?;
    Ok((metrics, proto))
}

// ---------------------------------------------------------------------------
// Path discovery: the same doubling loop running recursive T(k) patterns
// instead of spanner construction; needs no estimate of n.
// ---------------------------------------------------------------------------

enum PdStage {
    Dissem,
    Check,
    Gather,
    Propagate,
    Finished,
}

pub struct PathDiscovery {
    n: usize,
    adj: Vec<Vec<(NodeId, Latency)>>,
    neighbor_ids: Vec<Vec<NodeId>>,
    k: u64,
    seq: Vec<u64>,
    seq_idx: usize,
    stage: PdStage,
    core: Option<DtgCore>,
    core_started: Round,
    phase_counter: u64,
    seen_round: Round,
    bags: Vec<IdSet>,
    check: CheckState,
    terminated: Vec<bool>,
}

impl PathDiscovery {
    fn new() -> Self {
        PathDiscovery {
            n: 0,
            adj: Vec::new(),
            neighbor_ids: Vec::new(),
            k: 1,
            seq: Vec::new(),
            seq_idx: 0,
            stage: PdStage::Finished,
            core: None,
            core_started: 0,
            phase_counter: 0,
            seen_round: 0,
            bags: Vec::new(),
            check: CheckState::new(0),
            terminated: Vec::new(),
        }
    }

    pub fn bags(&self) -> &[IdSet] {
        &self.bags
    }

    pub fn final_k(&self) -> u64 {
        self.k
    }

    pub fn terminated(&self) -> &[bool] {
        &self.terminated
    }

    fn gammas(&self, ell: u64) -> Vec<Vec<NodeId>> {
        self.adj
            .iter()
            .map(|list| list.iter().filter(|&&(_, lat)| lat <= ell).map(|&(w, _)| w).collect())
            .collect()
    }

    fn begin_phase(&mut self, ell: u64, round: Round) {
        self.phase_counter += 1;
        self.core = Some(DtgCore::begin(self.phase_counter, ell, self.gammas(ell)));
        self.core_started = round;
    }

    fn begin_seq(&mut self, stage: PdStage, round: Round) {
        self.seq = t_sequence(self.k).expect("estimate stays a power of two");
        self.seq_idx = 0;
        let ell = self.seq[0];
        match &stage {
            PdStage::Gather => {
                self.check.gather_min = self.phase_counter + 1;
            }
            PdStage::Propagate => {
                self.check.propagate_min = self.phase_counter + 1;
            }
            _ => {}
        }
        self.stage = stage;
        self.begin_phase(ell, round);
    }

    fn begin_iteration(&mut self, round: Round) {
        self.begin_seq(PdStage::Dissem, round);
    }

    fn decide(&mut self, round: Round) {
        for v in 0..self.n {
            if !self.check.failed[v] {
                self.terminated[v] = true;
            }
        }
        if self.terminated.iter().all(|&t| t) {
            self.core = None;
            self.stage = PdStage::Finished;
        } else {
            self.k = self.k.saturating_mul(2);
            self.check.reset();
            self.begin_iteration(round);
        }
    }

    fn tick(&mut self, round: Round) {
        loop {
            match self.stage {
                PdStage::Finished => return,
                PdStage::Check => {
                    let core = self.core.as_ref().expect("check stage has a core");
                    if core.all_done() {
                        self.check.freeze(&self.bags, &self.neighbor_ids);
                        self.begin_seq(PdStage::Gather, round);
                        continue;
                    }
                    if round > self.core_started {
                        self.core.as_mut().unwrap().advance();
                    }
                    return;
                }
                PdStage::Dissem | PdStage::Gather | PdStage::Propagate => {
                    let core = self.core.as_ref().expect("sequence stage has a core");
                    if core.all_done() {
                        self.seq_idx += 1;
                        if self.seq_idx < self.seq.len() {
                            let ell = self.seq[self.seq_idx];
                            self.begin_phase(ell, round);
                        } else {
                            match self.stage {
                                PdStage::Dissem => {
                                    self.check.record_baseline(&self.bags);
                                    self.begin_phase(self.k, round);
                                    self.stage = PdStage::Check;
                                }
                                PdStage::Gather => {
                                    self.check.compute_statuses();
                                    self.begin_seq(PdStage::Propagate, round);
                                }
                                PdStage::Propagate => self.decide(round),
                                _ => unreachable!(),
                            }
                        }
                        continue;
                    }
                    if round > self.core_started {
                        self.core.as_mut().unwrap().advance();
                    }
                    return;
                }
            }
        }
    }
}

impl Protocol for PathDiscovery {
    type Payload = Packet;

    fn init(&mut self, g: &LatencyGraph, _seed: u64) {
        let n = g.n();
        self.n = n;
        self.adj = (0..n).map(|v| g.adj(v).to_vec()).collect();
        self.neighbor_ids = (0..n).map(|v| g.neighbors(v).collect()).collect();
        self.k = 1;
        self.phase_counter = 0;
        self.seen_round = 0;
        self.bags = (0..n).map(|v| IdSet::singleton(n, v)).collect();
        self.check = CheckState::new(n);
        self.terminated = vec![false; n];
        self.begin_iteration(1);
    }

    fn on_round(&mut self, view: &NodeView<'_>) -> Option<NodeId> {
        let round = view.round();
        if round > self.seen_round {
            self.seen_round = round;
            self.tick(round);
        }
        let v = view.node();
        if self.terminated[v] {
            return None;
        }
        match self.stage {
            PdStage::Finished => None,
            _ => self.core.as_ref().and_then(|core| core.target(v)),
        }
    }

    fn snapshot(&self, node: NodeId) -> Packet {
        let mut p = Packet::bag_only(self.bags[node].clone(), self.phase_counter);
        if let Some(core) = &self.core {
            p.reached = Some(core.reached(node).clone());
        }
        match self.stage {
            PdStage::Gather => p.gather = Some(self.check.collected[node].clone()),
            PdStage::Propagate => p.failed = Some(self.check.failed[node]),
            _ => {}
        }
        p
    }

    fn on_deliver(&mut self, node: NodeId, _from: NodeId, payload: &Packet, _view: &NodeView<'_>) {
        self.bags[node].union_with(&payload.bag);
        if let Some(core) = &mut self.core {
            core.deliver(node, payload);
        }
        self.check.deliver(node, payload);
    }

    fn is_done(&self, node: NodeId) -> bool {
        self.terminated[node]
    }

    fn is_complete(&self, node: NodeId) -> bool {
        self.terminated[node]
    }
}

/// Guess-and-double all-to-all dissemination via T(k) patterns; requires no
/// knowledge of n, D, or the spanner machinery.
pub fn path_discovery(g: &LatencyGraph, cfg: &SimConfig) -> Result<(Metrics, PathDiscovery)> {
    let mut proto = PathDiscovery::new();
    let metrics = run(g, &mut proto, cfg)?;
    Ok((metrics, proto))
}

// ---------------------------------------------------------------------------
// Standalone termination check.
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct TerminationOutcome {
    pub flags: Vec<bool>,
    /// Per-node status after the propagate pass: true means "failed".
    pub failed: Vec<bool>,
    pub passed: bool,
}

struct TerminationCheck {
    initial: Vec<IdSet>,
    k: u64,
    k_hat: u64,
    n: usize,
    adj: Vec<Vec<(NodeId, Latency)>>,
    neighbor_ids: Vec<Vec<NodeId>>,
    stage: PdStage,
    seq: Vec<u64>,
    seq_idx: usize,
    core: Option<DtgCore>,
    core_started: Round,
    phase_counter: u64,
    seen_round: Round,
    bags: Vec<IdSet>,
    check: CheckState,
    finished: bool,
}

impl TerminationCheck {
    fn new(initial: Vec<IdSet>, k: u64) -> Self {
        TerminationCheck {
            initial,
            k,
            k_hat: k.next_power_of_two(),
            n: 0,
            adj: Vec::new(),
            neighbor_ids: Vec::new(),
            stage: PdStage::Finished,
            seq: Vec::new(),
            seq_idx: 0,
            core: None,
            core_started: 0,
            phase_counter: 0,
            seen_round: 0,
            bags: Vec::new(),
            check: CheckState::new(0),
            finished: false,
        }
    }

    fn gammas(&self, ell: u64) -> Vec<Vec<NodeId>> {
        self.adj
            .iter()
            .map(|list| list.iter().filter(|&&(_, lat)| lat <= ell).map(|&(w, _)| w).collect())
            .collect()
    }

    fn begin_phase(&mut self, ell: u64, round: Round) {
        self.phase_counter += 1;
        self.core = Some(DtgCore::begin(self.phase_counter, ell, self.gammas(ell)));
        self.core_started = round;
    }

    fn begin_seq(&mut self, stage: PdStage, round: Round) {
        self.seq = t_sequence(self.k_hat).expect("next_power_of_two yields a power of two");
        self.seq_idx = 0;
        match &stage {
            PdStage::Gather => self.check.gather_min = self.phase_counter + 1,
            PdStage::Propagate => self.check.propagate_min = self.phase_counter + 1,
            _ => {}
        }
        self.stage = stage;
        let ell = self.seq[0];
        self.begin_phase(ell, round);
    }

    fn tick(&mut self, round: Round) {
        loop {
            match self.stage {
                PdStage::Finished | PdStage::Dissem => return,
                PdStage::Check => {
                    let core = self.core.as_ref().expect("check stage has a core");
                    if core.all_done() {
                        self.check.freeze(&self.bags, &self.neighbor_ids);
                        self.begin_seq(PdStage::Gather, round);
                        continue;
                    }
                    if round > self.core_started {
                        self.core.as_mut().unwrap().advance();
                    }
                    return;
                }
                PdStage::Gather | PdStage::Propagate => {
                    let core = self.core.as_ref().expect("sequence stage has a core");
                    if core.all_done() {
                        self.seq_idx += 1;
                        if self.seq_idx < self.seq.len() {
                            let ell = self.seq[self.seq_idx];
                            self.begin_phase(ell, round);
                        } else if matches!(self.stage, PdStage::Gather) {
                            self.check.compute_statuses();
                            self.begin_seq(PdStage::Propagate, round);
                        } else {
                            self.core = None;
                            self.stage = PdStage::Finished;
                            self.finished = true;
                        }
                        continue;
                    }
                    if round > self.core_started {
                        self.core.as_mut().unwrap().advance();
                    }
                    return;
                }
            }
        }
    }
}

impl Protocol for TerminationCheck {
    type Payload = Packet;

    fn init(&mut self, g: &LatencyGraph, _seed: u64) {
        let n = g.n();
        self.n = n;
        self.adj = (0..n).map(|v| g.adj(v).to_vec()).collect();
        self.neighbor_ids = (0..n).map(|v| g.neighbors(v).collect()).collect();
        self.bags = self.initial.clone();
        self.check = CheckState::new(n);
        self.check.record_baseline(&self.bags);
        self.phase_counter = 0;
        self.seen_round = 0;
        self.finished = false;
        self.stage = PdStage::Check;
        self.begin_phase(self.k, 1);
    }

    fn on_round(&mut self, view: &NodeView<'_>) -> Option<NodeId> {
        let round = view.round();
        if round > self.seen_round {
            self.seen_round = round;
            self.tick(round);
        }
        self.core.as_ref().and_then(|core| core.target(view.node()))
    }

    fn snapshot(&self, node: NodeId) -> Packet {
        let mut p = Packet::bag_only(self.bags[node].clone(), self.phase_counter);
        if let Some(core) = &self.core {
            p.reached = Some(core.reached(node).clone());
        }
        match self.stage {
            PdStage::Gather => p.gather = Some(self.check.collected[node].clone()),
            PdStage::Propagate => p.failed = Some(self.check.failed[node]),
            _ => {}
        }
        p
    }

    fn on_deliver(&mut self, node: NodeId, _from: NodeId, payload: &Packet, _view: &NodeView<'_>) {
        self.bags[node].union_with(&payload.bag);
        if let Some(core) = &mut self.core {
            core.deliver(node, payload);
        }
        self.check.deliver(node, payload);
    }

    fn is_done(&self, _node: NodeId) -> bool {
        self.finished
    }
}

/// Run the check pass over rumor sets left by a dissemination attempt with
/// estimate `k`: one k-bounded exchange phase, then gather and propagate
/// passes over the k-neighborhood.
pub fn termination_check(
    g: &LatencyGraph,
    k: u64,
    bags: &[IdSet],
    cfg: &SimConfig,
) -> Result<(Metrics, TerminationOutcome)> {
    if k == 0 {
        return Err(Error::InvalidParam("estimate k must be at least 1".into()));
    }
    if bags.len() != g.n() {
        return Err(Error::InvalidParam(format!(
            "need one rumor set per node: got {}, graph has {}",
            bags.len(),
            g.n()
        )));
    }
    let mut proto = TerminationCheck::new(bags.to_vec(), k);
    let metrics = run(g, &mut proto, cfg)?;
    let passed = proto.check.failed.iter().all(|&f| !f);
    let outcome =
        TerminationOutcome { flags: proto.check.flags, failed: proto.check.failed, passed };
    Ok((metrics, outcome))
}

// ---------------------------------------------------------------------------
// Latency discovery for the unknown-latency scenario.
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct DiscoveryOutcome {
    /// Per-node mapping neighbor → learned latency.
    pub known: Vec<BTreeMap<NodeId, Latency>>,
}

struct Discover {
    d_guess: u64,
    delta_guess: u64,
    probes: Vec<Vec<NodeId>>,
    known: Vec<BTreeMap<NodeId, Latency>>,
    seen_round: Round,
    n: usize,
}

impl Protocol for Discover {
    type Payload = Packet;

    fn init(&mut self, g: &LatencyGraph, _seed: u64) {
        self.n = g.n();
        self.probes = (0..g.n()).map(|v| g.neighbors(v).collect()).collect();
        self.known = vec![BTreeMap::new(); g.n()];
        self.seen_round = 0;
    }

    fn on_round(&mut self, view: &NodeView<'_>) -> Option<NodeId> {
        let round = view.round();
        self.seen_round = self.seen_round.max(round);
        if round > self.delta_guess {
            return None;
        }
        self.probes[view.node()].get((round - 1) as usize).copied()
    }

    fn snapshot(&self, node: NodeId) -> Packet {
        Packet::bag_only(IdSet::singleton(self.n, node), 0)
    }

    fn on_deliver(&mut self, node: NodeId, from: NodeId, _payload: &Packet, view: &NodeView<'_>) {
        if let Some(lat) = view.latency_to(from) {
            self.known[node].insert(from, lat);
        }
    }

    fn is_done(&self, _node: NodeId) -> bool {
        self.seen_round >= self.delta_guess + self.d_guess
    }
}

/// Probe neighbors one per round for `delta_guess` rounds, then wait
/// `d_guess` rounds; edges whose latency is ≤ d_guess become known at both
/// endpoints.
pub fn discover_latencies(
    g: &LatencyGraph,
    d_guess: u64,
    delta_guess: u64,
    cfg: &SimConfig,
) -> Result<(Metrics, DiscoveryOutcome)> {
    if d_guess == 0 || delta_guess == 0 {
        return Err(Error::InvalidParam("discovery bounds must be at least 1".into()));
    }
    let mut proto = Discover {
        d_guess,
        delta_guess,
        probes: Vec::new(),
        known: Vec::new(),
        seen_round: 0,
        n: 0,
    };
    let metrics = run(g, &mut proto, cfg)?;
    Ok((metrics, DiscoveryOutcome { known: proto.known }))
}

// ---------------------------------------------------------------------------
// Unified strategy: race push-pull against the spanner pipeline.
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Winner {
    PushPull,
    Spanner,
}

#[derive(Clone, Debug)]
pub struct UnifiedReport {
    pub push_pull: Metrics,
    pub spanner: Metrics,
    pub winner: Winner,
    pub min_rounds: Round,
}

/// Run push-pull and the guess-and-double pipeline as independent
/// simulations and report whichever finished first (ties go to push-pull).
pub fn unified_dissemination(
    g: &LatencyGraph,
    scenario: Scenario,
    cfg: &SimConfig,
) -> Result<UnifiedReport> {
    let (pp, _) = push_pull(g, PushPullMode::AllToAll, cfg)?;
    let (sp, _) = general_eid(g, scenario, PipelineParams::default(), cfg)?;
    let winner = match (pp.completed, sp.completed) {
        (true, false) => Winner::PushPull,
        (false, true) => Winner::Spanner,
        _ => {
            if pp.rounds_elapsed <= sp.rounds_elapsed {
                Winner::PushPull
            } else {
                Winner::Spanner
            }
        }
    };
    let min_rounds = match winner {
        Winner::PushPull => pp.rounds_elapsed,
        Winner::Spanner => sp.rounds_elapsed,
    };
    Ok(UnifiedReport { push_pull: pp, spanner: sp, winner, min_rounds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate;
    use crate::protocols::spanner::spanner_construct;

    fn cfg(max_rounds: Round) -> SimConfig {
        SimConfig::new(7, max_rounds)
    }

    #[test]
    fn rr_exchanges_along_short_paths() {
        let g = generate::path(&[2, 3]).unwrap();
        let spanner = spanner_construct(&g, 4, 1, 0).unwrap();
        let (metrics, bags) = rr_broadcast(&g, &spanner, 5, &cfg(100)).unwrap();
        // k·Δ_out + k = 5·1 + 5 rounds suffice for every pair here.
        assert!(bags.iter().all(IdSet::is_full));
        for v in 0..3 {
            assert!(metrics.completion_round[v].unwrap() <= 10);
        }
    }

    #[test]
    fn rr_scope_is_limited_by_k() {
        let g = generate::path(&[2, 3]).unwrap();
        let spanner = spanner_construct(&g, 4, 1, 0).unwrap();
        let (_, bags) = rr_broadcast(&g, &spanner, 2, &cfg(100)).unwrap();
        assert!(bags[0].contains(1));
        assert!(!bags[0].contains(2));
        assert!(!bags[2].contains(0));
    }

    #[test]
    fn rr_single_node_initiates_nothing() {
        let g = LatencyGraph::new(1, &[]).unwrap();
        let spanner = spanner_construct(&g, 2, 1, 0).unwrap();
        let (metrics, bags) = rr_broadcast(&g, &spanner, 3, &cfg(50)).unwrap();
        assert_eq!(metrics.exchanges_initiated, 0);
        assert!(bags[0].is_full());
    }

    #[test]
    fn rr_rejects_zero_reach() {
        let g = generate::path(&[1]).unwrap();
        let spanner = spanner_construct(&g, 4, 1, 0).unwrap();
        assert!(rr_broadcast(&g, &spanner, 0, &cfg(10)).is_err());
    }

    #[test]
    fn single_pass_completes_a_unit_clique() {
        let g = generate::clique(6, 1).unwrap();
        let (metrics, pipe) = eid(&g, 1, PipelineParams::default(), &cfg(10_000)).unwrap();
        assert!(metrics.completed);
        assert!(pipe.bags().iter().all(IdSet::is_full));
    }

    #[test]
    fn single_pass_covers_a_detour_cheaper_than_the_direct_edge() {
        // Distance 1↔2 is 2 via the two unit edges, so a guess of 2 works
        // even though the direct edge costs 4.
        let g = LatencyGraph::new(3, &[(0, 1, 1), (0, 2, 1), (1, 2, 4)]).unwrap();
        let (_, pipe) = eid(&g, 2, PipelineParams::default(), &cfg(10_000)).unwrap();
        assert!(pipe.bags().iter().all(IdSet::is_full));
    }

    #[test]
    fn low_guess_leaves_holes_and_the_check_reports_them() {
        // Both edges cost 5, total path latency 10; a guess of 4 moves nothing.
        let g = generate::path(&[5, 5]).unwrap();
        let (_, pipe) = eid(&g, 4, PipelineParams::default(), &cfg(10_000)).unwrap();
        assert!(pipe.bags().iter().any(|b| !b.is_full()));
        let (_, outcome) = termination_check(&g, 4, pipe.bags(), &cfg(10_000)).unwrap();
        assert!(!outcome.passed);
        assert!(outcome.failed.iter().all(|&f| f));
    }

    #[test]
    fn doubling_stops_just_past_the_diameter() {
        // One edge of latency 5: guesses 1, 2, 4 fail, 8 succeeds.
        let g = generate::path(&[5]).unwrap();
        let (metrics, pipe) =
            general_eid(&g, Scenario::Known, PipelineParams::default(), &cfg(100_000)).unwrap();
        assert!(metrics.completed);
        assert_eq!(pipe.final_k(), 8);
        assert!(pipe.bags().iter().all(IdSet::is_full));
    }

    #[test]
    fn unit_diameter_needs_a_single_iteration() {
        let g = generate::clique(5, 1).unwrap();
        let (metrics, pipe) =
            general_eid(&g, Scenario::Known, PipelineParams::default(), &cfg(100_000)).unwrap();
        assert!(metrics.completed);
        assert_eq!(pipe.final_k(), 1);
    }

    #[test]
    fn everyone_terminates_in_the_same_round_holding_everything() {
        for seed in 0..4u64 {
            let g = generate::random_connected(10, 18, 6, seed).unwrap();
            for scenario in [Scenario::Known, Scenario::Unknown] {
                let (metrics, pipe) =
                    general_eid(&g, scenario, PipelineParams::default(), &cfg(200_000)).unwrap();
                assert!(metrics.completed, "seed {seed} {scenario:?}");
                let first = metrics.completion_round[0];
                assert!(first.is_some());
                assert!(metrics.completion_round.iter().all(|&r| r == first));
                assert!(pipe.bags().iter().all(IdSet::is_full));
            }
        }
    }

    #[test]
    fn unknown_scenario_learns_latencies_before_committing() {
        let g = generate::path(&[5]).unwrap();
        let (metrics, pipe) =
            general_eid(&g, Scenario::Unknown, PipelineParams::default(), &cfg(100_000)).unwrap();
        assert!(metrics.completed);
        assert_eq!(pipe.final_k(), 8);
        assert!(pipe.bags().iter().all(IdSet::is_full));
    }

    #[test]
    fn per_node_spanners_agree_with_a_global_run() {
        let g = generate::random_connected(10, 20, 4, 3).unwrap();
        let params = PipelineParams { n_hat: Some(16), rr_scale: 1 };
        let run_cfg = cfg(200_000);
        let (metrics, pipe) = general_eid(&g, Scenario::Known, params, &run_cfg).unwrap();
        assert!(metrics.completed);
        let k = pipe.final_k();
        let kept: Vec<_> =
            g.edges().iter().copied().filter(|&(_, _, lat)| lat <= k).collect();
        let gk = LatencyGraph::new(g.n(), &kept).unwrap();
        let global =
            spanner_construct(&gk, 16, 4, derive_seed(run_cfg.seed, SPANNER_SALT)).unwrap();
        let local = pipe.spanner().expect("pipeline built a spanner");
        for v in 0..g.n() {
            assert_eq!(local.out_edges(v), global.out_edges(v), "node {v}");
        }
    }

    #[test]
    fn pattern_doubling_stops_past_a_latency_six_path() {
        let g = generate::path(&[3, 3]).unwrap();
        let (metrics, pd) = path_discovery(&g, &cfg(100_000)).unwrap();
        assert!(metrics.completed);
        assert_eq!(pd.final_k(), 8);
        assert!(pd.bags().iter().all(IdSet::is_full));
    }

    #[test]
    fn pattern_discovery_handles_a_single_node() {
        let g = LatencyGraph::new(1, &[]).unwrap();
        let (metrics, pd) = path_discovery(&g, &cfg(1_000)).unwrap();
        assert!(metrics.completed);
        assert!(metrics.rounds_elapsed <= 8);
        assert!(pd.terminated().iter().all(|&t| t));
    }

    #[test]
    fn pattern_discovery_terminates_simultaneously() {
        for seed in [11u64, 12] {
            let g = generate::random_connected(9, 14, 5, seed).unwrap();
            let (metrics, pd) = path_discovery(&g, &cfg(200_000)).unwrap();
            assert!(metrics.completed, "seed {seed}");
            let first = metrics.completion_round[0];
            assert!(first.is_some());
            assert!(metrics.completion_round.iter().all(|&r| r == first));
            assert!(pd.bags().iter().all(IdSet::is_full));
        }
    }

    #[test]
    fn check_passes_when_every_bag_is_complete() {
        let g = generate::path(&[1, 1]).unwrap();
        let full: Vec<IdSet> = (0..3).map(|_| IdSet::full(3)).collect();
        let (_, outcome) = termination_check(&g, 2, &full, &cfg(10_000)).unwrap();
        assert!(outcome.passed);
        assert!(outcome.flags.iter().all(|&f| !f));
    }

    #[test]
    fn one_missing_rumor_fails_every_node() {
        let g = generate::path(&[1, 1, 1, 1, 1]).unwrap();
        let mut bags: Vec<IdSet> = (0..6).map(|_| IdSet::full(6)).collect();
        bags[5] = IdSet::new(6);
        for id in 1..6 {
            bags[5].insert(id);
        }
        let (_, outcome) = termination_check(&g, 8, &bags, &cfg(10_000)).unwrap();
        assert!(!outcome.passed);
        assert!(outcome.failed.iter().all(|&f| f));
    }

    #[test]
    fn silent_neighbor_raises_the_flag_and_fails_all() {
        let g = generate::path(&[5]).unwrap();
        let bags = vec![IdSet::singleton(2, 0), IdSet::singleton(2, 1)];
        let (_, outcome) = termination_check(&g, 1, &bags, &cfg(10_000)).unwrap();
        assert!(outcome.flags.iter().all(|&f| f));
        assert!(outcome.failed.iter().all(|&f| f));
        assert!(!outcome.passed);
    }

    #[test]
    fn probing_learns_fast_edges_within_the_window() {
        let g = generate::star(&[1, 2, 3, 3, 1]).unwrap();
        let (metrics, outcome) = discover_latencies(&g, 3, 5, &cfg(100)).unwrap();
        assert_eq!(outcome.known[0].len(), 5);
        for (leaf, lat) in [(1usize, 1u64), (2, 2), (3, 3), (4, 3), (5, 1)] {
            assert_eq!(outcome.known[0].get(&leaf), Some(&lat));
            assert_eq!(outcome.known[leaf].get(&0), Some(&lat));
        }
        assert!(metrics.rounds_elapsed <= 9);
    }

    #[test]
    fn slow_edges_stay_unknown() {
        let g = generate::star(&[1, 5]).unwrap();
        let (_, outcome) = discover_latencies(&g, 2, 2, &cfg(100)).unwrap();
        assert_eq!(outcome.known[0].get(&1), Some(&1));
        assert!(!outcome.known[0].contains_key(&2));
        assert!(!outcome.known[2].contains_key(&0));
    }

    #[test]
    fn probe_budget_misses_mutually_late_pairs() {
        // Complete bipartite 3×3: with two probes each, the edge whose
        // endpoints both rank it third is never probed from either side.
        let mut edges = Vec::new();
        for u in 0..3usize {
            for w in 3..6usize {
                edges.push((u, w, 1u64));
            }
        }
        let g = LatencyGraph::new(6, &edges).unwrap();
        let (_, outcome) = discover_latencies(&g, 1, 2, &cfg(100)).unwrap();
        assert!(!outcome.known[2].contains_key(&5));
        assert!(!outcome.known[5].contains_key(&2));
        assert_eq!(outcome.known[0].get(&3), Some(&1));
    }

    #[test]
    fn unified_reports_the_faster_strategy() {
        let g = generate::random_connected(10, 16, 4, 2).unwrap();
        let report = unified_dissemination(&g, Scenario::Known, &cfg(200_000)).unwrap();
        assert!(report.push_pull.completed);
        assert!(report.spanner.completed);
        let expect = report.push_pull.rounds_elapsed.min(report.spanner.rounds_elapsed);
        assert_eq!(report.min_rounds, expect);
        match report.winner {
            Winner::PushPull => {
                assert!(report.push_pull.rounds_elapsed <= report.spanner.rounds_elapsed)
            }
            Winner::Spanner => {
                assert!(report.spanner.rounds_elapsed < report.push_pull.rounds_elapsed)
            }
        }
    }

    #[test]
    fn unified_completes_under_both_scenarios() {
        let g = generate::random_connected(8, 12, 3, 5).unwrap();
        for scenario in [Scenario::Known, Scenario::Unknown] {
            let report = unified_dissemination(&g, scenario, &cfg(200_000)).unwrap();
            assert!(report.push_pull.completed, "{scenario:?}");
            assert!(report.spanner.completed, "{scenario:?}");
        }
    }
}
