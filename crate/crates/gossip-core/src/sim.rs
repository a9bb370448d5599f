//! Deterministic synchronous round engine.
//!
//! Time advances in rounds `1, 2, 3, ...`. In each round, first every
//! exchange whose delivery is due lands: both endpoints receive the
//! counterpart's payload as it was snapshotted when the exchange started, so
//! nothing either side learned in between leaks into the exchange. Then, if
//! the protocol has not globally completed, every node may start at most one
//! new exchange toward a neighbor; an exchange over an edge of latency `l`
//! started in round `r` delivers in round `r + l`. Starting an exchange
//! never blocks the initiator and nodes accept any number of incoming
//! exchanges per round.
//!
//! Under [`LatencyVisibility::Unknown`] a node cannot read an edge's latency
//! until some exchange over that edge has delivered; the view simply returns
//! `None` before that.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{latency_class, Latency, LatencyGraph, NodeId};

pub type Round = u64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LatencyVisibility {
    /// Every node can read the latency of its incident edges from the start.
    Known,
    /// Latencies are revealed to both endpoints when an exchange delivers.
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceLevel {
    Off,
    /// Record one [`TraceRecord`] per initiated exchange.
    Full,
}

#[derive(Clone, Copy, Debug)]
pub struct SimConfig {
    pub seed: u64,
    pub max_rounds: Round,
    pub visibility: LatencyVisibility,
    pub trace: TraceLevel,
}

impl SimConfig {
    pub fn new(seed: u64, max_rounds: Round) -> Self {
        SimConfig { seed, max_rounds, visibility: LatencyVisibility::Known, trace: TraceLevel::Off }
    }

    pub fn with_visibility(mut self, visibility: LatencyVisibility) -> Self {
        self.visibility = visibility;
        self
    }

    pub fn with_trace(mut self, trace: TraceLevel) -> Self {
        self.trace = trace;
        self
    }
}

/// What one node is allowed to see when deciding its move.
pub struct NodeView<'a> {
    node: NodeId,
    round: Round,
    graph: &'a LatencyGraph,
    visibility: LatencyVisibility,
    learned: &'a BTreeMap<NodeId, Latency>,
}

impl<'a> NodeView<'a> {
    pub fn node(&self) -> NodeId {
        self.node
    }

    pub fn round(&self) -> Round {
        self.round
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    /// Neighbor ids are always visible.
    pub fn neighbors(&self) -> impl Iterator<Item = NodeId> + 'a {
        self.graph.neighbors(self.node)
    }

    pub fn degree(&self) -> usize {
        self.graph.degree(self.node)
    }

    /// Latency of the edge to `v`, if this node may know it yet.
    pub fn latency_to(&self, v: NodeId) -> Option<Latency> {
        match self.visibility {
            LatencyVisibility::Known => self.graph.latency(self.node, v),
            LatencyVisibility::Unknown => self.learned.get(&v).copied(),
        }
    }
}

/// A gossip protocol as seen by the engine. The engine drives all nodes; the
/// implementation holds per-node state and must only consult node-local
/// information (plus its own seeded randomness) in `on_round`.
pub trait Protocol {
    type Payload: Clone;

    /// Called once per run before round 1.
    fn init(&mut self, g: &LatencyGraph, seed: u64);

    /// The node may pick a neighbor to exchange with this round.
    fn on_round(&mut self, view: &NodeView<'_>) -> Option<NodeId>;

    /// Snapshot of the node's shareable state, taken at exchange start for
    /// both endpoints.
    fn snapshot(&self, node: NodeId) -> Self::Payload;

    /// Counterpart's start-round snapshot lands at this node.
    fn on_deliver(&mut self, node: NodeId, from: NodeId, payload: &Self::Payload, view: &NodeView<'_>);

    /// Node-local termination; the run stops when all nodes are done.
    fn is_done(&self, node: NodeId) -> bool;

    /// Whether the node already holds everything the run is supposed to give
    /// it; used for per-node completion metrics. Defaults to `is_done`.
    fn is_complete(&self, node: NodeId) -> bool {
        self.is_done(node)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceRecord {
    pub round: Round,
    pub initiator: NodeId,
    pub responder: NodeId,
    pub latency: Latency,
    pub deliver_round: Round,
}

impl TraceRecord {
    pub fn line(&self) -> String {
        format!(
            "{} {} {} {} {}",
            self.round, self.initiator, self.responder, self.latency, self.deliver_round
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Metrics {
    /// Round in which global completion was observed, or `max_rounds`.
    pub rounds_elapsed: Round,
    pub completed: bool,
    pub exchanges_initiated: u64,
    /// Initiations bucketed by the latency class of the used edge.
    pub activations_by_class: BTreeMap<u32, u64>,
    /// First round in which each node reported `is_complete`.
    pub completion_round: Vec<Option<Round>>,
    pub trace: Vec<TraceRecord>,
}

struct Exchange<Payload> {
    initiator: NodeId,
    responder: NodeId,
    payload_out: Payload,
    payload_in: Payload,
    latency: Latency,
}

/// Drive `protocol` on `g` until global completion or `cfg.max_rounds`.
pub fn run<P: Protocol>(g: &LatencyGraph, protocol: &mut P, cfg: &SimConfig) -> Result<Metrics> {
    let n = g.n();
    protocol.init(g, cfg.seed);

    let mut learned: Vec<BTreeMap<NodeId, Latency>> = vec![BTreeMap::new(); n];
    let mut pending: BTreeMap<Round, Vec<Exchange<P::Payload>>> = BTreeMap::new();
    let mut metrics = Metrics {
        rounds_elapsed: 0,
        completed: false,
        exchanges_initiated: 0,
        activations_by_class: BTreeMap::new(),
        completion_round: vec![None; n],
        trace: Vec::new(),
    };

    let mark_complete = |protocol: &P, round: Round, slots: &mut Vec<Option<Round>>| {
        for (node, slot) in slots.iter_mut().enumerate() {
            if slot.is_none() && protocol.is_complete(node) {
                *slot = Some(round);
            }
        }
    };

    mark_complete(protocol, 0, &mut metrics.completion_round);
    if (0..n).all(|v| protocol.is_done(v)) {
        metrics.completed = true;
        return Ok(metrics);
    }

    for round in 1..=cfg.max_rounds {
        if let Some(due) = pending.remove(&round) {
            for ex in &due {
                learned[ex.initiator].insert(ex.responder, ex.latency);
                learned[ex.responder].insert(ex.initiator, ex.latency);
            }
            for ex in due {
                let view_i = NodeView {
                    node: ex.initiator,
                    round,
                    graph: g,
                    visibility: cfg.visibility,
                    learned: &learned[ex.initiator],
                };
                protocol.on_deliver(ex.initiator, ex.responder, &ex.payload_in, &view_i);
                let view_r = NodeView {
                    node: ex.responder,
                    round,
                    graph: g,
                    visibility: cfg.visibility,
                    learned: &learned[ex.responder],
                };
                protocol.on_deliver(ex.responder, ex.initiator, &ex.payload_out, &view_r);
            }
        }

        mark_complete(protocol, round, &mut metrics.completion_round);
        if (0..n).all(|v| protocol.is_done(v)) {
            metrics.rounds_elapsed = round;
            metrics.completed = true;
            return Ok(metrics);
        }

        for (node, learned_node) in learned.iter().enumerate() {
            let view = NodeView {
                node,
                round,
                graph: g,
                visibility: cfg.visibility,
                learned: learned_node,
            };
            let Some(target) = protocol.on_round(&view) else {
                continue;
            };
            let Some(latency) = g.latency(node, target) else {
                return Err(Error::NotANeighbor { u: node, v: target });
            };
            let deliver_round = round + latency;
            metrics.exchanges_initiated += 1;
            *metrics.activations_by_class.entry(latency_class(latency)).or_insert(0) += 1;
            if cfg.trace == TraceLevel::Full {
                metrics.trace.push(TraceRecord {
                    round,
                    initiator: node,
                    responder: target,
                    latency,
                    deliver_round,
                });
            }
            pending.entry(deliver_round).or_default().push(Exchange {
                initiator: node,
                responder: target,
                payload_out: protocol.snapshot(node),
                payload_in: protocol.snapshot(target),
                latency,
            });
        }
    }

    metrics.rounds_elapsed = cfg.max_rounds;
    Ok(metrics)
}
