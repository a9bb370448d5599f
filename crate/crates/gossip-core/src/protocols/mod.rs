//! Dissemination protocols driven by the round engine, plus the local
//! spanner computation they build on.

mod broadcast;
mod dtg;
mod push_pull;
mod spanner;

pub use broadcast::{
    discover_latencies, eid, general_eid, path_discovery, rr_broadcast, termination_check,
    unified_dissemination, DiscoveryOutcome, PathDiscovery, PipelineParams, RrBroadcast, Scenario,
    SpannerPipeline, TerminationOutcome, UnifiedReport, Winner,
};
pub use dtg::{l_dtg, run_t_sequence, t_sequence, DtgCore, LDtg, TSequence};
pub use push_pull::{push_pull, PushPull, PushPullMode};
pub use spanner::{
    local_view, spanner_construct, spanner_construct_local, LocalView, OrientedSpanner,
};

use std::collections::BTreeMap;

use crate::graph::NodeId;
use crate::util::IdSet;

/// One exchange payload shared by all protocols here. Every exchange carries
/// the sender's rumor bag; the optional parts are only populated by the
/// protocol stages that need them and are ignored by the others.
#[derive(Clone, Debug)]
pub struct Packet {
    pub bag: IdSet,
    /// Identifies the sender's current protocol stage; stage-scoped fields
    /// from stale in-flight exchanges are dropped on mismatch.
    pub phase: u64,
    /// Tree-gossip coverage set for the sender's current phase.
    pub reached: Option<IdSet>,
    /// Edge indices the sender knows about (neighborhood collection).
    pub knowledge: Option<IdSet>,
    /// Per-node reports accumulated during a termination gather pass.
    pub gather: Option<BTreeMap<NodeId, PeerReport>>,
    /// "failed" marker spread during a termination propagate pass.
    pub failed: Option<bool>,
}

impl Packet {
    pub fn bag_only(bag: IdSet, phase: u64) -> Self {
        Packet { bag, phase, reached: None, knowledge: None, gather: None, failed: None }
    }
}

/// Snapshot of one node's state compared during termination checking.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeerReport {
    pub bag: IdSet,
    pub flag: bool,
}
