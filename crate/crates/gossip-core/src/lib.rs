//! Gossip on graphs whose edges carry integer latencies.
//!
//! The crate has five areas:
//!
//! * [`graph`] — the `LatencyGraph` type, cut bookkeeping, generators and
//!   edge-list file I/O;
//! * [`conductance`] — exact (rational) cut/conductance analysis: per-latency
//!   conductance, the critical latency, latency-class averaged conductance,
//!   the sandwich relation between them, and a sampled estimator for graphs
//!   too large to enumerate;
//! * [`sim`] — a deterministic synchronous round engine in which an exchange
//!   started on an edge of latency `l` delivers both endpoints' snapshots
//!   `l` rounds later;
//! * [`protocols`] — push-pull, latency-capped deterministic tree gossip,
//!   oriented spanner construction, round-robin broadcast, and the composed
//!   dissemination/termination routines built from them;
//! * [`guessing`] — the two-player endpoint-guessing game that mirrors how
//!   gossip algorithms discover fast edges, plus the gadget-graph reduction.
//!
//! Everything is seed-deterministic: the same inputs and seed reproduce the
//! same traces, metrics and reports byte for byte.

#![forbid(unsafe_code)]

pub mod conductance;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod guessing;
pub mod protocols;
pub mod sim;
pub mod util;

pub use error::{Error, Result};
pub use graph::{Cut, LatencyGraph, NodeId};
pub use util::{IdSet, Rational};
