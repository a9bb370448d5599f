//! Latency-threshold multigraph: keep every edge of latency at most `l` with
//! multiplicity one, and fold each node's slower incident edges into a
//! self-loop of matching multiplicity. Volumes are therefore preserved
//! exactly, self-loops never cross a cut, and the multigraph's conductance
//! equals the latency-`l` conductance of the original graph. Computing it
//! through this second route gives an independent check of the direct
//! enumeration.

use crate::error::{Error, Result};
use crate::graph::{Latency, LatencyGraph, NodeId};
use crate::util::{rational, Rational};

use super::EXACT_CUT_CAP;

#[derive(Clone, Debug)]
pub struct MultiGraph {
    n: usize,
    /// `(u, v, multiplicity)` with `u < v`.
    cross: Vec<(NodeId, NodeId, u64)>,
    /// Self-loop multiplicity per node; a loop adds its multiplicity to the
    /// node's volume once (it represents folded-away edge endpoints, not a
    /// conventional degree-2 loop).
    loops: Vec<u64>,
}

impl MultiGraph {
    pub fn new(n: usize, cross: Vec<(NodeId, NodeId, u64)>, loops: Vec<u64>) -> Self {
        debug_assert_eq!(loops.len(), n);
        MultiGraph { n, cross, loops }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn volume(&self, v: NodeId) -> u64 {
        let adjacent: u64 = self
            .cross
            .iter()
            .filter(|&&(a, b, _)| a == v || b == v)
            .map(|&(_, _, m)| m)
            .sum();
        adjacent + self.loops[v]
    }

    /// Minimum over all proper cuts of crossing multiplicity divided by the
    /// smaller side volume, with the argmin side (lexicographically smallest
    /// bitmask on ties).
    pub fn conductance(&self) -> Result<(Rational, Vec<NodeId>)> {
        let n = self.n;
        if n > EXACT_CUT_CAP {
            return Err(Error::TooLarge { n, cap: EXACT_CUT_CAP });
        }
        if n < 2 {
            return Err(Error::ImproperCut);
        }
        let volumes: Vec<u64> = (0..n).map(|v| self.volume(v)).collect();
        let total: u64 = volumes.iter().sum();
        let mut best: Option<(Rational, u32)> = None;
        for mask in 1u32..(1 << (n - 1)) {
            let vol_side: u64 = (0..n - 1).filter(|&v| mask >> v & 1 == 1).map(|v| volumes[v]).sum();
            let min_vol = vol_side.min(total - vol_side);
            if min_vol == 0 {
                continue;
            }
            let crossing: u64 = self
                .cross
                .iter()
                .filter(|&&(u, v, _)| {
                    let su = u < n - 1 && mask >> u & 1 == 1;
                    let sv = v < n - 1 && mask >> v & 1 == 1;
                    su != sv
                })
                .map(|&(_, _, m)| m)
                .sum();
            let value = rational(crossing as i128, min_vol as i128);
            if best.as_ref().is_none_or(|(b, _)| value < *b) {
                best = Some((value, mask));
            }
        }
        let (value, mask) =
            best.ok_or(Error::InvalidParam("multigraph has no cut with positive volume".into()))?;
        let side = (0..n - 1).filter(|&v| mask >> v & 1 == 1).collect();
        Ok((value, side))
    }
}

/// The latency-`l` multigraph described in the module docs.
pub fn edge_induced_graph(g: &LatencyGraph, l: Latency) -> MultiGraph {
    let mut cross = Vec::new();
    let mut loops = vec![0u64; g.n()];
    for &(u, v, lat) in g.edges() {
        if lat <= l {
            cross.push((u, v, 1));
        } else {
            loops[u] += 1;
            loops[v] += 1;
        }
    }
    MultiGraph::new(g.n(), cross, loops)
}
