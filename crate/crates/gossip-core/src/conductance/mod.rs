//! Exact conductance analysis for latency graphs.
//!
//! For a cut side `U`, the latency-`l` conductance is the number of crossing
//! edges of latency at most `l` divided by `min(Vol(U), Vol(rest))`, where a
//! node's volume counts all incident edges regardless of latency. Graph-level
//! quantities minimize over all proper cuts; graphs up to [`EXACT_CUT_CAP`]
//! nodes are enumerated exhaustively, larger ones go through
//! [`estimate`](crate::conductance::estimate).

pub mod estimate;
pub mod multigraph;

use std::collections::BTreeMap;

use serde_json::json;

use crate::error::{Error, Result};
use crate::graph::{latency_class, Cut, Latency, LatencyGraph, NodeId};
use crate::util::{rational, Rational};

/// Exhaustive cut enumeration is `2^(n-1) - 1` evaluations; past this it is
/// estimator territory.
pub const EXACT_CUT_CAP: usize = 20;

/// Conductance of a single cut at latency threshold `l`.
pub fn phi_ell_cut(cut: &Cut, l: Latency) -> Rational {
    rational(cut.cross_within(l) as i128, cut.min_volume() as i128)
}

/// Class-averaged conductance of a single cut: crossing edges are bucketed by
/// latency class and class `i` contributes its count divided by `2^i`.
pub fn avg_conductance_cut(cut: &Cut) -> Rational {
    let mut sum = rational(0, 1);
    for (&class, &count) in cut.class_counts() {
        sum += rational(count as i128, 1i128 << class);
    }
    sum / rational(cut.min_volume() as i128, 1)
}

/// Iterate every proper bipartition exactly once: masks over nodes
/// `0..n-1` with node `n-1` pinned to the complement, ascending, so
/// ties resolve to the lexicographically smallest side bitmask.
fn for_each_cut<F: FnMut(u32, &[NodeId])>(g: &LatencyGraph, mut f: F) -> Result<()> {
    let n = g.n();
    if n > EXACT_CUT_CAP {
        return Err(Error::TooLarge { n, cap: EXACT_CUT_CAP });
    }
    if n < 2 {
        return Err(Error::ImproperCut);
    }
    let mut side = Vec::with_capacity(n);
    for mask in 1u32..(1 << (n - 1)) {
        side.clear();
        for v in 0..n - 1 {
            if mask >> v & 1 == 1 {
                side.push(v);
            }
        }
        f(mask, &side);
    }
    Ok(())
}

fn minimize_over_cuts<Q: FnMut(&Cut) -> Rational>(
    g: &LatencyGraph,
    mut quantity: Q,
) -> Result<(Rational, Cut)> {
    let mut best: Option<(Rational, Cut)> = None;
    for_each_cut(g, |_, side| {
        let cut = g.make_cut(side).expect("proper side by construction");
        if cut.min_volume() == 0 {
            return; // isolated side, conductance undefined there
        }
        let value = quantity(&cut);
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            best = Some((value, cut));
        }
    })?;
    best.ok_or(Error::InvalidParam("graph has no cut with positive volume".into()))
}

/// Minimum latency-`l` conductance over all cuts, with the argmin cut.
pub fn phi_ell_exact(g: &LatencyGraph, l: Latency) -> Result<(Rational, Cut)> {
    minimize_over_cuts(g, |cut| phi_ell_cut(cut, l))
}

/// Minimum class-averaged conductance over all cuts, with the argmin cut.
pub fn avg_conductance(g: &LatencyGraph) -> Result<(Rational, Cut)> {
    minimize_over_cuts(g, avg_conductance_cut)
}

/// Number of distinct nonempty latency classes among the graph's edges.
pub fn count_nonempty_classes(g: &LatencyGraph) -> u32 {
    let classes: std::collections::BTreeSet<u32> =
        g.edges().iter().map(|&(_, _, l)| latency_class(l)).collect();
    classes.len() as u32
}

#[derive(Clone, Debug)]
pub struct Critical {
    pub phi_star: Rational,
    pub ell_star: Latency,
    pub witness: Cut,
}

/// The critical latency maximizes `phi_l / l`. As a function of `l` the
/// conductance only changes at realized edge latencies, so those are the only
/// candidates; ties go to the smaller latency.
pub fn critical_conductance(g: &LatencyGraph) -> Result<Critical> {
    let mut best: Option<Critical> = None;
    for l in g.distinct_latencies() {
        let (phi, witness) = phi_ell_exact(g, l)?;
        let ratio = phi / rational(l as i128, 1);
        let better = match &best {
            None => true,
            Some(cur) => ratio > cur.phi_star / rational(cur.ell_star as i128, 1),
        };
        if better {
            best = Some(Critical { phi_star: phi, ell_star: l, witness });
        }
    }
    best.ok_or(Error::InvalidParam("graph has no edges".into()))
}

/// The sandwich `phi*/(2 l*) < phi_avg < L phi*/l*`. Both comparisons are
/// exact; boundary hits (equality) are recorded rather than glossed over.
#[derive(Clone, Debug)]
pub struct SandwichReport {
    pub phi_star: Rational,
    pub ell_star: Latency,
    pub phi_avg: Rational,
    pub num_classes: u32,
    pub lower: Rational,
    pub upper: Rational,
    pub lower_strict: bool,
    pub upper_strict: bool,
    /// Strict on both sides.
    pub holds: bool,
}

pub fn check_relation(g: &LatencyGraph) -> Result<SandwichReport> {
    let crit = critical_conductance(g)?;
    let (phi_avg, _) = avg_conductance(g)?;
    let num_classes = count_nonempty_classes(g);
    let ell = rational(crit.ell_star as i128, 1);
    let lower = crit.phi_star / (rational(2, 1) * ell);
    let upper = rational(num_classes as i128, 1) * crit.phi_star / ell;
    let lower_strict = lower < phi_avg;
    let upper_strict = phi_avg < upper;
    Ok(SandwichReport {
        phi_star: crit.phi_star,
        ell_star: crit.ell_star,
        phi_avg,
        num_classes,
        lower,
        upper,
        lower_strict,
        upper_strict,
        holds: lower_strict && upper_strict,
    })
}

/// Full analysis of one graph. `phi_ell` has one entry per realized latency
/// (the value is constant between consecutive realized latencies, inclusive
/// reading `[1, max]`).
#[derive(Clone, Debug)]
pub struct ConductanceReport {
    pub n: usize,
    pub m: usize,
    /// False when values come from the sampled estimator (upper bounds).
    pub exact: bool,
    pub phi_ell: BTreeMap<Latency, (Rational, Vec<NodeId>)>,
    pub phi_star: Rational,
    pub ell_star: Latency,
    pub phi_star_witness: Vec<NodeId>,
    pub phi_avg: Rational,
    pub phi_avg_witness: Vec<NodeId>,
    pub num_classes: u32,
    /// Exact runs only.
    pub relation: Option<SandwichReport>,
}

pub fn analyze(g: &LatencyGraph) -> Result<ConductanceReport> {
    let mut phi_ell = BTreeMap::new();
    for l in g.distinct_latencies() {
        let (phi, cut) = phi_ell_exact(g, l)?;
        phi_ell.insert(l, (phi, cut.side().to_vec()));
    }
    let crit = critical_conductance(g)?;
    let (phi_avg, avg_cut) = avg_conductance(g)?;
    let relation = check_relation(g)?;
    Ok(ConductanceReport {
        n: g.n(),
        m: g.m(),
        exact: true,
        phi_ell,
        phi_star: crit.phi_star,
        ell_star: crit.ell_star,
        phi_star_witness: crit.witness.side().to_vec(),
        phi_avg,
        phi_avg_witness: avg_cut.side().to_vec(),
        num_classes: count_nonempty_classes(g),
        relation: Some(relation),
    })
}

pub fn rational_str(r: Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn rational_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

impl ConductanceReport {
    pub fn to_json(&self) -> serde_json::Value {
        let phi_ell: BTreeMap<String, serde_json::Value> = self
            .phi_ell
            .iter()
            .map(|(l, (phi, side))| {
                (l.to_string(), json!({ "phi": rational_str(*phi), "witness": side }))
            })
            .collect();
        let relation = self.relation.as_ref().map(|r| {
            json!({
                "lower": rational_str(r.lower),
                "phi_avg": rational_str(r.phi_avg),
                "upper": rational_str(r.upper),
                "lower_strict": r.lower_strict,
                "upper_strict": r.upper_strict,
                "holds": r.holds,
            })
        });
        json!({
            "n": self.n,
            "m": self.m,
            "exact": self.exact,
            "phi_ell": phi_ell,
            "phi_star": rational_str(self.phi_star),
            "phi_star_value": rational_f64(self.phi_star),
            "ell_star": self.ell_star,
            "phi_star_witness": self.phi_star_witness,
            "phi_avg": rational_str(self.phi_avg),
            "phi_avg_value": rational_f64(self.phi_avg),
            "phi_avg_witness": self.phi_avg_witness,
            "num_classes": self.num_classes,
            "relation": relation,
        })
    }
}
