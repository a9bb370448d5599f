//! Plain-text edge lists. First non-comment line is `<nodes> <edges>`, then
//! one `u v latency` line per undirected edge (listed once). `#` starts a
//! comment, blank lines are skipped.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{Latency, LatencyGraph, NodeId};

pub fn parse(text: &str) -> Result<LatencyGraph> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges: Vec<(NodeId, NodeId, Latency)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let bad = |msg: &str| Error::GraphFormat { line: lineno + 1, msg: msg.into() };
        let mut next_int = |name: &str| -> Result<u64> {
            fields
                .next()
                .ok_or_else(|| bad(&format!("missing {name}")))?
                .parse::<u64>()
                .map_err(|_| bad(&format!("{name} is not a non-negative integer")))
        };
        if header.is_none() {
            let n = next_int("node count")? as usize;
            let m = next_int("edge count")? as usize;
            if fields.next().is_some() {
                return Err(bad("header has trailing fields"));
            }
            header = Some((n, m));
        } else {
            let u = next_int("endpoint")? as usize;
            let v = next_int("endpoint")? as usize;
            let lat = next_int("latency")?;
            if fields.next().is_some() {
                return Err(bad("edge line has trailing fields"));
            }
            edges.push((u, v, lat));
        }
    }
    let (n, m) = header.ok_or(Error::GraphFormat { line: 0, msg: "empty file".into() })?;
    if edges.len() != m {
        return Err(Error::GraphFormat {
            line: 0,
            msg: format!("header promises {m} edges, file has {}", edges.len()),
        });
    }
    LatencyGraph::new(n, &edges)
}

pub fn to_string(g: &LatencyGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", g.n(), g.m());
    for &(u, v, lat) in g.edges() {
        let _ = writeln!(out, "{u} {v} {lat}");
    }
    out
}

pub fn load(path: &Path) -> Result<LatencyGraph> {
    parse(&std::fs::read_to_string(path)?)
}

pub fn save(g: &LatencyGraph, path: &Path) -> Result<()> {
    Ok(std::fs::write(path, to_string(g))?)
}
