//! Shared plumbing: seed resolution, atomic artifact writes, list parsing.

use std::fmt::Display;
use std::io::Write as _;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use gossip_core::graph::generate::TargetPredicate;
use gossip_core::protocols::Scenario;

/// Seeds come from `--seed`, falling back to the `GOSSIP_SEED` environment
/// variable. Randomized runs get no implicit default.
pub fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var("GOSSIP_SEED") {
        Ok(raw) => raw
            .trim()
            .parse()
            .with_context(|| format!("GOSSIP_SEED={raw:?} is not an unsigned integer")),
        Err(_) => bail!("this run is randomized: pass --seed or set GOSSIP_SEED"),
    }
}

/// Write through a temp file in the destination directory: failures leave no
/// partial artifact behind, successes land atomically.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)
        .with_context(|| format!("creating directory {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.persist(path)
        .map_err(|e| e.error)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn parse_list<T>(raw: &str, what: &str) -> Result<Vec<T>>
where
    T: FromStr,
    T::Err: Display,
{
    let mut out = Vec::new();
    for part in raw.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        out.push(
            part.parse::<T>()
                .map_err(|e| anyhow!("bad {what} entry {part:?}: {e}"))?,
        );
    }
    if out.is_empty() {
        bail!("{what} list is empty");
    }
    Ok(out)
}

/// CSV artifact bytes: a `# ` config line recording the full invocation,
/// then header and rows.
pub fn csv_artifact(config: &str, rows: &[Vec<String>]) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    writeln!(buf, "# {config}")?;
    let mut w = csv::Writer::from_writer(buf);
    for row in rows {
        w.write_record(row)?;
    }
    Ok(w.into_inner()?)
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum PredicateKind {
    /// One uniformly random target pair.
    Singleton,
    /// Each pair targeted independently with probability `--p`.
    RandomP,
    /// Exactly the pairs given via `--pairs`.
    Explicit,
}

pub fn build_predicate(
    kind: PredicateKind,
    p: Option<f64>,
    pairs: Option<&str>,
) -> Result<TargetPredicate> {
    match kind {
        PredicateKind::Singleton => Ok(TargetPredicate::Singleton),
        PredicateKind::RandomP => {
            Ok(TargetPredicate::RandomP(p.context("random-p needs --p")?))
        }
        PredicateKind::Explicit => {
            let raw = pairs.context("explicit needs --pairs, e.g. \"0:1,2:0\"")?;
            let mut list = Vec::new();
            for part in raw.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let (a, b) = part
                    .split_once(':')
                    .with_context(|| format!("pair {part:?} is not of the form a:b"))?;
                list.push((
                    a.trim().parse().with_context(|| format!("pair {part:?}"))?,
                    b.trim().parse().with_context(|| format!("pair {part:?}"))?,
                ));
            }
            if list.is_empty() {
                bail!("--pairs lists no pairs");
            }
            Ok(TargetPredicate::Explicit(list))
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Knowledge {
    /// Nodes read incident edge latencies from the start.
    Known,
    /// Latencies must be probed before each dissemination attempt.
    Unknown,
}

impl Knowledge {
    pub fn scenario(self) -> Scenario {
        match self {
            Knowledge::Known => Scenario::Known,
            Knowledge::Unknown => Scenario::Unknown,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Knowledge::Known => "known",
            Knowledge::Unknown => "unknown",
        }
    }
}

/// Run `f` on a dedicated rayon pool when a `--jobs` cap was given.
pub fn with_pool<T: Send>(jobs: usize, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    if jobs == 0 {
        return f();
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
    pool.install(f)
}
