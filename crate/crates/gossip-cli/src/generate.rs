use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::Subcommand;
use gossip_core::graph::generate as gen;
use gossip_core::graph::{io, Latency};

use crate::common::{build_predicate, parse_list, resolve_seed, write_atomic, PredicateKind};

#[derive(clap::Args)]
pub struct Args {
    #[command(subcommand)]
    family: Family,
}

#[derive(Subcommand)]
enum Family {
    /// Complete graph on n nodes, one latency everywhere.
    Clique {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        latency: Latency,
        #[arg(long)]
        out: PathBuf,
    },
    /// Path graph; comma-separated per-hop latencies.
    Path {
        #[arg(long)]
        latencies: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Star; comma-separated per-leaf latencies.
    Star {
        #[arg(long)]
        latencies: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Two q-cliques joined by one bridge edge.
    TwoCliques {
        #[arg(long)]
        q: usize,
        #[arg(long, default_value_t = 1)]
        bridge_latency: Latency,
        #[arg(long)]
        out: PathBuf,
    },
    /// Random d-regular simple graph (pairing model with rejection).
    RandomRegular {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 1)]
        latency: Latency,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Connected random graph, latencies uniform in [1, max-latency].
    RandomConnected {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 8)]
        max_latency: Latency,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Bipartite-core gadget: latency-1 clique on the left side (both sides
    /// with --symmetric), target cross pairs at latency lo, the rest hi.
    /// Realized targets are echoed to stdout and embedded as comments.
    Gadget {
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        lo: Latency,
        #[arg(long)]
        hi: Latency,
        #[arg(long, value_enum, default_value_t = PredicateKind::Singleton)]
        predicate: PredicateKind,
        /// Target probability for --predicate random-p.
        #[arg(long)]
        p: Option<f64>,
        /// Pairs for --predicate explicit, e.g. "0:1,2:0".
        #[arg(long)]
        pairs: Option<String>,
        #[arg(long)]
        symmetric: bool,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Ring of k layers of s nodes: latency-1 cliques per layer, complete
    /// bipartite cross wiring at latency ell except one random latency-1
    /// edge per adjacent layer pair.
    Ring {
        #[arg(long)]
        s: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 16)]
        ell: Latency,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
}

pub fn run(args: Args) -> Result<ExitCode> {
    let (graph, extra, out) = match args.family {
        Family::Clique { n, latency, out } => (gen::clique(n, latency)?, None, out),
        Family::Path { latencies, out } => {
            (gen::path(&parse_list::<Latency>(&latencies, "latency")?)?, None, out)
        }
        Family::Star { latencies, out } => {
            (gen::star(&parse_list::<Latency>(&latencies, "latency")?)?, None, out)
        }
        Family::TwoCliques { q, bridge_latency, out } => {
            (gen::two_cliques_bridge(q, bridge_latency)?, None, out)
        }
        Family::RandomRegular { n, d, latency, seed, out } => {
            (gen::random_regular(n, d, latency, resolve_seed(seed)?)?, None, out)
        }
        Family::RandomConnected { n, m, max_latency, seed, out } => {
            (gen::random_connected(n, m, max_latency, resolve_seed(seed)?)?, None, out)
        }
        Family::Gadget { m, lo, hi, predicate, p, pairs, symmetric, seed, out } => {
            let predicate = build_predicate(predicate, p, pairs.as_deref())?;
            // Explicit targets make the construction deterministic.
            let seed = match predicate {
                gen::TargetPredicate::Explicit(_) => seed.unwrap_or(0),
                _ => resolve_seed(seed)?,
            };
            let gadget = gen::gadget(m, lo, hi, &predicate, symmetric, seed)?;
            let mut comments = String::new();
            for &(a, b) in &gadget.targets {
                println!("target {a} {b}");
                let _ = writeln!(comments, "# target {a} {b}");
            }
            (gadget.graph, Some(comments), out)
        }
        Family::Ring { s, k, ell, seed, out } => {
            (gen::ring_of_gadgets(s, k, ell, resolve_seed(seed)?)?, None, out)
        }
    };

    let mut text = io::to_string(&graph);
    if let Some(extra) = extra {
        text.push_str(&extra);
    }
    write_atomic(&out, text.as_bytes())?;
    println!("wrote {} nodes / {} edges to {}", graph.n(), graph.m(), out.display());
    Ok(ExitCode::SUCCESS)
}
