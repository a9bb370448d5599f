use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use gossip_core::conductance::estimate::{
    estimate_avg_conductance, estimate_critical, estimate_phi_ell, EstimateOptions,
};
use gossip_core::conductance::{self, ConductanceReport, EXACT_CUT_CAP};
use gossip_core::graph::io;
use gossip_core::LatencyGraph;

use crate::common::{resolve_seed, write_atomic};

#[derive(clap::Args)]
pub struct Args {
    /// Edge-list file to analyze.
    graph: PathBuf,
    /// Use the sampled estimator instead of exact cut enumeration
    /// (mandatory above the enumeration cap; values become upper bounds).
    #[arg(long)]
    approx: bool,
    /// Estimator restarts per quantity.
    #[arg(long, default_value_t = 24)]
    restarts: usize,
    /// Estimator seed (only --approx runs are randomized).
    #[arg(long)]
    seed: Option<u64>,
    /// Also write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(args: Args) -> Result<ExitCode> {
    let g = io::load(&args.graph)
        .with_context(|| format!("loading {}", args.graph.display()))?;

    let (report, seed) = if args.approx {
        let seed = resolve_seed(args.seed)?;
        (approx_report(&g, args.restarts, seed)?, Some(seed))
    } else {
        if g.n() > EXACT_CUT_CAP {
            bail!(
                "{} nodes exceeds the exact cut-enumeration cap of {EXACT_CUT_CAP}; \
                 rerun with --approx",
                g.n()
            );
        }
        (conductance::analyze(&g)?, None)
    };

    let doc = serde_json::json!({
        "config": {
            "command": "analyze",
            "file": args.graph.display().to_string(),
            "approx": args.approx,
            "restarts": if args.approx { Some(args.restarts) } else { None },
            "seed": seed,
        },
        "report": report.to_json(),
    });
    let text = format!("{doc:#}\n");
    print!("{text}");
    if let Some(out) = &args.out {
        write_atomic(out, text.as_bytes())?;
    }
    Ok(ExitCode::SUCCESS)
}

/// Same report shape as the exact path, but every value is the best cut the
/// sampled search found: conductances are upper bounds, so the sandwich
/// relation is not evaluated.
fn approx_report(g: &LatencyGraph, restarts: usize, seed: u64) -> Result<ConductanceReport> {
    let opts = EstimateOptions { restarts, seed };
    let mut phi_ell = BTreeMap::new();
    for l in g.distinct_latencies() {
        let (phi, cut) = estimate_phi_ell(g, l, opts)?;
        phi_ell.insert(l, (phi, cut.side().to_vec()));
    }
    let (phi_star, ell_star, crit_cut) = estimate_critical(g, opts)?;
    let (phi_avg, avg_cut) = estimate_avg_conductance(g, opts)?;
    Ok(ConductanceReport {
        n: g.n(),
        m: g.m(),
        exact: false,
        phi_ell,
        phi_star,
        ell_star,
        phi_star_witness: crit_cut.side().to_vec(),
        phi_avg,
        phi_avg_witness: avg_cut.side().to_vec(),
        num_classes: conductance::count_nonempty_classes(g),
        relation: None,
    })
}
