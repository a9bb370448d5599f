use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use gossip_core::graph::io;
use gossip_core::protocols::{
    eid, general_eid, l_dtg, path_discovery, push_pull, run_t_sequence, unified_dissemination,
    PipelineParams, PushPullMode, Winner,
};
use gossip_core::sim::{Metrics, SimConfig, TraceLevel};

use crate::common::{resolve_seed, write_atomic, Knowledge};

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Proto {
    /// Random neighbor exchange each round.
    PushPull,
    /// Deterministic tree gossip over edges of latency <= ell.
    LDtg,
    /// Recursive latency-doubling schedule reaching distance k.
    TSeq,
    /// Spanner pipeline for one fixed diameter guess (--k).
    Eid,
    /// Guess-and-double spanner pipeline with termination checks.
    GeneralEid,
    /// Guess-and-double over recursive schedules; needs no size estimate.
    PathDiscovery,
    /// Race push-pull against the pipeline and report the winner.
    Unified,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Mode {
    Broadcast,
    AllToAll,
    Local,
}

#[derive(clap::Args)]
pub struct Args {
    /// Edge-list file.
    graph: PathBuf,
    #[arg(long, value_enum)]
    protocol: Proto,
    /// Push-pull variant.
    #[arg(long, value_enum, default_value_t = Mode::AllToAll)]
    mode: Mode,
    /// Broadcast source node.
    #[arg(long, default_value_t = 0)]
    source: usize,
    /// Latency cap for l-dtg and local push-pull.
    #[arg(long)]
    ell: Option<u64>,
    /// Distance parameter: t-seq reach (power of two) or eid diameter guess.
    #[arg(long)]
    k: Option<u64>,
    /// Latency knowledge for the pipeline protocols.
    #[arg(long, value_enum, default_value_t = Knowledge::Known)]
    scenario: Knowledge,
    /// Override the pipeline's graph-size estimate (defaults to n^2).
    #[arg(long)]
    n_hat: Option<u64>,
    /// Multiplier on the pipeline's round-robin reach.
    #[arg(long, default_value_t = 1)]
    rr_scale: u64,
    #[arg(long)]
    seed: Option<u64>,
    /// Engine round cap.
    #[arg(long, default_value_t = 1_000_000)]
    max_rounds: u64,
    /// Write one "round initiator responder latency deliver_round" line per
    /// initiated exchange.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write a JSON metrics report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(args: Args) -> Result<ExitCode> {
    let g = io::load(&args.graph)
        .with_context(|| format!("loading {}", args.graph.display()))?;
    // The doubling schedules are deterministic; everything else draws on the
    // seed, so only those two get a default.
    let seed = match args.protocol {
        Proto::LDtg | Proto::TSeq => args.seed.unwrap_or(0),
        _ => resolve_seed(args.seed)?,
    };
    let mut cfg = SimConfig::new(seed, args.max_rounds);
    if args.trace.is_some() {
        cfg = cfg.with_trace(TraceLevel::Full);
    }
    let params = PipelineParams { n_hat: args.n_hat, rr_scale: args.rr_scale };

    let mut unified_note = None;
    let metrics = match args.protocol {
        Proto::PushPull => {
            let mode = match args.mode {
                Mode::Broadcast => PushPullMode::Broadcast { source: args.source },
                Mode::AllToAll => PushPullMode::AllToAll,
                Mode::Local => PushPullMode::LocalBroadcast {
                    ell: args.ell.context("--mode local needs --ell")?,
                },
            };
            push_pull(&g, mode, &cfg)?.0
        }
        Proto::LDtg => l_dtg(&g, args.ell.context("l-dtg needs --ell")?, &cfg)?.0,
        Proto::TSeq => run_t_sequence(&g, args.k.context("t-seq needs --k")?, &cfg)?.0,
        Proto::Eid => eid(&g, args.k.context("eid needs --k")?, params, &cfg)?.0,
        Proto::GeneralEid => general_eid(&g, args.scenario.scenario(), params, &cfg)?.0,
        Proto::PathDiscovery => path_discovery(&g, &cfg)?.0,
        Proto::Unified => {
            if args.trace.is_some() {
                bail!("--trace is ambiguous for unified; trace one protocol at a time");
            }
            let rep = unified_dissemination(&g, args.scenario.scenario(), &cfg)?;
            let winner = match rep.winner {
                Winner::PushPull => "push-pull",
                Winner::Spanner => "spanner",
            };
            println!(
                "winner {winner} (push-pull {} vs spanner {})",
                rep.push_pull.rounds_elapsed, rep.spanner.rounds_elapsed
            );
            unified_note = Some((winner, rep.push_pull.rounds_elapsed, rep.spanner.rounds_elapsed));
            match rep.winner {
                Winner::PushPull => rep.push_pull,
                Winner::Spanner => rep.spanner,
            }
        }
    };

    println!("rounds {}", metrics.rounds_elapsed);
    println!("completed {}", metrics.completed);
    println!("exchanges {}", metrics.exchanges_initiated);
    for (class, count) in &metrics.activations_by_class {
        println!("activations class {class}: {count}");
    }

    if let Some(path) = &args.trace {
        let mut text = format!(
            "# simulate {} seed={seed} max_rounds={}\n",
            args.graph.display(),
            args.max_rounds
        );
        for rec in &metrics.trace {
            let _ = writeln!(text, "{}", rec.line());
        }
        write_atomic(path, text.as_bytes())?;
    }

    if let Some(path) = &args.out {
        let doc = json_report(&args, seed, &metrics, unified_note);
        write_atomic(path, format!("{doc:#}\n").as_bytes())?;
    }
    Ok(ExitCode::SUCCESS)
}

fn json_report(
    args: &Args,
    seed: u64,
    metrics: &Metrics,
    unified: Option<(&str, u64, u64)>,
) -> serde_json::Value {
    let unified = unified.map(|(winner, pp, sp)| {
        serde_json::json!({ "winner": winner, "push_pull_rounds": pp, "spanner_rounds": sp })
    });
    serde_json::json!({
        "config": {
            "command": "simulate",
            "file": args.graph.display().to_string(),
            "seed": seed,
            "max_rounds": args.max_rounds,
        },
        "rounds": metrics.rounds_elapsed,
        "completed": metrics.completed,
        "exchanges": metrics.exchanges_initiated,
        "activations_by_class": metrics
            .activations_by_class
            .iter()
            .map(|(k, v)| (k.to_string(), *v))
            .collect::<std::collections::BTreeMap<String, u64>>(),
        "completion_rounds": metrics.completion_round,
        "unified": unified,
    })
}
