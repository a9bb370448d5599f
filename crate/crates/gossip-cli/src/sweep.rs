use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Subcommand;
use gossip_core::graph::generate::{self as gen, TargetPredicate};
use gossip_core::graph::Latency;
use gossip_core::protocols::{general_eid, push_pull, unified_dissemination, PipelineParams,
    PushPullMode, Winner};
use gossip_core::sim::SimConfig;
use gossip_core::util::derive_seed;
use rayon::prelude::*;

use crate::common::{csv_artifact, parse_list, resolve_seed, with_pool, write_atomic, Knowledge};

#[derive(clap::Args)]
pub struct Args {
    #[command(subcommand)]
    kind: Kind,
}

#[derive(Subcommand)]
enum Kind {
    /// Push-pull broadcast rounds on bipartite gadgets G(2m, 1, m^2) as the
    /// cross-edge density phi varies.
    PushpullPhi {
        #[arg(long, default_value_t = 64)]
        m: usize,
        #[arg(long, default_value = "0.5,0.25,0.125")]
        phis: String,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long)]
        seed: Option<u64>,
        /// Worker cap (0 = one per core).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Guess-and-double dissemination rounds on unit paths of growing length
    /// (diameter = nodes - 1).
    EidDiameter {
        #[arg(long, default_value = "4,8,16")]
        lengths: String,
        #[arg(long, default_value_t = 10)]
        trials: u64,
        #[arg(long, value_enum, default_value_t = Knowledge::Known)]
        scenario: Knowledge,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Push-pull vs the spanner pipeline on gadget rings as the slow cross
    /// latency grows.
    Tradeoff {
        #[arg(long, default_value_t = 3)]
        s: usize,
        #[arg(long, default_value_t = 6)]
        layers: usize,
        #[arg(long, default_value = "1,4,16,64")]
        ells: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

pub fn run(args: Args) -> Result<ExitCode> {
    match args.kind {
        Kind::PushpullPhi { m, phis, trials, seed, jobs, out } => {
            let phis = parse_list::<f64>(&phis, "phi")?;
            let seed = resolve_seed(seed)?;
            let config = format!(
                "sweep pushpull-phi m={m} phis={} trials={trials} seed={seed}",
                join(&phis)
            );
            let header = vec!["m", "phi", "trial", "seed", "rounds", "completed"];
            let tasks: Vec<(usize, f64, u64)> = phis
                .iter()
                .enumerate()
                .flat_map(|(i, &phi)| (0..trials).map(move |t| (i, phi, t)))
                .collect();
            let rows = with_pool(jobs, || {
                tasks
                    .into_par_iter()
                    .map(|(i, phi, trial)| -> Result<Vec<String>> {
                        let run_seed = derive_seed(seed, ((i as u64) << 32) | trial);
                        let hi = (m * m) as Latency;
                        let gadget = gen::gadget(
                            m,
                            1,
                            hi,
                            &TargetPredicate::RandomP(phi),
                            false,
                            run_seed,
                        )?;
                        let cfg =
                            SimConfig::new(derive_seed(run_seed, 1), (8 * hi).max(1024));
                        let (metrics, _) = push_pull(
                            &gadget.graph,
                            PushPullMode::Broadcast { source: 0 },
                            &cfg,
                        )?;
                        Ok(vec![
                            m.to_string(),
                            phi.to_string(),
                            trial.to_string(),
                            run_seed.to_string(),
                            metrics.rounds_elapsed.to_string(),
                            metrics.completed.to_string(),
                        ])
                    })
                    .collect::<Result<Vec<_>>>()
            })?;
            write_sweep(&out, &config, header, rows)
        }
        Kind::EidDiameter { lengths, trials, scenario, seed, jobs, out } => {
            let lengths = parse_list::<usize>(&lengths, "length")?;
            for &n in &lengths {
                anyhow::ensure!(n >= 2, "path needs at least 2 nodes, got {n}");
            }
            let seed = resolve_seed(seed)?;
            let config = format!(
                "sweep eid-diameter lengths={} trials={trials} scenario={} seed={seed}",
                join(&lengths),
                scenario.label()
            );
            let header = vec!["n", "diameter", "scenario", "trial", "rounds", "completed"];
            let tasks: Vec<(usize, usize, u64)> = lengths
                .iter()
                .enumerate()
                .flat_map(|(i, &n)| (0..trials).map(move |t| (i, n, t)))
                .collect();
            let rows = with_pool(jobs, || {
                tasks
                    .into_par_iter()
                    .map(|(i, n, trial)| -> Result<Vec<String>> {
                        let g = gen::path(&vec![1; n - 1])?;
                        let run_seed = derive_seed(seed, ((i as u64) << 32) | trial);
                        let cfg = SimConfig::new(run_seed, 2_000_000);
                        let (metrics, _) = general_eid(
                            &g,
                            scenario.scenario(),
                            PipelineParams::default(),
                            &cfg,
                        )?;
                        Ok(vec![
                            n.to_string(),
                            (n - 1).to_string(),
                            scenario.label().to_string(),
                            trial.to_string(),
                            metrics.rounds_elapsed.to_string(),
                            metrics.completed.to_string(),
                        ])
                    })
                    .collect::<Result<Vec<_>>>()
            })?;
            write_sweep(&out, &config, header, rows)
        }
        Kind::Tradeoff { s, layers, ells, seed, jobs, out } => {
            let ells = parse_list::<Latency>(&ells, "ell")?;
            let seed = resolve_seed(seed)?;
            let config = format!(
                "sweep tradeoff s={s} layers={layers} ells={} seed={seed}",
                join(&ells)
            );
            let header =
                vec!["s", "layers", "ell", "pushpull_rounds", "spanner_rounds", "winner"];
            let rows = with_pool(jobs, || {
                ells.par_iter()
                    .map(|&ell| -> Result<Vec<String>> {
                        let g = gen::ring_of_gadgets(s, layers, ell, derive_seed(seed, ell))?;
                        let cfg = SimConfig::new(derive_seed(seed, ell ^ 0x7a), 4_000_000);
                        let rep = unified_dissemination(&g, Knowledge::Known.scenario(), &cfg)
                            .with_context(|| format!("ring s={s} layers={layers} ell={ell}"))?;
                        let winner = match rep.winner {
                            Winner::PushPull => "push-pull",
                            Winner::Spanner => "spanner",
                        };
                        Ok(vec![
                            s.to_string(),
                            layers.to_string(),
                            ell.to_string(),
                            rep.push_pull.rounds_elapsed.to_string(),
                            rep.spanner.rounds_elapsed.to_string(),
                            winner.to_string(),
                        ])
                    })
                    .collect::<Result<Vec<_>>>()
            })?;
            write_sweep(&out, &config, header, rows)
        }
    }
}

fn join<T: ToString>(values: &[T]) -> String {
    values.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn write_sweep(
    out: &std::path::Path,
    config: &str,
    header: Vec<&str>,
    rows: Vec<Vec<String>>,
) -> Result<ExitCode> {
    let mut all = vec![header.into_iter().map(String::from).collect::<Vec<_>>()];
    all.extend(rows);
    write_atomic(out, &csv_artifact(config, &all)?)?;
    println!("wrote {} rows to {}", all.len() - 1, out.display());
    Ok(ExitCode::SUCCESS)
}
