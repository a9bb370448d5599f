use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use gossip_core::graph::generate::TargetPredicate;
use gossip_core::guessing::{new_game, strategy_adaptive_exhaustive, strategy_random_per_endpoint};
use gossip_core::util::derive_seed;

use crate::common::{build_predicate, csv_artifact, resolve_seed, write_atomic, PredicateKind};

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Strategy {
    /// Uniform guess per endpoint each round.
    Random,
    /// Deterministic budget-filling sweep; halts within ceil(m/2) rounds.
    Adaptive,
    Both,
}

#[derive(clap::Args)]
pub struct Args {
    /// Side size: guesses live in {0..m} x {0..m}, budget 2m per round.
    #[arg(long)]
    m: usize,
    #[arg(long, value_enum, default_value_t = PredicateKind::Singleton)]
    predicate: PredicateKind,
    /// Target probability for --predicate random-p.
    #[arg(long)]
    p: Option<f64>,
    /// Pairs for --predicate explicit, e.g. "0:1,2:0".
    #[arg(long)]
    pairs: Option<String>,
    #[arg(long, value_enum, default_value_t = Strategy::Both)]
    strategy: Strategy,
    #[arg(long, default_value_t = 1)]
    trials: u64,
    #[arg(long)]
    seed: Option<u64>,
    /// Round cap for the random strategy (default 200·m).
    #[arg(long)]
    max_rounds: Option<u64>,
    /// Write a CSV with one row per (trial, strategy).
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(args: Args) -> Result<ExitCode> {
    let predicate = build_predicate(args.predicate, args.p, args.pairs.as_deref())?;
    let deterministic = matches!(predicate, TargetPredicate::Explicit(_))
        && args.strategy == Strategy::Adaptive;
    let seed = if deterministic { args.seed.unwrap_or(0) } else { resolve_seed(args.seed)? };
    let cap = args.max_rounds.unwrap_or(200 * args.m as u64);

    let mut rows = vec![vec![
        "trial".into(),
        "strategy".into(),
        "targets".into(),
        "rounds".into(),
        "halted".into(),
    ]];
    let mut sums: Vec<(&str, f64, u64)> = Vec::new();
    let mut record = |trial: u64,
                      name: &'static str,
                      targets: usize,
                      rounds: u64,
                      halted: bool,
                      rows: &mut Vec<Vec<String>>| {
        rows.push(vec![
            trial.to_string(),
            name.into(),
            targets.to_string(),
            rounds.to_string(),
            halted.to_string(),
        ]);
        match sums.iter_mut().find(|(n, _, _)| *n == name) {
            Some(entry) => {
                entry.1 += rounds as f64;
                entry.2 += 1;
            }
            None => sums.push((name, rounds as f64, 1)),
        }
    };

    for trial in 0..args.trials {
        let game_seed = derive_seed(seed, trial);
        if args.strategy != Strategy::Adaptive {
            let mut game = new_game(args.m, &predicate, game_seed)?;
            let targets = game.target_size();
            let rounds =
                strategy_random_per_endpoint(&mut game, derive_seed(game_seed, 1), cap)?;
            record(trial, "random", targets, rounds, game.is_halted(), &mut rows);
        }
        if args.strategy != Strategy::Random {
            let mut game = new_game(args.m, &predicate, game_seed)?;
            let targets = game.target_size();
            let rounds = strategy_adaptive_exhaustive(&mut game)?;
            record(trial, "adaptive", targets, rounds, game.is_halted(), &mut rows);
        }
    }

    for (name, total, count) in &sums {
        println!("{name} mean rounds {:.2} over {count} trials", total / *count as f64);
    }
    if let Some(out) = &args.out {
        let config = format!(
            "game m={} predicate={} trials={} seed={seed} max_rounds={cap}",
            args.m,
            predicate_label(&predicate),
            args.trials
        );
        write_atomic(out, &csv_artifact(&config, &rows)?)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn predicate_label(p: &TargetPredicate) -> String {
    match p {
        TargetPredicate::Singleton => "singleton".into(),
        TargetPredicate::RandomP(prob) => format!("random-p({prob})"),
        TargetPredicate::Explicit(pairs) => format!("explicit({} pairs)", pairs.len()),
    }
}
