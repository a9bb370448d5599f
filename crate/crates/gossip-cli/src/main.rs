//! `gossip`: generators, conductance analysis, protocol simulation and batch
//! experiments for gossip on graphs with integer edge latencies.

use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod analyze;
mod common;
mod game;
mod generate;
mod simulate;
mod sweep;
mod verify;

#[derive(Parser)]
#[command(name = "gossip", version, about, max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a graph from one of the built-in families as an edge-list file.
    Generate(generate::Args),
    /// Conductance report (exact under the enumeration cap, sampled above).
    Analyze(analyze::Args),
    /// Run one protocol on a graph file and print round metrics.
    Simulate(simulate::Args),
    /// Play the endpoint-guessing game and report halting rounds.
    Game(game::Args),
    /// Batch experiments; one CSV row per run, deterministic order.
    Sweep(sweep::Args),
    /// Run the verification suite and write its artifacts.
    Verify(verify::Args),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Generate(args) => generate::run(args),
        Command::Analyze(args) => analyze::run(args),
        Command::Simulate(args) => simulate::run(args),
        Command::Game(args) => game::run(args),
        Command::Sweep(args) => sweep::run(args),
        Command::Verify(args) => verify::run(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
