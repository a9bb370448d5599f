use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use gossip_core::experiments::{all_criteria, Scale};

use crate::common::{csv_artifact, write_atomic};

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum ScaleArg {
    /// Pruned instance counts for quick runs.
    Smoke,
    /// The pinned acceptance scale.
    Full,
}

#[derive(clap::Args)]
pub struct Args {
    #[arg(long, value_enum, default_value_t = ScaleArg::Full)]
    scale: ScaleArg,
    /// Artifact directory: summary.json plus one CSV per check with data.
    #[arg(long, default_value = "verify-out")]
    out_dir: PathBuf,
}

pub fn run(args: Args) -> Result<ExitCode> {
    let (scale, label) = match args.scale {
        ScaleArg::Smoke => (Scale::Smoke, "smoke"),
        ScaleArg::Full => (Scale::Full, "full"),
    };
    let reports = all_criteria(scale)?;
    std::fs::create_dir_all(&args.out_dir)?;

    let mut entries = Vec::new();
    for rep in &reports {
        let status = if rep.passed { "ok" } else { "FAIL" };
        println!("[{status}] {:02} {}: {}", rep.id, rep.name, rep.detail);
        let csv_name = if rep.rows.is_empty() {
            None
        } else {
            let name = format!("criterion_{:02}.csv", rep.id);
            let config =
                format!("verify scale={label} criterion={:02} {}", rep.id, rep.name);
            write_atomic(&args.out_dir.join(&name), &csv_artifact(&config, &rep.rows)?)?;
            Some(name)
        };
        entries.push(serde_json::json!({
            "id": rep.id,
            "name": rep.name,
            "passed": rep.passed,
            "detail": rep.detail,
            "csv": csv_name,
        }));
    }

    let all_passed = reports.iter().all(|r| r.passed);
    let doc = serde_json::json!({
        "config": { "command": "verify", "scale": label },
        "criteria": entries,
        "all_passed": all_passed,
    });
    write_atomic(&args.out_dir.join("summary.json"), format!("{doc:#}\n").as_bytes())?;

    if all_passed {
        println!("verification passed ({} checks)", reports.len());
        Ok(ExitCode::SUCCESS)
    } else {
        let failed = reports.iter().filter(|r| !r.passed).count();
        println!("VERIFICATION FAILED ({failed} of {} checks)", reports.len());
        Ok(ExitCode::from(1))
    }
}
