use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use bmsim_core::dispatch::BASE_MVA;
use bmsim_core::{
    emit_reports, load_scenario, run_sweep, solve_dispatch, DispatchError, DispatchReport, ModelError,
    ScenarioPaths, SweepConfig, SweepError,
};
use clap::{Parser, Subcommand};
use log::info;

/// Balancing-mechanism redispatch simulator with grid-scale storage.
#[derive(Debug, Parser)]
#[command(name = "bmsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a technology/size/location sweep and write its reports.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Worker threads; overrides the config.
        #[arg(long)]
        parallel: Option<usize>,
        /// Output directory; overrides the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a sweep config and its scenario without solving anything.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Solve one scenario and export the dispatch.
    Solve {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        solution: PathBuf,
    },
}

/// Validation problems exit with 2, solver problems with 3.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<SweepError>() {
            return match e {
                SweepError::BaseDispatch(_) => 3,
                SweepError::Io { .. } | SweepError::EmptyResult => 1,
                _ => 2,
            };
        }
        if cause.downcast_ref::<ModelError>().is_some() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<DispatchError>() {
            return match e {
                DispatchError::Model(_) => 2,
                _ => 3,
            };
        }
    }
    1
}

fn run(config: PathBuf, parallel: Option<usize>, out: Option<PathBuf>) -> Result<()> {
    let mut cfg = SweepConfig::load(&config)?;
    if let Some(n) = parallel {
        cfg.parallelism = n;
    }
    if let Some(dir) = out {
        cfg.output_dir = dir;
    }
    let result = run_sweep(&cfg)?;
    let failed = result.rows.iter().filter(|r| r.error.is_some()).count();
    let files = emit_reports(&result, &cfg.output_dir)?;
    info!(
        "{} rows ({failed} failed), {} dispatch solves",
        result.rows.len(),
        result.dispatch_solves
    );
    for f in files {
        println!("{}", f.display());
    }
    Ok(())
}

fn validate(config: PathBuf) -> Result<()> {
    let cfg = SweepConfig::load(&config)?;
    let scenario = load_scenario(&ScenarioPaths::from_dir(&cfg.scenario))?;
    let candidates = cfg.candidates(&scenario.network)?;
    println!(
        "ok: {} nodes, {} lines, {} units, {} periods, {} candidate nodes, {} cases",
        scenario.network.nodes.len(),
        scenario.network.lines.len(),
        scenario.units.len(),
        scenario.horizon,
        candidates.len(),
        candidates.len() * cfg.technologies.len() * cfg.sizes_mw.len()
    );
    Ok(())
}

fn solve(dir: PathBuf, solution: PathBuf) -> Result<()> {
    let scenario = load_scenario(&ScenarioPaths::from_dir(&dir))?;
    let sol = solve_dispatch(&scenario)?;
    fs::write(&solution, sol.to_csv()).with_context(|| format!("writing {}", solution.display()))?;

    // Aggregates go beside the solution; the header records the per-unit base.
    let report = DispatchReport::new(&sol);
    let json = serde_json::json!({
        "base_mva": BASE_MVA,
        "flow_units": "MW = base_mva * susceptance_pu * (theta_from - theta_to)",
        "objective_cost_gbp": report.objective_cost,
        "fuel_delta_mwh": report.fuel_delta_mwh.iter().map(|(f, v)| (f.as_str(), v)).collect::<std::collections::BTreeMap<_, _>>(),
        "net_redispatch_mwh": report.net_redispatch_mwh,
        "utilisation": report.utilisation,
    });
    let report_path = solution.with_extension("report.json");
    fs::write(&report_path, serde_json::to_string_pretty(&json)? + "\n")
        .with_context(|| format!("writing {}", report_path.display()))?;
    println!("objective {:.6} GBP", sol.objective_cost);
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("BMSIM_LOG", "error")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, parallel, out } => run(config, parallel, out),
        Command::Validate { config } => validate(config),
        Command::Solve { scenario, solution } => solve(scenario, solution),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
