//! `cellsleep run` simulates one deployment size; `cellsleep sweep` simulates
//! a list of sizes. Flags override the optional key-value config file, and
//! results land in CSV files.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use cellsleep::experiment::{run, sweep, RunConfig};
use cellsleep::metrics::RunSummary;

#[derive(Parser)]
#[command(name = "cellsleep", version, about = "Small-cell switch-off simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one small-cell count.
    Run(Overrides),
    /// Simulate every small-cell count in `s` and tabulate gains.
    Sweep(Overrides),
}

#[derive(Args)]
struct Overrides {
    /// Key-value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// A or B.
    #[arg(long)]
    scenario: Option<String>,
    /// Small-cell count, or a comma-separated list for sweep.
    #[arg(long)]
    s: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated subset of vfa, all_on, all_off, sorting, exhaustive.
    #[arg(long)]
    methods: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long)]
    slots: Option<usize>,
}

impl Overrides {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path).with_context(|| format!("reading {}", path.display()))?,
            None => RunConfig::default(),
        };
        let flags = [
            ("scenario", self.scenario.clone()),
            ("s", self.s.clone()),
            ("seed", self.seed.map(|v| v.to_string())),
            ("methods", self.methods.clone()),
            ("output_dir", self.out.as_ref().map(|p| p.display().to_string())),
            ("rounds", self.rounds.map(|v| v.to_string())),
            ("slots", self.slots.map(|v| v.to_string())),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, &v).with_context(|| format!("--{key}"))?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn print_table(rows: &[RunSummary]) {
    println!("{:>4}  {:<10} {:>14} {:>9} {:>9} {:>10}", "s", "method", "energy_j", "gain_%", "tput", "infeasible");
    for r in rows {
        println!(
            "{:>4}  {:<10} {:>14.1} {:>9.2} {:>9.3} {:>10}",
            r.s, r.method, r.energy_j, r.gain_pct, r.mean_tput, r.infeasible_slots
        );
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run(o) => o.resolve().and_then(|cfg| Ok((run(&cfg)?, cfg))),
        Command::Sweep(o) => o.resolve().and_then(|cfg| Ok((sweep(&cfg)?, cfg))),
    };
    match outcome {
        Ok((rows, cfg)) => {
            print_table(&rows);
            println!("results written to {}", cfg.output_dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
