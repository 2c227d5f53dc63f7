use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;

use ktl::experiments::{self, Experiment};
use ktl::{par, Error};

/// Trotterized LMG / kicked-top chaos experiments.
#[derive(Debug, Parser)]
#[command(name = "ktl", version)]
struct Cli {
    /// Experiment to run; must match the config's `experiment` field.
    #[arg(value_enum)]
    experiment: Experiment,
    /// Flat JSON config file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `output_dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed (overrides `seed`).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    threads: Option<usize>,
    /// Include t = 0 in the FOTOC sample times.
    #[arg(long)]
    include_t0: bool,
}

fn execute(cli: &Cli) -> anyhow::Result<()> {
    let mut cfg = experiments::read_config(&cli.config)?;
    if cfg.experiment != cli.experiment {
        return Err(Error::Config(format!(
            "config {} is for {}, not {}",
            cli.config.display(),
            cfg.experiment.name(),
            cli.experiment.name()
        ))
        .into());
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output_dir = out.to_string_lossy().into_owned();
    }
    if cli.include_t0 {
        cfg.include_t0 = true;
    }
    let table = match cli.threads {
        Some(n) => par::with_threads(n, || experiments::run(&cfg))?,
        None => experiments::run(&cfg)?,
    };
    let dir = PathBuf::from(&cfg.output_dir);
    let (csv, meta) = experiments::write_results(&table, &dir)
        .with_context(|| format!("writing results to {}", dir.display()))?;
    println!("{} rows -> {}", table.rows.len(), csv.display());
    println!("metadata -> {}", meta.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<Error>().map_or(1, Error::exit_code);
            ExitCode::from(code as u8)
        }
    }
}
