use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use isodense::harness::{self, Command, RunConfig};
use isodense::Error;

/// Integer points where an inhomogeneous isotropic ternary form takes values
/// near a target.
#[derive(Parser, Debug)]
#[command(name = "isodense", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,

    /// Flat key = value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Fractional bits of the fixed-point arithmetic (at least 64).
    #[arg(long, global = true)]
    precision: Option<u32>,

    /// Write the CSV here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed of the random β samples.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads (0: one per core).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Override a configuration key, e.g. `--set T=1e6`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Sub {
    /// Orbit-constructed solutions of |Q_ξ(v) − t| ≤ Cδ with ‖v‖ ≤ T.
    Solve,
    /// Orbit hits N_φ(T, δ) near a torus point.
    CountOrbit,
    /// Check the Weyl differencing and capped reciprocal sum bounds.
    VerifyLemmas,
    /// Continued fraction and Diophantine exponent estimate.
    Kappa,
    /// Critical exponent estimates along a grid of T.
    Exponent,
    /// Exhaustive count over the ball ‖v‖ ≤ T.
    OracleCount,
}

impl From<Sub> for Command {
    fn from(s: Sub) -> Self {
        match s {
            Sub::Solve => Command::Solve,
            Sub::CountOrbit => Command::CountOrbit,
            Sub::VerifyLemmas => Command::VerifyLemmas,
            Sub::Kappa => Command::Kappa,
            Sub::Exponent => Command::Exponent,
            Sub::OracleCount => Command::OracleCount,
        }
    }
}

fn config(cli: &Cli) -> Result<RunConfig, Error> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::new(),
    };
    if let Some(p) = cli.precision {
        cfg.set("precision", &p.to_string())?;
    }
    if let Some(s) = cli.seed {
        cfg.set("seed", &s.to_string())?;
    }
    if let Some(n) = cli.threads {
        cfg.set("threads", &n.to_string())?;
    }
    if let Some(o) = &cli.out {
        cfg.set("out", &o.display().to_string())?;
    }
    for pair in &cli.set {
        cfg.set_pair(pair)?;
    }
    Ok(cfg)
}

fn execute(cli: &Cli) -> Result<(), Error> {
    let cfg = config(cli)?;
    let out = harness::run_with_threads(cli.command.into(), &cfg, cfg.threads()?)?;
    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    let csv = out.table.to_csv();
    match cfg.get("out") {
        Some(path) => std::fs::write(path, csv)
            .map_err(|e| Error::Validation(format!("cannot write {path}: {e}")))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(csv.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Error::Validation(format!("cannot write output: {e}")))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(harness::exit_code(&e) as u8)
        }
    }
}
