//! Experiment drivers behind the `isodense` binary.
//!
//! Each subcommand reads a [`RunConfig`], runs to completion and returns a
//! [`Table`] plus warnings. Output depends only on the configuration: blocks
//! of work are fixed independently of the thread count and results are
//! assembled in order.

mod commands;
pub mod config;
pub mod rng;

use std::fmt;
use std::str::FromStr;

pub use commands::{
    cmd_count_orbit, cmd_exponent, cmd_kappa, cmd_oracle_count, cmd_solve, cmd_verify_lemmas,
};
pub use config::RunConfig;
pub use rng::SplitMix64;

use crate::error::{Error, Result};
use crate::report::Table;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Command {
    Solve,
    CountOrbit,
    VerifyLemmas,
    Kappa,
    Exponent,
    OracleCount,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::Solve,
        Command::CountOrbit,
        Command::VerifyLemmas,
        Command::Kappa,
        Command::Exponent,
        Command::OracleCount,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::CountOrbit => "count-orbit",
            Command::VerifyLemmas => "verify-lemmas",
            Command::Kappa => "kappa",
            Command::Exponent => "exponent",
            Command::OracleCount => "oracle-count",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::validation(format!("unknown subcommand {s:?}")))
    }
}

/// What a subcommand produced.
#[derive(Clone, Debug, PartialEq)]
pub struct Output {
    pub table: Table,
    pub warnings: Vec<String>,
}

impl Output {
    fn new(table: Table) -> Self {
        Output {
            table,
            warnings: Vec::new(),
        }
    }
}

pub fn run(cmd: Command, cfg: &RunConfig) -> Result<Output> {
    match cmd {
        Command::Solve => cmd_solve(cfg),
        Command::CountOrbit => cmd_count_orbit(cfg),
        Command::VerifyLemmas => cmd_verify_lemmas(cfg),
        Command::Kappa => cmd_kappa(cfg),
        Command::Exponent => cmd_exponent(cfg),
        Command::OracleCount => cmd_oracle_count(cfg),
    }
}

/// [`run`] on a dedicated pool; `threads = 0` lets rayon choose.
pub fn run_with_threads(cmd: Command, cfg: &RunConfig, threads: usize) -> Result<Output> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::validation(format!("cannot start thread pool: {e}")))?;
    pool.install(|| run(cmd, cfg))
}

/// Process exit code for a failed run.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::PrecisionExhausted(_) => 2,
        Error::Soundness(_) => 3,
        _ => 1,
    }
}
