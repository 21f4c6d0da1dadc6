// SPDX-License-Identifier: MIT OR Apache-2.0
//! `thetastrat`: strata, HN optimization, twisted indices and wall-crossing corrections.
//!
//! Exit codes: 0 success, 1 I/O failure or oracle mismatch, 2 schema error,
//! 3 mathematical precondition failure, 4 integer-gate failure.

mod check;
mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use config::{RunConfig, SchemaError};

#[derive(Parser)]
#[command(name = "thetastrat", version, about = "Theta-stratifications and twisted indices of linear GIT quotients")]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; 1 selects the sequential path.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Overrides the `t` truncation order of the config.
    #[arg(long = "trunc-t", global = true)]
    trunc_t: Option<u32>,
    /// Mantissa bits for the multiprecision evaluation.
    #[arg(long, global = true)]
    precision: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the χ-active strata with μ² ≤ γ².
    Strata,
    /// Maximize the normalized HN functional over the fan Σ_X.
    HnOpt,
    /// Evaluate the twisted index I(X/G, F) per degree.
    Index,
    /// Recursive wall-crossing from I_d to I^χ.
    Ggw,
    /// Run an oracle suite: verlinde, abelian, grid, lattice or all.
    Check {
        suite: String,
        /// Group type for the verlinde suite.
        #[arg(long = "type", default_value = "A1")]
        group: String,
        /// Genus; all of 0..=2 when absent.
        #[arg(long)]
        g: Option<u32>,
        /// Level; all of 1..=4 when absent.
        #[arg(long)]
        k: Option<i64>,
        /// Random instances for the grid suite.
        #[arg(long, default_value_t = 20)]
        count: usize,
    },
}

/// A failure with its exit code.
pub enum Failure {
    Io(String),
    Mismatch(String),
    Schema(String),
    Math(thetastrat::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) | Failure::Mismatch(_) => 1,
            Failure::Schema(_) => 2,
            Failure::Math(e) if e.is_integer_gate() => 4,
            Failure::Math(thetastrat::Error::InvalidDatum(_) | thetastrat::Error::Dimension(_)) => 2,
            Failure::Math(_) => 3,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Io(m) => format!("error: {m}"),
            Failure::Mismatch(m) => format!("oracle mismatch: {m}"),
            Failure::Schema(m) => format!("schema error: {m}"),
            Failure::Math(thetastrat::Error::Precondition(m)) => format!("precondition failed: {m}"),
            Failure::Math(e) => format!("error: {e}"),
        }
    }
}

impl From<thetastrat::Error> for Failure {
    fn from(e: thetastrat::Error) -> Self {
        Failure::Math(e)
    }
}

impl From<SchemaError> for Failure {
    fn from(e: SchemaError) -> Self {
        Failure::Schema(e.0)
    }
}

fn load_config(cli: &Cli) -> Result<Option<RunConfig>, Failure> {
    let Some(path) = &cli.config else { return Ok(None) };
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    let mut cfg = RunConfig::parse(&text)?;
    if let Some(t) = cli.trunc_t {
        cfg.truncation.t = t;
    }
    if let Some(p) = cli.precision {
        cfg.precision = Some(p);
    }
    Ok(Some(cfg))
}

fn run(cli: &Cli) -> Result<Value, Failure> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::Schema("--threads: must be at least 1".into()));
        }
        thetastrat::par::set_threads(n);
    }
    let cfg = load_config(cli)?;
    if let Some(bits) = cfg.as_ref().and_then(|c| c.precision).or(cli.precision) {
        thetastrat::scalar::set_precision(bits)?;
    }
    let need = |name: &str| cfg.as_ref().ok_or_else(|| Failure::Schema(format!("{name} requires --config")));
    let (name, results, oracle) = match &cli.command {
        Command::Strata => ("strata", commands::strata(need("strata")?)?, None),
        Command::HnOpt => ("hn-opt", commands::hn_opt(need("hn-opt")?)?, None),
        Command::Index => ("index", commands::index(need("index")?)?, None),
        Command::Ggw => ("ggw", commands::ggw(need("ggw")?)?, None),
        Command::Check { suite, group, g, k, count } => {
            let opts = check::Options { group: group.clone(), genus: *g, level: *k, count: *count, seed: cli.seed };
            let outcome = check::run(suite, &opts)?;
            ("check", outcome.results, Some(outcome.oracle))
        }
    };
    let mut report = json!({
        "schema": "v1",
        "command": name,
        "config_hash": cfg.as_ref().map(RunConfig::hash),
        "config": cfg.as_ref().map(RunConfig::echo),
        "results": results,
    });
    if let Some(o) = oracle {
        report["oracle"] = o;
    }
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = run(&cli).and_then(|report| {
        let text = serde_json::to_string_pretty(&report).expect("reports serialize") + "\n";
        match &cli.out {
            Some(p) => std::fs::write(p, &text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
            None => match std::io::stdout().lock().write_all(text.as_bytes()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::Io(format!("stdout: {e}"))),
                _ => Ok(()),
            },
        }
        .map(|()| report)
    });
    match outcome {
        Ok(report) if report["oracle"]["passed"] == Value::Bool(false) => {
            eprintln!("{}", Failure::Mismatch("see the oracle section of the report".into()).message());
            ExitCode::from(1)
        }
        Ok(_) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.message());
            ExitCode::from(f.code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_error_kind() {
        let code = |e: thetastrat::Error| Failure::Math(e).code();
        assert_eq!(code(thetastrat::Error::IntegerGate("x".into())), 4);
        assert_eq!(code(thetastrat::Error::Precondition("x".into())), 3);
        assert_eq!(code(thetastrat::Error::NonConvergence("x".into())), 3);
        assert_eq!(code(thetastrat::Error::Dimension("x".into())), 2);
        assert_eq!(Failure::Schema("x".into()).code(), 2);
        assert_eq!(Failure::Mismatch("x".into()).code(), 1);
    }
}
