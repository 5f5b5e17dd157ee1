//! Library side of the `cmclab` command: argument types, commands and file formats.

pub mod data;
pub mod error;
pub mod flux;
pub mod js;
pub mod output;
pub mod profile;
pub mod solve;
pub mod surface;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use output::OutDir;

#[derive(Debug, Parser)]
#[command(
    name = "cmclab",
    version,
    about = "Constant mean curvature graphs over the hyperbolic plane"
)]
pub struct Cli {
    /// Directory for emitted files.
    #[arg(long, global = true, default_value = "cmclab-out")]
    pub out: PathBuf,
    /// Command tolerance: Newton residual for solves, equality tolerance for
    /// `js check`, curvature tolerance for `flux audit`, ODE residual bound for profiles.
    #[arg(long, global = true, value_parser = positive)]
    pub tol: Option<f64>,
    /// Recorded in every report; all commands are deterministic.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Invariant profile curves.
    #[command(subcommand)]
    Profile(profile::ProfileCmd),
    /// Dirichlet problems and entire graphs.
    #[command(subcommand)]
    Solve(solve::SolveCmd),
    /// Jenkins-Serrin domains.
    #[command(subcommand)]
    Js(js::JsCmd),
    /// Flux across curves of solved fields.
    #[command(subcommand)]
    Flux(flux::FluxCmd),
}

/// Settings shared by every command, stored in each report.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Global {
    pub tol: Option<f64>,
    pub seed: u64,
}

pub fn parse_h(s: &str) -> Result<f64, String> {
    let h: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if h.abs() < 0.5 {
        Ok(h)
    } else {
        Err("H must satisfy |H| < 1/2".into())
    }
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("`{s}` is not a positive number")),
    }
}

/// Runs a parsed command line: 0 on success, 1 when a checked condition
/// fails, 2 on errors.
pub fn run(cli: Cli) -> ExitCode {
    let out = OutDir::new(&cli.out);
    let global = Global {
        tol: cli.tol,
        seed: cli.seed,
    };
    let result = match cli.command {
        Command::Profile(cmd) => profile::run(cmd, &global, &out),
        Command::Solve(cmd) => solve::run(cmd, &global, &out),
        Command::Js(cmd) => js::run(cmd, &global, &out),
        Command::Flux(cmd) => flux::run(cmd, &global, &out),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
