use clap::{Args, Subcommand, ValueEnum};
use cmclab_core::killing::AsymptoticValue;
use cmclab_core::profiles::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::output::{csv_string, OutDir};
use crate::surface::{hyperbolic_surface, rotational_surface, ObjChart};
use crate::{parse_h, Global};

pub const CSV_HEADER: [&str; 3] = ["rho_or_s", "value", "derivative"];

#[derive(Debug, Subcommand)]
pub enum ProfileCmd {
    /// Rotationally invariant profile v(rho).
    Rotational(RotationalArgs),
    /// Profile u(s), s = x / y, invariant under hyperbolic translations.
    Hyperbolic(HyperbolicArgs),
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct RotationalArgs {
    #[arg(long = "H", value_parser = parse_h, allow_negative_numbers = true)]
    pub h: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub tau: f64,
    /// Integration constant; defaults to -2H, the entire graph.
    #[arg(long, allow_negative_numbers = true)]
    pub d: Option<f64>,
    #[arg(long = "rho-max", default_value_t = 10.0)]
    pub rho_max: f64,
    #[arg(long, default_value_t = 2001)]
    pub samples: usize,
    /// Also write the surface of revolution as OBJ.
    #[arg(long)]
    pub obj: bool,
    #[arg(long, value_enum, default_value_t)]
    pub chart: ObjChart,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum BranchArg {
    Full,
    Plus,
    Minus,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct HyperbolicArgs {
    #[arg(long = "H", value_parser = parse_h, allow_negative_numbers = true)]
    pub h: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub d: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub tau: f64,
    /// Defaults to `full` when P(s) has no real roots and `plus` otherwise.
    #[arg(long, value_enum)]
    pub branch: Option<BranchArg>,
    #[arg(long)]
    pub obj: bool,
    #[arg(long, value_enum, default_value_t)]
    pub chart: ObjChart,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RotationalReport {
    pub global: Global,
    pub config: RotationalArgs,
    pub d: f64,
    pub class: RotationalClass,
    pub rho_min: f64,
    pub rho_max: f64,
    pub value_at_rho_max: f64,
    /// `v(rho_max) / rho_max`.
    pub mean_slope: f64,
    pub predicted_slope: f64,
    pub ode_residual: Option<f64>,
    pub ode_tol: f64,
    pub ode_pass: Option<bool>,
    /// Absent when the profile is too short for a tail fit.
    pub asymptotic_slope: Option<AsymptoticReport>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct HyperbolicReport {
    pub global: Global,
    pub config: HyperbolicArgs,
    pub case: HyperbolicCase,
    pub branch: Branch,
    pub roots: Vec<f64>,
    pub root_limit: Option<AsymptoticValue>,
    pub base: f64,
    /// Largest residual of the first-order equation over the samples away from the roots.
    pub ode_residual: f64,
    pub log_coefficient: Option<AsymptoticReport>,
}

pub fn run(cmd: ProfileCmd, global: &Global, out: &OutDir) -> Result<bool> {
    match cmd {
        ProfileCmd::Rotational(args) => rotational(args, global, out),
        ProfileCmd::Hyperbolic(args) => hyperbolic(args, global, out),
    }
}

fn rotational(args: RotationalArgs, global: &Global, out: &OutDir) -> Result<bool> {
    let d = args.d.unwrap_or(-2.0 * args.h);
    let p = rotational_profile(args.h, d, args.tau, args.rho_max, args.samples)?;
    let last = *p.samples.last().expect("profile has samples");
    let ode_tol = global.tol.unwrap_or(1e-6);
    let ode_residual = rotational_ode_residual(&p).ok();
    let report = RotationalReport {
        global: global.clone(),
        config: args.clone(),
        d,
        class: p.klass,
        rho_min: p.rho_min,
        rho_max: p.rho_max,
        value_at_rho_max: last.value,
        mean_slope: last.value / last.at,
        predicted_slope: p.predicted_slope(),
        ode_residual,
        ode_tol,
        ode_pass: ode_residual.map(|r| r < ode_tol),
        asymptotic_slope: asymptotic_check(&p, AsymptoticQuantity::RotSlope).ok(),
    };
    out.write("profile.csv", &csv_string(&CSV_HEADER, &p.csv_rows())?)?;
    out.write_json("profile.json", &report)?;
    if args.obj {
        out.write(
            "profile.obj",
            &rotational_surface(&p, args.chart, 64)?.to_obj(),
        )?;
    }
    println!("class {:?}, rho_min {:.6}", report.class, report.rho_min);
    println!(
        "v({}) / {} = {:.6} (predicted slope {:.6})",
        last.at, last.at, report.mean_slope, report.predicted_slope
    );
    if let Some(r) = ode_residual {
        println!("ODE residual {r:.3e}");
    }
    Ok(true)
}

fn hyperbolic(args: HyperbolicArgs, global: &Global, out: &OutDir) -> Result<bool> {
    let case = hyperbolic_case(args.h, args.d);
    let branch = match (args.branch, case) {
        (Some(BranchArg::Full), _) | (None, HyperbolicCase::Entire) => Branch::Full,
        (Some(BranchArg::Minus), _) => Branch::Minus,
        (Some(BranchArg::Plus), _) | (None, _) => Branch::Plus,
    };
    let p = hyperbolic_profile(args.h, args.d, args.tau, branch)?;
    let ode_residual = p
        .samples
        .iter()
        .filter(|s| p.roots.iter().all(|r| (s.at - r).abs() > 1e-3))
        .filter_map(|s| hyperbolic_ode_residual(args.h, args.d, args.tau, s.at).ok())
        .fold(0.0f64, |m, r| m.max(r.abs()));
    let report = HyperbolicReport {
        global: global.clone(),
        config: args.clone(),
        case,
        branch,
        roots: p.roots.clone(),
        root_limit: p.root_limit,
        base: p.base,
        ode_residual,
        log_coefficient: asymptotic_check(&p, AsymptoticQuantity::HypLogCoeff).ok(),
    };
    out.write("profile.csv", &csv_string(&CSV_HEADER, &p.csv_rows())?)?;
    out.write_json("profile.json", &report)?;
    if args.obj {
        out.write(
            "profile.obj",
            &hyperbolic_surface(&p, args.chart, 25)?.to_obj(),
        )?;
    }
    println!("case {case:?}, branch {branch:?}, roots {:?}", report.roots);
    println!("ODE residual {ode_residual:.3e}");
    Ok(true)
}
