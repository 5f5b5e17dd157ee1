use std::path::PathBuf;

use clap::{Args, Subcommand};
use cmclab_core::hyperbolic::{Horocycle, TruncationFamily};
use cmclab_core::js::{
    check_conditions, default_truncation, enumerate_polygons, CheckOptions, JsDomain, JsReport,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::output::{read_to_string, OutDir};
use crate::Global;

#[derive(Debug, Subcommand)]
pub enum JsCmd {
    /// Admissibility and the solvability conditions of a domain given as JSON.
    Check(CheckArgs),
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct CheckArgs {
    /// Domain JSON: `{"H": .., "vertices": [..], "edges": [..]}`.
    pub domain: PathBuf,
    #[arg(long = "max-vertices", default_value_t = 12)]
    pub max_vertices: usize,
    #[arg(long = "max-count", default_value_t = 1000)]
    pub max_count: usize,
    /// Euclidean diameter of every horocycle; by default the largest of
    /// 0.2, 0.1, 0.05, ... that keeps the family admissible.
    #[arg(long = "horocycle-size")]
    pub horocycle_size: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CheckReport {
    pub global: Global,
    pub config: CheckArgs,
    pub polygons_found: usize,
    pub enumeration_truncated: bool,
    pub report: JsReport,
}

pub fn run(cmd: JsCmd, global: &Global, out: &OutDir) -> Result<bool> {
    match cmd {
        JsCmd::Check(args) => check(args, global, out),
    }
}

pub fn parse_domain(text: &str) -> Result<JsDomain> {
    let dom: JsDomain = serde_json::from_str(text)
        .map_err(|e| CliError::Usage(format!("malformed domain JSON: {e}")))?;
    dom.validate()?;
    Ok(dom)
}

fn check(args: CheckArgs, global: &Global, out: &OutDir) -> Result<bool> {
    let dom = parse_domain(&read_to_string(&args.domain)?)?;
    let trunc = match args.horocycle_size {
        Some(size) => {
            let horos = dom
                .vertices
                .iter()
                .filter(|v| v.ideal)
                .map(|v| Horocycle::new(*v, size))
                .collect::<cmclab_core::Result<Vec<_>>>()?;
            let bounded: Vec<_> = (0..dom.edges.len())
                .filter_map(|k| dom.edge_arc(k).ok().flatten())
                .collect();
            TruncationFamily::new(horos, &bounded)?
        }
        None => default_truncation(&dom)?,
    };
    let polys = enumerate_polygons(&dom, args.max_vertices, args.max_count)?;
    let mut opts = CheckOptions::default();
    if let Some(tol) = global.tol {
        opts.tol_eq = tol;
    }
    let report = check_conditions(&dom, &trunc, &polys.polygons, &opts)?;
    let adm = &report.admissibility;
    println!("admissible: {}", adm.admissible);
    if let Some(pc) = &report.perimeter_check {
        println!(
            "perimeter equality: {} (residual {:.6e}, after adjusting horocycles {:.6e})",
            if pc.pass { "pass" } else { "FAIL" },
            pc.raw_residual,
            pc.optimized_residual
        );
    }
    let failed = report
        .polygon_checks
        .iter()
        .filter(|c| !(c.pass_alpha && c.pass_beta))
        .count();
    println!(
        "polygon inequalities: {} checked, {failed} failing",
        report.polygon_checks.len()
    );
    println!("overall: {}", if report.pass { "pass" } else { "FAIL" });
    let pass = report.pass;
    out.write_json(
        "js_report.json",
        &CheckReport {
            global: global.clone(),
            config: args,
            polygons_found: polys.polygons.len(),
            enumeration_truncated: polys.truncated,
            report,
        },
    )?;
    Ok(pass)
}
