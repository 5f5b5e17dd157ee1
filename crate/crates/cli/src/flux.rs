use std::path::PathBuf;

use clap::{Args, Subcommand};
use cmclab_core::hyperbolic::CurvatureArc;
use cmclab_core::js::{audit_with, flux, outer_boundary, CurvatureAudit};
use cmclab_core::solver::divergence::GradientSchedule;
use cmclab_core::solver::io::parse_mesh_file;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::output::{read_to_string, OutDir};
use crate::Global;

#[derive(Debug, Subcommand)]
pub enum FluxCmd {
    /// Closed-boundary flux of each field and, given an arc, the divergence audit of the sequence.
    Audit(AuditArgs),
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct AuditArgs {
    /// Field files in sequence order (repeatable).
    #[arg(long = "field", required = true)]
    pub fields: Vec<PathBuf>,
    /// Boundary arc JSON `{"p": .., "q": .., "kappa": .., "side": "Left"}`, domain on its left.
    #[arg(long)]
    pub arc: Option<PathBuf>,
    #[arg(long = "ratio-threshold", default_value_t = 0.9)]
    pub ratio_threshold: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ClosedFlux {
    pub line_term: f64,
    pub area_term: f64,
    pub area: f64,
    pub length: f64,
    /// `|line_term - area_term| / |area_term|`.
    pub relative_gap: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AuditReport {
    pub global: Global,
    pub config: AuditArgs,
    pub closed: Vec<ClosedFlux>,
    pub audit: Option<CurvatureAudit>,
}

pub fn run(cmd: FluxCmd, global: &Global, out: &OutDir) -> Result<bool> {
    match cmd {
        FluxCmd::Audit(args) => audit(args, global, out),
    }
}

fn audit(args: AuditArgs, global: &Global, out: &OutDir) -> Result<bool> {
    let seq = args
        .fields
        .iter()
        .map(|p| Ok(parse_mesh_file(&read_to_string(p)?)?.into_field()?))
        .collect::<Result<Vec<_>>>()?;
    let mut closed = Vec::new();
    for (path, field) in args.fields.iter().zip(&seq) {
        let r = flux(field, &outer_boundary(field), &[])?;
        let gap = (r.line_term - r.area_term).abs() / r.area_term.abs();
        println!(
            "{}: boundary flux {:.6e}, 2H A {:.6e}, relative gap {gap:.3e}",
            path.display(),
            r.line_term,
            r.area_term
        );
        closed.push(ClosedFlux {
            line_term: r.line_term,
            area_term: r.area_term,
            area: r.area,
            length: r.bound,
            relative_gap: gap,
        });
    }
    let audit = match &args.arc {
        Some(path) => {
            let arc: CurvatureArc = serde_json::from_str(&read_to_string(path)?)
                .map_err(|e| CliError::Usage(format!("malformed arc JSON: {e}")))?;
            let a = audit_with(
                &seq,
                &arc,
                &GradientSchedule::default(),
                global.tol.unwrap_or(0.05),
                args.ratio_threshold,
            )?;
            println!(
                "audit: {:?}, sign {}, fitted kappa {}, expected {:.6}, flux ratios {:?}",
                a.verdict,
                a.divergence_sign,
                a.fitted_kappa.map_or("-".into(), |k| format!("{k:.6}")),
                a.expected_kappa,
                a.flux_ratios
            );
            Some(a)
        }
        None => None,
    };
    out.write_json(
        "flux_report.json",
        &AuditReport {
            global: global.clone(),
            config: args,
            closed,
            audit,
        },
    )?;
    Ok(true)
}
