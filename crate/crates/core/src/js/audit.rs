//! Checks that the arcs along which a sequence of solutions diverges carry
//! the curvature forced by the target mean curvature.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperbolic::{cayley, Chart, CurvatureArc};
use crate::solver::divergence::{divergence_line_detect, GradientSchedule, LineFit};
use crate::solver::MeshField;

use super::flux::{boundary_split, flux};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AuditVerdict {
    NoBlowUp,
    Consistent,
    Inconsistent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureAudit {
    pub verdict: AuditVerdict,
    /// +1 when the values near the arc grow, -1 when they decrease, 0 otherwise.
    pub divergence_sign: i8,
    /// Curvature of the fitted divergence line toward the side left of `arc`.
    pub fitted_kappa: Option<f64>,
    /// `divergence_sign * 2H`.
    pub expected_kappa: f64,
    pub fit: Option<LineFit>,
    /// `line_term / length` of the flux across the boundary run on the arc, per field.
    pub flux_ratios: Vec<f64>,
    pub kappa_tol: f64,
    pub ratio_threshold: f64,
}

fn disk_point(chart: Chart, p: [f64; 2]) -> C64 {
    match chart {
        Chart::Disk => C64::new(p[0], p[1]),
        Chart::HalfPlane => cayley(C64::new(p[0], p[1])),
    }
}

/// Divergence detection on `seq` matched against the boundary arc `arc`
/// (domain on its left). The verdict is `Consistent` when the fitted line
/// has curvature `sign * 2H` within `kappa_tol` and the last flux ratio
/// across the arc, times the sign, reaches `ratio_threshold`.
pub fn boundary_curvature_audit(seq: &[MeshField], arc: &CurvatureArc) -> Result<CurvatureAudit> {
    audit_with(seq, arc, &GradientSchedule::default(), 0.05, 0.9)
}

pub fn audit_with(
    seq: &[MeshField],
    arc: &CurvatureArc,
    schedule: &GradientSchedule,
    kappa_tol: f64,
    ratio_threshold: f64,
) -> Result<CurvatureAudit> {
    let last = seq
        .last()
        .ok_or(Error::TooFewSamples { needed: 1, have: 0 })?;
    let shape = arc.shape()?;
    let circle = shape.circle;
    let scale = circle.alpha.abs().max(circle.beta.norm()).max(1.0);
    let chart = last.mesh.chart;
    let on_arc = |p: [f64; 2]| circle.eval(disk_point(chart, p)).abs() < 1e-9 * scale;

    let mut flux_ratios = Vec::with_capacity(seq.len());
    for field in seq {
        let (run, rest) = boundary_split(field, on_arc).ok_or(Error::CurveOutsideMesh)?;
        let report = flux(field, &run, &rest)?;
        flux_ratios.push(report.line_term / report.bound);
    }

    let detection = divergence_line_detect(seq, schedule);
    let samples = arc.sample(33)?;
    let nearest = detection
        .fits
        .iter()
        .enumerate()
        .map(|(k, fit)| {
            let c = C64::new(fit.center[0], fit.center[1]);
            let d = samples
                .iter()
                .map(|z| ((z - c).norm() - fit.radius).abs())
                .sum::<f64>()
                / samples.len() as f64;
            (k, d)
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(k, _)| detection.fits[k].clone());

    let h = last.target_h;
    let Some(fit) = nearest else {
        return Ok(CurvatureAudit {
            verdict: AuditVerdict::NoBlowUp,
            divergence_sign: 0,
            fitted_kappa: None,
            expected_kappa: 0.0,
            fit: None,
            flux_ratios,
            kappa_tol,
            ratio_threshold,
        });
    };

    let first = &seq[0];
    let arc_nodes_trend: f64 = fit
        .nodes
        .iter()
        .map(|&i| last.values[i] - first.values[i])
        .sum();
    let sign: i8 = if arc_nodes_trend > 0.0 {
        1
    } else if arc_nodes_trend < 0.0 {
        -1
    } else {
        0
    };

    // orient the fitted curvature toward the left of the audited arc
    let mid = shape.point(0.5);
    let probe = mid + C64::new(0.0, 1e-3) * shape.tangent(0.5);
    let center = C64::new(fit.center[0], fit.center[1]);
    let toward_left = if (probe - center).norm() < fit.radius {
        fit.kappa
    } else {
        -fit.kappa
    };

    let expected = f64::from(sign) * 2.0 * h;
    let last_ratio = flux_ratios.last().copied().unwrap_or(0.0);
    let consistent = sign != 0
        && (toward_left - expected).abs() <= kappa_tol
        && f64::from(sign) * last_ratio >= ratio_threshold;
    Ok(CurvatureAudit {
        verdict: if consistent {
            AuditVerdict::Consistent
        } else {
            AuditVerdict::Inconsistent
        },
        divergence_sign: sign,
        fitted_kappa: Some(toward_left),
        expected_kappa: expected,
        fit: Some(fit),
        flux_ratios,
        kappa_tol,
        ratio_threshold,
    })
}
