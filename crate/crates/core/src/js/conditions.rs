//! Truncated lengths and areas, and the solvability conditions built from them.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::hyperbolic::{
    arc_length, region_area_detailed, CurvatureArc, Horocycle, ModelPoint, TruncationFamily,
};

use super::domain::{validate_admissibility, Admissibility, EdgeClass, HPolygon, JsDomain};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JsQuantities {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub area_tilde: f64,
    /// Ideal vertices of the polygon whose horodisk piece has infinite area.
    pub infinite_pieces: usize,
}

/// Truncated lengths of the A edges, B edges and all edges of `poly`, and the
/// truncated area of the region it bounds (finite horodisk pieces kept).
pub fn js_quantities(
    dom: &JsDomain,
    poly: &HPolygon,
    trunc: &TruncationFamily,
) -> Result<JsQuantities> {
    let mut q = JsQuantities {
        alpha: 0.0,
        beta: 0.0,
        gamma: 0.0,
        area_tilde: 0.0,
        infinite_pieces: 0,
    };
    for (arc, src) in poly.edges.iter().zip(&poly.domain_edges) {
        let len = arc_length(arc, Some(trunc))?;
        q.gamma += len;
        match src.map(|k| dom.edges[k].class) {
            Some(EdgeClass::A) => q.alpha += len,
            Some(EdgeClass::B) => q.beta += len,
            _ => {}
        }
    }
    let (area, cusps) = region_area_detailed(&poly.edges, Some(trunc))?;
    q.area_tilde = area;
    q.infinite_pieces = cusps.iter().filter(|c| !c.finite_piece).count();
    Ok(q)
}

/// The whole boundary as a polygon, when every edge is an A or B edge.
pub fn boundary_polygon_of(dom: &JsDomain) -> Result<Option<HPolygon>> {
    if dom
        .edges
        .iter()
        .any(|e| !matches!(e.class, EdgeClass::A | EdgeClass::B))
    {
        return Ok(None);
    }
    let edges: Vec<CurvatureArc> = (0..dom.edges.len())
        .map(|k| dom.edge_arc(k).map(|a| a.expect("A or B edge")))
        .collect::<Result<_>>()?;
    Ok(Some(HPolygon {
        edges,
        vertex_indices: dom.edges.iter().map(|e| e.from).collect(),
        domain_edges: (0..dom.edges.len()).map(Some).collect(),
    }))
}

/// Equal horocycles at the ideal vertices of the domain, halved until they are
/// pairwise disjoint and miss every bounded edge.
pub fn default_truncation(dom: &JsDomain) -> Result<TruncationFamily> {
    dom.validate()?;
    let ideal: Vec<ModelPoint> = dom.vertices.iter().copied().filter(|v| v.ideal).collect();
    let bounded: Vec<CurvatureArc> = (0..dom.edges.len())
        .filter_map(|k| dom.edge_arc(k).ok().flatten())
        .collect();
    let mut size: f64 = 0.2;
    loop {
        let horos = ideal
            .iter()
            .map(|p| Horocycle::new(*p, size))
            .collect::<Result<Vec<_>>>()?;
        match TruncationFamily::new(horos, &bounded) {
            Ok(f) => return Ok(f),
            Err(_) if size > 1e-6 => size *= 0.5,
            Err(e) => return Err(e),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerimeterCheck {
    pub alpha: f64,
    pub beta: f64,
    pub area_tilde: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs - rhs` at the given horocycles.
    pub raw_residual: f64,
    /// `lhs - rhs` after adjusting the horocycle sizes.
    pub optimized_residual: f64,
    pub optimized_family: TruncationFamily,
    pub tol: f64,
    pub pass: bool,
}

impl PerimeterCheck {
    pub fn recomputed_pass(&self) -> bool {
        self.optimized_residual.abs() <= self.tol
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolygonCheck {
    pub vertex_indices: Vec<usize>,
    pub quantities: JsQuantities,
    /// `2 alpha` against `gamma + 2 H A~`.
    pub lhs_alpha: f64,
    pub rhs_alpha: f64,
    /// `2 beta` against `gamma - 2 H A~`.
    pub lhs_beta: f64,
    pub rhs_beta: f64,
    pub margin_alpha: f64,
    pub margin_beta: f64,
    pub pass_alpha: bool,
    pub pass_beta: bool,
}

fn strictly_less(lhs: f64, rhs: f64) -> bool {
    lhs < rhs - 1e-9 * (1.0 + rhs.abs())
}

impl PolygonCheck {
    fn new(h: f64, vertex_indices: Vec<usize>, q: JsQuantities) -> PolygonCheck {
        let lhs_alpha = 2.0 * q.alpha;
        let rhs_alpha = q.gamma + 2.0 * h * q.area_tilde;
        let lhs_beta = 2.0 * q.beta;
        let rhs_beta = q.gamma - 2.0 * h * q.area_tilde;
        PolygonCheck {
            vertex_indices,
            quantities: q,
            lhs_alpha,
            rhs_alpha,
            lhs_beta,
            rhs_beta,
            margin_alpha: rhs_alpha - lhs_alpha,
            margin_beta: rhs_beta - lhs_beta,
            pass_alpha: strictly_less(lhs_alpha, rhs_alpha),
            pass_beta: strictly_less(lhs_beta, rhs_beta),
        }
    }

    pub fn recomputed_pass(&self) -> bool {
        strictly_less(self.lhs_alpha, self.rhs_alpha) && strictly_less(self.lhs_beta, self.rhs_beta)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsReport {
    pub admissibility: Admissibility,
    /// Present when the domain has neither C nor D edges.
    pub perimeter_check: Option<PerimeterCheck>,
    pub polygon_checks: Vec<PolygonCheck>,
    pub horocycle_family: TruncationFamily,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckOptions {
    /// Tolerance of the perimeter equality.
    pub tol_eq: f64,
    pub max_newton: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            tol_eq: 1e-6,
            max_newton: 40,
        }
    }
}

fn perimeter_residual(
    dom: &JsDomain,
    boundary: &HPolygon,
    trunc: &TruncationFamily,
) -> Result<(JsQuantities, f64)> {
    let q = js_quantities(dom, boundary, trunc)?;
    Ok((q, q.alpha - q.beta - 2.0 * dom.h * q.area_tilde))
}

fn family_with_sizes(
    dom: &JsDomain,
    base: &TruncationFamily,
    log_sizes: &[f64],
) -> Option<TruncationFamily> {
    let bounded: Vec<CurvatureArc> = (0..dom.edges.len())
        .filter_map(|k| dom.edge_arc(k).ok().flatten())
        .collect();
    let horos: Option<Vec<Horocycle>> = base
        .horocycles
        .iter()
        .zip(log_sizes)
        .map(|(h, s)| Horocycle::new(h.ideal_point, s.exp()).ok())
        .collect();
    TruncationFamily::new(horos?, &bounded).ok()
}

/// Minimum-norm Newton steps on the log sizes of the horocycles to drive the
/// perimeter residual to zero. The sizes stay admissible (disjoint, away from
/// bounded edges); a vanishing gradient ends the search.
fn optimize_family(
    dom: &JsDomain,
    boundary: &HPolygon,
    start: &TruncationFamily,
    opts: &CheckOptions,
) -> Result<(TruncationFamily, f64)> {
    let mut logs: Vec<f64> = start.horocycles.iter().map(|h| h.size.ln()).collect();
    let mut family = start.clone();
    let (_, mut r) = perimeter_residual(dom, boundary, &family)?;
    for _ in 0..opts.max_newton {
        if r.abs() <= 1e-13 {
            break;
        }
        let step = 1e-5;
        let mut grad = vec![0.0; logs.len()];
        for k in 0..logs.len() {
            let mut trial = logs.clone();
            trial[k] -= step;
            // shrink direction only: smaller horocycles stay admissible
            let Some(f) = family_with_sizes(dom, start, &trial) else {
                continue;
            };
            let (_, rk) = perimeter_residual(dom, boundary, &f)?;
            grad[k] = (r - rk) / step;
        }
        let g2: f64 = grad.iter().map(|g| g * g).sum();
        if g2 < 1e-20 {
            break;
        }
        let mut damping = 1.0;
        let mut improved = false;
        while damping > 1e-6 {
            let trial: Vec<f64> = logs
                .iter()
                .zip(&grad)
                .map(|(l, g)| l - damping * r * g / g2)
                .collect();
            if let Some(f) = family_with_sizes(dom, start, &trial) {
                let (_, rt) = perimeter_residual(dom, boundary, &f)?;
                if rt.abs() < r.abs() {
                    logs = trial;
                    family = f;
                    r = rt;
                    improved = true;
                    break;
                }
            }
            damping *= 0.5;
        }
        if !improved {
            break;
        }
    }
    Ok((family, r))
}

/// Admissibility, the perimeter equality (when there are no C or D edges) and
/// both strict inequalities for every polygon (other than the boundary itself
/// when the equality applies).
pub fn check_conditions(
    dom: &JsDomain,
    trunc: &TruncationFamily,
    polys: &[HPolygon],
    opts: &CheckOptions,
) -> Result<JsReport> {
    let admissibility = validate_admissibility(dom)?;
    let mut perimeter_check = None;
    if !dom.has_class(EdgeClass::C) && !dom.has_class(EdgeClass::D) {
        if let Some(boundary) = boundary_polygon_of(dom)? {
            let (q, raw) = perimeter_residual(dom, &boundary, trunc)?;
            let (optimized_family, optimized) = optimize_family(dom, &boundary, trunc, opts)?;
            let pc = PerimeterCheck {
                alpha: q.alpha,
                beta: q.beta,
                area_tilde: q.area_tilde,
                lhs: q.alpha,
                rhs: q.beta + 2.0 * dom.h * q.area_tilde,
                raw_residual: raw,
                optimized_residual: optimized,
                optimized_family,
                tol: opts.tol_eq,
                pass: false,
            };
            perimeter_check = Some(PerimeterCheck {
                pass: pc.recomputed_pass(),
                ..pc
            });
        }
    }
    // the boundary itself is held to the equality instead when it is all A and B
    let skip_boundary = perimeter_check.is_some();
    let mut polygon_checks = Vec::new();
    for p in polys
        .iter()
        .filter(|p| !(skip_boundary && p.is_boundary_of(dom)))
    {
        let q = js_quantities(dom, p, trunc)?;
        polygon_checks.push(PolygonCheck::new(dom.h, p.vertex_indices.clone(), q));
    }
    let pass = admissibility.admissible
        && perimeter_check.as_ref().is_none_or(|c| c.pass)
        && polygon_checks.iter().all(|c| c.pass_alpha && c.pass_beta);
    Ok(JsReport {
        admissibility,
        perimeter_check,
        polygon_checks,
        horocycle_family: trunc.clone(),
        pass,
    })
}
