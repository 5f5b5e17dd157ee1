//! Flux of a computed graph across polylines of its domain.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperbolic::{green_potential, Chart};
use crate::killing::unit_flux;
use crate::solver::mesh::chart_distance;
use crate::solver::{recovered_gradients, Locator, MeshField};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluxReport {
    /// Chart polyline the flux is measured across.
    pub curve: Vec<[f64; 2]>,
    /// Polyline from the end of `curve` back to its start; empty for closed curves.
    pub companion: Vec<[f64; 2]>,
    /// `2 H A - (integral over the companion)`.
    pub value: f64,
    pub area_term: f64,
    /// Integral of the outward normal component of the unit flux along `curve`.
    pub line_term: f64,
    pub companion_term: f64,
    /// Hyperbolic length of `curve`.
    pub bound: f64,
    /// Hyperbolic area enclosed by curve and companion.
    pub area: f64,
}

const GAUSS3: [(f64, f64); 3] = [
    (0.112_701_665_379_258_31, 5.0 / 18.0),
    (0.5, 8.0 / 18.0),
    (0.887_298_334_620_741_7, 5.0 / 18.0),
];

struct Sampler<'a> {
    field: &'a MeshField,
    locator: Locator<'a>,
    grads: Vec<[f64; 2]>,
}

impl Sampler<'_> {
    fn gradient(&self, p: [f64; 2]) -> Result<[f64; 2]> {
        let (k, l) = self.locator.locate(p).ok_or(Error::CurveOutsideMesh)?;
        let c = self.field.mesh.cells[k];
        let mut g = [0.0; 2];
        for m in 0..3 {
            g[0] += l[m] * self.grads[c[m]][0];
            g[1] += l[m] * self.grads[c[m]][1];
        }
        Ok(g)
    }
}

/// Green potential with `dP/dx = lambda^2`.
fn potential(chart: Chart, p: [f64; 2]) -> f64 {
    match chart {
        Chart::Disk => green_potential(p[0], p[1]),
        Chart::HalfPlane => p[0] / (p[1] * p[1]),
    }
}

#[derive(Default)]
struct Integrals {
    flux: f64,
    length: f64,
    green: f64,
}

/// Integrates along the open polyline `pts`, with the normal `(dy, -dx) * orient`.
fn integrate_polyline(s: &Sampler, pts: &[[f64; 2]], orient: f64) -> Result<Integrals> {
    let mesh = &s.field.mesh;
    let spec = &s.field.spec;
    let mut out = Integrals::default();
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let d = [b[0] - a[0], b[1] - a[1]];
        let pieces = ((chart_distance(mesh.chart, a, b) / (0.25 * mesh.h)).ceil() as usize).max(1);
        for k in 0..pieces {
            for (g, wt) in GAUSS3 {
                let t = (k as f64 + g) / pieces as f64;
                let p = [a[0] + t * d[0], a[1] + t * d[1]];
                let wt = wt / pieces as f64;
                let c = spec.coeffs_xy(p[0], p[1]);
                let f = unit_flux(&c, s.gradient(p)?);
                out.flux += wt * orient * (f[0] * d[1] - f[1] * d[0]);
                out.length += wt * c.lambda * d[0].hypot(d[1]);
                out.green += wt * potential(mesh.chart, p) * d[1];
            }
        }
    }
    Ok(out)
}

fn signed_area(loop_pts: &[[f64; 2]]) -> f64 {
    let n = loop_pts.len();
    (0..n)
        .map(|i| {
            let (a, b) = (loop_pts[i], loop_pts[(i + 1) % n]);
            a[0] * b[1] - a[1] * b[0]
        })
        .sum::<f64>()
        * 0.5
}

/// Flux of the field across `curve`, closed up by `companion` (which runs from
/// the last point of `curve` back to its first). With an empty companion the
/// curve itself must be closed. Gradients are the recovered nodal gradients,
/// interpolated linearly inside cells.
pub fn flux(field: &MeshField, curve: &[[f64; 2]], companion: &[[f64; 2]]) -> Result<FluxReport> {
    if curve.len() < 2 {
        return Err(Error::MalformedDomain("curve needs two points".into()));
    }
    let mut curve_pts = curve.to_vec();
    let mut comp_pts = companion.to_vec();
    if comp_pts.is_empty() {
        if curve_pts.first() != curve_pts.last() {
            curve_pts.push(curve_pts[0]);
        }
    } else {
        comp_pts.insert(0, *curve_pts.last().expect("nonempty"));
        comp_pts.push(curve_pts[0]);
    }
    let mut loop_pts: Vec<[f64; 2]> = curve_pts[..curve_pts.len() - 1].to_vec();
    if !comp_pts.is_empty() {
        loop_pts.extend_from_slice(&comp_pts[..comp_pts.len() - 1]);
    }
    let orient = signed_area(&loop_pts).signum();
    if orient == 0.0 {
        return Err(Error::MalformedDomain(
            "curve and companion enclose no area".into(),
        ));
    }
    let sampler = Sampler {
        field,
        locator: Locator::new(&field.mesh),
        grads: recovered_gradients(field),
    };
    let on_curve = integrate_polyline(&sampler, &curve_pts, orient)?;
    let on_comp = if comp_pts.is_empty() {
        Integrals::default()
    } else {
        integrate_polyline(&sampler, &comp_pts, orient)?
    };
    let area = orient * (on_curve.green + on_comp.green);
    let area_term = 2.0 * field.target_h * area;
    Ok(FluxReport {
        curve: curve.to_vec(),
        companion: companion.to_vec(),
        value: area_term - on_comp.flux,
        area_term,
        line_term: on_curve.flux,
        companion_term: on_comp.flux,
        bound: on_curve.length,
        area,
    })
}

/// Splits the outer boundary loop of the field's mesh into the longest run of
/// nodes accepted by `select` and the remaining nodes, in loop order.
pub fn boundary_split<F: Fn([f64; 2]) -> bool>(
    field: &MeshField,
    select: F,
) -> Option<(Vec<[f64; 2]>, Vec<[f64; 2]>)> {
    let mesh = &field.mesh;
    let lp = mesh.boundary_loops().into_iter().max_by_key(|l| l.len())?;
    let n = lp.len();
    let inside: Vec<bool> = lp.iter().map(|&i| select(mesh.nodes[i])).collect();
    if inside.iter().all(|&b| b) || !inside.iter().any(|&b| b) {
        return None;
    }
    // start of the longest cyclic run
    let (mut best, mut best_len) = (0, 0);
    for s in 0..n {
        if inside[s] && !inside[(s + n - 1) % n] {
            let len = (0..n).take_while(|&k| inside[(s + k) % n]).count();
            if len > best_len {
                best = s;
                best_len = len;
            }
        }
    }
    if best_len < 2 {
        return None;
    }
    let run = (0..best_len)
        .map(|k| mesh.nodes[lp[(best + k) % n]])
        .collect();
    let rest = (best_len..n)
        .map(|k| mesh.nodes[lp[(best + k) % n]])
        .collect();
    Some((run, rest))
}

/// Closed outer boundary of the mesh as a polyline.
pub fn outer_boundary(field: &MeshField) -> Vec<[f64; 2]> {
    let mesh = &field.mesh;
    mesh.boundary_loops()
        .into_iter()
        .max_by_key(|l| l.len())
        .map(|l| l.iter().map(|&i| mesh.nodes[i]).collect())
        .unwrap_or_default()
}
