//! Jenkins-Serrin domains, admissibility and inscribed H-polygons.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperbolic::{
    arc_through, boundary_orientation, sampled_curvature, CurvatureArc, GenCircle, ModelPoint, Side,
};
use crate::killing::check_subcritical;

/// Role of a boundary piece.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EdgeClass {
    /// Curvature `2H` toward the domain; data `+infinity`.
    A,
    /// Curvature `-2H` toward the domain; data `-infinity`.
    B,
    /// Curvature at least `2|H|`; continuous data.
    C,
    /// Arc of the ideal circle; data bounded above.
    D,
}

/// Piecewise linear data along an edge, in the arclength fraction `t` of the edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundarySamples {
    pub t: Vec<f64>,
    pub values: Vec<f64>,
}

impl BoundarySamples {
    pub fn value(&self, t: f64) -> f64 {
        let k = self.t.partition_point(|&s| s < t);
        if k == 0 {
            return self.values[0];
        }
        if k >= self.t.len() {
            return *self.values.last().expect("nonempty samples");
        }
        let (t0, t1) = (self.t[k - 1], self.t[k]);
        let w = if t1 > t0 { (t - t0) / (t1 - t0) } else { 0.0 };
        self.values[k - 1] * (1.0 - w) + self.values[k] * w
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsEdge {
    pub class: EdgeClass,
    pub from: usize,
    pub to: usize,
    /// Curvature toward the domain; required for C edges, implied for A and B.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<BoundarySamples>,
}

impl JsEdge {
    pub fn new(class: EdgeClass, from: usize, to: usize) -> JsEdge {
        JsEdge {
            class,
            from,
            to,
            kappa: None,
            data: None,
        }
    }

    pub fn with_kappa(mut self, kappa: f64) -> JsEdge {
        self.kappa = Some(kappa);
        self
    }
}

/// Domain bounded by A, B, C and D pieces. Edges are listed counterclockwise,
/// with the domain on their left, each starting where the previous one ends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsDomain {
    #[serde(rename = "H")]
    pub h: f64,
    pub vertices: Vec<ModelPoint>,
    pub edges: Vec<JsEdge>,
}

/// Polygon inscribed in a domain whose edges have curvature `2H` or `-2H`
/// toward its inside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HPolygon {
    /// Counterclockwise edges, curvature measured to the left.
    pub edges: Vec<CurvatureArc>,
    pub vertex_indices: Vec<usize>,
    /// Domain edge that each polygon edge coincides with, if any.
    pub domain_edges: Vec<Option<usize>>,
}

const SAMPLES_PER_EDGE: usize = 1024;
const CONTAIN_TOL: f64 = 1e-7;

fn cross(a: C64, b: C64) -> f64 {
    a.re * b.im - a.im * b.re
}

fn angle_of(z: C64) -> f64 {
    z.im.atan2(z.re).rem_euclid(2.0 * PI)
}

fn segment_distance(p: C64, a: C64, b: C64) -> f64 {
    let d = b - a;
    let l2 = d.norm_sqr();
    if l2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).re * d.re + (p - a).im * d.im) / l2;
    (p - (a + d * t.clamp(0.0, 1.0))).norm()
}

fn segments_cross(a: C64, b: C64, c: C64, d: C64) -> bool {
    let d1 = cross(b - a, c - a);
    let d2 = cross(b - a, d - a);
    let d3 = cross(d - c, a - c);
    let d4 = cross(d - c, b - c);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

/// Reflection in a normalized generalized circle (a geodesic of the disk).
fn reflect(circle: &GenCircle, z: C64) -> C64 {
    if circle.alpha.abs() < 1e-14 {
        let n = circle.beta / circle.beta.norm();
        let dist = (n.re * z.re + n.im * z.im) - 0.5 * circle.gamma / circle.beta.norm();
        return z - n * (2.0 * dist);
    }
    let c = circle.beta / circle.alpha;
    let r2 = 1.0 / (circle.alpha * circle.alpha);
    let w = z - c;
    c + w * (r2 / w.norm_sqr())
}

impl JsDomain {
    /// Inward curvature of an A, B or C edge.
    pub fn edge_kappa(&self, k: usize) -> Option<f64> {
        let e = &self.edges[k];
        match e.class {
            EdgeClass::A => Some(2.0 * self.h),
            EdgeClass::B => Some(-2.0 * self.h),
            EdgeClass::C => e.kappa,
            EdgeClass::D => None,
        }
    }

    /// Arc of an A, B or C edge, `None` for D edges.
    pub fn edge_arc(&self, k: usize) -> Result<Option<CurvatureArc>> {
        let e = &self.edges[k];
        let Some(kappa) = self.edge_kappa(k) else {
            return Ok(None);
        };
        arc_through(
            self.vertices[e.from],
            self.vertices[e.to],
            kappa,
            Side::Left,
        )
        .map(Some)
    }

    pub fn arcs_of(&self, class: EdgeClass) -> Result<Vec<CurvatureArc>> {
        let mut out = Vec::new();
        for k in 0..self.edges.len() {
            if self.edges[k].class == class {
                if let Some(a) = self.edge_arc(k)? {
                    out.push(a);
                }
            }
        }
        Ok(out)
    }

    fn vertex_disk(&self, i: usize) -> C64 {
        self.vertices[i].to_disk()
    }

    /// Points of an edge in the disk chart, `n + 1` samples from start to end.
    pub fn edge_samples(&self, k: usize, n: usize) -> Result<Vec<C64>> {
        let e = &self.edges[k];
        if e.class == EdgeClass::D {
            let a0 = angle_of(self.vertex_disk(e.from));
            let span = (angle_of(self.vertex_disk(e.to)) - a0).rem_euclid(2.0 * PI);
            return Ok((0..=n)
                .map(|j| C64::from_polar(1.0, a0 + span * j as f64 / n as f64))
                .collect());
        }
        let shape = self.edge_arc(k)?.expect("finite-curvature edge").shape()?;
        Ok((0..=n).map(|j| shape.point(j as f64 / n as f64)).collect())
    }

    /// Closed sampled boundary (last point omitted).
    pub fn boundary_polygon(&self) -> Result<Vec<C64>> {
        let mut pts = Vec::new();
        for k in 0..self.edges.len() {
            let s = self.edge_samples(k, SAMPLES_PER_EDGE)?;
            pts.extend_from_slice(&s[..s.len() - 1]);
        }
        Ok(pts)
    }

    pub fn has_class(&self, class: EdgeClass) -> bool {
        self.edges.iter().any(|e| e.class == class)
    }

    /// Structural checks: closure, arc existence, classes, orientation, simplicity.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::MalformedDomain(m.to_string()));
        if check_subcritical(self.h).is_err() {
            return Err(Error::CriticalH);
        }
        let n = self.edges.len();
        if n < 2 {
            return bad("a domain needs at least two edges");
        }
        for (k, e) in self.edges.iter().enumerate() {
            if e.from >= self.vertices.len() || e.to >= self.vertices.len() {
                return bad(&format!("edge {k} refers to a missing vertex"));
            }
            if e.to != self.edges[(k + 1) % n].from {
                return bad(&format!(
                    "edge {k} does not end where edge {} starts",
                    (k + 1) % n
                ));
            }
            if e.class == EdgeClass::D
                && !(self.vertices[e.from].ideal && self.vertices[e.to].ideal)
            {
                return bad(&format!("D edge {k} needs ideal endpoints"));
            }
            if e.class == EdgeClass::C {
                let Some(kappa) = e.kappa else {
                    return bad(&format!("C edge {k} has no curvature"));
                };
                let shape = self.edge_arc(k)?.expect("C edge").shape()?;
                for j in 1..20 {
                    let t = j as f64 / 20.0;
                    if sampled_curvature(&shape, t, 1e-4) < 2.0 * self.h.abs() - 1e-6
                        || kappa < 2.0 * self.h.abs() - 1e-10
                    {
                        return bad(&format!("C edge {k} has curvature below 2|H|"));
                    }
                }
            }
            if let Some(d) = &e.data {
                if d.t.is_empty()
                    || d.t.len() != d.values.len()
                    || d.values.iter().any(|v| !v.is_finite())
                {
                    return bad(&format!("edge {k} has malformed data"));
                }
            }
            if e.class != EdgeClass::D {
                self.edge_arc(k)?;
            }
        }
        let pts = self.boundary_polygon()?;
        let area: f64 = (0..pts.len())
            .map(|i| cross(pts[i], pts[(i + 1) % pts.len()]))
            .sum::<f64>()
            * 0.5;
        if area <= 0.0 {
            return bad("edges must run counterclockwise around the domain");
        }
        // coarse simplicity check on a thinned polygon
        let step = SAMPLES_PER_EDGE / 32;
        let coarse: Vec<C64> = pts.iter().step_by(step).copied().collect();
        let m = coarse.len();
        for i in 0..m {
            for j in i + 2..m {
                if i == 0 && j == m - 1 {
                    continue;
                }
                if segments_cross(
                    coarse[i],
                    coarse[(i + 1) % m],
                    coarse[j],
                    coarse[(j + 1) % m],
                ) {
                    return bad("boundary is not a Jordan curve");
                }
            }
        }
        Ok(())
    }

    /// Whether a disk-chart point lies in the closed domain (up to `tol`).
    pub fn contains(&self, poly: &[C64], z: C64, tol: f64) -> bool {
        let n = poly.len();
        let mut inside = false;
        for i in 0..n {
            let (a, b) = (poly[i], poly[(i + 1) % n]);
            if segment_distance(z, a, b) <= tol {
                return true;
            }
            if (a.im > z.im) != (b.im > z.im) {
                let x = a.re + (z.im - a.im) / (b.im - a.im) * (b.re - a.re);
                if z.re < x {
                    inside = !inside;
                }
            }
        }
        inside
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionResult {
    pub pass: bool,
    pub detail: String,
}

impl ConditionResult {
    fn ok(detail: &str) -> ConditionResult {
        ConditionResult {
            pass: true,
            detail: detail.to_string(),
        }
    }

    fn fail(detail: String) -> ConditionResult {
        ConditionResult {
            pass: false,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Admissibility {
    pub admissible: bool,
    pub a: ConditionResult,
    pub b: ConditionResult,
    pub c: ConditionResult,
    pub d: ConditionResult,
}

fn tangent_at(dom: &JsDomain, k: usize, at_end: bool) -> Result<C64> {
    let shape = dom.edge_arc(k)?.expect("finite-curvature edge").shape()?;
    Ok(shape.tangent(if at_end { 1.0 } else { 0.0 }))
}

/// Conditions (A)-(D). For `H < 0` the roles of A and B are exchanged; `H = 0`
/// follows the `H > 0` statement, where reflected B pieces coincide with B.
pub fn validate_admissibility(dom: &JsDomain) -> Result<Admissibility> {
    dom.validate()?;
    let n = dom.edges.len();
    let poly = dom.boundary_polygon()?;
    let (same_sign, opposite) = if dom.h >= 0.0 {
        (EdgeClass::A, EdgeClass::B)
    } else {
        (EdgeClass::B, EdgeClass::A)
    };

    // (A)
    let mut a =
        ConditionResult::ok("no two A or two B edges meet at a convex corner or ideal vertex");
    for k in 0..n {
        let prev = (k + n - 1) % n;
        let (ep, ek) = (&dom.edges[prev], &dom.edges[k]);
        if ep.class != ek.class || !matches!(ek.class, EdgeClass::A | EdgeClass::B) {
            continue;
        }
        let v = ek.from;
        if dom.vertices[v].ideal {
            a = ConditionResult::fail(format!(
                "edges {prev} and {k} ({:?}) meet at ideal vertex {v}",
                ek.class
            ));
            break;
        }
        let t_in = tangent_at(dom, prev, true)?;
        let t_out = tangent_at(dom, k, false)?;
        let turn = cross(t_in, t_out).atan2(t_in.re * t_out.re + t_in.im * t_out.im);
        if turn > 1e-12 {
            a = ConditionResult::fail(format!(
                "edges {prev} and {k} ({:?}) meet at convex corner {v}",
                ek.class
            ));
            break;
        }
    }

    // (B)
    let mut b = ConditionResult::ok("reflected arcs stay outside the closed domain");
    if dom.h == 0.0 {
        b.detail = "H = 0: reflected arcs coincide with the edges".into();
    } else {
        'edges: for k in 0..n {
            if dom.edges[k].class != opposite {
                continue;
            }
            let arc = dom.edge_arc(k)?.expect("B edge");
            let geodesic = arc_through(arc.p, arc.q, 0.0, Side::Left)?.shape()?.circle;
            let shape = arc.shape()?;
            let m = 256;
            for j in 3..m - 2 {
                let z = reflect(&geodesic, shape.point(j as f64 / m as f64));
                if dom.contains(&poly, z, 1e-9) {
                    b = ConditionResult::fail(format!(
                        "reflection of edge {k} meets the closed domain near ({:.6}, {:.6})",
                        z.re, z.im
                    ));
                    break 'edges;
                }
            }
        }
    }

    let d_edges: Vec<usize> = (0..n)
        .filter(|&k| dom.edges[k].class == EdgeClass::D)
        .collect();

    // (C)
    let mut c = ConditionResult::ok(if d_edges.is_empty() {
        "no ideal arcs"
    } else {
        "no A edge shares an endpoint with an ideal arc"
    });
    for &k in &d_edges {
        let ends = [dom.edges[k].from, dom.edges[k].to];
        if let Some(j) = (0..n).find(|&j| {
            dom.edges[j].class == same_sign
                && (ends.contains(&dom.edges[j].from) || ends.contains(&dom.edges[j].to))
        }) {
            c = ConditionResult::fail(format!(
                "edge {j} ({same_sign:?}) shares an endpoint with ideal arc {k}"
            ));
            break;
        }
    }

    // (D)
    let mut d = ConditionResult::ok(if d_edges.is_empty() {
        "no ideal arcs"
    } else {
        "curvature-2H arcs over the ideal arcs lie in the domain"
    });
    'ideal: for &k in &d_edges {
        let e = &dom.edges[k];
        // traversed back over the ideal arc, curvature -2H toward the piece it cuts off
        let gamma = arc_through(
            dom.vertices[e.to],
            dom.vertices[e.from],
            -2.0 * dom.h,
            Side::Left,
        )?;
        let shape = gamma.shape()?;
        let m = 256;
        for j in 3..m - 2 {
            let z = shape.point(j as f64 / m as f64);
            if !dom.contains(&poly, z, CONTAIN_TOL) {
                d = ConditionResult::fail(format!(
                    "arc over ideal edge {k} leaves the domain near ({:.6}, {:.6})",
                    z.re, z.im
                ));
                break 'ideal;
            }
        }
    }

    Ok(Admissibility {
        admissible: a.pass && b.pass && c.pass && d.pass,
        a,
        b,
        c,
        d,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolygonSet {
    pub polygons: Vec<HPolygon>,
    /// The enumeration stopped at the cap.
    pub truncated: bool,
}

/// Candidate polygon edge from boundary position `i` to `j`.
#[derive(Clone)]
struct Candidate {
    arc: CurvatureArc,
    domain_edge: Option<usize>,
    samples: Vec<C64>,
}

fn arcs_cross(a: &Candidate, b: &Candidate) -> bool {
    let (pa, pb) = (&a.samples, &b.samples);
    let skip = |z: C64, s: &[C64]| (z - s[0]).norm() < 1e-9 || (z - s[s.len() - 1]).norm() < 1e-9;
    for i in 0..pa.len() - 1 {
        for j in 0..pb.len() - 1 {
            // ignore the segments at shared vertices
            let shared = (skip(pa[i], pb) || skip(pa[i + 1], pb))
                && (skip(pb[j], pa) || skip(pb[j + 1], pa));
            if !shared && segments_cross(pa[i], pa[i + 1], pb[j], pb[j + 1]) {
                return true;
            }
        }
    }
    false
}

/// Inscribed H-polygons with vertices among the domain vertices, visited in
/// boundary order. Each edge is either a coinciding non-ideal edge of the domain or
/// an arc of curvature `2H` or `-2H` whose sampled interior lies in the
/// closed domain. Sorted lexicographically by vertex indices, then by edge
/// curvatures; at most `max_count` polygons, on at most `max_vertices` vertices.
pub fn enumerate_polygons(
    dom: &JsDomain,
    max_vertices: usize,
    max_count: usize,
) -> Result<PolygonSet> {
    dom.validate()?;
    let poly = dom.boundary_polygon()?;
    let n = dom.edges.len();
    // boundary order of the vertices
    let order: Vec<usize> = dom.edges.iter().map(|e| e.from).collect();
    let mut kappas = vec![2.0 * dom.h, -2.0 * dom.h];
    if dom.h == 0.0 {
        kappas.truncate(1);
    }
    let sample_count = 48;
    let mut cand: Vec<Vec<Vec<Candidate>>> = vec![vec![Vec::new(); n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let (vi, vj) = (order[i], order[j]);
            for &kappa in &kappas {
                let Ok(arc) = arc_through(dom.vertices[vi], dom.vertices[vj], kappa, Side::Left)
                else {
                    continue;
                };
                let Ok(shape) = arc.shape() else { continue };
                let samples: Vec<C64> = (0..=sample_count)
                    .map(|k| shape.point(k as f64 / sample_count as f64))
                    .collect();
                let domain_edge = (j == (i + 1) % n)
                    .then_some(i)
                    .filter(|&k| dom.edges[k].class != EdgeClass::D)
                    .filter(|&k| {
                        dom.edge_kappa(k)
                            .is_some_and(|kk| (kk - kappa).abs() < 1e-12)
                    });
                if domain_edge.is_none()
                    && !samples[1..sample_count]
                        .iter()
                        .all(|z| dom.contains(&poly, *z, CONTAIN_TOL))
                {
                    continue;
                }
                cand[i][j].push(Candidate {
                    arc,
                    domain_edge,
                    samples,
                });
            }
        }
    }
    let mut found: Vec<(Vec<usize>, Vec<f64>, HPolygon)> = Vec::new();
    let mut truncated = false;
    let max_size = max_vertices.min(n);
    'sizes: for size in 3..=max_size {
        let mut subset: Vec<usize> = (0..size).collect();
        loop {
            // choices per polygon edge
            let lists: Vec<&Vec<Candidate>> = (0..size)
                .map(|e| &cand[subset[e]][subset[(e + 1) % size]])
                .collect();
            if lists.iter().all(|l| !l.is_empty()) {
                let mut pick = vec![0usize; size];
                loop {
                    let chosen: Vec<&Candidate> = (0..size).map(|e| &lists[e][pick[e]]).collect();
                    if let Some(p) = assemble(&subset, &order, &chosen) {
                        if found.len() >= max_count {
                            truncated = true;
                            break 'sizes;
                        }
                        let mut key: Vec<usize> = p.vertex_indices.clone();
                        key.sort_unstable();
                        let ks = chosen.iter().map(|c| c.arc.kappa).collect();
                        found.push((key, ks, p));
                    }
                    // next choice
                    let mut e = 0;
                    while e < size {
                        pick[e] += 1;
                        if pick[e] < lists[e].len() {
                            break;
                        }
                        pick[e] = 0;
                        e += 1;
                    }
                    if e == size {
                        break;
                    }
                }
            }
            // next subset in lexicographic order
            let mut k = size;
            while k > 0 && subset[k - 1] == n - size + k - 1 {
                k -= 1;
            }
            if k == 0 {
                break;
            }
            subset[k - 1] += 1;
            for m in k..size {
                subset[m] = subset[m - 1] + 1;
            }
        }
    }
    found.sort_by(|a, b| {
        a.0.cmp(&b.0).then_with(|| {
            a.1.iter()
                .zip(&b.1)
                .map(|(x, y)| y.total_cmp(x))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    });
    Ok(PolygonSet {
        polygons: found.into_iter().map(|f| f.2).collect(),
        truncated,
    })
}

fn assemble(subset: &[usize], order: &[usize], chosen: &[&Candidate]) -> Option<HPolygon> {
    let size = chosen.len();
    for a in 0..size {
        for b in a + 1..size {
            if arcs_cross(chosen[a], chosen[b]) {
                return None;
            }
        }
    }
    let edges: Vec<CurvatureArc> = chosen.iter().map(|c| c.arc).collect();
    if boundary_orientation(&edges).ok()? <= 0.0 {
        return None;
    }
    Some(HPolygon {
        edges,
        vertex_indices: subset.iter().map(|&i| order[i]).collect(),
        domain_edges: chosen.iter().map(|c| c.domain_edge).collect(),
    })
}

impl HPolygon {
    /// Whether the polygon is the whole boundary of the domain.
    pub fn is_boundary_of(&self, dom: &JsDomain) -> bool {
        self.edges.len() == dom.edges.len() && self.domain_edges.iter().all(|e| e.is_some())
    }
}
