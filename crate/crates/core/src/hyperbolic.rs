//! Hyperbolic plane geometry in the Poincare disk and upper half-plane charts.
//!
//! Computations run in the disk chart. A constant-curvature curve there is a
//! Euclidean circle or line; it is stored as a normalized generalized circle
//! `F(z) = alpha |z|^2 - 2 Re(conj(beta) z) + gamma` with `|beta|^2 - alpha gamma = 1`,
//! whose geodesic curvature toward `{F < 0}` is `(alpha - gamma) / 2`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, Tolerance};

/// Default tolerance for geometric equality tests.
pub const GEOM_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Chart {
    Disk,
    HalfPlane,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelPoint {
    pub chart: Chart,
    pub x: f64,
    pub y: f64,
    #[serde(default)]
    pub ideal: bool,
}

impl ModelPoint {
    pub fn disk(x: f64, y: f64) -> Self {
        ModelPoint {
            chart: Chart::Disk,
            x,
            y,
            ideal: false,
        }
    }

    pub fn half_plane(x: f64, y: f64) -> Self {
        ModelPoint {
            chart: Chart::HalfPlane,
            x,
            y,
            ideal: false,
        }
    }

    /// Ideal point of the unit circle at angle `theta`.
    pub fn ideal_disk(theta: f64) -> Self {
        ModelPoint {
            chart: Chart::Disk,
            x: theta.cos(),
            y: theta.sin(),
            ideal: true,
        }
    }

    /// Ideal point `(x, 0)` of the half-plane.
    pub fn ideal_half_plane(x: f64) -> Self {
        ModelPoint {
            chart: Chart::HalfPlane,
            x,
            y: 0.0,
            ideal: true,
        }
    }

    /// The half-plane point at infinity (not representable in JSON; use the disk chart there).
    pub fn infinity() -> Self {
        ModelPoint {
            chart: Chart::HalfPlane,
            x: 0.0,
            y: f64::INFINITY,
            ideal: true,
        }
    }

    pub fn from_disk(z: C64, ideal: bool) -> Self {
        ModelPoint {
            chart: Chart::Disk,
            x: z.re,
            y: z.im,
            ideal,
        }
    }

    pub fn z(&self) -> C64 {
        C64::new(self.x, self.y)
    }

    /// Coordinates in the disk chart.
    pub fn to_disk(&self) -> C64 {
        match self.chart {
            Chart::Disk => self.z(),
            Chart::HalfPlane => {
                if self.y.is_infinite() {
                    C64::new(1.0, 0.0)
                } else {
                    cayley(self.z())
                }
            }
        }
    }

    /// The same point expressed in `chart`.
    pub fn to_chart(&self, chart: Chart) -> Result<ModelPoint> {
        if chart == self.chart {
            return Ok(*self);
        }
        match chart {
            Chart::Disk => Ok(ModelPoint::from_disk(self.to_disk(), self.ideal)),
            Chart::HalfPlane => {
                let w = self.z();
                if (w - C64::new(1.0, 0.0)).norm() < GEOM_EPS {
                    if self.ideal {
                        return Ok(ModelPoint::infinity());
                    }
                    return Err(Error::SingularPoint);
                }
                let z = cayley_inv(w);
                Ok(ModelPoint {
                    chart: Chart::HalfPlane,
                    x: z.re,
                    y: if self.ideal { 0.0 } else { z.im },
                    ideal: self.ideal,
                })
            }
        }
    }

    pub fn is_interior(&self) -> bool {
        if self.ideal {
            return false;
        }
        match self.chart {
            Chart::Disk => self.x * self.x + self.y * self.y < 1.0,
            Chart::HalfPlane => self.y > 0.0 && self.y.is_finite(),
        }
    }

    /// Conformal factor of the chart metric at this point.
    pub fn conformal_factor(&self) -> f64 {
        match self.chart {
            Chart::Disk => 2.0 / (1.0 - self.x * self.x - self.y * self.y),
            Chart::HalfPlane => 1.0 / self.y,
        }
    }
}

/// Upper half-plane to disk, `(z - i)/(z + i)`.
pub fn cayley(z: C64) -> C64 {
    let i = C64::new(0.0, 1.0);
    (z - i) / (z + i)
}

/// Disk to upper half-plane, `i (1 + w)/(1 - w)`.
pub fn cayley_inv(w: C64) -> C64 {
    let i = C64::new(0.0, 1.0);
    i * (C64::new(1.0, 0.0) + w) / (C64::new(1.0, 0.0) - w)
}

/// Hyperbolic distance between two interior points of the same chart.
pub fn hyp_distance(p: &ModelPoint, q: &ModelPoint) -> Result<f64> {
    if p.chart != q.chart {
        return Err(Error::ChartMismatch);
    }
    if !p.is_interior() || !q.is_interior() {
        return Err(Error::IdealPoint);
    }
    Ok(match p.chart {
        Chart::Disk => disk_distance(p.z(), q.z()),
        Chart::HalfPlane => {
            let chord = (p.z() - q.z()).norm();
            2.0 * (chord / (2.0 * (p.y * q.y).sqrt())).asinh()
        }
    })
}

/// Distance in the disk chart, `2 artanh(|p - q| / |1 - conj(p) q|)`.
pub fn disk_distance(p: C64, q: C64) -> f64 {
    let num = (p - q).norm();
    let den = (C64::new(1.0, 0.0) - p.conj() * q).norm();
    2.0 * (num / den).atanh()
}

/// Busemann function of the ideal point `zeta`, zero at the disk origin.
pub fn busemann(zeta: C64, z: C64) -> f64 {
    ((zeta - z).norm_sqr() / (1.0 - z.norm_sqr())).ln()
}

fn cross(a: C64, b: C64) -> f64 {
    a.re * b.im - a.im * b.re
}

fn dot(a: C64, b: C64) -> f64 {
    a.re * b.re + a.im * b.im
}

/// sin(x)/x with the removable singularity filled in.
fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Normalized generalized circle in the disk chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenCircle {
    pub alpha: f64,
    pub beta: C64,
    pub gamma: f64,
}

impl GenCircle {
    pub fn eval(&self, z: C64) -> f64 {
        self.alpha * z.norm_sqr() - 2.0 * dot(self.beta, z) + self.gamma
    }

    /// Geodesic curvature with respect to the normal pointing into `{F < 0}`.
    pub fn curvature(&self) -> f64 {
        0.5 * (self.alpha - self.gamma)
    }

    /// Unit normal pointing into `{F < 0}` at a point of the curve.
    pub fn normal(&self, z: C64) -> C64 {
        let g = (z * self.alpha - self.beta) * 2.0;
        -g / g.norm()
    }

    /// Intersection with the unit circle.
    pub fn ideal_points(&self) -> Vec<C64> {
        let m = 0.5 * (self.alpha + self.gamma);
        let b = self.beta.norm();
        if b == 0.0 {
            return Vec::new();
        }
        let ratio = m / b;
        if ratio.abs() > 1.0 + 1e-12 {
            return Vec::new();
        }
        let phi = self.beta.arg();
        let delta = ratio.clamp(-1.0, 1.0).acos();
        if delta < 1e-9 {
            vec![C64::from_polar(1.0, phi)]
        } else {
            vec![
                C64::from_polar(1.0, phi + delta),
                C64::from_polar(1.0, phi - delta),
            ]
        }
    }
}

/// Which normal of the direction of travel `p -> q` an arc's curvature is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Left => 1.0,
            Side::Right => -1.0,
        }
    }

    pub fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// Arc of constant geodesic curvature. `kappa` is measured against the
/// co-normal selected by `side` relative to the direction of travel `p -> q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureArc {
    pub p: ModelPoint,
    pub q: ModelPoint,
    pub kappa: f64,
    pub side: Side,
}

/// Euclidean description of an arc in the disk chart: chord endpoints,
/// signed Euclidean curvature with respect to the left normal, and the
/// signed turning angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcShape {
    pub p: C64,
    pub q: C64,
    pub curv: f64,
    pub sweep: f64,
    pub circle: GenCircle,
}

impl ArcShape {
    /// Euclidean arclength.
    pub fn length(&self) -> f64 {
        let chord = (self.q - self.p).norm();
        if self.curv.abs() < 1e-300 {
            return chord;
        }
        (self.sweep / self.curv).abs()
    }

    fn initial_direction(&self) -> C64 {
        let d = self.q - self.p;
        let u = d / d.norm();
        u * C64::from_polar(1.0, -0.5 * self.sweep)
    }

    /// Point at Euclidean arclength fraction `t` in `[0, 1]`.
    pub fn point(&self, t: f64) -> C64 {
        if t <= 0.0 {
            return self.p;
        }
        if t >= 1.0 {
            return self.q;
        }
        let s = t * self.length();
        let ks = self.curv * s;
        let local = C64::new(s * sinc(ks), s * (0.5 * ks).sin() * sinc(0.5 * ks));
        self.p + self.initial_direction() * local
    }

    /// Unit tangent at fraction `t`.
    pub fn tangent(&self, t: f64) -> C64 {
        let s = t * self.length();
        self.initial_direction() * C64::from_polar(1.0, self.curv * s)
    }

    /// Signed turning angle from `p` to a point `z` of the underlying curve,
    /// following the direction of travel.
    pub fn sweep_to(&self, z: C64) -> f64 {
        if self.curv.abs() < 1e-300 {
            let d = self.q - self.p;
            return dot(z - self.p, d) / d.norm_sqr() * self.sweep;
        }
        let chord = (z - self.p).norm();
        let half = (0.5 * chord * self.curv.abs()).min(1.0).asin();
        // centre lies to the left of travel when curv > 0
        let center_dir = self.circle.beta - self.p * self.circle.alpha;
        let center_dir = if self.circle.alpha < 0.0 {
            -center_dir
        } else {
            center_dir
        };
        let left = cross(z - self.p, center_dir) > 0.0;
        let minor = if self.curv > 0.0 { left } else { !left };
        let mag = if minor {
            2.0 * half
        } else {
            2.0 * PI - 2.0 * half
        };
        mag * self.curv.signum()
    }

    /// Fraction along the arc of a point on its curve.
    pub fn fraction_of(&self, z: C64) -> f64 {
        if self.curv.abs() < 1e-300 {
            let d = self.q - self.p;
            return dot(z - self.p, d) / d.norm_sqr();
        }
        self.sweep_to(z) / self.sweep
    }
}

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn solve3(m: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let d = det3(m);
    if d.abs() < 1e-300 {
        return None;
    }
    let mut out = [0.0; 3];
    for (k, slot) in out.iter_mut().enumerate() {
        let mut mk = m;
        for r in 0..3 {
            mk[r][k] = b[r];
        }
        *slot = det3(mk) / d;
    }
    Some(out)
}

/// Generalized circles through `p` and `q` with curvature `kappa` toward `{F < 0}`.
fn circles_through(p: C64, q: C64, kappa: f64) -> Vec<GenCircle> {
    let rows = [
        [p.norm_sqr(), -2.0 * p.re, -2.0 * p.im, 1.0],
        [q.norm_sqr(), -2.0 * q.re, -2.0 * q.im, 1.0],
        [1.0, 0.0, 0.0, -1.0],
    ];
    let rhs = [0.0, 0.0, 2.0 * kappa];
    let mut kernel = [0.0; 4];
    for (j, slot) in kernel.iter_mut().enumerate() {
        let mut minor = [[0.0; 3]; 3];
        for r in 0..3 {
            let mut c = 0;
            for col in 0..4 {
                if col != j {
                    minor[r][c] = rows[r][col];
                    c += 1;
                }
            }
        }
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        *slot = sign * det3(minor);
    }
    let mut gram = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            gram[a][b] = (0..4).map(|k| rows[a][k] * rows[b][k]).sum();
        }
    }
    let Some(y) = solve3(gram, rhs) else {
        return Vec::new();
    };
    let base: Vec<f64> = (0..4)
        .map(|k| (0..3).map(|r| rows[r][k] * y[r]).sum())
        .collect();
    let quad = |u: &[f64], v: &[f64]| u[1] * v[1] + u[2] * v[2] - 0.5 * (u[0] * v[3] + u[3] * v[0]);
    let a2 = quad(&kernel, &kernel);
    let a1 = 2.0 * quad(&base, &kernel);
    let a0 = quad(&base, &base) - 1.0;
    let mut roots = Vec::new();
    let scale = a2.abs().max(a1.abs()).max(1e-300);
    if a2.abs() < 1e-14 * scale {
        if a1.abs() > 0.0 {
            roots.push(-a0 / a1);
        }
    } else {
        let disc = a1 * a1 - 4.0 * a2 * a0;
        if disc < -1e-12 * scale * scale {
            return Vec::new();
        }
        let sq = disc.max(0.0).sqrt();
        let r1 = if a1 >= 0.0 {
            (-a1 - sq) / (2.0 * a2)
        } else {
            (-a1 + sq) / (2.0 * a2)
        };
        roots.push(r1);
        if sq > 0.0 && r1 != 0.0 {
            roots.push(a0 / (a2 * r1));
        } else if sq > 0.0 {
            roots.push(-a1 / a2);
        }
    }
    roots
        .into_iter()
        .map(|s| {
            let v: Vec<f64> = (0..4).map(|k| base[k] + s * kernel[k]).collect();
            GenCircle {
                alpha: v[0],
                beta: C64::new(v[1], v[2]),
                gamma: v[3],
            }
        })
        .collect()
}

fn shape_for(p: C64, q: C64, circle: GenCircle, side: Side) -> ArcShape {
    let curv = side.sign() * circle.alpha;
    let chord = (q - p).norm();
    let sweep = if curv.abs() < 1e-300 {
        0.0
    } else {
        let half = (0.5 * chord * curv.abs()).min(1.0).asin();
        let center_dir = if circle.alpha < 0.0 {
            -(circle.beta - p * circle.alpha)
        } else {
            circle.beta - p * circle.alpha
        };
        let left = cross(q - p, center_dir) > 0.0;
        let minor = if curv > 0.0 { left } else { !left };
        let mag = if minor {
            2.0 * half
        } else {
            2.0 * PI - 2.0 * half
        };
        mag * curv.signum()
    };
    ArcShape {
        p,
        q,
        curv,
        sweep,
        circle,
    }
}

/// Whether the route leaves the closed disk between its endpoints.
fn route_stays_inside(shape: &ArcShape) -> bool {
    for w in shape.circle.ideal_points() {
        if (w - shape.p).norm() < 1e-9 || (w - shape.q).norm() < 1e-9 {
            continue;
        }
        let f = shape.fraction_of(w);
        if f > 1e-12 && f < 1.0 - 1e-12 {
            return false;
        }
    }
    let mid = shape.point(0.5);
    mid.norm_sqr() <= 1.0 + 1e-12
}

/// Constant-curvature arc from `p` to `q`. When two arcs qualify (circles,
/// `|kappa| > 1`) the hyperbolically shorter one is returned.
pub fn arc_through(p: ModelPoint, q: ModelPoint, kappa: f64, side: Side) -> Result<CurvatureArc> {
    let arc = CurvatureArc { p, q, kappa, side };
    arc.shape().map(|_| arc)
}

impl CurvatureArc {
    /// Solve for the Euclidean geometry of the arc in the disk chart.
    pub fn shape(&self) -> Result<ArcShape> {
        let p = self.p.to_disk();
        let q = self.q.to_disk();
        if (p - q).norm() < GEOM_EPS {
            return Err(Error::NoSuchArc { kappa: self.kappa });
        }
        let any_ideal = self.p.ideal || self.q.ideal;
        if any_ideal && self.kappa.abs() > 1.0 + 1e-12 {
            return Err(Error::NoSuchArc { kappa: self.kappa });
        }
        if self.p.ideal && self.q.ideal && (self.kappa.abs() - 1.0).abs() <= 1e-12 {
            return Err(Error::NoSuchArc { kappa: self.kappa });
        }
        let mut best: Option<(f64, ArcShape)> = None;
        for circle in circles_through(p, q, self.kappa) {
            let shape = shape_for(p, q, circle, self.side);
            if !route_stays_inside(&shape) {
                continue;
            }
            let key = shape.sweep.abs();
            if best.as_ref().is_none_or(|(k, _)| key < *k) {
                best = Some((key, shape));
            }
        }
        best.map(|(_, s)| s)
            .ok_or(Error::NoSuchArc { kappa: self.kappa })
    }

    /// Same point set, opposite co-normal: curvature changes sign.
    pub fn flipped(&self) -> CurvatureArc {
        CurvatureArc {
            p: self.p,
            q: self.q,
            kappa: -self.kappa,
            side: self.side.flip(),
        }
    }

    /// Same point set and co-normal, traversed from `q` to `p`.
    pub fn reversed(&self) -> CurvatureArc {
        CurvatureArc {
            p: self.q,
            q: self.p,
            kappa: self.kappa,
            side: self.side.flip(),
        }
    }

    /// Curvature measured against the left normal of travel.
    pub fn kappa_left(&self) -> f64 {
        self.side.sign() * self.kappa
    }

    pub fn has_ideal_endpoint(&self) -> bool {
        self.p.ideal || self.q.ideal
    }

    /// Evenly spaced (in Euclidean arclength) points in the disk chart.
    pub fn sample(&self, n: usize) -> Result<Vec<C64>> {
        let shape = self.shape()?;
        Ok((0..n)
            .map(|k| shape.point(k as f64 / (n - 1) as f64))
            .collect())
    }
}

/// Horocycle tangent to the unit circle at `ideal_point`, with Euclidean diameter `size`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Horocycle {
    pub ideal_point: ModelPoint,
    pub size: f64,
}

impl Horocycle {
    pub fn new(ideal_point: ModelPoint, size: f64) -> Result<Horocycle> {
        if !ideal_point.ideal {
            return Err(Error::DomainError);
        }
        if !(size > 0.0 && size < 2.0) {
            return Err(Error::DomainError);
        }
        Ok(Horocycle { ideal_point, size })
    }

    pub fn zeta(&self) -> C64 {
        let z = self.ideal_point.to_disk();
        z / z.norm()
    }

    pub fn center(&self) -> C64 {
        self.zeta() * (1.0 - 0.5 * self.size)
    }

    pub fn radius(&self) -> f64 {
        0.5 * self.size
    }

    pub fn contains(&self, z: C64) -> bool {
        (z - self.center()).norm() < self.radius()
    }

    pub fn circle(&self) -> GenCircle {
        let c = self.center();
        let r = self.radius();
        GenCircle {
            alpha: 1.0 / r,
            beta: c / r,
            gamma: (c.norm_sqr() - r * r) / r,
        }
    }

    pub fn scaled(&self, factor: f64) -> Horocycle {
        Horocycle {
            ideal_point: self.ideal_point,
            size: self.size * factor,
        }
    }
}

/// Horocycles truncating the ideal vertices of a domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationFamily {
    pub horocycles: Vec<Horocycle>,
    pub pairwise_disjoint: bool,
}

impl TruncationFamily {
    /// Builds the family, rejecting overlaps and horocycles touching `bounded_edges`.
    pub fn new(
        horocycles: Vec<Horocycle>,
        bounded_edges: &[CurvatureArc],
    ) -> Result<TruncationFamily> {
        for (i, a) in horocycles.iter().enumerate() {
            for b in horocycles.iter().skip(i + 1) {
                if (a.center() - b.center()).norm() <= a.radius() + b.radius() {
                    return Err(Error::MalformedDomain("horocycles overlap".into()));
                }
            }
        }
        for edge in bounded_edges.iter().filter(|e| !e.has_ideal_endpoint()) {
            let pts = edge.sample(257)?;
            for h in &horocycles {
                if pts.iter().any(|z| h.contains(*z)) {
                    return Err(Error::MalformedDomain(
                        "horocycle meets a bounded edge".into(),
                    ));
                }
            }
        }
        Ok(TruncationFamily {
            horocycles,
            pairwise_disjoint: true,
        })
    }

    /// Family without the bounded-edge check.
    pub fn unchecked(horocycles: Vec<Horocycle>) -> TruncationFamily {
        TruncationFamily {
            horocycles,
            pairwise_disjoint: true,
        }
    }

    pub fn at(&self, ideal: &ModelPoint) -> Option<&Horocycle> {
        let z = ideal.to_disk();
        self.horocycles
            .iter()
            .find(|h| (h.zeta() - z).norm() < 1e-9)
    }

    pub fn scaled(&self, factor: f64) -> TruncationFamily {
        TruncationFamily {
            horocycles: self.horocycles.iter().map(|h| h.scaled(factor)).collect(),
            pairwise_disjoint: self.pairwise_disjoint,
        }
    }
}

/// Where the arc leaves the horodisk at its ideal endpoint, as a fraction.
fn exit_fraction(shape: &ArcShape, horo: &Horocycle, at_start: bool) -> Result<f64> {
    let zeta = if at_start { shape.p } else { shape.q };
    let hc = horo.center();
    let hr = horo.radius();
    // candidate intersection points of two circles (or line and circle)
    let pts = intersect_circles(&shape.circle, &horo.circle());
    let mut best: Option<f64> = None;
    for z in pts {
        if (z - zeta).norm() < 1e-9 {
            continue;
        }
        if ((z - hc).norm() - hr).abs() > 1e-8 {
            continue;
        }
        let f = shape.fraction_of(z);
        if !(-1e-12..=1.0 + 1e-12).contains(&f) {
            continue;
        }
        let f = f.clamp(0.0, 1.0);
        best = Some(match best {
            None => f,
            Some(b) => {
                if at_start {
                    b.min(f)
                } else {
                    b.max(f)
                }
            }
        });
    }
    best.ok_or(Error::InfiniteLength)
}

/// Intersection points of two generalized circles.
pub fn intersect_circles(a: &GenCircle, b: &GenCircle) -> Vec<C64> {
    // subtract to get the radical line, then intersect it with whichever is a true circle
    let (circ, other) = if a.alpha.abs() >= b.alpha.abs() {
        (a, b)
    } else {
        (b, a)
    };
    if circ.alpha.abs() < 1e-300 {
        return Vec::new();
    }
    // radical line: other - (other.alpha / circ.alpha) circ = 0 -> -2<z, beta'> + gamma' = 0
    let k = other.alpha / circ.alpha;
    let beta = other.beta - circ.beta * k;
    let gamma = other.gamma - circ.gamma * k;
    let bn = beta.norm();
    if bn < 1e-300 {
        return Vec::new();
    }
    let n = beta / bn;
    let offset = gamma / (2.0 * bn);
    let c = circ.beta / circ.alpha;
    let r = 1.0 / circ.alpha.abs();
    let dist = offset - dot(c, n);
    let h2 = r * r - dist * dist;
    if h2 < -1e-12 * r * r {
        return Vec::new();
    }
    let foot = c + n * dist;
    let t = C64::new(-n.im, n.re);
    let h = h2.max(0.0).sqrt();
    if h == 0.0 {
        vec![foot]
    } else {
        vec![foot + t * h, foot - t * h]
    }
}

fn quad_tol() -> Tolerance {
    Tolerance::new(1e-13, 1e-12)
}

/// Hyperbolic length of the portion of `shape` between fractions `t0 < t1`.
pub fn shape_length(shape: &ArcShape, t0: f64, t1: f64) -> Result<f64> {
    let el = shape.length();
    integrate(
        |t| {
            let z = shape.point(t);
            2.0 / (1.0 - z.norm_sqr()) * el
        },
        t0,
        t1,
        quad_tol(),
    )
}

/// Fractions bounding the part of the arc outside the endpoint horodisks.
pub fn truncated_range(arc: &CurvatureArc, trunc: Option<&TruncationFamily>) -> Result<(f64, f64)> {
    let shape = arc.shape()?;
    let mut t0 = 0.0;
    let mut t1 = 1.0;
    if arc.p.ideal {
        let h = trunc
            .and_then(|f| f.at(&arc.p))
            .ok_or(Error::InfiniteLength)?;
        t0 = exit_fraction(&shape, h, true)?;
    }
    if arc.q.ideal {
        let h = trunc
            .and_then(|f| f.at(&arc.q))
            .ok_or(Error::InfiniteLength)?;
        t1 = exit_fraction(&shape, h, false)?;
    }
    if t1 <= t0 {
        return Ok((t0, t0));
    }
    Ok((t0, t1))
}

/// Hyperbolic length of the arc outside the horodisks of `trunc`.
pub fn arc_length(arc: &CurvatureArc, trunc: Option<&TruncationFamily>) -> Result<f64> {
    let shape = arc.shape()?;
    let (t0, t1) = truncated_range(arc, trunc)?;
    if t1 <= t0 {
        return Ok(0.0);
    }
    shape_length(&shape, t0, t1)
}

fn signed_area_of(points: &[C64]) -> f64 {
    let n = points.len();
    (0..n)
        .map(|i| cross(points[i], points[(i + 1) % n]))
        .sum::<f64>()
        * 0.5
}

/// Checks endpoint matching and returns +1 for counterclockwise boundaries, -1 otherwise.
pub fn boundary_orientation(boundary: &[CurvatureArc]) -> Result<f64> {
    if boundary.is_empty() {
        return Err(Error::OpenBoundary);
    }
    for i in 0..boundary.len() {
        let a = boundary[i].q.to_disk();
        let b = boundary[(i + 1) % boundary.len()].p.to_disk();
        if (a - b).norm() > 1e-9 {
            return Err(Error::OpenBoundary);
        }
    }
    let mut pts = Vec::new();
    for arc in boundary {
        let s = arc.sample(65)?;
        pts.extend_from_slice(&s[..s.len() - 1]);
    }
    let area = signed_area_of(&pts);
    if area.abs() < 1e-14 {
        return Err(Error::NonFinite("degenerate boundary".into()));
    }
    Ok(area.signum())
}

/// Curvature of each arc with respect to the inward normal of the region it bounds.
pub fn inward_curvatures(boundary: &[CurvatureArc]) -> Result<Vec<f64>> {
    let orient = boundary_orientation(boundary)?;
    Ok(boundary.iter().map(|a| orient * a.kappa_left()).collect())
}

fn turning_angle(incoming: C64, outgoing: C64) -> f64 {
    cross(incoming, outgoing).atan2(dot(incoming, outgoing))
}

/// Vertex classification used in area computations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CuspInfo {
    pub vertex: usize,
    pub finite_piece: bool,
}

/// Hyperbolic area by Gauss-Bonnet. Ideal vertices where the two incident arcs
/// have opposite inward curvature bound a finite cusp and contribute an
/// exterior angle of pi; other ideal vertices have an infinite horodisk piece,
/// which is removed using `trunc` (the truncated area).
pub fn region_area(boundary: &[CurvatureArc], trunc: Option<&TruncationFamily>) -> Result<f64> {
    Ok(region_area_detailed(boundary, trunc)?.0)
}

/// Area together with the per-ideal-vertex cusp classification.
pub fn region_area_detailed(
    boundary: &[CurvatureArc],
    trunc: Option<&TruncationFamily>,
) -> Result<(f64, Vec<CuspInfo>)> {
    let orient = boundary_orientation(boundary)?;
    let n = boundary.len();
    let shapes: Vec<ArcShape> = boundary.iter().map(|a| a.shape()).collect::<Result<_>>()?;
    let kin: Vec<f64> = boundary.iter().map(|a| orient * a.kappa_left()).collect();
    let mut cusps = Vec::new();
    let mut ranges = vec![(0.0, 1.0); n];
    let mut total = -2.0 * PI;
    for v in 0..n {
        // vertex v joins arc v-1 (end) and arc v (start)
        let prev = (v + n - 1) % n;
        let vertex = boundary[v].p;
        if !vertex.ideal {
            let t_in = shapes[prev].tangent(1.0) * orient;
            let t_out = shapes[v].tangent(0.0) * orient;
            total += turning_angle(t_in, t_out);
            continue;
        }
        let finite = (kin[prev] + kin[v]).abs() < 1e-9;
        cusps.push(CuspInfo {
            vertex: v,
            finite_piece: finite,
        });
        if finite {
            total += PI;
            if let Some(f) = trunc {
                if let Some(h) = f.at(&vertex) {
                    // truncated lengths still use the family; the piece is added back
                    ranges[prev].1 = exit_fraction(&shapes[prev], h, false)?;
                    ranges[v].0 = exit_fraction(&shapes[v], h, true)?;
                }
            }
            continue;
        }
        let h = trunc.and_then(|f| f.at(&vertex)).ok_or(Error::NonFinite(
            "infinite horodisk piece without truncation".into(),
        ))?;
        let t_end = exit_fraction(&shapes[prev], h, false)?;
        let t_start = exit_fraction(&shapes[v], h, true)?;
        ranges[prev].1 = t_end;
        ranges[v].0 = t_start;
        let a = shapes[prev].point(t_end);
        let b = shapes[v].point(t_start);
        let horo = horocycle_route(h, a, b);
        // corners: arc -> horocycle -> arc, horocycle curvature -1 toward the region
        let ta_in = shapes[prev].tangent(t_end) * orient;
        let th_start = horo.tangent(0.0) * orient;
        let th_end = horo.tangent(1.0) * orient;
        let tb_out = shapes[v].tangent(t_start) * orient;
        total += turning_angle(ta_in, th_start) + turning_angle(th_end, tb_out);
        total -= shape_length(&horo, 0.0, 1.0)?;
    }
    // pair each cusp range with arcs that were not truncated at a finite cusp
    for (i, shape) in shapes.iter().enumerate() {
        let (t0, t1) = ranges[i];
        let ideal_start = boundary[i].p.ideal && t0 == 0.0;
        let ideal_end = boundary[i].q.ideal && t1 == 1.0;
        if kin[i].abs() < 1e-15 {
            continue;
        }
        if ideal_start || ideal_end {
            // finite cusp without a horocycle: split the divergent integrals symmetrically
            return region_area_detailed(boundary, Some(&default_family(boundary)?));
        }
        total += kin[i] * shape_length(shape, t0, t1)?;
    }
    Ok((total, cusps))
}

/// Route along the horocycle between two of its points avoiding the tangency point.
fn horocycle_route(h: &Horocycle, a: C64, b: C64) -> ArcShape {
    let circle = h.circle();
    let zeta = h.zeta();
    for side in [Side::Left, Side::Right] {
        let shape = shape_for(a, b, circle, side);
        let f = shape.fraction_of(zeta);
        if !(f > 0.0 && f < 1.0) {
            return shape;
        }
    }
    shape_for(a, b, circle, Side::Left)
}

/// Small equal horocycles at every ideal vertex of a boundary.
pub fn default_family(boundary: &[CurvatureArc]) -> Result<TruncationFamily> {
    let ideal: Vec<ModelPoint> = boundary.iter().map(|a| a.p).filter(|p| p.ideal).collect();
    let mut size: f64 = 0.2;
    loop {
        let horos = ideal
            .iter()
            .map(|p| Horocycle::new(*p, size))
            .collect::<Result<Vec<_>>>()?;
        match TruncationFamily::new(horos, boundary) {
            Ok(f) => return Ok(f),
            Err(_) if size > 1e-6 => size *= 0.5,
            Err(e) => return Err(e),
        }
    }
}

/// Area of the horodisk-truncated region by Green's theorem, integrating
/// `P dy` with `P_x = lambda^2` along the truncated boundary. Finite cusps are
/// added back as the hyperbolic length of their horocycle arc.
pub fn region_area_green(boundary: &[CurvatureArc], trunc: &TruncationFamily) -> Result<f64> {
    let orient = boundary_orientation(boundary)?;
    let n = boundary.len();
    let shapes: Vec<ArcShape> = boundary.iter().map(|a| a.shape()).collect::<Result<_>>()?;
    let kin: Vec<f64> = boundary.iter().map(|a| orient * a.kappa_left()).collect();
    let mut pieces: Vec<(ArcShape, f64, f64)> = Vec::new();
    let mut cusp_area = 0.0;
    let mut ranges = vec![(0.0, 1.0); n];
    let mut horos: Vec<(usize, ArcShape)> = Vec::new();
    for v in 0..n {
        let prev = (v + n - 1) % n;
        let vertex = boundary[v].p;
        if !vertex.ideal {
            continue;
        }
        let h = trunc.at(&vertex).ok_or(Error::InfiniteLength)?;
        let t_end = exit_fraction(&shapes[prev], h, false)?;
        let t_start = exit_fraction(&shapes[v], h, true)?;
        ranges[prev].1 = t_end;
        ranges[v].0 = t_start;
        let horo = horocycle_route(h, shapes[prev].point(t_end), shapes[v].point(t_start));
        if (kin[prev] + kin[v]).abs() < 1e-9 {
            cusp_area += shape_length(&horo, 0.0, 1.0)?;
        }
        horos.push((v, horo));
    }
    for v in 0..n {
        let (t0, t1) = ranges[v];
        pieces.push((shapes[v], t0, t1));
        if let Some((_, h)) = horos.iter().find(|(k, _)| *k == (v + 1) % n) {
            pieces.push((*h, 0.0, 1.0));
        }
    }
    let mut total = 0.0;
    for (shape, t0, t1) in pieces {
        total += integrate(
            |t| {
                let z = shape.point(t);
                let dz = shape.tangent(t) * shape.length();
                green_potential(z.re, z.im) * dz.im
            },
            t0,
            t1,
            quad_tol(),
        )?;
    }
    Ok(orient * total + cusp_area)
}

/// `P(x, y) = int_0^x lambda^2(s, y) ds` for the disk metric.
pub(crate) fn green_potential(x: f64, y: f64) -> f64 {
    let a2 = 1.0 - y * y;
    let a = a2.sqrt();
    2.0 * x / (a2 * (a2 - x * x)) + ((a + x) / (a - x)).ln() / (a2 * a)
}

/// Isometries of the hyperbolic plane acting on the base.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BaseIsometry {
    /// Euclidean rotation of the disk about its centre.
    Rotation(f64),
    /// `(x0 + c (x - x0), c y)` in the half-plane; `c > 0`.
    HypTranslation { c: f64, axis: f64 },
    /// `(x + c, y)` in the half-plane.
    ParTranslation(f64),
}

pub fn base_isometry(kind: BaseIsometry, p: &ModelPoint) -> Result<ModelPoint> {
    let native = match kind {
        BaseIsometry::Rotation(_) => Chart::Disk,
        _ => Chart::HalfPlane,
    };
    let src = p.to_chart(native)?;
    let image = match kind {
        BaseIsometry::Rotation(theta) => {
            let z = src.z() * C64::from_polar(1.0, theta);
            ModelPoint::from_disk(z, src.ideal)
        }
        BaseIsometry::HypTranslation { c, axis } => {
            if src.y.is_infinite() {
                src
            } else {
                ModelPoint {
                    x: axis + c * (src.x - axis),
                    y: c * src.y,
                    ..src
                }
            }
        }
        BaseIsometry::ParTranslation(c) => {
            if src.y.is_infinite() {
                src
            } else {
                ModelPoint {
                    x: src.x + c,
                    ..src
                }
            }
        }
    };
    image.to_chart(p.chart)
}

/// Numerical geodesic curvature at fraction `t` from finite differences of
/// the parametrization, relative to the left normal.
pub fn sampled_curvature(shape: &ArcShape, t: f64, h: f64) -> f64 {
    let z0 = shape.point(t - h);
    let z1 = shape.point(t);
    let z2 = shape.point(t + h);
    let d1 = (z2 - z0) / (2.0 * h);
    let d2 = (z2 - z1 * 2.0 + z0) / (h * h);
    let speed = d1.norm();
    let ke = cross(d1, d2) / speed.powi(3);
    let n_left = C64::new(-d1.im, d1.re) / speed;
    0.5 * (1.0 - z1.norm_sqr()) * ke - dot(z1, n_left)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radial_distance() {
        let o = ModelPoint::disk(0.0, 0.0);
        let p = ModelPoint::disk((0.5f64).tanh(), 0.0);
        assert!((hyp_distance(&o, &p).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(hyp_distance(&p, &p).unwrap(), 0.0);
    }

    #[test]
    fn vertical_geodesic_half_plane() {
        let a = ModelPoint::half_plane(0.0, 1.0);
        let b = ModelPoint::half_plane(0.0, std::f64::consts::E);
        assert!((hyp_distance(&a, &b).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn distance_errors() {
        let a = ModelPoint::half_plane(0.0, 1.0);
        let b = ModelPoint::disk(0.0, 0.0);
        assert_eq!(hyp_distance(&a, &b), Err(Error::ChartMismatch));
        assert_eq!(
            hyp_distance(&b, &ModelPoint::ideal_disk(0.3)),
            Err(Error::IdealPoint)
        );
    }

    #[test]
    fn chart_roundtrip() {
        let p = ModelPoint::half_plane(0.3, 2.0);
        let back = p
            .to_chart(Chart::Disk)
            .unwrap()
            .to_chart(Chart::HalfPlane)
            .unwrap();
        assert!((back.x - 0.3).abs() < 1e-14 && (back.y - 2.0).abs() < 1e-14);
        let i = ModelPoint::half_plane(0.0, 1.0).to_disk();
        assert!(i.norm() < 1e-15);
    }

    #[test]
    fn diameter_geodesic() {
        let arc = arc_through(
            ModelPoint::ideal_disk(PI),
            ModelPoint::ideal_disk(0.0),
            0.0,
            Side::Left,
        )
        .unwrap();
        let s = arc.shape().unwrap();
        assert!(s.sweep.abs() < 1e-15);
        assert!(s.point(0.5).norm() < 1e-15);
    }

    #[test]
    fn horocycle_between_ideal_points_rejected() {
        let r = arc_through(
            ModelPoint::ideal_disk(PI),
            ModelPoint::ideal_disk(0.0),
            1.0,
            Side::Left,
        );
        assert!(matches!(r, Err(Error::NoSuchArc { .. })));
    }

    #[test]
    fn hypercycle_curvature_is_constant() {
        for &k in &[0.2, 0.5, 0.9, -0.5] {
            let arc = arc_through(
                ModelPoint::ideal_disk(PI),
                ModelPoint::ideal_disk(0.0),
                k,
                Side::Left,
            )
            .unwrap();
            let s = arc.shape().unwrap();
            for i in 1..20 {
                let t = i as f64 / 20.0;
                assert!(
                    (sampled_curvature(&s, t, 1e-4) - k).abs() < 1e-6,
                    "k={k} t={t}"
                );
            }
        }
    }

    #[test]
    fn truncated_length_monotone_in_size() {
        let arc = arc_through(
            ModelPoint::ideal_disk(PI),
            ModelPoint::ideal_disk(0.0),
            0.0,
            Side::Left,
        )
        .unwrap();
        let fam = |s: f64| {
            TruncationFamily::unchecked(vec![
                Horocycle::new(ModelPoint::ideal_disk(PI), s).unwrap(),
                Horocycle::new(ModelPoint::ideal_disk(0.0), s).unwrap(),
            ])
        };
        let big = arc_length(&arc, Some(&fam(0.2))).unwrap();
        let small = arc_length(&arc, Some(&fam(0.1))).unwrap();
        assert!(small > big);
        assert_eq!(arc_length(&arc, None), Err(Error::InfiniteLength));
    }

    #[test]
    fn ideal_triangle_area() {
        let v: Vec<ModelPoint> = (0..3)
            .map(|k| ModelPoint::ideal_disk(2.0 * PI * k as f64 / 3.0))
            .collect();
        let arcs: Vec<CurvatureArc> = (0..3)
            .map(|k| arc_through(v[k], v[(k + 1) % 3], 0.0, Side::Left).unwrap())
            .collect();
        assert!((region_area(&arcs, None).unwrap() - PI).abs() < 1e-12);
    }
}
