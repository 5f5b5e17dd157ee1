//! Coordinate models of E(-1, tau) as Killing submersions over the hyperbolic plane.
//!
//! Every model is `Omega x R` with metric
//! `lambda^2 (dx^2 + dy^2) + (dt + lambda (a dx + b dy))^2`.
//! Graphs `t = u(x, y)` have upward normal `(d_t - G u) / W` with
//! `G u = (grad u + lambda (a, b)) / lambda^2`, and mean curvature
//! `2H = div (G u / W)`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperbolic::{cayley, cayley_inv, Chart, ModelPoint, GEOM_EPS};
use crate::quadrature::{integrate, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ModelKind {
    HalfSpace,
    Cylinder,
    HCylinder(f64),
}

/// A height function `d` on the base used to re-coordinatize the fibers.
pub trait Shift: Send + Sync {
    fn value(&self, x: f64, y: f64) -> f64;
    fn gradient(&self, x: f64, y: f64) -> [f64; 2];
}

/// Wraps a closure with a central-difference gradient (step `1e-5`).
pub struct NumericShift<F>(pub F);

impl<F: Fn(f64, f64) -> f64 + Send + Sync> Shift for NumericShift<F> {
    fn value(&self, x: f64, y: f64) -> f64 {
        (self.0)(x, y)
    }

    fn gradient(&self, x: f64, y: f64) -> [f64; 2] {
        let h = 1e-5;
        [
            ((self.0)(x + h, y) - (self.0)(x - h, y)) / (2.0 * h),
            ((self.0)(x, y + h) - (self.0)(x, y - h)) / (2.0 * h),
        ]
    }
}

#[derive(Clone)]
pub struct KillingModelSpec {
    pub model: ModelKind,
    pub tau: f64,
    /// Mean curvature of the zero section `{t = 0}`.
    pub reference_h: f64,
    shifts: Vec<Arc<dyn Shift>>,
}

impl fmt::Debug for KillingModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KillingModelSpec")
            .field("model", &self.model)
            .field("tau", &self.tau)
            .field("reference_h", &self.reference_h)
            .field("shifts", &self.shifts.len())
            .finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricCoeffs {
    pub lambda: f64,
    pub a: f64,
    pub b: f64,
}

#[derive(Serialize, Deserialize)]
struct SpecTag {
    model: String,
    tau: f64,
    #[serde(rename = "H", default)]
    h: Option<f64>,
}

impl Serialize for KillingModelSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (model, h) = match self.model {
            ModelKind::HalfSpace => ("HalfSpace", None),
            ModelKind::Cylinder => ("Cylinder", None),
            ModelKind::HCylinder(h) => ("HCylinder", Some(h)),
        };
        SpecTag {
            model: model.to_string(),
            tau: self.tau,
            h,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for KillingModelSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let tag = SpecTag::deserialize(d)?;
        let model = match (tag.model.as_str(), tag.h) {
            ("HalfSpace", _) => ModelKind::HalfSpace,
            ("Cylinder", _) => ModelKind::Cylinder,
            ("HCylinder", Some(h)) => ModelKind::HCylinder(h),
            ("HCylinder", None) => return Err(D::Error::custom("HCylinder needs H")),
            (other, _) => return Err(D::Error::custom(format!("unknown model {other}"))),
        };
        KillingModelSpec::new(model, tag.tau).map_err(D::Error::custom)
    }
}

impl KillingModelSpec {
    pub fn new(model: ModelKind, tau: f64) -> Result<Self> {
        let reference_h = match model {
            ModelKind::HCylinder(h) => {
                check_subcritical(h)?;
                h
            }
            _ => 0.0,
        };
        Ok(KillingModelSpec {
            model,
            tau,
            reference_h,
            shifts: Vec::new(),
        })
    }

    pub fn half_space(tau: f64) -> Self {
        Self::new(ModelKind::HalfSpace, tau).expect("always valid")
    }

    pub fn cylinder(tau: f64) -> Self {
        Self::new(ModelKind::Cylinder, tau).expect("always valid")
    }

    pub fn h_cylinder(h: f64, tau: f64) -> Result<Self> {
        Self::new(ModelKind::HCylinder(h), tau)
    }

    pub fn chart(&self) -> Chart {
        match self.model {
            ModelKind::HalfSpace => Chart::HalfPlane,
            _ => Chart::Disk,
        }
    }

    pub fn is_shifted(&self) -> bool {
        !self.shifts.is_empty()
    }

    /// Declares the mean curvature of the zero section, e.g. after a shift by an H-graph.
    pub fn with_reference_h(mut self, h: f64) -> Self {
        self.reference_h = h;
        self
    }

    /// `(lambda, a, b)` at a chart point given by coordinates.
    pub fn coeffs_xy(&self, x: f64, y: f64) -> MetricCoeffs {
        let (lambda, mut a, mut b) = match self.model {
            ModelKind::HalfSpace => (1.0 / y, -2.0 * self.tau, 0.0),
            ModelKind::Cylinder => {
                let r2 = x * x + y * y;
                (2.0 / (1.0 - r2), 2.0 * y * self.tau, -2.0 * x * self.tau)
            }
            ModelKind::HCylinder(h) => {
                let r2 = x * x + y * y;
                let k = h_cylinder_factor(h, self.tau, r2);
                (
                    2.0 / (1.0 - r2),
                    2.0 * y * self.tau + 2.0 * h * x * k,
                    -2.0 * x * self.tau + 2.0 * h * y * k,
                )
            }
        };
        for s in &self.shifts {
            let g = s.gradient(x, y);
            a += g[0] / lambda;
            b += g[1] / lambda;
        }
        MetricCoeffs { lambda, a, b }
    }

    /// Total fiber shift applied so far at `(x, y)`.
    pub fn shift_value(&self, x: f64, y: f64) -> f64 {
        self.shifts.iter().map(|s| s.value(x, y)).sum()
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        match self.chart() {
            Chart::HalfPlane => y > 0.0,
            Chart::Disk => x * x + y * y < 1.0,
        }
    }
}

/// `sqrt((1 + 4 r^2 tau^2) / (1 - 4 H^2 r^2))`.
pub fn h_cylinder_factor(h: f64, tau: f64, r2: f64) -> f64 {
    ((1.0 + 4.0 * r2 * tau * tau) / (1.0 - 4.0 * h * h * r2)).sqrt()
}

pub fn check_subcritical(h: f64) -> Result<()> {
    if h.is_finite() && h.abs() < 0.5 {
        Ok(())
    } else {
        Err(Error::CriticalH)
    }
}

pub fn metric_coeffs(spec: &KillingModelSpec, p: &ModelPoint) -> Result<MetricCoeffs> {
    let q = p.to_chart(spec.chart())?;
    if !q.is_interior() {
        return Err(Error::DomainError);
    }
    Ok(spec.coeffs_xy(q.x, q.y))
}

/// `((lambda a)_y - (lambda b)_x) / (2 lambda^2)` by central differences with step `h`.
pub fn bundle_curvature(spec: &KillingModelSpec, x: f64, y: f64, h: f64) -> f64 {
    let la = |x: f64, y: f64| {
        let c = spec.coeffs_xy(x, y);
        c.lambda * c.a
    };
    let lb = |x: f64, y: f64| {
        let c = spec.coeffs_xy(x, y);
        c.lambda * c.b
    };
    let la_y = (la(x, y + h) - la(x, y - h)) / (2.0 * h);
    let lb_x = (lb(x + h, y) - lb(x - h, y)) / (2.0 * h);
    let lambda = spec.coeffs_xy(x, y).lambda;
    (la_y - lb_x) / (2.0 * lambda * lambda)
}

/// Adds the shift `d`: `a' = a + d_x / lambda`, `b' = b + d_y / lambda`.
pub fn fiber_shift(spec: &KillingModelSpec, d: Arc<dyn Shift>) -> KillingModelSpec {
    let mut out = spec.clone();
    out.shifts.push(d);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelPoint3 {
    pub base: ModelPoint,
    pub t: f64,
}

impl ModelPoint3 {
    pub fn new(base: ModelPoint, t: f64) -> Self {
        ModelPoint3 { base, t }
    }
}

/// Half-space model to cylinder model.
pub fn psi(tau: f64, p: &ModelPoint3) -> Result<ModelPoint3> {
    let b = p.base;
    if b.chart != Chart::HalfPlane {
        return Err(Error::ChartMismatch);
    }
    if b.y.is_infinite() {
        return Err(Error::SingularPoint);
    }
    let w = cayley(b.z());
    let t = p.t - 4.0 * tau * (b.x / (b.y + 1.0)).atan();
    Ok(ModelPoint3 {
        base: ModelPoint::from_disk(w, b.ideal),
        t,
    })
}

/// Cylinder model to half-space model.
pub fn psi_inv(tau: f64, p: &ModelPoint3) -> Result<ModelPoint3> {
    let b = p.base;
    if b.chart != Chart::Disk {
        return Err(Error::ChartMismatch);
    }
    let w = b.z();
    if (w - C64::new(1.0, 0.0)).norm() < GEOM_EPS {
        return Err(Error::SingularPoint);
    }
    let z = cayley_inv(w);
    let t = p.t - 4.0 * tau * (b.y / (1.0 - b.x)).atan();
    Ok(ModelPoint3 {
        base: ModelPoint {
            chart: Chart::HalfPlane,
            x: z.re,
            y: if b.ideal { 0.0 } else { z.im },
            ideal: b.ideal,
        },
        t,
    })
}

/// Height of the cylinder zero section seen in the half-space chart.
pub fn umbrella_height(tau: f64, x: f64, y: f64) -> f64 {
    4.0 * tau * (x / (y + 1.0)).atan()
}

/// Base part of the translation by `c` along `gamma(s) = (0, -tanh(s/2))` in the disk.
pub fn translate_base(c: f64, x: f64, y: f64) -> (f64, f64) {
    let r2 = x * x + y * y;
    let den = -1.0 + r2 - (1.0 + r2) * c.cosh() + 2.0 * y * c.sinh();
    (
        -2.0 * x / den,
        ((1.0 + r2) * c.sinh() - 2.0 * y * c.cosh()) / den,
    )
}

/// Fiber displacement of the translation by `c`.
pub fn translate_fiber(c: f64, tau: f64, x: f64, y: f64) -> f64 {
    let r2 = x * x + y * y;
    let ec = c.exp();
    -4.0 * tau * (x / (1.0 + y)).atan()
        + 4.0 * tau * (2.0 * ec * x / (x * x + (1.0 + y).powi(2) - ec * (r2 - 1.0))).atan()
}

/// Bound on `|translate_fiber|` over the disk.
pub fn translate_fiber_bound(c: f64, tau: f64) -> f64 {
    4.0 * tau.abs() * ((-c / 2.0).exp().atan() - (c / 2.0).exp().atan()).abs()
}

/// Hyperbolic translation of the cylinder model along the horizontal geodesic through the origin.
pub fn hyp_translation_3d(c: f64, tau: f64, p: &ModelPoint3) -> Result<ModelPoint3> {
    let b = p.base.to_chart(Chart::Disk)?;
    let (x, y) = translate_base(c, b.x, b.y);
    let t = p.t + translate_fiber(c, tau, b.x, b.y);
    let mut base = ModelPoint::from_disk(C64::new(x, y), b.ideal);
    if b.ideal {
        let n = base.z().norm();
        base.x /= n;
        base.y /= n;
    }
    Ok(ModelPoint3 {
        base: base.to_chart(p.base.chart)?,
        t,
    })
}

/// Normal component `<N, d_t>` of the slice `{t = c}` at Euclidean radius `r` of an H-cylinder.
pub fn slice_transversality(h: f64, tau: f64, r: f64) -> Result<f64> {
    let spec = KillingModelSpec::h_cylinder(h, tau)?;
    let c = spec.coeffs_xy(r, 0.0);
    let la = c.lambda * c.a;
    let lb = c.lambda * c.b;
    Ok(1.0 / (1.0 + la * la + lb * lb).sqrt())
}

/// Height of the entire rotational H-graph of the cylinder model at Euclidean radius `r`,
/// normalized to vanish at the origin.
pub fn entire_rotational_height(h: f64, tau: f64, r: f64) -> Result<f64> {
    check_subcritical(h)?;
    if !(0.0..1.0).contains(&r) {
        return Err(Error::DomainError);
    }
    integrate(
        |s| entire_rotational_slope(h, tau, s),
        0.0,
        r,
        Tolerance::new(1e-13, 1e-12),
    )
}

/// `d/dr` of [`entire_rotational_height`].
pub fn entire_rotational_slope(h: f64, tau: f64, r: f64) -> f64 {
    4.0 * h * r * (1.0 + 4.0 * tau * tau * r * r).sqrt()
        / ((1.0 - r * r) * (1.0 - 4.0 * h * h * r * r).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AsymptoticValue {
    Finite(f64),
    PlusInfinity,
    MinusInfinity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Compactification {
    Standard,
    HCompactification(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphBoundaryDatum {
    pub ideal_point: ModelPoint,
    pub value: AsymptoticValue,
    pub compactification: Compactification,
}

/// Result of moving a datum between compactifications. When `reference_h` is set,
/// the standard-chart height near the ideal point behaves like
/// `offset + entire_rotational_height(reference_h, tau, r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TranslatedDatum {
    pub datum: GraphBoundaryDatum,
    pub offset: Option<f64>,
    pub reference_h: Option<f64>,
    pub tau: f64,
}

impl TranslatedDatum {
    /// Standard-chart height at Euclidean radius `r` along the ray to the ideal point.
    pub fn standard_height(&self, r: f64) -> Result<f64> {
        let offset = self.offset.ok_or(Error::DomainError)?;
        match self.reference_h {
            Some(h) => Ok(offset + entire_rotational_height(h, self.tau, r)?),
            None => Ok(offset),
        }
    }
}

fn sign_infinity(h: f64) -> AsymptoticValue {
    if h >= 0.0 {
        AsymptoticValue::PlusInfinity
    } else {
        AsymptoticValue::MinusInfinity
    }
}

pub fn translate_boundary_data(
    datum: &GraphBoundaryDatum,
    to: Compactification,
    tau: f64,
) -> Result<TranslatedDatum> {
    for c in [datum.compactification, to] {
        if let Compactification::HCompactification(h) = c {
            check_subcritical(h)?;
        }
    }
    if !datum.ideal_point.ideal {
        return Err(Error::DomainError);
    }
    let finite = match datum.value {
        AsymptoticValue::Finite(v) => Some(v),
        _ => None,
    };
    let out = |value, offset, reference_h| TranslatedDatum {
        datum: GraphBoundaryDatum {
            ideal_point: datum.ideal_point,
            value,
            compactification: to,
        },
        offset,
        reference_h,
        tau,
    };
    use Compactification::*;
    match (datum.compactification, to) {
        (Standard, Standard) => Ok(out(datum.value, finite, None)),
        (HCompactification(a), HCompactification(b)) if a == b => {
            Ok(out(datum.value, finite, None))
        }
        (HCompactification(h), Standard) => {
            if h == 0.0 {
                return Ok(out(datum.value, finite, None));
            }
            let value = match datum.value {
                AsymptoticValue::Finite(_) => sign_infinity(h),
                v => v,
            };
            Ok(out(value, finite, Some(h)))
        }
        (Standard, HCompactification(h)) => {
            if h == 0.0 {
                return Ok(out(datum.value, finite, None));
            }
            match datum.value {
                // finite standard heights sit below (H > 0) the reference graph
                AsymptoticValue::Finite(_) => Ok(out(sign_infinity(-h), None, None)),
                v if v == sign_infinity(-h) => Ok(out(v, None, None)),
                // divergence in the direction of the reference graph needs its rate
                _ => Err(Error::DomainError),
            }
        }
        (HCompactification(_), HCompactification(_)) => Err(Error::DomainError),
    }
}

/// Flux vector `(grad u + lambda (a, b)) / W` whose Euclidean divergence is `2H lambda^2`.
pub fn unit_flux(c: &MetricCoeffs, grad: [f64; 2]) -> [f64; 2] {
    let qx = grad[0] + c.lambda * c.a;
    let qy = grad[1] + c.lambda * c.b;
    let w = (1.0 + (qx * qx + qy * qy) / (c.lambda * c.lambda)).sqrt();
    [qx / w, qy / w]
}

/// Generalized gradient `G u` in chart components.
pub fn generalized_gradient_at(c: &MetricCoeffs, grad: [f64; 2]) -> [f64; 2] {
    let l2 = c.lambda * c.lambda;
    [
        (grad[0] + c.lambda * c.a) / l2,
        (grad[1] + c.lambda * c.b) / l2,
    ]
}

/// Mean curvature of the graph of `u` at `(x, y)` by nested central differences with step `h`.
pub fn mean_curvature_fd<F: Fn(f64, f64) -> f64>(
    spec: &KillingModelSpec,
    u: &F,
    x: f64,
    y: f64,
    h: f64,
) -> f64 {
    let grad = |x: f64, y: f64| {
        [
            (u(x + h, y) - u(x - h, y)) / (2.0 * h),
            (u(x, y + h) - u(x, y - h)) / (2.0 * h),
        ]
    };
    let flux = |x: f64, y: f64| unit_flux(&spec.coeffs_xy(x, y), grad(x, y));
    let div = (flux(x + h, y)[0] - flux(x - h, y)[0]) / (2.0 * h)
        + (flux(x, y + h)[1] - flux(x, y - h)[1]) / (2.0 * h);
    let lambda = spec.coeffs_xy(x, y).lambda;
    0.5 * div / (lambda * lambda)
}

/// Rotation of the base disk by `theta`; the fibers are untouched in the cylinder models.
pub fn rotate(theta: f64, x: f64, y: f64) -> (f64, f64) {
    let (s, c) = theta.sin_cos();
    (c * x - s * y, s * x + c * y)
}

/// Angle of an ideal point of the disk, in `[0, 2 pi)`.
pub fn ideal_angle(p: &ModelPoint) -> f64 {
    let z = p.to_disk();
    z.im.atan2(z.re).rem_euclid(2.0 * PI)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_coefficients() {
        let spec = KillingModelSpec::h_cylinder(0.3, 0.7).unwrap();
        let c = spec.coeffs_xy(0.0, 0.0);
        assert_eq!((c.lambda, c.a, c.b), (2.0, 0.0, 0.0));
        let hs = KillingModelSpec::half_space(0.2);
        assert_eq!(hs.coeffs_xy(0.0, 2.0).lambda, 0.5);
    }

    #[test]
    fn critical_h_rejected() {
        assert_eq!(
            KillingModelSpec::h_cylinder(0.5, 0.0).unwrap_err(),
            Error::CriticalH
        );
        assert_eq!(Error::CriticalH.to_string(), "H must satisfy |H| < 1/2");
    }

    #[test]
    fn spec_json_roundtrip() {
        let spec = KillingModelSpec::h_cylinder(0.25, 0.3).unwrap();
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(text, r#"{"model":"HCylinder","tau":0.3,"H":0.25}"#);
        let back: KillingModelSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back.model, spec.model);
        assert_eq!(back.reference_h, 0.25);
    }

    #[test]
    fn translation_of_origin_follows_gamma() {
        let (x, y) = translate_base(1.3, 0.0, 0.0);
        assert!(x.abs() < 1e-15);
        assert!((y + (0.65f64).tanh()).abs() < 1e-14);
        assert_eq!(translate_base(0.0, 0.3, 0.2), (0.3, 0.2));
        assert_eq!(translate_fiber(0.0, 0.7, 0.3, 0.2), 0.0);
    }
}
