//! Explicit H-graphs of the H-cylinder used as comparison functions.
//!
//! Every barrier is a height function over the disk chart in the
//! coordinates of `KillingModelSpec::h_cylinder(target_h, tau)`, where the
//! entire rotational graph is the zero section.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperbolic::{busemann, cayley_inv, Chart, ModelPoint};
use crate::killing::{
    check_subcritical, ideal_angle, mean_curvature_fd, rotate, translate_base, translate_fiber,
    KillingModelSpec,
};
use crate::profiles::{
    hyperbolic_profile, invariant_slope, rotational_profile, Branch, HyperbolicProfile,
    RotationalProfile,
};

/// Counterclockwise arc of the ideal circle from angle `from` to angle `to`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdealArc {
    pub from: f64,
    pub to: f64,
}

impl IdealArc {
    pub fn span(&self) -> f64 {
        (self.to - self.from).rem_euclid(2.0 * PI)
    }

    pub fn contains_angle(&self, theta: f64) -> bool {
        (theta - self.from).rem_euclid(2.0 * PI) <= self.span()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BarrierKind {
    LowerHyperbolic,
    UpperRotational,
    Slice,
}

#[derive(Clone)]
enum Shape {
    Lower {
        profile: Arc<HyperbolicProfile>,
        x0: f64,
        rotation: f64,
        arc: IdealArc,
    },
    Upper {
        c: f64,
        rotation: f64,
        level: f64,
    },
    Slice,
}

#[derive(Clone)]
pub struct Barrier {
    pub kind: BarrierKind,
    pub target_h: f64,
    pub tau: f64,
    pub shift: f64,
    /// Ideal point where an upper barrier attains its asymptotic minimum.
    pub touching_point: Option<ModelPoint>,
    radial: Arc<RotationalProfile>,
    shape: Shape,
}

impl std::fmt::Debug for Barrier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Barrier")
            .field("kind", &self.kind)
            .field("target_h", &self.target_h)
            .field("tau", &self.tau)
            .field("shift", &self.shift)
            .field("touching_point", &self.touching_point)
            .finish()
    }
}

const RADIAL_EXTENT: f64 = 40.0;

fn entire_profile(target_h: f64, tau: f64) -> Result<Arc<RotationalProfile>> {
    Ok(Arc::new(rotational_profile(
        target_h,
        -2.0 * target_h,
        tau,
        RADIAL_EXTENT,
        400,
    )?))
}

fn polar_radius(x: f64, y: f64) -> f64 {
    2.0 * x.hypot(y).atanh()
}

/// Base point of the axis `gamma(t) = (0, -tanh(t/2))`.
fn axis_point(t: f64) -> C64 {
    C64::new(0.0, -(0.5 * t).tanh())
}

/// Asymptotic value of the recentred (unrotated, unnormalized) rotational graph at angle `theta`.
fn recentred_trace(c: f64, tau: f64, slope: f64, theta: f64) -> f64 {
    let zeta = C64::from_polar(1.0, theta);
    let (px, py) = translate_base(-c, zeta.re, zeta.im);
    let n = px.hypot(py);
    slope * busemann(zeta, axis_point(c)) + translate_fiber(c, tau, px / n, py / n)
}

fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..100 {
        let x1 = b - g * (b - a);
        let x2 = a + g * (b - a);
        if f(x1) < f(x2) {
            b = x2;
        } else {
            a = x1;
        }
    }
    0.5 * (a + b)
}

/// Minimizer and minimum of the asymptotic trace of the recentred graph.
fn trace_minimum(c: f64, tau: f64, slope: f64) -> (f64, f64) {
    let f = |t: f64| recentred_trace(c, tau, slope, t);
    let n = 720;
    let step = 2.0 * PI / n as f64;
    let best = (0..n)
        .map(|k| -PI / 2.0 + (k as f64 + 0.5) * step)
        .min_by(|a, b| f(*a).partial_cmp(&f(*b)).expect("finite trace"))
        .expect("nonempty grid");
    let t = golden_min(f, best - step, best + step);
    (t, f(t))
}

impl Barrier {
    pub fn spec(&self) -> KillingModelSpec {
        KillingModelSpec::h_cylinder(self.target_h, self.tau).expect("subcritical by construction")
    }

    /// Vertical translate: the same graph moved up by `s`.
    pub fn shifted(&self, s: f64) -> Barrier {
        let mut out = self.clone();
        out.shift += s;
        out
    }

    /// Whether the disk-chart point lies in the domain of the barrier.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        if x * x + y * y >= 1.0 {
            return false;
        }
        match &self.shape {
            Shape::Lower {
                profile,
                x0,
                rotation,
                ..
            } => {
                let (xr, yr) = rotate(-rotation, x, y);
                let w = cayley_inv(C64::new(xr, yr));
                w.im > 0.0 && profile.contains((w.re - x0) / w.im)
            }
            _ => true,
        }
    }

    /// Height over a disk-chart point, or `None` outside the domain.
    pub fn eval(&self, x: f64, y: f64) -> Option<f64> {
        if !self.contains(x, y) {
            return None;
        }
        let rho = polar_radius(x, y);
        let base = match &self.shape {
            Shape::Slice => return Some(self.shift),
            Shape::Upper { c, rotation, level } => {
                let (xr, yr) = rotate(-rotation, x, y);
                let (px, py) = translate_base(-c, xr, yr);
                let d = polar_radius(px, py);
                self.radial.value(d).ok()? + translate_fiber(*c, self.tau, px, py) - level
            }
            Shape::Lower {
                profile,
                x0,
                rotation,
                ..
            } => {
                let (xr, yr) = rotate(-rotation, x, y);
                let w = cayley_inv(C64::new(xr, yr));
                profile.value((w.re - x0) / w.im).ok()?
                    - 4.0 * self.tau * (w.re / (w.im + 1.0)).atan()
            }
        };
        Some(base - self.radial.value(rho).ok()? + self.shift)
    }

    /// Asymptotic boundary value at the ideal point of angle `theta`.
    pub fn ideal_trace(&self, theta: f64) -> Option<f64> {
        match &self.shape {
            Shape::Slice => Some(self.shift),
            Shape::Upper { c, rotation, level } => {
                let slope = invariant_slope(self.target_h, self.tau);
                Some(recentred_trace(*c, self.tau, slope, theta - rotation) - level + self.shift)
            }
            Shape::Lower { arc, .. } => {
                if !arc.contains_angle(theta) {
                    return None;
                }
                let r = (0.5 * 24.0f64).tanh();
                self.eval(r * theta.cos(), r * theta.sin())
            }
        }
    }

    /// Largest deviation of the finite-difference mean curvature from the target over `points`.
    pub fn max_cmc_residual(&self, points: &[[f64; 2]], step: f64) -> f64 {
        let spec = self.spec();
        let u = |x: f64, y: f64| self.eval(x, y).unwrap_or(f64::NAN);
        points
            .iter()
            .filter(|p| self.contains(p[0], p[1]))
            .map(|p| (mean_curvature_fd(&spec, &u, p[0], p[1], step) - self.target_h).abs())
            .fold(0.0, f64::max)
    }
}

/// The slice `{t = level}`.
pub fn slice_barrier(level: f64, target_h: f64, tau: f64) -> Result<Barrier> {
    check_subcritical(target_h)?;
    Ok(Barrier {
        kind: BarrierKind::Slice,
        target_h,
        tau,
        shift: level,
        touching_point: None,
        radial: entire_profile(target_h, tau)?,
        shape: Shape::Slice,
    })
}

/// Graph that diverges to minus infinity along the arc of curvature `2H`
/// joining the endpoints of `gamma_inf`, with finite values along `gamma_inf`.
/// Built from the single-root hyperbolic profile.
pub fn lower_barrier(
    gamma_inf: IdealArc,
    target_h: f64,
    tau: f64,
    f_shift: f64,
) -> Result<Barrier> {
    check_subcritical(target_h)?;
    if target_h < 0.0 {
        return Err(Error::DomainError);
    }
    let span = gamma_inf.span();
    if !(span > 0.0 && span < 2.0 * PI) {
        return Err(Error::DomainError);
    }
    let d = -(1.0 - 4.0 * target_h * target_h).sqrt();
    let profile = Arc::new(hyperbolic_profile(target_h, d, tau, Branch::Plus)?);
    // the half-plane interval (x0, infinity) maps to the arc (-span, 0)
    let x0 = 1.0 / (0.5 * span).tan();
    Ok(Barrier {
        kind: BarrierKind::LowerHyperbolic,
        target_h,
        tau,
        shift: f_shift,
        touching_point: None,
        radial: entire_profile(target_h, tau)?,
        shape: Shape::Lower {
            profile,
            x0,
            rotation: gamma_inf.from + span,
            arc: gamma_inf,
        },
    })
}

/// Entire rotational graph recentred at distance `c` from the origin and
/// rotated so that its asymptotic minimum, normalized to zero, sits at the ideal point `q`.
pub fn upper_barrier(q: &ModelPoint, c: f64, target_h: f64, tau: f64) -> Result<Barrier> {
    check_subcritical(target_h)?;
    if !q.ideal {
        return Err(Error::DomainError);
    }
    if !(c >= 0.0) {
        return Err(Error::DomainError);
    }
    let slope = invariant_slope(target_h, tau);
    let (t_min, level) = if c == 0.0 {
        (-PI / 2.0, 0.0)
    } else {
        trace_minimum(c, tau, slope)
    };
    let q_disk = q.to_chart(Chart::Disk)?;
    let rotation = ideal_angle(&q_disk) - t_min;
    Ok(Barrier {
        kind: BarrierKind::UpperRotational,
        target_h,
        tau,
        shift: 0.0,
        touching_point: Some(q_disk),
        radial: entire_profile(target_h, tau)?,
        shape: Shape::Upper { c, rotation, level },
    })
}

/// `v(gamma(t)) - v_c(gamma(t))` for the entire rotational graph `v` and its
/// translate `v_c` by `c` along the axis, both in the cylinder model. Tends
/// to `slope * c` as `t` grows.
pub fn translated_axis_gap(target_h: f64, tau: f64, c: f64, t: f64) -> Result<f64> {
    check_subcritical(target_h)?;
    let v = rotational_profile(
        target_h,
        -2.0 * target_h,
        tau,
        t.abs().max(c.abs()) + 5.0,
        200,
    )?;
    let z = axis_point(t);
    let (px, py) = translate_base(-c, z.re, z.im);
    let translated = v.value(polar_radius(px, py))? + translate_fiber(c, tau, px, py);
    Ok(v.value(t.abs())? - translated)
}
