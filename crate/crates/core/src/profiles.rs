//! Invariant CMC profiles: rotational graphs `v(rho)` over geodesic polar
//! coordinates and graphs `u(s)` invariant under hyperbolic translations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::least_squares;
use crate::killing::{check_subcritical, AsymptoticValue, Shift};
use crate::quadrature::{integrate, Tolerance};

const PROFILE_TOL: Tolerance = Tolerance {
    abs: 1e-14,
    rel: 1e-13,
    max_panels: 4000,
};

/// Scan range and step used to bracket the last zero of the rotational radicand.
const RADICAND_SCAN_END: f64 = 50.0;
const RADICAND_SCAN_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RotationalClass {
    EmbeddedAnnulus,
    EntireGraph,
    ImmersedAnnulus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    /// `rho` for rotational profiles, `s` for hyperbolic ones.
    pub at: f64,
    pub value: f64,
    pub derivative: f64,
}

/// Anything that can report height increments along a radial geodesic.
pub trait RadialHeight {
    fn height_delta(&self, from: f64, to: f64) -> Result<f64>;
}

#[derive(Debug, Clone, Serialize)]
pub struct RotationalProfile {
    pub h: f64,
    pub d: f64,
    pub tau: f64,
    pub samples: Vec<ProfileSample>,
    pub klass: RotationalClass,
    pub rho_min: f64,
    pub rho_max: f64,
    /// End of the square-root substitution zone next to `rho_min`.
    #[serde(skip)]
    anchor: f64,
    #[serde(skip)]
    anchor_value: f64,
}

fn rot_numerator(h: f64, d: f64, rho: f64) -> f64 {
    let s = (0.5 * rho).sinh();
    4.0 * h * s * s + (d + 2.0 * h)
}

/// `sinh^2 rho - (2H cosh rho + d)^2`, factored to keep precision near its zeros.
pub fn rotational_radicand(h: f64, d: f64, rho: f64) -> f64 {
    let n = rot_numerator(h, d, rho);
    let sh = rho.sinh();
    (sh - n) * (sh + n)
}

/// Closed-form `dv/drho`; `NaN` where the radicand is not positive.
pub fn rotational_slope(h: f64, d: f64, tau: f64, rho: f64) -> f64 {
    let n = rot_numerator(h, d, rho);
    let th = (0.5 * rho).tanh();
    let rad = rotational_radicand(h, d, rho);
    if rad <= 0.0 {
        if n == 0.0 {
            return 0.0;
        }
        return f64::NAN;
    }
    n * (1.0 + 4.0 * tau * tau * th * th).sqrt() / rad.sqrt()
}

fn classify_rotational(h: f64, d: f64) -> RotationalClass {
    let pivot = -2.0 * h;
    if d > pivot {
        RotationalClass::EmbeddedAnnulus
    } else if d == pivot {
        RotationalClass::EntireGraph
    } else {
        RotationalClass::ImmersedAnnulus
    }
}

/// Largest zero of the radicand (0 for the entire family).
pub fn rotational_rho_min(h: f64, d: f64) -> Result<f64> {
    check_subcritical(h)?;
    if classify_rotational(h, d) == RotationalClass::EntireGraph {
        return Ok(0.0);
    }
    let steps = (RADICAND_SCAN_END / RADICAND_SCAN_STEP) as usize;
    let mut last_bracket = None;
    let mut prev = rotational_radicand(h, d, 0.0);
    for k in 1..=steps {
        let rho = k as f64 * RADICAND_SCAN_STEP;
        let cur = rotational_radicand(h, d, rho);
        if prev <= 0.0 && cur > 0.0 {
            last_bracket = Some((rho - RADICAND_SCAN_STEP, rho));
        }
        prev = cur;
    }
    if prev <= 0.0 {
        return Err(Error::EmptyDomain);
    }
    let Some((mut lo, mut hi)) = last_bracket else {
        return Ok(0.0);
    };
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if rotational_radicand(h, d, mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

pub fn rotational_profile(
    h: f64,
    d: f64,
    tau: f64,
    rho_max: f64,
    n: usize,
) -> Result<RotationalProfile> {
    check_subcritical(h)?;
    if !(rho_max > 0.0) {
        return Err(Error::DomainError);
    }
    if n < 2 {
        return Err(Error::TooFewSamples { needed: 2, have: n });
    }
    let klass = classify_rotational(h, d);
    let rho_min = rotational_rho_min(h, d)?;
    if rho_min >= rho_max {
        return Err(Error::EmptyDomain);
    }
    let span = rho_max - rho_min;
    let singular = klass != RotationalClass::EntireGraph;
    let anchor = if singular {
        rho_min + (0.5f64).min(0.25 * span)
    } else {
        rho_min
    };
    let mut profile = RotationalProfile {
        h,
        d,
        tau,
        samples: Vec::with_capacity(n),
        klass,
        rho_min,
        rho_max,
        anchor,
        anchor_value: 0.0,
    };
    if singular {
        profile.anchor_value = profile.sqrt_zone_height(anchor)?;
    }

    let grid = rotational_grid(rho_min, anchor, rho_max, n, singular);
    let mut prev_rho = anchor;
    let mut prev_v = profile.anchor_value;
    for rho in grid {
        let v = if rho <= anchor {
            if rho == rho_min {
                0.0
            } else {
                profile.sqrt_zone_height(rho)?
            }
        } else {
            let v = prev_v + profile.regular_increment(prev_rho, rho)?;
            prev_rho = rho;
            prev_v = v;
            v
        };
        let dv = if rho == rho_min && singular {
            f64::INFINITY
        } else {
            profile.slope(rho)
        };
        profile.samples.push(ProfileSample {
            at: rho,
            value: v,
            derivative: dv,
        });
    }
    Ok(profile)
}

/// Geometric grid inside the singular zone, uniform beyond it.
fn rotational_grid(rho_min: f64, anchor: f64, rho_max: f64, n: usize, singular: bool) -> Vec<f64> {
    if !singular {
        return (0..n)
            .map(|k| rho_min + (rho_max - rho_min) * k as f64 / (n - 1) as f64)
            .collect();
    }
    let n_geo = (n / 5).max(2).min(n - 1);
    let n_uni = n - n_geo;
    let zone = anchor - rho_min;
    let mut grid = vec![rho_min];
    let first = zone * 1e-8;
    for k in 0..(n_geo - 1) {
        let t = k as f64 / (n_geo - 1) as f64;
        grid.push(rho_min + first * (zone / first).powf(t));
    }
    for k in 0..n_uni {
        let t = if n_uni == 1 {
            1.0
        } else {
            k as f64 / (n_uni - 1) as f64
        };
        grid.push(anchor + (rho_max - anchor) * t);
    }
    grid.dedup();
    grid
}

impl RotationalProfile {
    pub fn slope(&self, rho: f64) -> f64 {
        rotational_slope(self.h, self.d, self.tau, rho)
    }

    fn integrand(&self) -> impl Fn(f64) -> f64 + '_ {
        move |r| self.slope(r)
    }

    /// Integrand at `rho_min + delta`, with the vanishing factor of the radicand
    /// formed from the increment `delta` itself.
    fn slope_near_root(&self, delta: f64) -> f64 {
        let (h, r0) = (self.h, self.rho_min);
        let rho = r0 + delta;
        let n = rot_numerator(h, self.d, rho);
        let sh = rho.sinh();
        let half = (0.5 * delta).sinh();
        let mid = r0 + 0.5 * delta;
        // sinh(r0) = |N(r0)| at the root, so only the increments of the two sides remain
        let vanishing = if rot_numerator(h, self.d, r0) >= 0.0 {
            2.0 * half * (mid.cosh() - 2.0 * h * mid.sinh())
        } else {
            2.0 * half * (mid.cosh() + 2.0 * h * mid.sinh())
        };
        let other = if rot_numerator(h, self.d, r0) >= 0.0 {
            sh + n
        } else {
            sh - n
        };
        let th = (0.5 * rho).tanh();
        n * (1.0 + 4.0 * self.tau * self.tau * th * th).sqrt() / (vanishing * other).sqrt()
    }

    fn sqrt_zone_height(&self, rho: f64) -> Result<f64> {
        let top = (rho - self.rho_min).sqrt();
        integrate(
            |t| 2.0 * t * self.slope_near_root(t * t),
            0.0,
            top,
            PROFILE_TOL,
        )
    }

    fn regular_increment(&self, from: f64, to: f64) -> Result<f64> {
        integrate(self.integrand(), from, to, PROFILE_TOL)
    }

    /// `v(rho)` for any `rho >= rho_min`, including beyond `rho_max`.
    pub fn value(&self, rho: f64) -> Result<f64> {
        if rho < self.rho_min || !rho.is_finite() {
            return Err(Error::OutsideDomain);
        }
        if rho <= self.anchor {
            return if rho == self.rho_min {
                Ok(0.0)
            } else {
                self.sqrt_zone_height(rho)
            };
        }
        // nearest stored sample beyond the singular zone, then a short local integral
        let idx = self.samples.partition_point(|s| s.at <= rho);
        let mut best = (self.anchor, self.anchor_value);
        for k in [idx.saturating_sub(1), idx] {
            if let Some(s) = self.samples.get(k) {
                if s.at >= self.anchor && (s.at - rho).abs() < (best.0 - rho).abs() {
                    best = (s.at, s.value);
                }
            }
        }
        Ok(best.1 + self.regular_increment(best.0, rho)?)
    }

    /// Fitted and predicted tail coefficients; see [`asymptotic_check`].
    pub fn predicted_slope(&self) -> f64 {
        invariant_slope(self.h, self.tau)
    }

    /// Coefficient of `e^{-rho}` in `v ~ A rho + B + C e^{-rho}`.
    pub fn predicted_correction(&self) -> f64 {
        let (h, d, tau) = (self.h, self.d, self.tau);
        let t2 = tau * tau;
        -2.0 * (d + 4.0 * d * t2 + 8.0 * h * (-1.0 + 4.0 * h * h) * t2)
            / ((1.0 - 4.0 * h * h).powf(1.5) * (1.0 + 4.0 * t2).sqrt())
    }

    pub fn csv_rows(&self) -> Vec<[f64; 3]> {
        self.samples
            .iter()
            .map(|s| [s.at, s.value, s.derivative])
            .collect()
    }
}

impl RadialHeight for RotationalProfile {
    fn height_delta(&self, from: f64, to: f64) -> Result<f64> {
        if from < self.rho_min || to < self.rho_min {
            return Err(Error::OutsideDomain);
        }
        if from.min(to) > self.anchor || self.klass == RotationalClass::EntireGraph {
            return self.regular_increment(from, to);
        }
        Ok(self.value(to)? - self.value(from)?)
    }
}

/// A radial height plus an explicit perturbation, for sensitivity checks.
pub struct PerturbedHeight<'a, R, F> {
    pub inner: &'a R,
    pub bump: F,
}

impl<R: RadialHeight, F: Fn(f64) -> f64> RadialHeight for PerturbedHeight<'_, R, F> {
    fn height_delta(&self, from: f64, to: f64) -> Result<f64> {
        Ok(self.inner.height_delta(from, to)? + (self.bump)(to) - (self.bump)(from))
    }
}

/// Left side minus right side of the rotational second-order equation
/// `(coth + ... + coth v'^2) v' + (1 + 4 tau^2 tanh^2(rho/2)) v'' = 2H W^3`.
pub fn rotational_ode_lhs_minus_rhs(h: f64, tau: f64, rho: f64, v1: f64, v2: f64) -> f64 {
    let coth = 1.0 / rho.tanh();
    let th = (0.5 * rho).tanh();
    let sh_half = (0.5 * rho).sinh();
    let csch = 1.0 / rho.sinh();
    let t2 = tau * tau;
    let bracket = coth - 16.0 * t2 * csch.powi(3) * sh_half.powi(4)
        + 4.0 * t2 * coth * th * th
        + coth * v1 * v1;
    let g = 1.0 + 4.0 * t2 * th * th;
    bracket * v1 + g * v2 - 2.0 * h * (g + v1 * v1).powf(1.5)
}

/// Step of the five-point stencils used on radial heights.
const ODE_FD_STEP: f64 = 5e-3;

/// Max absolute residual of the rotational equation at the given radii, with
/// `v'` and `v''` from five-point differences of local height increments.
pub fn radial_ode_residual<R: RadialHeight>(
    height: &R,
    h: f64,
    tau: f64,
    rhos: &[f64],
) -> Result<f64> {
    let st = ODE_FD_STEP;
    let mut worst: f64 = 0.0;
    for &rho in rhos {
        let dp1 = height.height_delta(rho, rho + st)?;
        let dm1 = height.height_delta(rho, rho - st)?;
        let dp2 = height.height_delta(rho, rho + 2.0 * st)?;
        let dm2 = height.height_delta(rho, rho - 2.0 * st)?;
        let v1 = (-dp2 + 8.0 * dp1 - 8.0 * dm1 + dm2) / (12.0 * st);
        let v2 = (-dp2 + 16.0 * dp1 + 16.0 * dm1 - dm2) / (12.0 * st * st);
        let r = rotational_ode_lhs_minus_rhs(h, tau, rho, v1, v2).abs();
        if !r.is_finite() {
            return Err(Error::NonFinite(format!("ode residual at rho = {rho}")));
        }
        worst = worst.max(r);
    }
    Ok(worst)
}

/// Sample radii of `profile` kept away from both ends of its range.
pub fn interior_window(profile: &RotationalProfile) -> Vec<f64> {
    let lo = profile.rho_min + 0.2;
    let hi = profile.rho_max - 0.05;
    profile
        .samples
        .iter()
        .map(|s| s.at)
        .filter(|&r| r >= lo && r <= hi)
        .collect()
}

pub fn rotational_ode_residual(profile: &RotationalProfile) -> Result<f64> {
    let rhos = interior_window(profile);
    if rhos.len() < 5 {
        return Err(Error::TooFewSamples {
            needed: 5,
            have: rhos.len(),
        });
    }
    radial_ode_residual(profile, profile.h, profile.tau, &rhos)
}

/// Shift of the cylinder fibers by the entire rotational H-graph (`d = -2H`),
/// evaluated from the rotational integrand in geodesic polar radius.
#[derive(Debug, Clone, Copy)]
pub struct EntireProfileShift {
    pub h: f64,
    pub tau: f64,
}

impl Shift for EntireProfileShift {
    fn value(&self, x: f64, y: f64) -> f64 {
        let r = x.hypot(y);
        let rho = 2.0 * r.atanh();
        integrate(
            |p| rotational_slope(self.h, -2.0 * self.h, self.tau, p),
            0.0,
            rho,
            PROFILE_TOL,
        )
        .unwrap_or(f64::NAN)
    }

    fn gradient(&self, x: f64, y: f64) -> [f64; 2] {
        let r = x.hypot(y);
        if r < 1e-300 {
            return [0.0, 0.0];
        }
        let rho = 2.0 * r.atanh();
        let dv = rotational_slope(self.h, -2.0 * self.h, self.tau, rho);
        let drho_dr = 2.0 / (1.0 - r * r);
        let g = dv * drho_dr / r;
        [g * x, g * y]
    }
}

// ---------------------------------------------------------------------------
// hyperbolic-translation invariant family

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HyperbolicCase {
    Entire,
    SingleRoot,
    TwoRoots,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    /// Component to the right of the roots.
    Plus,
    /// Component to the left of the roots.
    Minus,
    /// The whole line (entire case only).
    Full,
}

fn sign_h(h: f64) -> f64 {
    if h < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Half-width of the band around `d^2 + 4H^2 = 1` treated as the single-root case,
/// so that rounded inputs such as `d = -sqrt(0.75)` land in it.
pub const SINGLE_ROOT_BAND: f64 = 1e-14;

pub fn hyperbolic_case(h: f64, d: f64) -> HyperbolicCase {
    let q = d * d + 4.0 * h * h;
    if (q - 1.0).abs() <= SINGLE_ROOT_BAND {
        HyperbolicCase::SingleRoot
    } else if q < 1.0 {
        HyperbolicCase::Entire
    } else if q == 1.0 {
        HyperbolicCase::SingleRoot
    } else {
        HyperbolicCase::TwoRoots
    }
}

/// Real zeros of `P`, ascending.
pub fn hyperbolic_roots(h: f64, d: f64) -> Vec<f64> {
    match hyperbolic_case(h, d) {
        HyperbolicCase::Entire => vec![],
        HyperbolicCase::SingleRoot => vec![-2.0 * h / d],
        HyperbolicCase::TwoRoots => {
            let disc = (d * d + 4.0 * h * h - 1.0).sqrt();
            let den = 4.0 * h * h - 1.0;
            let mut r = vec![(2.0 * d * h + disc) / den, (2.0 * d * h - disc) / den];
            r.sort_by(f64::total_cmp);
            r
        }
    }
}

/// `P(s) = (1 - 4H^2) s^2 + 4 d H s + 1 - d^2`, in factored form when it has real roots.
pub fn hyperbolic_p(h: f64, d: f64, s: f64) -> f64 {
    match hyperbolic_case(h, d) {
        HyperbolicCase::Entire => (1.0 - 4.0 * h * h) * s * s + 4.0 * d * h * s + (1.0 - d * d),
        HyperbolicCase::SingleRoot => {
            let t = d * s + 2.0 * h;
            t * t
        }
        HyperbolicCase::TwoRoots => {
            let r = hyperbolic_roots(h, d);
            (1.0 - 4.0 * h * h) * (s - r[0]) * (s - r[1])
        }
    }
}

fn hyp_integrand(h: f64, d: f64, tau: f64, p: f64, s: f64) -> f64 {
    let s2 = s * s;
    (4.0 * s2 * tau * tau + s2 + 1.0).sqrt() * (d - 2.0 * h * s) / ((s2 + 1.0) * p.sqrt())
}

/// Closed-form derivative `w = u'` of the invariant profile.
pub fn hyperbolic_w(h: f64, d: f64, tau: f64, s: f64) -> Result<f64> {
    let p = hyperbolic_p(h, d, s);
    if !(p > 0.0) {
        return Err(Error::OutsideDomain);
    }
    Ok(2.0 * tau / (s * s + 1.0) - sign_h(h) * hyp_integrand(h, d, tau, p, s))
}

/// Left side of the first-order equation for `w` minus `|H|`; `w'` by a five-point stencil.
pub fn hyperbolic_ode_residual(h: f64, d: f64, tau: f64, s: f64) -> Result<f64> {
    let gap = hyperbolic_roots(h, d)
        .iter()
        .map(|r| (s - r).abs())
        .fold(f64::INFINITY, f64::min);
    let step = 1e-3 * (1.0 + s.abs()).min(gap);
    let w = hyperbolic_w(h, d, tau, s)?;
    let wp1 = hyperbolic_w(h, d, tau, s + step)?;
    let wm1 = hyperbolic_w(h, d, tau, s - step)?;
    let wp2 = hyperbolic_w(h, d, tau, s + 2.0 * step)?;
    let wm2 = hyperbolic_w(h, d, tau, s - 2.0 * step)?;
    let dw = (-wp2 + 8.0 * wp1 - 8.0 * wm1 + wm2) / (12.0 * step);
    Ok(hyperbolic_ode_lhs(tau, s, w, dw) - h.abs())
}

/// Mean curvature of the invariant graph with `u' = w`, `u'' = dw`.
pub fn hyperbolic_ode_lhs(tau: f64, s: f64, w: f64, dw: f64) -> f64 {
    let s2 = s * s;
    let t2 = tau * tau;
    let num = (s2 * (4.0 * t2 + 1.0) + 1.0) * dw
        + s * w * ((s2 + 1.0) * w * w - 6.0 * tau * w + 8.0 * t2 + 2.0);
    let den = 2.0 * ((s2 + 1.0) * w * w - 4.0 * tau * w + 4.0 * t2 + 1.0).powf(1.5);
    num / den
}

/// Sampling controls for [`hyperbolic_profile_with`].
#[derive(Debug, Clone, Copy)]
pub struct HypSampling {
    /// Largest distance from the root (or from 0) covered by the samples.
    pub extent: f64,
    pub n: usize,
}

impl Default for HypSampling {
    fn default() -> Self {
        HypSampling {
            extent: 50.0,
            n: 401,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HyperbolicProfile {
    pub h: f64,
    pub d: f64,
    pub tau: f64,
    pub case: HyperbolicCase,
    pub branch: Branch,
    pub roots: Vec<f64>,
    pub samples: Vec<ProfileSample>,
    /// Limit of `u` at the root bounding the branch.
    pub root_limit: Option<AsymptoticValue>,
    pub base: f64,
    /// Integral of the singular part from the root to `base` (two-root case).
    #[serde(skip)]
    base_offset: f64,
}

pub fn hyperbolic_profile(h: f64, d: f64, tau: f64, branch: Branch) -> Result<HyperbolicProfile> {
    hyperbolic_profile_with(h, d, tau, branch, HypSampling::default())
}

pub fn hyperbolic_profile_with(
    h: f64,
    d: f64,
    tau: f64,
    branch: Branch,
    sampling: HypSampling,
) -> Result<HyperbolicProfile> {
    check_subcritical(h)?;
    let case = hyperbolic_case(h, d);
    match (case, branch) {
        (HyperbolicCase::Entire, Branch::Full) => {}
        (HyperbolicCase::Entire, _) | (_, Branch::Full) => return Err(Error::CaseMismatch),
        _ => {}
    }
    if sampling.n < 2 || !(sampling.extent > 0.0) {
        return Err(Error::TooFewSamples {
            needed: 2,
            have: sampling.n,
        });
    }
    let roots = hyperbolic_roots(h, d);
    let root = match branch {
        Branch::Plus => roots.last().copied(),
        Branch::Minus => roots.first().copied(),
        Branch::Full => None,
    };
    let dir = if branch == Branch::Minus { -1.0 } else { 1.0 };
    let base = root.map_or(0.0, |r| r + dir);
    let mut profile = HyperbolicProfile {
        h,
        d,
        tau,
        case,
        branch,
        roots,
        samples: Vec::with_capacity(sampling.n),
        root_limit: None,
        base,
        base_offset: 0.0,
    };
    if case == HyperbolicCase::TwoRoots {
        let r = root.expect("two roots");
        profile.base_offset = profile.root_zone_integral(r, dir, 1.0)?;
        let limit = 2.0 * tau * r.atan() + sign_h(h) * profile.base_offset;
        profile.root_limit = Some(AsymptoticValue::Finite(limit));
    } else if case == HyperbolicCase::SingleRoot {
        // w ~ C / |s - s0| near the root with sign(C) = -sign(H) sign(d)
        let c_sign = -sign_h(h) * d.signum();
        let up = match branch {
            Branch::Plus => -c_sign,
            _ => c_sign,
        };
        profile.root_limit = Some(if up > 0.0 {
            AsymptoticValue::PlusInfinity
        } else {
            AsymptoticValue::MinusInfinity
        });
    }

    let grid: Vec<f64> = match root {
        None => {
            let top = sampling.extent.asinh();
            (0..sampling.n)
                .map(|k| (-top + 2.0 * top * k as f64 / (sampling.n - 1) as f64).sinh())
                .collect()
        }
        Some(r) => {
            let first = 1e-6f64.min(sampling.extent * 1e-3);
            (0..sampling.n)
                .map(|k| {
                    let t = k as f64 / (sampling.n - 1) as f64;
                    r + dir * first * (sampling.extent / first).powf(t)
                })
                .collect()
        }
    };
    for s in grid {
        let value = profile.value(s)?;
        let derivative = hyperbolic_w(h, d, tau, s)?;
        profile.samples.push(ProfileSample {
            at: s,
            value,
            derivative,
        });
    }
    if dir < 0.0 {
        profile.samples.reverse();
    }
    Ok(profile)
}

impl HyperbolicProfile {
    fn integrand(&self) -> impl Fn(f64) -> f64 + '_ {
        move |s| hyp_integrand(self.h, self.d, self.tau, hyperbolic_p(self.h, self.d, s), s)
    }

    /// Integral of the radical part over a range free of roots; large ranges go through `asinh`.
    fn regular_integral(&self, a: f64, b: f64) -> Result<f64> {
        let f = self.integrand();
        if a.abs().max(b.abs()) <= 4.0 {
            integrate(f, a, b, PROFILE_TOL)
        } else {
            integrate(
                |sig: f64| f(sig.sinh()) * sig.cosh(),
                a.asinh(),
                b.asinh(),
                PROFILE_TOL,
            )
        }
    }

    /// Integral from the root `r` to `r + dir * gap` (two-root case), through
    /// `t = sqrt(|s - r|)` with `P` formed from the gap directly.
    fn root_zone_integral(&self, r: f64, dir: f64, gap: f64) -> Result<f64> {
        let spread = self.roots[1] - self.roots[0];
        let (h, d, tau) = (self.h, self.d, self.tau);
        let g = |t: f64| {
            let delta = t * t;
            let p = (1.0 - 4.0 * h * h) * delta * (delta + spread);
            2.0 * t * hyp_integrand(h, d, tau, p, r + dir * delta)
        };
        Ok(dir * integrate(g, 0.0, gap.sqrt(), PROFILE_TOL)?)
    }

    pub fn contains(&self, s: f64) -> bool {
        if !s.is_finite() {
            return false;
        }
        match self.branch {
            Branch::Full => true,
            Branch::Plus => s > *self.roots.last().unwrap_or(&f64::NEG_INFINITY),
            Branch::Minus => s < *self.roots.first().unwrap_or(&f64::INFINITY),
        }
    }

    /// Integral of the radical part from `base` to `s`.
    fn radical_part(&self, s: f64) -> Result<f64> {
        match self.case {
            HyperbolicCase::Entire => self.regular_integral(0.0, s),
            HyperbolicCase::TwoRoots => {
                let dir = if self.branch == Branch::Minus {
                    -1.0
                } else {
                    1.0
                };
                let r = self.base - dir;
                let from_root = if (s - r).abs() <= 1.0 {
                    self.root_zone_integral(r, dir, (s - r).abs())?
                } else {
                    self.base_offset + self.regular_integral(self.base, s)?
                };
                Ok(from_root - self.base_offset)
            }
            HyperbolicCase::SingleRoot => {
                let dir = if self.branch == Branch::Minus {
                    -1.0
                } else {
                    1.0
                };
                let r = self.base - dir;
                let gap = (s - r).abs();
                if gap < 1.0 {
                    let (h, d, tau) = (self.h, self.d, self.tau);
                    // t = r + dir e^sigma removes the 1/|t - r| blow-up; P = d^2 (t - r)^2
                    integrate(
                        |sig: f64| {
                            let e = sig.exp();
                            dir * hyp_integrand(h, d, tau, d * d * e * e, r + dir * e) * e
                        },
                        0.0,
                        gap.ln(),
                        PROFILE_TOL,
                    )
                } else {
                    self.regular_integral(self.base, s)
                }
            }
        }
    }

    /// `u(s) = 2 tau arctan s - sign(H) * (integral from base to s)`.
    pub fn value(&self, s: f64) -> Result<f64> {
        if !self.contains(s) {
            return Err(Error::OutsideDomain);
        }
        Ok(2.0 * self.tau * s.atan() - sign_h(self.h) * self.radical_part(s)?)
    }

    pub fn derivative(&self, s: f64) -> Result<f64> {
        if !self.contains(s) {
            return Err(Error::OutsideDomain);
        }
        hyperbolic_w(self.h, self.d, self.tau, s)
    }

    pub fn predicted_log_coefficient(&self) -> f64 {
        invariant_slope(self.h.abs(), self.tau)
    }

    pub fn csv_rows(&self) -> Vec<[f64; 3]> {
        self.samples
            .iter()
            .map(|s| [s.at, s.value, s.derivative])
            .collect()
    }
}

/// `2H sqrt(1 + 4 tau^2) / sqrt(1 - 4H^2)`.
pub fn invariant_slope(h: f64, tau: f64) -> f64 {
    2.0 * h * (1.0 + 4.0 * tau * tau).sqrt() / (1.0 - 4.0 * h * h).sqrt()
}

/// Parameter `s` along the geodesic through `(x0, y0)` of the half-plane, at arclength `rho`.
pub fn radial_reparam(x0: f64, y0: f64, phi: f64, rho: f64) -> f64 {
    (x0 * (rho + phi).cosh() + y0 * rho.sinh()) / (y0 * phi.cosh())
}

// ---------------------------------------------------------------------------
// tail fits

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AsymptoticQuantity {
    RotSlope,
    RotCorrection,
    HypLogCoeff,
    HypSlope,
}

impl AsymptoticQuantity {
    pub fn tolerance(self) -> f64 {
        match self {
            AsymptoticQuantity::RotCorrection => 5e-2,
            _ => 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticReport {
    pub quantity: AsymptoticQuantity,
    pub fitted: f64,
    pub predicted: f64,
    pub window: (f64, f64),
    /// Relative tolerance (absolute when `predicted` is below 1 in magnitude).
    pub tolerance: f64,
    pub pass: bool,
}

impl AsymptoticReport {
    fn new(quantity: AsymptoticQuantity, fitted: f64, predicted: f64, window: (f64, f64)) -> Self {
        let tolerance = quantity.tolerance();
        let pass = (fitted - predicted).abs() <= tolerance * predicted.abs().max(1.0);
        AsymptoticReport {
            quantity,
            fitted,
            predicted,
            window,
            tolerance,
            pass,
        }
    }
}

pub enum ProfileRef<'a> {
    Rotational(&'a RotationalProfile),
    Hyperbolic(&'a HyperbolicProfile),
}

impl<'a> From<&'a RotationalProfile> for ProfileRef<'a> {
    fn from(p: &'a RotationalProfile) -> Self {
        ProfileRef::Rotational(p)
    }
}

impl<'a> From<&'a HyperbolicProfile> for ProfileRef<'a> {
    fn from(p: &'a HyperbolicProfile) -> Self {
        ProfileRef::Hyperbolic(p)
    }
}

/// Minimum reach of a rotational profile for tail fits.
pub const MIN_TAIL_RHO: f64 = 15.0;

pub fn asymptotic_check<'a>(
    profile: impl Into<ProfileRef<'a>>,
    quantity: AsymptoticQuantity,
) -> Result<AsymptoticReport> {
    match (profile.into(), quantity) {
        (ProfileRef::Rotational(p), AsymptoticQuantity::RotSlope) => {
            let window = rotational_window(p, 5.0)?;
            let pts: Vec<&ProfileSample> = p.samples.iter().filter(|s| s.at >= window.0).collect();
            let rows: Vec<Vec<f64>> = pts.iter().map(|s| vec![s.at, 1.0, (-s.at).exp()]).collect();
            let y: Vec<f64> = pts.iter().map(|s| s.value).collect();
            let c = least_squares(&rows, &y)?;
            Ok(AsymptoticReport::new(
                quantity,
                c[0],
                p.predicted_slope(),
                window,
            ))
        }
        (ProfileRef::Rotational(p), AsymptoticQuantity::RotCorrection) => {
            let window = rotational_window(p, 10.0)?;
            let pts: Vec<&ProfileSample> = p.samples.iter().filter(|s| s.at >= window.0).collect();
            let rows: Vec<Vec<f64>> = pts
                .iter()
                .map(|s| vec![1.0, (-s.at).exp(), (-2.0 * s.at).exp()])
                .collect();
            let y: Vec<f64> = pts.iter().map(|s| s.derivative).collect();
            let c = least_squares(&rows, &y)?;
            // v' ~ A + K e^{-rho} integrates to v ~ A rho + B - K e^{-rho}
            Ok(AsymptoticReport::new(
                quantity,
                -c[1],
                p.predicted_correction(),
                window,
            ))
        }
        (ProfileRef::Hyperbolic(p), AsymptoticQuantity::HypLogCoeff) => {
            let dir = if p.branch == Branch::Minus { -1.0 } else { 1.0 };
            let window = (10.0, 12.0);
            let mut rows = Vec::new();
            let mut y = Vec::new();
            for k in 0..=40 {
                let ls = window.0 + (window.1 - window.0) * k as f64 / 40.0;
                let s = ls.exp();
                rows.push(vec![ls, 1.0, 1.0 / s]);
                y.push(p.value(dir * s)?);
            }
            let c = least_squares(&rows, &y)?;
            Ok(AsymptoticReport::new(
                quantity,
                c[0],
                p.predicted_log_coefficient(),
                window,
            ))
        }
        (ProfileRef::Hyperbolic(p), AsymptoticQuantity::HypSlope) => {
            hyperbolic_slope_along(p, 0.0, 1.0, 0.0)
        }
        _ => Err(Error::CaseMismatch),
    }
}

fn rotational_window(p: &RotationalProfile, width: f64) -> Result<(f64, f64)> {
    if p.rho_max < MIN_TAIL_RHO || p.rho_max - width < p.rho_min + 1.0 {
        return Err(Error::WindowTooShort);
    }
    let window = (p.rho_max - width, p.rho_max);
    let count = p.samples.iter().filter(|s| s.at >= window.0).count();
    if count < 8 {
        return Err(Error::WindowTooShort);
    }
    Ok(window)
}

/// Tail slope of `u(s(rho))` for the geodesic reparameterization through `(x0, y0)`.
pub fn hyperbolic_slope_along(
    p: &HyperbolicProfile,
    x0: f64,
    y0: f64,
    phi: f64,
) -> Result<AsymptoticReport> {
    if !(y0 > 0.0) {
        return Err(Error::DomainError);
    }
    let dir = if p.branch == Branch::Minus { -1.0 } else { 1.0 };
    let window = (MIN_TAIL_RHO, MIN_TAIL_RHO + 5.0);
    let mut rows = Vec::new();
    let mut y = Vec::new();
    for k in 0..=50 {
        let rho = window.0 + (window.1 - window.0) * k as f64 / 50.0;
        let s = radial_reparam(x0, y0, phi, rho);
        rows.push(vec![rho, 1.0, (-rho).exp()]);
        y.push(p.value(dir * s)?);
    }
    let c = least_squares(&rows, &y)?;
    Ok(AsymptoticReport::new(
        AsymptoticQuantity::HypSlope,
        c[0],
        p.predicted_log_coefficient(),
        window,
    ))
}
