//! Adaptive Gauss-Kronrod quadrature (7-point Gauss, 15-point Kronrod) with
//! helpers for inverse-square-root endpoint singularities.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Absolute and relative targets; a panel set is accepted once the summed
/// error estimate is below `max(abs, rel * |value|)`.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_panels: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-12,
            rel: 1e-12,
            max_panels: 4000,
        }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Tolerance {
            abs,
            rel,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx) + f(center + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    Panel {
        a,
        b,
        value: k * half,
        error: ((k - g) * half).abs(),
    }
}

/// Integrates `f` over `[a, b]` (either order). Non-finite samples are reported
/// as a quadrature failure rather than propagated silently.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if b < a {
        return integrate(f, b, a, tol).map(|v| -v);
    }
    let first = kronrod(&f, a, b);
    let mut total = first.value;
    let mut err = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    while err > tol.abs.max(tol.rel * total.abs()) {
        if heap.len() >= tol.max_panels {
            break;
        }
        let worst = heap.pop().expect("heap never empty here");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            break;
        }
        let left = kronrod(&f, worst.a, mid);
        let right = kronrod(&f, mid, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // recompute the sums to shed accumulated rounding from the running updates
    let (total, err) = heap
        .iter()
        .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
    if !total.is_finite() {
        return Err(Error::NonFinite("quadrature sum".into()));
    }
    if err > 10.0 * tol.abs.max(tol.rel * total.abs()) {
        return Err(Error::Quadrature {
            estimate: total,
            error: err,
        });
    }
    Ok(total)
}

/// Integral over `[a, b]` of an integrand with an inverse-square-root
/// singularity at `a`, via `r = a + t^2`.
pub fn integrate_sqrt_left<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<f64> {
    let span = b - a;
    let sign = span.signum();
    let top = span.abs().sqrt();
    integrate(move |t| 2.0 * t * f(a + sign * t * t), 0.0, top, tol).map(|v| sign * v)
}

/// Integral over `[a, b]` with inverse-square-root singularities at both ends.
pub fn integrate_sqrt_both<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<f64> {
    let mid = 0.5 * (a + b);
    let left = integrate_sqrt_left(&f, a, mid, tol)?;
    let right = integrate_sqrt_left(&f, b, mid, tol)?;
    Ok(left - right)
}

/// Iterated two-dimensional quadrature over `{(x, y): x in [x0, x1], lo(x) <= y <= hi(x)}`.
pub fn integrate_2d<F, L, U>(f: F, x0: f64, x1: f64, lo: L, hi: U, tol: Tolerance) -> Result<f64>
where
    F: Fn(f64, f64) -> f64,
    L: Fn(f64) -> f64,
    U: Fn(f64) -> f64,
{
    let inner_tol = Tolerance {
        abs: tol.abs * 0.1,
        rel: tol.rel * 0.1,
        max_panels: tol.max_panels,
    };
    let failed = std::cell::Cell::new(None);
    let outer = integrate(
        |x| {
            let (a, b) = (lo(x), hi(x));
            if b <= a {
                return 0.0;
            }
            match integrate(|y| f(x, y), a, b, inner_tol) {
                Ok(v) => v,
                Err(e) => {
                    failed.set(Some(e));
                    0.0
                }
            }
        },
        x0,
        x1,
        tol,
    )?;
    match failed.into_inner() {
        Some(e) => Err(e),
        None => Ok(outer),
    }
}
