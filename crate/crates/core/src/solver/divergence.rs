//! Detection of arcs along which a sequence of solutions becomes vertical.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::fit::least_squares;
use crate::hyperbolic::{cayley, Chart, CurvatureArc, GenCircle, ModelPoint, Side};

use super::field::{gradient_norms, MeshField};

/// Escalating gradient thresholds: on the `j`-th field of the tail a node is
/// flagged only if its gradient norm exceeds `base^(first_exponent + j)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradientSchedule {
    pub base: f64,
    pub first_exponent: i32,
    /// Number of trailing fields examined.
    pub tail: usize,
    /// Clusters with fewer nodes are dropped.
    pub min_cluster: usize,
    /// Only nodes of a cluster whose last gradient is at least this fraction
    /// of the cluster maximum enter the arc fit.
    pub ridge_fraction: f64,
}

impl Default for GradientSchedule {
    fn default() -> Self {
        GradientSchedule {
            base: 10.0,
            first_exponent: 0,
            tail: 3,
            min_cluster: 6,
            ridge_fraction: 0.5,
        }
    }
}

impl GradientSchedule {
    pub fn threshold(&self, j: usize) -> f64 {
        self.base.powi(self.first_exponent + j as i32)
    }
}

/// Constant-curvature fit of one cluster, in the disk chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub nodes: Vec<usize>,
    pub center: [f64; 2],
    pub radius: f64,
    /// Geodesic curvature toward the inside of the fitted Euclidean circle.
    pub kappa: f64,
    /// Root-mean-square Euclidean distance of the kept nodes to the circle.
    pub rms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceLineReport {
    pub lines: Vec<CurvatureArc>,
    pub fits: Vec<LineFit>,
    /// Largest nodal gradient norm of every field.
    pub gradient_threshold_history: Vec<f64>,
    pub target_h: f64,
}

impl DivergenceLineReport {
    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }
}

fn disk_point(chart: Chart, p: [f64; 2]) -> C64 {
    match chart {
        Chart::Disk => C64::new(p[0], p[1]),
        Chart::HalfPlane => cayley(C64::new(p[0], p[1])),
    }
}

/// Weighted algebraic circle fit `|z|^2 + D x + E y + F = 0`.
fn kasa_fit(points: &[C64], weights: &[f64]) -> Option<(C64, f64)> {
    let rows: Vec<Vec<f64>> = points
        .iter()
        .zip(weights)
        .map(|(z, w)| vec![w * z.re, w * z.im, *w])
        .collect();
    let rhs: Vec<f64> = points
        .iter()
        .zip(weights)
        .map(|(z, w)| -w * z.norm_sqr())
        .collect();
    let c = least_squares(&rows, &rhs).ok()?;
    let center = C64::new(-0.5 * c[0], -0.5 * c[1]);
    let r2 = center.norm_sqr() - c[2];
    (r2 > 0.0).then(|| (center, r2.sqrt()))
}

fn fit_cluster(points: &[C64], weights: &[f64]) -> Option<(C64, f64, Vec<usize>, f64)> {
    let (mut center, mut radius) = kasa_fit(points, weights)?;
    let mut keep: Vec<usize> = (0..points.len()).collect();
    // one robust refit without points far from the first circle
    let dist: Vec<f64> = points
        .iter()
        .map(|z| ((z - center).norm() - radius).abs())
        .collect();
    let mut sorted = dist.clone();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let median = sorted[sorted.len() / 2];
    let cut = 3.0 * median.max(1e-12);
    let kept: Vec<usize> = keep.iter().copied().filter(|&i| dist[i] <= cut).collect();
    if kept.len() >= 3 && kept.len() < keep.len() {
        let p: Vec<C64> = kept.iter().map(|&i| points[i]).collect();
        let w: Vec<f64> = kept.iter().map(|&i| weights[i]).collect();
        if let Some((c, r)) = kasa_fit(&p, &w) {
            center = c;
            radius = r;
            keep = kept;
        }
    }
    let rms = (keep
        .iter()
        .map(|&i| ((points[i] - center).norm() - radius).powi(2))
        .sum::<f64>()
        / keep.len() as f64)
        .sqrt();
    Some((center, radius, keep, rms))
}

/// Arc of the fitted circle covering the cluster, traversed counterclockwise.
fn covering_arc(points: &[C64], center: C64, kappa: f64) -> Option<CurvatureArc> {
    let mut angles: Vec<f64> = points.iter().map(|z| (z - center).arg()).collect();
    angles.sort_by(|a, b| a.total_cmp(b));
    let n = angles.len();
    let (mut gap, mut after) = (angles[0] + 2.0 * PI - angles[n - 1], 0);
    for k in 1..n {
        if angles[k] - angles[k - 1] > gap {
            gap = angles[k] - angles[k - 1];
            after = k;
        }
    }
    let start = angles[after];
    let end = angles[(after + n - 1) % n];
    let radius = points.iter().map(|z| (z - center).norm()).sum::<f64>() / n as f64;
    let onto = |t: f64| {
        let z = center + C64::from_polar(radius, t);
        // keep the endpoints strictly inside the disk
        if z.norm() >= 1.0 - 1e-9 {
            z / z.norm() * (1.0 - 1e-9)
        } else {
            z
        }
    };
    let (p, q) = (onto(start), onto(end));
    let arc = CurvatureArc {
        p: ModelPoint::disk(p.re, p.im),
        q: ModelPoint::disk(q.re, q.im),
        kappa,
        side: Side::Left,
    };
    arc.shape().ok().map(|_| arc)
}

/// Nodes where the gradients keep exceeding the escalating thresholds over
/// the tail of `seq` are clustered along mesh edges and each cluster is
/// fitted with a circle of the disk chart, i.e. a constant-curvature arc.
///
/// Fields are compared on the longest common prefix of their node lists, so
/// nested exhaustion meshes can be passed as well.
pub fn divergence_line_detect(
    seq: &[MeshField],
    schedule: &GradientSchedule,
) -> DivergenceLineReport {
    let target_h = seq.last().map_or(0.0, |f| f.target_h);
    let norms: Vec<Vec<f64>> = seq.iter().map(gradient_norms).collect();
    let history = norms
        .iter()
        .map(|g| g.iter().cloned().fold(0.0, f64::max))
        .collect();
    let mut report = DivergenceLineReport {
        lines: Vec::new(),
        fits: Vec::new(),
        gradient_threshold_history: history,
        target_h,
    };
    if seq.len() < 3 || schedule.tail == 0 {
        return report;
    }
    let base = &seq[0].mesh;
    let common = seq
        .iter()
        .map(|f| {
            f.mesh
                .nodes
                .iter()
                .zip(&base.nodes)
                .take_while(|(a, b)| (a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12)
                .count()
        })
        .min()
        .unwrap_or(0);
    let tail = schedule.tail.min(seq.len());
    let first = seq.len() - tail;
    let flagged: Vec<bool> = (0..common)
        .map(|i| (0..tail).all(|j| norms[first + j][i] > schedule.threshold(j)))
        .collect();
    let last = seq.last().expect("nonempty");
    let adj = last.mesh.adjacency();
    let mut seen = vec![false; common];
    for s in 0..common {
        if !flagged[s] || seen[s] {
            continue;
        }
        let mut cluster = vec![s];
        seen[s] = true;
        let mut k = 0;
        while k < cluster.len() {
            for &j in &adj[cluster[k]] {
                if j < common && flagged[j] && !seen[j] {
                    seen[j] = true;
                    cluster.push(j);
                }
            }
            k += 1;
        }
        if cluster.len() < schedule.min_cluster.max(3) {
            continue;
        }
        cluster.sort_unstable();
        let top = cluster
            .iter()
            .map(|&i| norms[seq.len() - 1][i])
            .fold(0.0, f64::max);
        cluster.retain(|&i| norms[seq.len() - 1][i] >= schedule.ridge_fraction * top);
        if cluster.len() < 3 {
            continue;
        }
        let points: Vec<C64> = cluster
            .iter()
            .map(|&i| disk_point(last.mesh.chart, last.mesh.nodes[i]))
            .collect();
        let weights: Vec<f64> = cluster.iter().map(|&i| norms[seq.len() - 1][i]).collect();
        let Some((center, radius, keep, rms)) = fit_cluster(&points, &weights) else {
            continue;
        };
        let circle = GenCircle {
            alpha: 1.0 / radius,
            beta: center / radius,
            gamma: (center.norm_sqr() - radius * radius) / radius,
        };
        let kappa = circle.curvature();
        let kept: Vec<C64> = keep.iter().map(|&i| points[i]).collect();
        if let Some(arc) = covering_arc(&kept, center, kappa) {
            report.lines.push(arc);
            report.fits.push(LineFit {
                nodes: keep.iter().map(|&i| cluster[i]).collect(),
                center: [center.re, center.im],
                radius,
                kappa,
                rms,
            });
        }
    }
    report
}
