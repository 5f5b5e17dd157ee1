//! Entire graphs with prescribed asymptotic values by exhaustion with disks.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperbolic::ModelPoint;
use crate::killing::{check_subcritical, KillingModelSpec};

use super::barriers::{lower_barrier, upper_barrier, Barrier, BarrierKind, IdealArc};
use super::field::{solve_dirichlet, MeshField, SolveOptions, SolveReport};
use super::mesh::{exhaustion_radius, exhaustion_rings, ring_disk_mesh};

/// Comparison graphs checked against every iterate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarrierPlan {
    /// `(angle of the touching ideal point, translation distance)` of upper barriers.
    pub upper: Vec<(f64, f64)>,
    pub lower: Vec<IdealArc>,
}

impl Default for BarrierPlan {
    fn default() -> Self {
        let quarter = PI / 2.0;
        BarrierPlan {
            upper: (0..4).map(|k| (k as f64 * quarter, 1.0)).collect(),
            lower: (0..4)
                .map(|k| IdealArc {
                    from: k as f64 * quarter,
                    to: (k + 1) as f64 * quarter,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntireOptions {
    /// Largest hyperbolic edge length of the exhaustion meshes.
    pub mesh_h: f64,
    pub solve: SolveOptions,
}

impl Default for EntireOptions {
    fn default() -> Self {
        EntireOptions {
            mesh_h: 0.2,
            solve: SolveOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarrierCheck {
    pub kind: BarrierKind,
    pub label: String,
    /// Vertical shift that puts the barrier on the right side of the data on the disk boundary.
    pub shift: f64,
    /// Smallest signed margin over the shared nodes (negative beyond tolerance means a violation).
    pub worst_margin: f64,
    pub nodes_checked: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntireLevel {
    pub n: usize,
    pub rho: f64,
    pub nodes: usize,
    pub mesh_h: f64,
    pub min: f64,
    pub max: f64,
    pub within_bounds: bool,
    /// Sup-norm difference to the previous iterate on the disk `D_2`.
    pub sup_diff_d2: Option<f64>,
    pub barriers: Vec<BarrierCheck>,
    pub solve: SolveReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntireReport {
    pub target_h: f64,
    pub tau: f64,
    pub phi_range: [f64; 2],
    pub eps_h: f64,
    pub d2_nodes: usize,
    pub levels: Vec<EntireLevel>,
}

impl EntireReport {
    pub fn sup_differences(&self) -> Vec<f64> {
        self.levels.iter().filter_map(|l| l.sup_diff_d2).collect()
    }
}

fn phi_range<F: Fn(f64) -> f64>(phi: &F) -> [f64; 2] {
    let n = 3600;
    (0..n).fold([f64::INFINITY, f64::NEG_INFINITY], |acc, k| {
        let v = phi(2.0 * PI * k as f64 / n as f64);
        [acc[0].min(v), acc[1].max(v)]
    })
}

fn check_barrier(
    field: &MeshField,
    barrier: &Barrier,
    label: String,
    data: &[f64],
    eps: f64,
) -> BarrierCheck {
    let mesh = &field.mesh;
    let upper = barrier.kind == BarrierKind::UpperRotational;
    let evals: Vec<Option<f64>> = mesh
        .nodes
        .iter()
        .map(|p| barrier.eval(p[0], p[1]))
        .collect();
    // the shift that makes the barrier dominate (or minorize) the data on the boundary
    let mut shift: f64 = if upper {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    };
    for i in 0..mesh.nodes.len() {
        if let (true, Some(b)) = (mesh.is_boundary(i), evals[i]) {
            shift = if upper {
                shift.max(data[i] - b)
            } else {
                shift.min(data[i] - b)
            };
        }
    }
    if !shift.is_finite() {
        // no boundary node in the barrier's domain: nothing to compare
        return BarrierCheck {
            kind: barrier.kind,
            label,
            shift: 0.0,
            worst_margin: f64::INFINITY,
            nodes_checked: 0,
            pass: true,
        };
    }
    let mut worst = f64::INFINITY;
    let mut checked = 0;
    for (i, e) in evals.iter().enumerate() {
        if let Some(b) = e {
            let margin = if upper {
                b + shift - field.values[i]
            } else {
                field.values[i] - b - shift
            };
            worst = worst.min(margin);
            checked += 1;
        }
    }
    BarrierCheck {
        kind: barrier.kind,
        label,
        shift,
        worst_margin: worst,
        nodes_checked: checked,
        pass: worst >= -eps,
    }
}

/// Solves on the disks of Euclidean radius `1 - 1/(n+1)`, `n = 2..=n_max`,
/// with data `phi(angle)` (the data pulled back from the ideal circle), in
/// the H-cylinder model of `(target_h, tau)`.
pub fn solve_entire<F: Fn(f64) -> f64>(
    phi: F,
    target_h: f64,
    tau: f64,
    n_max: usize,
    options: &EntireOptions,
    plan: &BarrierPlan,
) -> Result<(Vec<MeshField>, EntireReport)> {
    check_subcritical(target_h)?;
    if n_max < 2 {
        return Err(Error::DomainError);
    }
    let spec = KillingModelSpec::h_cylinder(target_h, tau)?;
    let range = phi_range(&phi);
    // ring spacing chosen so that the largest disk has edges of at most mesh_h
    let mut spacing = 0.85 * options.mesh_h;
    let mut radii = exhaustion_rings(n_max, spacing);
    for _ in 0..60 {
        if ring_disk_mesh(&radii, spacing, 0)?.h <= options.mesh_h {
            break;
        }
        spacing *= 0.95;
        radii = exhaustion_rings(n_max, spacing);
    }
    let rho2 = exhaustion_radius(2);
    let mut barriers: Vec<(Barrier, String)> = Vec::new();
    for &(angle, c) in &plan.upper {
        let q = ModelPoint::ideal_disk(angle);
        barriers.push((
            upper_barrier(&q, c, target_h, tau)?,
            format!("upper q={angle:.6} c={c}"),
        ));
    }
    if target_h >= 0.0 {
        for arc in &plan.lower {
            barriers.push((
                lower_barrier(*arc, target_h, tau, 0.0)?,
                format!("lower arc=({:.6},{:.6})", arc.from, arc.to),
            ));
        }
    }
    let mut fields: Vec<MeshField> = Vec::new();
    let mut levels = Vec::new();
    let mut d2_nodes = 0;
    let mut eps_max: f64 = 0.0;
    for n in 2..=n_max {
        let rho_n = exhaustion_radius(n);
        let count = radii
            .iter()
            .take_while(|r| **r <= rho_n * (1.0 + 1e-12))
            .count();
        let mesh = Arc::new(ring_disk_mesh(&radii[..count], spacing, 0)?);
        if n == 2 {
            d2_nodes = mesh.nodes.len();
        }
        let data = |_: u32, x: f64, y: f64| phi(y.atan2(x).rem_euclid(2.0 * PI));
        let (field, report) =
            solve_dirichlet(mesh.clone(), &spec, target_h, &data, &options.solve)?;
        let eps = 10.0 * mesh.h;
        eps_max = eps_max.max(eps);
        let (lo, hi) = field
            .values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
                (a.min(*v), b.max(*v))
            });
        let boundary_data: Vec<f64> = mesh.nodes.iter().map(|p| data(0, p[0], p[1])).collect();
        let mut checks = Vec::new();
        for (b, label) in &barriers {
            let check = check_barrier(&field, b, label.clone(), &boundary_data, eps);
            if !check.pass {
                let node = (0..mesh.nodes.len())
                    .find(|&i| {
                        b.eval(mesh.nodes[i][0], mesh.nodes[i][1]).is_some_and(|v| {
                            let m = if check.kind == BarrierKind::UpperRotational {
                                v + check.shift - field.values[i]
                            } else {
                                field.values[i] - v - check.shift
                            };
                            m < -eps
                        })
                    })
                    .unwrap_or(0);
                return Err(Error::BarrierViolation {
                    node,
                    detail: format!(
                        "{} at n = {n}: margin {:.3e}",
                        check.label, check.worst_margin
                    ),
                });
            }
            checks.push(check);
        }
        let sup_diff_d2 = fields.last().map(|prev: &MeshField| {
            (0..d2_nodes)
                .filter(|&i| {
                    let p = mesh.nodes[i];
                    2.0 * p[0].hypot(p[1]).atanh() <= rho2 * (1.0 + 1e-12)
                })
                .map(|i| (field.values[i] - prev.values[i]).abs())
                .fold(0.0, f64::max)
        });
        levels.push(EntireLevel {
            n,
            rho: rho_n,
            nodes: mesh.nodes.len(),
            mesh_h: mesh.h,
            min: lo,
            max: hi,
            within_bounds: lo >= range[0] - eps && hi <= range[1] + eps,
            sup_diff_d2,
            barriers: checks,
            solve: report,
        });
        fields.push(field);
    }
    Ok((
        fields,
        EntireReport {
            target_h,
            tau,
            phi_range: range,
            eps_h: eps_max,
            d2_nodes,
            levels,
        },
    ))
}
