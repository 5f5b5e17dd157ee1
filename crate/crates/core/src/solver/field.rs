//! Nodal fields, the Dirichlet solver and per-cell diagnostics.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::killing::{generalized_gradient_at, KillingModelSpec};

use super::fv::{basis_gradients, FvOperator};
use super::mesh::{Locator, Mesh};
use super::sparse::{bicgstab, CsrMatrix};

#[derive(Debug, Clone)]
pub struct MeshField {
    pub mesh: Arc<Mesh>,
    pub values: Vec<f64>,
    pub spec: KillingModelSpec,
    pub target_h: f64,
}

impl MeshField {
    pub fn new(
        mesh: Arc<Mesh>,
        values: Vec<f64>,
        spec: KillingModelSpec,
        target_h: f64,
    ) -> Result<MeshField> {
        if values.len() != mesh.nodes.len() {
            return Err(Error::MalformedDomain(
                "value count differs from node count".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("field value".into()));
        }
        Ok(MeshField {
            mesh,
            values,
            spec,
            target_h,
        })
    }

    /// Field sampling `f` at the nodes.
    pub fn interpolate<F: Fn(f64, f64) -> f64>(
        mesh: Arc<Mesh>,
        spec: KillingModelSpec,
        target_h: f64,
        f: F,
    ) -> Result<MeshField> {
        let values = mesh.nodes.iter().map(|p| f(p[0], p[1])).collect();
        MeshField::new(mesh, values, spec, target_h)
    }

    /// Gradient of the linear interpolant on a cell.
    pub fn cell_gradient(&self, cell: usize) -> Result<[f64; 2]> {
        let c = self
            .mesh
            .cells
            .get(cell)
            .ok_or(Error::DegenerateCell(cell))?;
        let p = [
            self.mesh.nodes[c[0]],
            self.mesh.nodes[c[1]],
            self.mesh.nodes[c[2]],
        ];
        let g = basis_gradients(p);
        if g.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::DegenerateCell(cell));
        }
        let mut out = [0.0; 2];
        for k in 0..3 {
            out[0] += self.values[c[k]] * g[k][0];
            out[1] += self.values[c[k]] * g[k][1];
        }
        Ok(out)
    }

    /// Value of the linear interpolant at a chart point inside the mesh.
    pub fn value_at(&self, locator: &Locator, x: f64, y: f64) -> Option<f64> {
        let (k, l) = locator.locate([x, y])?;
        let c = self.mesh.cells[k];
        Some(l[0] * self.values[c[0]] + l[1] * self.values[c[1]] + l[2] * self.values[c[2]])
    }
}

fn centroid(mesh: &Mesh, cell: usize) -> [f64; 2] {
    let c = mesh.cells[cell];
    let mut out = [0.0; 2];
    for &i in &c {
        out[0] += mesh.nodes[i][0] / 3.0;
        out[1] += mesh.nodes[i][1] / 3.0;
    }
    out
}

/// `G u` on a cell, with the metric coefficients taken at the centroid.
pub fn generalized_gradient(field: &MeshField, cell: usize) -> Result<[f64; 2]> {
    let g = field.cell_gradient(cell)?;
    let p = centroid(&field.mesh, cell);
    Ok(generalized_gradient_at(
        &field.spec.coeffs_xy(p[0], p[1]),
        g,
    ))
}

/// Discrete `div (G u / W) - 2H` per node, normalized by the hyperbolic dual
/// area. Boundary nodes report zero.
pub fn mean_curvature_residual(field: &MeshField) -> Vec<f64> {
    let op = FvOperator::new(&field.mesh, &field.spec);
    let r = op.residual(&field.values, field.target_h);
    r.iter()
        .enumerate()
        .map(|(i, v)| {
            if field.mesh.is_boundary(i) {
                0.0
            } else {
                v / op.dual_area[i]
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Largest admissible area-normalized residual at interior nodes.
    pub tol: f64,
    pub max_newton: usize,
    pub linear_tol: f64,
    pub max_linear: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-8,
            max_newton: 60,
            linear_tol: 1e-11,
            max_linear: 4000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub converged: bool,
    pub newton_iterations: usize,
    /// Max area-normalized interior residual before each step and at the end.
    pub residual_history: Vec<f64>,
    pub damping: Vec<f64>,
    pub linear_iterations: Vec<usize>,
    pub warnings: Vec<String>,
    pub mesh_h: f64,
    /// Interior nodes outside `[min data - 10 h, max data + 10 h]`; only
    /// recorded when the zero section of the model has the target curvature.
    pub max_principle_violations: Vec<usize>,
    pub data_range: [f64; 2],
}

/// Dirichlet data by boundary marker and chart position.
pub trait BoundaryData {
    fn value(&self, marker: u32, x: f64, y: f64) -> f64;
}

impl<F: Fn(u32, f64, f64) -> f64> BoundaryData for F {
    fn value(&self, marker: u32, x: f64, y: f64) -> f64 {
        self(marker, x, y)
    }
}

struct Dofs {
    index: Vec<Option<usize>>,
    nodes: Vec<usize>,
}

impl Dofs {
    fn new(mesh: &Mesh) -> Dofs {
        let mut index = vec![None; mesh.nodes.len()];
        let mut nodes = Vec::new();
        for i in 0..mesh.nodes.len() {
            if !mesh.is_boundary(i) {
                index[i] = Some(nodes.len());
                nodes.push(i);
            }
        }
        Dofs { index, nodes }
    }

    /// Restricts node triplets to interior rows and columns.
    fn restrict(&self, trip: &[(usize, usize, f64)]) -> CsrMatrix {
        let t = trip
            .iter()
            .filter_map(|&(r, c, v)| Some((self.index[r]?, self.index[c]?, v)))
            .collect();
        CsrMatrix::from_triplets(self.nodes.len(), t)
    }
}

fn scaled_residual(r: &[f64], dofs: &Dofs, area: &[f64]) -> Vec<f64> {
    dofs.nodes.iter().map(|&i| r[i] / area[i]).collect()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Solves the prescribed mean curvature equation with Dirichlet data.
pub fn solve_dirichlet(
    mesh: Arc<Mesh>,
    spec: &KillingModelSpec,
    target_h: f64,
    bdata: &dyn BoundaryData,
    options: &SolveOptions,
) -> Result<(MeshField, SolveReport)> {
    solve_dirichlet_from(mesh, spec, target_h, bdata, None, options)
}

/// As [`solve_dirichlet`], starting Newton from `initial` interior values when given.
pub fn solve_dirichlet_from(
    mesh: Arc<Mesh>,
    spec: &KillingModelSpec,
    target_h: f64,
    bdata: &dyn BoundaryData,
    initial: Option<&[f64]>,
    options: &SolveOptions,
) -> Result<(MeshField, SolveReport)> {
    crate::killing::check_subcritical(target_h)?;
    let n = mesh.nodes.len();
    let mut u = vec![0.0; n];
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..n {
        if let Some(m) = mesh.node_markers[i] {
            let v = bdata.value(m, mesh.nodes[i][0], mesh.nodes[i][1]);
            if !v.is_finite() {
                return Err(Error::NonFinite(format!("boundary data at node {i}")));
            }
            u[i] = v;
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    let mut warnings = Vec::new();
    for (m, k) in &mesh.boundary_curvature {
        if *k < 2.0 * target_h.abs() {
            warnings.push(format!(
                "GeometryWarning: boundary piece {m} has geodesic curvature {k:.6} < 2|H| = {:.6}",
                2.0 * target_h.abs()
            ));
        }
    }
    let op = FvOperator::new(&mesh, spec);
    let dofs = Dofs::new(&mesh);
    let mut linear_iterations = Vec::new();
    match initial {
        Some(init) if init.len() == n => {
            for &i in &dofs.nodes {
                u[i] = init[i];
            }
        }
        Some(_) => {
            return Err(Error::MalformedDomain(
                "initial guess has the wrong length".into(),
            ))
        }
        None if !dofs.nodes.is_empty() => {
            // conformal harmonic extension of the data
            let lap = op.laplacian();
            let a = dofs.restrict(&lap);
            let mut rhs = vec![0.0; dofs.nodes.len()];
            for &(r, c, v) in &lap {
                if let (Some(ri), None) = (dofs.index[r], dofs.index[c]) {
                    rhs[ri] -= v * u[c];
                }
            }
            let mut x = vec![0.0; dofs.nodes.len()];
            let stats = bicgstab(&a, &rhs, &mut x, options.linear_tol, options.max_linear)?;
            linear_iterations.push(stats.iterations);
            for (k, &i) in dofs.nodes.iter().enumerate() {
                u[i] = x[k];
            }
        }
        None => {}
    }
    let mut residual_history = Vec::new();
    let mut damping = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    loop {
        let (r, trip) = op.residual_and_jacobian(&u, target_h);
        let scaled = scaled_residual(&r, &dofs, &op.dual_area);
        let res = max_abs(&scaled);
        residual_history.push(res);
        if !res.is_finite() {
            return Err(Error::NoConvergence {
                residual: res,
                iterations,
                damping,
            });
        }
        if res <= options.tol {
            converged = true;
            break;
        }
        if iterations >= options.max_newton {
            break;
        }
        iterations += 1;
        let a = dofs.restrict(&trip);
        let rhs: Vec<f64> = dofs.nodes.iter().map(|&i| -r[i]).collect();
        let mut delta = vec![0.0; rhs.len()];
        let stats = bicgstab(&a, &rhs, &mut delta, options.linear_tol, options.max_linear)?;
        linear_iterations.push(stats.iterations);
        let base = norm2(&scaled);
        let mut step = 1.0;
        let mut trial = u.clone();
        loop {
            for (k, &i) in dofs.nodes.iter().enumerate() {
                trial[i] = u[i] + step * delta[k];
            }
            let rt = op.residual(&trial, target_h);
            let nt = norm2(&scaled_residual(&rt, &dofs, &op.dual_area));
            if nt.is_finite() && (nt <= (1.0 - 1e-4 * step) * base || step < 1e-3) {
                break;
            }
            step *= 0.5;
        }
        damping.push(step);
        std::mem::swap(&mut u, &mut trial);
    }
    if !converged {
        return Err(Error::NoConvergence {
            residual: *residual_history.last().expect("at least one residual"),
            iterations,
            damping,
        });
    }
    let mut violations = Vec::new();
    if (target_h - spec.reference_h).abs() < 1e-15 && lo.is_finite() {
        let eps = 10.0 * mesh.h;
        for &i in &dofs.nodes {
            if u[i] < lo - eps || u[i] > hi + eps {
                violations.push(i);
            }
        }
    }
    let report = SolveReport {
        converged,
        newton_iterations: iterations,
        residual_history,
        damping,
        linear_iterations,
        warnings,
        mesh_h: mesh.h,
        max_principle_violations: violations,
        data_range: [lo, hi],
    };
    let field = MeshField::new(mesh, u, spec.clone(), target_h)?;
    Ok((field, report))
}

/// Nodal gradients recovered by a least-squares quadratic fit over the two-ring
/// neighbourhood of every node.
pub fn recovered_gradients(field: &MeshField) -> Vec<[f64; 2]> {
    let mesh = &field.mesh;
    let adj = mesh.adjacency();
    let mut out = Vec::with_capacity(mesh.nodes.len());
    let mut patch: Vec<usize> = Vec::new();
    for i in 0..mesh.nodes.len() {
        patch.clear();
        patch.extend_from_slice(&adj[i]);
        for &j in &adj[i] {
            patch.extend_from_slice(&adj[j]);
        }
        patch.sort_unstable();
        patch.dedup();
        patch.retain(|&j| j != i);
        let p = mesh.nodes[i];
        let scale = patch
            .iter()
            .map(|&j| (mesh.nodes[j][0] - p[0]).hypot(mesh.nodes[j][1] - p[1]))
            .fold(0.0, f64::max);
        // fit the differences u_j - u_i with the node value held fixed
        let rows: Vec<Vec<f64>> = patch
            .iter()
            .map(|&j| {
                let dx = (mesh.nodes[j][0] - p[0]) / scale;
                let dy = (mesh.nodes[j][1] - p[1]) / scale;
                vec![dx, dy, dx * dx, dx * dy, dy * dy]
            })
            .collect();
        let rhs: Vec<f64> = patch
            .iter()
            .map(|&j| field.values[j] - field.values[i])
            .collect();
        let g = match crate::fit::least_squares(&rows, &rhs) {
            Ok(c) => [c[0] / scale, c[1] / scale],
            Err(_) => {
                let lin: Vec<Vec<f64>> = rows.iter().map(|r| r[..2].to_vec()).collect();
                match crate::fit::least_squares(&lin, &rhs) {
                    Ok(c) => [c[0] / scale, c[1] / scale],
                    Err(_) => [0.0, 0.0],
                }
            }
        };
        out.push(g);
    }
    out
}

/// Hyperbolic norm `|grad u| / lambda` of the recovered gradients.
pub fn gradient_norms(field: &MeshField) -> Vec<f64> {
    let grads = recovered_gradients(field);
    field
        .mesh
        .nodes
        .iter()
        .zip(&grads)
        .map(|(p, g)| g[0].hypot(g[1]) / field.spec.coeffs_xy(p[0], p[1]).lambda)
        .collect()
}
