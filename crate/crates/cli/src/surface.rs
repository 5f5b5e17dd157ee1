//! Triangulated surfaces for OBJ export.

use clap::ValueEnum;
use cmclab_core::hyperbolic::{Chart, ModelPoint};
use cmclab_core::killing::{psi, psi_inv, ModelKind, ModelPoint3};
use cmclab_core::profiles::{HyperbolicProfile, RotationalProfile};
use cmclab_core::solver::MeshField;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::output::ObjMesh;

/// Coordinates of OBJ vertices: `(x, y, t)` of the cylinder model over the
/// disk, or of the half-space model over the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
pub enum ObjChart {
    #[default]
    Disk,
    Halfspace,
}

fn embed(from: Chart, to: ObjChart, tau: f64, x: f64, y: f64, t: f64) -> Result<[f64; 3]> {
    let p = match (from, to) {
        (Chart::Disk, ObjChart::Disk) | (Chart::HalfPlane, ObjChart::Halfspace) => {
            return Ok([x, y, t])
        }
        (Chart::Disk, ObjChart::Halfspace) => {
            psi_inv(tau, &ModelPoint3::new(ModelPoint::disk(x, y), t))?
        }
        (Chart::HalfPlane, ObjChart::Disk) => {
            psi(tau, &ModelPoint3::new(ModelPoint::half_plane(x, y), t))?
        }
    };
    Ok([p.base.x, p.base.y, p.t])
}

/// Evenly thinned indices `0..n`, keeping both ends.
fn thin(n: usize, max: usize) -> Vec<usize> {
    if n <= max {
        return (0..n).collect();
    }
    let mut idx: Vec<usize> = (0..max).map(|k| k * (n - 1) / (max - 1)).collect();
    idx.dedup();
    idx
}

fn grid_faces(rows: usize, cols: usize, wrap: bool) -> Vec<[usize; 3]> {
    let mut faces = Vec::new();
    let span = if wrap { cols } else { cols - 1 };
    for i in 0..rows - 1 {
        for j in 0..span {
            let j1 = (j + 1) % cols;
            let (a, b, c, d) = (
                i * cols + j,
                i * cols + j1,
                (i + 1) * cols + j1,
                (i + 1) * cols + j,
            );
            faces.push([a, b, c]);
            faces.push([a, c, d]);
        }
    }
    faces
}

/// The rotational graph swept around the origin of the disk.
pub fn rotational_surface(
    p: &RotationalProfile,
    chart: ObjChart,
    angles: usize,
) -> Result<ObjMesh> {
    let rows: Vec<usize> = thin(p.samples.len(), 120)
        .into_iter()
        .filter(|&k| p.samples[k].at > 0.0)
        .collect();
    let mut mesh = ObjMesh::default();
    let has_center = p.samples[0].at == 0.0;
    if has_center {
        mesh.vertices.push(embed(
            Chart::Disk,
            chart,
            p.tau,
            0.0,
            0.0,
            p.samples[0].value,
        )?);
    }
    let offset = mesh.vertices.len();
    for &k in &rows {
        let s = p.samples[k];
        let r = (0.5 * s.at).tanh();
        for j in 0..angles {
            let th = 2.0 * std::f64::consts::PI * j as f64 / angles as f64;
            mesh.vertices.push(embed(
                Chart::Disk,
                chart,
                p.tau,
                r * th.cos(),
                r * th.sin(),
                s.value,
            )?);
        }
    }
    if has_center {
        for j in 0..angles {
            mesh.faces.push([0, offset + j, offset + (j + 1) % angles]);
        }
    }
    mesh.faces.extend(
        grid_faces(rows.len(), angles, true)
            .into_iter()
            .map(|f| f.map(|i| i + offset)),
    );
    Ok(mesh)
}

/// The graph `t = u(x / y)` over a band of dilations of the half-plane.
pub fn hyperbolic_surface(
    p: &HyperbolicProfile,
    chart: ObjChart,
    levels: usize,
) -> Result<ObjMesh> {
    let cols = thin(p.samples.len(), 120);
    let mut mesh = ObjMesh::default();
    for i in 0..levels {
        let y = (-3.0 + 6.0 * i as f64 / (levels - 1) as f64).exp();
        for &k in &cols {
            let s = p.samples[k];
            mesh.vertices
                .push(embed(Chart::HalfPlane, chart, p.tau, s.at * y, y, s.value)?);
        }
    }
    mesh.faces = grid_faces(levels, cols.len(), false);
    Ok(mesh)
}

/// Nodal values of a solved field over its mesh.
pub fn field_surface(field: &MeshField, chart: ObjChart) -> Result<ObjMesh> {
    if matches!(field.spec.model, ModelKind::HCylinder(_)) && chart == ObjChart::Halfspace {
        return Err(CliError::Usage(
            "--chart halfspace needs a cylinder or half-space model".into(),
        ));
    }
    let from = field.mesh.chart;
    let vertices = field
        .mesh
        .nodes
        .iter()
        .zip(&field.values)
        .map(|(p, v)| embed(from, chart, field.spec.tau, p[0], p[1], *v))
        .collect::<Result<Vec<_>>>()?;
    Ok(ObjMesh {
        vertices,
        faces: field.mesh.cells.clone(),
    })
}
