//! Line-based text format for meshes and nodal fields.
//!
//! ```text
//! chart disk
//! spec {"model":"Cylinder","tau":0.3}
//! target_h 2.0000000000000000e-1
//! nodes 3
//! x y marker            (marker -1 for interior nodes)
//! cells 1
//! i j k
//! boundary 3
//! a b marker
//! curvature 1
//! marker kappa
//! values 3
//! v
//! ```
//!
//! `spec`, `target_h`, `curvature` and `values` are optional.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::hyperbolic::Chart;
use crate::killing::KillingModelSpec;

use super::field::MeshField;
use super::mesh::Mesh;

#[derive(Debug, Clone)]
pub struct MeshFile {
    pub mesh: Mesh,
    pub spec: Option<KillingModelSpec>,
    pub target_h: Option<f64>,
    pub values: Option<Vec<f64>>,
}

impl MeshFile {
    pub fn into_field(self) -> Result<MeshField> {
        let missing = |what: &str| Error::Parse(format!("field file lacks `{what}`"));
        let spec = self.spec.ok_or_else(|| missing("spec"))?;
        let target_h = self.target_h.ok_or_else(|| missing("target_h"))?;
        let values = self.values.ok_or_else(|| missing("values"))?;
        MeshField::new(Arc::new(self.mesh), values, spec, target_h)
    }
}

fn chart_name(chart: Chart) -> &'static str {
    match chart {
        Chart::Disk => "disk",
        Chart::HalfPlane => "halfplane",
    }
}

fn write_mesh_body(out: &mut String, mesh: &Mesh) {
    let _ = writeln!(out, "nodes {}", mesh.nodes.len());
    for (p, m) in mesh.nodes.iter().zip(&mesh.node_markers) {
        let marker = m.map_or(-1, i64::from);
        let _ = writeln!(out, "{:.16e} {:.16e} {marker}", p[0], p[1]);
    }
    let _ = writeln!(out, "cells {}", mesh.cells.len());
    for c in &mesh.cells {
        let _ = writeln!(out, "{} {} {}", c[0], c[1], c[2]);
    }
    let _ = writeln!(out, "boundary {}", mesh.boundary_edges.len());
    for (e, m) in &mesh.boundary_edges {
        let _ = writeln!(out, "{} {} {m}", e[0], e[1]);
    }
    if !mesh.boundary_curvature.is_empty() {
        let _ = writeln!(out, "curvature {}", mesh.boundary_curvature.len());
        for (m, k) in &mesh.boundary_curvature {
            let _ = writeln!(out, "{m} {k:.16e}");
        }
    }
}

pub fn format_mesh(mesh: &Mesh) -> String {
    let mut out = format!("chart {}\n", chart_name(mesh.chart));
    write_mesh_body(&mut out, mesh);
    out
}

pub fn format_mesh_field(field: &MeshField) -> String {
    let mut out = format!("chart {}\n", chart_name(field.mesh.chart));
    let spec = serde_json::to_string(&field.spec).expect("spec serializes");
    let _ = writeln!(out, "spec {spec}");
    let _ = writeln!(out, "target_h {:.16e}", field.target_h);
    write_mesh_body(&mut out, &field.mesh);
    let _ = writeln!(out, "values {}", field.values.len());
    for v in &field.values {
        let _ = writeln!(out, "{v:.16e}");
    }
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Option<&'a str> {
        for (k, l) in self.inner.by_ref() {
            let l = l.trim();
            if !l.is_empty() {
                self.line = k + 1;
                return Some(l);
            }
        }
        None
    }

    fn err(&self, msg: impl std::fmt::Display) -> Error {
        Error::Parse(format!("line {}: {msg}", self.line))
    }

    fn fields<const N: usize>(&mut self, what: &str) -> Result<[&'a str; N]> {
        let l = self
            .next()
            .ok_or_else(|| Error::Parse(format!("unexpected end of file in {what}")))?;
        let parts: Vec<&str> = l.split_whitespace().collect();
        parts
            .try_into()
            .map_err(|_| self.err(format!("expected {N} fields in {what}")))
    }

    fn parse<T: std::str::FromStr>(&self, s: &str) -> Result<T> {
        s.parse()
            .map_err(|_| self.err(format!("cannot parse `{s}`")))
    }
}

pub fn parse_mesh_file(text: &str) -> Result<MeshFile> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        line: 0,
    };
    let mut chart = None;
    let mut spec = None;
    let mut target_h = None;
    let mut nodes: Vec<[f64; 2]> = Vec::new();
    let mut markers: Vec<Option<u32>> = Vec::new();
    let mut cells: Vec<[usize; 3]> = Vec::new();
    let mut boundary: BTreeMap<(usize, usize), u32> = BTreeMap::new();
    let mut curvature = BTreeMap::new();
    let mut values = None;
    while let Some(header) = lines.next() {
        let (key, rest) = header
            .split_once(char::is_whitespace)
            .unwrap_or((header, ""));
        let rest = rest.trim();
        match key {
            "chart" => {
                chart = Some(match rest {
                    "disk" => Chart::Disk,
                    "halfplane" => Chart::HalfPlane,
                    other => return Err(lines.err(format!("unknown chart `{other}`"))),
                })
            }
            "spec" => spec = Some(serde_json::from_str(rest).map_err(|e| lines.err(e))?),
            "target_h" => target_h = Some(lines.parse::<f64>(rest)?),
            "nodes" => {
                let n: usize = lines.parse(rest)?;
                for _ in 0..n {
                    let [x, y, m] = lines.fields::<3>("nodes")?;
                    nodes.push([lines.parse(x)?, lines.parse(y)?]);
                    let m: i64 = lines.parse(m)?;
                    markers.push(u32::try_from(m).ok());
                }
            }
            "cells" => {
                let n: usize = lines.parse(rest)?;
                for _ in 0..n {
                    let [i, j, k] = lines.fields::<3>("cells")?;
                    cells.push([lines.parse(i)?, lines.parse(j)?, lines.parse(k)?]);
                }
            }
            "boundary" => {
                let n: usize = lines.parse(rest)?;
                for _ in 0..n {
                    let [a, b, m] = lines.fields::<3>("boundary")?;
                    let (a, b): (usize, usize) = (lines.parse(a)?, lines.parse(b)?);
                    boundary.insert((a.min(b), a.max(b)), lines.parse(m)?);
                }
            }
            "curvature" => {
                let n: usize = lines.parse(rest)?;
                for _ in 0..n {
                    let [m, k] = lines.fields::<2>("curvature")?;
                    curvature.insert(lines.parse::<u32>(m)?, lines.parse::<f64>(k)?);
                }
            }
            "values" => {
                let n: usize = lines.parse(rest)?;
                let mut v = Vec::with_capacity(n);
                for _ in 0..n {
                    let [x] = lines.fields::<1>("values")?;
                    v.push(lines.parse::<f64>(x)?);
                }
                values = Some(v);
            }
            other => return Err(lines.err(format!("unknown section `{other}`"))),
        }
    }
    let chart = chart.ok_or_else(|| Error::Parse("missing `chart` line".into()))?;
    if nodes.is_empty() || cells.is_empty() {
        return Err(Error::Parse("mesh has no nodes or no cells".into()));
    }
    let mut mesh = if boundary.is_empty() {
        Mesh::from_node_markers(chart, nodes, cells, &markers)?
    } else {
        Mesh::new(chart, nodes, cells, |[a, b]| {
            boundary.get(&(a.min(b), a.max(b))).copied()
        })?
    };
    mesh.boundary_curvature = curvature;
    Ok(MeshFile {
        mesh,
        spec,
        target_h,
        values,
    })
}
