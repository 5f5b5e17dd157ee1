//! Triangulations of hyperbolic domains in a single chart.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hyperbolic::{cayley_inv, disk_distance, ArcShape, Chart};

#[derive(Debug, Clone)]
pub struct Mesh {
    pub chart: Chart,
    pub nodes: Vec<[f64; 2]>,
    /// Counterclockwise triangles.
    pub cells: Vec<[usize; 3]>,
    /// Boundary edges with their marker, oriented with the domain on the left.
    pub boundary_edges: Vec<([usize; 2], u32)>,
    /// Smallest marker among the incident boundary edges; `None` for interior nodes.
    pub node_markers: Vec<Option<u32>>,
    /// Largest hyperbolic edge length.
    pub h: f64,
    /// Geodesic curvature of each marked boundary piece, when known.
    pub boundary_curvature: BTreeMap<u32, f64>,
}

pub fn chart_distance(chart: Chart, p: [f64; 2], q: [f64; 2]) -> f64 {
    match chart {
        Chart::Disk => disk_distance(C64::new(p[0], p[1]), C64::new(q[0], q[1])),
        Chart::HalfPlane => {
            let chord = ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt();
            2.0 * (chord / (2.0 * (p[1] * q[1]).sqrt())).asinh()
        }
    }
}

fn signed_area(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
}

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl Mesh {
    /// Builds a mesh, orienting cells counterclockwise. `edge_marker` labels
    /// every boundary edge (an edge with a single incident cell).
    pub fn new<F>(
        chart: Chart,
        nodes: Vec<[f64; 2]>,
        mut cells: Vec<[usize; 3]>,
        edge_marker: F,
    ) -> Result<Mesh>
    where
        F: Fn([usize; 2]) -> Option<u32>,
    {
        for (k, cell) in cells.iter_mut().enumerate() {
            if cell.iter().any(|&i| i >= nodes.len())
                || cell[0] == cell[1]
                || cell[1] == cell[2]
                || cell[0] == cell[2]
            {
                return Err(Error::DegenerateCell(k));
            }
            let area = signed_area(nodes[cell[0]], nodes[cell[1]], nodes[cell[2]]);
            if !(area.abs() > 1e-300) || !area.is_finite() {
                return Err(Error::DegenerateCell(k));
            }
            if area < 0.0 {
                cell.swap(1, 2);
            }
        }
        for p in &nodes {
            let inside = match chart {
                Chart::Disk => p[0] * p[0] + p[1] * p[1] < 1.0,
                Chart::HalfPlane => p[1] > 0.0,
            };
            if !inside {
                return Err(Error::DomainError);
            }
        }
        let mut count: HashMap<(usize, usize), (usize, [usize; 2])> = HashMap::new();
        for cell in &cells {
            for e in 0..3 {
                let (a, b) = (cell[e], cell[(e + 1) % 3]);
                let entry = count.entry(key(a, b)).or_insert((0, [a, b]));
                entry.0 += 1;
            }
        }
        let mut boundary_edges = Vec::new();
        let mut node_markers: Vec<Option<u32>> = vec![None; nodes.len()];
        for (n, edge) in count.values() {
            match n {
                1 => {
                    let m = edge_marker(*edge).ok_or_else(|| {
                        Error::MalformedDomain(format!("boundary edge {edge:?} has no marker"))
                    })?;
                    boundary_edges.push((*edge, m));
                    for &v in edge {
                        node_markers[v] = Some(node_markers[v].map_or(m, |old| old.min(m)));
                    }
                }
                2 => {}
                _ => {
                    return Err(Error::MalformedDomain(format!(
                        "edge {edge:?} is shared by {n} cells"
                    )))
                }
            }
        }
        boundary_edges.sort_unstable();
        let mut h: f64 = 0.0;
        for (a, b) in count.keys() {
            h = h.max(chart_distance(chart, nodes[*a], nodes[*b]));
        }
        Ok(Mesh {
            chart,
            nodes,
            cells,
            boundary_edges,
            node_markers,
            h,
            boundary_curvature: BTreeMap::new(),
        })
    }

    /// Builds a mesh from per-node markers; a boundary edge takes the larger marker of its ends.
    pub fn from_node_markers(
        chart: Chart,
        nodes: Vec<[f64; 2]>,
        cells: Vec<[usize; 3]>,
        markers: &[Option<u32>],
    ) -> Result<Mesh> {
        if markers.len() != nodes.len() {
            return Err(Error::MalformedDomain(
                "marker count differs from node count".into(),
            ));
        }
        Mesh::new(chart, nodes, cells, |[a, b]| {
            Some(markers[a]?.max(markers[b]?))
        })
    }

    pub fn with_boundary_curvature(mut self, marker: u32, kappa: f64) -> Mesh {
        self.boundary_curvature.insert(marker, kappa);
        self
    }

    pub fn is_boundary(&self, i: usize) -> bool {
        self.node_markers[i].is_some()
    }

    /// Neighbouring nodes of every node, sorted.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for c in &self.cells {
            for e in 0..3 {
                let (a, b) = (c[e], c[(e + 1) % 3]);
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }

    /// Hyperbolic area of the triangulated region (edge-midpoint rule per cell).
    pub fn area(&self) -> f64 {
        self.cells
            .iter()
            .map(|c| {
                let p = [self.nodes[c[0]], self.nodes[c[1]], self.nodes[c[2]]];
                triangle_metric_area(self.chart, p[0], p[1], p[2])
            })
            .sum()
    }

    /// Boundary loops as ordered node lists, each traversed with the domain on the left.
    pub fn boundary_loops(&self) -> Vec<Vec<usize>> {
        let mut next: HashMap<usize, usize> = HashMap::new();
        for ([a, b], _) in &self.boundary_edges {
            next.insert(*a, *b);
        }
        let mut seen = vec![false; self.nodes.len()];
        let mut loops = Vec::new();
        let mut starts: Vec<usize> = next.keys().copied().collect();
        starts.sort_unstable();
        for s in starts {
            if seen[s] {
                continue;
            }
            let mut lp = vec![s];
            seen[s] = true;
            let mut cur = next[&s];
            while cur != s {
                seen[cur] = true;
                lp.push(cur);
                cur = match next.get(&cur) {
                    Some(&n) => n,
                    None => break,
                };
            }
            loops.push(lp);
        }
        loops
    }

    /// Applies a node map (e.g. a change of chart); orientation is restored afterwards.
    pub fn map_nodes<F: Fn([f64; 2]) -> [f64; 2]>(&self, chart: Chart, f: F) -> Result<Mesh> {
        let nodes = self.nodes.iter().map(|p| f(*p)).collect();
        let markers: HashMap<(usize, usize), u32> = self
            .boundary_edges
            .iter()
            .map(|([a, b], m)| (key(*a, *b), *m))
            .collect();
        let mut out = Mesh::new(chart, nodes, self.cells.clone(), |[a, b]| {
            markers.get(&key(a, b)).copied()
        })?;
        out.boundary_curvature = self.boundary_curvature.clone();
        Ok(out)
    }

    /// Red refinement: every triangle is split into four. Midpoints of
    /// boundary edges are passed through `project` with the edge marker.
    pub fn refine<P: Fn(u32, [f64; 2]) -> [f64; 2]>(&self, project: P) -> Result<Mesh> {
        let markers: HashMap<(usize, usize), u32> = self
            .boundary_edges
            .iter()
            .map(|([a, b], m)| (key(*a, *b), *m))
            .collect();
        let mut nodes = self.nodes.clone();
        let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
        let mut new_markers: HashMap<(usize, usize), u32> = HashMap::new();
        let mut cells = Vec::with_capacity(4 * self.cells.len());
        for c in &self.cells {
            let mut m = [0usize; 3];
            for e in 0..3 {
                let (a, b) = (c[e], c[(e + 1) % 3]);
                let k = key(a, b);
                m[e] = *mid.entry(k).or_insert_with(|| {
                    let p = [
                        0.5 * (nodes[a][0] + nodes[b][0]),
                        0.5 * (nodes[a][1] + nodes[b][1]),
                    ];
                    let p = match markers.get(&k) {
                        Some(&mk) => project(mk, p),
                        None => p,
                    };
                    nodes.push(p);
                    nodes.len() - 1
                });
                if let Some(&mk) = markers.get(&k) {
                    new_markers.insert(key(a, m[e]), mk);
                    new_markers.insert(key(m[e], b), mk);
                }
            }
            cells.push([c[0], m[0], m[2]]);
            cells.push([m[0], c[1], m[1]]);
            cells.push([m[2], m[1], c[2]]);
            cells.push([m[0], m[1], m[2]]);
        }
        let mut out = Mesh::new(self.chart, nodes, cells, |[a, b]| {
            new_markers.get(&key(a, b)).copied()
        })?;
        out.boundary_curvature = self.boundary_curvature.clone();
        Ok(out)
    }
}

/// Conformal factor squared of a chart.
pub fn lambda_sq(chart: Chart, p: [f64; 2]) -> f64 {
    match chart {
        Chart::Disk => {
            let l = 2.0 / (1.0 - p[0] * p[0] - p[1] * p[1]);
            l * l
        }
        Chart::HalfPlane => 1.0 / (p[1] * p[1]),
    }
}

/// Hyperbolic area of a straight triangle by the edge-midpoint rule.
pub fn triangle_metric_area(chart: Chart, a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    let m = |p: [f64; 2], q: [f64; 2]| [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])];
    let area = signed_area(a, b, c).abs();
    area * (lambda_sq(chart, m(a, b)) + lambda_sq(chart, m(b, c)) + lambda_sq(chart, m(c, a))) / 3.0
}

/// Triangulates the band between two polylines whose points are listed in a
/// common sweep parameter (`key`), advancing along whichever side is behind.
fn zipper(lower: &[(usize, f64)], upper: &[(usize, f64)], cells: &mut Vec<[usize; 3]>) {
    let (mut i, mut j) = (0, 0);
    while i + 1 < lower.len() || j + 1 < upper.len() {
        let advance_lower = if i + 1 >= lower.len() {
            false
        } else if j + 1 >= upper.len() {
            true
        } else {
            lower[i + 1].1 <= upper[j + 1].1
        };
        if advance_lower {
            cells.push([lower[i].0, lower[i + 1].0, upper[j].0]);
            i += 1;
        } else {
            cells.push([lower[i].0, upper[j + 1].0, upper[j].0]);
            j += 1;
        }
    }
}

/// Disk centred at the origin of the disk chart, built from concentric rings
/// at the given hyperbolic radii (increasing, positive). Ring `k` carries
/// `max(6, ceil(2 pi sinh(rho_k) / spacing))` nodes.
pub fn ring_disk_mesh(radii: &[f64], spacing: f64, marker: u32) -> Result<Mesh> {
    if radii.is_empty()
        || radii.windows(2).any(|w| w[1] <= w[0])
        || radii[0] <= 0.0
        || spacing <= 0.0
    {
        return Err(Error::MalformedDomain(
            "ring radii must be positive and increasing".into(),
        ));
    }
    let mut nodes = vec![[0.0, 0.0]];
    let mut rings: Vec<Vec<(usize, f64)>> = Vec::new();
    for (k, &rho) in radii.iter().enumerate() {
        let m = ((2.0 * PI * rho.sinh() / spacing).ceil() as usize).max(6);
        let r = (0.5 * rho).tanh();
        let offset = if k % 2 == 1 { 0.5 } else { 0.0 };
        let ring = (0..m)
            .map(|j| {
                let theta = 2.0 * PI * (j as f64 + offset) / m as f64;
                nodes.push([r * theta.cos(), r * theta.sin()]);
                (nodes.len() - 1, theta)
            })
            .collect();
        rings.push(ring);
    }
    let mut cells = Vec::new();
    let first = &rings[0];
    for j in 0..first.len() {
        cells.push([0, first[j].0, first[(j + 1) % first.len()].0]);
    }
    for k in 0..rings.len() - 1 {
        let close = |ring: &[(usize, f64)]| {
            let mut v = ring.to_vec();
            v.push((ring[0].0, ring[0].1 + 2.0 * PI));
            v
        };
        let mut inner = close(&rings[k]);
        let mut outer = close(&rings[k + 1]);
        // both sweeps start at the smaller of the two first angles
        let start = inner[0].1.min(outer[0].1);
        if inner[0].1 > start {
            inner.insert(
                0,
                (
                    inner[inner.len() - 2].0,
                    inner[inner.len() - 2].1 - 2.0 * PI,
                ),
            );
            inner.pop();
        }
        if outer[0].1 > start {
            outer.insert(
                0,
                (
                    outer[outer.len() - 2].0,
                    outer[outer.len() - 2].1 - 2.0 * PI,
                ),
            );
            outer.pop();
        }
        zipper(&inner, &outer, &mut cells);
    }
    let last = *radii.last().expect("nonempty");
    let mesh = Mesh::new(Chart::Disk, nodes, cells, |_| Some(marker))?;
    Ok(mesh.with_boundary_curvature(marker, 1.0 / last.tanh()))
}

fn uniform_radii(rho_max: f64, step: f64) -> Vec<f64> {
    let k = (rho_max / step).ceil().max(1.0) as usize;
    (1..=k).map(|i| rho_max * i as f64 / k as f64).collect()
}

/// Hyperbolic disk of radius `rho_max` around the origin with all edges at most `h`.
pub fn polar_disk_mesh(rho_max: f64, h: f64, marker: u32) -> Result<Mesh> {
    if !(rho_max > 0.0 && h > 0.0) {
        return Err(Error::MalformedDomain(
            "radius and mesh size must be positive".into(),
        ));
    }
    let mut scale = 0.85;
    for _ in 0..40 {
        let mesh = ring_disk_mesh(&uniform_radii(rho_max, scale * h), scale * h, marker)?;
        if mesh.h <= h {
            return Ok(mesh);
        }
        scale *= 0.95;
    }
    Err(Error::MalformedDomain(
        "could not meet the mesh size".into(),
    ))
}

/// Hyperbolic disk of radius `rho_max` around the origin, triangulated as the
/// image of a regular hexagonal lattice with `k` cells per hexagon side. A
/// lattice point at hexagonal norm `t` goes to hyperbolic radius `t rho_max`
/// along its own direction, so every interior node has six neighbours.
pub fn hex_disk_mesh_k(rho_max: f64, k: usize, marker: u32) -> Result<Mesh> {
    if !(rho_max > 0.0) || k == 0 {
        return Err(Error::MalformedDomain(
            "radius and subdivision must be positive".into(),
        ));
    }
    let ki = k as i64;
    let s3 = 3f64.sqrt();
    let side = (2 * ki + 1) as usize;
    let mut index = vec![usize::MAX; side * side];
    let slot = |i: i64, j: i64| ((i + ki) as usize) * side + (j + ki) as usize;
    let mut nodes = Vec::new();
    let mut on_boundary = Vec::new();
    for i in -ki..=ki {
        for j in -ki..=ki {
            let norm = i.abs().max(j.abs()).max((i + j).abs());
            if norm > ki {
                continue;
            }
            let p = [i as f64 + 0.5 * j as f64, 0.5 * s3 * j as f64];
            let len = p[0].hypot(p[1]);
            let r = (0.5 * rho_max * norm as f64 / k as f64).tanh();
            index[slot(i, j)] = nodes.len();
            nodes.push(if len == 0.0 {
                [0.0, 0.0]
            } else {
                [p[0] * r / len, p[1] * r / len]
            });
            on_boundary.push(norm == ki);
        }
    }
    let get = |i: i64, j: i64| -> Option<usize> {
        if i.abs() > ki || j.abs() > ki {
            return None;
        }
        let v = index[slot(i, j)];
        (v != usize::MAX).then_some(v)
    };
    let mut cells = Vec::new();
    for i in -ki..=ki {
        for j in -ki..=ki {
            let Some(a) = get(i, j) else { continue };
            if let (Some(b), Some(c)) = (get(i + 1, j), get(i, j + 1)) {
                cells.push([a, b, c]);
            }
            if let (Some(b), Some(c)) = (get(i + 1, j - 1), get(i + 1, j)) {
                cells.push([a, b, c]);
            }
        }
    }
    let mesh = Mesh::new(Chart::Disk, nodes, cells, |[a, b]| {
        (on_boundary[a] && on_boundary[b]).then_some(marker)
    })?;
    Ok(mesh.with_boundary_curvature(marker, 1.0 / rho_max.tanh()))
}

/// [`hex_disk_mesh_k`] with the coarsest subdivision whose edges are at most `h`.
pub fn hex_disk_mesh(rho_max: f64, h: f64, marker: u32) -> Result<Mesh> {
    if !(h > 0.0) {
        return Err(Error::MalformedDomain("mesh size must be positive".into()));
    }
    let mut k = ((rho_max / h).ceil() as usize).max(1);
    loop {
        let mesh = hex_disk_mesh_k(rho_max, k, marker)?;
        if mesh.h <= h {
            return Ok(mesh);
        }
        k += 1;
    }
}

/// Hyperbolic radius of the exhaustion disk with Euclidean radius `1 - 1/(n+1)`.
pub fn exhaustion_radius(n: usize) -> f64 {
    2.0 * (1.0 - 1.0 / (n as f64 + 1.0)).atanh()
}

/// Ring radii shared by all exhaustion disks up to `n_max`: uniform rings of
/// step `step`, plus the radii of the disks themselves.
pub fn exhaustion_rings(n_max: usize, step: f64) -> Vec<f64> {
    let fixed: Vec<f64> = (2..=n_max).map(exhaustion_radius).collect();
    let top = *fixed.last().unwrap_or(&exhaustion_radius(2));
    let mut radii: Vec<f64> = uniform_radii(top, step)
        .into_iter()
        .filter(|r| fixed.iter().all(|f| (r - f).abs() >= 0.5 * step))
        .collect();
    radii.extend(fixed);
    radii.sort_by(|a, b| a.partial_cmp(b).expect("finite radii"));
    radii
}

/// Radial projection onto the circle of Euclidean radius `r` (for refining disk meshes).
pub fn project_to_circle(r: f64) -> impl Fn(u32, [f64; 2]) -> [f64; 2] {
    move |_, p| {
        let n = (p[0] * p[0] + p[1] * p[1]).sqrt();
        [p[0] * r / n, p[1] * r / n]
    }
}

/// Moves a disk-chart mesh to the half-plane chart.
pub fn disk_to_half_plane(mesh: &Mesh) -> Result<Mesh> {
    if mesh.chart != Chart::Disk {
        return Err(Error::ChartMismatch);
    }
    mesh.map_nodes(Chart::HalfPlane, |p| {
        let w = cayley_inv(C64::new(p[0], p[1]));
        [w.re, w.im]
    })
}

/// Region between two arcs that share their endpoints `p -> q` (both
/// parameterized from `p` to `q`). Marker `first` labels the first arc and
/// the two corners, `second` the other arc. Arcs are represented as
/// straight segments between their sampled points.
pub fn lens_mesh(
    first: &ArcShape,
    second: &ArcShape,
    spacing: f64,
    markers: (u32, u32),
) -> Result<Mesh> {
    let hyp_len = |s: &ArcShape| -> f64 {
        let n = 400;
        (0..n)
            .map(|k| {
                let a = s.point(k as f64 / n as f64);
                let b = s.point((k + 1) as f64 / n as f64);
                disk_distance(a, b)
            })
            .sum()
    };
    let len = hyp_len(first).max(hyp_len(second));
    let columns = ((len / spacing).ceil() as usize).max(2);
    // columns equally spaced in hyperbolic arclength along the longer arc
    let guide = if hyp_len(first) >= hyp_len(second) {
        first
    } else {
        second
    };
    let fine = 4000;
    let mut cum = vec![0.0];
    for k in 0..fine {
        let a = guide.point(k as f64 / fine as f64);
        let b = guide.point((k + 1) as f64 / fine as f64);
        cum.push(cum[k] + disk_distance(a, b));
    }
    let total = cum[fine];
    let param_at = |s: f64| -> f64 {
        let idx = cum.partition_point(|&c| c < s).clamp(1, fine);
        let (c0, c1) = (cum[idx - 1], cum[idx]);
        ((idx - 1) as f64 + if c1 > c0 { (s - c0) / (c1 - c0) } else { 0.0 }) / fine as f64
    };
    let mut nodes: Vec<[f64; 2]> = Vec::new();
    let mut markers_of: Vec<u32> = Vec::new();
    let mut cols: Vec<Vec<(usize, f64)>> = Vec::new();
    for c in 0..=columns {
        let t = if c == 0 {
            0.0
        } else if c == columns {
            1.0
        } else {
            param_at(total * c as f64 / columns as f64)
        };
        let a = first.point(t);
        let b = second.point(t);
        let width = disk_distance(a, b);
        let segs = if c == 0 || c == columns {
            0
        } else {
            ((width / spacing).ceil() as usize).max(1)
        };
        let mut col = Vec::new();
        if segs == 0 {
            nodes.push([a.re, a.im]);
            markers_of.push(markers.0);
            col.push((nodes.len() - 1, 0.0));
        } else {
            for k in 0..=segs {
                // hyperbolically uniform along the segment
                let s = k as f64 / segs as f64;
                let z = hyperbolic_lerp(a, b, s);
                nodes.push([z.re, z.im]);
                markers_of.push(if k == 0 {
                    markers.0
                } else if k == segs {
                    markers.1
                } else {
                    u32::MAX
                });
                col.push((nodes.len() - 1, s));
            }
        }
        cols.push(col);
    }
    let mut cells = Vec::new();
    for c in 0..columns {
        let (left, right) = (&cols[c], &cols[c + 1]);
        if left.len() == 1 {
            for k in 0..right.len() - 1 {
                cells.push([left[0].0, right[k].0, right[k + 1].0]);
            }
        } else if right.len() == 1 {
            for k in 0..left.len() - 1 {
                cells.push([left[k].0, right[0].0, left[k + 1].0]);
            }
        } else {
            zipper(left, right, &mut cells);
        }
    }
    let node_marker = |i: usize| -> Option<u32> {
        let m = markers_of[i];
        (m != u32::MAX).then_some(m)
    };
    let corner = |i: usize| i == cols[0][0].0 || i == cols[columns][0].0;
    Mesh::new(Chart::Disk, nodes, cells, |[a, b]| {
        let (ma, mb) = (node_marker(a)?, node_marker(b)?);
        Some(match (corner(a), corner(b)) {
            (true, false) => mb,
            (false, true) => ma,
            _ => ma.max(mb),
        })
    })
}

/// Point at fraction `s` of the hyperbolic distance along the Euclidean segment `a b`.
fn hyperbolic_lerp(a: C64, b: C64, s: f64) -> C64 {
    let total = disk_distance(a, b);
    if total == 0.0 {
        return a;
    }
    let target = s * total;
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if disk_distance(a, a + (b - a) * mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    a + (b - a) * (0.5 * (lo + hi))
}

/// Bucket grid for point location.
pub struct Locator<'a> {
    mesh: &'a Mesh,
    origin: [f64; 2],
    cell: f64,
    dims: [usize; 2],
    buckets: Vec<Vec<usize>>,
}

impl<'a> Locator<'a> {
    pub fn new(mesh: &'a Mesh) -> Locator<'a> {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in &mesh.nodes {
            for d in 0..2 {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        let extent = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-12);
        let per_side = ((mesh.cells.len() as f64).sqrt().ceil() as usize).max(1);
        let cell = extent / per_side as f64 * (1.0 + 1e-9);
        let dims = [
            (((hi[0] - lo[0]) / cell).floor() as usize + 1),
            (((hi[1] - lo[1]) / cell).floor() as usize + 1),
        ];
        let mut buckets = vec![Vec::new(); dims[0] * dims[1]];
        for (k, c) in mesh.cells.iter().enumerate() {
            let (mut a, mut b) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
            for &i in c {
                for d in 0..2 {
                    a[d] = a[d].min(mesh.nodes[i][d]);
                    b[d] = b[d].max(mesh.nodes[i][d]);
                }
            }
            let i0 = ((a[0] - lo[0]) / cell).floor() as usize;
            let i1 = (((b[0] - lo[0]) / cell).floor() as usize).min(dims[0] - 1);
            let j0 = ((a[1] - lo[1]) / cell).floor() as usize;
            let j1 = (((b[1] - lo[1]) / cell).floor() as usize).min(dims[1] - 1);
            for i in i0..=i1 {
                for j in j0..=j1 {
                    buckets[j * dims[0] + i].push(k);
                }
            }
        }
        Locator {
            mesh,
            origin: lo,
            cell,
            dims,
            buckets,
        }
    }

    /// Cell containing `p` and its barycentric coordinates.
    pub fn locate(&self, p: [f64; 2]) -> Option<(usize, [f64; 3])> {
        let fi = (p[0] - self.origin[0]) / self.cell;
        let fj = (p[1] - self.origin[1]) / self.cell;
        if fi < 0.0 || fj < 0.0 {
            return None;
        }
        let (i, j) = (fi.floor() as usize, fj.floor() as usize);
        if i >= self.dims[0] || j >= self.dims[1] {
            return None;
        }
        let mut best: Option<(usize, [f64; 3], f64)> = None;
        for &k in &self.buckets[j * self.dims[0] + i] {
            let c = self.mesh.cells[k];
            let [a, b, cc] = [
                self.mesh.nodes[c[0]],
                self.mesh.nodes[c[1]],
                self.mesh.nodes[c[2]],
            ];
            let total = signed_area(a, b, cc);
            let l = [
                signed_area(p, b, cc) / total,
                signed_area(a, p, cc) / total,
                signed_area(a, b, p) / total,
            ];
            let worst = l.iter().cloned().fold(f64::INFINITY, f64::min);
            if best.as_ref().is_none_or(|(_, _, w)| worst > *w) {
                best = Some((k, l, worst));
            }
        }
        match best {
            Some((k, l, w)) if w >= -1e-10 => Some((k, l)),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_disk_is_conforming() {
        let m = polar_disk_mesh(1.0, 0.3, 0).unwrap();
        assert!(m.h <= 0.3);
        assert_eq!(m.boundary_loops().len(), 1);
        let exact = 2.0 * PI * (1.0f64.cosh() - 1.0);
        assert!((m.area() - exact).abs() / exact < 0.05);
    }
}
