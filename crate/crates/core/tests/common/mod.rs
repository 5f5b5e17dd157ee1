#![allow(dead_code)]

use std::f64::consts::PI;
use std::sync::Arc;

use cmclab_core::hyperbolic::{CurvatureArc, ModelPoint, Side};
use cmclab_core::js::{EdgeClass, JsDomain, JsEdge};
use cmclab_core::killing::KillingModelSpec;
use cmclab_core::solver::mesh::lens_mesh;
use cmclab_core::solver::{solve_dirichlet_from, Mesh, MeshField, SolveOptions};

pub const LENS_H: f64 = 0.2;
pub const LENS_TAU: f64 = 0.3;
pub const LENS_MARK_A: u32 = 1;
pub const LENS_MARK_C: u32 = 2;

/// Lens between an arc of curvature 2H (marker 1, domain on its left) and an
/// arc of curvature 0.9 bulging the other way (marker 2).
pub fn lens_arcs() -> (CurvatureArc, CurvatureArc) {
    let p = ModelPoint::disk(-0.5, 0.0);
    let q = ModelPoint::disk(0.5, 0.0);
    (
        CurvatureArc {
            p,
            q,
            kappa: 2.0 * LENS_H,
            side: Side::Left,
        },
        CurvatureArc {
            p,
            q,
            kappa: 0.9,
            side: Side::Right,
        },
    )
}

pub fn lens(spacing: f64) -> Arc<Mesh> {
    let (a, c) = lens_arcs();
    Arc::new(
        lens_mesh(
            &a.shape().unwrap(),
            &c.shape().unwrap(),
            spacing,
            (LENS_MARK_A, LENS_MARK_C),
        )
        .unwrap()
        .with_boundary_curvature(LENS_MARK_A, 2.0 * LENS_H)
        .with_boundary_curvature(LENS_MARK_C, 0.9),
    )
}

/// Solutions with data `n` on the marked arc and 0 elsewhere, `n = 1..=n_max`
/// by continuation; returns the fields for the requested `n`.
pub fn lens_sequence(mesh: &Arc<Mesh>, marker: u32, keep: &[usize]) -> Vec<MeshField> {
    let spec = KillingModelSpec::cylinder(LENS_TAU);
    let n_max = keep.iter().copied().max().unwrap_or(0);
    let mut prev: Option<Vec<f64>> = None;
    let mut out = Vec::new();
    for n in 1..=n_max {
        // the two corners carry the marker of the A arc
        let data = move |m: u32, _: f64, _: f64| if m == marker { n as f64 } else { 0.0 };
        let (f, rep) = solve_dirichlet_from(
            mesh.clone(),
            &spec,
            LENS_H,
            &data,
            prev.as_deref(),
            &SolveOptions::default(),
        )
        .unwrap();
        assert!(rep.converged);
        prev = Some(f.values.clone());
        if keep.contains(&n) {
            out.push(f);
        }
    }
    out
}

pub fn ideal(deg: f64) -> ModelPoint {
    ModelPoint::ideal_disk(deg * PI / 180.0)
}

/// Ideal square with alternating A and B geodesic edges.
pub fn ideal_square() -> JsDomain {
    use EdgeClass::*;
    JsDomain {
        h: 0.0,
        vertices: vec![ideal(45.0), ideal(135.0), ideal(225.0), ideal(315.0)],
        edges: vec![
            JsEdge::new(A, 0, 1),
            JsEdge::new(B, 1, 2),
            JsEdge::new(A, 2, 3),
            JsEdge::new(B, 3, 0),
        ],
    }
}

/// The square with its first vertex rotated by `delta` radians.
pub fn perturbed_square(delta: f64) -> JsDomain {
    let mut d = ideal_square();
    d.vertices[0] = ModelPoint::ideal_disk(PI / 4.0 + delta);
    d
}

/// Two ideal arcs, an A and two B edges, and a C edge meeting at finite corners.
pub fn sample_admissible() -> JsDomain {
    use EdgeClass::*;
    JsDomain {
        h: 0.1,
        vertices: vec![
            ideal(0.0),
            ideal(30.0),
            ModelPoint::disk(-0.13, 0.5),
            ModelPoint::disk(-0.41, 0.44),
            ideal(240.0),
            ideal(300.0),
        ],
        edges: vec![
            JsEdge::new(D, 0, 1),
            JsEdge::new(C, 1, 2).with_kappa(0.5),
            JsEdge::new(A, 2, 3),
            JsEdge::new(B, 3, 4),
            JsEdge::new(D, 4, 5),
            JsEdge::new(B, 5, 0),
        ],
    }
}

/// Ideal triangle with two A edges meeting at an ideal vertex.
pub fn double_a_triangle() -> JsDomain {
    use EdgeClass::*;
    JsDomain {
        h: 0.0,
        vertices: vec![ideal(0.0), ideal(120.0), ideal(240.0)],
        edges: vec![
            JsEdge::new(A, 0, 1),
            JsEdge::new(A, 1, 2),
            JsEdge::new(B, 2, 0),
        ],
    }
}

/// An ideal arc whose geodesic chord leaves the domain through a finite vertex.
pub fn pinched() -> JsDomain {
    use EdgeClass::*;
    JsDomain {
        h: 0.0,
        vertices: vec![
            ideal(-45.0),
            ideal(45.0),
            ModelPoint::disk(0.75, 0.0),
            ideal(135.0),
            ideal(225.0),
        ],
        edges: vec![
            JsEdge::new(D, 0, 1),
            JsEdge::new(C, 1, 2).with_kappa(0.0),
            JsEdge::new(C, 2, 3).with_kappa(0.0),
            JsEdge::new(C, 3, 4).with_kappa(0.0),
            JsEdge::new(C, 4, 0).with_kappa(0.0),
        ],
    }
}

/// Ideal quadrilateral with geodesic C edges.
pub fn ideal_quadrilateral() -> JsDomain {
    use EdgeClass::*;
    JsDomain {
        h: 0.0,
        vertices: vec![ideal(10.0), ideal(100.0), ideal(200.0), ideal(290.0)],
        edges: (0..4)
            .map(|k| JsEdge::new(C, k, (k + 1) % 4).with_kappa(0.0))
            .collect(),
    }
}
