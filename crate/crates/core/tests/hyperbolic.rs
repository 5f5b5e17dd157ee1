use std::f64::consts::PI;

use cmclab_core::hyperbolic::*;
use cmclab_core::quadrature::{integrate, Tolerance};
use cmclab_core::Error;
use proptest::prelude::*;

fn lens(kappa: f64) -> Vec<CurvatureArc> {
    let w = ModelPoint::ideal_disk(PI);
    let e = ModelPoint::ideal_disk(0.0);
    vec![
        arc_through(w, e, kappa, Side::Left).unwrap(),
        arc_through(e, w, kappa, Side::Left).unwrap(),
    ]
}

fn family(size: f64) -> TruncationFamily {
    TruncationFamily::unchecked(vec![
        Horocycle::new(ModelPoint::ideal_disk(PI), size).unwrap(),
        Horocycle::new(ModelPoint::ideal_disk(0.0), size).unwrap(),
    ])
}

/// Truncated lens area by iterated quadrature of the disk area element.
fn lens_area_by_slices(kappa: f64, size: f64) -> f64 {
    let radius = 1.0 / kappa;
    let offset = (radius * radius - 1.0).sqrt();
    let top = |x: f64| -offset + (radius * radius - x * x).sqrt();
    let horo_r = 0.5 * size;
    let horo_c = 1.0 - horo_r;
    let tol = Tolerance::new(1e-12, 1e-11);
    let slice = |x: f64| {
        let yt = top(x);
        let hole = (horo_r * horo_r - (x.abs() - horo_c).powi(2))
            .max(0.0)
            .sqrt();
        if hole >= yt {
            return 0.0;
        }
        let a2 = 1.0 - x * x;
        let area =
            |y0: f64, y1: f64| integrate(|y| 4.0 / (a2 - y * y).powi(2), y0, y1, tol).unwrap();
        2.0 * area(hole, yt)
    };
    let edge = 1.0 - size;
    let mut total = 0.0;
    for (a, b) in [(-1.0, -edge), (-edge, edge), (edge, 1.0)] {
        total += integrate(slice, a, b, Tolerance::new(1e-11, 1e-10)).unwrap();
    }
    total
}

#[test]
fn distance_examples() {
    let o = ModelPoint::disk(0.0, 0.0);
    let p = ModelPoint::disk(0.5f64.tanh(), 0.0);
    assert!((hyp_distance(&o, &p).unwrap() - 1.0).abs() < 1e-14);
    let a = ModelPoint::half_plane(0.0, 1.0);
    let b = ModelPoint::half_plane(0.0, std::f64::consts::E);
    assert!((hyp_distance(&a, &b).unwrap() - 1.0).abs() < 1e-14);
}

#[test]
fn curvature_constant_on_grid() {
    let pairs = [
        (ModelPoint::ideal_disk(PI), ModelPoint::ideal_disk(0.0)),
        (ModelPoint::disk(-0.3, 0.2), ModelPoint::disk(0.5, -0.1)),
        (ModelPoint::ideal_disk(2.0), ModelPoint::disk(0.1, 0.3)),
    ];
    for (p, q) in pairs {
        for kappa in [0.0, 0.2, -0.2, 0.5, -0.5, 0.9, -0.9] {
            for side in [Side::Left, Side::Right] {
                let arc = arc_through(p, q, kappa, side).unwrap();
                let shape = arc.shape().unwrap();
                assert!((shape.point(0.0) - p.to_disk()).norm() < 1e-12);
                assert!((shape.point(1.0) - q.to_disk()).norm() < 1e-12);
                for i in 1..=20 {
                    let t = i as f64 / 21.0;
                    let k = side.sign() * sampled_curvature(&shape, t, 2e-4);
                    assert!(
                        (k - kappa).abs() < 1e-6,
                        "kappa {kappa} side {side:?} t {t}: {k}"
                    );
                }
            }
        }
    }
}

#[test]
fn hypercycle_offset_matches_closed_form() {
    let arc = arc_through(
        ModelPoint::ideal_disk(PI),
        ModelPoint::ideal_disk(0.0),
        0.5,
        Side::Right,
    )
    .unwrap();
    // the hypercycle at distance d from the diameter has curvature tanh d
    let top = arc.shape().unwrap().point(0.5);
    let d = 0.5f64.atanh();
    assert!(top.re.abs() < 1e-12);
    assert!((top.im - (0.5 * d).tanh()).abs() < 1e-12);
}

#[test]
fn circle_arcs_inside() {
    let p = ModelPoint::disk(-0.1, 0.0);
    let q = ModelPoint::disk(0.1, 0.0);
    // a circle of curvature 3 has radius acoth 3, too small to span +-0.2
    assert!(arc_through(
        ModelPoint::disk(-0.2, 0.0),
        ModelPoint::disk(0.2, 0.0),
        3.0,
        Side::Left
    )
    .is_err());
    let arc = arc_through(p, q, 3.0, Side::Left).unwrap();
    let s = arc.shape().unwrap();
    assert!(s.sweep.abs() < PI);
    assert!(matches!(
        arc_through(ModelPoint::ideal_disk(0.0), q, 1.5, Side::Left),
        Err(Error::NoSuchArc { .. })
    ));
}

#[test]
fn flipped_arc_has_same_points() {
    let arc = arc_through(
        ModelPoint::disk(-0.5, 0.1),
        ModelPoint::disk(0.4, 0.3),
        0.7,
        Side::Left,
    )
    .unwrap();
    let flip = arc.flipped();
    assert_eq!(flip.kappa, -0.7);
    let a = arc.sample(11).unwrap();
    let b = flip.sample(11).unwrap();
    for (u, v) in a.iter().zip(&b) {
        assert!((u - v).norm() < 1e-12);
    }
    let rev = arc.reversed().sample(11).unwrap();
    for (u, v) in a.iter().zip(rev.iter().rev()) {
        assert!((u - v).norm() < 1e-12);
    }
}

#[test]
fn finite_geodesic_length() {
    let p = ModelPoint::disk((-0.5f64).tanh(), 0.0);
    let q = ModelPoint::disk(0.5f64.tanh(), 0.0);
    let arc = arc_through(p, q, 0.0, Side::Left).unwrap();
    // each half has polar radius 1
    assert!((arc_length(&arc, None).unwrap() - 2.0).abs() < 1e-10);
    let short = arc_through(
        ModelPoint::disk((-0.25f64).tanh(), 0.0),
        ModelPoint::disk(0.25f64.tanh(), 0.0),
        0.0,
        Side::Left,
    )
    .unwrap();
    assert!((arc_length(&short, None).unwrap() - 1.0).abs() < 1e-10);
}

#[test]
fn truncated_diameter_length() {
    let arc = arc_through(
        ModelPoint::ideal_disk(PI),
        ModelPoint::ideal_disk(0.0),
        0.0,
        Side::Left,
    )
    .unwrap();
    for size in [0.5, 0.1, 0.01] {
        let nearest = ModelPoint::disk(1.0 - size, 0.0);
        let expected = 2.0 * hyp_distance(&ModelPoint::disk(0.0, 0.0), &nearest).unwrap();
        let got = arc_length(&arc, Some(&family(size))).unwrap();
        assert!((got - expected).abs() < 1e-8, "{got} vs {expected}");
    }
}

#[test]
fn truncation_needs_horocycles() {
    let arc = arc_through(
        ModelPoint::ideal_disk(PI),
        ModelPoint::ideal_disk(0.0),
        0.3,
        Side::Left,
    )
    .unwrap();
    assert_eq!(arc_length(&arc, None), Err(Error::InfiniteLength));
}

#[test]
fn ideal_polygons() {
    for (k, expected) in [(3usize, PI), (4, 2.0 * PI), (6, 4.0 * PI)] {
        let v: Vec<ModelPoint> = (0..k)
            .map(|i| ModelPoint::ideal_disk(0.3 + 2.0 * PI * i as f64 / k as f64))
            .collect();
        let arcs: Vec<CurvatureArc> = (0..k)
            .map(|i| arc_through(v[i], v[(i + 1) % k], 0.0, Side::Left).unwrap())
            .collect();
        assert!((region_area(&arcs, None).unwrap() - expected).abs() < 1e-10);
    }
}

#[test]
fn open_boundary_rejected() {
    let a = arc_through(
        ModelPoint::disk(0.0, 0.0),
        ModelPoint::disk(0.5, 0.0),
        0.0,
        Side::Left,
    )
    .unwrap();
    let b = arc_through(
        ModelPoint::disk(0.5, 0.1),
        ModelPoint::disk(0.0, 0.0),
        0.0,
        Side::Left,
    )
    .unwrap();
    assert_eq!(region_area(&[a, b], None), Err(Error::OpenBoundary));
}

#[test]
fn hypercycle_lens_area_matches_quadrature() {
    for kappa in [0.5, 0.3] {
        for size in [0.2, 0.05] {
            let gb = region_area(&lens(kappa), Some(&family(size))).unwrap();
            let slices = lens_area_by_slices(kappa, size);
            let green = region_area_green(&lens(kappa), &family(size)).unwrap();
            assert!(
                ((gb - slices) / slices).abs() < 1e-6,
                "gb {gb} slices {slices}"
            );
            assert!(
                ((green - slices) / slices).abs() < 1e-6,
                "green {green} slices {slices}"
            );
        }
    }
}

#[test]
fn lens_needs_truncation() {
    assert!(matches!(
        region_area(&lens(0.5), None),
        Err(Error::NonFinite(_))
    ));
}

#[test]
fn finite_geodesic_triangle() {
    let v = [
        ModelPoint::disk(0.0, 0.0),
        ModelPoint::disk(0.6, 0.0),
        ModelPoint::disk(0.0, 0.6),
    ];
    let arcs: Vec<CurvatureArc> = (0..3)
        .map(|i| arc_through(v[i], v[(i + 1) % 3], 0.0, Side::Left).unwrap())
        .collect();
    let area = region_area(&arcs, None).unwrap();
    // angle defect of a right isosceles triangle with legs of length 2 artanh(0.6)
    let leg = 2.0 * 0.6f64.atanh();
    let hyp = (leg.cosh() * leg.cosh()).acosh();
    let other = ((leg.tanh()) / hyp.tanh()).acos();
    assert!((area - (PI - PI / 2.0 - 2.0 * other)).abs() < 1e-10);
    let green = region_area_green(&arcs, &TruncationFamily::unchecked(vec![])).unwrap();
    assert!((green - area).abs() < 1e-9);
}

#[test]
fn isometry_examples() {
    let o = ModelPoint::disk(0.0, 0.0);
    let r = base_isometry(BaseIsometry::Rotation(1.2), &o).unwrap();
    assert!(r.x.abs() < 1e-15 && r.y.abs() < 1e-15);
    let p = base_isometry(
        BaseIsometry::ParTranslation(0.7),
        &ModelPoint::half_plane(0.1, 2.0),
    )
    .unwrap();
    assert!((p.x - 0.8).abs() < 1e-15 && p.y == 2.0);
    let a = ModelPoint::half_plane(0.0, 1.0);
    let b = ModelPoint::half_plane(0.0, 3.0);
    let c = 2.5;
    let kind = BaseIsometry::HypTranslation { c, axis: 0.0 };
    let ta = base_isometry(kind, &a).unwrap();
    assert!((ta.y - c).abs() < 1e-15 && ta.x == 0.0);
    assert!((hyp_distance(&a, &ta).unwrap() - c.ln()).abs() < 1e-14);
    let tb = base_isometry(kind, &b).unwrap();
    assert!((hyp_distance(&ta, &tb).unwrap() - hyp_distance(&a, &b).unwrap()).abs() < 1e-13);
    let ideal = base_isometry(kind, &ModelPoint::ideal_disk(0.4)).unwrap();
    assert!(ideal.ideal && (ideal.to_disk().norm() - 1.0).abs() < 1e-12);
}

fn disk_point() -> impl Strategy<Value = ModelPoint> {
    (0.0..0.95f64, 0.0..(2.0 * PI)).prop_map(|(r, t)| ModelPoint::disk(r * t.cos(), r * t.sin()))
}

fn half_plane_point() -> impl Strategy<Value = ModelPoint> {
    (-3.0..3.0f64, 0.05..4.0f64).prop_map(|(x, y)| ModelPoint::half_plane(x, y))
}

fn isometry() -> impl Strategy<Value = BaseIsometry> {
    prop_oneof![
        (-PI..PI).prop_map(BaseIsometry::Rotation),
        (0.2..5.0f64, -2.0..2.0f64).prop_map(|(c, axis)| BaseIsometry::HypTranslation { c, axis }),
        (-3.0..3.0f64).prop_map(BaseIsometry::ParTranslation),
    ]
}

fn rel_close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs())) * 10.0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn isometries_preserve_distance(p in half_plane_point(), q in half_plane_point(), kind in isometry()) {
        let d0 = hyp_distance(&p, &q).unwrap();
        let d1 = hyp_distance(&base_isometry(kind, &p).unwrap(), &base_isometry(kind, &q).unwrap()).unwrap();
        prop_assert!(rel_close(d0, d1), "{} vs {}", d0, d1);
    }

    #[test]
    fn disk_isometries_preserve_distance(p in disk_point(), q in disk_point(), kind in isometry()) {
        let d0 = hyp_distance(&p, &q).unwrap();
        let d1 = hyp_distance(&base_isometry(kind, &p).unwrap(), &base_isometry(kind, &q).unwrap()).unwrap();
        prop_assert!((d0 - d1).abs() < 1e-9 * (1.0 + d0), "{} vs {}", d0, d1);
    }

    #[test]
    fn distance_is_a_metric(p in disk_point(), q in disk_point(), r in disk_point()) {
        let pq = hyp_distance(&p, &q).unwrap();
        let qp = hyp_distance(&q, &p).unwrap();
        let pr = hyp_distance(&p, &r).unwrap();
        let rq = hyp_distance(&r, &q).unwrap();
        prop_assert!(pq >= 0.0);
        prop_assert!((pq - qp).abs() < 1e-12 * (1.0 + pq));
        prop_assert!(pq <= pr + rq + 1e-10);
    }

    #[test]
    fn chart_change_preserves_distance(p in half_plane_point(), q in half_plane_point()) {
        let d0 = hyp_distance(&p, &q).unwrap();
        let d1 = hyp_distance(&p.to_chart(Chart::Disk).unwrap(), &q.to_chart(Chart::Disk).unwrap()).unwrap();
        prop_assert!((d0 - d1).abs() < 1e-9 * (1.0 + d0));
    }

    #[test]
    fn shrinking_horocycles_lengthens(kappa in -0.9..0.9f64, size in 0.02..0.5f64) {
        let arc = arc_through(ModelPoint::ideal_disk(PI), ModelPoint::ideal_disk(0.0), kappa, Side::Left).unwrap();
        let big = arc_length(&arc, Some(&family(size))).unwrap();
        let small = arc_length(&arc, Some(&family(0.5 * size))).unwrap();
        prop_assert!(small > big);
    }
}
