use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cmclab::flux::AuditReport;
use cmclab::js::CheckReport;
use cmclab::output::{parse_csv, to_json, ObjMesh};
use cmclab::profile::{HyperbolicReport, RotationalReport, CSV_HEADER};
use cmclab::solve::{DirichletReport, EntireRunReport};
use cmclab_core::hyperbolic::{CurvatureArc, ModelPoint, Side};
use cmclab_core::js::AuditVerdict;
use cmclab_core::profiles::{HyperbolicCase, RotationalClass};
use cmclab_core::solver::io::{format_mesh, format_mesh_field, parse_mesh_file};
use cmclab_core::solver::mesh::lens_mesh;
use serde::de::DeserializeOwned;
use serde::Serialize;

fn cmclab(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cmclab"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Parses a JSON report into its type and checks that writing it again
/// reproduces the file byte for byte.
fn json_round_trip<T: Serialize + DeserializeOwned>(path: &Path) -> T {
    let text = fs::read_to_string(path).unwrap();
    let value: T = serde_json::from_str(&text).unwrap();
    assert_eq!(to_json(&value).unwrap(), text, "{}", path.display());
    value
}

fn obj_round_trip(path: &Path) -> ObjMesh {
    let text = fs::read_to_string(path).unwrap();
    let mesh = ObjMesh::parse(&text).unwrap();
    assert_eq!(mesh.to_obj(), text);
    mesh
}

fn listing(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    names
}

#[test]
fn rotational_profile_example() {
    let dir = tempfile::tempdir().unwrap();
    let o = cmclab(
        dir.path(),
        &[
            "profile",
            "rotational",
            "--H",
            "0.25",
            "--tau",
            "0",
            "--d",
            "-0.5",
            "--rho-max",
            "20",
            "--obj",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(
        listing(dir.path()),
        ["profile.csv", "profile.json", "profile.obj"]
    );

    let csv = fs::read_to_string(dir.path().join("profile.csv")).unwrap();
    let (header, rows) = parse_csv(&csv).unwrap();
    assert_eq!(header, CSV_HEADER);
    let last = rows.last().unwrap();
    assert_eq!(last[0], 20.0);
    let slope = 0.5 / 0.75f64.sqrt();
    assert!((last[2] - slope).abs() < 1e-6, "{}", last[2]);
    // v(rho) / rho approaches the slope like 1/rho
    assert!((last[1] / 20.0 - slope).abs() < 0.05, "{}", last[1] / 20.0);

    let rep: RotationalReport = json_round_trip(&dir.path().join("profile.json"));
    assert_eq!(rep.class, RotationalClass::EntireGraph);
    assert_eq!(rep.ode_pass, Some(true));
    assert!(rep.asymptotic_slope.unwrap().pass);
    let obj = obj_round_trip(&dir.path().join("profile.obj"));
    assert!(obj.vertices.iter().all(|v| v[0].hypot(v[1]) < 1.0));
}

#[test]
fn supercritical_h_exits_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = cmclab(
        dir.path(),
        &["profile", "rotational", "--H", "0.6", "--d", "0"],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("H must satisfy |H| < 1/2"));
    assert!(!dir.path().join("profile.csv").exists());
}

#[test]
fn hyperbolic_profile_example() {
    let dir = tempfile::tempdir().unwrap();
    let o = cmclab(
        dir.path(),
        &[
            "profile",
            "hyperbolic",
            "--H",
            "0.3",
            "--d",
            "1",
            "--tau",
            "0",
            "--obj",
            "--chart",
            "halfspace",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let rep: HyperbolicReport = json_round_trip(&dir.path().join("profile.json"));
    assert_eq!(rep.case, HyperbolicCase::TwoRoots);
    assert_eq!(rep.roots.len(), 2);
    assert!((rep.roots[0] + 1.875).abs() < 1e-12 && rep.roots[1].abs() < 1e-12);
    assert!(rep.ode_residual < 1e-8);
    let obj = obj_round_trip(&dir.path().join("profile.obj"));
    assert!(obj.vertices.iter().all(|v| v[1] > 0.0));
    let (_, rows) =
        parse_csv(&fs::read_to_string(dir.path().join("profile.csv")).unwrap()).unwrap();
    assert!(rows.iter().all(|r| r[0] > rep.roots[1]));
}

#[test]
fn identical_runs_give_identical_files() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = [
        "--seed",
        "7",
        "profile",
        "hyperbolic",
        "--H",
        "0.2",
        "--d",
        "0.1",
        "--tau",
        "0.5",
    ];
    assert!(cmclab(a.path(), &args).status.success());
    assert!(cmclab(b.path(), &args).status.success());
    for name in ["profile.json", "profile.csv"] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
}

fn ideal(deg: f64) -> serde_json::Value {
    let t = deg * PI / 180.0;
    serde_json::json!({"chart": "Disk", "x": t.cos(), "y": t.sin(), "ideal": true})
}

fn square_json(first_vertex_deg: f64) -> String {
    serde_json::json!({
        "H": 0.0,
        "vertices": [ideal(first_vertex_deg), ideal(135.0), ideal(225.0), ideal(315.0)],
        "edges": [
            {"class": "A", "from": 0, "to": 1},
            {"class": "B", "from": 1, "to": 2},
            {"class": "A", "from": 2, "to": 3},
            {"class": "B", "from": 3, "to": 0},
        ],
    })
    .to_string()
}

fn js_check(domain: &str) -> (Output, tempfile::TempDir) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("domain.json");
    fs::write(&path, domain).unwrap();
    let out = dir.path().join("out");
    let o = cmclab(&out, &["js", "check", path.to_str().unwrap()]);
    (o, dir)
}

#[test]
fn square_domain_passes() {
    let (o, dir) = js_check(&square_json(45.0));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rep: CheckReport = json_round_trip(&dir.path().join("out/js_report.json"));
    assert!(rep.report.pass);
    assert!(rep.report.perimeter_check.unwrap().pass);
    assert_eq!(rep.polygons_found, 5);
}

#[test]
fn perturbed_square_exits_with_code_one() {
    let (o, dir) = js_check(&square_json(45.0 + 0.05 * 180.0 / PI));
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("perimeter equality: FAIL"));
    let rep: CheckReport = json_round_trip(&dir.path().join("out/js_report.json"));
    let pc = rep.report.perimeter_check.unwrap();
    assert!((pc.raw_residual + 0.1).abs() < 1e-3, "{}", pc.raw_residual);
}

#[test]
fn malformed_domain_exits_with_code_two() {
    let (o, dir) = js_check(r#"{"H": 0.0, "vertices": ["#);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("malformed domain JSON"));
    assert!(!dir.path().join("out/js_report.json").exists());
    let (o, _) =
        js_check(r#"{"H": 0.0, "vertices": [], "edges": [{"class": "A", "from": 0, "to": 1}]}"#);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn dirichlet_profile_data_reproduce_the_profile() {
    let dir = tempfile::tempdir().unwrap();
    let o = cmclab(
        dir.path(),
        &[
            "solve",
            "dirichlet",
            "--H",
            "0.25",
            "--tau",
            "0.3",
            "--boundary",
            "profile",
            "--obj",
            "--chart",
            "halfspace",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("sup error vs profile"));
    let rep: DirichletReport = json_round_trip(&dir.path().join("solve.json"));
    let h = rep.solve.mesh_h;
    assert!(rep.sup_error.unwrap() <= 5.0 * h * h);
    let text = fs::read_to_string(dir.path().join("field.txt")).unwrap();
    let field = parse_mesh_file(&text).unwrap().into_field().unwrap();
    assert_eq!(format_mesh_field(&field), text);
    let obj = obj_round_trip(&dir.path().join("field.obj"));
    assert_eq!(obj.vertices.len(), rep.nodes);
    assert!(obj.vertices.iter().all(|v| v[1] > 0.0));
}

#[test]
fn constant_data_in_the_shifted_model_leave_no_residual() {
    let dir = tempfile::tempdir().unwrap();
    let o = cmclab(
        dir.path(),
        &[
            "solve",
            "dirichlet",
            "--H",
            "0.3",
            "--tau",
            "0.5",
            "--model",
            "hcylinder",
            "--boundary",
            "const:1.25",
            "--rho-max",
            "1.5",
            "--mesh-h",
            "0.2",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let rep: DirichletReport = json_round_trip(&dir.path().join("solve.json"));
    assert!(rep.max_residual < 1e-8, "{:e}", rep.max_residual);
}

#[test]
fn entire_solve_stays_within_the_data_range() {
    let dir = tempfile::tempdir().unwrap();
    let o = cmclab(
        dir.path(),
        &[
            "solve",
            "entire",
            "--H",
            "0.25",
            "--phi",
            "fourier:1,0.1",
            "--n-max",
            "8",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let run: EntireRunReport = json_round_trip(&dir.path().join("entire.json"));
    let rep = run.report;
    assert_eq!(rep.levels.len(), 7);
    for l in &rep.levels {
        assert!(l.min >= -0.1 - 10.0 * l.mesh_h && l.max <= 0.1 + 10.0 * l.mesh_h);
    }
    let tail: Vec<f64> = rep
        .levels
        .iter()
        .filter(|l| l.n >= 4)
        .filter_map(|l| l.sup_diff_d2)
        .collect();
    assert!(tail.windows(2).all(|w| w[1] < w[0]), "{tail:?}");
    let text = fs::read_to_string(dir.path().join("field.txt")).unwrap();
    assert_eq!(
        format_mesh_field(&parse_mesh_file(&text).unwrap().into_field().unwrap()),
        text
    );
}

#[test]
fn unknown_boundary_data_are_rejected_at_parse_time() {
    let dir = tempfile::tempdir().unwrap();
    let o = cmclab(
        dir.path(),
        &["solve", "dirichlet", "--H", "0.1", "--boundary", "wave:3"],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown data"));
}

fn lens_arc() -> CurvatureArc {
    CurvatureArc {
        p: ModelPoint::disk(-0.5, 0.0),
        q: ModelPoint::disk(0.5, 0.0),
        kappa: 0.4,
        side: Side::Left,
    }
}

fn write_lens_mesh(dir: &Path) -> PathBuf {
    let a = lens_arc();
    let c = CurvatureArc {
        kappa: 0.9,
        side: Side::Right,
        ..a
    };
    let mesh = lens_mesh(&a.shape().unwrap(), &c.shape().unwrap(), 0.1, (1, 2))
        .unwrap()
        .with_boundary_curvature(1, 0.4)
        .with_boundary_curvature(2, 0.9);
    let path = dir.join("lens.txt");
    fs::write(&path, format_mesh(&mesh)).unwrap();
    path
}

#[test]
fn flux_audit_of_a_diverging_lens_sequence() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = write_lens_mesh(dir.path());
    let mut prev: Option<PathBuf> = None;
    let mut kept = Vec::new();
    for n in 1..=16 {
        let out = dir.path().join(format!("n{n}"));
        let data = format!("marker:1={n},2=0");
        let mut args = vec![
            "solve",
            "dirichlet",
            "--H",
            "0.2",
            "--tau",
            "0.3",
            "--mesh",
            mesh.to_str().unwrap(),
            "--boundary",
            &data,
        ];
        let init;
        if let Some(p) = &prev {
            init = p.to_string_lossy().into_owned();
            args.extend(["--initial", init.as_str()]);
        }
        let o = cmclab(&out, &args);
        assert!(o.status.success(), "n = {n}: {}", stderr(&o));
        prev = Some(out.join("field.txt"));
        if [4, 8, 16].contains(&n) {
            kept.push(out.join("field.txt"));
        }
    }
    let arc = dir.path().join("arc.json");
    fs::write(&arc, serde_json::to_string(&lens_arc()).unwrap()).unwrap();
    let report_dir = dir.path().join("audit");
    let mut args = vec!["flux", "audit", "--arc", arc.to_str().unwrap()];
    for k in &kept {
        args.extend(["--field", k.to_str().unwrap()]);
    }
    let o = cmclab(&report_dir, &args);
    assert!(o.status.success(), "{}", stderr(&o));
    let rep: AuditReport = json_round_trip(&report_dir.join("flux_report.json"));
    let audit = rep.audit.unwrap();
    assert_eq!(audit.verdict, AuditVerdict::Consistent, "{audit:?}");
    assert!(*audit.flux_ratios.last().unwrap() >= 0.9);
    assert_eq!(rep.closed.len(), 3);
    assert!(rep
        .closed
        .iter()
        .all(|c| c.line_term.abs() <= c.length + 1e-8));
    assert_eq!(listing(&report_dir), ["flux_report.json"]);
}
