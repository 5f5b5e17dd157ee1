use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Subcommand, ValueEnum};
use cmclab_core::killing::{entire_rotational_height, KillingModelSpec};
use cmclab_core::profiles::{hyperbolic_profile, Branch};
use cmclab_core::solver::entire::{solve_entire, BarrierPlan, EntireOptions, EntireReport};
use cmclab_core::solver::io::{format_mesh_field, parse_mesh_file};
use cmclab_core::solver::mesh::{disk_to_half_plane, hex_disk_mesh, Locator};
use cmclab_core::solver::{
    mean_curvature_residual, solve_dirichlet_from, Mesh, MeshField, SolveOptions, SolveReport,
};
use serde::{Deserialize, Serialize};

use crate::data::{disk_angle, DataSpec, NodeTable};
use crate::error::{CliError, Result};
use crate::output::{read_to_string, OutDir};
use crate::surface::{field_surface, ObjChart};
use crate::{parse_h, Global};

#[derive(Debug, Subcommand)]
pub enum SolveCmd {
    /// Dirichlet problem on a disk or on a mesh read from a file.
    Dirichlet(DirichletArgs),
    /// Entire graph with prescribed asymptotic values, by disk exhaustion.
    Entire(EntireArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum ModelArg {
    Cylinder,
    Halfspace,
    Hcylinder,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct DirichletArgs {
    #[arg(long = "H", value_parser = parse_h, allow_negative_numbers = true)]
    pub h: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub tau: f64,
    #[arg(long, value_enum, default_value_t = ModelArg::Cylinder)]
    pub model: ModelArg,
    /// Mesh text file; without it a hexagonal mesh of the disk of radius `--rho-max` is used.
    #[arg(long)]
    pub mesh: Option<PathBuf>,
    #[arg(long = "rho-max", default_value_t = 2.0)]
    pub rho_max: f64,
    #[arg(long = "mesh-h", default_value_t = 0.1)]
    pub mesh_h: f64,
    #[arg(long, default_value = "const:0")]
    pub boundary: DataSpec,
    /// Field file whose values start the Newton iteration.
    #[arg(long)]
    pub initial: Option<PathBuf>,
    #[arg(long)]
    pub obj: bool,
    #[arg(long, value_enum, default_value_t)]
    pub chart: ObjChart,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct EntireArgs {
    #[arg(long = "H", value_parser = parse_h, allow_negative_numbers = true)]
    pub h: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub tau: f64,
    /// Asymptotic values on the ideal circle: `const:c` or `fourier:k,eps`.
    #[arg(long, default_value = "fourier:1,0.1")]
    pub phi: DataSpec,
    #[arg(long = "n-max", default_value_t = 8)]
    pub n_max: usize,
    #[arg(long = "mesh-h", default_value_t = 0.2)]
    pub mesh_h: f64,
    #[arg(long)]
    pub obj: bool,
    #[arg(long, value_enum, default_value_t)]
    pub chart: ObjChart,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DirichletReport {
    pub global: Global,
    pub config: DirichletArgs,
    pub nodes: usize,
    pub cells: usize,
    pub solve: SolveReport,
    /// Largest area-normalized residual at interior nodes.
    pub max_residual: f64,
    /// Sup-norm distance to the invariant entire graph, for `--boundary profile`.
    pub sup_error: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct EntireRunReport {
    pub global: Global,
    pub config: EntireArgs,
    pub report: EntireReport,
}

pub fn run(cmd: SolveCmd, global: &Global, out: &OutDir) -> Result<bool> {
    match cmd {
        SolveCmd::Dirichlet(args) => dirichlet(args, global, out),
        SolveCmd::Entire(args) => entire(args, global, out),
    }
}

fn model_spec(model: ModelArg, h: f64, tau: f64) -> Result<KillingModelSpec> {
    Ok(match model {
        ModelArg::Cylinder => KillingModelSpec::cylinder(tau),
        ModelArg::Halfspace => KillingModelSpec::half_space(tau),
        ModelArg::Hcylinder => KillingModelSpec::h_cylinder(h, tau)?,
    })
}

fn read_field(path: &Path) -> Result<MeshField> {
    Ok(parse_mesh_file(&read_to_string(path)?)?.into_field()?)
}

/// The invariant entire graph of each model with zero value at the center.
fn exact_profile(args: &DirichletArgs) -> Result<Box<dyn Fn(f64, f64) -> f64>> {
    let (h, tau) = (args.h, args.tau);
    Ok(match args.model {
        ModelArg::Cylinder => Box::new(move |x: f64, y: f64| {
            entire_rotational_height(h, tau, x.hypot(y)).unwrap_or(f64::NAN)
        }),
        ModelArg::Halfspace => {
            let p = hyperbolic_profile(h, 0.0, tau, Branch::Full)?;
            Box::new(move |x: f64, y: f64| p.value(x / y).unwrap_or(f64::NAN))
        }
        ModelArg::Hcylinder => Box::new(|_: f64, _: f64| 0.0),
    })
}

fn dirichlet(args: DirichletArgs, global: &Global, out: &OutDir) -> Result<bool> {
    let spec = model_spec(args.model, args.h, args.tau)?;
    let mesh: Mesh = match &args.mesh {
        Some(path) => parse_mesh_file(&read_to_string(path)?)?.mesh,
        None => {
            let disk = hex_disk_mesh(args.rho_max, args.mesh_h, 0)?;
            match args.model {
                ModelArg::Halfspace => disk_to_half_plane(&disk)?,
                _ => disk,
            }
        }
    };
    if mesh.chart != spec.chart() {
        return Err(CliError::Usage(format!(
            "mesh chart {:?} does not match the {:?} model",
            mesh.chart, args.model
        )));
    }
    let mesh = Arc::new(mesh);
    let chart = mesh.chart;

    let exact = exact_profile(&args)?;
    let table = match &args.boundary {
        DataSpec::File(path) => {
            let src = read_field(path)?;
            let loc = Locator::new(&src.mesh);
            let entries = (0..mesh.nodes.len())
                .filter(|&i| mesh.is_boundary(i))
                .map(|i| {
                    let p = mesh.nodes[i];
                    (p, src.value_at(&loc, p[0], p[1]).unwrap_or(f64::NAN))
                });
            Some(NodeTable::new(entries))
        }
        _ => None,
    };
    let spec_data = args.boundary.clone();
    let data = |marker: u32, x: f64, y: f64| match &spec_data {
        DataSpec::Const(c) => *c,
        DataSpec::Fourier { k, eps } => eps * (f64::from(*k) * disk_angle(chart, x, y)).cos(),
        DataSpec::File(_) => table.as_ref().map_or(f64::NAN, |t| t.get(x, y)),
        DataSpec::Profile => exact(x, y),
        DataSpec::Markers(pairs) => pairs
            .iter()
            .find(|(m, _)| *m == marker)
            .map_or(0.0, |(_, v)| *v),
    };
    let initial = match &args.initial {
        Some(path) => {
            let f = read_field(path)?;
            if f.values.len() != mesh.nodes.len() {
                return Err(CliError::Usage(format!(
                    "{} has {} values for {} nodes",
                    path.display(),
                    f.values.len(),
                    mesh.nodes.len()
                )));
            }
            Some(f.values)
        }
        None => None,
    };
    let opts = SolveOptions {
        tol: global.tol.unwrap_or(SolveOptions::default().tol),
        ..SolveOptions::default()
    };
    let (field, rep) = solve_dirichlet_from(
        mesh.clone(),
        &spec,
        args.h,
        &data,
        initial.as_deref(),
        &opts,
    )?;
    let max_residual = mean_curvature_residual(&field)
        .iter()
        .fold(0.0f64, |m, r| m.max(r.abs()));
    let sup_error = matches!(args.boundary, DataSpec::Profile).then(|| {
        mesh.nodes
            .iter()
            .zip(&field.values)
            .map(|(p, v)| (v - exact(p[0], p[1])).abs())
            .fold(0.0f64, f64::max)
    });
    let report = DirichletReport {
        global: global.clone(),
        config: args.clone(),
        nodes: mesh.nodes.len(),
        cells: mesh.cells.len(),
        solve: rep,
        max_residual,
        sup_error,
    };
    out.write("field.txt", &format_mesh_field(&field))?;
    out.write_json("solve.json", &report)?;
    if args.obj {
        out.write("field.obj", &field_surface(&field, args.chart)?.to_obj())?;
    }
    println!(
        "{} nodes, h = {:.4}, {} Newton steps, max residual {:.3e}",
        report.nodes, report.solve.mesh_h, report.solve.newton_iterations, max_residual
    );
    if let Some(e) = sup_error {
        let h = report.solve.mesh_h;
        println!("sup error vs profile {e:.3e} (5 h^2 = {:.3e})", 5.0 * h * h);
    }
    Ok(true)
}

fn entire(args: EntireArgs, global: &Global, out: &OutDir) -> Result<bool> {
    let phi: Box<dyn Fn(f64) -> f64> = match args.phi {
        DataSpec::Const(c) => Box::new(move |_: f64| c),
        DataSpec::Fourier { k, eps } => Box::new(move |t: f64| eps * (f64::from(k) * t).cos()),
        ref other => {
            return Err(CliError::Usage(format!(
                "--phi must be const:c or fourier:k,eps, not {other}"
            )))
        }
    };
    let mut opts = EntireOptions {
        mesh_h: args.mesh_h,
        ..EntireOptions::default()
    };
    if let Some(tol) = global.tol {
        opts.solve.tol = tol;
    }
    let (fields, report) = solve_entire(
        phi,
        args.h,
        args.tau,
        args.n_max,
        &opts,
        &BarrierPlan::default(),
    )?;
    for level in &report.levels {
        let diff = level
            .sup_diff_d2
            .map_or("-".to_string(), |d| format!("{d:.3e}"));
        println!(
            "n = {}: rho {:.3}, {} nodes, range [{:.6}, {:.6}], sup diff on D2 {diff}",
            level.n, level.rho, level.nodes, level.min, level.max
        );
    }
    let last = fields
        .last()
        .ok_or_else(|| CliError::Usage("no exhaustion levels".into()))?;
    out.write("field.txt", &format_mesh_field(last))?;
    if args.obj {
        out.write("field.obj", &field_surface(last, args.chart)?.to_obj())?;
    }
    let all_within = report.levels.iter().all(|l| l.within_bounds);
    out.write_json(
        "entire.json",
        &EntireRunReport {
            global: global.clone(),
            config: args,
            report,
        },
    )?;
    Ok(all_within)
}
