//! Prescribed mean curvature solver on triangulated hyperbolic domains.

pub mod barriers;
pub mod divergence;
pub mod entire;
mod field;
mod fv;
pub mod io;
pub mod mesh;
pub mod sparse;

pub use field::{
    generalized_gradient, gradient_norms, mean_curvature_residual, recovered_gradients,
    solve_dirichlet, solve_dirichlet_from, BoundaryData, MeshField, SolveOptions, SolveReport,
};
pub use fv::FvOperator;
pub use mesh::{Locator, Mesh};
