//! Numerical tools for H-graphs over the hyperbolic plane in E(-1, tau).

pub mod error;
pub mod fit;
pub mod hyperbolic;
pub mod js;
pub mod killing;
pub mod profiles;
pub mod quadrature;
pub mod solver;

pub use error::{Error, Result};
