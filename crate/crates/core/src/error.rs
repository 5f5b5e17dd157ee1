use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point is ideal; a finite interior point is required")]
    IdealPoint,
    #[error("points live in different charts")]
    ChartMismatch,
    #[error("no arc of curvature {kappa} joins the given endpoints")]
    NoSuchArc { kappa: f64 },
    #[error("ideal endpoint has no truncating horocycle")]
    InfiniteLength,
    #[error("boundary arcs do not close up")]
    OpenBoundary,
    #[error("quantity is not finite: {0}")]
    NonFinite(String),
    #[error("point outside the model domain")]
    DomainError,
    #[error("chart map is singular at this point")]
    SingularPoint,
    #[error("H must satisfy |H| < 1/2")]
    CriticalH,
    #[error("radicand is nonpositive on the whole range")]
    EmptyDomain,
    #[error("too few samples: need {needed}, have {have}")]
    TooFewSamples { needed: usize, have: usize },
    #[error("parameter outside the domain of the closed form")]
    OutsideDomain,
    #[error("parameter d does not match the requested case or branch")]
    CaseMismatch,
    #[error("fit window too short")]
    WindowTooShort,
    #[error("quadrature did not reach tolerance (estimate {estimate:e}, error {error:e})")]
    Quadrature { estimate: f64, error: f64 },
    #[error("degenerate cell {0}")]
    DegenerateCell(usize),
    #[error("Newton iteration failed to converge: residual {residual:e} after {iterations} steps")]
    NoConvergence {
        residual: f64,
        iterations: usize,
        damping: Vec<f64>,
    },
    #[error("barrier violated at node {node}: {detail}")]
    BarrierViolation { node: usize, detail: String },
    #[error("malformed domain: {0}")]
    MalformedDomain(String),
    #[error("curve leaves the mesh")]
    CurveOutsideMesh,
    #[error("linear solver failed: {0}")]
    LinearSolver(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
