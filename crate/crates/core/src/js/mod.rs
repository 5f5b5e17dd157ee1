//! Jenkins-Serrin type domains: admissibility, inscribed polygons, the
//! solvability conditions and fluxes of computed solutions.

mod audit;
mod conditions;
mod domain;
mod flux;

pub use audit::{audit_with, boundary_curvature_audit, AuditVerdict, CurvatureAudit};
pub use conditions::{
    boundary_polygon_of, check_conditions, default_truncation, js_quantities, CheckOptions,
    JsQuantities, JsReport, PerimeterCheck, PolygonCheck,
};
pub use domain::{
    enumerate_polygons, validate_admissibility, Admissibility, BoundarySamples, ConditionResult,
    EdgeClass, HPolygon, JsDomain, JsEdge, PolygonSet,
};
pub use flux::{boundary_split, flux, outer_boundary, FluxReport};
