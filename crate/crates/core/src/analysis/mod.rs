//! Error bounds, complexity plans and empirical rate fitting.

mod bounds;
mod fit;
mod plan;

pub use bounds::{
    constants_ab, radius_r, radius_terms, theorem1_bound, theorem1_uniform, BoundReport,
};
pub use fit::{fit_order, loglog_slope, OrderFit};
pub use plan::{
    lp_closed_form, optimize_grid, optimize_prop1, AlphaRule, ComplexityPlan, GridBound,
    GridLimits, PlanSource,
};
