//! The truncated iterated-interpolation method: meshes, truncation
//! schedules, the per-interval stage engine, cost accounting and error
//! sampling.

mod cost;
mod mesh;
pub mod poly;
mod probe;
mod schedule;
mod solve;
pub mod stage;

pub use cost::{CostFn, CostLedger, StepCost, TraceMode, TracePoint};
pub use mesh::{Mesh, MeshKind};
pub use probe::{ball_sup, lobatto_points, sup_error, ErrorProbe, TailMode, MIN_SAMPLES};
pub use schedule::TruncationSchedule;
pub use solve::{
    local_step, solve, solve_traced, solve_with, Segment, Solution, SolveOptions, Trajectory,
};
