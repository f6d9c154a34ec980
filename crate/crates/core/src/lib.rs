//! Finite-dimensional solution of initial value problems on countable ODE
//! systems posed in weighted `ℓ_p` sequence spaces.
//!
//! The solver never touches more than finitely many coordinates: on each mesh
//! interval it reads a truncation `P_{N_k} f` of the right-hand side at
//! truncated arguments and builds a local polynomial by iterated Lagrange
//! interpolation and exact integration. The error and cost theory around it
//! (bound evaluation, complexity plans, adversarial lower-bound witnesses)
//! lives in [`analysis`] and [`instances`].
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the CLI and the
//! experiment drivers live in the companion `trunc-ivp` crate.
//!
//! ```
//! use trunc_ivp_core::instances::make_lp_sin;
//! use trunc_ivp_core::integrator::{solve, CostFn, Mesh, TruncationSchedule};
//!
//! let inst = make_lp_sin(2.0).unwrap();
//! let mesh = Mesh::uniform(0.0, 1.0, 64).unwrap();
//! let sched = TruncationSchedule::uniform(64, 32).unwrap();
//! let (traj, ledger) = solve(&inst, &mesh, &sched, 1, CostFn::power(1.0)).unwrap();
//! assert_eq!(ledger.scalar_evaluations(), 64 * 32);
//! let y = traj.eval(1.0).unwrap();
//! assert!((y.components()[0] - 1.9563).abs() < 1e-2);
//! ```

#![no_std]
// `!(x > 0.0)` deliberately rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analysis;
mod error;
pub mod instances;
pub mod integrator;
pub(crate) mod math;
pub mod space;

pub use error::{Error, Result};
