//! Problem instances `(f, η)`: right-hand sides given componentwise, initial
//! values, class parameters, and exact solutions where one is known.
//!
//! Every right-hand side is accessed only through [`Model::component`] /
//! [`Model::eval_block`] at finitely supported arguments, which is all the
//! solver is allowed to see.

mod adversarial;
mod bump;
mod lp;
mod params;

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::space::{TruncVec, WeightedSpace};

pub use adversarial::{
    make_case1, make_case2, make_case3, AdversarialPair, BumpBounds, Indistinguishable,
};
pub use bump::{bump, psi_derivative_sup, psi_integral, Bump, BumpSum};
pub use lp::{
    lp_class_params, lp_coupled_normalizer, lp_sin_first_component, make_decoupled_linear,
    make_finite_support, make_lp_coupled, make_lp_sin, make_zero,
};
pub use params::{generalized_inverse, ClassParams, Decay, INVERSE_SEARCH_CAP};

/// A countable system `z' = f(z)`, `z(a) = η`, in raw components (1-based).
///
/// Implementations must be deterministic: equal `(j, y)` give bit-identical
/// results.
pub trait Model: Send + Sync {
    /// `f^j(y)` for the finitely supported point `y = (y^1, …, y^{y.len()}, 0, …)`.
    fn component(&self, j: usize, y: &[f64]) -> f64;

    /// `out[i] = f^{i+1}(y)` for `i < out.len()`. Override when components
    /// share work; the result must equal the componentwise definition.
    fn eval_block(&self, y: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.component(i + 1, y);
        }
    }

    /// `η^j`.
    fn initial(&self, j: usize) -> f64;

    /// `sup_{j>d} |η^j|`.
    fn initial_tail_sup(&self, d: usize) -> f64;

    /// `z^j(t)` when a closed form is known.
    fn exact(&self, _j: usize, _t: f64) -> Option<f64> {
        None
    }

    /// Fills `out[i] = z^{first+i}(t)`; returns `false` when there is no
    /// closed form.
    fn exact_range(&self, t: f64, first: usize, out: &mut [f64]) -> bool {
        for (i, o) in out.iter_mut().enumerate() {
            match self.exact(first + i, t) {
                Some(v) => *o = v,
                None => return false,
            }
        }
        true
    }

    /// Fills `out[i] = z^{i+1}(t)`; returns `false` when there is no closed form.
    fn exact_block(&self, t: f64, out: &mut [f64]) -> bool {
        self.exact_range(t, 1, out)
    }

    /// `sup_{j>d} |z^j(t)|` when a closed form is known.
    fn exact_tail_sup(&self, _d: usize, _t: f64) -> Option<f64> {
        None
    }

    fn has_exact(&self) -> bool {
        false
    }
}

/// Instance names accepted by configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InstanceLabel {
    LpSin,
    LpCoupled,
    Linear,
    Case1,
    Case2,
    Case3,
    Zero,
    FiniteSupport,
}

impl InstanceLabel {
    pub const ALL: [InstanceLabel; 8] = [
        InstanceLabel::LpSin,
        InstanceLabel::LpCoupled,
        InstanceLabel::Linear,
        InstanceLabel::Case1,
        InstanceLabel::Case2,
        InstanceLabel::Case3,
        InstanceLabel::Zero,
        InstanceLabel::FiniteSupport,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            InstanceLabel::LpSin => "lp_sin",
            InstanceLabel::LpCoupled => "lp_coupled",
            InstanceLabel::Linear => "linear",
            InstanceLabel::Case1 => "case1",
            InstanceLabel::Case2 => "case2",
            InstanceLabel::Case3 => "case3",
            InstanceLabel::Zero => "zero",
            InstanceLabel::FiniteSupport => "finite_support",
        }
    }
}

impl fmt::Display for InstanceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InstanceLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        InstanceLabel::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or(invalid("instance", "unknown instance label"))
    }
}

/// One pair `(f, η)` together with the space it lives in and its class data.
#[derive(Clone)]
pub struct ProblemInstance {
    pub label: String,
    pub space: WeightedSpace,
    pub params: ClassParams,
    pub model: Arc<dyn Model>,
    /// Whether the pair is asserted to satisfy the class conditions with
    /// `params`. Oracle-only instances set this to `false`.
    pub class_member: bool,
}

impl fmt::Debug for ProblemInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemInstance")
            .field("label", &self.label)
            .field("space", &self.space)
            .field("params", &self.params)
            .field("class_member", &self.class_member)
            .finish_non_exhaustive()
    }
}

impl ProblemInstance {
    pub fn component(&self, j: usize, y: &[f64]) -> f64 {
        self.model.component(j, y)
    }

    pub fn initial(&self, j: usize) -> f64 {
        self.model.initial(j)
    }

    /// `P_d η`.
    pub fn initial_projection(&self, d: usize) -> TruncVec {
        let v: Vec<f64> = (1..=d).map(|j| self.model.initial(j)).collect();
        TruncVec::from_vec_unchecked(v)
    }

    pub fn has_exact(&self) -> bool {
        self.model.has_exact()
    }

    pub fn exact(&self, j: usize, t: f64) -> Option<f64> {
        self.model.exact(j, t)
    }

    /// `P_d z(t)`.
    pub fn exact_projection(&self, d: usize, t: f64) -> Option<TruncVec> {
        let mut v = alloc::vec![0.0; d];
        self.model
            .exact_block(t, &mut v)
            .then(|| TruncVec::from_vec_unchecked(v))
    }
}
