use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::math;

/// Cost of one scalar evaluation `f^j(x)` with `x ∈ R^N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CostFn {
    /// `c(N) = N^β`.
    Power { beta: f64 },
}

impl CostFn {
    pub fn power(beta: f64) -> Self {
        Self::try_power(beta).expect("cost exponent must be finite and nonnegative")
    }

    pub fn try_power(beta: f64) -> Result<Self> {
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(invalid(
                "beta",
                "cost exponent must be finite and nonnegative",
            ));
        }
        Ok(Self::Power { beta })
    }

    pub fn beta(&self) -> f64 {
        match *self {
            Self::Power { beta } => beta,
        }
    }

    pub fn eval(&self, n: usize) -> f64 {
        match *self {
            Self::Power { beta: 0.0 } => 1.0,
            Self::Power { beta: 1.0 } => n as f64,
            Self::Power { beta } => math::pow(n as f64, beta),
        }
    }
}

/// Whether the ledger keeps a record of every information point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TraceMode {
    #[default]
    Off,
    /// Keep at most `cap` entries; later points are counted but dropped.
    On { cap: usize },
}

/// One argument at which the right-hand side block was evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub step: usize,
    pub stage: usize,
    pub node: usize,
    /// First coordinate of the argument, the only one some tests compare.
    pub first: f64,
    /// Argument dimension `M_k`.
    pub dim: usize,
    /// Scalar evaluations made at this argument (`N_k`).
    pub count: usize,
}

/// Per-interval cost entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepCost {
    /// Scalar evaluations `ℓ_k`.
    pub evaluations: usize,
    /// Argument dimension `M_k`.
    pub arg_dim: usize,
    /// Updated dimension `N_k`.
    pub updated: usize,
}

/// Counts scalar evaluations and their cost.
#[derive(Debug, Clone, PartialEq)]
pub struct CostLedger {
    cost: CostFn,
    steps: Vec<StepCost>,
    total_cost: f64,
    trace_mode: TraceMode,
    trace: Vec<TracePoint>,
    points: usize,
    dropped: usize,
}

impl CostLedger {
    pub fn new(cost: CostFn, trace_mode: TraceMode) -> Self {
        Self {
            cost,
            steps: Vec::new(),
            total_cost: 0.0,
            trace_mode,
            trace: Vec::new(),
            points: 0,
            dropped: 0,
        }
    }

    pub(crate) fn begin_step(&mut self, arg_dim: usize, updated: usize) {
        self.steps.push(StepCost {
            evaluations: 0,
            arg_dim,
            updated,
        });
    }

    /// Records one block evaluation of `count` components at an argument of
    /// dimension `dim`.
    pub(crate) fn record(
        &mut self,
        stage: usize,
        node: usize,
        first: f64,
        dim: usize,
        count: usize,
    ) {
        let step = self.steps.len().saturating_sub(1);
        if let Some(entry) = self.steps.last_mut() {
            entry.evaluations += count;
        }
        self.total_cost += self.cost.eval(dim) * count as f64;
        self.points += 1;
        if let TraceMode::On { cap } = self.trace_mode {
            if self.trace.len() < cap {
                self.trace.push(TracePoint {
                    step,
                    stage,
                    node,
                    first,
                    dim,
                    count,
                });
            } else {
                self.dropped += 1;
            }
        }
    }

    pub fn cost_fn(&self) -> CostFn {
        self.cost
    }

    pub fn steps(&self) -> &[StepCost] {
        &self.steps
    }

    /// `Σ_k ℓ_k`.
    pub fn scalar_evaluations(&self) -> usize {
        self.steps.iter().map(|s| s.evaluations).sum()
    }

    /// `Σ_k c(M_k) ℓ_k`.
    pub fn total_cost(&self) -> f64 {
        self.total_cost
    }

    /// Number of distinct arguments at which `f` was evaluated.
    pub fn information_points(&self) -> usize {
        self.points
    }

    pub fn trace(&self) -> &[TracePoint] {
        &self.trace
    }

    /// Trace entries discarded because the cap was reached.
    pub fn trace_dropped(&self) -> usize {
        self.dropped
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cost_function_values() {
        assert_eq!(CostFn::power(0.0).eval(1000), 1.0);
        assert_eq!(CostFn::power(1.0).eval(37), 37.0);
        assert!((CostFn::power(2.0).eval(3) - 9.0).abs() < 1e-12);
        assert!(CostFn::try_power(-1.0).is_err());
    }

    #[test]
    fn ledger_accumulates() {
        let mut l = CostLedger::new(CostFn::power(1.0), TraceMode::On { cap: 1 });
        l.begin_step(4, 3);
        l.record(0, 0, 1.0, 4, 3);
        l.record(0, 1, 1.5, 4, 3);
        assert_eq!(l.scalar_evaluations(), 6);
        assert_eq!(l.total_cost(), 24.0);
        assert_eq!(l.trace().len(), 1);
        assert_eq!(l.trace_dropped(), 1);
        assert_eq!(l.information_points(), 2);
    }
}
