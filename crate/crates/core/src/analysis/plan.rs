use crate::error::{invalid, Error, Result};
use crate::instances::{generalized_inverse, ClassParams};
use crate::integrator::CostFn;
use crate::math;

use super::bounds::theorem1_uniform;

/// Which rule produced a plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanSource {
    Prop1,
    Grid,
    LpClosedForm,
}

impl PlanSource {
    pub fn as_str(self) -> &'static str {
        match self {
            PlanSource::Prop1 => "prop1",
            PlanSource::Grid => "grid",
            PlanSource::LpClosedForm => "lp_closed_form",
        }
    }
}

/// Number of steps and truncation dimension meeting an error target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexityPlan {
    pub epsilon: f64,
    pub n: u64,
    pub dim: u64,
    /// `n·c(N)·N` times the stage factor `R(R+1)/2`.
    pub predicted_cost: f64,
    pub source: PlanSource,
}

/// Step-size bound `α(n)` of a mesh family on `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaRule {
    /// `α(n) = (b − a)/n`.
    Uniform,
    /// `α(n) = σ(b − a)/n`.
    Graded { sigma: f64 },
}

impl AlphaRule {
    pub fn alpha(&self, len: f64, n: u64) -> f64 {
        match *self {
            AlphaRule::Uniform => len / n as f64,
            AlphaRule::Graded { sigma } => sigma * len / n as f64,
        }
    }
}

fn stage_factor(order: u32) -> f64 {
    let r = order as f64;
    r * (r + 1.0) / 2.0
}

fn plan_cost(n: u64, dim: u64, cost: CostFn, order: u32) -> f64 {
    n as f64 * cost.eval(dim as usize) * dim as f64 * stage_factor(order)
}

/// Plan from generalized inverses: `N = max(γ^{-1}(ε'), δ^{-1}(ε'/(b−a)))`
/// and `n = α^{-1}((ε'/(b−a))^{1/R})` with `ε' = ε/C₁`, or `ε/(3C₁)` when
/// `thirds` is set (then the bound at the plan is at most `ε/C₁`).
pub fn optimize_prop1(
    epsilon: f64,
    params: &ClassParams,
    alpha: AlphaRule,
    cost: CostFn,
    c1: f64,
    thirds: bool,
) -> Result<ComplexityPlan> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(invalid("epsilon", "must be positive and finite"));
    }
    if !(c1 > 0.0 && c1.is_finite()) {
        return Err(invalid("C1", "must be positive and finite"));
    }
    let mut eps = epsilon / c1;
    if thirds {
        eps /= 3.0;
    }
    let len = params.interval_length();
    let per_len = eps / len;
    let dim = params
        .gamma
        .inverse(eps)?
        .max(params.delta.inverse(per_len)?);
    let order = params.order();
    let target = math::root(per_len, order as f64);
    let n = generalized_inverse(|n| alpha.alpha(len, n), target)?;
    Ok(ComplexityPlan {
        epsilon,
        n,
        dim,
        predicted_cost: plan_cost(n, dim, cost, order),
        source: PlanSource::Prop1,
    })
}

/// Bound used by [`optimize_grid`].
#[derive(Debug, Clone, Copy)]
pub enum GridBound<'a> {
    /// Sums of the a-priori bound on a uniform mesh (constant 1).
    Theorem1(&'a ClassParams),
    /// `A·N^{-(1−1/p)} + B/n`, one stage per interval.
    LpExplicit { a: f64, b: f64, p: f64 },
}

impl GridBound<'_> {
    fn eval(&self, n: u64, dim: u64) -> f64 {
        match *self {
            GridBound::Theorem1(params) => theorem1_uniform(params, n, dim),
            GridBound::LpExplicit { a, b, p } => {
                a * math::pow(dim as f64, -(1.0 - 1.0 / p)) + b / n as f64
            }
        }
    }

    fn order(&self) -> u32 {
        match *self {
            GridBound::Theorem1(params) => params.order(),
            GridBound::LpExplicit { .. } => 1,
        }
    }
}

/// Search box for [`optimize_grid`]: `n = 2^i`, `N = 2^j`,
/// `i ≤ max_log2_n`, `j ≤ max_log2_dim`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridLimits {
    pub max_log2_n: u32,
    pub max_log2_dim: u32,
}

impl Default for GridLimits {
    fn default() -> Self {
        Self {
            max_log2_n: 40,
            max_log2_dim: 40,
        }
    }
}

/// Cheapest `(n, N)` over powers of two with bound `≤ ε`; ties go to the
/// smaller `N`, then the smaller `n`.
pub fn optimize_grid(
    epsilon: f64,
    bound: GridBound<'_>,
    cost: CostFn,
    limits: GridLimits,
) -> Result<ComplexityPlan> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(invalid("epsilon", "must be positive and finite"));
    }
    if limits.max_log2_n > 62 || limits.max_log2_dim > 62 {
        return Err(invalid("limits", "exponents above 62 are not supported"));
    }
    let order = bound.order();
    let mut best: Option<ComplexityPlan> = None;
    for j in 0..=limits.max_log2_dim {
        let dim = 1u64 << j;
        // The bound decreases in n and the cost increases, so only the
        // smallest feasible n matters for this N.
        let Some(i) = (0..=limits.max_log2_n).find(|&i| bound.eval(1u64 << i, dim) <= epsilon)
        else {
            continue;
        };
        let n = 1u64 << i;
        let c = plan_cost(n, dim, cost, order);
        if best.map_or(true, |b| c < b.predicted_cost) {
            best = Some(ComplexityPlan {
                epsilon,
                n,
                dim,
                predicted_cost: c,
                source: PlanSource::Grid,
            });
        }
    }
    best.ok_or(Error::Infeasible { epsilon })
}

/// Closed-form minimizer of `n·N^{1+β}` subject to
/// `A·N^{-(1−1/p)} + B/n ≤ ε`:
/// `n = ⌈B(p(β+2)−1)/((p−1)ε)⌉`, `N = ⌈A(β+2−1/p)/((β+1)ε)⌉^{p/(p−1)}`
/// (the power is applied after the ceiling and rounded up to an integer).
pub fn lp_closed_form(epsilon: f64, p: f64, beta: f64, a: f64, b: f64) -> Result<ComplexityPlan> {
    if !(p.is_finite() && p > 1.0) {
        return Err(invalid("p", "closed form needs p > 1"));
    }
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(invalid("beta", "must be finite and nonnegative"));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(invalid("epsilon", "must be positive and finite"));
    }
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(invalid("A, B", "must be positive and finite"));
    }
    let n = math::ceil(b * (p * (beta + 2.0) - 1.0) / ((p - 1.0) * epsilon));
    let base = math::ceil(a * (beta + 2.0 - 1.0 / p) / ((beta + 1.0) * epsilon));
    let exponent = p / (p - 1.0);
    let dim = if exponent == 2.0 {
        base * base
    } else {
        math::ceil(math::pow(base, exponent))
    };
    if !(n < 1.8e19 && dim < 1.8e19) {
        return Err(Error::Infeasible { epsilon });
    }
    let bound = a * math::pow(dim, -(1.0 - 1.0 / p)) + b / n;
    if bound > epsilon * (1.0 + 1e-12) {
        return Err(Error::Infeasible { epsilon });
    }
    let (n, dim) = (n as u64, dim as u64);
    let cost = n as f64 * CostFn::Power { beta }.eval(dim as usize) * dim as f64;
    Ok(ComplexityPlan {
        epsilon,
        n,
        dim,
        predicted_cost: cost,
        source: PlanSource::LpClosedForm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::Decay;

    fn params(r: u32, gamma: Decay) -> ClassParams {
        let delta = gamma.clone();
        ClassParams::new(1.0, 1.0, 1.0, r, gamma, delta, 0.0, 1.0).unwrap()
    }

    #[test]
    fn prop1_inverse_power() {
        let p = params(0, Decay::power(1.0, 0.5));
        let plan =
            optimize_prop1(0.01, &p, AlphaRule::Uniform, CostFn::power(1.0), 1.0, false).unwrap();
        assert_eq!(plan.dim, 10_000);
        assert_eq!(plan.n, 100);
    }

    #[test]
    fn prop1_step_count_r2() {
        let p = params(2, Decay::power(1.0, 1.0));
        let plan =
            optimize_prop1(1e-4, &p, AlphaRule::Uniform, CostFn::power(0.0), 1.0, false).unwrap();
        assert_eq!(plan.n, 100);
    }

    #[test]
    fn prop1_rejects_large_epsilon() {
        let p = params(1, Decay::power(1.0, 1.0));
        assert!(
            optimize_prop1(2.0, &p, AlphaRule::Uniform, CostFn::power(1.0), 1.0, false).is_err()
        );
    }

    #[test]
    fn grid_trivial_and_infeasible() {
        let plan = optimize_grid(
            1e9,
            GridBound::LpExplicit {
                a: 1.0,
                b: 1.0,
                p: 2.0,
            },
            CostFn::power(1.0),
            GridLimits::default(),
        )
        .unwrap();
        assert_eq!((plan.n, plan.dim), (1, 1));
        let err = optimize_grid(
            1e-9,
            GridBound::LpExplicit {
                a: 1.0,
                b: 1.0,
                p: 2.0,
            },
            CostFn::power(1.0),
            GridLimits {
                max_log2_n: 4,
                max_log2_dim: 4,
            },
        );
        assert_eq!(err.unwrap_err(), Error::Infeasible { epsilon: 1e-9 });
    }

    #[test]
    fn closed_form_p2_beta1() {
        let (a, b) = (3.0, 2.0);
        let eps = 0.01;
        let plan = lp_closed_form(eps, 2.0, 1.0, a, b).unwrap();
        assert_eq!(plan.n, 1000);
        assert_eq!(plan.dim, 375 * 375);
        assert_eq!(plan.predicted_cost, 1000.0 * (375.0f64 * 375.0).powi(2));
        assert!(lp_closed_form(eps, 1.0, 1.0, a, b).is_err());
    }
}
