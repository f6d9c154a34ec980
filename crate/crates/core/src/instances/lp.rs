//! Instances in `ℓ_p^w` with `w_j = 1/j`, plus oracle-only systems.

use alloc::format;
use alloc::sync::Arc;

use super::{ClassParams, Decay, Model, ProblemInstance};
use crate::analysis::radius_r;
use crate::error::{invalid, Result};
use crate::math;
use crate::space::{power_sum_upper, WeightRule, WeightedSpace};

const A: f64 = 0.0;
const B: f64 = 1.0;

fn harmonic_space(p: f64) -> Result<WeightedSpace> {
    if !(p.is_finite() && p > 1.0) {
        return Err(invalid("p", "these instances need p in (1, inf)"));
    }
    WeightedSpace::harmonic(p)
}

/// Class parameters shared by the `ℓ_p^w` examples whose components satisfy
/// `|f^j(η)| ≤ 1`, `|f^j(y) − f^j(ȳ)| ≤ ‖y − ȳ‖` and `|η^j| ≤ 1`.
///
/// Then `L = M = D = W = (Σ w_j^p)^{1/p}`, `γ(k)` is the certified weight tail
/// `((1/k)^{qp−1}/(qp−1))^{1/p}` and `δ(k) = 2R·γ(k)` with `R` from
/// [`radius_r`].
pub fn lp_class_params(space: &WeightedSpace) -> Result<ClassParams> {
    let p = space.p();
    let WeightRule::Power { q } = space.weights();
    let s = q * p;
    let w = space.weight_norm_upper();
    let gamma = Decay::power(math::pow(s - 1.0, -1.0 / p), (s - 1.0) / p);
    let r = radius_r(w, w, gamma.eval(1), space.basis_constant(), A, B);
    let delta = gamma.scaled(2.0 * r);
    ClassParams::new(w, w, w, 0, gamma, delta, A, B)
}

/// `z^1(t)` for `z' = sin z`, `z(0) = 1`: `2·atan(e^t·tan(1/2))`.
pub fn lp_sin_first_component(t: f64) -> f64 {
    2.0 * math::atan(math::exp(t - A) * math::tan(0.5))
}

#[derive(Debug)]
struct LpSin;

impl Model for LpSin {
    fn component(&self, _j: usize, y: &[f64]) -> f64 {
        math::sin(y.first().copied().unwrap_or(0.0))
    }

    fn eval_block(&self, y: &[f64], out: &mut [f64]) {
        let v = math::sin(y.first().copied().unwrap_or(0.0));
        out.fill(v);
    }

    fn initial(&self, _j: usize) -> f64 {
        1.0
    }

    fn initial_tail_sup(&self, _d: usize) -> f64 {
        1.0
    }

    fn exact(&self, _j: usize, t: f64) -> Option<f64> {
        // z^j = η^j + z^1 − η^1 with η ≡ 1
        Some(lp_sin_first_component(t))
    }

    fn exact_range(&self, t: f64, _first: usize, out: &mut [f64]) -> bool {
        out.fill(lp_sin_first_component(t));
        true
    }

    fn exact_tail_sup(&self, _d: usize, t: f64) -> Option<f64> {
        Some(lp_sin_first_component(t).abs())
    }

    fn has_exact(&self) -> bool {
        true
    }
}

/// `f^j(y) = sin(y^1)` for every `j`, `η^j = 1`, on `[0, 1]` in `ℓ_p^{1/j}`.
///
/// Every component solves the same scalar equation, so
/// `z^j(t) = 2·atan(e^t·tan(1/2))` for all `j`.
pub fn make_lp_sin(p: f64) -> Result<ProblemInstance> {
    let space = harmonic_space(p)?;
    Ok(ProblemInstance {
        label: "lp_sin".into(),
        space,
        params: lp_class_params(&space)?,
        model: Arc::new(LpSin),
        class_member: true,
    })
}

/// Dual-norm normalizer `c_p = (Σ_i w_i^{p'})^{1/p'}`, `p' = p/(p−1)`, of the
/// functional `y ↦ Σ_i w_i² y^i` on `ℓ_p^{1/i}`; an upper bound, so the
/// normalized functional has norm at most 1.
pub fn lp_coupled_normalizer(p: f64) -> f64 {
    let dual = p / (p - 1.0);
    math::pow(power_sum_upper(dual), 1.0 / dual)
}

#[derive(Debug)]
struct LpCoupled {
    c_p: f64,
}

impl LpCoupled {
    fn phase(&self, y: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (i, &v) in y.iter().enumerate().rev() {
            let w = 1.0 / (i + 1) as f64;
            acc += w * w * v;
        }
        acc / self.c_p
    }
}

impl Model for LpCoupled {
    fn component(&self, _j: usize, y: &[f64]) -> f64 {
        math::sin(self.phase(y))
    }

    fn eval_block(&self, y: &[f64], out: &mut [f64]) {
        out.fill(math::sin(self.phase(y)));
    }

    fn initial(&self, _j: usize) -> f64 {
        1.0
    }

    fn initial_tail_sup(&self, _d: usize) -> f64 {
        1.0
    }
}

/// `f^j(y) = sin(Σ_i w_i² y^i / c_p)`: every component reads every coordinate
/// of its argument. No closed-form solution.
pub fn make_lp_coupled(p: f64) -> Result<ProblemInstance> {
    let space = harmonic_space(p)?;
    Ok(ProblemInstance {
        label: "lp_coupled".into(),
        space,
        params: lp_class_params(&space)?,
        model: Arc::new(LpCoupled {
            c_p: lp_coupled_normalizer(p),
        }),
        class_member: true,
    })
}

#[derive(Debug)]
struct DecoupledLinear {
    lambda: f64,
}

impl Model for DecoupledLinear {
    fn component(&self, j: usize, y: &[f64]) -> f64 {
        -self.lambda * y.get(j - 1).copied().unwrap_or(0.0)
    }

    fn eval_block(&self, y: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = -self.lambda * y.get(i).copied().unwrap_or(0.0);
        }
    }

    fn initial(&self, _j: usize) -> f64 {
        1.0
    }

    fn initial_tail_sup(&self, _d: usize) -> f64 {
        1.0
    }

    fn exact(&self, _j: usize, t: f64) -> Option<f64> {
        Some(math::exp(-self.lambda * (t - A)))
    }

    fn exact_tail_sup(&self, _d: usize, t: f64) -> Option<f64> {
        Some(math::exp(-self.lambda * (t - A)))
    }

    fn has_exact(&self) -> bool {
        true
    }
}

/// `f^j(y) = −λ·y^j`, `η^j = 1`, so `z^j(t) = e^{−λt}`.
///
/// Its right-hand-side tail does not decay uniformly on a ball, so it is an
/// exact-solution oracle rather than a class member.
pub fn make_decoupled_linear(lambda: f64, p: f64) -> Result<ProblemInstance> {
    if !lambda.is_finite() {
        return Err(invalid("lambda", "must be finite"));
    }
    let space = harmonic_space(p)?;
    let mut params = lp_class_params(&space)?;
    let l = lambda.abs().max(1.0);
    params.lipschitz = l;
    params.rhs_bound = l * space.weight_norm_upper();
    params.deriv_bound = l;
    Ok(ProblemInstance {
        label: "linear".into(),
        space,
        params,
        model: Arc::new(DecoupledLinear { lambda }),
        class_member: false,
    })
}

#[derive(Debug)]
struct Zero;

impl Model for Zero {
    fn component(&self, _j: usize, _y: &[f64]) -> f64 {
        0.0
    }

    fn eval_block(&self, _y: &[f64], out: &mut [f64]) {
        out.fill(0.0);
    }

    fn initial(&self, _j: usize) -> f64 {
        1.0
    }

    fn initial_tail_sup(&self, _d: usize) -> f64 {
        1.0
    }

    fn exact(&self, _j: usize, _t: f64) -> Option<f64> {
        Some(1.0)
    }

    fn exact_tail_sup(&self, _d: usize, _t: f64) -> Option<f64> {
        Some(1.0)
    }

    fn has_exact(&self) -> bool {
        true
    }
}

/// `f ≡ 0`, `η^j = 1`: the solution is constant.
pub fn make_zero(p: f64) -> Result<ProblemInstance> {
    let space = harmonic_space(p)?;
    Ok(ProblemInstance {
        label: "zero".into(),
        space,
        params: lp_class_params(&space)?,
        model: Arc::new(Zero),
        class_member: true,
    })
}

#[derive(Debug)]
struct FiniteSupport {
    n0: usize,
}

impl Model for FiniteSupport {
    fn component(&self, j: usize, y: &[f64]) -> f64 {
        if j > self.n0 {
            return 0.0;
        }
        let at = |i: usize| y.get(i - 1).copied().unwrap_or(0.0);
        let next = j % self.n0 + 1;
        0.5 * math::sin(at(next)) - 0.25 * at(j) + 0.1 * math::cos(at(1))
    }

    fn initial(&self, j: usize) -> f64 {
        if j <= self.n0 {
            1.0 / j as f64
        } else {
            0.0
        }
    }

    fn initial_tail_sup(&self, d: usize) -> f64 {
        if d >= self.n0 {
            0.0
        } else {
            1.0 / (d + 1) as f64
        }
    }
}

/// A nonlinear cyclically coupled system living in the first `n0`
/// coordinates: `f^j ≡ 0` and `η^j = 0` for `j > n0`. Used as a
/// finite-dimensional oracle: any truncation with all dimensions `≥ n0`
/// must reproduce the plain `n0`-dimensional computation.
pub fn make_finite_support(n0: usize, p: f64) -> Result<ProblemInstance> {
    if n0 == 0 {
        return Err(invalid("n0", "must be at least 1"));
    }
    let space = harmonic_space(p)?;
    let mut params = lp_class_params(&space)?;
    params.lipschitz = 1.0;
    Ok(ProblemInstance {
        label: format!("finite_support_{n0}"),
        space,
        params,
        model: Arc::new(FiniteSupport { n0 }),
        class_member: false,
    })
}
