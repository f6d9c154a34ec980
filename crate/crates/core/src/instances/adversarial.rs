//! Indistinguishable pairs `(f, η)`, `(g, κ)` whose solutions are far apart.
//!
//! Each constructor returns a pair that produces bit-identical information
//! for the stated information model together with a certified lower bound on
//! `sup_t ‖z_{f,η}(t) − z_{g,κ}(t)‖`.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::bump::BumpSum;
use super::{ClassParams, Model, ProblemInstance};
use crate::error::{invalid, Error, Result};
use crate::space::WeightedSpace;

/// What the two members of a pair cannot be told apart by.
#[derive(Debug, Clone, PartialEq)]
pub enum Indistinguishable {
    /// Any evaluation of `P_N f` at arguments of dimension `≤ N`, and `P_N η`.
    UpToDim(usize),
    /// Evaluations whose first coordinate is one of these (sorted) values.
    TracePoints(Vec<f64>),
}

#[derive(Debug, Clone)]
pub struct AdversarialPair {
    pub first: ProblemInstance,
    pub second: ProblemInstance,
    /// Certified lower bound on the sup-norm distance of the two solutions.
    pub guaranteed_gap: f64,
    pub indistinguishable: Indistinguishable,
}

impl AdversarialPair {
    /// Evaluates components `1..=dim` of both right-hand sides at every
    /// argument and returns the first `(argument index, component)` whose
    /// bit patterns differ.
    pub fn first_mismatch(&self, args: &[&[f64]], dim: usize) -> Option<(usize, usize)> {
        let mut u = alloc::vec![0.0; dim];
        let mut v = alloc::vec![0.0; dim];
        for (i, y) in args.iter().enumerate() {
            self.first.model.eval_block(y, &mut u);
            self.second.model.eval_block(y, &mut v);
            if let Some(j) = u
                .iter()
                .zip(&v)
                .position(|(a, b)| a.to_bits() != b.to_bits())
            {
                return Some((i, j + 1));
            }
        }
        None
    }
}

/// Bounds for the perturbation in the third construction: `sup H ≤ M1`,
/// Lipschitz constant `≤ L1`, derivatives up to order `max(r,1)` `≤ D1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpBounds {
    pub m1: f64,
    pub l1: f64,
    pub d1: f64,
}

impl BumpBounds {
    /// Heuristic default `M1 = L1 = D1 = 0.1·min(L, M, D)`.
    pub fn default_for(params: &ClassParams) -> Self {
        let s = 0.1
            * params
                .lipschitz
                .min(params.rhs_bound)
                .min(params.deriv_bound);
        Self {
            m1: s,
            l1: s,
            d1: s,
        }
    }
}

/// A vector with at most one nonzero raw component (`index == 0`: zero vector).
#[derive(Debug, Clone, Copy)]
struct Spike {
    index: usize,
    value: f64,
}

impl Spike {
    const ZERO: Spike = Spike {
        index: 0,
        value: 0.0,
    };

    fn at(&self, j: usize) -> f64 {
        if j == self.index {
            self.value
        } else {
            0.0
        }
    }
}

/// Constant right-hand side `f ≡ rhs` with initial value `eta`.
#[derive(Debug)]
struct ConstantField {
    rhs: Spike,
    eta: Spike,
    a: f64,
}

impl Model for ConstantField {
    fn component(&self, j: usize, _y: &[f64]) -> f64 {
        self.rhs.at(j)
    }

    fn eval_block(&self, _y: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        if (1..=out.len()).contains(&self.rhs.index) {
            out[self.rhs.index - 1] = self.rhs.value;
        }
    }

    fn initial(&self, j: usize) -> f64 {
        self.eta.at(j)
    }

    fn initial_tail_sup(&self, d: usize) -> f64 {
        if self.eta.index > d {
            self.eta.value.abs()
        } else {
            0.0
        }
    }

    fn exact(&self, j: usize, t: f64) -> Option<f64> {
        Some(self.eta.at(j) + (t - self.a) * self.rhs.at(j))
    }

    fn exact_tail_sup(&self, d: usize, t: f64) -> Option<f64> {
        let sup = [self.eta.index, self.rhs.index]
            .into_iter()
            .filter(|&j| j > d)
            .map(|j| self.exact(j, t).unwrap_or(0.0).abs())
            .fold(0.0, f64::max);
        Some(sup)
    }

    fn has_exact(&self) -> bool {
        true
    }
}

/// `g(y) = (A + H(y^1))·e_1`, `κ = 0`.
#[derive(Debug)]
struct BumpedField {
    base: f64,
    bumps: BumpSum,
}

impl Model for BumpedField {
    fn component(&self, j: usize, y: &[f64]) -> f64 {
        if j == 1 {
            self.base + self.bumps.eval(y.first().copied().unwrap_or(0.0))
        } else {
            0.0
        }
    }

    fn initial(&self, _j: usize) -> f64 {
        0.0
    }

    fn initial_tail_sup(&self, _d: usize) -> f64 {
        0.0
    }
}

fn instance(
    label: alloc::string::String,
    space: &WeightedSpace,
    params: &ClassParams,
    model: Arc<dyn Model>,
) -> ProblemInstance {
    ProblemInstance {
        label,
        space: *space,
        params: params.clone(),
        model,
        class_member: true,
    }
}

/// Initial-value witness: `f = g = 0`, `η = γ(N)·e_{N+1}`, `κ = 0`.
///
/// `P_k η = 0` for `k ≤ N`, so the pair is indistinguishable from
/// `N`-dimensional data, while both solutions are constant and differ by
/// exactly `‖η‖ = γ(N)`.
pub fn make_case1(n: usize, space: &WeightedSpace, base: &ClassParams) -> Result<AdversarialPair> {
    if n == 0 {
        return Err(invalid("N", "must be at least 1"));
    }
    let gap = base.gamma.eval(n as u64);
    let eta = Spike {
        index: n + 1,
        value: gap / space.weight(n + 1),
    };
    let first = ConstantField {
        rhs: Spike::ZERO,
        eta,
        a: base.a,
    };
    let second = ConstantField {
        rhs: Spike::ZERO,
        eta: Spike::ZERO,
        a: base.a,
    };
    Ok(AdversarialPair {
        first: instance(format!("case1_first_N{n}"), space, base, Arc::new(first)),
        second: instance(format!("case1_second_N{n}"), space, base, Arc::new(second)),
        guaranteed_gap: gap,
        indistinguishable: Indistinguishable::UpToDim(n),
    })
}

/// Right-hand-side witness: `f ≡ δ(N)·e_{N+1}`, `g ≡ 0`, `η = κ = 0`.
///
/// `P_N f = P_N g = 0`; the solutions separate linearly to `(b − a)·δ(N)`.
/// Requires `δ(N) ≤ M` so that `f` stays in the class.
pub fn make_case2(n: usize, space: &WeightedSpace, base: &ClassParams) -> Result<AdversarialPair> {
    if n == 0 {
        return Err(invalid("N", "must be at least 1"));
    }
    let d = base.delta.eval(n as u64);
    if d > base.rhs_bound {
        return Err(invalid("N", "delta(N) exceeds M; choose a larger N"));
    }
    let first = ConstantField {
        rhs: Spike {
            index: n + 1,
            value: d / space.weight(n + 1),
        },
        eta: Spike::ZERO,
        a: base.a,
    };
    let second = ConstantField {
        rhs: Spike::ZERO,
        eta: Spike::ZERO,
        a: base.a,
    };
    Ok(AdversarialPair {
        first: instance(format!("case2_first_N{n}"), space, base, Arc::new(first)),
        second: instance(format!("case2_second_N{n}"), space, base, Arc::new(second)),
        guaranteed_gap: base.interval_length() * d,
        indistinguishable: Indistinguishable::UpToDim(n),
    })
}

/// Discretization witness: `f ≡ A·e_1`, `g = f + H^{scal}(y^1)·e_1`,
/// `η = κ = 0`.
///
/// `trace` holds the first coordinates of the information points used on
/// `f`. One bump is placed on every gap between consecutive points of
/// `trace ∪ {0, A(b−a)}` inside `[0, A(b−a)]`, so `H` and its derivatives up
/// to order `max(r,1)` vanish at every trace point. Along `z_f(t)^1 = A(t−a)`
/// the gap is at least `(1/(1+L(b−a)))·(1/A)·∫ H^{scal}`.
pub fn make_case3(
    trace: &[f64],
    a_coef: f64,
    space: &WeightedSpace,
    base: &ClassParams,
    bounds: BumpBounds,
) -> Result<AdversarialPair> {
    let len = base.interval_length();
    if !(len > 0.0) {
        return Err(invalid("[a, b]", "empty interval"));
    }
    if !(a_coef > 0.0 && a_coef <= base.rhs_bound) {
        return Err(invalid("A", "need 0 < A <= M"));
    }
    if !(bounds.m1 > 0.0) {
        return Err(invalid("M1", "must be positive"));
    }
    if !(bounds.l1 > 0.0 && bounds.l1 <= base.lipschitz) {
        return Err(invalid("L1", "need 0 < L1 <= L"));
    }
    if !(bounds.d1 > 0.0 && bounds.d1 <= base.deriv_bound) {
        return Err(invalid("D1", "need 0 < D1 <= D"));
    }
    if trace.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument {
            name: "trace",
            reason: "trace points must be finite",
        });
    }
    let lo = 0.0;
    let hi = a_coef * len;
    let mut points: Vec<f64> = trace
        .iter()
        .copied()
        .filter(|&x| (lo..=hi).contains(&x))
        .chain([lo, hi])
        .collect();
    points.sort_by(f64::total_cmp);
    points.dedup();

    let r = base.smoothness.max(1);
    let bumps = BumpSum::on_gaps(r, &points, bounds.m1, bounds.l1, bounds.d1);
    let gap = bumps.integral() / a_coef / (1.0 + base.lipschitz * len);

    let raw_a = a_coef / space.weight(1);
    let first = ConstantField {
        rhs: Spike {
            index: 1,
            value: raw_a,
        },
        eta: Spike::ZERO,
        a: base.a,
    };
    let second = BumpedField { base: raw_a, bumps };
    Ok(AdversarialPair {
        first: instance(
            format!("case3_first_s{}", points.len()),
            space,
            base,
            Arc::new(first),
        ),
        second: instance(
            format!("case3_second_s{}", points.len()),
            space,
            base,
            Arc::new(second),
        ),
        guaranteed_gap: gap,
        indistinguishable: Indistinguishable::TracePoints(points),
    })
}
