use alloc::sync::Arc;
use core::fmt;

use crate::error::{invalid, Error, Result};
use crate::math;

/// A positive, nonincreasing sequence `k ↦ g(k)` tending to zero.
#[derive(Clone)]
pub enum Decay {
    /// `scale · k^{-exponent}`.
    Power { scale: f64, exponent: f64 },
    /// Any other rule; the caller vouches for monotonicity.
    Custom(Arc<dyn Fn(u64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Decay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decay::Power { scale, exponent } => f
                .debug_struct("Power")
                .field("scale", scale)
                .field("exponent", exponent)
                .finish(),
            Decay::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// Largest argument the generalized inverse will search.
pub const INVERSE_SEARCH_CAP: u64 = 1 << 62;

impl Decay {
    pub fn power(scale: f64, exponent: f64) -> Self {
        Decay::Power { scale, exponent }
    }

    pub fn custom(rule: impl Fn(u64) -> f64 + Send + Sync + 'static) -> Self {
        Decay::Custom(Arc::new(rule))
    }

    #[inline]
    pub fn eval(&self, k: u64) -> f64 {
        match self {
            Decay::Power { scale, exponent } => {
                if *exponent == 0.5 {
                    scale / math::sqrt(k as f64)
                } else {
                    scale * math::pow(k as f64, -exponent)
                }
            }
            Decay::Custom(rule) => rule(k),
        }
    }

    /// Returns a copy multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        match self {
            Decay::Power { scale, exponent } => Decay::Power {
                scale: scale * factor,
                exponent: *exponent,
            },
            Decay::Custom(rule) => {
                let rule = rule.clone();
                Decay::Custom(Arc::new(move |k| factor * rule(k)))
            }
        }
    }

    /// Generalized inverse `g^{-1}(ε) = min{k ≥ 1 : g(k) ≤ ε}`.
    ///
    /// Rejects `ε ≥ g(1)`, which lies outside the range the inverse is defined
    /// on, and targets that need an argument beyond [`INVERSE_SEARCH_CAP`].
    pub fn inverse(&self, epsilon: f64) -> Result<u64> {
        if !(epsilon > 0.0) || epsilon >= self.eval(1) {
            return Err(Error::NoInverse { epsilon });
        }
        generalized_inverse(|k| self.eval(k), epsilon)
    }
}

/// `min{k ≥ 1 : g(k) ≤ ε}` for nonincreasing `g`, by doubling then bisection.
pub fn generalized_inverse(g: impl Fn(u64) -> f64, epsilon: f64) -> Result<u64> {
    if g(1) <= epsilon {
        return Ok(1);
    }
    let mut hi = 2u64;
    while g(hi) > epsilon {
        if hi >= INVERSE_SEARCH_CAP {
            return Err(Error::NoInverse { epsilon });
        }
        hi *= 2;
    }
    // invariant: g(lo) > ε ≥ g(hi)
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if g(mid) <= epsilon {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Parameters of the problem class: Lipschitz constant `L`, bound `M` on
/// `‖f(η)‖`, derivative bound `D`, smoothness `r`, the initial-tail rule `γ`,
/// the right-hand-side tail rule `δ`, and the interval `[a, b]`.
#[derive(Debug, Clone)]
pub struct ClassParams {
    pub lipschitz: f64,
    pub rhs_bound: f64,
    pub deriv_bound: f64,
    pub smoothness: u32,
    pub gamma: Decay,
    pub delta: Decay,
    pub a: f64,
    pub b: f64,
}

impl ClassParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        lipschitz: f64,
        rhs_bound: f64,
        deriv_bound: f64,
        smoothness: u32,
        gamma: Decay,
        delta: Decay,
        a: f64,
        b: f64,
    ) -> Result<Self> {
        let params = Self {
            lipschitz,
            rhs_bound,
            deriv_bound,
            smoothness,
            gamma,
            delta,
            a,
            b,
        };
        params.validate()?;
        Ok(params)
    }

    /// Checks positivity of the constants, `a < b`, and spot-checks that `γ`
    /// and `δ` are positive and nonincreasing on `k = 1, 2, 4, …, 2^20`.
    pub fn validate(&self) -> Result<()> {
        let pos = |x: f64| x.is_finite() && x > 0.0;
        if !pos(self.lipschitz) {
            return Err(invalid("L", "must be positive and finite"));
        }
        if !pos(self.rhs_bound) {
            return Err(invalid("M", "must be positive and finite"));
        }
        if !pos(self.deriv_bound) {
            return Err(invalid("D", "must be positive and finite"));
        }
        if !(self.a.is_finite() && self.b.is_finite() && self.a < self.b) {
            return Err(invalid("[a, b]", "need finite a < b"));
        }
        for (name, rule) in [("gamma", &self.gamma), ("delta", &self.delta)] {
            let mut prev = f64::INFINITY;
            for e in 0..=20 {
                let v = rule.eval(1u64 << e);
                if !pos(v) {
                    return Err(invalid(name, "must be positive"));
                }
                if v > prev {
                    return Err(invalid(name, "must be nonincreasing"));
                }
                prev = v;
            }
            if !(rule.eval(1 << 20) < rule.eval(1)) {
                return Err(invalid(name, "must decay towards zero"));
            }
        }
        Ok(())
    }

    pub fn interval_length(&self) -> f64 {
        self.b - self.a
    }

    /// `max(r, 1)`, the order that governs both the stage count and the
    /// discretization term of the error bound.
    pub fn order(&self) -> u32 {
        self.smoothness.max(1)
    }

    pub fn with_smoothness(mut self, r: u32) -> Self {
        self.smoothness = r;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_inverse_square_root() {
        let g = Decay::power(1.0, 0.5);
        assert_eq!(g.inverse(0.01).unwrap(), 10_000);
        assert!(g.inverse(1.0).is_err());
        assert!(g.inverse(0.0).is_err());
    }

    #[test]
    fn generalized_inverse_law() {
        let g = Decay::power(0.7, 0.75);
        for &eps in &[0.5, 0.1, 0.0123, 1e-4, 3.3e-6] {
            let k = g.inverse(eps).unwrap();
            assert!(g.eval(k) <= eps);
            if k > 1 {
                assert!(g.eval(k - 1) > eps);
            }
        }
    }

    #[test]
    fn validate_rejects_increasing_rules() {
        let good = Decay::power(1.0, 0.5);
        let bad = Decay::custom(|k| k as f64);
        assert!(ClassParams::new(1.0, 1.0, 1.0, 0, good.clone(), good.clone(), 0.0, 1.0).is_ok());
        assert!(ClassParams::new(1.0, 1.0, 1.0, 0, good.clone(), bad, 0.0, 1.0).is_err());
        assert!(ClassParams::new(1.0, 1.0, 1.0, 0, good.clone(), good.clone(), 1.0, 1.0).is_err());
        assert!(ClassParams::new(0.0, 1.0, 1.0, 0, good.clone(), good, 0.0, 1.0).is_err());
    }

    #[test]
    fn scaled_custom_rule() {
        let g = Decay::custom(|k| 1.0 / k as f64).scaled(3.0);
        assert_eq!(g.eval(3), 1.0);
    }
}
