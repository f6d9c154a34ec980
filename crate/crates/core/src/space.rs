//! Weighted `ℓ_p` sequence spaces and finitely supported vectors in them.
//!
//! Vectors store raw components `y^j`. The normalized basis is
//! `e_j = (0, …, 1/w_j, …)`, so the basis coefficient of `y^j` is `w_j·y^j`
//! and the norm is `(Σ |y^j|^p w_j^p)^{1/p}`. Projections `P_k` keep the
//! first `k` components; the basis constant of these spaces is 1.

use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::math;

/// Closed-form weight families. Only summable families with a certified
/// tail bound belong here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightRule {
    /// `w_j = j^{-q}`.
    Power { q: f64 },
}

impl WeightRule {
    #[inline]
    pub fn weight(&self, j: usize) -> f64 {
        match *self {
            WeightRule::Power { q } => {
                if q == 1.0 {
                    1.0 / j as f64
                } else {
                    math::pow(j as f64, -q)
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedSpace {
    p: f64,
    weights: WeightRule,
}

impl WeightedSpace {
    pub fn new(p: f64, weights: WeightRule) -> Result<Self> {
        if !(p.is_finite() && p >= 1.0) {
            return Err(invalid("p", "exponent must be finite and >= 1"));
        }
        match weights {
            WeightRule::Power { q } => {
                if !(q.is_finite() && q > 0.0) {
                    return Err(invalid("q", "weight exponent must be positive"));
                }
                if q * p <= 1.0 {
                    return Err(invalid("q", "q*p <= 1: weight tail is not summable"));
                }
            }
        }
        Ok(Self { p, weights })
    }

    /// `ℓ_p^w` with `w_j = j^{-q}`.
    pub fn power(p: f64, q: f64) -> Result<Self> {
        Self::new(p, WeightRule::Power { q })
    }

    /// The space used throughout the examples: `w_j = 1/j`.
    pub fn harmonic(p: f64) -> Result<Self> {
        Self::power(p, 1.0)
    }

    #[inline]
    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn weights(&self) -> WeightRule {
        self.weights
    }

    /// `sup_k ‖P_k‖`, which is 1 for every weighted `ℓ_p`.
    pub fn basis_constant(&self) -> f64 {
        1.0
    }

    #[inline]
    pub fn weight(&self, j: usize) -> f64 {
        self.weights.weight(j)
    }

    /// `w_j^p`.
    #[inline]
    pub fn weight_pow(&self, j: usize) -> f64 {
        match self.weights {
            WeightRule::Power { q } => {
                let s = q * self.p;
                if s == 2.0 {
                    let x = j as f64;
                    1.0 / (x * x)
                } else {
                    math::pow(j as f64, -s)
                }
            }
        }
    }

    /// Table of `w_j^p` for `j = 1..=d` (index 0 holds `w_1^p`).
    pub fn weight_pow_table(&self, d: usize) -> Vec<f64> {
        (1..=d).map(|j| self.weight_pow(j)).collect()
    }

    pub fn norm(&self, v: &TruncVec) -> f64 {
        self.norm_of(v.components())
    }

    pub(crate) fn norm_of(&self, comps: &[f64]) -> f64 {
        math::root(self.norm_pow_of(comps), self.p)
    }

    /// `Σ |y^j|^p w_j^p`, accumulated from the largest index down.
    pub(crate) fn norm_pow_of(&self, comps: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (i, &y) in comps.iter().enumerate().rev() {
            if y != 0.0 {
                acc += math::abs_pow(y, self.p) * self.weight_pow(i + 1);
            }
        }
        acc
    }

    /// `norm(u − v)` with implicit zero padding to the common dimension.
    pub fn distance(&self, u: &TruncVec, v: &TruncVec) -> f64 {
        let (a, b) = (u.components(), v.components());
        let d = a.len().max(b.len());
        let mut acc = 0.0;
        for j in (0..d).rev() {
            let x = a.get(j).copied().unwrap_or(0.0) - b.get(j).copied().unwrap_or(0.0);
            if x != 0.0 {
                acc += math::abs_pow(x, self.p) * self.weight_pow(j + 1);
            }
        }
        math::root(acc, self.p)
    }

    /// Certified upper bound on `(Σ_{j>k} w_j^p)^{1/p}`.
    ///
    /// For `w_j = j^{-q}` the sum is dominated by `∫_k^∞ x^{-qp} dx`, giving
    /// `((1/k)^{qp−1}/(qp−1))^{1/p}`. For `k = 0` the full sum is bounded by
    /// `1 + 1/(qp−1)`.
    pub fn tail_bound(&self, k: usize) -> f64 {
        match self.weights {
            WeightRule::Power { q } => {
                let s = q * self.p;
                let sum = if k == 0 {
                    1.0 + 1.0 / (s - 1.0)
                } else {
                    math::pow(k as f64, 1.0 - s) / (s - 1.0)
                };
                math::root(sum, self.p)
            }
        }
    }

    /// Certified upper bound on `W = (Σ_{j≥1} w_j^p)^{1/p}`.
    pub fn weight_norm_upper(&self) -> f64 {
        match self.weights {
            WeightRule::Power { q } => math::root(power_sum_upper(q * self.p), self.p),
        }
    }
}

/// Upper bound on `ζ(s) = Σ_{j≥1} j^{-s}` for `s > 1`.
///
/// Exact partial sum to `K = 4096`, then the midpoint bound
/// `Σ_{j>K} j^{-s} ≤ ∫_{K+1/2}^∞ x^{-s} dx`, valid because `x^{-s}` is convex.
/// The overshoot is `O(K^{-s-1})`.
pub fn power_sum_upper(s: f64) -> f64 {
    const K: usize = 4096;
    let mut acc = math::pow(K as f64 + 0.5, 1.0 - s) / (s - 1.0);
    for j in (1..=K).rev() {
        acc += math::pow(j as f64, -s);
    }
    acc
}

/// A finitely supported sequence `(y^1, …, y^N, 0, 0, …)` in raw components.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TruncVec {
    comps: Vec<f64>,
}

impl TruncVec {
    pub fn new(comps: Vec<f64>) -> Result<Self> {
        if comps.iter().any(|x| !x.is_finite()) {
            return Err(invalid("components", "all components must be finite"));
        }
        Ok(Self { comps })
    }

    pub(crate) fn from_vec_unchecked(comps: Vec<f64>) -> Self {
        Self { comps }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            comps: alloc::vec![0.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn components(&self) -> &[f64] {
        &self.comps
    }

    pub fn into_components(self) -> Vec<f64> {
        self.comps
    }

    /// Raw component `y^j` (1-based); zero beyond `dim`.
    pub fn get(&self, j: usize) -> f64 {
        if j == 0 {
            return 0.0;
        }
        self.comps.get(j - 1).copied().unwrap_or(0.0)
    }

    /// `P_k v`. The result has dimension `min(k, dim)`; `P_0 v` is empty.
    pub fn project(&self, k: usize) -> TruncVec {
        let d = k.min(self.comps.len());
        TruncVec {
            comps: self.comps[..d].to_vec(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn tv(x: &[f64]) -> TruncVec {
        TruncVec::new(x.to_vec()).unwrap()
    }

    #[test]
    fn norm_examples() {
        let s = WeightedSpace::harmonic(2.0).unwrap();
        assert_eq!(s.norm(&tv(&[1.0])), 1.0);
        assert_eq!(s.norm(&tv(&[0.0, 2.0])), 1.0);
        // 1 + 1 + 1 by hand
        assert!((s.norm(&tv(&[1.0, 2.0, 3.0])) - 1.7320508075688772).abs() < 1e-15);
        assert_eq!(s.norm(&TruncVec::default()), 0.0);
    }

    #[test]
    fn project_examples() {
        let v = tv(&[1.0, 0.5, 1.0 / 3.0]);
        assert_eq!(v.project(2).components(), &[1.0, 0.5]);
        assert_eq!(tv(&[5.0]).project(0).dim(), 0);
        assert_eq!(tv(&[1.0, 2.0]).project(7), tv(&[1.0, 2.0]));
    }

    #[test]
    fn tail_bound_examples() {
        let s = WeightedSpace::harmonic(2.0).unwrap();
        assert!((s.tail_bound(4) - 0.5).abs() < 1e-15);
        assert!((s.tail_bound(1) - 1.0).abs() < 1e-15);
        assert!((s.tail_bound(100) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn distance_examples() {
        let s = WeightedSpace::harmonic(2.0).unwrap();
        assert_eq!(s.distance(&tv(&[1.0]), &tv(&[1.0])), 0.0);
        assert_eq!(s.distance(&tv(&[1.0]), &tv(&[1.0, 2.0])), 1.0);
        assert!((s.distance(&tv(&[3.0, 4.0]), &tv(&[0.0, 0.0])) - 3.605551275463989).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_spaces() {
        assert!(WeightedSpace::power(2.0, 0.5).is_err());
        assert!(WeightedSpace::power(1.0, 1.0).is_err());
        assert!(WeightedSpace::power(0.5, 4.0).is_err());
        assert!(WeightedSpace::power(1.0, 1.5).is_ok());
        assert!(TruncVec::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn get_is_one_based_and_zero_padded() {
        let v = tv(&[7.0, 8.0]);
        assert_eq!(v.get(1), 7.0);
        assert_eq!(v.get(2), 8.0);
        assert_eq!(v.get(3), 0.0);
        assert_eq!(v.get(0), 0.0);
    }
}
