//! Polynomial utilities in the local variable `τ = (t − t_k)/h_k ∈ [0, 1]`.
//!
//! Generic over the scalar so the same code runs in `f64` and in exact
//! rational arithmetic.

use alloc::vec::Vec;

use num_traits::Num;

use crate::error::{Error, Result};

/// Field-like scalars the stage machinery can run on.
pub trait Scalar: Num + Clone {}

impl<T: Num + Clone> Scalar for T {}

/// The integer `n` as a scalar.
pub fn small_int<T: Scalar>(n: usize) -> T {
    let mut acc = T::zero();
    for _ in 0..n {
        acc = acc + T::one();
    }
    acc
}

/// Stage nodes `ξ_{k,p} = t_k + p·h_k/s`, `p = 0..=s`; a single node `t_k`
/// when `s = 0`.
pub fn stage_nodes(t_k: f64, h_k: f64, s: usize) -> Vec<f64> {
    if s == 0 {
        return alloc::vec![t_k];
    }
    (0..=s)
        .map(|p| {
            if p == s {
                t_k + h_k
            } else {
                t_k + p as f64 * h_k / s as f64
            }
        })
        .collect()
}

/// Stage nodes in `τ`: `p/s`, `p = 0..=s` (`[0]` for `s = 0`).
pub fn unit_nodes<T: Scalar>(s: usize) -> Vec<T> {
    if s == 0 {
        return alloc::vec![T::zero()];
    }
    let denom: T = small_int(s);
    (0..=s).map(|p| small_int::<T>(p) / denom.clone()).collect()
}

/// `Σ c_i x^i`.
#[inline]
pub fn horner<T: Scalar>(coeffs: &[T], x: &T) -> T {
    let Some((last, rest)) = coeffs.split_last() else {
        return T::zero();
    };
    let mut acc = last.clone();
    for c in rest.iter().rev() {
        acc = acc * x.clone() + c.clone();
    }
    acc
}

/// Lagrange basis polynomials for fixed nodes, in monomial form.
#[derive(Debug, Clone)]
pub struct LagrangeBasis<T> {
    nodes: Vec<T>,
    /// `basis[p][i]`: coefficient of `τ^i` in `ℓ_p`.
    basis: Vec<Vec<T>>,
}

impl<T: Scalar> LagrangeBasis<T> {
    pub fn new(nodes: &[T]) -> Result<Self> {
        for (i, x) in nodes.iter().enumerate() {
            if nodes[..i].iter().any(|y| y == x) {
                return Err(Error::DuplicateNode { index: i });
            }
        }
        let m = nodes.len();
        let mut basis = Vec::with_capacity(m);
        for p in 0..m {
            let mut num = alloc::vec![T::one()];
            let mut denom = T::one();
            for (l, xl) in nodes.iter().enumerate() {
                if l == p {
                    continue;
                }
                // num *= (τ − x_l)
                let mut next = alloc::vec![T::zero(); num.len() + 1];
                for (i, c) in num.iter().enumerate() {
                    next[i + 1] = next[i + 1].clone() + c.clone();
                    next[i] = next[i].clone() - c.clone() * xl.clone();
                }
                num = next;
                denom = denom * (nodes[p].clone() - xl.clone());
            }
            basis.push(num.into_iter().map(|c| c / denom.clone()).collect());
        }
        Ok(Self {
            nodes: nodes.to_vec(),
            basis,
        })
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Monomial coefficients of `ℓ_p`.
    pub fn basis_row(&self, p: usize) -> &[T] {
        &self.basis[p]
    }

    /// Coefficient `i` of the interpolant whose node values are `value(p)`.
    #[inline]
    pub fn coefficient(&self, i: usize, value: impl Fn(usize) -> T) -> T {
        let mut acc = T::zero();
        for (p, row) in self.basis.iter().enumerate() {
            acc = acc + value(p) * row[i].clone();
        }
        acc
    }
}

/// Monomial coefficients (in the nodes' variable) of the unique interpolant
/// of degree `< nodes.len()` through `(nodes[p], values[p])`.
pub fn lagrange_monomial<T: Scalar>(nodes: &[T], values: &[T]) -> Result<Vec<T>> {
    if nodes.len() != values.len() {
        return Err(Error::LengthMismatch {
            what: "interpolation values",
            expected: nodes.len(),
            found: values.len(),
        });
    }
    let basis = LagrangeBasis::new(nodes)?;
    Ok((0..nodes.len())
        .map(|i| basis.coefficient(i, |p| values[p].clone()))
        .collect())
}

/// Antiderivative in `t` of a `τ`-polynomial, expressed again in `τ`:
/// `c_i τ^i ↦ h·c_i/(i+1)·τ^{i+1}`, with zero constant term.
pub fn integrate_local<T: Scalar>(coeffs: &[T], h: &T) -> Vec<T> {
    let mut out = Vec::with_capacity(coeffs.len() + 1);
    out.push(T::zero());
    for (i, c) in coeffs.iter().enumerate() {
        out.push(h.clone() * c.clone() / small_int::<T>(i + 1));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stage_node_examples() {
        assert_eq!(stage_nodes(0.0, 1.0, 0), [0.0]);
        assert_eq!(stage_nodes(0.0, 1.0, 2), [0.0, 0.5, 1.0]);
        assert_eq!(stage_nodes(2.0, 0.5, 1), [2.0, 2.5]);
    }

    #[test]
    fn lagrange_examples() {
        let c: Vec<f64> = lagrange_monomial(&[0.0, 0.5, 1.0], &[0.0, 0.25, 1.0]).unwrap();
        assert!(c[0].abs() < 1e-15 && c[1].abs() < 1e-15 && (c[2] - 1.0).abs() < 1e-15);
        assert_eq!(lagrange_monomial(&[0.3], &[7.0]).unwrap(), [7.0]);
        assert_eq!(
            lagrange_monomial(&[0.0, 1.0], &[1.0, 3.0]).unwrap(),
            [1.0, 2.0]
        );
        assert_eq!(
            lagrange_monomial(&[0.0, 1.0, 0.0], &[1.0, 2.0, 3.0]).unwrap_err(),
            Error::DuplicateNode { index: 2 }
        );
        assert!(lagrange_monomial(&[0.0, 1.0], &[1.0]).is_err());
    }

    #[test]
    fn integrate_examples() {
        assert_eq!(integrate_local(&[1.0], &0.5), [0.0, 0.5]);
        let out: Vec<f64> = integrate_local(&[0.0, 0.0, 1.0], &1.0);
        assert_eq!(out.len(), 4);
        assert!((out[3] - 1.0 / 3.0).abs() < 1e-16);
    }

    #[test]
    fn horner_matches_direct_sum() {
        let c = [1.0, -2.0, 0.5, 3.0];
        let x: f64 = 0.37;
        let direct: f64 = c
            .iter()
            .enumerate()
            .map(|(i, v)| v * x.powi(i as i32))
            .sum();
        assert!((horner(&c, &x) - direct).abs() < 1e-15);
    }
}
