use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::instances::ClassParams;
use crate::integrator::{Mesh, TruncationSchedule};
use crate::math;

/// Radius of a ball around `η` that contains both the exact solution and
/// every numerical trajectory of the method.
///
/// `max(C̃₁, C̃₂)` with `C̃₁ = (M/L)(e^{L(b−a)} − 1)` (continuous Gronwall,
/// `M(b−a)` when `L = 0`) and
/// `C̃₂ = 2e^{2PL(b−a)}(b−a)P(Lγ(1) + M) + γ(1)` (discrete Gronwall along the
/// stage recursion). Inputs are expected to be nonnegative and finite.
pub fn radius_r(
    lipschitz: f64,
    rhs_bound: f64,
    gamma1: f64,
    basis_const: f64,
    a: f64,
    b: f64,
) -> f64 {
    let (c1, c2) = radius_terms(lipschitz, rhs_bound, gamma1, basis_const, a, b);
    c1.max(c2)
}

/// The two candidates `(C̃₁, C̃₂)` behind [`radius_r`].
pub fn radius_terms(
    lipschitz: f64,
    rhs_bound: f64,
    gamma1: f64,
    basis_const: f64,
    a: f64,
    b: f64,
) -> (f64, f64) {
    let len = b - a;
    let c1 = if lipschitz == 0.0 {
        rhs_bound * len
    } else {
        rhs_bound / lipschitz * math::expm1(lipschitz * len)
    };
    let c2 = 2.0
        * math::exp(2.0 * basis_const * lipschitz * len)
        * len
        * basis_const
        * (lipschitz * gamma1 + rhs_bound)
        + gamma1;
    (c1, c2)
}

/// Error coefficients of the `ℓ_p^w` examples:
/// `A = (2R+1)e^W/(p−1)^{1/p}`, `B = W(R+1)(3e^W − 2)`.
pub fn constants_ab(p: f64, radius: f64, w: f64) -> (f64, f64) {
    let ew = math::exp(w);
    let a = (2.0 * radius + 1.0) * ew / math::pow(p - 1.0, 1.0 / p);
    let b = w * (radius + 1.0) * (3.0 * ew - 2.0);
    (a, b)
}

/// The three sums of the a-priori error bound, without its constant.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    /// `γ(N_{-1})`.
    pub initial_term: f64,
    /// `Σ_j h_j δ(N_j)`.
    pub truncation_term: f64,
    /// `Σ_j h_j^{max(r,1)+1}`.
    pub discretization_term: f64,
    pub total_without_c: f64,
    /// Bound on `[t_k, t_{k+1}]`: the same sums taken over `j ≤ k`.
    pub partials: Vec<f64>,
}

/// Evaluates the a-priori bound for a mesh and truncation schedule.
pub fn theorem1_bound(
    params: &ClassParams,
    mesh: &Mesh,
    sched: &TruncationSchedule,
) -> Result<BoundReport> {
    if sched.n() != mesh.n() {
        return Err(Error::LengthMismatch {
            what: "truncation schedule",
            expected: mesh.n() + 1,
            found: sched.dims().len(),
        });
    }
    let order = params.order() as i32;
    let initial = params.gamma.eval(sched.initial_dim() as u64);
    let mut trunc = 0.0;
    let mut disc = 0.0;
    let mut partials = Vec::with_capacity(mesh.n());
    for (k, &h) in mesh.steps().iter().enumerate() {
        trunc += h * params.delta.eval(sched.step_dim(k) as u64);
        disc += math::powi(h, (order + 1) as u32);
        partials.push(initial + trunc + disc);
    }
    Ok(BoundReport {
        initial_term: initial,
        truncation_term: trunc,
        discretization_term: disc,
        total_without_c: initial + trunc + disc,
        partials,
    })
}

/// `γ(N) + (b−a)δ(N) + n·h^{R+1}` for the uniform mesh with `n` steps and
/// constant dimension `N`; no per-interval partials.
pub fn theorem1_uniform(params: &ClassParams, n: u64, dim: u64) -> f64 {
    let len = params.interval_length();
    let h = len / n as f64;
    params.gamma.eval(dim)
        + len * params.delta.eval(dim)
        + n as f64 * math::powi(h, params.order() + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::Decay;

    fn params(r: u32) -> ClassParams {
        ClassParams::new(
            1.0,
            1.0,
            1.0,
            r,
            Decay::power(1.0, 0.5),
            Decay::power(2.0, 0.5),
            0.0,
            2.0,
        )
        .unwrap()
    }

    #[test]
    fn radius_limits_and_monotonicity() {
        let (small, _) = radius_terms(1e-12, 2.0, 0.0, 1.0, 0.0, 3.0);
        assert!((small - 6.0).abs() < 1e-9);
        assert_eq!(radius_terms(0.0, 2.0, 0.0, 1.0, 0.0, 3.0).0, 6.0);
        assert_eq!(radius_r(0.0, 2.0, 0.0, 1.0, 0.0, 3.0), 12.0);
        let r1 = radius_r(1.3, 1.3, 1.0, 1.0, 0.0, 1.0);
        let r2 = radius_r(1.3, 1.3, 1.0, 1.0, 0.0, 2.0);
        assert!(r2 >= r1 && r1.is_finite());
    }

    #[test]
    fn constants_are_positive_and_monotone() {
        let (a, b) = constants_ab(2.0, 10.0, 1.2);
        assert!(a > 0.0 && b > 0.0);
        assert!(constants_ab(2.0, 11.0, 1.2).0 > a);
        assert!(constants_ab(2.0, 10.0, 1.3).0 > a);
    }

    #[test]
    fn uniform_report() {
        let p = params(2);
        let n = 8;
        let mesh = Mesh::uniform(0.0, 2.0, n).unwrap();
        let sched = TruncationSchedule::uniform(n, 16).unwrap();
        let rep = theorem1_bound(&p, &mesh, &sched).unwrap();
        let h: f64 = 0.25;
        assert!((rep.initial_term - 0.25).abs() < 1e-15);
        assert!((rep.truncation_term - 2.0 * 0.5).abs() < 1e-14);
        assert!((rep.discretization_term - 2.0 * h * h).abs() < 1e-15);
        assert_eq!(
            rep.total_without_c,
            rep.initial_term + rep.truncation_term + rep.discretization_term
        );
        assert_eq!(rep.partials.len(), n);
        assert_eq!(*rep.partials.last().unwrap(), rep.total_without_c);
        assert!((theorem1_uniform(&p, n as u64, 16) - rep.total_without_c).abs() < 1e-14);
        let bad = TruncationSchedule::uniform(n + 1, 16).unwrap();
        assert!(theorem1_bound(&p, &mesh, &bad).is_err());
    }
}
