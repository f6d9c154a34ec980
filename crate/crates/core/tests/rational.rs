//! Exact-arithmetic and brute-force reference checks of the stage engine.

use std::convert::Infallible;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use trunc_ivp_core::instances::{make_decoupled_linear, make_finite_support};
use trunc_ivp_core::integrator::poly::horner;
use trunc_ivp_core::integrator::stage::{StagePlan, StageScratch};
use trunc_ivp_core::integrator::{solve, CostFn, Mesh, TruncationSchedule};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Runs `steps` intervals of the stage engine on `y' = −y` in exact arithmetic.
fn rational_decay(order: usize, h: &BigRational, steps: usize) -> BigRational {
    let plan = StagePlan::<BigRational>::new(order);
    let mut scratch = StageScratch::new();
    let mut coeffs = vec![BigRational::zero(); plan.stride()];
    let mut y = vec![BigRational::one()];
    for _ in 0..steps {
        plan.run::<Infallible>(&y, h, 1, &mut coeffs, &mut scratch, |_, _, arg, out| {
            out[0] = -arg[0].clone();
            Ok(())
        })
        .unwrap();
        y[0] = horner(&coeffs, &BigRational::one());
    }
    y.pop().unwrap()
}

fn pow(x: &BigRational, n: usize) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..n {
        acc *= x.clone();
    }
    acc
}

fn ulp_distance(a: f64, b: f64) -> u64 {
    let key = |x: f64| {
        let bits = x.to_bits() as i64;
        if bits < 0 {
            i64::MIN - bits
        } else {
            bits
        }
    };
    key(a).abs_diff(key(b))
}

#[test]
fn euler_is_exactly_a_power() {
    let h = rat(1, 100);
    let got = rational_decay(1, &h, 100);
    assert_eq!(got, pow(&rat(99, 100), 100));
}

#[test]
fn two_stages_give_second_order_taylor_factor() {
    let h = rat(1, 10);
    let factor = BigRational::one() - h.clone() + h.clone() * h.clone() / rat(2, 1);
    assert_eq!(rational_decay(2, &h, 10), pow(&factor, 10));
    let h3 = h.clone() * h.clone() * h.clone();
    let factor3 = factor + (-h3 / rat(6, 1));
    assert_eq!(rational_decay(3, &h, 4), pow(&factor3, 4));
}

#[test]
fn binary64_euler_within_two_ulp_of_exact() {
    let inst = make_decoupled_linear(1.0, 2.0).unwrap();
    let mesh = Mesh::uniform(0.0, 1.0, 100).unwrap();
    let sched = TruncationSchedule::uniform(100, 2).unwrap();
    let (traj, _) = solve(&inst, &mesh, &sched, 0, CostFn::power(1.0)).unwrap();
    let got = traj.knot(100).get(1);
    // The step actually used is the binary64 number nearest 1/100.
    let h = BigRational::from_float(mesh.step(0)).unwrap();
    let exact = pow(&(BigRational::one() - h), 100).to_f64().unwrap();
    assert!(ulp_distance(got, exact) <= 2, "{got} vs {exact}");
    let decimal = pow(&rat(99, 100), 100).to_f64().unwrap();
    assert!(ulp_distance(got, decimal) <= 2, "{got} vs {decimal}");
}

const N0: usize = 8;

fn rhs(y: &[f64], j: usize) -> f64 {
    // components are 1-based: f^j = ½ sin(y^{j mod N0 + 1}) − ¼ y^j + 0.1 cos(y^1)
    let next = j % N0 + 1;
    0.5 * y[next - 1].sin() - 0.25 * y[j - 1] + 0.1 * y[0].cos()
}

fn reference(mesh: &Mesh, r: usize) -> Vec<[f64; N0]> {
    let mut y = [0.0; N0];
    for (j, v) in y.iter_mut().enumerate() {
        *v = 1.0 / (j + 1) as f64;
    }
    let mut knots = vec![y];
    for &h in mesh.steps() {
        let k1: Vec<f64> = (1..=N0).map(|j| rhs(&y, j)).collect();
        let mut next = [0.0; N0];
        if r <= 1 {
            for j in 0..N0 {
                next[j] = h * k1[j] + y[j];
            }
        } else {
            // second stage: interpolate at τ = 0, 1 along the Euler line
            let mut y1 = [0.0; N0];
            for j in 0..N0 {
                y1[j] = h * k1[j] + y[j];
            }
            let k2: Vec<f64> = (1..=N0).map(|j| rhs(&y1, j)).collect();
            for j in 0..N0 {
                let c1 = h * k1[j];
                let c2 = h * (k2[j] - k1[j]) / 2.0;
                next[j] = (c2 + c1) + y[j];
            }
        }
        y = next;
        knots.push(y);
    }
    knots
}

#[test]
fn finite_support_matches_plain_loop() {
    let inst = make_finite_support(N0, 2.0).unwrap();
    let n = 40;
    let mesh = Mesh::uniform(0.0, 1.0, n).unwrap();
    let schedules = [
        TruncationSchedule::uniform(n, N0).unwrap(),
        TruncationSchedule::uniform(n, 13).unwrap(),
        TruncationSchedule::from_dims((0..=n).map(|k| N0 + (k * 7) % 5).collect()).unwrap(),
    ];
    for r in [0usize, 1, 2] {
        let expected = reference(&mesh, r);
        for sched in &schedules {
            let (traj, _) = solve(&inst, &mesh, sched, r, CostFn::power(1.0)).unwrap();
            for (k, (knot, want)) in traj.knots().iter().zip(&expected).enumerate() {
                for (j, (&got, &w)) in knot.components().iter().zip(want).enumerate() {
                    let d = ulp_distance(got, w);
                    assert!(d <= 4, "r={r} k={k} j={}: {d} ulp", j + 1);
                }
                assert!(knot.components()[N0..].iter().all(|&v| v == 0.0));
            }
        }
    }
}
