use proptest::prelude::*;

use trunc_ivp_core::instances::{make_lp_coupled, make_lp_sin, Decay};
use trunc_ivp_core::integrator::{
    solve, solve_traced, CostFn, Mesh, TraceMode, TruncationSchedule,
};
use trunc_ivp_core::space::{TruncVec, WeightedSpace};

fn space() -> impl Strategy<Value = WeightedSpace> {
    (
        prop_oneof![Just(1.0), Just(1.5), Just(2.0), Just(3.0), Just(4.0)],
        1.0f64..2.0,
    )
        .prop_map(|(p, q)| WeightedSpace::power(p, q).unwrap())
}

fn vector(max_dim: usize) -> impl Strategy<Value = TruncVec> {
    prop::collection::vec(-10.0f64..10.0, 0..max_dim).prop_map(|v| TruncVec::new(v).unwrap())
}

proptest! {
    #[test]
    fn projection_contracts(s in space(), v in vector(40), k in 0usize..50) {
        prop_assert!(s.norm(&v.project(k)) <= s.norm(&v) * (1.0 + 1e-12));
    }

    #[test]
    fn coordinate_bound(s in space(), v in vector(40)) {
        let n = s.norm(&v);
        for j in 1..=v.dim() {
            prop_assert!(v.get(j).abs() * s.weight(j) <= n * (1.0 + 1e-12));
        }
    }

    #[test]
    fn triangle_inequality(s in space(), u in vector(30), v in vector(30)) {
        let zero = TruncVec::zeros(0);
        let sum: Vec<f64> = (1..=u.dim().max(v.dim())).map(|j| u.get(j) + v.get(j)).collect();
        let sum = TruncVec::new(sum).unwrap();
        prop_assert!(s.norm(&sum) <= (s.norm(&u) + s.norm(&v)) * (1.0 + 1e-12) + 1e-300);
        prop_assert!((s.distance(&u, &zero) - s.norm(&u)).abs() <= 1e-12 * s.norm(&u));
    }

    #[test]
    fn tail_bound_is_monotone(s in space(), k in 1usize..10_000) {
        prop_assert!(s.tail_bound(k + 1) <= s.tail_bound(k));
        prop_assert!(s.tail_bound(k) <= s.tail_bound(0));
    }

    #[test]
    fn inverse_law(scale in 0.1f64..10.0, expo in 0.2f64..3.0, frac in 0.001f64..0.999) {
        let g = Decay::power(scale, expo);
        let eps = g.eval(1) * frac;
        let k = g.inverse(eps).unwrap();
        prop_assert!(g.eval(k) <= eps);
        prop_assert!(k == 1 || g.eval(k - 1) > eps);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ledger_counts_and_knot_consistency(
        n in 1usize..20,
        dims in prop::collection::vec(1usize..12, 21),
        r in 0usize..4,
    ) {
        let inst = make_lp_coupled(2.0).unwrap();
        let mesh = Mesh::graded(0.0, 1.0, n, 1.5).unwrap();
        let sched = TruncationSchedule::from_dims(dims[..=n].to_vec()).unwrap();
        let (traj, ledger) =
            solve_traced(&inst, &mesh, &sched, r, CostFn::power(1.0), TraceMode::On { cap: 10_000 }).unwrap();
        let order = r.max(1);
        let per = order * (order + 1) / 2;
        let m = sched.arg_dims();
        let mut cost = 0.0;
        for (k, step) in ledger.steps().iter().enumerate() {
            prop_assert_eq!(step.evaluations, sched.step_dim(k) * per);
            prop_assert_eq!(step.arg_dim, m[k]);
            cost += (m[k] * sched.step_dim(k) * per) as f64;
        }
        prop_assert!((ledger.total_cost() - cost).abs() <= 1e-9 * cost);
        let traced: usize = ledger.trace().iter().map(|p| p.count).sum();
        prop_assert_eq!(traced, ledger.scalar_evaluations());
        for (k, &t) in mesh.points().iter().enumerate() {
            prop_assert_eq!(traj.eval(t).unwrap(), traj.knot(k).clone());
        }
        for k in 0..n {
            let end = traj.segments()[k].eval_local(1.0);
            prop_assert_eq!(&end, traj.knot(k + 1));
        }
    }
}

#[test]
fn solves_are_deterministic() {
    let inst = make_lp_sin(2.0).unwrap();
    let mesh = Mesh::uniform(0.0, 1.0, 37).unwrap();
    let sched = TruncationSchedule::uniform(37, 50).unwrap();
    let a = solve(&inst, &mesh, &sched, 3, CostFn::power(1.0)).unwrap();
    let b = solve(&inst, &mesh, &sched, 3, CostFn::power(1.0)).unwrap();
    assert_eq!(a.0, b.0);
    assert_eq!(a.1, b.1);
}
