//! Indistinguishable pairs: identical information, separated solutions.

use trunc_ivp_core::instances::{
    lp_class_params, make_case1, make_case2, make_case3, BumpBounds, Indistinguishable,
};
use trunc_ivp_core::integrator::{
    solve, solve_traced, CostFn, Mesh, TraceMode, TruncationSchedule,
};
use trunc_ivp_core::space::WeightedSpace;

fn setup(r: u32) -> (WeightedSpace, trunc_ivp_core::instances::ClassParams) {
    let space = WeightedSpace::harmonic(2.0).unwrap();
    let params = lp_class_params(&space).unwrap().with_smoothness(r);
    (space, params)
}

#[test]
fn case1_pair_is_invisible_and_separated() {
    let (space, params) = setup(1);
    for n_dim in [1usize, 4, 9, 64] {
        let pair = make_case1(n_dim, &space, &params).unwrap();
        let mesh = Mesh::uniform(0.0, 1.0, 10).unwrap();
        let sched = TruncationSchedule::uniform(10, n_dim).unwrap();
        let (a, la) = solve(&pair.first, &mesh, &sched, 1, CostFn::power(1.0)).unwrap();
        let (b, lb) = solve(&pair.second, &mesh, &sched, 1, CostFn::power(1.0)).unwrap();
        assert_eq!(a, b);
        assert_eq!(la, lb);
        let za = pair.first.exact_projection(n_dim + 1, 0.7).unwrap();
        let zb = pair.second.exact_projection(n_dim + 1, 0.7).unwrap();
        let gap = space.distance(&za, &zb);
        assert!((gap - params.gamma.eval(n_dim as u64)).abs() <= 4.0 * f64::EPSILON * gap);
        assert_eq!(pair.indistinguishable, Indistinguishable::UpToDim(n_dim));
    }
    let four = make_case1(4, &space, &params).unwrap();
    assert!((four.guaranteed_gap - 0.5).abs() < 1e-15);
}

#[test]
fn case2_pair_separates_linearly() {
    let (space, params) = setup(1);
    let n0 = params.delta.inverse(params.rhs_bound).unwrap() as usize;
    for n_dim in [n0, 2 * n0, 10 * n0] {
        let pair = make_case2(n_dim, &space, &params).unwrap();
        let mesh = Mesh::uniform(0.0, 1.0, 8).unwrap();
        let sched = TruncationSchedule::uniform(8, n_dim).unwrap();
        let (a, _) = solve(&pair.first, &mesh, &sched, 2, CostFn::power(1.0)).unwrap();
        let (b, _) = solve(&pair.second, &mesh, &sched, 2, CostFn::power(1.0)).unwrap();
        assert_eq!(a, b);
        let za = pair.first.exact_projection(n_dim + 1, 1.0).unwrap();
        let zb = pair.second.exact_projection(n_dim + 1, 1.0).unwrap();
        let gap = space.distance(&za, &zb);
        let expected = params.delta.eval(n_dim as u64);
        assert!((gap - expected).abs() <= 4.0 * f64::EPSILON * expected);
        assert_eq!(pair.guaranteed_gap, expected);
    }
}

fn case3_gap(r: u32, n: usize) -> f64 {
    let (space, params) = setup(r);
    let a_coef = 0.1;
    // f = A·e_1 seen through a one-dimensional truncation
    let probe = trunc_ivp_core::instances::make_case3(
        &[],
        a_coef,
        &space,
        &params,
        BumpBounds::default_for(&params),
    )
    .unwrap();
    let mesh = Mesh::uniform(0.0, 1.0, n).unwrap();
    let sched = TruncationSchedule::uniform(n, 1).unwrap();
    let trace_mode = TraceMode::On { cap: 1 << 20 };
    let (traj_f, ledger) = solve_traced(
        &probe.first,
        &mesh,
        &sched,
        r as usize,
        CostFn::power(1.0),
        trace_mode,
    )
    .unwrap();
    let trace: Vec<f64> = ledger.trace().iter().map(|p| p.first).collect();
    let pair = make_case3(
        &trace,
        a_coef,
        &space,
        &params,
        BumpBounds::default_for(&params),
    )
    .unwrap();
    let (traj_f2, _) = solve(&pair.first, &mesh, &sched, r as usize, CostFn::power(1.0)).unwrap();
    let (traj_g, ledger_g) = solve_traced(
        &pair.second,
        &mesh,
        &sched,
        r as usize,
        CostFn::power(1.0),
        trace_mode,
    )
    .unwrap();
    assert_eq!(traj_f, traj_f2);
    assert_eq!(traj_f, traj_g);
    assert_eq!(ledger.trace(), ledger_g.trace());

    // Cross-check the closed-form bump integral with composite Simpson.
    let hi = a_coef * params.interval_length();
    let m = 200_000;
    let dx = hi / m as f64;
    let h = |x: f64| pair.second.component(1, &[x]) - pair.first.component(1, &[x]);
    let mut simpson = h(0.0) + h(hi);
    for i in 1..m {
        simpson += if i % 2 == 1 { 4.0 } else { 2.0 } * h(i as f64 * dx);
    }
    simpson *= dx / 3.0;
    let closed = pair.guaranteed_gap * a_coef * (1.0 + params.lipschitz * params.interval_length());
    assert!(
        (simpson - closed).abs() <= 1e-6 * closed,
        "{simpson} vs {closed}"
    );
    pair.guaranteed_gap
}

#[test]
fn case3_gap_scales_like_the_discretization_rate() {
    for r in [1u32, 2] {
        let scaled: Vec<f64> = [32usize, 64, 128]
            .iter()
            .map(|&n| case3_gap(r, n) * (n as f64).powi(r as i32))
            .collect();
        let max = scaled.iter().cloned().fold(0.0, f64::max);
        let min = scaled.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(max / min <= 2.0, "r={r}: {scaled:?}");
        // doubling the number of gaps divides the gap by about 2^R
        let ratio = case3_gap(r, 64) / case3_gap(r, 128);
        let expected = 2f64.powi(r as i32);
        assert!(
            (ratio / expected - 1.0).abs() < 0.05,
            "r={r}: ratio {ratio}"
        );
    }
}
