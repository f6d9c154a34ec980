//! Indistinguishable pairs run through the solver.

use serde::Serialize;
use trunc_ivp_core::instances::{
    lp_class_params, make_case1, make_case2, make_case3, AdversarialPair, BumpBounds, ClassParams,
};
use trunc_ivp_core::integrator::{
    solve_traced, CostFn, CostLedger, Mesh, TraceMode, Trajectory, TruncationSchedule,
};
use trunc_ivp_core::space::WeightedSpace;

use crate::error::{HarnessError, Result};
use crate::runs::trajectory_table;

const TRACE_CAP: usize = 1 << 22;
const CSV_SAMPLES: usize = 8;
const CSV_COMPONENTS: usize = 4;

/// One witness run: the pair, the separation and the information check.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct WitnessRecord {
    pub case: String,
    pub n: usize,
    pub dim: usize,
    pub r: usize,
    /// Certified lower bound on the solution distance.
    pub guaranteed_gap: f64,
    /// Measured `‖z_f(b) − z_g(b)‖` for the first two cases.
    pub measured_gap: Option<f64>,
    /// The value the gap should equal: `γ(N)` or `(b−a)δ(N)`.
    pub expected_gap: Option<f64>,
    /// `guaranteed_gap·n^{max(r,1)}`.
    pub scaled_gap: f64,
    pub trace_points: usize,
    /// Trajectory CSVs of the two runs agree byte for byte.
    pub identical_output: bool,
    /// `min_k ℓ_k / N_k`.
    pub min_step_ratio: f64,
}

fn lp_setup(p: f64, r: usize) -> Result<(WeightedSpace, ClassParams)> {
    let space = WeightedSpace::harmonic(p)?;
    let params = lp_class_params(&space)?.with_smoothness(r as u32);
    Ok((space, params))
}

fn run(
    pair_member: &trunc_ivp_core::instances::ProblemInstance,
    n: usize,
    dim: usize,
    r: usize,
) -> Result<(Trajectory, CostLedger)> {
    let mesh = Mesh::uniform(pair_member.params.a, pair_member.params.b, n)?;
    let sched = TruncationSchedule::uniform(n, dim)?;
    Ok(solve_traced(
        pair_member,
        &mesh,
        &sched,
        r,
        CostFn::power(1.0),
        TraceMode::On { cap: TRACE_CAP },
    )?)
}

/// Runs both members and fails on the first evaluation whose information
/// differs. Returns the record fields shared by all cases.
fn compare(
    pair: &AdversarialPair,
    n: usize,
    dim: usize,
    r: usize,
) -> Result<(usize, bool, f64, Trajectory)> {
    let (ta, la) = run(&pair.first, n, dim, r)?;
    let (tb, lb) = run(&pair.second, n, dim, r)?;
    if la.trace_dropped() > 0 {
        return Err(HarnessError::Check(format!(
            "trace capacity {TRACE_CAP} exceeded"
        )));
    }
    for (i, (x, y)) in la.trace().iter().zip(lb.trace()).enumerate() {
        if x.first.to_bits() != y.first.to_bits() || x.dim != y.dim || x.count != y.count {
            return Err(HarnessError::Check(format!(
                "{}: information differs at evaluation {i} (step {}, stage {}, node {}): first coordinate {} vs {}",
                pair.first.label, x.step, x.stage, x.node, x.first, y.first
            )));
        }
    }
    if la.trace().len() != lb.trace().len() {
        return Err(HarnessError::Check(format!(
            "{}: trace lengths differ ({} vs {})",
            pair.first.label,
            la.trace().len(),
            lb.trace().len()
        )));
    }
    // Full argument vectors are rebuilt from the knots so that every
    // component of P_N f and P_N g is compared, not just the first one.
    let args: Vec<&[f64]> = ta.knots().iter().map(|k| k.components()).collect();
    if let Some((i, j)) = pair.first_mismatch(&args, dim) {
        return Err(HarnessError::Check(format!(
            "{}: right-hand sides differ at knot {i}, component {j}",
            pair.first.label
        )));
    }
    let a = trajectory_table(&ta, CSV_SAMPLES, CSV_COMPONENTS).to_bytes()?;
    let b = trajectory_table(&tb, CSV_SAMPLES, CSV_COMPONENTS).to_bytes()?;
    let ratio = la
        .steps()
        .iter()
        .map(|s| s.evaluations as f64 / dim as f64)
        .fold(f64::INFINITY, f64::min);
    Ok((la.trace().len(), a == b, ratio, ta))
}

/// Initial-value (`case1`) or right-hand-side (`case2`) witness at dimension
/// `dim`.
pub fn case12(case: u8, p: f64, n: usize, dim: usize, r: usize) -> Result<WitnessRecord> {
    let (space, params) = lp_setup(p, r)?;
    let (pair, expected) = match case {
        1 => (
            make_case1(dim, &space, &params)?,
            params.gamma.eval(dim as u64),
        ),
        2 => (
            make_case2(dim, &space, &params)?,
            params.interval_length() * params.delta.eval(dim as u64),
        ),
        _ => return Err(HarnessError::config("case", "must be 1 or 2")),
    };
    let (points, identical, ratio, _) = compare(&pair, n, dim, r)?;
    let b = params.b;
    let za = pair
        .first
        .exact_projection(dim + 1, b)
        .ok_or_else(|| HarnessError::Check("witness without exact solution".into()))?;
    let zb = pair
        .second
        .exact_projection(dim + 1, b)
        .ok_or_else(|| HarnessError::Check("witness without exact solution".into()))?;
    let measured = space.distance(&za, &zb);
    Ok(WitnessRecord {
        case: format!("case{case}"),
        n,
        dim,
        r,
        guaranteed_gap: pair.guaranteed_gap,
        measured_gap: Some(measured),
        expected_gap: Some(expected),
        scaled_gap: pair.guaranteed_gap * (n as f64).powi(r.max(1) as i32),
        trace_points: points,
        identical_output: identical,
        min_step_ratio: ratio,
    })
}

/// Discretization witness: solve `f = A·e_1` with a one-dimensional
/// truncation, read the first coordinates off the ledger trace, hide bumps
/// between them and re-run on the perturbed field.
pub fn case3(p: f64, n: usize, r: usize, a_coef: f64) -> Result<WitnessRecord> {
    let (space, params) = lp_setup(p, r)?;
    let bounds = BumpBounds::default_for(&params);
    let probe = make_case3(&[], a_coef, &space, &params, bounds)?;
    let (_, ledger) = run(&probe.first, n, 1, r)?;
    if ledger.trace_dropped() > 0 {
        return Err(HarnessError::Check(format!(
            "trace capacity {TRACE_CAP} exceeded"
        )));
    }
    let trace: Vec<f64> = ledger.trace().iter().map(|t| t.first).collect();
    let pair = make_case3(&trace, a_coef, &space, &params, bounds)?;
    let (points, identical, ratio, _) = compare(&pair, n, 1, r)?;
    Ok(WitnessRecord {
        case: "case3".into(),
        n,
        dim: 1,
        r,
        guaranteed_gap: pair.guaranteed_gap,
        measured_gap: None,
        expected_gap: None,
        scaled_gap: pair.guaranteed_gap * (n as f64).powi(r.max(1) as i32),
        trace_points: points,
        identical_output: identical,
        min_step_ratio: ratio,
    })
}
