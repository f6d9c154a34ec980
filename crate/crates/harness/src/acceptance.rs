//! The acceptance suite: one pass/fail result per criterion with the
//! measured numbers behind it.
//!
//! Criteria 7 (ball invariant) and 8 (per-step information volume) have no
//! runs of their own; they are evaluated over the records produced by the
//! other criteria in the same invocation.

use std::convert::Infallible;
use std::time::Instant;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::Serialize;
use trunc_ivp_core::analysis::{fit_order, loglog_slope, lp_closed_form};
use trunc_ivp_core::instances::{
    lp_class_params, make_decoupled_linear, make_finite_support, make_lp_sin, ProblemInstance,
};
use trunc_ivp_core::integrator::poly::horner;
use trunc_ivp_core::integrator::stage::{StagePlan, StageScratch};
use trunc_ivp_core::integrator::{solve, CostFn, Mesh, TailMode, TruncationSchedule};
use trunc_ivp_core::space::WeightedSpace;

use crate::config::ConstantsConfig;
use crate::error::Result;
use crate::experiments::{plan_constants, run_cells};
use crate::runs::{run_cell, RunRecord, RunSpec};
use crate::witness::{case12, case3, WitnessRecord};

/// Pass/fail thresholds. The defaults are the published acceptance values;
/// tests tamper with them to check that the suite can fail.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tolerances {
    /// Allowed `|order − max(r,1)|` in criterion 1.
    pub order_slope: f64,
    /// Allowed `|slope + (1 − 1/p)|` in criterion 2.
    pub truncation_slope: f64,
    /// Bound violations allowed in criterion 3.
    pub bound_violations: usize,
    /// Cost-slope band for `β = 1`.
    pub cost_slope_beta1: (f64, f64),
    /// Cost-slope band for `β = 0`.
    pub cost_slope_beta0: (f64, f64),
    /// Relative tolerance on the exact gaps of the first two witnesses, in
    /// units of the machine epsilon.
    pub gap_ulps: f64,
    /// Allowed `max/min` of `gap·n^R` across `n` for the third witness.
    pub scaled_gap_band: f64,
    /// Allowed ulp distance to the brute-force reference loop.
    pub reference_ulps: u64,
    /// Allowed ulp distance of binary64 Euler to `(1−h)^n`.
    pub euler_ulps: u64,
    /// Ball-invariant violations allowed.
    pub ball_violations: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            order_slope: 0.25,
            truncation_slope: 0.15,
            bound_violations: 0,
            cost_slope_beta1: (4.5, 5.5),
            cost_slope_beta0: (2.6, 3.4),
            gap_ulps: 4.0,
            scaled_gap_band: 2.0,
            reference_ulps: 4,
            euler_ulps: 2,
            ball_violations: 0,
        }
    }
}

/// Outcome of one criterion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    /// Measured numbers, deterministic across invocations.
    pub measured: String,
    pub elapsed_s: f64,
    /// Documented runtime; exceeding it is reported, not failed. Zero for
    /// the inline criteria.
    pub budget_s: f64,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let over = if self.budget_s > 0.0 && self.elapsed_s > self.budget_s {
            " over budget"
        } else {
            ""
        };
        if self.budget_s == 0.0 {
            return format!(
                "criterion {} {verdict} {}: {} [inline]",
                self.id, self.name, self.measured
            );
        }
        format!(
            "criterion {} {verdict} {}: {} [{:.1} s, budget {} s{over}]",
            self.id, self.name, self.measured, self.elapsed_s, self.budget_s
        )
    }
}

pub const ALL: [u8; 8] = [1, 2, 3, 4, 5, 6, 7, 8];

/// Runs the selected criteria in increasing order.
pub fn run_suite(
    select: &[u8],
    tol: &Tolerances,
    threads: Option<usize>,
) -> Result<Vec<CriterionResult>> {
    let mut selected: Vec<u8> = select.to_vec();
    selected.sort_unstable();
    selected.dedup();
    let mut suite = Suite {
        tol: tol.clone(),
        threads,
        records: Vec::new(),
        witnesses: Vec::new(),
    };
    // 7 and 8 need runs; borrow the bound-dominance grid when nothing else
    // in the selection produces any.
    let inline_only = selected.iter().all(|&c| c >= 7) && !selected.is_empty();
    let mut out = Vec::new();
    if inline_only {
        suite.bound_dominance()?;
    }
    for id in selected {
        let res = match id {
            1 => suite.discretization_order()?,
            2 => suite.truncation_rate()?,
            3 => suite.bound_dominance()?,
            4 => suite.cost_exponent()?,
            5 => suite.witnesses()?,
            6 => suite.oracle_equivalence()?,
            7 => suite.ball_invariant(),
            8 => suite.information_volume(),
            _ => {
                return Err(crate::error::HarnessError::config(
                    "--only",
                    format!("unknown criterion {id}; expected 1..=8"),
                ))
            }
        };
        out.push(res);
    }
    Ok(out)
}

struct Suite {
    tol: Tolerances,
    threads: Option<usize>,
    /// Class-member runs from criteria 1–4.
    records: Vec<RunRecord>,
    witnesses: Vec<WitnessRecord>,
}

fn lp_sin(p: f64) -> Result<ProblemInstance> {
    Ok(make_lp_sin(p)?)
}

fn powers_of_two(lo: u32, hi: u32) -> Vec<usize> {
    (lo..=hi).map(|e| 1usize << e).collect()
}

fn result(
    id: u8,
    name: &'static str,
    passed: bool,
    measured: String,
    start: Instant,
    budget_s: f64,
) -> CriterionResult {
    CriterionResult {
        id,
        name,
        passed,
        measured,
        elapsed_s: start.elapsed().as_secs_f64(),
        budget_s,
    }
}

fn error_of(rec: &RunRecord) -> f64 {
    rec.error.unwrap_or(f64::NAN)
}

impl Suite {
    fn run(&mut self, inst: &ProblemInstance, specs: &[RunSpec]) -> Result<Vec<RunRecord>> {
        let recs = run_cells(self.threads, specs, |s| run_cell(inst, s))?;
        self.records.extend(recs.iter().cloned());
        Ok(recs)
    }

    /// lp_sin, p = 2, N = 4096, n = 16…512: fitted order vs `max(r, 1)`.
    ///
    /// The error is measured on the first `N` coordinates, where the
    /// discretization error lives; the omitted tail is the same for every `n`
    /// and would flatten the fit at `z^1(1)·N^{-1/2} ≈ 0.03`.
    fn discretization_order(&mut self) -> Result<CriterionResult> {
        let start = Instant::now();
        let inst = lp_sin(2.0)?;
        let ns = powers_of_two(4, 9);
        let mut specs = Vec::new();
        for r in 0..=3 {
            for &n in &ns {
                let mut s = RunSpec::uniform(n, 4096, r);
                s.error = Some(TailMode::Projected);
                specs.push(s);
            }
        }
        let recs = self.run(&inst, &specs)?;
        let mut passed = true;
        let mut parts = Vec::new();
        for (r, chunk) in recs.chunks(ns.len()).enumerate() {
            let pairs: Vec<(f64, f64)> = chunk.iter().map(|c| (c.n as f64, error_of(c))).collect();
            let expected = r.max(1) as f64;
            let ok = match fit_order(&pairs) {
                Ok(fit) => {
                    parts.push(format!("r={r} order {:.3} (target {expected})", fit.slope));
                    (fit.slope - expected).abs() <= self.tol.order_slope
                }
                Err(e) => {
                    parts.push(format!("r={r} fit failed: {e}"));
                    false
                }
            };
            passed &= ok;
        }
        Ok(result(
            1,
            "discretization order",
            passed,
            parts.join(", "),
            start,
            60.0,
        ))
    }

    /// lp_sin, n = 2048, N = 4…4096, p ∈ {2, 4}: slope vs `−(1 − 1/p)`.
    fn truncation_rate(&mut self) -> Result<CriterionResult> {
        let start = Instant::now();
        let dims = powers_of_two(2, 12);
        let mut passed = true;
        let mut parts = Vec::new();
        for p in [2.0, 4.0] {
            let inst = lp_sin(p)?;
            let specs: Vec<RunSpec> = dims.iter().map(|&d| RunSpec::uniform(2048, d, 1)).collect();
            let recs = self.run(&inst, &specs)?;
            let xs: Vec<f64> = dims.iter().map(|&d| d as f64).collect();
            let ys: Vec<f64> = recs.iter().map(error_of).collect();
            let target = -(1.0 - 1.0 / p);
            match loglog_slope(&xs, &ys) {
                Ok((slope, _)) => {
                    parts.push(format!("p={p} slope {slope:.4} (target {target})"));
                    passed &= (slope - target).abs() <= self.tol.truncation_slope;
                }
                Err(e) => {
                    parts.push(format!("p={p} fit failed: {e}"));
                    passed = false;
                }
            }
        }
        Ok(result(
            2,
            "truncation rate",
            passed,
            parts.join(", "),
            start,
            60.0,
        ))
    }

    /// `err ≤ A·N^{-1/2} + B/n` on a 6×6 grid, `A, B` from the radius.
    fn bound_dominance(&mut self) -> Result<CriterionResult> {
        let start = Instant::now();
        let inst = lp_sin(2.0)?;
        let (a, b) = plan_constants(&inst, ConstantsConfig::Radius);
        let ns = powers_of_two(4, 9);
        let dims: Vec<usize> = (1..=6).map(|e| 1usize << (2 * e)).collect();
        let specs: Vec<RunSpec> = ns
            .iter()
            .flat_map(|&n| dims.iter().map(move |&d| RunSpec::uniform(n, d, 0)))
            .collect();
        let recs = self.run(&inst, &specs)?;
        let mut violations = 0;
        let mut worst: f64 = 0.0;
        for rec in &recs {
            let bound = a * (rec.dim as f64).powf(-0.5) + b / rec.n as f64;
            let e = error_of(rec);
            if !(e <= bound) {
                violations += 1;
            }
            worst = worst.max(e / bound);
        }
        let passed = violations <= self.tol.bound_violations;
        let measured = format!(
            "A={a:.4} B={b:.4}, {} cells, {violations} violations, max err/bound {worst:.3e}",
            recs.len()
        );
        Ok(result(
            3,
            "explicit bound dominance",
            passed,
            measured,
            start,
            30.0,
        ))
    }

    /// Closed-form plans for `ε = 2^-4 … 2^-9`, `p = 2`.
    ///
    /// `β = 1`: every plan is run; errors must meet `ε` and the slope of the
    /// ledger cost is fitted. `β = 0`: plans down to `2^-7` are run and must
    /// meet `ε` with ledger cost equal to the planned cost; the slope is
    /// fitted over the planned costs of all six targets.
    fn cost_exponent(&mut self) -> Result<CriterionResult> {
        let start = Instant::now();
        let inst = lp_sin(2.0)?;
        let (a, b) = plan_constants(&inst, ConstantsConfig::LpSinCertified);
        let eps: Vec<f64> = (4..=9).map(|e| 0.5f64.powi(e)).collect();
        let inv: Vec<f64> = eps.iter().map(|e| 1.0 / e).collect();
        let mut passed = true;
        let mut parts = vec![format!("A={a:.4} B={b:.4}")];
        for (beta, band, realize_to) in [
            (1.0, self.tol.cost_slope_beta1, 0.5f64.powi(9)),
            (0.0, self.tol.cost_slope_beta0, 0.5f64.powi(7)),
        ] {
            let plans = eps
                .iter()
                .map(|&e| lp_closed_form(e, 2.0, beta, a, b))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            let specs: Vec<RunSpec> = plans
                .iter()
                .filter(|pl| pl.epsilon >= realize_to)
                .map(|pl| {
                    let mut s = RunSpec::uniform(pl.n as usize, pl.dim as usize, 1);
                    s.beta = beta;
                    s
                })
                .collect();
            let recs = self.run(&inst, &specs)?;
            let mut worst: f64 = 0.0;
            for (pl, rec) in plans.iter().zip(&recs) {
                let ratio = error_of(rec) / pl.epsilon;
                worst = worst.max(ratio);
                passed &= ratio <= 1.0;
                passed &= (rec.cost - pl.predicted_cost).abs() <= 1e-12 * pl.predicted_cost;
            }
            let all_run = recs.len() == plans.len();
            let costs: Vec<f64> = if all_run {
                recs.iter().map(|r| r.cost).collect()
            } else {
                plans.iter().map(|p| p.predicted_cost).collect()
            };
            let (slope, _) = loglog_slope(&inv, &costs)?;
            passed &= band.0 <= slope && slope <= band.1;
            let largest = plans.last().map(|p| (p.n, p.dim)).unwrap_or_default();
            parts.push(format!(
                "beta={beta} slope {slope:.3} from {} costs in [{}, {}], {} runs max err/eps {worst:.3}, largest plan n={} N={}",
                if all_run { "ledger" } else { "planned" },
                band.0,
                band.1,
                recs.len(),
                largest.0,
                largest.1
            ));
        }
        Ok(result(
            4,
            "cost exponent",
            passed,
            parts.join("; "),
            start,
            180.0,
        ))
    }

    fn witnesses(&mut self) -> Result<CriterionResult> {
        let start = Instant::now();
        let p = 2.0;
        let space = WeightedSpace::harmonic(p)?;
        let params = lp_class_params(&space)?;
        let n0 = params.delta.inverse(params.rhs_bound)? as usize;
        let mut cells: Vec<(u8, usize, usize, usize)> = Vec::new();
        for d in [1usize, 4, 9, 64] {
            cells.push((1, 10, d, 1));
        }
        for d in [n0, 2 * n0, 10 * n0] {
            cells.push((2, 8, d, 2));
        }
        for r in [1usize, 2] {
            for n in [32usize, 64, 128] {
                cells.push((3, n, 1, r));
            }
        }
        let recs = run_cells(self.threads, &cells, |&(case, n, d, r)| match case {
            3 => case3(p, n, r, 0.1),
            c => case12(c, p, n, d, r),
        })?;
        self.witnesses.extend(recs.iter().cloned());
        let mut passed = recs.iter().all(|r| r.identical_output);
        let mut worst_ulps: f64 = 0.0;
        for rec in recs.iter().filter(|r| r.case != "case3") {
            let (m, e) = (
                rec.measured_gap.unwrap_or(f64::NAN),
                rec.expected_gap.unwrap_or(f64::NAN),
            );
            let ulps = (m - e).abs() / (f64::EPSILON * e);
            worst_ulps = worst_ulps.max(ulps);
            passed &= ulps <= self.tol.gap_ulps;
        }
        let mut bands = Vec::new();
        for r in [1usize, 2] {
            let scaled: Vec<f64> = recs
                .iter()
                .filter(|w| w.case == "case3" && w.r == r)
                .map(|w| w.scaled_gap)
                .collect();
            let max = scaled.iter().cloned().fold(0.0, f64::max);
            let min = scaled.iter().cloned().fold(f64::INFINITY, f64::min);
            let band = max / min;
            passed &= band <= self.tol.scaled_gap_band;
            bands.push(format!("r={r} gap*n^R band {band:.4}"));
        }
        let identical = recs.iter().filter(|r| r.identical_output).count();
        let measured = format!(
            "case1/2 max gap deviation {worst_ulps:.2} eps, {}, {identical}/{} pairs byte-identical",
            bands.join(", "),
            recs.len()
        );
        Ok(result(
            5,
            "lower-bound witnesses",
            passed,
            measured,
            start,
            60.0,
        ))
    }

    fn oracle_equivalence(&mut self) -> Result<CriterionResult> {
        let start = Instant::now();
        let worst_ref = finite_support_worst_ulps()?;
        let (exact_ok, euler_ulps) = linear_decay_check()?;
        let passed =
            worst_ref <= self.tol.reference_ulps && exact_ok && euler_ulps <= self.tol.euler_ulps;
        let measured = format!(
            "finite support max {worst_ref} ulp, rational (1-h)^n exact: {exact_ok}, binary64 Euler {euler_ulps} ulp"
        );
        Ok(result(
            6,
            "oracle equivalence",
            passed,
            measured,
            start,
            10.0,
        ))
    }

    fn ball_invariant(&self) -> CriterionResult {
        let start = Instant::now();
        let checked: Vec<&RunRecord> = self
            .records
            .iter()
            .filter(|r| r.ball_sup.is_some())
            .collect();
        let violations = checked.iter().filter(|r| !r.ball_ok()).count();
        let worst = checked
            .iter()
            .map(|r| r.ball_sup.unwrap() / r.radius)
            .fold(0.0, f64::max);
        let passed = !checked.is_empty() && violations <= self.tol.ball_violations;
        let measured = format!(
            "{} runs, {violations} violations, max ball/radius {worst:.3e}",
            checked.len()
        );
        result(7, "ball invariant", passed, measured, start, 0.0)
    }

    fn information_volume(&self) -> CriterionResult {
        let start = Instant::now();
        let ratios: Vec<f64> = self
            .records
            .iter()
            .map(|r| r.min_step_ratio)
            .chain(self.witnesses.iter().map(|w| w.min_step_ratio))
            .collect();
        let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let passed = !ratios.is_empty() && min >= 1.0;
        let measured = format!("{} runs, min per-step evaluations / N {min}", ratios.len());
        result(
            8,
            "per-step information volume",
            passed,
            measured,
            start,
            0.0,
        )
    }
}

/// Distance in units in the last place between two finite doubles.
pub fn ulp_distance(a: f64, b: f64) -> u64 {
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

const N0: usize = 8;

/// `f^j = ½ sin(y^{j mod N0 + 1}) − ¼ y^j + 0.1 cos(y^1)` written out by hand.
fn reference_rhs(y: &[f64; N0], j: usize) -> f64 {
    let next = j % N0 + 1;
    0.5 * y[next - 1].sin() - 0.25 * y[j - 1] + 0.1 * y[0].cos()
}

/// Plain loop: Euler for `r ≤ 1`, the two-stage interpolation for `r = 2`.
fn reference_knots(steps: &[f64], r: usize) -> Vec<[f64; N0]> {
    let mut y = [0.0; N0];
    for (j, v) in y.iter_mut().enumerate() {
        *v = 1.0 / (j + 1) as f64;
    }
    let mut knots = vec![y];
    for &h in steps {
        let k1: Vec<f64> = (1..=N0).map(|j| reference_rhs(&y, j)).collect();
        let mut next = [0.0; N0];
        if r <= 1 {
            for j in 0..N0 {
                next[j] = h * k1[j] + y[j];
            }
        } else {
            let mut y1 = [0.0; N0];
            for j in 0..N0 {
                y1[j] = h * k1[j] + y[j];
            }
            let k2: Vec<f64> = (1..=N0).map(|j| reference_rhs(&y1, j)).collect();
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

fn finite_support_worst_ulps() -> Result<u64> {
    let inst = make_finite_support(N0, 2.0)?;
    let n = 40;
    let mesh = Mesh::uniform(0.0, 1.0, n)?;
    let schedules = [
        TruncationSchedule::uniform(n, N0)?,
        TruncationSchedule::uniform(n, 13)?,
        TruncationSchedule::from_dims((0..=n).map(|k| N0 + (k * 7) % 5).collect())?,
    ];
    let mut worst = 0;
    for r in [0usize, 1, 2] {
        let expected = reference_knots(mesh.steps(), r);
        for sched in &schedules {
            let (traj, _) = solve(&inst, &mesh, sched, r, CostFn::power(1.0))?;
            for (knot, want) in traj.knots().iter().zip(&expected) {
                for (&got, &w) in knot.components().iter().zip(want) {
                    worst = worst.max(ulp_distance(got, w));
                }
                if knot.components()[N0..].iter().any(|&v| v != 0.0) {
                    worst = u64::MAX;
                }
            }
        }
    }
    Ok(worst)
}

/// Exact rational Euler on `y' = −y` against `(1 − h)^n`, and binary64
/// Euler against the same power rounded once.
fn linear_decay_check() -> Result<(bool, u64)> {
    let n = 100;
    let int = |v: f64| BigRational::from_float(v).expect("finite");
    let h = int(1.0) / int(100.0);
    let plan = StagePlan::<BigRational>::new(1);
    let mut scratch = StageScratch::new();
    let mut coeffs = vec![BigRational::one(); plan.stride()];
    let mut y = vec![BigRational::one()];
    for _ in 0..n {
        plan.run::<Infallible>(&y, &h, 1, &mut coeffs, &mut scratch, |_, _, arg, out| {
            out[0] = -arg[0].clone();
            Ok(())
        })
        .expect("infallible");
        y[0] = horner(&coeffs, &BigRational::one());
    }
    let factor = BigRational::one() - h;
    let mut power = BigRational::one();
    for _ in 0..n {
        power *= factor.clone();
    }
    let exact_ok = y[0] == power;

    let inst = make_decoupled_linear(1.0, 2.0)?;
    let mesh = Mesh::uniform(0.0, 1.0, n)?;
    let sched = TruncationSchedule::uniform(n, 2)?;
    let (traj, _) = solve(&inst, &mesh, &sched, 0, CostFn::power(1.0))?;
    let got = traj.knot(n).get(1);
    let decimal = power.to_f64().unwrap_or(f64::NAN);
    let hb = BigRational::from_float(mesh.step(0)).expect("finite");
    let mut binary = BigRational::one();
    for _ in 0..n {
        binary *= BigRational::one() - hb.clone();
    }
    let binary = binary.to_f64().unwrap_or(f64::NAN);
    Ok((
        exact_ok,
        ulp_distance(got, decimal).max(ulp_distance(got, binary)),
    ))
}
