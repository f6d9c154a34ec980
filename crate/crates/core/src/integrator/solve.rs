use alloc::vec::Vec;

use super::cost::{CostFn, CostLedger, TraceMode};
use super::mesh::Mesh;
use super::poly::horner;
use super::schedule::TruncationSchedule;
use super::stage::{eval_rows, StagePlan, StageScratch};
use crate::error::{Error, Result};
use crate::instances::ProblemInstance;
use crate::space::TruncVec;

/// Local polynomial on one mesh interval, stored in `τ = (t − t_k)/h_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    index: usize,
    start: f64,
    step: f64,
    updated: usize,
    stride: usize,
    coeffs: Vec<f64>,
}

impl Segment {
    fn empty(stride: usize) -> Self {
        Self {
            index: 0,
            start: 0.0,
            step: 0.0,
            updated: 0,
            stride,
            coeffs: Vec::new(),
        }
    }

    /// Interval index `k`.
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Represented dimension `M_k`.
    pub fn dim(&self) -> usize {
        self.coeffs.len() / self.stride
    }

    /// Updated dimension `N_k`.
    pub fn updated(&self) -> usize {
        self.updated
    }

    /// Coefficients stored per component (`R + 1`).
    pub fn stride(&self) -> usize {
        self.stride
    }

    /// Flattened coefficients, `stride` per component.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `τ`-coefficients of component `j` (1-based).
    pub fn component_coeffs(&self, j: usize) -> &[f64] {
        &self.coeffs[(j - 1) * self.stride..j * self.stride]
    }

    /// `l^j` at local coordinate `τ`.
    pub fn eval_component(&self, j: usize, tau: f64) -> f64 {
        horner(self.component_coeffs(j), &tau)
    }

    /// All components at local coordinate `τ`; `out.len()` must be `dim()`.
    pub fn eval_local_into(&self, tau: f64, out: &mut [f64]) {
        eval_rows(&self.coeffs, self.stride, &tau, out);
    }

    pub fn eval_local(&self, tau: f64) -> TruncVec {
        let mut out = alloc::vec![0.0; self.dim()];
        self.eval_local_into(tau, &mut out);
        TruncVec::from_vec_unchecked(out)
    }

    /// Value at time `t` (not range checked).
    pub fn eval(&self, t: f64) -> TruncVec {
        self.eval_local((t - self.start) / self.step)
    }
}

/// Piecewise-polynomial approximation over the whole mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    points: Vec<f64>,
    segments: Vec<Segment>,
    knots: Vec<TruncVec>,
}

impl Trajectory {
    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// `ȳ_0, …, ȳ_n`.
    pub fn knots(&self) -> &[TruncVec] {
        &self.knots
    }

    pub fn knot(&self, k: usize) -> &TruncVec {
        &self.knots[k]
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// `l(t)`. Knot times return the stored knot values exactly; other
    /// times use the segment on whose half-open interval `(t_k, t_{k+1}]` the
    /// time lies.
    pub fn eval(&self, t: f64) -> Result<TruncVec> {
        let a = self.points[0];
        let b = self.points[self.points.len() - 1];
        if !(t >= a && t <= b) {
            return Err(Error::OutOfRange { t, a, b });
        }
        let idx = self.points.partition_point(|&p| p < t);
        if idx < self.points.len() && self.points[idx] == t {
            return Ok(self.knots[idx].clone());
        }
        Ok(self.segments[idx - 1].eval(t))
    }
}

/// Result of a streaming solve.
#[derive(Debug, Clone)]
pub struct Solution {
    /// `ȳ_0 = P_{N_{-1}} η`.
    pub initial: TruncVec,
    /// `ȳ_n`.
    pub terminal: TruncVec,
    pub ledger: CostLedger,
}

/// Options for [`solve_with`].
#[derive(Debug, Clone, Copy, Default)]
pub struct SolveOptions {
    pub trace: TraceMode,
}

/// Runs the method, handing each finished segment to `sink` instead of
/// storing it.
pub fn solve_with(
    inst: &ProblemInstance,
    mesh: &Mesh,
    sched: &TruncationSchedule,
    r: usize,
    cost: CostFn,
    opts: SolveOptions,
    mut sink: impl FnMut(&Segment) -> Result<()>,
) -> Result<Solution> {
    sched.check_against(mesh.n())?;
    let mut stepper = Stepper::new(inst, r, cost, opts.trace);
    let initial = inst.initial_projection(sched.initial_dim());
    let mut y = initial.components().to_vec();
    let mut seg = Segment::empty(stepper.plan.stride());
    let mut m = sched.initial_dim();
    for k in 0..mesh.n() {
        let updated = sched.step_dim(k);
        m = m.max(updated);
        y.resize(m, 0.0);
        stepper.step_into(k, &y, mesh.point(k), mesh.step(k), updated, &mut seg)?;
        sink(&seg)?;
        seg.eval_local_into(1.0, &mut y);
    }
    Ok(Solution {
        initial,
        terminal: TruncVec::from_vec_unchecked(y),
        ledger: stepper.ledger,
    })
}

/// Runs the method with order parameter `r` (`max(r, 1)` stages) and returns
/// the trajectory and its cost ledger.
pub fn solve(
    inst: &ProblemInstance,
    mesh: &Mesh,
    sched: &TruncationSchedule,
    r: usize,
    cost: CostFn,
) -> Result<(Trajectory, CostLedger)> {
    solve_traced(inst, mesh, sched, r, cost, TraceMode::Off)
}

/// [`solve`] with an explicit trace mode.
pub fn solve_traced(
    inst: &ProblemInstance,
    mesh: &Mesh,
    sched: &TruncationSchedule,
    r: usize,
    cost: CostFn,
    trace: TraceMode,
) -> Result<(Trajectory, CostLedger)> {
    let mut segments = Vec::with_capacity(mesh.n());
    let mut knots = Vec::with_capacity(mesh.n() + 1);
    let sol = solve_with(inst, mesh, sched, r, cost, SolveOptions { trace }, |seg| {
        segments.push(seg.clone());
        Ok(())
    })?;
    knots.push(sol.initial);
    for seg in &segments[..segments.len() - 1] {
        knots.push(seg.eval_local(1.0));
    }
    knots.push(sol.terminal);
    Ok((
        Trajectory {
            points: mesh.points().to_vec(),
            segments,
            knots,
        },
        sol.ledger,
    ))
}

/// One interval in isolation: builds the local polynomial from `y_k` with
/// `updated` evolving components and returns it with `ȳ_{k+1}`.
///
/// The argument dimension is `max(y_k.dim(), updated)`.
pub fn local_step(
    inst: &ProblemInstance,
    y_k: &TruncVec,
    t_k: f64,
    h_k: f64,
    updated: usize,
    r: usize,
    ledger: &mut CostLedger,
) -> Result<(Segment, TruncVec)> {
    if !(h_k > 0.0 && h_k.is_finite()) {
        return Err(crate::error::invalid(
            "h_k",
            "step must be positive and finite",
        ));
    }
    if updated == 0 {
        return Err(crate::error::invalid(
            "updated",
            "dimension must be positive",
        ));
    }
    let mut stepper = Stepper::new(inst, r, ledger.cost_fn(), TraceMode::Off);
    core::mem::swap(&mut stepper.ledger, ledger);
    let mut y = y_k.components().to_vec();
    y.resize(y.len().max(updated), 0.0);
    let mut seg = Segment::empty(stepper.plan.stride());
    let k = stepper.ledger.steps().len();
    let res = stepper.step_into(k, &y, t_k, h_k, updated, &mut seg);
    core::mem::swap(&mut stepper.ledger, ledger);
    res?;
    let next = seg.eval_local(1.0);
    Ok((seg, next))
}

struct Stepper<'a> {
    inst: &'a ProblemInstance,
    plan: StagePlan<f64>,
    scratch: StageScratch<f64>,
    ledger: CostLedger,
}

impl<'a> Stepper<'a> {
    fn new(inst: &'a ProblemInstance, r: usize, cost: CostFn, trace: TraceMode) -> Self {
        Self {
            inst,
            plan: StagePlan::new(r.max(1)),
            scratch: StageScratch::new(),
            ledger: CostLedger::new(cost, trace),
        }
    }

    fn step_into(
        &mut self,
        k: usize,
        y: &[f64],
        t_k: f64,
        h_k: f64,
        updated: usize,
        seg: &mut Segment,
    ) -> Result<()> {
        let d = y.len();
        seg.index = k;
        seg.start = t_k;
        seg.step = h_k;
        seg.updated = updated;
        seg.coeffs.resize(d * self.plan.stride(), 0.0);
        self.ledger.begin_step(d, updated);
        let model = &*self.inst.model;
        let ledger = &mut self.ledger;
        self.plan.run(
            y,
            &h_k,
            updated,
            &mut seg.coeffs,
            &mut self.scratch,
            |s, p, arg, out| {
                model.eval_block(arg, out);
                if let Some(i) = out.iter().position(|v| !v.is_finite()) {
                    return Err(Error::NonFinite {
                        step: k,
                        stage: s,
                        component: i + 1,
                    });
                }
                ledger.record(s, p, arg.first().copied().unwrap_or(0.0), d, out.len());
                Ok(())
            },
        )
    }
}
