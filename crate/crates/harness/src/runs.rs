//! A single solver run ("cell") and its record.

use std::time::Instant;

use serde::Serialize;
use trunc_ivp_core::analysis::{radius_r, theorem1_bound};
use trunc_ivp_core::instances::ProblemInstance;
use trunc_ivp_core::integrator::{
    lobatto_points, solve_traced, solve_with, CostFn, CostLedger, ErrorProbe, Mesh, SolveOptions,
    TailMode, TraceMode, Trajectory, TruncationSchedule,
};

use crate::config::MeshConfig;
use crate::error::{HarnessError, Result};
use crate::output::{num, Table};

#[derive(Debug, Clone, PartialEq)]
pub enum ScheduleSpec {
    Uniform(usize),
    /// `[N_{-1}, N_0, …, N_{n−1}]`.
    Explicit(Vec<usize>),
}

/// Everything needed to run one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub mesh: MeshConfig,
    pub n: usize,
    pub schedule: ScheduleSpec,
    pub r: usize,
    pub beta: f64,
    pub samples: usize,
    /// Measure the error against the exact solution with this tail rule.
    pub error: Option<TailMode>,
    /// Track `sup_t ‖l(t) − η‖`.
    pub ball: bool,
}

impl RunSpec {
    pub fn uniform(n: usize, dim: usize, r: usize) -> Self {
        Self {
            mesh: MeshConfig::Uniform,
            n,
            schedule: ScheduleSpec::Uniform(dim),
            r,
            beta: 1.0,
            samples: 8,
            error: Some(TailMode::Certified),
            ball: true,
        }
    }

    pub fn build_mesh(&self, inst: &ProblemInstance) -> Result<Mesh> {
        let (a, b) = (inst.params.a, inst.params.b);
        Ok(match self.mesh {
            MeshConfig::Uniform => Mesh::uniform(a, b, self.n)?,
            MeshConfig::Graded { sigma } => Mesh::graded(a, b, self.n, sigma)?,
        })
    }

    pub fn build_schedule(&self) -> Result<TruncationSchedule> {
        Ok(match &self.schedule {
            ScheduleSpec::Uniform(d) => TruncationSchedule::uniform(self.n, *d)?,
            ScheduleSpec::Explicit(v) => TruncationSchedule::from_dims(v.clone())?,
        })
    }

    fn digest(&self) -> String {
        match &self.schedule {
            ScheduleSpec::Uniform(d) => format!("uniform:{d}"),
            ScheduleSpec::Explicit(v) => {
                let min = v.iter().min().copied().unwrap_or(0);
                let max = v.iter().max().copied().unwrap_or(0);
                let sum: usize = v.iter().sum();
                format!("explicit:len={},min={min},max={max},sum={sum}", v.len())
            }
        }
    }
}

/// Outcome of one cell. All fields except `wall_time_s` are deterministic.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RunRecord {
    pub instance: String,
    pub p: f64,
    pub r: usize,
    /// Stages per interval, `max(r, 1)`.
    pub order: usize,
    pub mesh: String,
    pub n: usize,
    pub dim: usize,
    pub schedule: String,
    pub beta: f64,
    pub error: Option<f64>,
    pub error_at: Option<f64>,
    pub ball_sup: Option<f64>,
    pub radius: f64,
    pub bound_initial: f64,
    pub bound_truncation: f64,
    pub bound_discretization: f64,
    pub bound_total: f64,
    pub evaluations: usize,
    pub information_points: usize,
    pub cost: f64,
    /// `Σ_k c(M_k)·N_k·R(R+1)/2` recomputed from the schedule alone.
    pub cost_formula: f64,
    /// `min_k ℓ_k / N_k` over the steps.
    pub min_step_ratio: f64,
    pub wall_time_s: f64,
}

impl RunRecord {
    pub fn ball_ok(&self) -> bool {
        self.ball_sup.map_or(true, |b| b <= self.radius)
    }
}

/// Cost predicted by the schedule: `Σ_k c(M_k)·N_k·R(R+1)/2`.
pub fn cost_formula(sched: &TruncationSchedule, r: usize, beta: f64) -> f64 {
    let order = r.max(1) as f64;
    let stages = order * (order + 1.0) / 2.0;
    let c = CostFn::power(beta);
    sched
        .arg_dims()
        .iter()
        .zip(sched.step_dims())
        .map(|(&m, &d)| c.eval(m) * d as f64 * stages)
        .sum()
}

/// Runs a cell without keeping the trajectory.
pub fn run_cell(inst: &ProblemInstance, spec: &RunSpec) -> Result<RunRecord> {
    let start = Instant::now();
    let mesh = spec.build_mesh(inst)?;
    let sched = spec.build_schedule()?;
    let cost = CostFn::try_power(spec.beta)?;
    let mut probe = make_probe(inst, spec)?;
    let sol = solve_with(
        inst,
        &mesh,
        &sched,
        spec.r,
        cost,
        SolveOptions::default(),
        |seg| match &mut probe {
            Some(pr) => pr.observe(seg),
            None => Ok(()),
        },
    )?;
    finish(
        inst,
        spec,
        &mesh,
        &sched,
        &sol.ledger,
        probe.as_ref(),
        start,
    )
}

/// Runs a cell and keeps the trajectory and ledger (with trace if asked).
pub fn run_cell_full(
    inst: &ProblemInstance,
    spec: &RunSpec,
    trace: TraceMode,
) -> Result<(RunRecord, Trajectory, CostLedger)> {
    let start = Instant::now();
    let mesh = spec.build_mesh(inst)?;
    let sched = spec.build_schedule()?;
    let cost = CostFn::try_power(spec.beta)?;
    let (traj, ledger) = solve_traced(inst, &mesh, &sched, spec.r, cost, trace)?;
    let mut probe = make_probe(inst, spec)?;
    if let Some(pr) = &mut probe {
        for seg in traj.segments() {
            pr.observe(seg)?;
        }
    }
    let record = finish(inst, spec, &mesh, &sched, &ledger, probe.as_ref(), start)?;
    Ok((record, traj, ledger))
}

fn make_probe<'a>(inst: &'a ProblemInstance, spec: &RunSpec) -> Result<Option<ErrorProbe<'a>>> {
    Ok(match spec.error {
        Some(tail) => Some(ErrorProbe::new(inst, spec.samples, tail)?.with_ball(spec.ball)),
        None if spec.ball => Some(ErrorProbe::ball_only(inst, spec.samples)?),
        None => None,
    })
}

fn finish(
    inst: &ProblemInstance,
    spec: &RunSpec,
    mesh: &Mesh,
    sched: &TruncationSchedule,
    ledger: &CostLedger,
    probe: Option<&ErrorProbe<'_>>,
    start: Instant,
) -> Result<RunRecord> {
    let params = inst.params.clone().with_smoothness(spec.r as u32);
    let bound = theorem1_bound(&params, mesh, sched)?;
    let radius = radius_r(
        params.lipschitz,
        params.rhs_bound,
        params.gamma.eval(1),
        inst.space.basis_constant(),
        params.a,
        params.b,
    );
    let formula = cost_formula(sched, spec.r, spec.beta);
    let measured = ledger.total_cost();
    if (measured - formula).abs() > 1e-12 * formula {
        return Err(HarnessError::Check(format!(
            "ledger cost {measured} differs from schedule formula {formula}"
        )));
    }
    let min_step_ratio = ledger
        .steps()
        .iter()
        .zip(sched.step_dims())
        .map(|(s, &d)| s.evaluations as f64 / d as f64)
        .fold(f64::INFINITY, f64::min);
    let mesh_name = match spec.mesh {
        MeshConfig::Uniform => "uniform".to_string(),
        MeshConfig::Graded { sigma } => format!("graded:{}", num(sigma)),
    };
    Ok(RunRecord {
        instance: inst.label.clone(),
        p: inst.space.p(),
        r: spec.r,
        order: spec.r.max(1),
        mesh: mesh_name,
        n: spec.n,
        dim: sched.max_dim(),
        schedule: spec.digest(),
        beta: spec.beta,
        error: probe
            .filter(|_| spec.error.is_some())
            .map(|p| p.sup_error()),
        error_at: probe.filter(|_| spec.error.is_some()).map(|p| p.argmax()),
        ball_sup: probe.filter(|_| spec.ball).map(|p| p.ball_sup()),
        radius,
        bound_initial: bound.initial_term,
        bound_truncation: bound.truncation_term,
        bound_discretization: bound.discretization_term,
        bound_total: bound.total_without_c,
        evaluations: ledger.scalar_evaluations(),
        information_points: ledger.information_points(),
        cost: measured,
        cost_formula: formula,
        min_step_ratio,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

pub const TRAJECTORY_HEADERS: &[&str] = &["t", "component", "value"];

/// Samples `l̄_n` at `samples` Chebyshev–Lobatto points per interval (shared
/// knots written once) for components `1..=min(components, dim)`.
pub fn trajectory_table(traj: &Trajectory, samples: usize, components: usize) -> Table {
    let taus = lobatto_points(samples);
    let mut table = Table::new(TRAJECTORY_HEADERS);
    for (k, seg) in traj.segments().iter().enumerate() {
        let skip = usize::from(k > 0);
        for &tau in &taus[skip..] {
            let t = if tau == 1.0 {
                traj.points()[k + 1]
            } else {
                seg.start() + tau * seg.step()
            };
            let d = seg.dim().min(components);
            for j in 1..=d {
                table.push(vec![num(t), j.to_string(), num(seg.eval_component(j, tau))]);
            }
        }
    }
    table
}
