//! Subcommand drivers. Cells run on a worker pool; results are collected in
//! cell order so every report is independent of scheduling.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;
use trunc_ivp_core::analysis::{
    constants_ab, fit_order, loglog_slope, lp_closed_form, optimize_grid, ComplexityPlan,
    GridBound, GridLimits,
};
use trunc_ivp_core::instances::{lp_sin_first_component, ProblemInstance};
use trunc_ivp_core::integrator::{CostFn, TraceMode};

use crate::config::{Command, ConstantsConfig, ExperimentConfig};
use crate::error::{HarnessError, Result};
use crate::output::{ensure_dir, num, opt_num, write_json, Table};
use crate::runs::{run_cell, run_cell_full, trajectory_table, RunRecord, RunSpec, ScheduleSpec};
use crate::witness::{case12, case3, WitnessRecord};

/// Flags shared by all subcommands.
#[derive(Debug, Clone, Default)]
pub struct RunContext {
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub samples: Option<usize>,
}

impl RunContext {
    fn out_dir(&self, cfg: &ExperimentConfig) -> Result<PathBuf> {
        let dir = self
            .out
            .clone()
            .or_else(|| cfg.output.as_ref().map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("out"));
        ensure_dir(&dir)
    }

    /// Applies command-line overrides and validates the result.
    pub fn prepare(&self, cfg: &ExperimentConfig, command: Command) -> Result<ExperimentConfig> {
        let mut cfg = cfg.clone();
        if let Some(s) = self.samples {
            cfg.samples_per_interval = s;
        }
        if self.threads == Some(0) {
            return Err(HarnessError::config("--threads", "must be at least 1"));
        }
        cfg.validate(command)?;
        Ok(cfg)
    }
}

/// Runs `f` over `cells` on a pool of `threads` workers (rayon's default
/// when `None`), keeping cell order.
pub fn run_cells<T, R, F>(threads: Option<usize>, cells: &[T], f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R> + Sync + Send,
{
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| HarnessError::Check(format!("worker pool: {e}")))?;
    pool.install(|| cells.par_iter().map(&f).collect())
}

fn base_spec(
    cfg: &ExperimentConfig,
    n: usize,
    schedule: ScheduleSpec,
    inst: &ProblemInstance,
) -> RunSpec {
    RunSpec {
        mesh: cfg.mesh,
        n,
        schedule,
        r: cfg.r,
        beta: cfg.beta,
        samples: cfg.samples_per_interval,
        error: inst.has_exact().then_some(cfg.tail.into()),
        ball: inst.class_member,
    }
}

pub const CONVERGE_HEADERS: &[&str] = &[
    "n",
    "dim",
    "r",
    "error",
    "local_order",
    "bound_total",
    "ball_sup",
    "radius",
    "evaluations",
    "cost",
];
pub const TRUNCATE_HEADERS: &[&str] = &[
    "n",
    "dim",
    "error",
    "local_rate",
    "bound_total",
    "ball_sup",
    "radius",
    "evaluations",
    "cost",
];
pub const FIT_HEADERS: &[&str] = &["quantity", "slope", "intercept", "expected"];
pub const WORKPRECISION_HEADERS: &[&str] = &[
    "epsilon",
    "plan_n",
    "plan_dim",
    "plan_cost",
    "grid_n",
    "grid_dim",
    "grid_cost",
    "realized_error",
    "realized_cost",
    "within_target",
];
pub const LOWERBOUND_HEADERS: &[&str] = &[
    "case",
    "n",
    "dim",
    "r",
    "guaranteed_gap",
    "measured_gap",
    "expected_gap",
    "scaled_gap",
    "trace_points",
    "identical_output",
    "min_step_ratio",
];

/// `solve`: one run, `record.json` and `trajectory.csv`.
pub fn cmd_solve(cfg: &ExperimentConfig, ctx: &RunContext) -> Result<RunRecord> {
    let cfg = ctx.prepare(cfg, Command::Solve)?;
    let inst = cfg.instance()?;
    let n = cfg.n[0];
    let schedule = match &cfg.schedule {
        Some(s) => ScheduleSpec::Explicit(s.clone()),
        None => ScheduleSpec::Uniform(cfg.dims[0]),
    };
    let spec = base_spec(&cfg, n, schedule, &inst);
    let (record, traj, _) = run_cell_full(&inst, &spec, TraceMode::Off)?;
    let dir = ctx.out_dir(&cfg)?;
    trajectory_table(&traj, cfg.samples_per_interval, cfg.components)
        .write(&dir.join("trajectory.csv"))?;
    write_json(
        &dir.join("record.json"),
        &Report {
            config: &cfg,
            records: &[&record],
        },
    )?;
    Ok(record)
}

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    config: &'a ExperimentConfig,
    records: &'a [T],
}

/// Fitted rate of a sweep.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SweepReport {
    pub records: Vec<RunRecord>,
    pub slope: f64,
    pub intercept: f64,
    pub expected: f64,
}

fn errors_of(records: &[RunRecord]) -> Result<Vec<f64>> {
    records
        .iter()
        .map(|r| {
            r.error
                .ok_or_else(|| HarnessError::Check("run without error measurement".into()))
        })
        .collect()
}

/// Runs the `n` sweep at the first listed dimension and fits the order.
pub fn converge_sweep(
    inst: &ProblemInstance,
    cfg: &ExperimentConfig,
    threads: Option<usize>,
) -> Result<SweepReport> {
    let dim = cfg.dims[0];
    let cells: Vec<RunSpec> = cfg
        .n
        .iter()
        .map(|&n| base_spec(cfg, n, ScheduleSpec::Uniform(dim), inst))
        .collect();
    let records = run_cells(threads, &cells, |s| run_cell(inst, s))?;
    let errs = errors_of(&records)?;
    let pairs: Vec<(f64, f64)> = cfg
        .n
        .iter()
        .zip(&errs)
        .map(|(&n, &e)| (n as f64, e))
        .collect();
    let fit = fit_order(&pairs)?;
    Ok(SweepReport {
        records,
        slope: fit.slope,
        intercept: fit.intercept,
        expected: cfg.r.max(1) as f64,
    })
}

/// `converge`: `converge.csv` (one row per `n`) and `converge_fit.csv`.
pub fn cmd_converge(cfg: &ExperimentConfig, ctx: &RunContext) -> Result<SweepReport> {
    let cfg = ctx.prepare(cfg, Command::Converge)?;
    let inst = cfg.instance()?;
    let report = converge_sweep(&inst, &cfg, ctx.threads)?;
    let mut table = Table::new(CONVERGE_HEADERS);
    for (i, rec) in report.records.iter().enumerate() {
        let local = (i > 0).then(|| {
            let prev = &report.records[i - 1];
            (prev.error.unwrap() / rec.error.unwrap()).ln() / (rec.n as f64 / prev.n as f64).ln()
        });
        table.push(vec![
            rec.n.to_string(),
            rec.dim.to_string(),
            rec.r.to_string(),
            opt_num(rec.error),
            opt_num(local),
            num(rec.bound_total),
            opt_num(rec.ball_sup),
            num(rec.radius),
            rec.evaluations.to_string(),
            num(rec.cost),
        ]);
    }
    let dir = ctx.out_dir(&cfg)?;
    table.write(&dir.join("converge.csv"))?;
    fit_table("order", &report).write(&dir.join("converge_fit.csv"))?;
    Ok(report)
}

fn fit_table(quantity: &str, report: &SweepReport) -> Table {
    let mut t = Table::new(FIT_HEADERS);
    t.push(vec![
        quantity.to_string(),
        num(report.slope),
        num(report.intercept),
        num(report.expected),
    ]);
    t
}

/// Runs the `N` sweep at the first listed step count and fits
/// `log error` against `log N`.
pub fn truncate_sweep(
    inst: &ProblemInstance,
    cfg: &ExperimentConfig,
    threads: Option<usize>,
) -> Result<SweepReport> {
    let n = cfg.n[0];
    let cells: Vec<RunSpec> = cfg
        .dims
        .iter()
        .map(|&d| base_spec(cfg, n, ScheduleSpec::Uniform(d), inst))
        .collect();
    let records = run_cells(threads, &cells, |s| run_cell(inst, s))?;
    let errs = errors_of(&records)?;
    let dims: Vec<f64> = cfg.dims.iter().map(|&d| d as f64).collect();
    let (slope, intercept) = loglog_slope(&dims, &errs)?;
    let p = inst.space.p();
    Ok(SweepReport {
        records,
        slope,
        intercept,
        expected: -(1.0 - 1.0 / p),
    })
}

/// `truncate`: `truncate.csv` (one row per `N`) and `truncate_fit.csv`.
pub fn cmd_truncate(cfg: &ExperimentConfig, ctx: &RunContext) -> Result<SweepReport> {
    let cfg = ctx.prepare(cfg, Command::Truncate)?;
    let inst = cfg.instance()?;
    let report = truncate_sweep(&inst, &cfg, ctx.threads)?;
    let mut table = Table::new(TRUNCATE_HEADERS);
    for (i, rec) in report.records.iter().enumerate() {
        let local = (i > 0).then(|| {
            let prev = &report.records[i - 1];
            (rec.error.unwrap() / prev.error.unwrap()).ln()
                / (rec.dim as f64 / prev.dim as f64).ln()
        });
        table.push(vec![
            rec.n.to_string(),
            rec.dim.to_string(),
            opt_num(rec.error),
            opt_num(local),
            num(rec.bound_total),
            opt_num(rec.ball_sup),
            num(rec.radius),
            rec.evaluations.to_string(),
            num(rec.cost),
        ]);
    }
    let dir = ctx.out_dir(&cfg)?;
    table.write(&dir.join("truncate.csv"))?;
    fit_table("rate", &report).write(&dir.join("truncate_fit.csv"))?;
    Ok(report)
}

/// `(A, B)` for `A·N^{-(1−1/p)} + B/n`.
///
/// `LpSinCertified` is what `lp_sin` guarantees with one stage per interval.
/// The omitted components of `z(t)` all equal `z^1(t) ≤ z^1(b)` and the weight
/// tail is `N^{-(1−1/p)}(p−1)^{-1/p}`, so `A = z^1(b)·max(1, (p−1)^{-1/p})`.
/// Each kept component is an Euler run on `z' = sin z` over `[0, 1]` with
/// `|z''| ≤ 1/2` and Lipschitz constant 1, so its error is at most
/// `h(e−1)/4`; weighting gives `B = W(e−1)/4`.
pub fn plan_constants(inst: &ProblemInstance, source: ConstantsConfig) -> (f64, f64) {
    let p = inst.space.p();
    let w = inst.space.weight_norm_upper();
    match source {
        ConstantsConfig::Radius => {
            let params = &inst.params;
            let radius = trunc_ivp_core::analysis::radius_r(
                params.lipschitz,
                params.rhs_bound,
                params.gamma.eval(1),
                inst.space.basis_constant(),
                params.a,
                params.b,
            );
            constants_ab(p, radius, w)
        }
        ConstantsConfig::LpSinCertified => {
            let tail_factor = (p - 1.0).powf(-1.0 / p).max(1.0);
            let a = lp_sin_first_component(inst.params.b) * tail_factor;
            let b = w * (std::f64::consts::E - 1.0) / 4.0;
            (a, b)
        }
        ConstantsConfig::Explicit { a, b } => (a, b),
    }
}

/// One row of the work-precision table.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct WorkPoint {
    pub epsilon: f64,
    pub plan_n: u64,
    pub plan_dim: u64,
    pub plan_cost: f64,
    pub grid: Option<(u64, u64, f64)>,
    pub realized: Option<RunRecord>,
}

impl WorkPoint {
    pub fn within_target(&self) -> Option<bool> {
        self.realized
            .as_ref()
            .and_then(|r| r.error)
            .map(|e| e <= self.epsilon)
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct WorkPrecisionReport {
    pub a: f64,
    pub b: f64,
    pub points: Vec<WorkPoint>,
    /// Slope of `log cost` against `log(1/ε)`, from realized ledger costs
    /// where every target was run, plan costs otherwise.
    pub slope: Option<f64>,
    pub slope_source: String,
    pub expected: f64,
}

/// Plans every target with the closed form and the power-of-two grid, and
/// runs the closed-form plans for targets `≥ realize_down_to`.
pub fn workprecision_sweep(
    inst: &ProblemInstance,
    cfg: &ExperimentConfig,
    realize_down_to: Option<f64>,
    threads: Option<usize>,
) -> Result<WorkPrecisionReport> {
    let p = inst.space.p();
    let beta = cfg.beta;
    let (a, b) = plan_constants(inst, cfg.constants);
    let plans: Vec<ComplexityPlan> = cfg
        .epsilon
        .iter()
        .map(|&e| lp_closed_form(e, p, beta, a, b))
        .collect::<std::result::Result<_, _>>()?;
    let cells: Vec<(usize, RunSpec)> = plans
        .iter()
        .enumerate()
        .filter(|(_, pl)| realize_down_to.is_some_and(|lo| pl.epsilon >= lo))
        .map(|(i, pl)| {
            let mut spec = base_spec(
                cfg,
                pl.n as usize,
                ScheduleSpec::Uniform(pl.dim as usize),
                inst,
            );
            spec.r = cfg.r.min(1);
            (i, spec)
        })
        .collect();
    let runs = run_cells(threads, &cells, |(_, s)| run_cell(inst, s))?;
    let mut realized: Vec<Option<RunRecord>> = vec![None; plans.len()];
    for ((i, _), rec) in cells.iter().zip(runs) {
        realized[*i] = Some(rec);
    }
    let points: Vec<WorkPoint> = plans
        .iter()
        .zip(realized)
        .map(|(pl, rec)| {
            let grid = optimize_grid(
                pl.epsilon,
                GridBound::LpExplicit { a, b, p },
                CostFn::power(beta),
                GridLimits::default(),
            )
            .ok()
            .map(|g| (g.n, g.dim, g.predicted_cost));
            WorkPoint {
                epsilon: pl.epsilon,
                plan_n: pl.n,
                plan_dim: pl.dim,
                plan_cost: pl.predicted_cost,
                grid,
                realized: rec,
            }
        })
        .collect();
    let all_run = points.iter().all(|pt| pt.realized.is_some());
    let inv: Vec<f64> = points.iter().map(|pt| 1.0 / pt.epsilon).collect();
    let costs: Vec<f64> = points
        .iter()
        .map(|pt| match (&pt.realized, all_run) {
            (Some(r), true) => r.cost,
            _ => pt.plan_cost,
        })
        .collect();
    let slope = (points.len() >= 2)
        .then(|| loglog_slope(&inv, &costs).map(|(s, _)| s))
        .transpose()?;
    Ok(WorkPrecisionReport {
        a,
        b,
        points,
        slope,
        slope_source: if all_run { "realized" } else { "plan" }.into(),
        expected: (p * (beta + 2.0) - 1.0) / (p - 1.0),
    })
}

/// `workprecision`: `workprecision.csv` and `workprecision_fit.csv`.
pub fn cmd_workprecision(cfg: &ExperimentConfig, ctx: &RunContext) -> Result<WorkPrecisionReport> {
    let cfg = ctx.prepare(cfg, Command::WorkPrecision)?;
    let inst = cfg.instance()?;
    let realize = cfg.realize.then_some(0.0);
    let report = workprecision_sweep(&inst, &cfg, realize, ctx.threads)?;
    let mut table = Table::new(WORKPRECISION_HEADERS);
    for pt in &report.points {
        let (gn, gd, gc) = match pt.grid {
            Some((n, d, c)) => (n.to_string(), d.to_string(), num(c)),
            None => Default::default(),
        };
        let rec = pt.realized.as_ref();
        table.push(vec![
            num(pt.epsilon),
            pt.plan_n.to_string(),
            pt.plan_dim.to_string(),
            num(pt.plan_cost),
            gn,
            gd,
            gc,
            opt_num(rec.and_then(|r| r.error)),
            opt_num(rec.map(|r| r.cost)),
            pt.within_target()
                .map(|b| b.to_string())
                .unwrap_or_default(),
        ]);
    }
    let dir = ctx.out_dir(&cfg)?;
    table.write(&dir.join("workprecision.csv"))?;
    let mut fit = Table::new(FIT_HEADERS);
    fit.push(vec![
        format!("cost_{}", report.slope_source),
        opt_num(report.slope),
        String::new(),
        num(report.expected),
    ]);
    fit.write(&dir.join("workprecision_fit.csv"))?;
    Ok(report)
}

/// `lowerbound`: all three witnesses for every listed `n` (first dimension)
/// and, for the first two, every listed dimension.
pub fn cmd_lowerbound(cfg: &ExperimentConfig, ctx: &RunContext) -> Result<Vec<WitnessRecord>> {
    let cfg = ctx.prepare(cfg, Command::LowerBound)?;
    let p = cfg.instance.p;
    let n0 = cfg.n[0];
    let mut cells: Vec<(u8, usize, usize)> = Vec::new();
    for &d in &cfg.dims {
        cells.push((1, n0, d));
        cells.push((2, n0, d));
    }
    for &n in &cfg.n {
        cells.push((3, n, 1));
    }
    let a3 = cfg.lowerbound.case3_a;
    let r = cfg.r;
    let records = run_cells(ctx.threads, &cells, |&(case, n, d)| match case {
        3 => case3(p, n, r, a3),
        c => case12(c, p, n, d, r),
    })?;
    for rec in &records {
        if !rec.identical_output {
            return Err(HarnessError::Check(format!(
                "{} n={} N={}: trajectories of the pair differ",
                rec.case, rec.n, rec.dim
            )));
        }
    }
    let dir = ctx.out_dir(&cfg)?;
    witness_table(&records).write(&dir.join("lowerbound.csv"))?;
    Ok(records)
}

pub fn witness_table(records: &[WitnessRecord]) -> Table {
    let mut t = Table::new(LOWERBOUND_HEADERS);
    for rec in records {
        t.push(vec![
            rec.case.clone(),
            rec.n.to_string(),
            rec.dim.to_string(),
            rec.r.to_string(),
            num(rec.guaranteed_gap),
            opt_num(rec.measured_gap),
            opt_num(rec.expected_gap),
            num(rec.scaled_gap),
            rec.trace_points.to_string(),
            rec.identical_output.to_string(),
            num(rec.min_step_ratio),
        ]);
    }
    t
}
