use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use trunc_ivp::acceptance::{run_suite, Tolerances, ALL};
use trunc_ivp::experiments::{
    cmd_converge, cmd_lowerbound, cmd_solve, cmd_truncate, cmd_workprecision, RunContext,
};
use trunc_ivp::output::{ensure_dir, write_json};
use trunc_ivp::{ExperimentConfig, HarnessError, Result};

const SOLVE_HELP: &str = "\
Writes to --out:
  trajectory.csv  t,component,value
                  samples_per_interval Chebyshev-Lobatto points per interval,
                  components 1..=min(components, dim)
  record.json     config echo and the run record";

const CONVERGE_HELP: &str = "\
Writes to --out:
  converge.csv      n,dim,r,error,local_order,bound_total,ball_sup,radius,evaluations,cost
  converge_fit.csv  quantity,slope,intercept,expected
                    (slope of log error against log(1/n))";

const TRUNCATE_HELP: &str = "\
Writes to --out:
  truncate.csv      n,dim,error,local_rate,bound_total,ball_sup,radius,evaluations,cost
  truncate_fit.csv  quantity,slope,intercept,expected
                    (slope of log error against log N)";

const WORKPRECISION_HELP: &str = "\
Writes to --out:
  workprecision.csv      epsilon,plan_n,plan_dim,plan_cost,grid_n,grid_dim,grid_cost,
                         realized_error,realized_cost,within_target
  workprecision_fit.csv  quantity,slope,intercept,expected
                         (slope of log cost against log(1/epsilon))";

const LOWERBOUND_HELP: &str = "\
Writes to --out:
  lowerbound.csv  case,n,dim,r,guaranteed_gap,measured_gap,expected_gap,scaled_gap,
                  trace_points,identical_output,min_step_ratio";

const VERIFY_HELP: &str = "\
Prints one line per criterion. With --out, also writes verify.json.";

const EXIT_HELP: &str = "\
Exit codes: 0 ok, 1 invalid input, 2 numerical or runtime failure, 3 acceptance failure.";

#[derive(Debug, Parser)]
#[command(name = "trunc-ivp", version, about = "Truncated finite-dimensional solver for countable ODE systems", after_help = EXIT_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Output directory (default: the config's `output`, else `out`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for independent runs.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Overrides `samples_per_interval`.
    #[arg(long, global = true)]
    samples: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Run one solve and write a trajectory sample.
    #[command(after_help = SOLVE_HELP)]
    Solve {
        #[arg(long)]
        config: PathBuf,
    },
    /// Error against n at fixed N, with the fitted order.
    #[command(after_help = CONVERGE_HELP)]
    Converge {
        #[arg(long)]
        config: PathBuf,
    },
    /// Error against N at fixed n, with the fitted rate.
    #[command(after_help = TRUNCATE_HELP)]
    Truncate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Plans and realized runs for a list of error targets.
    #[command(after_help = WORKPRECISION_HELP)]
    Workprecision {
        #[arg(long)]
        config: PathBuf,
    },
    /// Indistinguishable pairs and their solution gaps.
    #[command(after_help = LOWERBOUND_HELP)]
    Lowerbound {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the acceptance suite.
    #[command(after_help = VERIFY_HELP)]
    Verify {
        /// Comma-separated criterion numbers (default: all).
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let ctx = RunContext {
        out: cli.out.clone(),
        threads: cli.threads,
        samples: cli.samples,
    };
    match cli.command {
        Cmd::Solve { config } => {
            let rec = cmd_solve(&ExperimentConfig::load(&config)?, &ctx)?;
            println!(
                "{} n={} N={} r={}: error {} cost {} ({:.2} s)",
                rec.instance,
                rec.n,
                rec.dim,
                rec.r,
                rec.error
                    .map(|e| e.to_string())
                    .unwrap_or_else(|| "n/a".into()),
                rec.cost,
                rec.wall_time_s
            );
        }
        Cmd::Converge { config } => {
            let rep = cmd_converge(&ExperimentConfig::load(&config)?, &ctx)?;
            println!("order {} (expected {})", rep.slope, rep.expected);
        }
        Cmd::Truncate { config } => {
            let rep = cmd_truncate(&ExperimentConfig::load(&config)?, &ctx)?;
            println!("rate {} (expected {})", rep.slope, rep.expected);
        }
        Cmd::Workprecision { config } => {
            let rep = cmd_workprecision(&ExperimentConfig::load(&config)?, &ctx)?;
            for pt in &rep.points {
                println!(
                    "eps {}: n={} N={} cost {} within target: {}",
                    pt.epsilon,
                    pt.plan_n,
                    pt.plan_dim,
                    pt.plan_cost,
                    pt.within_target()
                        .map(|b| b.to_string())
                        .unwrap_or_else(|| "not run".into())
                );
            }
            if let Some(s) = rep.slope {
                println!(
                    "cost slope {s} from {} costs (expected {})",
                    rep.slope_source, rep.expected
                );
            }
        }
        Cmd::Lowerbound { config } => {
            let recs = cmd_lowerbound(&ExperimentConfig::load(&config)?, &ctx)?;
            for r in &recs {
                println!(
                    "{} n={} N={} r={}: gap {} scaled {}",
                    r.case, r.n, r.dim, r.r, r.guaranteed_gap, r.scaled_gap
                );
            }
        }
        Cmd::Verify { only } => {
            if ctx.threads == Some(0) {
                return Err(HarnessError::config("--threads", "must be at least 1"));
            }
            let select = if only.is_empty() { ALL.to_vec() } else { only };
            let results = run_suite(&select, &Tolerances::default(), ctx.threads)?;
            for r in &results {
                println!("{}", r.line());
            }
            if let Some(dir) = &ctx.out {
                write_json(&ensure_dir(dir)?.join("verify.json"), &results)?;
            }
            let failed: Vec<String> = results
                .iter()
                .filter(|r| !r.passed)
                .map(|r| r.id.to_string())
                .collect();
            if !failed.is_empty() {
                return Err(HarnessError::Acceptance(format!(
                    "criteria {} failed",
                    failed.join(", ")
                )));
            }
        }
    }
    Ok(())
}
