use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use field_planner_core::bench::{render_table, run_benchmark, write_csv, BenchConfig};
use field_planner_core::generator::{generate, GenParams};
use field_planner_core::knapsack::DEFAULT_DELTA;
use field_planner_core::local_search::{budget_stage, run_pipeline, PipelineParams};
use field_planner_core::model::{evaluate_solution, DiscountConfig, Instance, Solution};
use field_planner_core::oracle::{
    brute_force, brute_force_fixed, export_milp, run_solver, MilpVariant, OracleLimits, SolverCommand,
};

#[derive(Parser)]
#[command(name = "field-planner", version, about = "Investment planning for clustered oil and gas fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance.
    Gen(GenArgs),
    /// Run the two-stage heuristic.
    Solve(SolveArgs),
    /// Solve a small instance exactly by enumeration.
    Oracle(OracleArgs),
    /// Write the problem as an LP file, optionally solving it externally.
    Export(ExportArgs),
    /// Run a benchmark described by a JSON config.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 10)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    pmin: usize,
    #[arg(long, default_value_t = 10)]
    pmax: usize,
    #[arg(long, default_value_t = 20)]
    horizon: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Discount {
    /// Yearly discount factor in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    /// Largest launch delay in years; defaults to horizon - 1.
    #[arg(long)]
    max_shift: Option<usize>,
}

impl Discount {
    fn config(&self) -> DiscountConfig {
        DiscountConfig::new(self.rho, self.max_shift)
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    max_iters: Option<usize>,
    #[command(flatten)]
    stage: Stage,
    /// Also write the solution as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value_t = OracleLimits::default().max_states)]
    max_states: u128,
    /// Fix each cluster's project to the budget-stage choice and drop the budget.
    #[arg(long)]
    fixed: bool,
    #[command(flatten)]
    stage: Stage,
}

#[derive(Args)]
struct Stage {
    /// Budget grid step, in the instance's money unit.
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    delta: f64,
    /// Let the budget stage fund projects that exceed the caps at every shift.
    #[arg(long)]
    keep_unlaunchable: bool,
    #[command(flatten)]
    discount: Discount,
}

impl Stage {
    fn params(&self, max_iters: Option<usize>) -> PipelineParams {
        PipelineParams {
            delta: self.delta,
            config: self.discount.config(),
            max_iters,
            skip_unlaunchable: !self.keep_unlaunchable,
        }
    }

    fn projects(&self, instance: &Instance) -> Result<Vec<Option<usize>>> {
        let first = budget_stage(instance, &self.params(None))?;
        Ok(first.selection.iter().map(|c| c.map(|c| c.project)).collect())
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Full,
    Fixed,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum, default_value_t = Variant::Full)]
    variant: Variant,
    out: PathBuf,
    /// The fixed variant takes its projects from the budget stage.
    #[command(flatten)]
    stage: Stage,
    /// Shell command run on the written file; `{file}` and `{time_limit}` are substituted.
    #[arg(long)]
    solver_cmd: Option<String>,
    #[arg(long, default_value = "Objective")]
    objective_prefix: String,
    #[arg(long)]
    bound_prefix: Option<String>,
    #[arg(long)]
    time_limit: Option<f64>,
}

#[derive(Args)]
struct BenchArgs {
    config: PathBuf,
    /// Also write the rows as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn load(path: &Path) -> Result<Instance> {
    Instance::load(path).with_context(|| format!("cannot load instance {}", path.display()))
}

fn summary(instance: &Instance, solution: &Solution, config: &DiscountConfig) -> Result<serde_json::Value> {
    let eval = evaluate_solution(instance, solution, config)?;
    Ok(json!({
        "objective": solution.objective,
        "spent": solution.spent,
        "budget": instance.budget,
        "launched": solution.launched(),
        "feasible": eval.is_feasible(),
        "selection": solution.selection,
    }))
}

/// Writes to stdout; a reader that hung up early is not an error.
fn emit(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn print_json(value: &serde_json::Value) -> Result<()> {
    emit(&(serde_json::to_string_pretty(value)? + "\n"))
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    let params = GenParams {
        horizon: args.horizon,
        ..GenParams::new(args.n, args.pmin, args.pmax, args.seed)
    };
    let instance = generate(&params)?;
    match args.out {
        Some(path) => instance.save(&path).with_context(|| format!("cannot write {}", path.display()))?,
        None => emit(&(instance.to_json_string()? + "\n"))?,
    }
    Ok(())
}

fn cmd_solve(args: SolveArgs) -> Result<()> {
    let instance = load(&args.instance)?;
    let params = args.stage.params(args.max_iters);
    let outcome = run_pipeline(&instance, &params)?;
    let mut report = summary(&instance, &outcome.solution, &params.config)?;
    report["stage_one_objective"] = json!(outcome.stage_one.objective);
    report["iterations"] = json!(outcome.iterations());
    report["converged"] = json!(outcome.converged());
    report["time_stage_one"] = json!(outcome.stage_one_time.as_secs_f64());
    report["time_stage_two"] = json!(outcome.stage_two_time.as_secs_f64());
    print_json(&report)?;
    if let Some(path) = args.out {
        std::fs::write(&path, serde_json::to_string_pretty(&outcome.solution)? + "\n")
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(())
}

fn cmd_oracle(args: OracleArgs) -> Result<()> {
    let instance = load(&args.instance)?;
    let config = args.stage.discount.config();
    let limits = OracleLimits {
        max_states: args.max_states,
    };
    let solution = if args.fixed {
        brute_force_fixed(&instance, &config, &args.stage.projects(&instance)?, limits)?
    } else {
        brute_force(&instance, &config, limits)?
    };
    print_json(&summary(&instance, &solution, &config)?)
}

fn cmd_export(args: ExportArgs) -> Result<()> {
    let instance = load(&args.instance)?;
    let config = args.stage.discount.config();
    let variant = match args.variant {
        Variant::Full => MilpVariant::Full,
        Variant::Fixed => MilpVariant::FixedProjects(args.stage.projects(&instance)?),
    };
    let text = export_milp(&instance, &config, &variant)?;
    std::fs::write(&args.out, text).with_context(|| format!("cannot write {}", args.out.display()))?;
    if let Some(command) = args.solver_cmd {
        let solver = SolverCommand {
            command,
            objective_prefix: args.objective_prefix,
            bound_prefix: args.bound_prefix,
            time_limit: args.time_limit,
        };
        let report = run_solver(&solver, &args.out)?;
        print_json(&json!({
            "objective": report.objective,
            "upper_bound": report.upper_bound(),
        }))?;
    }
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    let config = BenchConfig::load(&args.config).with_context(|| format!("cannot load {}", args.config.display()))?;
    let base = args.config.parent().unwrap_or(Path::new("."));
    let records = run_benchmark(&config, base)?;
    emit(&render_table(&records))?;
    if let Some(path) = args.csv {
        let file = std::fs::File::create(&path).with_context(|| format!("cannot write {}", path.display()))?;
        write_csv(&records, file)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Export(a) => cmd_export(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
