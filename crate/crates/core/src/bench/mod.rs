//! Benchmark runs: the heuristic, optional exact oracles and an optional
//! external MILP solver on each instance, condensed into metric rows.

mod metrics;

pub use metrics::{
    compute_metrics, ratio, read_csv, render_table, to_csv_string, write_csv, Metrics, MetricsRecord, Source,
    CSV_HEADER,
};

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{invalid_param, PlanError, Result};
use crate::generator::{generate, GenParams};
use crate::knapsack::DEFAULT_DELTA;
use crate::local_search::{run_pipeline, PipelineParams};
use crate::model::{DiscountConfig, Instance, Solution};
use crate::oracle::{brute_force, brute_force_fixed, export_milp, run_solver, MilpVariant, OracleLimits, SolverCommand};

/// An instance read from disk or generated on the fly. Exactly one of `file`
/// and `generate` must be set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceEntry {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub file: Option<PathBuf>,
    #[serde(default)]
    pub generate: Option<GenParams>,
}

impl InstanceEntry {
    pub fn label(&self, position: usize) -> String {
        if let Some(name) = &self.name {
            return name.clone();
        }
        match (&self.file, &self.generate) {
            (Some(f), _) => f.file_stem().map_or_else(|| f.display().to_string(), |s| s.to_string_lossy().into_owned()),
            (None, Some(g)) => format!("n{}_p{}-{}_s{}", g.n, g.p_min, g.p_max, g.seed),
            _ => format!("instance{position}"),
        }
    }

    /// Relative files resolve against `base`.
    pub fn load(&self, base: &Path) -> Result<Instance> {
        match (&self.file, &self.generate) {
            (Some(file), None) => Instance::load(base.join(file)),
            (None, Some(params)) => generate(params),
            _ => Err(invalid_param("instances", "each entry needs exactly one of `file` or `generate`")),
        }
    }
}

fn default_delta() -> f64 {
    DEFAULT_DELTA
}

fn default_rho() -> f64 {
    1.0
}

fn default_true() -> bool {
    true
}

fn default_max_states() -> u128 {
    OracleLimits::default().max_states
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_rho")]
    pub rho: f64,
    #[serde(default)]
    pub max_shift: Option<usize>,
    #[serde(default)]
    pub max_iters: Option<usize>,
    #[serde(default = "default_true")]
    pub skip_unlaunchable: bool,
    /// Run exhaustive enumeration where the state space allows it.
    #[serde(default = "default_true")]
    pub oracle: bool,
    #[serde(default = "default_max_states")]
    pub oracle_max_states: u128,
    /// Used for columns the enumeration did not fill.
    #[serde(default)]
    pub solver: Option<SolverCommand>,
    #[serde(default)]
    pub instances: Vec<InstanceEntry>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            delta: DEFAULT_DELTA,
            rho: 1.0,
            max_shift: None,
            max_iters: None,
            skip_unlaunchable: true,
            oracle: true,
            oracle_max_states: default_max_states(),
            solver: None,
            instances: Vec::new(),
        }
    }
}

impl BenchConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn discount(&self) -> DiscountConfig {
        DiscountConfig::new(self.rho, self.max_shift)
    }

    pub fn pipeline(&self) -> PipelineParams {
        PipelineParams {
            delta: self.delta,
            config: self.discount(),
            max_iters: self.max_iters,
            skip_unlaunchable: self.skip_unlaunchable,
        }
    }
}

/// Runs every configured instance in order. Relative instance files resolve
/// against `base_dir`.
pub fn run_benchmark(config: &BenchConfig, base_dir: &Path) -> Result<Vec<MetricsRecord>> {
    config
        .instances
        .iter()
        .enumerate()
        .map(|(i, entry)| {
            let instance = entry.load(base_dir)?;
            run_instance(&entry.label(i), &instance, config)
        })
        .collect()
}

fn exact(result: Result<Solution>) -> Result<Option<f64>> {
    match result {
        Ok(sol) => Ok(Some(sol.objective)),
        Err(PlanError::StateSpaceTooLarge { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn solve_externally(
    solver: &SolverCommand,
    instance: &Instance,
    config: &DiscountConfig,
    variant: &MilpVariant,
    tag: &str,
) -> Result<(Option<f64>, Option<f64>)> {
    let text = export_milp(instance, config, variant)?;
    let file = std::env::temp_dir().join(format!("field-planner-{}-{tag}.lp", std::process::id()));
    std::fs::write(&file, text)?;
    let report = run_solver(solver, &file);
    let _ = std::fs::remove_file(&file);
    let report = report?;
    Ok((report.objective, report.upper_bound()))
}

pub fn run_instance(name: &str, instance: &Instance, config: &BenchConfig) -> Result<MetricsRecord> {
    let started = Instant::now();
    let outcome = run_pipeline(instance, &config.pipeline())?;
    let time_total = started.elapsed().as_secs_f64();
    let discount = config.discount();
    let selection: Vec<Option<usize>> = outcome.stage_one.selection.iter().map(|c| c.map(|c| c.project)).collect();
    let limits = OracleLimits {
        max_states: config.oracle_max_states,
    };

    let mut full = (None, None, None);
    let mut fixed = (None, None, None);
    if config.oracle {
        if let Some(v) = exact(brute_force(instance, &discount, limits))? {
            full = (Some(v), Some(v), Some(Source::Exact));
        }
        if let Some(v) = exact(brute_force_fixed(instance, &discount, &selection, limits))? {
            fixed = (Some(v), Some(v), Some(Source::Exact));
        }
    }
    if let Some(solver) = &config.solver {
        if full.2.is_none() {
            let (obj, ub) = solve_externally(solver, instance, &discount, &MilpVariant::Full, "full")?;
            full = (obj, ub, Some(Source::Solver));
        }
        if fixed.2.is_none() {
            let variant = MilpVariant::FixedProjects(selection.clone());
            let (obj, ub) = solve_externally(solver, instance, &discount, &variant, "fixed")?;
            fixed = (obj, ub, Some(Source::Solver));
        }
    }

    let obj_a = outcome.solution.objective;
    let mut record = MetricsRecord {
        instance: name.to_owned(),
        clusters: instance.cluster_count(),
        projects: instance.clusters.iter().map(|c| c.projects.len()).sum(),
        obj_a,
        obj_stage_one: outcome.stage_one.objective,
        obj_full: full.0,
        ub_full: full.1,
        gap_full: None,
        full_source: full.2,
        obj_fixed: fixed.0,
        ub_fixed: fixed.1,
        gap_fixed: None,
        fixed_source: fixed.2,
        decline: None,
        r1: None,
        r2: None,
        iterations: outcome.iterations(),
        converged: outcome.converged(),
        time_stage_one: outcome.stage_one_time.as_secs_f64(),
        time_stage_two: outcome.stage_two_time.as_secs_f64(),
        time_total,
    };
    record.apply(compute_metrics(obj_a, full.1, fixed.1, full.0, fixed.0));
    Ok(record)
}
