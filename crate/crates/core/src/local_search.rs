//! Stage two and the full two-stage pipeline.
//!
//! The projects picked by stage one stay fixed. Their launch order starts from
//! a greedy "largest income increment first" permutation and is improved by
//! best-improvement pairwise exchanges, each candidate order being evaluated
//! with the greedy packer.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{PlanError, Result};
use crate::knapsack::{stage_one_among, DEFAULT_DELTA};
use crate::model::{evaluate_solution, fits, DiscountConfig, Instance, Solution};
use crate::scheduler::{launchable_alone, PackingModel, Permutation, Schedule};

/// Greedy first permutation.
///
/// Repeatedly appends the unplaced cluster whose earliest feasible start adds
/// the most profit; clusters that fit nowhere rank last. Ties go to the lower
/// cluster id.
pub fn initial_permutation(
    selection: &[Option<usize>],
    instance: &Instance,
    config: &DiscountConfig,
) -> Result<Permutation> {
    let model = PackingModel::new(instance, selection, config)?;
    Ok(initial_order(&model, selection))
}

fn initial_order(model: &PackingModel<'_>, selection: &[Option<usize>]) -> Permutation {
    let mut remaining = Permutation::identity(selection).into_inner();
    let mut order = Vec::with_capacity(remaining.len());
    let mut state = model.empty_state();
    while !remaining.is_empty() {
        let mut best: Option<(usize, Option<f64>)> = None;
        for (pos, &k) in remaining.iter().enumerate() {
            let gain = model.earliest_start(&state, k).map(|s| model.profit(k, s));
            let better = match best {
                None => true,
                Some((_, current)) => match (gain, current) {
                    (Some(g), Some(c)) => g > c,
                    (Some(_), None) => true,
                    _ => false,
                },
            };
            if better {
                best = Some((pos, gain));
            }
        }
        let (pos, _) = best.expect("remaining is non-empty");
        let k = remaining.remove(pos);
        model.place(&mut state, k);
        order.push(k);
    }
    Permutation::new(order)
}

/// An improving exchange of the entries at positions `i < j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SwapMove {
    pub i: usize,
    pub j: usize,
    pub permutation: Permutation,
    pub objective: f64,
}

/// Best strictly improving transposition of `pi`, if any.
///
/// All `n(n-1)/2` exchanges are packed; among equal best objectives the
/// lexicographically smallest `(i, j)` wins.
pub fn best_swap(
    pi: &Permutation,
    selection: &[Option<usize>],
    instance: &Instance,
    config: &DiscountConfig,
) -> Result<Option<SwapMove>> {
    let model = PackingModel::new(instance, selection, config)?;
    let current = model.pack(pi)?.objective;
    Ok(best_swap_with(&model, pi, current))
}

fn best_swap_with(model: &PackingModel<'_>, pi: &Permutation, current: f64) -> Option<SwapMove> {
    let order = pi.as_slice();
    let n = order.len();
    let mut best: Option<(usize, usize, f64)> = None;
    let mut prefix = model.empty_state();
    let mut tail = Vec::with_capacity(n);
    for i in 0..n.saturating_sub(1) {
        for j in i + 1..n {
            tail.clear();
            tail.push(order[j]);
            tail.extend_from_slice(&order[i + 1..j]);
            tail.push(order[i]);
            tail.extend_from_slice(&order[j + 1..]);
            let state = model.pack_from(prefix.clone(), &tail);
            let objective = model.objective(state.shifts());
            let threshold = best.map_or(current, |(_, _, b)| b);
            if objective > threshold {
                best = Some((i, j, objective));
            }
        }
        model.place(&mut prefix, order[i]);
    }
    best.map(|(i, j, objective)| SwapMove {
        i,
        j,
        permutation: pi.swapped(i, j),
        objective,
    })
}

/// Local search from `start` until no exchange improves or `max_iters` moves
/// were made. Returns the final order, its schedule and the objective after
/// every accepted move, starting with the objective of `start`.
pub fn improve(
    model: &PackingModel<'_>,
    start: Permutation,
    max_iters: usize,
) -> Result<(Permutation, Schedule, Vec<f64>, bool)> {
    let mut order = start;
    let mut schedule = model.pack(&order)?;
    let mut trace = vec![schedule.objective];
    let mut converged = false;
    while trace.len() - 1 < max_iters {
        match best_swap_with(model, &order, schedule.objective) {
            Some(m) => {
                order = m.permutation;
                schedule = model.pack(&order)?;
                debug_assert_eq!(schedule.objective, m.objective);
                trace.push(schedule.objective);
            }
            None => {
                converged = true;
                break;
            }
        }
    }
    if !converged && best_swap_with(model, &order, schedule.objective).is_none() {
        converged = true;
    }
    Ok((order, schedule, trace, converged))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineParams {
    pub delta: f64,
    pub config: DiscountConfig,
    /// Cap on accepted exchanges; `None` means ten per cluster.
    pub max_iters: Option<usize>,
    /// Keep projects out of the budget stage when they cannot respect the caps
    /// even on their own.
    #[serde(default = "yes")]
    pub skip_unlaunchable: bool,
}

fn yes() -> bool {
    true
}

impl Default for PipelineParams {
    fn default() -> Self {
        Self {
            delta: DEFAULT_DELTA,
            config: DiscountConfig::default(),
            max_iters: None,
            skip_unlaunchable: true,
        }
    }
}

impl PipelineParams {
    pub fn max_iters_for(&self, instance: &Instance) -> usize {
        self.max_iters.unwrap_or(10 * instance.cluster_count())
    }
}

/// Everything the pipeline produced, not only the final answer.
#[derive(Debug, Clone)]
pub struct PipelineOutcome {
    pub solution: Solution,
    pub stage_one: Solution,
    /// `None` when the stage-one solution already respected the caps.
    pub stage_two: Option<StageTwo>,
    pub stage_one_time: Duration,
    pub stage_two_time: Duration,
}

#[derive(Debug, Clone)]
pub struct StageTwo {
    pub initial_order: Permutation,
    pub final_order: Permutation,
    /// Objective of the initial order, then after each accepted exchange.
    pub trace: Vec<f64>,
    /// Whether the search stopped at a local optimum rather than the move cap.
    pub converged: bool,
    pub max_iters: usize,
}

impl StageTwo {
    pub fn iterations(&self) -> usize {
        self.trace.len() - 1
    }
}

impl PipelineOutcome {
    pub fn iterations(&self) -> usize {
        self.stage_two.as_ref().map_or(0, StageTwo::iterations)
    }

    pub fn converged(&self) -> bool {
        self.stage_two.as_ref().is_none_or(|s| s.converged)
    }
}

/// The budget stage of [`run_pipeline`]: one project per cluster, launched
/// without delay, under the budget only.
pub fn budget_stage(instance: &Instance, params: &PipelineParams) -> Result<Solution> {
    let config = &params.config;
    if !params.skip_unlaunchable {
        return stage_one_among(instance, params.delta, config, |_, _| true);
    }
    instance.ensure_valid()?;
    config.validate(instance.horizon)?;
    let launchable = launchable_alone(instance, config);
    stage_one_among(instance, params.delta, config, |k, i| launchable[k][i])
}

/// The two-stage heuristic: budget DP, then launch-order local search when the
/// caps are violated.
pub fn run_pipeline(instance: &Instance, params: &PipelineParams) -> Result<PipelineOutcome> {
    let config = &params.config;
    let started = Instant::now();
    let first = budget_stage(instance, params)?;
    let stage_one_time = started.elapsed();

    if evaluate_solution(instance, &first, config)?.feasible_capacity {
        return Ok(PipelineOutcome {
            solution: first.clone(),
            stage_one: first,
            stage_two: None,
            stage_one_time,
            stage_two_time: Duration::ZERO,
        });
    }

    let started = Instant::now();
    let selection: Vec<Option<usize>> = first.selection.iter().map(|c| c.map(|c| c.project)).collect();
    let model = PackingModel::new(instance, &selection, config)?;
    let initial_order = initial_order(&model, &selection);
    let max_iters = params.max_iters_for(instance);
    let (final_order, schedule, trace, converged) = improve(&model, initial_order.clone(), max_iters)?;
    let solution = schedule.to_solution(instance, &selection, config)?;
    let stage_two_time = started.elapsed();

    // Delays only drop or discount investment, so the stage-one budget still holds.
    if !fits(solution.spent, instance.budget) {
        return Err(PlanError::BudgetViolated {
            spent: solution.spent,
            budget: instance.budget,
        });
    }
    Ok(PipelineOutcome {
        solution,
        stage_one: first,
        stage_two: Some(StageTwo {
            initial_order,
            final_order,
            trace,
            converged,
            max_iters,
        }),
        stage_one_time,
        stage_two_time,
    })
}
