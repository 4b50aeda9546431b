//! Stage one: distribute the budget over clusters ignoring production caps.
//!
//! Each cluster is reduced to a non-decreasing step function from allocated
//! budget to best achievable profit, sampled on a uniform grid of step
//! `delta`. Project costs are rounded *up* to the grid, so an allocation that
//! fits the grid also fits the real budget. A multiple-choice knapsack DP over
//! the grid then picks one step per cluster.
//!
//! The DP only ever jumps between breakpoints of the step functions, so a
//! cluster costs `O(steps * grid)` rather than `O(grid^2)`; both give the
//! same optimum because a step function is maximised at its breakpoints.

use crate::error::{invalid_param, PlanError, Result};
use crate::model::{dominance_frontier, Choice, Cluster, DiscountConfig, Instance, Solution};

/// Default grid step: ten thousand rubles, in million-ruble money units.
pub const DEFAULT_DELTA: f64 = 0.01;

/// Grids beyond this many points are refused.
pub const MAX_GRID_POINTS: usize = 1 << 28;

/// Above this many bytes of back-pointers, the DP switches to checkpointed
/// recomputation.
const FULL_CHOICE_TABLE_BYTES: usize = 256 << 20;

/// Budget grid `0, delta, 2 delta, ..., units * delta` with `units * delta <= budget`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BudgetGrid {
    pub delta: f64,
    pub units: usize,
}

impl BudgetGrid {
    pub fn new(budget: f64, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(invalid_param("delta", format!("{delta} must be positive and finite")));
        }
        if !(budget >= 0.0 && budget.is_finite()) {
            return Err(invalid_param("budget", format!("{budget} must be non-negative and finite")));
        }
        let ratio = (budget / delta).floor();
        if ratio >= MAX_GRID_POINTS as f64 {
            return Err(invalid_param(
                "delta",
                format!("grid of {ratio} points is too fine (limit {MAX_GRID_POINTS})"),
            ));
        }
        let mut units = ratio as usize;
        while units > 0 && units as f64 * delta > budget {
            units -= 1;
        }
        while ((units + 1) as f64) * delta <= budget {
            units += 1;
        }
        Ok(Self { delta, units })
    }

    /// Smallest `u` with `u * delta >= cost`, or `None` when that exceeds the grid.
    pub fn round_up(&self, cost: f64) -> Option<usize> {
        if !cost.is_finite() || cost > self.money(self.units) {
            return None;
        }
        if cost <= 0.0 {
            return Some(0);
        }
        let mut u = (cost / self.delta).ceil() as usize;
        while (u as f64) * self.delta < cost {
            u += 1;
        }
        while u > 0 && ((u - 1) as f64) * self.delta >= cost {
            u -= 1;
        }
        (u <= self.units).then_some(u)
    }

    pub fn points(&self) -> usize {
        self.units + 1
    }

    pub fn money(&self, units: usize) -> f64 {
        units as f64 * self.delta
    }
}

/// A breakpoint: from `units` of budget on, `profit` is reachable via `project`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub units: usize,
    pub profit: f64,
    pub project: usize,
}

/// Best profit of one cluster as a function of its grid budget.
///
/// Stored as breakpoints with strictly increasing budget and profit; below the
/// first breakpoint the value is zero (nothing launched).
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseProfitFunction {
    pub cluster_id: usize,
    pub grid: BudgetGrid,
    steps: Vec<Step>,
}

impl PiecewiseProfitFunction {
    /// Builds the function from `(project, cost, profit)` candidates.
    ///
    /// Candidates that do not fit the grid, or never beat a cheaper one once
    /// rounded, are dropped. Among equal rounded cost and profit the cheaper
    /// real cost wins, then the lower project index.
    pub fn from_candidates<I>(cluster_id: usize, grid: BudgetGrid, candidates: I) -> Self
    where
        I: IntoIterator<Item = (usize, f64, f64)>,
    {
        let mut rounded: Vec<(usize, f64, f64, usize)> = candidates
            .into_iter()
            .filter_map(|(project, cost, profit)| {
                grid.round_up(cost).map(|u| (u, profit, cost, project))
            })
            .collect();
        rounded.sort_by(|a, b| {
            a.0.cmp(&b.0)
                .then_with(|| b.1.total_cmp(&a.1))
                .then_with(|| a.2.total_cmp(&b.2))
                .then(a.3.cmp(&b.3))
        });
        let mut steps: Vec<Step> = Vec::new();
        let mut best = 0.0;
        for (units, profit, _, project) in rounded {
            if profit > best {
                best = profit;
                steps.push(Step {
                    units,
                    profit,
                    project,
                });
            }
        }
        Self {
            cluster_id,
            grid,
            steps,
        }
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    fn step_at(&self, units: usize) -> Option<&Step> {
        let idx = self.steps.partition_point(|s| s.units <= units);
        idx.checked_sub(1).map(|i| &self.steps[i])
    }

    pub fn value_at(&self, units: usize) -> f64 {
        self.step_at(units).map_or(0.0, |s| s.profit)
    }

    pub fn choice_at(&self, units: usize) -> Option<usize> {
        self.step_at(units).map(|s| s.project)
    }

    /// Dense values over every grid point. Allocates `grid.points()` floats.
    pub fn values(&self) -> Vec<f64> {
        (0..self.grid.points()).map(|b| self.value_at(b)).collect()
    }

    pub fn choices(&self) -> Vec<Option<usize>> {
        (0..self.grid.points()).map(|b| self.choice_at(b)).collect()
    }
}

/// Profit function of a cluster with every project launched without delay.
pub fn build_profit_function(
    cluster_id: usize,
    cluster: &Cluster,
    budget: f64,
    delta: f64,
    config: &DiscountConfig,
) -> Result<PiecewiseProfitFunction> {
    let grid = BudgetGrid::new(budget, delta)?;
    Ok(PiecewiseProfitFunction::from_candidates(
        cluster_id,
        grid,
        cluster
            .projects
            .iter()
            .enumerate()
            .map(|(i, p)| (i, p.cost(config.rho), p.profit(config.rho))),
    ))
}

/// Per-cluster grid budgets and projects chosen by [`solve_dp`].
#[derive(Debug, Clone, PartialEq)]
pub struct DpAllocation {
    pub grid: BudgetGrid,
    pub units: Vec<usize>,
    pub projects: Vec<Option<usize>>,
    pub total_profit: f64,
}

impl DpAllocation {
    pub fn budgets(&self) -> Vec<f64> {
        self.units.iter().map(|&u| self.grid.money(u)).collect()
    }

    pub fn spent_units(&self) -> usize {
        self.units.iter().sum()
    }
}

trait ChoiceCell: Copy + Default {
    fn from_index(i: usize) -> Self;
    fn index(self) -> usize;
}

macro_rules! choice_cell {
    ($($t:ty),*) => {$(
        impl ChoiceCell for $t {
            #[inline]
            fn from_index(i: usize) -> Self {
                i as $t
            }
            #[inline]
            fn index(self) -> usize {
                self as usize
            }
        }
    )*};
}
choice_cell!(u8, u16, u32);

/// Options of one cluster: `(units, profit)`, index 0 is "launch nothing".
fn options_of(f: &PiecewiseProfitFunction) -> Vec<(usize, f64)> {
    std::iter::once((0, 0.0))
        .chain(f.steps.iter().map(|s| (s.units, s.profit)))
        .collect()
}

fn advance(prev: &[f64], options: &[(usize, f64)], cur: &mut [f64]) {
    cur.copy_from_slice(prev);
    for &(u, q) in &options[1..] {
        for (c, &p) in cur[u..].iter_mut().zip(prev) {
            *c = c.max(p + q);
        }
    }
}

fn advance_recording<C: ChoiceCell>(
    prev: &[f64],
    options: &[(usize, f64)],
    cur: &mut [f64],
    choice: &mut [C],
) {
    cur.copy_from_slice(prev);
    choice.fill(C::default());
    for (o, &(u, q)) in options.iter().enumerate().skip(1) {
        let tag = C::from_index(o);
        for ((c, ch), &p) in cur[u..].iter_mut().zip(choice[u..].iter_mut()).zip(prev) {
            let cand = p + q;
            if cand > *c {
                *c = cand;
                *ch = tag;
            }
        }
    }
}

/// Maximises the summed profit over one grid budget per cluster, subject to the
/// grid budgets summing to at most the budget.
///
/// Among optimal allocations the smallest total spend wins; remaining ties
/// give later clusters the smaller budget, i.e. fund earlier clusters first.
pub fn solve_dp(functions: &[PiecewiseProfitFunction], budget: f64, delta: f64) -> Result<DpAllocation> {
    let grid = BudgetGrid::new(budget, delta)?;
    for f in functions {
        if f.grid != grid {
            return Err(PlanError::InconsistentGrid(format!(
                "cluster {} uses step {} with {} units, expected step {} with {} units",
                f.cluster_id, f.grid.delta, f.grid.units, grid.delta, grid.units
            )));
        }
    }
    let options: Vec<Vec<(usize, f64)>> = functions.iter().map(options_of).collect();
    let widest = options.iter().map(Vec::len).max().unwrap_or(1);
    let picks = if widest <= u8::MAX as usize + 1 {
        run_dp::<u8>(&options, grid.points())
    } else if widest <= u16::MAX as usize + 1 {
        run_dp::<u16>(&options, grid.points())
    } else {
        run_dp::<u32>(&options, grid.points())
    };
    let mut units = Vec::with_capacity(functions.len());
    let mut projects = Vec::with_capacity(functions.len());
    let mut total_profit = 0.0;
    for (f, &o) in functions.iter().zip(&picks) {
        if o == 0 {
            units.push(0);
            projects.push(None);
        } else {
            let s = f.steps[o - 1];
            units.push(s.units);
            projects.push(Some(s.project));
            total_profit += s.profit;
        }
    }
    Ok(DpAllocation {
        grid,
        units,
        projects,
        total_profit,
    })
}

/// Returns the option index picked for every cluster.
fn run_dp<C: ChoiceCell>(options: &[Vec<(usize, f64)>], points: usize) -> Vec<usize> {
    let n = options.len();
    if n == 0 {
        return Vec::new();
    }
    let row_bytes = points * std::mem::size_of::<C>();
    let block = if n.saturating_mul(row_bytes) <= FULL_CHOICE_TABLE_BYTES {
        n
    } else {
        ((8 * n / std::mem::size_of::<C>()) as f64).sqrt().ceil().max(1.0) as usize
    };
    run_dp_blocked::<C>(options, points, block)
}

/// Checkpoints the value row every `block` clusters and rebuilds one block of
/// back-pointers at a time while backtracking.
fn run_dp_blocked<C: ChoiceCell>(options: &[Vec<(usize, f64)>], points: usize, block: usize) -> Vec<usize> {
    let n = options.len();

    let mut origin = vec![f64::NEG_INFINITY; points];
    origin[0] = 0.0;
    let mut checkpoints: Vec<Vec<f64>> = vec![origin];
    if block < n {
        let last_start = (n - 1) / block * block;
        let mut prev = checkpoints[0].clone();
        let mut cur = vec![0.0; points];
        for k in 0..last_start {
            advance(&prev, &options[k], &mut cur);
            std::mem::swap(&mut prev, &mut cur);
            if (k + 1) % block == 0 {
                checkpoints.push(prev.clone());
            }
        }
    }

    let mut picks = vec![0usize; n];
    let mut remaining: Option<usize> = None;
    let mut prev = vec![0.0; points];
    let mut cur = vec![0.0; points];
    while let Some(start_row) = checkpoints.pop() {
        let start = checkpoints.len() * block;
        let end = (start + block).min(n);
        prev.copy_from_slice(&start_row);
        drop(start_row);
        let mut table: Vec<Vec<C>> = Vec::with_capacity(end - start);
        for opts in &options[start..end] {
            let mut choice = vec![C::default(); points];
            advance_recording(&prev, opts, &mut cur, &mut choice);
            std::mem::swap(&mut prev, &mut cur);
            table.push(choice);
        }
        let mut r = match remaining {
            Some(r) => r,
            None => {
                // final row: smallest spend among the best values
                let mut best = 0;
                for (i, &v) in prev.iter().enumerate() {
                    if v > prev[best] {
                        best = i;
                    }
                }
                best
            }
        };
        for k in (start..end).rev() {
            let o = table[k - start][r].index();
            picks[k] = o;
            r -= options[k][o].0;
        }
        remaining = Some(r);
    }
    picks
}

/// Grid budget and project per cluster, ignoring production caps.
pub fn stage_one_allocation(instance: &Instance, delta: f64, config: &DiscountConfig) -> Result<DpAllocation> {
    stage_one_allocation_among(instance, delta, config, |_, _| true)
}

/// Like [`stage_one_allocation`], restricted to the projects `(cluster, project)`
/// for which `admissible` holds.
pub fn stage_one_allocation_among(
    instance: &Instance,
    delta: f64,
    config: &DiscountConfig,
    admissible: impl Fn(usize, usize) -> bool,
) -> Result<DpAllocation> {
    instance.ensure_valid()?;
    config.validate(instance.horizon)?;
    let grid = BudgetGrid::new(instance.budget, delta)?;
    let functions: Vec<PiecewiseProfitFunction> = instance
        .clusters
        .iter()
        .enumerate()
        .map(|(k, cluster)| {
            let allowed: Vec<usize> = (0..cluster.projects.len()).filter(|&i| admissible(k, i)).collect();
            let priced: Vec<(f64, f64)> = allowed
                .iter()
                .map(|&i| {
                    let p = &cluster.projects[i];
                    (p.cost(config.rho), p.profit(config.rho))
                })
                .collect();
            let survivors = dominance_frontier(&priced);
            PiecewiseProfitFunction::from_candidates(
                k,
                grid,
                survivors.into_iter().map(|j| (allowed[j], priced[j].0, priced[j].1)),
            )
        })
        .collect();
    solve_dp(&functions, instance.budget, delta)
}

/// One project per cluster, all launched without delay, maximising profit
/// under the budget.
///
/// When the result also respects the caps it is optimal for the full problem
/// up to grid rounding.
pub fn stage_one(instance: &Instance, delta: f64, config: &DiscountConfig) -> Result<Solution> {
    stage_one_among(instance, delta, config, |_, _| true)
}

pub fn stage_one_among(
    instance: &Instance,
    delta: f64,
    config: &DiscountConfig,
    admissible: impl Fn(usize, usize) -> bool,
) -> Result<Solution> {
    let allocation = stage_one_allocation_among(instance, delta, config, admissible)?;
    let selection = allocation
        .projects
        .iter()
        .map(|p| p.map(|project| Choice::new(project, 0)))
        .collect();
    Solution::evaluate(instance, selection, config)
}
