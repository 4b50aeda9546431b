use serde::{Deserialize, Serialize};

use super::{candidates, expand, prepare, Launch};
use crate::error::{PlanError, Result};
use crate::model::{fits, Choice, DiscountConfig, Instance, Solution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleLimits {
    /// Largest number of full selections the enumeration may face.
    pub max_states: u128,
}

impl Default for OracleLimits {
    fn default() -> Self {
        Self {
            max_states: 50_000_000,
        }
    }
}

/// Number of selections an exhaustive search would face: the product over
/// clusters of `candidates * (max_shift + 1) + 1`. Saturates at `u128::MAX`.
pub fn state_count(candidate_counts: impl IntoIterator<Item = usize>, max_shift: usize) -> u128 {
    candidate_counts.into_iter().fold(1u128, |acc, p| {
        let per = (p as u128).saturating_mul(max_shift as u128 + 1).saturating_add(1);
        acc.saturating_mul(per)
    })
}

/// Exact optimum over every `(project, shift)` choice including "none" per
/// cluster, under the budget and the caps.
///
/// Among optimal selections the lexicographically smallest wins, with "none"
/// ordered before any launch and launches ordered by `(project, shift)`.
pub fn brute_force(instance: &Instance, config: &DiscountConfig, limits: OracleLimits) -> Result<Solution> {
    prepare(instance, config)?;
    let cands = candidates(instance, None)?;
    search(instance, config, &cands, Some(instance.budget), limits)
}

/// Exact optimum when each cluster may only launch its project from
/// `selection`, at any shift. The budget is not enforced.
pub fn brute_force_fixed(
    instance: &Instance,
    config: &DiscountConfig,
    selection: &[Option<usize>],
    limits: OracleLimits,
) -> Result<Solution> {
    prepare(instance, config)?;
    let cands = candidates(instance, Some(selection))?;
    search(instance, config, &cands, None, limits)
}

fn search(
    instance: &Instance,
    config: &DiscountConfig,
    cands: &[Vec<usize>],
    budget: Option<f64>,
    limits: OracleLimits,
) -> Result<Solution> {
    let max_shift = config.max_shift(instance.horizon);
    let states = state_count(cands.iter().map(Vec::len), max_shift);
    if states > limits.max_states {
        return Err(PlanError::StateSpaceTooLarge {
            states,
            limit: limits.max_states,
        });
    }
    let options = expand(instance, config, cands);

    // best achievable profit from cluster k onwards, ignoring every constraint
    let mut tail = vec![0.0; options.len() + 1];
    for k in (0..options.len()).rev() {
        let best = options[k].iter().map(|o| o.variant.profit).fold(0.0, f64::max);
        tail[k] = tail[k + 1] + best;
    }

    let mut dfs = Dfs {
        options: &options,
        tail: &tail,
        cap: &instance.cap,
        budget,
        current: vec![None; options.len()],
        best: vec![None; options.len()],
        best_objective: 0.0,
        totals: vec![0.0; instance.horizon],
    };
    dfs.visit(0, 0.0, 0.0);
    let selection = dfs.best;
    Solution::evaluate(instance, selection, config)
}

struct Dfs<'a> {
    options: &'a [Vec<Launch>],
    tail: &'a [f64],
    cap: &'a [f64],
    budget: Option<f64>,
    current: Vec<Option<Choice>>,
    best: Vec<Option<Choice>>,
    best_objective: f64,
    totals: Vec<f64>,
}

impl Dfs<'_> {
    fn visit(&mut self, k: usize, objective: f64, spent: f64) {
        if k == self.options.len() {
            if objective > self.best_objective {
                self.best_objective = objective;
                self.best.clone_from(&self.current);
            }
            return;
        }
        // Only prunes with a margin so that float noise never discards an optimum.
        let bound = objective + self.tail[k];
        if bound < self.best_objective - 1e-9 * self.best_objective.abs().max(1.0) {
            return;
        }

        self.current[k] = None;
        self.visit(k + 1, objective, spent);

        let options = self.options;
        for launch in &options[k] {
            let v = &launch.variant;
            let spent_next = spent + v.cost;
            if let Some(budget) = self.budget {
                if !fits(spent_next, budget) {
                    continue;
                }
            }
            let saved = self.totals.clone();
            let mut ok = true;
            for (t, d) in v.production.iter().enumerate() {
                self.totals[t] += d;
                if !fits(self.totals[t], self.cap[t]) {
                    ok = false;
                    break;
                }
            }
            if ok {
                self.current[k] = Some(Choice::new(launch.project, v.shift));
                self.visit(k + 1, objective + v.profit, spent_next);
            }
            self.totals = saved;
        }
        self.current[k] = None;
    }
}
