use serde::{Deserialize, Serialize};

use super::variant::{discount_factors, shift_with_factors};
use super::{fits, DiscountConfig, Instance};
use crate::error::{PlanError, Result};

/// The project launched in a cluster and its delay in years.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Choice {
    pub project: usize,
    pub shift: usize,
}

impl Choice {
    pub fn new(project: usize, shift: usize) -> Self {
        Self { project, shift }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub objective: f64,
    pub spent: f64,
    /// Total production per year.
    pub totals: Vec<f64>,
    pub feasible_budget: bool,
    pub feasible_capacity: bool,
}

impl Evaluation {
    pub fn is_feasible(&self) -> bool {
        self.feasible_budget && self.feasible_capacity
    }
}

/// At most one launched project per cluster, with its evaluated totals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub selection: Vec<Option<Choice>>,
    pub objective: f64,
    pub spent: f64,
    pub totals: Vec<f64>,
}

impl Solution {
    pub fn evaluate(
        instance: &Instance,
        selection: Vec<Option<Choice>>,
        config: &DiscountConfig,
    ) -> Result<Self> {
        let eval = evaluate_selection(instance, &selection, config)?;
        Ok(Self {
            selection,
            objective: eval.objective,
            spent: eval.spent,
            totals: eval.totals,
        })
    }

    pub fn empty(instance: &Instance) -> Self {
        Self {
            selection: vec![None; instance.cluster_count()],
            objective: 0.0,
            spent: 0.0,
            totals: vec![0.0; instance.horizon],
        }
    }

    pub fn launched(&self) -> usize {
        self.selection.iter().flatten().count()
    }
}

pub fn evaluate_solution(
    instance: &Instance,
    solution: &Solution,
    config: &DiscountConfig,
) -> Result<Evaluation> {
    evaluate_selection(instance, &solution.selection, config)
}

/// Objective, spend and yearly totals of a selection, plus its feasibility
/// against the budget and the caps. Clusters are summed in index order.
pub fn evaluate_selection(
    instance: &Instance,
    selection: &[Option<Choice>],
    config: &DiscountConfig,
) -> Result<Evaluation> {
    if selection.len() != instance.cluster_count() {
        return Err(PlanError::SelectionLength {
            expected: instance.cluster_count(),
            got: selection.len(),
        });
    }
    let horizon = instance.horizon;
    let max_shift = config.max_shift(horizon);
    let factors = discount_factors(config.rho, horizon);
    let mut objective = 0.0;
    let mut spent = 0.0;
    let mut totals = vec![0.0; horizon];
    for (cluster, choice) in selection.iter().enumerate() {
        let Some(choice) = choice else { continue };
        let project = instance.project(cluster, choice.project)?;
        if choice.shift > max_shift {
            return Err(PlanError::ShiftOutOfRange {
                shift: choice.shift,
                max_shift,
            });
        }
        let variant = shift_with_factors(project, choice.shift, &factors);
        objective += variant.profit;
        spent += variant.cost;
        for (total, d) in totals.iter_mut().zip(&variant.production) {
            *total += d;
        }
    }
    let feasible_budget = fits(spent, instance.budget);
    let feasible_capacity = totals
        .iter()
        .zip(&instance.cap)
        .all(|(&total, &cap)| fits(total, cap));
    Ok(Evaluation {
        objective,
        spent,
        totals,
        feasible_budget,
        feasible_capacity,
    })
}
