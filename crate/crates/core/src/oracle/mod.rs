//! Exact answers for small instances and MILP export for large ones.

mod enumerate;
mod lp;
mod solver;

pub use enumerate::{brute_force, brute_force_fixed, state_count, OracleLimits};
pub use lp::{export_milp, variable_name, MilpVariant};
pub use solver::{parse_prefixed_value, run_solver, SolverCommand, SolverReport};

use crate::error::{PlanError, Result};
use crate::model::{discount_factors, shift_with_factors, DiscountConfig, Instance, ShiftedVariant};

/// One launchable `(project, shift)` pair of a cluster.
#[derive(Debug, Clone)]
pub(crate) struct Launch {
    pub project: usize,
    pub variant: ShiftedVariant,
}

/// Project indices each cluster may launch: all of them, or the fixed one.
pub(crate) fn candidates(instance: &Instance, fixed: Option<&[Option<usize>]>) -> Result<Vec<Vec<usize>>> {
    match fixed {
        None => Ok(instance
            .clusters
            .iter()
            .map(|c| (0..c.projects.len()).collect())
            .collect()),
        Some(selection) => {
            if selection.len() != instance.cluster_count() {
                return Err(PlanError::SelectionLength {
                    expected: instance.cluster_count(),
                    got: selection.len(),
                });
            }
            selection
                .iter()
                .enumerate()
                .map(|(k, choice)| match choice {
                    None => Ok(Vec::new()),
                    Some(i) => instance.project(k, *i).map(|_| vec![*i]),
                })
                .collect()
        }
    }
}

/// Every shifted variant of the candidates, in `(project, shift)` order.
pub(crate) fn expand(
    instance: &Instance,
    config: &DiscountConfig,
    candidates: &[Vec<usize>],
) -> Vec<Vec<Launch>> {
    let horizon = instance.horizon;
    let factors = discount_factors(config.rho, horizon);
    let max_shift = config.max_shift(horizon);
    candidates
        .iter()
        .enumerate()
        .map(|(k, projects)| {
            let mut out = Vec::with_capacity(projects.len() * (max_shift + 1));
            for &i in projects {
                let project = &instance.clusters[k].projects[i];
                for shift in 0..=max_shift {
                    out.push(Launch {
                        project: i,
                        variant: shift_with_factors(project, shift, &factors),
                    });
                }
            }
            out
        })
        .collect()
}

pub(crate) fn prepare(instance: &Instance, config: &DiscountConfig) -> Result<()> {
    instance.ensure_valid()?;
    config.validate(instance.horizon)
}
