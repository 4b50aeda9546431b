use super::{DiscountConfig, Project};
use crate::error::{PlanError, Result};

/// A project launched `shift` years late.
///
/// Everything the base project would do after the last year of the horizon is
/// lost, including revenue and investment.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftedVariant {
    pub shift: usize,
    /// Production per horizon year after shifting and truncation.
    pub production: Vec<f64>,
    /// Discounted investment of the shifted schedule.
    pub cost: f64,
    /// Discounted revenue of the shifted schedule.
    pub profit: f64,
}

impl ShiftedVariant {
    /// True when the variant produces nothing and earns nothing inside the horizon.
    pub fn is_empty(&self) -> bool {
        self.profit == 0.0 && self.production.iter().all(|&d| d == 0.0)
    }
}

/// `rho^0, rho^1, ..., rho^(horizon-1)`.
pub fn discount_factors(rho: f64, horizon: usize) -> Vec<f64> {
    let mut factors = Vec::with_capacity(horizon);
    let mut f = 1.0;
    for _ in 0..horizon {
        factors.push(f);
        f *= rho;
    }
    factors
}

pub fn shift_project(
    project: &Project,
    shift: usize,
    config: &DiscountConfig,
    horizon: usize,
) -> Result<ShiftedVariant> {
    let max_shift = config.max_shift(horizon);
    if shift > max_shift {
        return Err(PlanError::ShiftOutOfRange { shift, max_shift });
    }
    Ok(shift_with_factors(
        project,
        shift,
        &discount_factors(config.rho, horizon),
    ))
}

pub(crate) fn shift_with_factors(project: &Project, shift: usize, factors: &[f64]) -> ShiftedVariant {
    let horizon = factors.len();
    let mut production = vec![0.0; horizon];
    let mut cost = 0.0;
    let mut profit = 0.0;
    for year in shift..horizon {
        let base = year - shift;
        production[year] = project.production.get(base).copied().unwrap_or(0.0);
        let f = factors[year];
        cost += f * project.cost_schedule.get(base).copied().unwrap_or(0.0);
        profit += f * project.revenue.get(base).copied().unwrap_or(0.0);
    }
    ShiftedVariant {
        shift,
        production,
        cost,
        profit,
    }
}
