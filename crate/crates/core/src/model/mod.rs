//! Problem data: clusters of candidate development projects, the budget and
//! the yearly production caps, plus the selections a solver hands back.
//!
//! Projects carry per-year schedules. The scalar cost and profit of a project
//! are derived from those schedules under a [`DiscountConfig`], so a delayed
//! launch can always be re-priced.

mod dominance;
mod eval;
mod validate;
mod variant;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{invalid_param, PlanError, Result};

pub use dominance::{dominance_frontier, prune_dominated, CostProfit};
pub use eval::{evaluate_selection, evaluate_solution, Choice, Evaluation, Solution};
pub use validate::{validate_instance, Violation};
pub use variant::{discount_factors, shift_project, ShiftedVariant};
pub(crate) use variant::shift_with_factors;

/// Relative slack used whenever a floating-point total is compared against a
/// budget or a production cap.
pub const FEASIBILITY_TOLERANCE: f64 = 1e-9;

/// `total <= limit`, up to [`FEASIBILITY_TOLERANCE`] relative to the limit.
#[inline]
pub fn fits(total: f64, limit: f64) -> bool {
    total <= limit + FEASIBILITY_TOLERANCE * limit.abs().max(1.0)
}

/// One way of developing a cluster.
///
/// All three schedules are indexed by year, `[0]` being the first year of the
/// planning period, and have the horizon's length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Project {
    pub production: Vec<f64>,
    pub cost_schedule: Vec<f64>,
    pub revenue: Vec<f64>,
}

impl Project {
    pub fn new(production: Vec<f64>, cost_schedule: Vec<f64>, revenue: Vec<f64>) -> Self {
        Self {
            production,
            cost_schedule,
            revenue,
        }
    }

    /// Discounted investment when launched without delay.
    pub fn cost(&self, rho: f64) -> f64 {
        discounted_sum(&self.cost_schedule, rho)
    }

    /// Discounted revenue when launched without delay.
    pub fn profit(&self, rho: f64) -> f64 {
        discounted_sum(&self.revenue, rho)
    }

    pub fn peak_production(&self) -> f64 {
        self.production.iter().copied().fold(0.0, f64::max)
    }
}

fn discounted_sum(values: &[f64], rho: f64) -> f64 {
    let mut factor = 1.0;
    let mut sum = 0.0;
    for &v in values {
        sum += factor * v;
        factor *= rho;
    }
    sum
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cluster {
    /// Optional explicit id; when present it must equal the cluster's position.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<usize>,
    pub projects: Vec<Project>,
}

impl Cluster {
    pub fn new(projects: Vec<Project>) -> Self {
        Self { id: None, projects }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Instance {
    /// Number of years in the planning period.
    pub horizon: usize,
    /// Total investment available over the whole period.
    pub budget: f64,
    /// Maximum total production per year; length `horizon`.
    pub cap: Vec<f64>,
    pub clusters: Vec<Cluster>,
}

impl Instance {
    pub fn cluster_count(&self) -> usize {
        self.clusters.len()
    }

    pub fn project(&self, cluster: usize, project: usize) -> Result<&Project> {
        self.clusters
            .get(cluster)
            .and_then(|c| c.projects.get(project))
            .ok_or(PlanError::ProjectOutOfRange { cluster, project })
    }

    /// Errors with every violation joined when the instance is not well formed.
    pub fn ensure_valid(&self) -> Result<()> {
        let report = validate_instance(self);
        if report.is_empty() {
            Ok(())
        } else {
            let joined: Vec<String> = report.iter().map(ToString::to_string).collect();
            Err(PlanError::InvalidInstance(joined.join("; ")))
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Reads and validates an instance file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let instance = Self::from_json_str(&text)?;
        instance.ensure_valid()?;
        Ok(instance)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut text = self.to_json_string()?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }
}

/// Discounting and delay settings shared by every evaluation.
///
/// `rho` multiplies money once per year of delay; `1.0` disables discounting.
/// `max_shift` bounds the launch delay of any project and defaults to
/// `horizon - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscountConfig {
    pub rho: f64,
    #[serde(default)]
    pub max_shift: Option<usize>,
}

impl Default for DiscountConfig {
    fn default() -> Self {
        Self {
            rho: 1.0,
            max_shift: None,
        }
    }
}

impl DiscountConfig {
    pub fn new(rho: f64, max_shift: Option<usize>) -> Self {
        Self { rho, max_shift }
    }

    pub fn max_shift(&self, horizon: usize) -> usize {
        self.max_shift.unwrap_or(horizon.saturating_sub(1))
    }

    pub fn validate(&self, horizon: usize) -> Result<()> {
        if !(self.rho > 0.0 && self.rho <= 1.0) {
            return Err(invalid_param("rho", format!("{} is not in (0, 1]", self.rho)));
        }
        if let Some(shift) = self.max_shift {
            if shift + 1 > horizon.max(1) {
                return Err(invalid_param(
                    "max_shift",
                    format!("{shift} exceeds horizon - 1 = {}", horizon.saturating_sub(1)),
                ));
            }
        }
        Ok(())
    }
}
