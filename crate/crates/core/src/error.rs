use thiserror::Error;

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("shift {shift} out of range (max shift is {max_shift})")]
    ShiftOutOfRange { shift: usize, max_shift: usize },

    #[error("cluster {cluster} has no project {project}")]
    ProjectOutOfRange { cluster: usize, project: usize },

    #[error("selection covers {got} clusters, instance has {expected}")]
    SelectionLength { expected: usize, got: usize },

    #[error("profit functions disagree on the budget grid: {0}")]
    InconsistentGrid(String),

    #[error("order is not a permutation of the selected clusters: {0}")]
    InvalidPermutation(String),

    #[error("state space of {states} exceeds the limit of {limit}")]
    StateSpaceTooLarge { states: u128, limit: u128 },

    #[error("result breaks the budget: spent {spent} > {budget}")]
    BudgetViolated { spent: f64, budget: f64 },

    #[error("external solver: {0}")]
    Solver(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = PlanError> = std::result::Result<T, E>;

pub(crate) fn invalid_param(name: &'static str, reason: impl Into<String>) -> PlanError {
    PlanError::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
