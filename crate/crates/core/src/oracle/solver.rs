use std::path::Path;
use std::process::Command;

use serde::{Deserialize, Serialize};

use crate::error::{PlanError, Result};

/// A shell command that solves an LP file and prints its result.
///
/// `{file}` and `{time_limit}` in `command` are replaced before running. The
/// objective (and optionally the best bound) is read from the first output
/// line starting with the matching prefix, after leading whitespace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverCommand {
    pub command: String,
    pub objective_prefix: String,
    #[serde(default)]
    pub bound_prefix: Option<String>,
    #[serde(default)]
    pub time_limit: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverReport {
    pub objective: Option<f64>,
    pub bound: Option<f64>,
    pub output: String,
}

impl SolverReport {
    /// The reported bound, or the objective when the solver prints no bound.
    pub fn upper_bound(&self) -> Option<f64> {
        self.bound.or(self.objective)
    }
}

/// First number after `prefix` on the first line that starts with it.
pub fn parse_prefixed_value(output: &str, prefix: &str) -> Option<f64> {
    output.lines().find_map(|line| {
        let rest = line.trim_start().strip_prefix(prefix)?;
        rest.split(|c: char| c.is_whitespace() || c == ',' || c == ';' || c == '=' || c == ':')
            .find_map(|tok| tok.trim_end_matches(['.', ')', '%']).parse::<f64>().ok())
    })
}

pub fn run_solver(solver: &SolverCommand, lp_file: &Path) -> Result<SolverReport> {
    let limit = solver.time_limit.map_or_else(String::new, |t| t.to_string());
    let command = solver
        .command
        .replace("{file}", &lp_file.display().to_string())
        .replace("{time_limit}", &limit);
    let out = Command::new("sh").arg("-c").arg(&command).output()?;
    let mut output = String::from_utf8_lossy(&out.stdout).into_owned();
    output.push_str(&String::from_utf8_lossy(&out.stderr));
    if !out.status.success() {
        return Err(PlanError::Solver(format!("`{command}` exited with {}: {output}", out.status)));
    }
    let objective = parse_prefixed_value(&output, &solver.objective_prefix);
    let bound = solver
        .bound_prefix
        .as_deref()
        .and_then(|p| parse_prefixed_value(&output, p));
    Ok(SolverReport {
        objective,
        bound,
        output,
    })
}
