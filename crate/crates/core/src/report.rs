use serde::Serialize;

/// How a solve ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    MaxIterations,
    Diverged,
    Inadmissible,
}

/// Per-iteration history of an outer solve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverReport {
    /// Relative residual 2-norms; entry 0 is the initial residual and equals 1.
    pub residual_history: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub status: SolveStatus,
    /// Inner (linear) iterations spent per outer iteration, when applicable.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inner_iteration_counts: Option<Vec<usize>>,
    pub initial_residual_norm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
    /// Coarse-grid solves that fell back to the unmodified semi-Lagrangian step.
    pub coarse_solve_fallbacks: usize,
    pub elapsed_secs: f64,
}

impl SolverReport {
    pub(crate) fn start(initial_residual_norm: f64) -> Self {
        SolverReport {
            residual_history: vec![1.0],
            iterations: 0,
            converged: false,
            status: SolveStatus::MaxIterations,
            inner_iteration_counts: None,
            initial_residual_norm,
            failure: None,
            coarse_solve_fallbacks: 0,
            elapsed_secs: 0.0,
        }
    }

    pub(crate) fn finish(&mut self, status: SolveStatus) {
        self.status = status;
        self.converged = status == SolveStatus::Converged;
    }

    pub fn final_relative_residual(&self) -> f64 {
        *self.residual_history.last().unwrap_or(&1.0)
    }
}
