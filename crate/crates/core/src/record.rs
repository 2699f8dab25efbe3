use serde::{Deserialize, Serialize};

/// Best-so-far fitness after `evals` objective evaluations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergencePoint {
    pub evals: usize,
    pub best_fitness: f64,
}

/// Outcome of one seeded optimizer run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    /// Sampled once after initialization and once per generation.
    pub history: Vec<ConvergencePoint>,
    /// Population diversity per generation; empty when the diversity restart is off.
    pub nvol_history: Vec<f64>,
    pub final_best: f64,
    pub final_position: Vec<f64>,
    /// Objective evaluations consumed (equals the budget's `used`).
    pub evaluations: usize,
    pub generations: usize,
    /// Diversity-restart proposals generated.
    pub spdm_triggers: usize,
    /// Restart opportunities skipped because the population was too small.
    pub spdm_skipped: usize,
}

impl RunRecord {
    /// `history` has non-increasing fitness and strictly increasing evals.
    pub fn is_monotone(&self) -> bool {
        self.history.windows(2).all(|w| {
            w[1].best_fitness <= w[0].best_fitness && w[1].evals > w[0].evals
        })
    }
}
