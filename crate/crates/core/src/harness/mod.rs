//! Seeded instance generation, theorem-keyed property checks and sweeps.

pub mod checks;
pub mod gen;
pub mod sweep;

use serde::{Deserialize, Serialize};

pub use checks::{check_theorem, check_theorem_with, theorem_ids, CheckReport, DimRange, Execution, THEOREMS};
pub use gen::{generate, Flavor, Instance, InstanceSpec};
pub use sweep::{weyl_sweep, SweepRow, SWEEP_COLUMNS};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryLine {
    pub theorem_id: String,
    pub trials: u64,
    pub exercised: u64,
    pub failures: u64,
    pub worst_residual: f64,
}

/// Aggregate of several check reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub total_trials: u64,
    pub total_failures: u64,
    pub failing: Vec<String>,
    pub lines: Vec<SummaryLine>,
}

impl Summary {
    pub fn passed(&self) -> bool {
        self.total_failures == 0
    }
}

pub fn summarize(reports: &[CheckReport]) -> Summary {
    let mut lines: Vec<SummaryLine> = reports
        .iter()
        .map(|r| SummaryLine {
            theorem_id: r.theorem_id.clone(),
            trials: r.trials,
            exercised: r.exercised(),
            failures: r.failures,
            worst_residual: r.worst_residual,
        })
        .collect();
    lines.sort_by(|a, b| a.theorem_id.cmp(&b.theorem_id));
    Summary {
        total_trials: lines.iter().map(|l| l.trials).sum(),
        total_failures: lines.iter().map(|l| l.failures).sum(),
        failing: lines.iter().filter(|l| l.failures > 0).map(|l| l.theorem_id.clone()).collect(),
        lines,
    }
}
