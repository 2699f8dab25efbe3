//! Experiment campaigns for the RIME family: seeded runs over benchmark
//! suites, per-run convergence CSVs, summary tables and statistical reports.

pub mod campaign;
pub mod config;
pub mod error;
pub mod report;
pub mod seeds;

pub use campaign::{plan, run_campaign, run_jobs, CampaignOutput, Job, ResultRow, RunOutcome};
pub use config::CampaignConfig;
pub use error::{HarnessError, Result};
pub use report::{report_dir, ReportSummary};
pub use seeds::derive_seed;
