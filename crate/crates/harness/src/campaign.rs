use std::collections::BTreeMap;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::Instant;

use mrime_core::suite::{make_instance, BenchmarkInstance};
use mrime_core::{make_variant, MrimeParams, RunRecord, Variant};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::CampaignConfig;
use crate::error::{csv_err, io_err, HarnessError, Result};
use crate::report::{self, ReportSummary};
use crate::seeds::derive_seed;

pub const CONFIG_FILE: &str = "campaign.toml";
pub const RESULTS_FILE: &str = "results.csv";
pub const FAILURES_FILE: &str = "failures.csv";
pub const TIMINGS_FILE: &str = "timings.csv";
pub const RUNS_DIR: &str = "runs";

/// One optimizer run of the campaign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Job {
    pub dim: usize,
    pub function: usize,
    pub variant: Variant,
    pub run: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub job: Job,
    pub instance: String,
    pub seed: u64,
    pub result: std::result::Result<RunRecord, String>,
    pub wall_seconds: f64,
}

const RESULT_HEADER: &[&str] = &[
    "dim",
    "function",
    "variant",
    "run",
    "seed",
    "final_best",
    "evaluations",
    "generations",
    "spdm_triggers",
];

/// Row of `results.csv`, the input of `report`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub dim: usize,
    pub function: usize,
    pub variant: Variant,
    pub run: usize,
    pub seed: u64,
    pub final_best: f64,
    pub evaluations: usize,
    pub generations: usize,
    pub spdm_triggers: usize,
}

#[derive(Debug, Serialize)]
struct FailureRow<'a> {
    dim: usize,
    function: usize,
    variant: Variant,
    run: usize,
    seed: u64,
    message: &'a str,
}

#[derive(Debug, Serialize)]
struct TimingRow {
    dim: usize,
    function: usize,
    variant: Variant,
    run: usize,
    wall_seconds: f64,
}

#[derive(Debug)]
pub struct CampaignOutput {
    pub outcomes: Vec<RunOutcome>,
    /// Absent when some runs failed and the result matrix is incomplete.
    pub report: Option<ReportSummary>,
}

impl CampaignOutput {
    pub fn failures(&self) -> impl Iterator<Item = &RunOutcome> {
        self.outcomes.iter().filter(|o| o.result.is_err())
    }
}

/// Jobs sorted by dimension, function, variant, run.
pub fn plan(cfg: &CampaignConfig) -> Vec<Job> {
    let mut jobs = Vec::new();
    for &dim in &cfg.dims {
        for function in cfg.function_ids() {
            for &variant in &cfg.variants {
                for run in 0..cfg.runs {
                    jobs.push(Job {
                        dim,
                        function,
                        variant,
                        run,
                    });
                }
            }
        }
    }
    jobs.sort();
    jobs
}

pub fn instance_label(cfg: &CampaignConfig, function: usize, dim: usize) -> String {
    format!("{}-F{function}-D{dim}", cfg.suite)
}

/// Run `jobs` on at most `workers` threads. A panic inside `runner` fails
/// only that job. Outcomes come back in job order whatever the scheduling.
pub fn run_jobs<F>(cfg: &CampaignConfig, jobs: &[Job], workers: usize, runner: F) -> Result<Vec<RunOutcome>>
where
    F: Fn(&Job, u64) -> mrime_core::Result<RunRecord> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| HarnessError::Config(format!("cannot start worker pool: {e}")))?;
    let outcomes = pool.install(|| {
        jobs.par_iter()
            .map(|job| {
                let instance = instance_label(cfg, job.function, job.dim);
                let seed = derive_seed(cfg.seed, job.variant.name(), &instance, job.run);
                let start = Instant::now();
                let result = match catch_unwind(AssertUnwindSafe(|| runner(job, seed))) {
                    Ok(Ok(record)) => Ok(record),
                    Ok(Err(e)) => Err(e.to_string()),
                    Err(payload) => Err(panic_message(payload.as_ref())),
                };
                RunOutcome {
                    job: *job,
                    instance,
                    seed,
                    result,
                    wall_seconds: start.elapsed().as_secs_f64(),
                }
            })
            .collect()
    });
    Ok(outcomes)
}

fn panic_message(payload: &(dyn std::any::Any + Send)) -> String {
    let text = payload
        .downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| payload.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "non-string panic payload".into());
    format!("panicked: {text}")
}

fn build_instances(cfg: &CampaignConfig) -> Result<BTreeMap<(usize, usize), BenchmarkInstance>> {
    let mut out = BTreeMap::new();
    for &dim in &cfg.dims {
        for function in cfg.function_ids() {
            out.insert((dim, function), make_instance(cfg.suite, function, dim, cfg.instance_seed)?);
        }
    }
    Ok(out)
}

/// Execute the campaign and write every artifact under `cfg.output_dir`.
pub fn run_campaign(cfg: &CampaignConfig) -> Result<CampaignOutput> {
    cfg.validate()?;
    let dir = cfg.output_dir.clone();
    // Fail on an unwritable output directory before spending any evaluations.
    fs::create_dir_all(&dir).map_err(io_err(&dir))?;
    let config_path = dir.join(CONFIG_FILE);
    fs::write(&config_path, cfg.to_toml()?).map_err(io_err(&config_path))?;

    let instances = build_instances(cfg)?;
    let jobs = plan(cfg);
    let workers = cfg.workers.unwrap_or(1);
    let outcomes = run_jobs(cfg, &jobs, workers, |job, seed| {
        let inst = &instances[&(job.dim, job.function)];
        let params = MrimeParams::new(cfg.np, cfg.fes_max(job.dim));
        make_variant(job.variant.flags(), params).run(inst, &inst.space(), seed)
    })?;

    write_run_files(&dir, &outcomes)?;
    let rows: Vec<ResultRow> = outcomes.iter().filter_map(result_row).collect();
    write_csv(&dir.join(RESULTS_FILE), RESULT_HEADER, &rows)?;
    let failures: Vec<FailureRow> = outcomes
        .iter()
        .filter_map(|o| {
            o.result.as_ref().err().map(|message| FailureRow {
                dim: o.job.dim,
                function: o.job.function,
                variant: o.job.variant,
                run: o.job.run,
                seed: o.seed,
                message,
            })
        })
        .collect();
    write_csv(&dir.join(FAILURES_FILE), &["dim", "function", "variant", "run", "seed", "message"], &failures)?;
    let timings: Vec<TimingRow> = outcomes
        .iter()
        .map(|o| TimingRow {
            dim: o.job.dim,
            function: o.job.function,
            variant: o.job.variant,
            run: o.job.run,
            wall_seconds: o.wall_seconds,
        })
        .collect();
    write_csv(&dir.join(TIMINGS_FILE), &["dim", "function", "variant", "run", "wall_seconds"], &timings)?;

    report::write_summary(cfg, &rows, &dir)?;
    let report = if failures.is_empty() {
        Some(report::write_reports(cfg, &rows, &dir)?)
    } else {
        None
    };
    Ok(CampaignOutput { outcomes, report })
}

fn result_row(o: &RunOutcome) -> Option<ResultRow> {
    let r = o.result.as_ref().ok()?;
    Some(ResultRow {
        dim: o.job.dim,
        function: o.job.function,
        variant: o.job.variant,
        run: o.job.run,
        seed: o.seed,
        final_best: r.final_best,
        evaluations: r.evaluations,
        generations: r.generations,
        spdm_triggers: r.spdm_triggers,
    })
}

pub fn run_csv_path(dir: &Path, job: &Job) -> PathBuf {
    dir.join(RUNS_DIR)
        .join(format!("D{}", job.dim))
        .join(format!("F{}", job.function))
        .join(job.variant.name())
        .join(format!("run_{:03}.csv", job.run))
}

#[derive(Serialize)]
struct HistoryRow {
    evals: usize,
    best_fitness: f64,
}

fn write_run_files(dir: &Path, outcomes: &[RunOutcome]) -> Result<()> {
    for o in outcomes {
        let Ok(record) = &o.result else { continue };
        let path = run_csv_path(dir, &o.job);
        let parent = path.parent().expect("run path has a parent");
        fs::create_dir_all(parent).map_err(io_err(parent))?;
        let rows: Vec<HistoryRow> = record
            .history
            .iter()
            .map(|p| HistoryRow {
                evals: p.evals,
                best_fitness: p.best_fitness,
            })
            .collect();
        write_csv(&path, &["evals", "best_fitness"], &rows)?;
    }
    Ok(())
}

/// Write `header` then `rows`; the header is present even with no rows.
pub(crate) fn write_csv<T: Serialize>(path: &Path, header: &[&str], rows: &[T]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(csv_err(path))?;
    w.write_record(header).map_err(csv_err(path))?;
    for r in rows {
        w.serialize(r).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))?;
    Ok(())
}

pub fn read_results(path: &Path) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    r.deserialize().collect::<std::result::Result<Vec<ResultRow>, _>>().map_err(csv_err(path))
}
