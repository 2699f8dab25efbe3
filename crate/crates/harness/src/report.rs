//! Summary and statistics tables derived from `results.csv`.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use mrime_core::stats::{
    average_ranks, friedman_test, kruskal_wallis_per_problem, mean_rank_table, summarize, wel_counts, ResultMatrix,
};
use mrime_core::Variant;
use serde::Serialize;

use crate::campaign::{read_results, write_csv, ResultRow, CONFIG_FILE, RESULTS_FILE};
use crate::config::CampaignConfig;
use crate::error::{csv_err, HarnessError, Result};

pub const SUMMARY_FILE: &str = "summary.csv";
pub const MEAN_RANK_FILE: &str = "mean_rank.csv";
pub const FRIEDMAN_FILE: &str = "friedman.csv";
pub const WEL_FILE: &str = "wel.csv";
pub const KRUSKAL_FILE: &str = "kruskal_wallis.csv";

#[derive(Debug, Clone, PartialEq)]
pub struct ReportSummary {
    /// Human-readable notes about skipped tests.
    pub notices: Vec<String>,
    pub files: Vec<PathBuf>,
    /// Result matrix per dimension, in config order.
    pub matrices: Vec<(usize, ResultMatrix)>,
}

fn problem_name(function: usize) -> String {
    format!("F{function}")
}

/// One result matrix per dimension; errors list every incomplete cell.
pub fn matrices(cfg: &CampaignConfig, rows: &[ResultRow]) -> Result<Vec<(usize, ResultMatrix)>> {
    let mut runs: BTreeMap<(usize, usize, Variant), BTreeMap<usize, f64>> = BTreeMap::new();
    for r in rows {
        runs.entry((r.dim, r.function, r.variant)).or_default().insert(r.run, r.final_best);
    }
    let mut missing = Vec::new();
    let mut out = Vec::new();
    for &dim in &cfg.dims {
        let mut cells = BTreeMap::new();
        for function in cfg.function_ids() {
            for &variant in &cfg.variants {
                let have = runs.get(&(dim, function, variant));
                let absent: Vec<usize> = (0..cfg.runs)
                    .filter(|i| have.is_none_or(|h| !h.contains_key(i)))
                    .collect();
                if !absent.is_empty() {
                    missing.push(format!("{variant}/F{function}/D{dim} (runs {})", join(&absent)));
                    continue;
                }
                let values: Vec<f64> = have.expect("checked").range(0..cfg.runs).map(|(_, v)| *v).collect();
                cells.insert((variant.name().to_string(), problem_name(function)), values);
            }
        }
        if missing.is_empty() {
            let m = ResultMatrix::from_cells(
                cfg.variants.iter().map(|v| v.name().to_string()).collect(),
                cfg.function_ids().into_iter().map(problem_name).collect(),
                cells,
            )?;
            out.push((dim, m));
        }
    }
    if !missing.is_empty() {
        return Err(HarnessError::Incomplete(format!("missing cells: {}", missing.join(", "))));
    }
    Ok(out)
}

fn join(items: &[usize]) -> String {
    items.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

type RunsByVariant = BTreeMap<Variant, Vec<(usize, f64)>>;

#[derive(Serialize)]
struct SummaryRow {
    dim: usize,
    function: usize,
    class: String,
    variant: Variant,
    runs: usize,
    best: f64,
    mean: f64,
    std: f64,
    rank: f64,
}

/// Best/mean/std per cell plus the mean-based rank within each
/// (dimension, function) group. Cells without any successful run are left out.
pub fn write_summary(cfg: &CampaignConfig, rows: &[ResultRow], dir: &Path) -> Result<PathBuf> {
    let mut cells: BTreeMap<(usize, usize), RunsByVariant> = BTreeMap::new();
    for r in rows {
        cells
            .entry((r.dim, r.function))
            .or_default()
            .entry(r.variant)
            .or_default()
            .push((r.run, r.final_best));
    }
    let mut out = Vec::new();
    for &dim in &cfg.dims {
        for function in cfg.function_ids() {
            let Some(group) = cells.get_mut(&(dim, function)) else { continue };
            let present: Vec<Variant> = cfg.variants.iter().copied().filter(|v| group.contains_key(v)).collect();
            let mut stats = Vec::new();
            for v in &present {
                let runs = group.get_mut(v).expect("present");
                runs.sort_by_key(|(i, _)| *i);
                let values: Vec<f64> = runs.iter().map(|(_, f)| *f).collect();
                stats.push((values.len(), summarize(&values)?));
            }
            let ranks = average_ranks(&stats.iter().map(|(_, s)| s.mean).collect::<Vec<_>>());
            let class = cfg.suite.function_class(function)?.to_string();
            for ((v, (n, s)), rank) in present.iter().zip(stats).zip(ranks) {
                out.push(SummaryRow {
                    dim,
                    function,
                    class: class.clone(),
                    variant: *v,
                    runs: n,
                    best: s.best,
                    mean: s.mean,
                    std: s.std,
                    rank,
                });
            }
        }
    }
    let path = dir.join(SUMMARY_FILE);
    write_csv(
        &path,
        &["dim", "function", "class", "variant", "runs", "best", "mean", "std", "rank"],
        &out,
    )?;
    Ok(path)
}

fn write_table(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(header).map_err(csv_err(path))?;
    for r in rows {
        w.write_record(r).map_err(csv_err(path))?;
    }
    w.flush().map_err(|e| HarnessError::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

/// Mean-rank, Friedman, w/e/l and Kruskal–Wallis tables for a complete campaign.
pub fn write_reports(cfg: &CampaignConfig, rows: &[ResultRow], dir: &Path) -> Result<ReportSummary> {
    let mats = matrices(cfg, rows)?;
    let mut notices = Vec::new();
    let k = cfg.variants.len();
    let dim_cols: Vec<String> = mats.iter().map(|(d, _)| format!("D{d}")).collect();

    // Mean ranks: one row per variant, one column per dimension.
    let mut ranks_by_dim = Vec::new();
    for (_, m) in &mats {
        ranks_by_dim.push(if k < 2 { vec![1.0] } else { mean_rank_table(m)? });
    }
    let rank_rows: Vec<Vec<String>> = cfg
        .variants
        .iter()
        .enumerate()
        .map(|(a, v)| {
            std::iter::once(v.name().to_string())
                .chain(ranks_by_dim.iter().map(|r| r[a].to_string()))
                .collect()
        })
        .collect();
    let mean_rank_path = dir.join(MEAN_RANK_FILE);
    write_table(&mean_rank_path, &header("variant", &dim_cols), &rank_rows)?;

    let mut friedman_rows = Vec::new();
    for (dim, m) in &mats {
        let n = m.problems().len();
        if k < 2 || n < 2 {
            let note = format!("skipped: Friedman test needs at least 2 algorithms and 2 problems, have {k} and {n}");
            notices.push(format!("D{dim}: {note}"));
            friedman_rows.push(vec![dim.to_string(), k.to_string(), n.to_string(), String::new(), String::new(), note]);
            continue;
        }
        let f = friedman_test(m)?;
        friedman_rows.push(vec![
            dim.to_string(),
            k.to_string(),
            n.to_string(),
            f.statistic.to_string(),
            f.p_value.to_string(),
            String::new(),
        ]);
    }
    let friedman_path = dir.join(FRIEDMAN_FILE);
    write_table(
        &friedman_path,
        &["dim", "algorithms", "problems", "statistic", "p_value", "note"].map(String::from),
        &friedman_rows,
    )?;

    // w/e/l of the candidate: one row per opponent, one column per dimension.
    let candidate = cfg.candidate();
    let c = cfg.variants.iter().position(|v| *v == candidate).expect("validated");
    let mut wel_rows = Vec::new();
    for (o, opponent) in cfg.variants.iter().enumerate().filter(|(o, _)| *o != c) {
        let mut row = vec![opponent.name().to_string()];
        for (_, m) in &mats {
            let w = wel_counts(m, c, o, cfg.stats_alpha)?;
            row.push(format!("{}/{}/{}", w.win, w.equal, w.loss));
        }
        wel_rows.push(row);
    }
    if wel_rows.is_empty() {
        notices.push(format!("w/e/l skipped: {candidate} has no opponents"));
    }
    let wel_path = dir.join(WEL_FILE);
    write_table(&wel_path, &header(&format!("{candidate} vs"), &dim_cols), &wel_rows)?;

    let mut kw_rows = Vec::new();
    if k < 2 {
        notices.push("Kruskal–Wallis skipped: fewer than 2 algorithms".into());
    } else {
        for (dim, m) in &mats {
            for (p, r) in m.problems().iter().zip(kruskal_wallis_per_problem(m)?) {
                kw_rows.push(vec![dim.to_string(), p.clone(), r.statistic.to_string(), r.p_value.to_string()]);
            }
        }
    }
    let kw_path = dir.join(KRUSKAL_FILE);
    write_table(&kw_path, &["dim", "function", "statistic", "p_value"].map(String::from), &kw_rows)?;

    Ok(ReportSummary {
        notices,
        files: vec![mean_rank_path, friedman_path, wel_path, kw_path],
        matrices: mats,
    })
}

fn header(first: &str, rest: &[String]) -> Vec<String> {
    std::iter::once(first.to_string()).chain(rest.iter().cloned()).collect()
}

/// Regenerate summary and reports for a campaign directory.
pub fn report_dir(input: &Path) -> Result<ReportSummary> {
    let cfg = CampaignConfig::load(&input.join(CONFIG_FILE))?;
    let rows = read_results(&input.join(RESULTS_FILE))?;
    let known: BTreeSet<(usize, usize, Variant)> = cfg
        .dims
        .iter()
        .flat_map(|&d| cfg.function_ids().into_iter().map(move |f| (d, f)))
        .flat_map(|(d, f)| cfg.variants.iter().map(move |&v| (d, f, v)))
        .collect();
    if let Some(r) = rows.iter().find(|r| !known.contains(&(r.dim, r.function, r.variant))) {
        return Err(HarnessError::Incomplete(format!(
            "results row {}/F{}/D{} is not part of the campaign config",
            r.variant, r.function, r.dim
        )));
    }
    write_summary(&cfg, &rows, input)?;
    write_reports(&cfg, &rows, input)
}
