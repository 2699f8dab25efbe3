use std::fs;
use std::path::{Path, PathBuf};

use mrime_core::suite::Suite;
use mrime_core::{Error as CoreError, RunRecord, Variant};
use mrime_harness::campaign::{read_results, run_csv_path, RESULTS_FILE};
use mrime_harness::report::{matrices, write_reports, SUMMARY_FILE};
use mrime_harness::{plan, report_dir, run_campaign, run_jobs, CampaignConfig, HarnessError};
use tempfile::TempDir;

fn config(dir: &Path, variants: Vec<Variant>, functions: Vec<usize>, runs: usize) -> CampaignConfig {
    CampaignConfig {
        schema_version: 1,
        suite: Suite::Cec2017,
        functions,
        dims: vec![2],
        variants,
        runs,
        np: 6,
        fes_multiplier: 30.0,
        seed: 11,
        instance_seed: 3,
        output_dir: dir.to_path_buf(),
        stats_alpha: 0.05,
        candidate: None,
        workers: Some(2),
    }
}

fn csv_files(dir: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else if p.extension().is_some_and(|x| x == "csv") {
                out.push(p);
            }
        }
    }
    out.sort();
    out
}

#[test]
fn minimal_campaign_writes_two_run_files_and_one_summary() {
    let tmp = TempDir::new().unwrap();
    let cfg = config(tmp.path(), vec![Variant::Rime], vec![1], 2);
    let out = run_campaign(&cfg).unwrap();
    assert_eq!(out.outcomes.len(), 2);
    assert_eq!(out.failures().count(), 0);

    let runs = csv_files(&tmp.path().join("runs"));
    assert_eq!(runs.len(), 2);
    let summaries = csv_files(tmp.path())
        .into_iter()
        .filter(|p| p.file_name().unwrap() == SUMMARY_FILE)
        .count();
    assert_eq!(summaries, 1);

    let text = fs::read_to_string(tmp.path().join(SUMMARY_FILE)).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "dim,function,class,variant,runs,best,mean,std,rank");
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("2,1,unimodal,RIME,2,"), "{}", lines[1]);

    let history = fs::read_to_string(run_csv_path(tmp.path(), &plan(&cfg)[0])).unwrap();
    assert!(history.starts_with("evals,best_fitness\n"));
    // Budget is 60 with NP 6: init plus 9 generations.
    assert_eq!(history.lines().count(), 1 + 10);
}

#[test]
fn rerun_is_byte_identical() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let variants = vec![Variant::Rime, Variant::MrimeCd];
    run_campaign(&config(a.path(), variants.clone(), vec![1, 5], 3)).unwrap();
    run_campaign(&config(b.path(), variants, vec![1, 5], 3)).unwrap();
    for name in [SUMMARY_FILE, RESULTS_FILE, "mean_rank.csv", "wel.csv", "friedman.csv"] {
        let x = fs::read(a.path().join(name)).unwrap();
        let y = fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name} differs");
    }
}

#[test]
fn worker_count_does_not_change_results() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let variants = vec![Variant::RimeGa, Variant::MrimeCd];
    let mut one = config(a.path(), variants.clone(), vec![2, 7], 4);
    one.workers = Some(1);
    let mut four = config(b.path(), variants, vec![2, 7], 4);
    four.workers = Some(4);
    run_campaign(&one).unwrap();
    run_campaign(&four).unwrap();
    assert_eq!(
        read_results(&a.path().join(RESULTS_FILE)).unwrap(),
        read_results(&b.path().join(RESULTS_FILE)).unwrap()
    );
    for (x, y) in csv_files(&a.path().join("runs")).iter().zip(csv_files(&b.path().join("runs"))) {
        assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap());
    }
}

#[test]
fn panicking_run_fails_only_that_job() {
    let tmp = TempDir::new().unwrap();
    let cfg = config(tmp.path(), vec![Variant::Rime], vec![1], 4);
    let jobs = plan(&cfg);
    let outcomes = run_jobs(&cfg, &jobs, 3, |job, _| {
        if job.run == 2 {
            panic!("boom");
        }
        if job.run == 3 {
            return Err(CoreError::Config("bad".into()));
        }
        Ok(RunRecord {
            seed: 0,
            history: Vec::new(),
            nvol_history: Vec::new(),
            final_best: job.run as f64,
            final_position: vec![0.0],
            evaluations: 1,
            generations: 0,
            spdm_triggers: 0,
            spdm_skipped: 0,
        })
    })
    .unwrap();
    assert_eq!(outcomes.len(), 4);
    assert!(outcomes[0].result.is_ok() && outcomes[1].result.is_ok());
    assert!(outcomes[2].result.as_ref().unwrap_err().contains("boom"));
    assert!(outcomes[3].result.as_ref().unwrap_err().contains("bad"));
}

#[test]
fn report_on_incomplete_results_names_missing_cells() {
    let tmp = TempDir::new().unwrap();
    let cfg = config(tmp.path(), vec![Variant::Rime, Variant::MrimeCd], vec![1, 3], 2);
    run_campaign(&cfg).unwrap();
    let path = tmp.path().join(RESULTS_FILE);
    let rows = read_results(&path).unwrap();
    let kept: Vec<_> = rows
        .iter()
        .filter(|r| !(r.variant == Variant::MrimeCd && r.function == 3))
        .filter(|r| !(r.variant == Variant::Rime && r.function == 1 && r.run == 1))
        .collect();
    let mut w = csv::Writer::from_path(&path).unwrap();
    for r in &kept {
        w.serialize(r).unwrap();
    }
    w.flush().unwrap();

    let err = report_dir(tmp.path()).unwrap_err();
    let msg = err.to_string();
    assert!(matches!(err, HarnessError::Incomplete(_)));
    assert!(msg.contains("MRIME-CD/F3/D2 (runs 0 1)"), "{msg}");
    assert!(msg.contains("RIME/F1/D2 (runs 1)"), "{msg}");
}

#[test]
fn single_algorithm_skips_friedman_with_notice() {
    let tmp = TempDir::new().unwrap();
    let cfg = config(tmp.path(), vec![Variant::MrimeCd], vec![1, 4], 3);
    let report = run_campaign(&cfg).unwrap().report.unwrap();
    assert!(report.notices.iter().any(|n| n.contains("Friedman")), "{:?}", report.notices);
    let friedman = fs::read_to_string(tmp.path().join("friedman.csv")).unwrap();
    assert!(friedman.lines().nth(1).unwrap().contains("skipped"));
    let ranks = fs::read_to_string(tmp.path().join("mean_rank.csv")).unwrap();
    assert_eq!(ranks, "variant,D2\nMRIME-CD,1\n");
}

#[test]
fn ablation_sized_matrix_feeds_rank_table() {
    let tmp = TempDir::new().unwrap();
    let functions = vec![1, 2, 3, 4, 6, 8, 10, 13, 16, 20, 23, 26];
    let mut cfg = config(tmp.path(), vec![Variant::Rime, Variant::MrimeCd], functions, 21);
    cfg.dims = vec![10];
    cfg.fes_multiplier = 2.0;
    cfg.np = 4;
    cfg.workers = Some(4);
    let out = run_campaign(&cfg).unwrap();
    let report = out.report.unwrap();
    let (_, m) = &report.matrices[0];
    assert_eq!(m.problems().len(), 12);
    assert_eq!(m.runs(), 21);
    let ranks = mrime_core::stats::mean_rank_table(m).unwrap();
    assert!((ranks.iter().sum::<f64>() - 3.0).abs() < 1e-12);
    assert!(ranks.iter().all(|r| (1.0..=2.0).contains(r)));

    // Regenerating from disk reproduces the same matrices.
    let again = write_reports(&cfg, &read_results(&tmp.path().join(RESULTS_FILE)).unwrap(), tmp.path()).unwrap();
    assert_eq!(again.matrices, matrices(&cfg, &read_results(&tmp.path().join(RESULTS_FILE)).unwrap()).unwrap());
    assert_eq!(again.matrices, report.matrices);
}

#[test]
fn unwritable_output_dir_errors_before_any_run() {
    let tmp = TempDir::new().unwrap();
    let blocker = tmp.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let cfg = config(&blocker.join("out"), vec![Variant::Rime], vec![1], 1);
    match run_campaign(&cfg) {
        Err(HarnessError::Io { .. }) => {}
        other => panic!("expected io error, got {other:?}"),
    }
}

#[test]
fn emitted_p_values_are_probabilities() {
    let tmp = TempDir::new().unwrap();
    let variants = vec![Variant::Rime, Variant::RimeS, Variant::MrimeCd];
    let mut cfg = config(tmp.path(), variants, vec![1, 5, 11], 5);
    cfg.dims = vec![10];
    cfg.fes_multiplier = 10.0;
    run_campaign(&cfg).unwrap();
    for name in ["friedman.csv", "kruskal_wallis.csv"] {
        let mut r = csv::Reader::from_path(tmp.path().join(name)).unwrap();
        let idx = r.headers().unwrap().iter().position(|h| h == "p_value").unwrap();
        let mut n = 0;
        for rec in r.records() {
            let p: f64 = rec.unwrap()[idx].parse().unwrap();
            assert!((0.0..=1.0).contains(&p), "{name}: {p}");
            n += 1;
        }
        assert!(n > 0, "{name} is empty");
    }
    let wel = fs::read_to_string(tmp.path().join("wel.csv")).unwrap();
    assert_eq!(wel.lines().count(), 3);
    for line in wel.lines().skip(1) {
        let counts: Vec<usize> = line.split(',').nth(1).unwrap().split('/').map(|x| x.parse().unwrap()).collect();
        assert_eq!(counts.iter().sum::<usize>(), 3);
    }
}

#[test]
fn config_round_trips_through_output_dir() {
    let tmp = TempDir::new().unwrap();
    let cfg = config(tmp.path(), vec![Variant::Rime], vec![1], 1);
    run_campaign(&cfg).unwrap();
    let saved = CampaignConfig::load(&tmp.path().join("campaign.toml")).unwrap();
    assert_eq!(saved, cfg);
}
