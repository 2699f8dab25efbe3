//! Nonparametric comparison of optimizer results: mean-rank tables, Friedman,
//! Wilcoxon rank-sum with win/equal/loss tallies, and Kruskal–Wallis.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Final best-fitness values, `cells[algorithm][problem][run]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultMatrix {
    algorithms: Vec<String>,
    problems: Vec<String>,
    cells: Vec<Vec<Vec<f64>>>,
}

impl ResultMatrix {
    pub fn new(algorithms: Vec<String>, problems: Vec<String>, cells: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        if algorithms.is_empty() || problems.is_empty() {
            return Err(Error::Empty("result matrix needs at least one algorithm and one problem".into()));
        }
        if cells.len() != algorithms.len() || cells.iter().any(|row| row.len() != problems.len()) {
            return Err(Error::config("result matrix cells do not match algorithm × problem shape"));
        }
        let runs = cells[0][0].len();
        if runs == 0 {
            return Err(Error::Empty("result matrix cells hold no runs".into()));
        }
        for (a, row) in cells.iter().enumerate() {
            for (p, cell) in row.iter().enumerate() {
                if cell.len() != runs {
                    return Err(Error::config(format!(
                        "cell ({}, {}) has {} runs, expected {runs}",
                        algorithms[a],
                        problems[p],
                        cell.len()
                    )));
                }
            }
        }
        Ok(Self {
            algorithms,
            problems,
            cells,
        })
    }

    /// Assemble from keyed cells; every (algorithm, problem) pair must be present.
    pub fn from_cells(
        algorithms: Vec<String>,
        problems: Vec<String>,
        mut cells: BTreeMap<(String, String), Vec<f64>>,
    ) -> Result<Self> {
        let mut missing = Vec::new();
        let mut grid = Vec::with_capacity(algorithms.len());
        for a in &algorithms {
            let mut row = Vec::with_capacity(problems.len());
            for p in &problems {
                match cells.remove(&(a.clone(), p.clone())) {
                    Some(v) if !v.is_empty() => row.push(v),
                    _ => {
                        missing.push(format!("({a}, {p})"));
                        row.push(Vec::new());
                    }
                }
            }
            grid.push(row);
        }
        if !missing.is_empty() {
            return Err(Error::config(format!("result matrix is missing cells: {}", missing.join(", "))));
        }
        Self::new(algorithms, problems, grid)
    }

    pub fn algorithms(&self) -> &[String] {
        &self.algorithms
    }

    pub fn problems(&self) -> &[String] {
        &self.problems
    }

    pub fn runs(&self) -> usize {
        self.cells[0][0].len()
    }

    pub fn algorithm_index(&self, name: &str) -> Result<usize> {
        self.algorithms
            .iter()
            .position(|a| a == name)
            .ok_or_else(|| Error::config(format!("algorithm '{name}' not in result matrix")))
    }

    pub fn cell(&self, algorithm: usize, problem: usize) -> &[f64] {
        &self.cells[algorithm][problem]
    }

    pub fn mean(&self, algorithm: usize, problem: usize) -> f64 {
        mean(self.cell(algorithm, problem))
    }

    /// Apply `f` to every value.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            algorithms: self.algorithms.clone(),
            problems: self.problems.clone(),
            cells: self
                .cells
                .iter()
                .map(|row| row.iter().map(|c| c.iter().map(|&v| f(v)).collect()).collect())
                .collect(),
        }
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

/// Best, mean and sample standard deviation of one cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub best: f64,
    pub mean: f64,
    pub std: f64,
}

pub fn summarize(values: &[f64]) -> Result<CellSummary> {
    if values.is_empty() {
        return Err(Error::Empty("cannot summarize an empty sample".into()));
    }
    let m = mean(values);
    let std = if values.len() > 1 {
        (values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (values.len() - 1) as f64).sqrt()
    } else {
        0.0
    };
    Ok(CellSummary {
        best: values.iter().copied().fold(f64::INFINITY, f64::min),
        mean: m,
        std,
    })
}

/// 1-based ranks, ties sharing the average of the positions they span.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        let r = (i + j + 1) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = r;
        }
        i = j;
    }
    ranks
}

/// Σ (t³ − t) over tie groups.
fn tie_term(values: &[f64]) -> f64 {
    let mut s = values.to_vec();
    s.sort_by(f64::total_cmp);
    let mut total = 0.0;
    let mut i = 0;
    while i < s.len() {
        let mut j = i + 1;
        while j < s.len() && s[j] == s[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        total += t * t * t - t;
        i = j;
    }
    total
}

/// Per-problem ranks of algorithms by mean, `ranks[problem][algorithm]`.
pub fn problem_ranks(matrix: &ResultMatrix) -> Vec<Vec<f64>> {
    (0..matrix.problems.len())
        .map(|p| {
            let means: Vec<f64> = (0..matrix.algorithms.len()).map(|a| matrix.mean(a, p)).collect();
            average_ranks(&means)
        })
        .collect()
}

/// Average over problems of each algorithm's mean-based rank.
pub fn mean_rank_table(matrix: &ResultMatrix) -> Result<Vec<f64>> {
    if matrix.algorithms.len() < 2 {
        return Err(Error::config("mean rank table needs at least two algorithms"));
    }
    let ranks = problem_ranks(matrix);
    let n = ranks.len() as f64;
    Ok((0..matrix.algorithms.len())
        .map(|a| ranks.iter().map(|r| r[a]).sum::<f64>() / n)
        .collect())
}

fn chi_square_sf(statistic: f64, dof: usize) -> f64 {
    if !(statistic > 0.0) {
        return 1.0;
    }
    let dist = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
    dist.sf(statistic).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FriedmanResult {
    pub mean_ranks: Vec<f64>,
    pub statistic: f64,
    pub p_value: f64,
}

/// Friedman test over per-problem mean ranks, tie-corrected.
pub fn friedman_test(matrix: &ResultMatrix) -> Result<FriedmanResult> {
    let k = matrix.algorithms.len();
    let n = matrix.problems.len();
    if k < 2 || n < 2 {
        return Err(Error::config(format!(
            "Friedman test needs at least 2 algorithms and 2 problems, got {k} and {n}"
        )));
    }
    let mean_ranks = mean_rank_table(matrix)?;
    let (kf, nf) = (k as f64, n as f64);
    let ties: f64 = (0..n)
        .map(|p| tie_term(&(0..k).map(|a| matrix.mean(a, p)).collect::<Vec<_>>()))
        .sum();
    let correction = 1.0 - ties / (nf * kf * (kf * kf - 1.0));
    let spread: f64 = mean_ranks.iter().map(|r| (r - (kf + 1.0) / 2.0).powi(2)).sum();
    let statistic = if correction <= 0.0 {
        0.0
    } else {
        12.0 * nf / (kf * (kf + 1.0)) * spread / correction
    };
    Ok(FriedmanResult {
        mean_ranks,
        statistic,
        p_value: chi_square_sf(statistic, k - 1),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Win,
    Equal,
    Loss,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Win => "win",
            Verdict::Equal => "equal",
            Verdict::Loss => "loss",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PMethod {
    Exact,
    Normal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonResult {
    /// Rank sum of the first sample.
    pub rank_sum: f64,
    pub p_value: f64,
    pub method: PMethod,
    pub verdict: Verdict,
}

/// Exact p is used below this smaller-sample size,
pub const EXACT_MAX_SMALLER: usize = 8;
/// provided the pooled size stays at or under this bound.
pub const EXACT_MAX_TOTAL: usize = 60;

fn pooled_ranks(a: &[f64], b: &[f64]) -> Vec<f64> {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    average_ranks(&pooled)
}

fn check_samples(a: &[f64], b: &[f64]) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Empty("rank-sum test needs two non-empty samples".into()));
    }
    if a.iter().chain(b).any(|v| v.is_nan()) {
        return Err(Error::numeric("rank-sum test received NaN"));
    }
    Ok(())
}

/// Two-sided exact rank-sum p-value, `min(1, 2·min(P(S ≤ s), P(S ≥ s)))`
/// where S is the rank sum of `a` over all equally likely splits of the
/// pooled (tie-averaged) ranks.
pub fn wilcoxon_exact_p(a: &[f64], b: &[f64]) -> Result<f64> {
    check_samples(a, b)?;
    let ranks = pooled_ranks(a, b);
    // Doubled ranks are integers even with ties.
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let observed: usize = doubled[..a.len()].iter().sum();
    let m = a.len();
    let max_sum: usize = doubled.iter().sum();
    // counts[c][s]: subsets of size c with doubled-rank sum s.
    let mut counts = vec![vec![0.0f64; max_sum + 1]; m + 1];
    counts[0][0] = 1.0;
    for (seen, &r) in doubled.iter().enumerate() {
        for c in (1..=m.min(seen + 1)).rev() {
            let (lo, hi) = counts.split_at_mut(c);
            let prev = &lo[c - 1];
            let cur = &mut hi[0];
            for s in (r..=max_sum).rev() {
                cur[s] += prev[s - r];
            }
        }
    }
    let dist = &counts[m];
    let total: f64 = dist.iter().sum();
    let below: f64 = dist[..=observed].iter().sum();
    let above: f64 = dist[observed..].iter().sum();
    Ok((2.0 * (below / total).min(above / total)).min(1.0))
}

/// Normal approximation with tie-corrected variance and continuity correction.
pub fn wilcoxon_normal_p(a: &[f64], b: &[f64]) -> Result<f64> {
    check_samples(a, b)?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let n = na + nb;
    let ranks = pooled_ranks(a, b);
    let r_a: f64 = ranks[..a.len()].iter().sum();
    let u = r_a - na * (na + 1.0) / 2.0;
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ties = tie_term(&pooled);
    let var = na * nb / 12.0 * ((n + 1.0) - ties / (n * (n - 1.0)));
    if !(var > 0.0) {
        return Ok(1.0);
    }
    let z = ((u - na * nb / 2.0).abs() - 0.5).max(0.0) / var.sqrt();
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    Ok((2.0 * normal.sf(z)).min(1.0))
}

/// Two-sided rank-sum test of candidate `a` against `b` for minimization.
pub fn wilcoxon_rank_sum(a: &[f64], b: &[f64], alpha: f64) -> Result<WilcoxonResult> {
    check_samples(a, b)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::config(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let ranks = pooled_ranks(a, b);
    let rank_sum: f64 = ranks[..a.len()].iter().sum();
    let exact = a.len().min(b.len()) < EXACT_MAX_SMALLER && a.len() + b.len() <= EXACT_MAX_TOTAL;
    let (p_value, method) = if exact {
        (wilcoxon_exact_p(a, b)?, PMethod::Exact)
    } else {
        (wilcoxon_normal_p(a, b)?, PMethod::Normal)
    };
    let verdict = if p_value >= alpha {
        Verdict::Equal
    } else {
        let (ma, mb) = (median(a), median(b));
        if ma < mb {
            Verdict::Win
        } else if ma > mb {
            Verdict::Loss
        } else {
            // Equal medians: fall back to the mean rank of each sample.
            let mean_a = rank_sum / a.len() as f64;
            let mean_b = ranks[a.len()..].iter().sum::<f64>() / b.len() as f64;
            if mean_a < mean_b {
                Verdict::Win
            } else if mean_a > mean_b {
                Verdict::Loss
            } else {
                Verdict::Equal
            }
        }
    };
    Ok(WilcoxonResult {
        rank_sum,
        p_value,
        method,
        verdict,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KruskalWallisResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// Kruskal–Wallis H with tie correction.
pub fn kruskal_wallis<G: AsRef<[f64]>>(groups: &[G]) -> Result<KruskalWallisResult> {
    if groups.len() < 2 || groups.iter().any(|g| g.as_ref().is_empty()) {
        return Err(Error::config("Kruskal–Wallis needs at least two non-empty groups"));
    }
    let pooled: Vec<f64> = groups.iter().flat_map(|g| g.as_ref().iter().copied()).collect();
    if pooled.iter().any(|v| v.is_nan()) {
        return Err(Error::numeric("Kruskal–Wallis received NaN"));
    }
    let ranks = average_ranks(&pooled);
    let n = pooled.len() as f64;
    let centre = (n + 1.0) / 2.0;
    let mut offset = 0;
    let mut spread = 0.0;
    for g in groups {
        let len = g.as_ref().len();
        let mean_rank = ranks[offset..offset + len].iter().sum::<f64>() / len as f64;
        spread += len as f64 * (mean_rank - centre).powi(2);
        offset += len;
    }
    let correction = 1.0 - tie_term(&pooled) / (n * n * n - n);
    let statistic = if correction <= 0.0 {
        0.0
    } else {
        12.0 / (n * (n + 1.0)) * spread / correction
    };
    Ok(KruskalWallisResult {
        statistic,
        p_value: chi_square_sf(statistic, groups.len() - 1),
    })
}

/// Kruskal–Wallis across all algorithms, one result per problem.
pub fn kruskal_wallis_per_problem(matrix: &ResultMatrix) -> Result<Vec<KruskalWallisResult>> {
    (0..matrix.problems.len())
        .map(|p| {
            let groups: Vec<&[f64]> = (0..matrix.algorithms.len()).map(|a| matrix.cell(a, p)).collect();
            kruskal_wallis(&groups)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WelCounts {
    pub opponent: String,
    pub win: usize,
    pub equal: usize,
    pub loss: usize,
}

/// Rank-sum verdicts of `candidate` against one opponent, tallied over problems.
pub fn wel_counts(matrix: &ResultMatrix, candidate: usize, opponent: usize, alpha: f64) -> Result<WelCounts> {
    let mut out = WelCounts {
        opponent: matrix.algorithms[opponent].clone(),
        win: 0,
        equal: 0,
        loss: 0,
    };
    for p in 0..matrix.problems.len() {
        match wilcoxon_rank_sum(matrix.cell(candidate, p), matrix.cell(opponent, p), alpha)?.verdict {
            Verdict::Win => out.win += 1,
            Verdict::Equal => out.equal += 1,
            Verdict::Loss => out.loss += 1,
        }
    }
    Ok(out)
}

/// One row per opponent of `candidate`, in matrix order.
pub fn wel_table(matrix: &ResultMatrix, candidate: &str, alpha: f64) -> Result<Vec<WelCounts>> {
    let c = matrix.algorithm_index(candidate)?;
    (0..matrix.algorithms.len())
        .filter(|&o| o != c)
        .map(|o| wel_counts(matrix, c, o, alpha))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn matrix(means: &[&[f64]]) -> ResultMatrix {
        // means[problem][algorithm], one run per cell
        let k = means[0].len();
        let cells = (0..k).map(|a| means.iter().map(|row| vec![row[a]]).collect()).collect();
        ResultMatrix::new(
            (0..k).map(|a| format!("A{a}")).collect(),
            (0..means.len()).map(|p| format!("P{p}")).collect(),
            cells,
        )
        .unwrap()
    }

    #[test]
    fn ranks_with_ties() {
        assert_eq!(average_ranks(&[3.0, 1.0, 2.0]), vec![3.0, 1.0, 2.0]);
        assert_eq!(average_ranks(&[5.0, 5.0, 1.0, 5.0]), vec![3.0, 3.0, 1.0, 3.0]);
    }

    #[test]
    fn mean_rank_examples() {
        assert_eq!(mean_rank_table(&matrix(&[&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]])).unwrap(), vec![2.0; 3]);
        assert_eq!(mean_rank_table(&matrix(&[&[1.0, 1.0], &[4.0, 4.0]])).unwrap(), vec![1.5; 2]);
        assert_eq!(mean_rank_table(&matrix(&[&[0.0, 1.0, 2.0], &[5.0, 6.0, 9.0]])).unwrap()[0], 1.0);
    }

    #[test]
    fn friedman_hand_case() {
        let row: &[f64] = &[1.0, 2.0, 3.0];
        let m = matrix(&[row; 4]);
        let f = friedman_test(&m).unwrap();
        assert_abs_diff_eq!(f.statistic, 8.0, epsilon = 1e-12);
        assert_abs_diff_eq!(f.p_value, (-4.0f64).exp(), epsilon = 1e-12);
    }

    #[test]
    fn friedman_degenerate() {
        let f = friedman_test(&matrix(&[&[1.0, 1.0, 1.0], &[2.0, 2.0, 2.0]])).unwrap();
        assert_eq!((f.statistic, f.p_value), (0.0, 1.0));
        assert!(friedman_test(&matrix(&[&[1.0, 2.0]])).is_err());
    }

    #[test]
    fn friedman_with_ties_matches_rank_formula() {
        // Tie-corrected form equals the general "ranks" expression
        // (k−1)·Σ(Rⱼ − n(k+1)/2)² / (Σr² − nk(k+1)²/4).
        let rows: [&[f64]; 3] = [&[1.0, 1.0, 3.0], &[2.0, 1.0, 3.0], &[1.0, 2.0, 2.0]];
        let m = matrix(&rows);
        let f = friedman_test(&m).unwrap();
        let ranks = problem_ranks(&m);
        let (n, k) = (3.0, 3.0);
        let totals: Vec<f64> = (0..3).map(|a| ranks.iter().map(|r| r[a]).sum()).collect();
        let num: f64 = totals.iter().map(|t| (t - n * (k + 1.0) / 2.0).powi(2)).sum::<f64>() * (k - 1.0);
        let sq: f64 = ranks.iter().flatten().map(|r| r * r).sum();
        let expected = num / (sq - n * k * (k + 1.0f64).powi(2) / 4.0);
        assert_abs_diff_eq!(f.statistic, expected, epsilon = 1e-12);
    }

    #[test]
    fn wilcoxon_examples() {
        let r = wilcoxon_rank_sum(&[1.0, 2.0, 3.0], &[10.0, 11.0, 12.0], 0.05).unwrap();
        assert_eq!(r.method, PMethod::Exact);
        assert_abs_diff_eq!(r.p_value, 0.1, epsilon = 1e-15);
        assert_eq!(r.verdict, Verdict::Equal);

        let a: Vec<f64> = (1..=10).map(f64::from).collect();
        let b: Vec<f64> = (11..=20).map(f64::from).collect();
        let r = wilcoxon_rank_sum(&a, &b, 0.05).unwrap();
        assert!(r.p_value < 1e-3);
        assert_eq!(r.verdict, Verdict::Win);
        assert!(wilcoxon_exact_p(&a, &b).unwrap() < 1e-3);
        assert_eq!(wilcoxon_rank_sum(&b, &a, 0.05).unwrap().verdict, Verdict::Loss);

        let same = wilcoxon_rank_sum(&a, &a, 0.05).unwrap();
        assert_eq!(same.verdict, Verdict::Equal);
        let flat = wilcoxon_rank_sum(&[2.0; 9], &[2.0; 9], 0.05).unwrap();
        assert_eq!((flat.p_value, flat.verdict), (1.0, Verdict::Equal));
        assert_eq!(wilcoxon_exact_p(&[2.0; 3], &[2.0; 4]).unwrap(), 1.0);
        assert!(wilcoxon_rank_sum(&[], &[1.0], 0.05).is_err());
    }

    #[test]
    fn exact_and_normal_agree_at_boundary() {
        let a = [0.1, 0.5, 0.9, 1.3, 2.0, 2.2, 3.1, 4.0];
        let b = [0.7, 1.8, 2.5, 3.3, 3.9, 4.4, 5.0, 6.1];
        let d = (wilcoxon_exact_p(&a, &b).unwrap() - wilcoxon_normal_p(&a, &b).unwrap()).abs();
        assert!(d <= 0.02, "{d}");
    }

    #[test]
    fn kruskal_examples() {
        let r = kruskal_wallis(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap();
        assert_abs_diff_eq!(r.statistic, 27.0 / 7.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.p_value, 0.0495, epsilon = 1e-4);
        let same = kruskal_wallis(&[vec![1.0, 2.0], vec![1.0, 2.0]]).unwrap();
        assert_eq!((same.statistic, same.p_value), (0.0, 1.0));
        assert!(kruskal_wallis(&[vec![1.0]]).is_err());
    }

    #[test]
    fn wel_examples() {
        let cells = vec![
            vec![vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]; 3],
            vec![vec![11.0, 12.0, 13.0, 14.0, 15.0, 16.0, 17.0, 18.0]; 3],
        ];
        let m = ResultMatrix::new(
            vec!["good".into(), "bad".into()],
            vec!["p1".into(), "p2".into(), "p3".into()],
            cells,
        )
        .unwrap();
        let t = wel_table(&m, "good", 0.05).unwrap();
        assert_eq!(t, vec![WelCounts { opponent: "bad".into(), win: 3, equal: 0, loss: 0 }]);
        let own = wel_counts(&m, 0, 0, 0.05).unwrap();
        assert_eq!((own.win, own.equal, own.loss), (0, 3, 0));
        assert!(wel_table(&m, "missing", 0.05).is_err());
    }

    #[test]
    fn missing_cells_are_named() {
        let mut cells = BTreeMap::new();
        cells.insert(("A".to_string(), "p1".to_string()), vec![1.0]);
        let err = ResultMatrix::from_cells(vec!["A".into(), "B".into()], vec!["p1".into()], cells).unwrap_err();
        assert!(err.to_string().contains("(B, p1)"), "{err}");
    }

    #[test]
    fn unequal_runs_rejected() {
        let r = ResultMatrix::new(vec!["a".into(), "b".into()], vec!["p".into()], vec![vec![vec![1.0]], vec![vec![1.0, 2.0]]]);
        assert!(r.is_err());
    }

    #[test]
    fn summary_values() {
        let s = summarize(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!((s.best, s.mean, s.std), (1.0, 2.0, 1.0));
    }

    proptest! {
        #[test]
        fn rank_sum_identity(values in proptest::collection::vec(0i32..6, 1..30)) {
            let v: Vec<f64> = values.iter().map(|&x| f64::from(x)).collect();
            let n = v.len() as f64;
            prop_assert!((average_ranks(&v).iter().sum::<f64>() - n * (n + 1.0) / 2.0).abs() < 1e-9);
        }

        #[test]
        fn tests_invariant_under_monotone_maps(
            a in proptest::collection::vec(0.1f64..10.0, 2..12),
            b in proptest::collection::vec(0.1f64..10.0, 2..12),
        ) {
            let w = wilcoxon_rank_sum(&a, &b, 0.05).unwrap();
            for f in [|x: f64| 2.0 * x + 7.0, |x: f64| x * x * x] {
                let fa: Vec<f64> = a.iter().map(|&x| f(x)).collect();
                let fb: Vec<f64> = b.iter().map(|&x| f(x)).collect();
                let wf = wilcoxon_rank_sum(&fa, &fb, 0.05).unwrap();
                prop_assert_eq!(w.p_value, wf.p_value);
                prop_assert_eq!(w.verdict, wf.verdict);
                let k = kruskal_wallis(&[&a[..], &b[..]]).unwrap();
                let kf = kruskal_wallis(&[&fa[..], &fb[..]]).unwrap();
                prop_assert_eq!(k, kf);
            }
        }

        #[test]
        fn friedman_invariant_and_bounded(
            raw in proptest::collection::vec(proptest::collection::vec(0.1f64..10.0, 4), 2..8),
        ) {
            let rows: Vec<&[f64]> = raw.iter().map(|r| &r[..]).collect();
            let m = matrix(&rows);
            let f = friedman_test(&m).unwrap();
            prop_assert!((0.0..=1.0).contains(&f.p_value));
            prop_assert!(f.statistic >= 0.0);
            let g = friedman_test(&m.map(|x| x * x * x)).unwrap();
            prop_assert_eq!(f.mean_ranks, g.mean_ranks);
            prop_assert!((f.statistic - g.statistic).abs() < 1e-12);
        }

        #[test]
        fn p_values_in_unit_interval(
            a in proptest::collection::vec(0i32..5, 1..15),
            b in proptest::collection::vec(0i32..5, 1..15),
        ) {
            let a: Vec<f64> = a.iter().map(|&x| f64::from(x)).collect();
            let b: Vec<f64> = b.iter().map(|&x| f64::from(x)).collect();
            for p in [wilcoxon_exact_p(&a, &b).unwrap(), wilcoxon_normal_p(&a, &b).unwrap()] {
                prop_assert!((0.0..=1.0).contains(&p));
            }
        }
    }
}
