//! Weighted Gaussian model fitting and sampling.
//!
//! Dense `nalgebra` matrices throughout; dimensions stay at or below a few
//! hundred. Standard normals come from `rand_distr::StandardNormal`
//! (ziggurat), which is fixed for reproducibility.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How dominant-group weights are derived from rank.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightMode {
    /// `ω_i ∝ ln(s+1) − ln i`, normalized to sum 1.
    #[default]
    Corrected,
    /// `ω_i = ln(s+1) / Σ_k (ln(s+1) − ln k)` for every rank: equal weights
    /// that generally do not sum to one. Kept for sensitivity checks.
    Verbatim,
}

/// Rank-decaying log weights for `s` members, best first.
pub fn rank_weights(s: usize) -> Result<Vec<f64>> {
    weights(s, WeightMode::Corrected)
}

pub fn weights(s: usize, mode: WeightMode) -> Result<Vec<f64>> {
    if s == 0 {
        return Err(Error::config("weights need at least one member"));
    }
    let top = ((s + 1) as f64).ln();
    let raw: Vec<f64> = (1..=s).map(|i| top - (i as f64).ln()).collect();
    let total: f64 = raw.iter().sum();
    Ok(match mode {
        WeightMode::Corrected => raw.into_iter().map(|r| r / total).collect(),
        WeightMode::Verbatim => vec![top / total; s],
    })
}

/// `Σ ω_i · x_i` over members.
pub fn weighted_mean(members: &[&[f64]], weights: &[f64]) -> Result<Vec<f64>> {
    if members.len() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: members.len(),
            actual: weights.len(),
        });
    }
    let first = members.first().ok_or_else(|| Error::Empty("weighted mean of no members".into()))?;
    let dim = first.len();
    let mut mean = vec![0.0; dim];
    for (x, w) in members.iter().zip(weights) {
        if x.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: x.len(),
            });
        }
        for (m, v) in mean.iter_mut().zip(x.iter()) {
            *m += w * v;
        }
    }
    Ok(mean)
}

/// `(1/|S|) Σ (x_i − mean)(x_i − mean)ᵀ`, deviations about the given mean.
pub fn scatter_covariance(members: &[&[f64]], mean: &[f64]) -> Result<DMatrix<f64>> {
    if members.is_empty() {
        return Err(Error::Empty("covariance of no members".into()));
    }
    let dim = mean.len();
    let mut cov = DMatrix::<f64>::zeros(dim, dim);
    let mut dev = DVector::<f64>::zeros(dim);
    for x in members {
        if x.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: x.len(),
            });
        }
        for j in 0..dim {
            dev[j] = x[j] - mean[j];
        }
        cov.ger(1.0, &dev, &dev, 1.0);
    }
    cov /= members.len() as f64;
    // Exact symmetry regardless of accumulation order.
    for i in 0..dim {
        for j in 0..i {
            let v = 0.5 * (cov[(i, j)] + cov[(j, i)]);
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }
    Ok(cov)
}

const JITTER_START: f64 = 1e-10;
const JITTER_GROWTH: f64 = 10.0;
const JITTER_RETRIES: usize = 8;

/// Lower Cholesky factor of `cov + jitter·I`.
///
/// Tries `jitter = 0` first, then `1e−10·trace/dim` (or `1e−10` for a zero
/// trace) growing tenfold for up to 8 retries.
pub fn cholesky_jittered(cov: &DMatrix<f64>) -> Result<(DMatrix<f64>, f64)> {
    let dim = cov.nrows();
    if dim == 0 || cov.ncols() != dim {
        return Err(Error::numeric(format!(
            "covariance must be square and non-empty, got {}x{}",
            cov.nrows(),
            cov.ncols()
        )));
    }
    if cov.iter().any(|v| !v.is_finite()) {
        return Err(Error::numeric("covariance has non-finite entries"));
    }
    if let Some(l) = try_cholesky(cov, 0.0) {
        return Ok((l, 0.0));
    }
    let trace = cov.trace();
    let mut jitter = if trace > 0.0 {
        JITTER_START * trace / dim as f64
    } else {
        JITTER_START
    };
    for _ in 0..JITTER_RETRIES {
        if let Some(l) = try_cholesky(cov, jitter) {
            return Ok((l, jitter));
        }
        jitter *= JITTER_GROWTH;
    }
    Err(Error::numeric(format!(
        "covariance not positive definite after {JITTER_RETRIES} jitter retries"
    )))
}

fn try_cholesky(cov: &DMatrix<f64>, jitter: f64) -> Option<DMatrix<f64>> {
    let mut m = cov.clone();
    for i in 0..m.nrows() {
        m[(i, i)] += jitter;
    }
    let chol = nalgebra::Cholesky::new(m)?;
    let l = chol.unpack();
    // nalgebra only rejects non-positive pivots; also reject underflowed ones.
    if l.diagonal().iter().all(|d| d.is_finite() && *d > 0.0) {
        Some(l)
    } else {
        None
    }
}

/// Gaussian with cached factorization.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianModel {
    mean: Vec<f64>,
    cov: DMatrix<f64>,
    chol: DMatrix<f64>,
    jitter: f64,
}

impl GaussianModel {
    pub fn new(mean: Vec<f64>, cov: DMatrix<f64>) -> Result<Self> {
        if cov.nrows() != mean.len() {
            return Err(Error::DimensionMismatch {
                expected: mean.len(),
                actual: cov.nrows(),
            });
        }
        let (chol, jitter) = cholesky_jittered(&cov)?;
        Ok(Self {
            mean,
            cov,
            chol,
            jitter,
        })
    }

    /// Fit from members sorted best-first.
    pub fn fit(members: &[&[f64]], mode: WeightMode) -> Result<Self> {
        let w = weights(members.len(), mode)?;
        let mean = weighted_mean(members, &w)?;
        let cov = scatter_covariance(members, &mean)?;
        Self::new(mean, cov)
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn chol(&self) -> &DMatrix<f64> {
        &self.chol
    }

    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    /// `mean + L·z` with `z ~ N(0, I)`; draws `dim` standard normals.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let z = DVector::<f64>::from_iterator(self.dim(), (0..self.dim()).map(|_| rng.sample(StandardNormal)));
        let lz = &self.chol * z;
        self.mean.iter().zip(lz.iter()).map(|(m, d)| m + d).collect()
    }
}

pub fn mvn_sample<R: Rng + ?Sized>(model: &GaussianModel, rng: &mut R) -> Vec<f64> {
    model.sample(rng)
}
