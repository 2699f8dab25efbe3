//! Campaign configuration, stored as TOML.
//!
//! ```toml
//! schema_version = 1
//! suite = "cec2017"
//! functions = [1, 3, 5]      # omit for the whole suite
//! dims = [10, 30]
//! variants = ["RIME", "MRIME-CD"]
//! runs = 21
//! np = 30
//! fes_multiplier = 3000.0    # evaluations = multiplier × dim
//! seed = 2024
//! output_dir = "results/cec2017"
//! stats_alpha = 0.05
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use mrime_core::suite::Suite;
use mrime_core::Variant;
use serde::{Deserialize, Serialize};

use crate::error::{io_err, HarnessError, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub schema_version: u32,
    pub suite: Suite,
    /// Function ids; empty means every function of the suite.
    #[serde(default)]
    pub functions: Vec<usize>,
    pub dims: Vec<usize>,
    pub variants: Vec<Variant>,
    pub runs: usize,
    #[serde(default = "default_np")]
    pub np: usize,
    pub fes_multiplier: f64,
    pub seed: u64,
    /// Seed for instance generation (shifts, rotations); defaults to 0 so
    /// changing `seed` reruns the same problems.
    #[serde(default)]
    pub instance_seed: u64,
    pub output_dir: PathBuf,
    #[serde(default = "default_alpha")]
    pub stats_alpha: f64,
    /// Algorithm the w/e/l table is computed for; defaults to the last variant.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidate: Option<Variant>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

fn default_np() -> usize {
    30
}

fn default_alpha() -> f64 {
    0.05
}

impl CampaignConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(HarnessError::Config(m));
        if self.schema_version != SCHEMA_VERSION {
            return fail(format!(
                "schema_version {} unsupported (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        if self.runs < 1 {
            return fail("runs must be at least 1".into());
        }
        if self.dims.is_empty() || self.dims.contains(&0) {
            return fail("dims must be a non-empty list of positive dimensions".into());
        }
        if self.variants.is_empty() {
            return fail("at least one variant is required".into());
        }
        if has_duplicates(&self.variants) || has_duplicates(&self.dims) || has_duplicates(&self.functions) {
            return fail("variants, dims and functions must not repeat".into());
        }
        if self.np < 2 {
            return fail("np must be at least 2".into());
        }
        if !(self.fes_multiplier > 0.0 && self.fes_multiplier.is_finite()) {
            return fail("fes_multiplier must be positive".into());
        }
        if !(self.stats_alpha > 0.0 && self.stats_alpha < 1.0) {
            return fail("stats_alpha must lie in (0, 1)".into());
        }
        if self.workers == Some(0) {
            return fail("workers must be at least 1".into());
        }
        for &id in &self.functions {
            self.suite.function_name(id).map_err(|e| HarnessError::Config(e.to_string()))?;
        }
        for &dim in &self.dims {
            if self.fes_max(dim) < self.np {
                return fail(format!("budget for D={dim} is smaller than one population"));
            }
        }
        if let Some(c) = self.candidate {
            if !self.variants.contains(&c) {
                return fail(format!("candidate {c} is not among the variants"));
            }
        }
        Ok(())
    }

    pub fn function_ids(&self) -> Vec<usize> {
        if self.functions.is_empty() {
            self.suite.function_ids().collect()
        } else {
            self.functions.clone()
        }
    }

    pub fn fes_max(&self, dim: usize) -> usize {
        (self.fes_multiplier * dim as f64).round() as usize
    }

    pub fn candidate(&self) -> Variant {
        self.candidate.unwrap_or(*self.variants.last().expect("validated non-empty"))
    }
}

fn has_duplicates<T: PartialEq>(items: &[T]) -> bool {
    items.iter().enumerate().any(|(i, a)| items[..i].contains(a))
}
