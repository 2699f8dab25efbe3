//! MRIME-CD: RIME with Gaussian covariance learning (GCLS), average
//! bootstrapping (ABS) and a stagnation-triggered diversity restart (SPDM).
//!
//! Each strategy can be switched off independently; with all three off the
//! optimizer is draw-for-draw identical to [`crate::rime::run_rime`].
//!
//! Draw order within generation `g` (sub-stream `g + 1`):
//!
//! 1. if any strategy is on: one roulette draw for the dominant-group anchor;
//! 2. per agent: `r₁` (only when GCLS or ABS is on), then either the
//!    covariance-learning proposal (`dim` normals + 1 uniform) or the
//!    soft-rime proposal;
//! 3. per agent, per dimension: the puncture draw;
//! 4. after greedy selection, for each stagnant agent in index order: two
//!    partner indices, `dim` normals, `u₁`, `u₂`.

mod archive;
mod strategies;

pub use archive::{ArchiveEntry, DominantArchive};
pub use strategies::{
    abs_update, diversity_nvol, draw_phase, exploration_switch, gcls_combine, gcls_position, nearest_group,
    pick_partners, roulette_anchor, select_dominant_group, spdm_combine, spdm_position, Branch, Phase,
};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::linalg::WeightMode;
use crate::objective::{evaluate, Objective};
use crate::population::{initialize_population, Agent, Population};
use crate::record::RunRecord;
use crate::rime::{
    coeff_e, finish, greedy_accept, greedy_select, hard_rime_puncture, offspring_from, point, soft_rime_agent,
    RimeParams,
};
use crate::rng::RngStream;
use crate::space::SearchSpace;

/// Default archive size in multiples of the population size. With only `np`
/// entries the archive spans two generations, the fitted covariance shrinks
/// faster than the mean moves and sampling stalls far from the optimum; a
/// longer memory keeps the step direction of recent progress in the model.
pub const ARCHIVE_FACTOR: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MrimeParams {
    pub rime: RimeParams,
    pub archive_capacity: usize,
    pub group_size: usize,
    /// Diversity below which an agent may be restarted.
    pub nvol_threshold: f64,
    /// Restart once the failure counter exceeds `count_factor × dim`.
    pub count_factor: f64,
    pub weight_mode: WeightMode,
}

impl MrimeParams {
    /// Defaults: archive holds `ARCHIVE_FACTOR × np` entries, groups of
    /// `⌈np/2⌉`, threshold 0.01, counter factor 2, corrected log-rank weights.
    pub fn new(np: usize, fes_max: usize) -> Self {
        Self {
            rime: RimeParams::new(np, fes_max),
            archive_capacity: ARCHIVE_FACTOR * np,
            group_size: np.div_ceil(2),
            nvol_threshold: 0.01,
            count_factor: 2.0,
            weight_mode: WeightMode::Corrected,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.rime.validate()?;
        if self.group_size < 1 || self.group_size > self.rime.np {
            return Err(Error::config(format!(
                "group size {} must be in 1..={}",
                self.group_size, self.rime.np
            )));
        }
        if self.archive_capacity < 1 {
            return Err(Error::config("archive capacity must be positive"));
        }
        if !(self.nvol_threshold > 0.0) {
            return Err(Error::config("nvol threshold must be positive"));
        }
        if !(self.count_factor >= 0.0) {
            return Err(Error::config("count factor must be non-negative"));
        }
        Ok(())
    }

    pub fn is_stagnant(&self, nvol: f64, count: usize, dim: usize) -> bool {
        nvol < self.nvol_threshold && count as f64 > self.count_factor * dim as f64
    }
}

/// `true` iff the population has collapsed and `agent` has failed often
/// enough to be restarted.
pub fn stagnation_triggered(params: &MrimeParams, space: &SearchSpace, population: &Population, agent: &Agent) -> bool {
    params.is_stagnant(diversity_nvol(space, population), agent.count(), space.dim())
}

/// Which of the three strategies are active.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StrategyFlags {
    pub gcls: bool,
    pub abs: bool,
    pub spdm: bool,
}

impl StrategyFlags {
    pub const NONE: Self = Self::new(false, false, false);
    pub const ALL: Self = Self::new(true, true, true);

    pub const fn new(gcls: bool, abs: bool, spdm: bool) -> Self {
        Self { gcls, abs, spdm }
    }

    fn needs_model(&self) -> bool {
        self.gcls || self.abs || self.spdm
    }

    fn needs_phase(&self) -> bool {
        self.gcls || self.abs
    }
}

/// The ablation ladder: basic RIME, the six partial variants and MRIME-CD.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "RIME")]
    Rime,
    #[serde(rename = "RIME-G")]
    RimeG,
    #[serde(rename = "RIME-A")]
    RimeA,
    #[serde(rename = "RIME-S")]
    RimeS,
    #[serde(rename = "RIME-GA")]
    RimeGa,
    #[serde(rename = "RIME-GS")]
    RimeGs,
    #[serde(rename = "RIME-AS")]
    RimeAs,
    #[serde(rename = "MRIME-CD")]
    MrimeCd,
}

impl Variant {
    pub const ALL: [Variant; 8] = [
        Variant::Rime,
        Variant::RimeG,
        Variant::RimeA,
        Variant::RimeS,
        Variant::RimeGa,
        Variant::RimeGs,
        Variant::RimeAs,
        Variant::MrimeCd,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Variant::Rime => "RIME",
            Variant::RimeG => "RIME-G",
            Variant::RimeA => "RIME-A",
            Variant::RimeS => "RIME-S",
            Variant::RimeGa => "RIME-GA",
            Variant::RimeGs => "RIME-GS",
            Variant::RimeAs => "RIME-AS",
            Variant::MrimeCd => "MRIME-CD",
        }
    }

    pub fn flags(&self) -> StrategyFlags {
        let (g, a, s) = match self {
            Variant::Rime => (false, false, false),
            Variant::RimeG => (true, false, false),
            Variant::RimeA => (false, true, false),
            Variant::RimeS => (false, false, true),
            Variant::RimeGa => (true, true, false),
            Variant::RimeGs => (true, false, true),
            Variant::RimeAs => (false, true, true),
            Variant::MrimeCd => (true, true, true),
        };
        StrategyFlags::new(g, a, s)
    }

    pub fn from_flags(flags: StrategyFlags) -> Self {
        Self::ALL
            .into_iter()
            .find(|v| v.flags() == flags)
            .expect("every flag combination names a variant")
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|v| v.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::config(format!("unknown variant '{s}'")))
    }
}

/// A configured optimizer ready to run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimizer {
    pub flags: StrategyFlags,
    pub params: MrimeParams,
}

impl Optimizer {
    pub fn variant(&self) -> Variant {
        Variant::from_flags(self.flags)
    }

    pub fn run<O: Objective + ?Sized>(&self, objective: &O, space: &SearchSpace, seed: u64) -> Result<RunRecord> {
        run_mrime_cd(objective, space, &self.params, self.flags, seed)
    }
}

/// Disabled strategies fall back to the basic RIME mechanisms.
pub fn make_variant(flags: StrategyFlags, params: MrimeParams) -> Optimizer {
    Optimizer { flags, params }
}

/// Run MRIME-CD (or one of its ablations) until the next batch no longer
/// fits in the budget.
pub fn run_mrime_cd<O: Objective + ?Sized>(
    objective: &O,
    space: &SearchSpace,
    params: &MrimeParams,
    flags: StrategyFlags,
    seed: u64,
) -> Result<RunRecord> {
    params.validate()?;
    let np = params.rime.np;
    let dim = space.dim();
    let streams = RngStream::new(seed);
    let mut budget = Budget::new(params.rime.fes_max)?;

    let mut pop = initialize_population(space, np, &mut streams.init())?;
    evaluate(objective, &mut pop, &mut budget)?;
    let mut history = vec![point(&pop, &budget)];

    let mut archive = DominantArchive::new(params.archive_capacity)?;
    if flags.needs_model() {
        archive.update(
            pop.ranked_indices()
                .into_iter()
                .take(params.group_size)
                .map(|i| entry(&pop, i)),
        );
    }

    let mut nvol_history = Vec::new();
    let mut spdm_triggers = 0;
    let mut spdm_skipped = 0;
    let mut generation = 0u64;
    let mut exhausted = false;

    while !exhausted && budget.remaining() >= np {
        let mut rng = streams.generation(generation);

        let model = if flags.needs_model() {
            let group = select_dominant_group(&pop, params.group_size, &mut rng)?;
            archive.update(group.into_iter().map(|i| entry(&pop, i)));
            Some(archive.fit_model(params.weight_mode)?)
        } else {
            None
        };

        let e = coeff_e(&budget);
        let best = pop.best().position().to_vec();
        let mut phases = Vec::with_capacity(np);
        let mut proposed = Vec::with_capacity(np);
        for agent in pop.agents() {
            let phase = if flags.needs_phase() {
                draw_phase(e, &mut rng)
            } else {
                Phase::Late
            };
            let p = match (&model, flags.gcls, phase) {
                (Some(m), true, Phase::Early) => gcls_position(agent.position(), m, space, &mut rng),
                _ => soft_rime_agent(agent.position(), &best, space, &budget, params.rime.w, &mut rng),
            };
            phases.push(phase);
            proposed.push(p);
        }

        match (&model, flags.abs) {
            (Some(m), true) => abs_update(&pop, &mut proposed, m.mean(), &phases, &mut rng)?,
            _ => hard_rime_puncture(&pop, &mut proposed, &mut rng)?,
        }

        let mut offspring = offspring_from(proposed)?;
        evaluate(objective, &mut offspring, &mut budget)?;
        greedy_select(&mut pop, offspring)?;

        if let (Some(m), true) = (&model, flags.spdm) {
            let nvol = diversity_nvol(space, &pop);
            nvol_history.push(nvol);
            for i in 0..np {
                if !params.is_stagnant(nvol, pop.agents()[i].count(), dim) {
                    continue;
                }
                let Some(candidate) = spdm_position(i, m, &pop, space, &mut rng) else {
                    spdm_skipped += 1;
                    continue;
                };
                if budget.try_consume(1).is_err() {
                    exhausted = true;
                    break;
                }
                spdm_triggers += 1;
                let f = objective.evaluate(&candidate);
                greedy_accept(&mut pop, i, candidate, f);
            }
            pop.refresh_best();
        }

        history.push(point(&pop, &budget));
        generation += 1;
    }

    Ok(finish(
        seed,
        &pop,
        &budget,
        history,
        nvol_history,
        generation as usize,
        spdm_triggers,
        spdm_skipped,
    ))
}

fn entry(pop: &Population, i: usize) -> ArchiveEntry {
    let a = &pop.agents()[i];
    ArchiveEntry {
        position: a.position().to_vec(),
        fitness: a.fitness_or_inf(),
    }
}
