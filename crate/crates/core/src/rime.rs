//! Basic RIME: soft-rime search, hard-rime puncture, positive greedy selection.
//!
//! Per generation the draws happen in this order, agent-major:
//!
//! 1. soft-rime: `α` (one draw), then for every dimension a gate draw `r₁` and,
//!    when `r₁ < E`, one more draw for the position inside the box;
//! 2. puncture: one draw per dimension;
//!
//! followed by a batch evaluation and greedy selection.

use std::f64::consts::PI;

use rand::Rng;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::objective::{evaluate, Objective};
use crate::population::{initialize_population, Agent, Population};
use crate::record::{ConvergencePoint, RunRecord};
use crate::rng::{unit, RngStream};
use crate::space::SearchSpace;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RimeParams {
    /// Number of plateaus of `β`.
    pub w: u32,
    pub np: usize,
    pub fes_max: usize,
}

impl RimeParams {
    pub fn new(np: usize, fes_max: usize) -> Self {
        Self { w: 5, np, fes_max }
    }

    pub fn validate(&self) -> Result<()> {
        if self.w < 1 {
            return Err(Error::config("w must be at least 1"));
        }
        if self.np < 2 {
            return Err(Error::config("population size must be at least 2"));
        }
        if self.fes_max < self.np {
            return Err(Error::config(format!(
                "budget {} cannot cover the initial population of {}",
                self.fes_max, self.np
            )));
        }
        Ok(())
    }
}

/// `E = √(FEs / FEs_max)`.
pub fn coeff_e(budget: &Budget) -> f64 {
    budget.progress().sqrt()
}

/// `θ = FEs·π / (10·FEs_max)`, in `[0, π/10]`.
pub fn coeff_theta(budget: &Budget) -> f64 {
    budget.used() as f64 * PI / (10.0 * budget.max() as f64)
}

/// `β = 1 − round(w·FEs / FEs_max) / w`, rounding half away from zero.
pub fn coeff_beta(budget: &Budget, w: u32) -> f64 {
    let w = f64::from(w);
    let steps = (w * budget.used() as f64 / budget.max() as f64).round();
    1.0 - steps / w
}

/// One coordinate of a soft-rime move before clamping.
#[inline]
pub fn soft_rime_value(best_j: f64, alpha: f64, theta: f64, beta: f64, r: f64, lo: f64, hi: f64) -> f64 {
    best_j + alpha * theta.cos() * beta * (r * (hi - lo) + lo)
}

/// Soft-rime proposal for a single agent.
///
/// `α` is uniform in `(−1, 1)`; every dimension is gated by its own `r₁ < E`.
/// Ungated dimensions keep the agent's current coordinate.
pub fn soft_rime_agent<R: Rng + ?Sized>(
    position: &[f64],
    best: &[f64],
    space: &SearchSpace,
    budget: &Budget,
    w: u32,
    rng: &mut R,
) -> Vec<f64> {
    let e = coeff_e(budget);
    let theta = coeff_theta(budget);
    let beta = coeff_beta(budget, w);
    let alpha = 2.0 * unit(rng) - 1.0;
    let mut out = position.to_vec();
    for (j, x) in out.iter_mut().enumerate() {
        if unit(rng) < e {
            let r = unit(rng);
            *x = soft_rime_value(best[j], alpha, theta, beta, r, space.lower()[j], space.upper()[j]);
        }
    }
    space.clamp(&mut out);
    out
}

pub fn soft_rime_step<R: Rng + ?Sized>(
    population: &Population,
    space: &SearchSpace,
    budget: &Budget,
    w: u32,
    rng: &mut R,
) -> Vec<Vec<f64>> {
    let best = population.best().position();
    population
        .agents()
        .iter()
        .map(|a| soft_rime_agent(a.position(), best, space, budget, w, rng))
        .collect()
}

/// Min-max normalized fitness; an all-equal population maps to 0.5.
pub fn normalize_fitness(population: &Population) -> Result<Vec<f64>> {
    let fit = population.fitness_values()?;
    normalize_values(&fit)
}

pub(crate) fn normalize_values(fit: &[f64]) -> Result<Vec<f64>> {
    if let Some(bad) = fit.iter().find(|f| !f.is_finite()) {
        return Err(Error::numeric(format!("cannot normalize non-finite fitness {bad}")));
    }
    let min = fit.iter().copied().fold(f64::INFINITY, f64::min);
    let max = fit.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = max - min;
    if span == 0.0 {
        return Ok(vec![0.5; fit.len()]);
    }
    if !span.is_finite() {
        return Err(Error::numeric("fitness range overflows"));
    }
    Ok(fit.iter().map(|f| (f - min) / span).collect())
}

/// Overwrite each coordinate of `proposed` with `target` when a fresh draw
/// falls below `rate`. One draw per dimension.
pub fn puncture_agent<R: Rng + ?Sized>(proposed: &mut [f64], target: &[f64], rate: f64, rng: &mut R) {
    for (x, t) in proposed.iter_mut().zip(target) {
        if unit(rng) < rate {
            *x = *t;
        }
    }
}

/// Hard-rime puncture: coordinates of worse agents are copied from the best
/// agent with probability equal to their normalized fitness.
pub fn hard_rime_puncture<R: Rng + ?Sized>(
    population: &Population,
    proposed: &mut [Vec<f64>],
    rng: &mut R,
) -> Result<()> {
    let rates = normalize_fitness(population)?;
    let best = population.best().position();
    for (p, rate) in proposed.iter_mut().zip(rates) {
        puncture_agent(p, best, rate, rng);
    }
    Ok(())
}

/// Positive greedy step for one agent: keep the candidate only when it is
/// strictly better. On acceptance the stagnation counter resets, otherwise
/// it grows by one. Returns whether the candidate was kept.
pub(crate) fn greedy_accept(parents: &mut Population, i: usize, position: Vec<f64>, fitness: f64) -> bool {
    let parent = &parents.agents()[i];
    if fitness < parent.fitness_or_inf() {
        parents.replace(i, position, fitness);
        parents.agent_mut(i).set_count(0);
        true
    } else {
        let c = parent.count();
        parents.agent_mut(i).set_count(c + 1);
        false
    }
}

/// Elementwise greedy selection; returns how many offspring were kept.
pub fn greedy_select(parents: &mut Population, offspring: Population) -> Result<usize> {
    if parents.len() != offspring.len() {
        return Err(Error::DimensionMismatch {
            expected: parents.len(),
            actual: offspring.len(),
        });
    }
    let fitness = offspring.fitness_values()?;
    let mut kept = 0;
    for (i, (child, f)) in offspring.agents().iter().zip(fitness).enumerate() {
        if greedy_accept(parents, i, child.position().to_vec(), f) {
            kept += 1;
        }
    }
    parents.refresh_best();
    Ok(kept)
}

pub(crate) fn offspring_from(proposed: Vec<Vec<f64>>) -> Result<Population> {
    Population::new(proposed.into_iter().map(Agent::new).collect())
}

/// Run basic RIME until the next generation no longer fits in the budget.
pub fn run_rime<O: Objective + ?Sized>(
    objective: &O,
    space: &SearchSpace,
    params: &RimeParams,
    seed: u64,
) -> Result<RunRecord> {
    params.validate()?;
    let streams = RngStream::new(seed);
    let mut budget = Budget::new(params.fes_max)?;

    let mut pop = initialize_population(space, params.np, &mut streams.init())?;
    evaluate(objective, &mut pop, &mut budget)?;
    let mut history = vec![point(&pop, &budget)];

    let mut generation = 0u64;
    while budget.remaining() >= params.np {
        let mut rng = streams.generation(generation);
        let mut proposed = soft_rime_step(&pop, space, &budget, params.w, &mut rng);
        hard_rime_puncture(&pop, &mut proposed, &mut rng)?;
        let mut offspring = offspring_from(proposed)?;
        evaluate(objective, &mut offspring, &mut budget)?;
        greedy_select(&mut pop, offspring)?;
        history.push(point(&pop, &budget));
        generation += 1;
    }

    Ok(finish(seed, &pop, &budget, history, Vec::new(), generation as usize, 0, 0))
}

pub(crate) fn point(pop: &Population, budget: &Budget) -> ConvergencePoint {
    ConvergencePoint {
        evals: budget.used(),
        best_fitness: pop.best().fitness_or_inf(),
    }
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn finish(
    seed: u64,
    pop: &Population,
    budget: &Budget,
    history: Vec<ConvergencePoint>,
    nvol_history: Vec<f64>,
    generations: usize,
    spdm_triggers: usize,
    spdm_skipped: usize,
) -> RunRecord {
    let best = pop.best();
    RunRecord {
        seed,
        history,
        nvol_history,
        final_best: best.fitness_or_inf(),
        final_position: best.position().to_vec(),
        evaluations: budget.used(),
        generations,
        spdm_triggers,
        spdm_skipped,
    }
}
