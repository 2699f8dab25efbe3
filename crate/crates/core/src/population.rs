use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::unit;
use crate::space::SearchSpace;

/// One candidate solution.
#[derive(Debug, Clone, PartialEq)]
pub struct Agent {
    position: Vec<f64>,
    fitness: Option<f64>,
    count: usize,
}

impl Agent {
    /// Unevaluated agent with a zero stagnation counter.
    pub fn new(position: Vec<f64>) -> Self {
        Self {
            position,
            fitness: None,
            count: 0,
        }
    }

    pub fn position(&self) -> &[f64] {
        &self.position
    }

    /// `None` until the agent has been evaluated.
    pub fn fitness(&self) -> Option<f64> {
        self.fitness
    }

    pub fn set_fitness(&mut self, f: f64) {
        self.fitness = Some(f);
    }

    /// Consecutive greedy-selection failures.
    pub fn count(&self) -> usize {
        self.count
    }

    pub(crate) fn set_count(&mut self, count: usize) {
        self.count = count;
    }

    /// Fitness for comparisons; unevaluated agents compare as +inf.
    pub(crate) fn fitness_or_inf(&self) -> f64 {
        self.fitness.unwrap_or(f64::INFINITY)
    }
}

/// Ordered set of agents plus the index of the current best.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    agents: Vec<Agent>,
    best_index: usize,
}

impl Population {
    pub fn new(agents: Vec<Agent>) -> Result<Self> {
        if agents.len() < 2 {
            return Err(Error::config(format!(
                "population needs at least 2 agents, got {}",
                agents.len()
            )));
        }
        let dim = agents[0].position.len();
        if let Some(bad) = agents.iter().find(|a| a.position.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: bad.position.len(),
            });
        }
        let mut pop = Self {
            agents,
            best_index: 0,
        };
        pop.refresh_best();
        Ok(pop)
    }

    pub fn from_positions(positions: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(positions.into_iter().map(Agent::new).collect())
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.agents[0].position.len()
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub(crate) fn agents_mut(&mut self) -> &mut [Agent] {
        &mut self.agents
    }

    pub(crate) fn agent_mut(&mut self, i: usize) -> &mut Agent {
        &mut self.agents[i]
    }

    pub fn best_index(&self) -> usize {
        self.best_index
    }

    pub fn best(&self) -> &Agent {
        &self.agents[self.best_index]
    }

    pub fn unevaluated_count(&self) -> usize {
        self.agents.iter().filter(|a| a.fitness.is_none()).count()
    }

    /// Fitness of every agent, or an error if any agent is unevaluated.
    pub fn fitness_values(&self) -> Result<Vec<f64>> {
        self.agents
            .iter()
            .enumerate()
            .map(|(i, a)| {
                a.fitness
                    .ok_or_else(|| Error::numeric(format!("agent {i} has not been evaluated")))
            })
            .collect()
    }

    /// Re-point `best_index` at the lowest fitness; first index wins ties.
    pub fn refresh_best(&mut self) {
        let mut best = 0;
        for (i, a) in self.agents.iter().enumerate().skip(1) {
            if a.fitness_or_inf() < self.agents[best].fitness_or_inf() {
                best = i;
            }
        }
        self.best_index = best;
    }

    /// Indices sorted by ascending fitness, ties broken by index.
    pub fn ranked_indices(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.agents.len()).collect();
        idx.sort_by(|&a, &b| {
            self.agents[a]
                .fitness_or_inf()
                .total_cmp(&self.agents[b].fitness_or_inf())
                .then(a.cmp(&b))
        });
        idx
    }

    pub(crate) fn replace(&mut self, i: usize, position: Vec<f64>, fitness: f64) {
        let agent = &mut self.agents[i];
        agent.position = position;
        agent.fitness = Some(fitness);
    }
}

/// Uniform random population inside `space`, fitness left unevaluated.
///
/// Draws `np × dim` uniforms, agent-major.
pub fn initialize_population<R: Rng + ?Sized>(
    space: &SearchSpace,
    np: usize,
    rng: &mut R,
) -> Result<Population> {
    // Re-validate in case the space was deserialized without going through `new`.
    let space = SearchSpace::new(space.lower().to_vec(), space.upper().to_vec())?;
    let agents = (0..np)
        .map(|_| {
            let position = (0..space.dim())
                .map(|j| space.lower()[j] + unit(rng) * space.width(j))
                .collect();
            Agent::new(position)
        })
        .collect();
    Population::new(agents)
}
