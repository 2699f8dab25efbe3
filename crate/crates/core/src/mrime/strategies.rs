//! The building blocks MRIME-CD layers on top of basic RIME.

use rand::Rng;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::linalg::GaussianModel;
use crate::population::Population;
use crate::rime::{coeff_e, normalize_fitness, normalize_values, puncture_agent};
use crate::rng::unit;
use crate::space::SearchSpace;

/// Search phase of an agent within one generation, decided by `r₁` vs `E`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    /// `r₁ ≥ E`: covariance learning and midpoint bootstrapping.
    Early,
    /// `r₁ < E`: classic soft-rime move and puncture.
    Late,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    SoftRime,
    Gcls,
}

impl From<Phase> for Branch {
    fn from(p: Phase) -> Self {
        match p {
            Phase::Late => Branch::SoftRime,
            Phase::Early => Branch::Gcls,
        }
    }
}

/// One `r₁` draw against `E`.
pub fn draw_phase<R: Rng + ?Sized>(e: f64, rng: &mut R) -> Phase {
    if unit(rng) < e {
        Phase::Late
    } else {
        Phase::Early
    }
}

pub fn exploration_switch<R: Rng + ?Sized>(budget: &Budget, rng: &mut R) -> Branch {
    draw_phase(coeff_e(budget), rng).into()
}

/// Roulette over inverted normalized fitness: the best agent has the largest
/// slice, the worst none. Uniform when every agent has the same fitness.
/// Consumes one draw.
pub fn roulette_anchor<R: Rng + ?Sized>(population: &Population, rng: &mut R) -> Result<usize> {
    let nrom = normalize_values(&population.fitness_values()?)?;
    let slices: Vec<f64> = nrom.iter().map(|r| 1.0 - r).collect();
    let total: f64 = slices.iter().sum();
    let mut target = unit(rng) * total;
    for (i, s) in slices.iter().enumerate() {
        if target < *s {
            return Ok(i);
        }
        target -= s;
    }
    // Rounding can leave `target` a hair above the last positive slice.
    Ok(slices.iter().rposition(|s| *s > 0.0).unwrap_or(0))
}

/// `anchor` plus its `group_size − 1` nearest neighbours (Euclidean), sorted
/// best fitness first. Distance ties resolve to the lower index.
pub fn nearest_group(population: &Population, anchor: usize, group_size: usize) -> Result<Vec<usize>> {
    if group_size == 0 || group_size > population.len() {
        return Err(Error::config(format!(
            "group size {group_size} must be in 1..={}",
            population.len()
        )));
    }
    let center = population.agents()[anchor].position();
    let mut others: Vec<(f64, usize)> = population
        .agents()
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != anchor)
        .map(|(i, a)| {
            let d2: f64 = a.position().iter().zip(center).map(|(x, c)| (x - c) * (x - c)).sum();
            (d2, i)
        })
        .collect();
    others.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut group: Vec<usize> = std::iter::once(anchor)
        .chain(others.into_iter().take(group_size - 1).map(|(_, i)| i))
        .collect();
    let agents = population.agents();
    group.sort_by(|&a, &b| {
        agents[a]
            .fitness_or_inf()
            .total_cmp(&agents[b].fitness_or_inf())
            .then(a.cmp(&b))
    });
    Ok(group)
}

/// Roulette-picked anchor plus its nearest neighbours, best first.
pub fn select_dominant_group<R: Rng + ?Sized>(
    population: &Population,
    group_size: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    if group_size == 0 || group_size > population.len() {
        return Err(Error::config(format!(
            "group size {group_size} must be in 1..={}",
            population.len()
        )));
    }
    let anchor = roulette_anchor(population, rng)?;
    nearest_group(population, anchor, group_size)
}

/// `sample + u·(mean − x)`.
pub fn gcls_combine(sample: &[f64], mean: &[f64], position: &[f64], u: f64) -> Vec<f64> {
    sample
        .iter()
        .zip(mean)
        .zip(position)
        .map(|((s, m), x)| s + u * (m - x))
        .collect()
}

/// Covariance-learning proposal; draws `dim` normals then one uniform.
pub fn gcls_position<R: Rng + ?Sized>(
    position: &[f64],
    model: &GaussianModel,
    space: &SearchSpace,
    rng: &mut R,
) -> Vec<f64> {
    let sample = model.sample(rng);
    let u = unit(rng);
    let mut out = gcls_combine(&sample, model.mean(), position, u);
    space.clamp(&mut out);
    out
}

/// Average-bootstrapped puncture. Each dimension is punctured with
/// probability `nrom(Fit_i)`; early-phase agents move to the midpoint of the
/// best agent and the model mean, late-phase agents to the best agent.
pub fn abs_update<R: Rng + ?Sized>(
    population: &Population,
    proposed: &mut [Vec<f64>],
    mean: &[f64],
    phases: &[Phase],
    rng: &mut R,
) -> Result<()> {
    if phases.len() != proposed.len() {
        return Err(Error::DimensionMismatch {
            expected: proposed.len(),
            actual: phases.len(),
        });
    }
    let rates = normalize_fitness(population)?;
    let best = population.best().position();
    let midpoint: Vec<f64> = best.iter().zip(mean).map(|(b, m)| 0.5 * (b + m)).collect();
    for ((p, rate), phase) in proposed.iter_mut().zip(rates).zip(phases) {
        let target = match phase {
            Phase::Early => &midpoint,
            Phase::Late => best,
        };
        puncture_agent(p, target, rate, rng);
    }
    Ok(())
}

/// Normalized population volume, computed in log space.
///
/// Returns 0 as soon as one dimension has no spread.
pub fn diversity_nvol(space: &SearchSpace, population: &Population) -> f64 {
    let dim = space.dim();
    let mut log_lim = 0.0;
    let mut log_pop = 0.0;
    for j in 0..dim {
        let (lo, hi) = population
            .agents()
            .iter()
            .map(|a| a.position()[j])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        let extent = hi - lo;
        if extent <= 0.0 {
            return 0.0;
        }
        log_lim += space.width(j).ln();
        log_pop += (extent / 2.0).ln();
    }
    (0.5 * (0.5 * log_pop - 0.5 * log_lim)).exp()
}

/// `sample + u₁·(x_a − x_i) + u₂·(x_b − x_i)`.
pub fn spdm_combine(sample: &[f64], x_i: &[f64], x_a: &[f64], x_b: &[f64], u1: f64, u2: f64) -> Vec<f64> {
    (0..sample.len())
        .map(|j| sample[j] + u1 * (x_a[j] - x_i[j]) + u2 * (x_b[j] - x_i[j]))
        .collect()
}

/// Two distinct partners for agent `i`, both different from `i`.
pub fn pick_partners<R: Rng + ?Sized>(i: usize, np: usize, rng: &mut R) -> Option<(usize, usize)> {
    if np < 3 {
        return None;
    }
    let mut a = rng.random_range(0..np - 1);
    if a >= i {
        a += 1;
    }
    let (lo, hi) = if a < i { (a, i) } else { (i, a) };
    let mut b = rng.random_range(0..np - 2);
    if b >= lo {
        b += 1;
    }
    if b >= hi {
        b += 1;
    }
    Some((a, b))
}

/// Stochastic diversity restart for agent `i`: partners, then `dim` normals,
/// then `u₁`, `u₂`. `None` when fewer than three agents exist.
pub fn spdm_position<R: Rng + ?Sized>(
    i: usize,
    model: &GaussianModel,
    population: &Population,
    space: &SearchSpace,
    rng: &mut R,
) -> Option<Vec<f64>> {
    let (a, b) = pick_partners(i, population.len(), rng)?;
    let agents = population.agents();
    let sample = model.sample(rng);
    let u1 = unit(rng);
    let u2 = unit(rng);
    let mut out = spdm_combine(&sample, agents[i].position(), agents[a].position(), agents[b].position(), u1, u2);
    space.clamp(&mut out);
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::testing::ScriptedRng;
    use crate::rng::RngStream;
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;

    fn evaluated(positions: Vec<Vec<f64>>, fitness: &[f64]) -> Population {
        let mut pop = Population::from_positions(positions).unwrap();
        for (a, f) in pop.agents_mut().iter_mut().zip(fitness) {
            a.set_fitness(*f);
        }
        pop.refresh_best();
        pop
    }

    fn zero_model(mean: Vec<f64>) -> GaussianModel {
        let d = mean.len();
        GaussianModel::new(mean, DMatrix::zeros(d, d)).unwrap()
    }

    #[test]
    fn switch_at_start_is_always_gcls() {
        let b = Budget::with_used(100, 0).unwrap();
        let mut rng = RngStream::new(1).init();
        assert!((0..1000).all(|_| exploration_switch(&b, &mut rng) == Branch::Gcls));
    }

    #[test]
    fn switch_at_end_is_never_gcls() {
        let b = Budget::with_used(100, 100).unwrap();
        let mut rng = RngStream::new(1).init();
        assert!((0..1000).all(|_| exploration_switch(&b, &mut rng) == Branch::SoftRime));
    }

    #[test]
    fn switch_fraction_at_quarter_budget() {
        let b = Budget::with_used(100, 25).unwrap();
        let mut rng = RngStream::new(2).init();
        let n = 10_000;
        let gcls = (0..n).filter(|_| exploration_switch(&b, &mut rng) == Branch::Gcls).count();
        let frac = gcls as f64 / n as f64;
        assert!((frac - 0.5).abs() <= 0.05, "gcls fraction {frac}");
    }

    #[test]
    fn group_of_whole_population_is_fitness_sorted() {
        let pop = evaluated(vec![vec![0.0], vec![1.0], vec![2.0], vec![3.0]], &[4.0, 2.0, 3.0, 1.0]);
        let g = select_dominant_group(&pop, 4, &mut RngStream::new(0).init()).unwrap();
        assert_eq!(g, vec![3, 1, 2, 0]);
    }

    #[test]
    fn group_of_one_is_the_anchor() {
        let pop = evaluated(vec![vec![0.0], vec![1.0], vec![2.0]], &[1.0, 2.0, 3.0]);
        // Slices are [1, 0.5, 0]; a draw of 0.8 lands at 1.2 ⇒ agent 1.
        let g = select_dominant_group(&pop, 1, &mut ScriptedRng::constant(0.8)).unwrap();
        assert_eq!(g, vec![1]);
        let g = select_dominant_group(&pop, 1, &mut ScriptedRng::constant(0.1)).unwrap();
        assert_eq!(g, vec![0]);
    }

    #[test]
    fn nearest_neighbours_on_a_line() {
        let positions: Vec<Vec<f64>> = (0..10).map(|x| vec![x as f64]).collect();
        let fitness: Vec<f64> = (0..10).map(|x| (9 - x) as f64).collect();
        let pop = evaluated(positions, &fitness);
        let mut g = nearest_group(&pop, 0, 3).unwrap();
        // best first: x=2 has the lowest fitness of the three
        assert_eq!(g, vec![2, 1, 0]);
        g.sort();
        assert_eq!(g, vec![0, 1, 2]);
    }

    #[test]
    fn oversized_group_rejected() {
        let pop = evaluated(vec![vec![0.0], vec![1.0]], &[1.0, 2.0]);
        assert!(matches!(
            select_dominant_group(&pop, 3, &mut RngStream::new(0).init()),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn roulette_never_picks_the_worst_and_favours_the_best() {
        let pop = evaluated(vec![vec![0.0], vec![1.0], vec![2.0]], &[0.0, 5.0, 10.0]);
        let mut rng = RngStream::new(7).init();
        let mut hits = [0usize; 3];
        for _ in 0..3000 {
            hits[roulette_anchor(&pop, &mut rng).unwrap()] += 1;
        }
        assert_eq!(hits[2], 0);
        assert!(hits[0] > hits[1]);
    }

    #[test]
    fn roulette_uniform_when_tied() {
        let pop = evaluated(vec![vec![0.0]; 4], &[1.0; 4]);
        let mut rng = RngStream::new(3).init();
        let mut hits = [0usize; 4];
        for _ in 0..8000 {
            hits[roulette_anchor(&pop, &mut rng).unwrap()] += 1;
        }
        assert!(hits.iter().all(|&h| (1700..2300).contains(&h)), "{hits:?}");
    }

    #[test]
    fn gcls_with_zero_covariance() {
        let space = SearchSpace::uniform(2, -10.0, 10.0).unwrap();
        let model = zero_model(vec![1.0, 2.0]);
        let tol = model.jitter().sqrt() * 10.0;
        let p = gcls_position(&[1.0, 2.0], &model, &space, &mut RngStream::new(1).init());
        assert!((p[0] - 1.0).abs() <= tol && (p[1] - 2.0).abs() <= tol);

        // agent at mean − d with u = 1 ⇒ mean + d
        let d = [0.5, -1.5];
        let agent = [1.0 - d[0], 2.0 - d[1]];
        let q = gcls_combine(model.mean(), model.mean(), &agent, 1.0);
        assert_abs_diff_eq!(q[0], 1.5, epsilon = 1e-12);
        assert_abs_diff_eq!(q[1], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn gcls_proposals_clamped() {
        let space = SearchSpace::uniform(3, -1.0, 1.0).unwrap();
        let model = GaussianModel::new(vec![0.9; 3], DMatrix::identity(3, 3) * 25.0).unwrap();
        let mut rng = RngStream::new(5).init();
        for _ in 0..200 {
            assert!(space.contains(&gcls_position(&[-0.9; 3], &model, &space, &mut rng)));
        }
    }

    #[test]
    fn abs_examples() {
        // X_best = (2, 2), mean = (0, 0); worst agent fully punctured in the early phase.
        let pop = evaluated(vec![vec![2.0, 2.0], vec![5.0, 5.0]], &[0.0, 1.0]);
        let mut proposed = vec![vec![9.0, 9.0], vec![9.0, 9.0]];
        abs_update(&pop, &mut proposed, &[0.0, 0.0], &[Phase::Early; 2], &mut ScriptedRng::constant(0.3)).unwrap();
        assert_eq!(proposed[0], vec![9.0, 9.0]);
        assert_eq!(proposed[1], vec![1.0, 1.0]);

        // late phase falls back to the best agent
        let mut proposed = vec![vec![9.0, 9.0], vec![9.0, 9.0]];
        abs_update(&pop, &mut proposed, &[0.0, 0.0], &[Phase::Late; 2], &mut ScriptedRng::constant(0.3)).unwrap();
        assert_eq!(proposed[1], vec![2.0, 2.0]);
    }

    #[test]
    fn abs_reduces_to_puncture_when_mean_is_best() {
        let pop = evaluated(vec![vec![2.0, -1.0], vec![5.0, 5.0], vec![0.0, 3.0]], &[0.0, 1.0, 0.4]);
        let base = vec![vec![9.0, 9.0]; 3];
        let mut a = base.clone();
        let mut b = base.clone();
        abs_update(&pop, &mut a, &[2.0, -1.0], &[Phase::Early; 3], &mut RngStream::new(3).init()).unwrap();
        crate::rime::hard_rime_puncture(&pop, &mut b, &mut RngStream::new(3).init()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn nvol_examples() {
        let space = SearchSpace::uniform(2, -100.0, 100.0).unwrap();
        let same = evaluated(vec![vec![3.0, 4.0]; 3], &[0.0; 3]);
        assert_eq!(diversity_nvol(&space, &same), 0.0);
        let spread = evaluated(vec![vec![-100.0, -100.0], vec![100.0, 100.0]], &[0.0; 2]);
        assert_abs_diff_eq!(diversity_nvol(&space, &spread), 0.5f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(diversity_nvol(&space, &spread), 2f64.powf(-0.5), epsilon = 1e-12);

        let space = SearchSpace::uniform(30, -100.0, 100.0).unwrap();
        let spread = evaluated(vec![vec![-100.0; 30], vec![100.0; 30]], &[0.0; 2]);
        assert_abs_diff_eq!(diversity_nvol(&space, &spread), 0.00552, epsilon = 1e-5);
    }

    #[test]
    fn spdm_examples() {
        let space = SearchSpace::uniform(2, -10.0, 10.0).unwrap();
        let pop = evaluated(vec![vec![1.0, 1.0]; 3], &[0.0; 3]);
        let model = zero_model(vec![1.0, 1.0]);
        let tol = model.jitter().sqrt() * 10.0;
        let p = spdm_position(0, &model, &pop, &space, &mut RngStream::new(2).init()).unwrap();
        assert!((p[0] - 1.0).abs() <= tol && (p[1] - 1.0).abs() <= tol);

        // x_i at mean, x_a − x_i = (1, 0), x_b − x_i = (0, 1), u₁ = u₂ = 1
        let q = spdm_combine(&[0.0, 0.0], &[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0], 1.0, 1.0);
        assert_eq!(q, vec![1.0, 1.0]);

        let two = evaluated(vec![vec![0.0, 0.0], vec![1.0, 1.0]], &[0.0, 1.0]);
        assert!(spdm_position(0, &model, &two, &space, &mut RngStream::new(2).init()).is_none());
    }

    #[test]
    fn partners_are_distinct() {
        let mut rng = RngStream::new(13).init();
        for k in 0..10_000 {
            let np = 3 + k % 5;
            let i = k % np;
            let (a, b) = pick_partners(i, np, &mut rng).unwrap();
            assert!(a != b && a != i && b != i && a < np && b < np);
        }
    }
}
