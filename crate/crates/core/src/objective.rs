use crate::budget::Budget;
use crate::error::Result;
use crate::population::Population;

/// A scalar function to minimize.
pub trait Objective {
    fn evaluate(&self, x: &[f64]) -> f64;
}

impl<F> Objective for F
where
    F: Fn(&[f64]) -> f64,
{
    fn evaluate(&self, x: &[f64]) -> f64 {
        self(x)
    }
}

/// Sphere `f(x) = Σ x²`, mostly for smoke tests.
pub fn sphere(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// Evaluate every unevaluated agent of `population`.
///
/// The batch is admitted as a whole: when the budget cannot cover all pending
/// agents nothing is evaluated and [`crate::Error::BudgetExhausted`] is
/// returned with `budget` untouched.
pub fn evaluate<O: Objective + ?Sized>(
    objective: &O,
    population: &mut Population,
    budget: &mut Budget,
) -> Result<()> {
    let pending = population.unevaluated_count();
    budget.try_consume(pending)?;
    for agent in population.agents_mut() {
        if agent.fitness().is_none() {
            let f = objective.evaluate(agent.position());
            agent.set_fitness(f);
        }
    }
    population.refresh_best();
    Ok(())
}
