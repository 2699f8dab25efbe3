//! Engineering design problems and the static penalty that turns them into
//! box-bounded objectives.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::space::SearchSpace;

pub const DEFAULT_PENALTY_FACTOR: f64 = 1e10;
pub const DEFAULT_EQ_TOL: f64 = 1e-4;
/// Returned by a penalized objective whose raw value is NaN or infinite.
pub const NON_FINITE_PENALTY: f64 = 1e300;
pub const FEASIBILITY_TOL: f64 = 1e-6;

pub type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct ConstrainedProblem {
    name: String,
    bounds: SearchSpace,
    objective: ScalarFn,
    inequality: Vec<ScalarFn>,
    equality: Vec<ScalarFn>,
    witness: Vec<f64>,
    integer: bool,
    best_known: Option<f64>,
}

impl fmt::Debug for ConstrainedProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConstrainedProblem")
            .field("name", &self.name)
            .field("dim", &self.dim())
            .field("inequality", &self.inequality.len())
            .field("equality", &self.equality.len())
            .field("best_known", &self.best_known)
            .finish()
    }
}

impl ConstrainedProblem {
    /// `witness` must be feasible (max violation ≤ [`FEASIBILITY_TOL`]) and in bounds.
    pub fn new(
        name: impl Into<String>,
        bounds: SearchSpace,
        objective: ScalarFn,
        inequality: Vec<ScalarFn>,
        equality: Vec<ScalarFn>,
        witness: Vec<f64>,
    ) -> Result<Self> {
        let p = Self {
            name: name.into(),
            bounds,
            objective,
            inequality,
            equality,
            witness,
            integer: false,
            best_known: None,
        };
        if p.witness.len() != p.dim() {
            return Err(Error::DimensionMismatch {
                expected: p.dim(),
                actual: p.witness.len(),
            });
        }
        if !p.bounds.contains(&p.witness) || !p.is_feasible(&p.witness) {
            return Err(Error::config(format!("witness for '{}' is not feasible", p.name)));
        }
        Ok(p)
    }

    pub fn with_best_known(mut self, value: f64) -> Self {
        self.best_known = Some(value);
        self
    }

    /// Round every coordinate before evaluation.
    pub fn with_integer_variables(mut self) -> Self {
        self.integer = true;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.bounds.dim()
    }

    pub fn bounds(&self) -> &SearchSpace {
        &self.bounds
    }

    pub fn witness(&self) -> &[f64] {
        &self.witness
    }

    pub fn best_known(&self) -> Option<f64> {
        self.best_known
    }

    pub fn is_integer(&self) -> bool {
        self.integer
    }

    fn decode(&self, x: &[f64]) -> Vec<f64> {
        if self.integer {
            x.iter().map(|v| v.round()).collect()
        } else {
            x.to_vec()
        }
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        (self.objective)(&self.decode(x))
    }

    pub fn inequality_values(&self, x: &[f64]) -> Vec<f64> {
        let x = self.decode(x);
        self.inequality.iter().map(|g| g(&x)).collect()
    }

    pub fn equality_values(&self, x: &[f64]) -> Vec<f64> {
        let x = self.decode(x);
        self.equality.iter().map(|h| h(&x)).collect()
    }

    /// Largest constraint violation; equalities count only outside the
    /// `eq_tol` band. NaN constraints count as infinite violation.
    pub fn max_violation(&self, x: &[f64], eq_tol: f64) -> f64 {
        let g = self.inequality_values(x).into_iter().map(|v| v.max(0.0));
        let h = self.equality_values(x).into_iter().map(|v| (v.abs() - eq_tol).max(0.0));
        g.chain(h)
            .map(|v| if v.is_nan() { f64::INFINITY } else { v })
            .fold(0.0, f64::max)
    }

    pub fn is_feasible(&self, x: &[f64]) -> bool {
        self.max_violation(x, DEFAULT_EQ_TOL) <= FEASIBILITY_TOL
    }

    pub fn penalized(&self, factor: f64, eq_tol: f64) -> Result<Penalized> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::config(format!("penalty factor must be positive, got {factor}")));
        }
        if !(eq_tol >= 0.0) {
            return Err(Error::config(format!("equality tolerance must be non-negative, got {eq_tol}")));
        }
        Ok(Penalized {
            problem: self.clone(),
            factor,
            eq_tol,
        })
    }

    pub fn penalized_default(&self) -> Penalized {
        self.penalized(DEFAULT_PENALTY_FACTOR, DEFAULT_EQ_TOL).expect("defaults are valid")
    }
}

/// `f(x) + factor·[Σ max(0, gᵢ)² + Σ max(0, |hⱼ| − eq_tol)²]`.
#[derive(Debug, Clone)]
pub struct Penalized {
    problem: ConstrainedProblem,
    factor: f64,
    eq_tol: f64,
}

impl Penalized {
    pub fn problem(&self) -> &ConstrainedProblem {
        &self.problem
    }

    pub fn penalty(&self, x: &[f64]) -> f64 {
        let g: f64 = self.problem.inequality_values(x).iter().map(|v| v.max(0.0).powi(2)).sum();
        let h: f64 = self
            .problem
            .equality_values(x)
            .iter()
            .map(|v| (v.abs() - self.eq_tol).max(0.0).powi(2))
            .sum();
        self.factor * (g + h)
    }
}

impl Objective for Penalized {
    fn evaluate(&self, x: &[f64]) -> f64 {
        let f = self.problem.objective(x);
        let p = self.penalty(x);
        let total = if p == 0.0 { f } else { f + p };
        if total.is_finite() {
            total
        } else {
            NON_FINITE_PENALTY
        }
    }
}

fn arc(f: fn(&[f64]) -> f64) -> ScalarFn {
    Arc::new(f)
}

fn bounds(lower: &[f64], upper: &[f64]) -> SearchSpace {
    SearchSpace::new(lower.to_vec(), upper.to_vec()).expect("registry bounds are valid")
}

/// Minimize coil wire volume; x = (wire d, coil D, active coils N).
pub fn tension_compression_spring() -> ConstrainedProblem {
    ConstrainedProblem::new(
        "tension_compression_spring",
        bounds(&[0.05, 0.25, 2.0], &[2.0, 1.3, 15.0]),
        arc(|x| (x[2] + 2.0) * x[1] * x[0] * x[0]),
        vec![
            arc(|x| 1.0 - x[1].powi(3) * x[2] / (71785.0 * x[0].powi(4))),
            arc(|x| {
                let (d, dd) = (x[0], x[1]);
                (4.0 * dd * dd - d * dd) / (12566.0 * (dd * d.powi(3) - d.powi(4))) + 1.0 / (5108.0 * d * d) - 1.0
            }),
            arc(|x| 1.0 - 140.45 * x[0] / (x[1] * x[1] * x[2])),
            arc(|x| (x[0] + x[1]) / 1.5 - 1.0),
        ],
        vec![],
        vec![0.06, 0.5, 10.0],
    )
    .expect("spring witness is feasible")
    .with_best_known(0.012665)
}

/// x = (shell thickness Ts, head thickness Th, radius R, length L).
pub fn pressure_vessel() -> ConstrainedProblem {
    ConstrainedProblem::new(
        "pressure_vessel",
        bounds(&[0.0, 0.0, 10.0, 10.0], &[99.0, 99.0, 200.0, 200.0]),
        arc(|x| {
            let (ts, th, r, l) = (x[0], x[1], x[2], x[3]);
            0.6224 * ts * r * l + 1.7781 * th * r * r + 3.1661 * ts * ts * l + 19.84 * ts * ts * r
        }),
        vec![
            arc(|x| -x[0] + 0.0193 * x[2]),
            arc(|x| -x[1] + 0.00954 * x[2]),
            arc(|x| -PI * x[2] * x[2] * x[3] - 4.0 / 3.0 * PI * x[2].powi(3) + 1_296_000.0),
            arc(|x| x[3] - 240.0),
        ],
        vec![],
        vec![1.5, 1.0, 50.0, 150.0],
    )
    .expect("pressure vessel witness is feasible")
    .with_best_known(5885.33)
}

/// Cross-sections (A1, A2); l = 100, P = 2, σ = 2.
pub fn three_bar_truss() -> ConstrainedProblem {
    const L: f64 = 100.0;
    const P: f64 = 2.0;
    const SIGMA: f64 = 2.0;
    ConstrainedProblem::new(
        "three_bar_truss",
        bounds(&[0.0, 0.0], &[1.0, 1.0]),
        arc(|x| (2.0 * SQRT_2 * x[0] + x[1]) * L),
        vec![
            arc(|x| (SQRT_2 * x[0] + x[1]) / (SQRT_2 * x[0] * x[0] + 2.0 * x[0] * x[1]) * P - SIGMA),
            arc(|x| x[1] / (SQRT_2 * x[0] * x[0] + 2.0 * x[0] * x[1]) * P - SIGMA),
            arc(|x| 1.0 / (x[0] + SQRT_2 * x[1]) * P - SIGMA),
        ],
        vec![],
        vec![0.8, 0.5],
    )
    .expect("truss witness is feasible")
    .with_best_known(263.8958)
}

/// x = (weld h, weld length l, bar height t, bar thickness b).
pub fn welded_beam() -> ConstrainedProblem {
    const P: f64 = 6000.0;
    const L: f64 = 14.0;
    const E: f64 = 30e6;
    const G: f64 = 12e6;
    fn tau(x: &[f64]) -> f64 {
        let (h, l, t) = (x[0], x[1], x[2]);
        let tp = P / (SQRT_2 * h * l);
        let m = P * (L + l / 2.0);
        let r = (l * l / 4.0 + ((h + t) / 2.0).powi(2)).sqrt();
        let j = 2.0 * (SQRT_2 * h * l * (l * l / 12.0 + ((h + t) / 2.0).powi(2)));
        let tpp = m * r / j;
        (tp * tp + 2.0 * tp * tpp * l / (2.0 * r) + tpp * tpp).sqrt()
    }
    fn buckling(x: &[f64]) -> f64 {
        let (t, b) = (x[2], x[3]);
        4.013 * E * (t * t * b.powi(6) / 36.0).sqrt() / (L * L) * (1.0 - t / (2.0 * L) * (E / (4.0 * G)).sqrt())
    }
    ConstrainedProblem::new(
        "welded_beam",
        bounds(&[0.1, 0.1, 0.1, 0.1], &[2.0, 10.0, 10.0, 2.0]),
        arc(|x| 1.10471 * x[0] * x[0] * x[1] + 0.04811 * x[2] * x[3] * (14.0 + x[1])),
        vec![
            arc(|x| tau(x) - 13600.0),
            arc(|x| 6.0 * P * L / (x[3] * x[2] * x[2]) - 30000.0),
            arc(|x| 4.0 * P * L.powi(3) / (E * x[2].powi(3) * x[3]) - 0.25),
            arc(|x| x[0] - x[3]),
            arc(|x| P - buckling(x)),
            arc(|x| 0.125 - x[0]),
            arc(|x| 0.10471 * x[0] * x[0] + 0.04811 * x[2] * x[3] * (14.0 + x[1]) - 5.0),
        ],
        vec![],
        vec![0.4, 4.0, 9.0, 0.5],
    )
    .expect("welded beam witness is feasible")
    .with_best_known(1.724852)
}

/// Tooth counts (Td, Tb, Ta, Tf), rounded to integers; target ratio 1/6.931.
pub fn gear_train() -> ConstrainedProblem {
    ConstrainedProblem::new(
        "gear_train",
        bounds(&[12.0; 4], &[60.0; 4]),
        arc(|x| (1.0 / 6.931 - x[1] * x[2] / (x[0] * x[3])).powi(2)),
        vec![],
        vec![],
        vec![20.0, 20.0, 20.0, 20.0],
    )
    .expect("gear train has no constraints")
    .with_integer_variables()
    .with_best_known(2.700857e-12)
}

/// The five built-in problems.
pub fn problem_registry() -> Vec<ConstrainedProblem> {
    vec![
        tension_compression_spring(),
        pressure_vessel(),
        three_bar_truss(),
        welded_beam(),
        gear_train(),
    ]
}

pub fn problem_by_name(name: &str) -> Result<ConstrainedProblem> {
    problem_registry()
        .into_iter()
        .find(|p| p.name() == name)
        .ok_or_else(|| Error::config(format!("unknown constrained problem '{name}'")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn registry_dims() {
        let dims: Vec<(String, usize)> = problem_registry().iter().map(|p| (p.name().to_string(), p.dim())).collect();
        assert_eq!(
            dims,
            vec![
                ("tension_compression_spring".into(), 3),
                ("pressure_vessel".into(), 4),
                ("three_bar_truss".into(), 2),
                ("welded_beam".into(), 4),
                ("gear_train".into(), 4),
            ]
        );
    }

    #[test]
    fn witnesses_have_zero_penalty() {
        for p in problem_registry() {
            let pen = p.penalized_default();
            assert_eq!(pen.penalty(p.witness()), 0.0, "{}", p.name());
            assert_eq!(pen.evaluate(p.witness()), p.objective(p.witness()));
        }
    }

    #[test]
    fn literature_optima() {
        // Published best designs evaluate close to their best-known values.
        let cases: [(ConstrainedProblem, &[f64], f64); 5] = [
            (tension_compression_spring(), &[0.051689, 0.356718, 11.288966], 1e-4),
            (pressure_vessel(), &[0.778169, 0.384649, 40.319619, 200.0], 1e-4),
            (three_bar_truss(), &[0.788675, 0.408248], 1e-5),
            (welded_beam(), &[0.205730, 3.470489, 9.036624, 0.205730], 1e-5),
            (gear_train(), &[43.0, 16.0, 19.0, 49.0], 1e-3),
        ];
        for (p, x, tol) in cases {
            assert_relative_eq!(p.objective(x), p.best_known().unwrap(), max_relative = tol);
            assert!(p.max_violation(x, DEFAULT_EQ_TOL) < 1e-3, "{}", p.name());
        }
    }

    #[test]
    fn single_violation_penalty() {
        let p = ConstrainedProblem::new(
            "toy",
            SearchSpace::uniform(1, -10.0, 10.0).unwrap(),
            arc(|x| x[0]),
            vec![arc(|x| x[0] - 1.0)],
            vec![],
            vec![0.0],
        )
        .unwrap();
        let pen = p.penalized(10.0, DEFAULT_EQ_TOL).unwrap();
        assert_eq!(pen.evaluate(&[3.0]), 3.0 + 40.0);
        assert_eq!(pen.evaluate(&[1.0]), 1.0);
        assert!(pen.evaluate(&[1.0 + 1e-9]) - (1.0 + 1e-9) < 1e-12);
        assert!(p.penalized(0.0, 1e-4).is_err());
    }

    #[test]
    fn equality_band() {
        let p = ConstrainedProblem::new(
            "eq",
            SearchSpace::uniform(1, -10.0, 10.0).unwrap(),
            arc(|_| 0.0),
            vec![],
            vec![arc(|x| x[0])],
            vec![0.0],
        )
        .unwrap();
        let pen = p.penalized(1.0, 0.5).unwrap();
        assert_eq!(pen.evaluate(&[0.4]), 0.0);
        assert_relative_eq!(pen.evaluate(&[-2.5]), 4.0);
    }

    #[test]
    fn infeasible_witness_rejected() {
        let r = ConstrainedProblem::new(
            "bad",
            SearchSpace::uniform(1, -1.0, 1.0).unwrap(),
            arc(|x| x[0]),
            vec![arc(|x| x[0])],
            vec![],
            vec![0.5],
        );
        assert!(r.is_err());
    }

    #[test]
    fn non_finite_is_mapped() {
        let pen = three_bar_truss().penalized_default();
        assert_eq!(pen.evaluate(&[0.0, 0.0]), NON_FINITE_PENALTY);
        assert!(!three_bar_truss().is_feasible(&[0.0, 0.0]));
    }

    #[test]
    fn gear_rounding() {
        let g = gear_train();
        assert_eq!(g.objective(&[42.6, 16.2, 18.7, 49.4]), g.objective(&[43.0, 16.0, 19.0, 49.0]));
    }

    #[test]
    fn lookup() {
        assert_eq!(problem_by_name("welded_beam").unwrap().dim(), 4);
        assert!(problem_by_name("speed_reducer").is_err());
    }
}
