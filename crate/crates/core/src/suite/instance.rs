use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::functions::BaseFn;
use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::space::SearchSpace;

pub const SEARCH_BOUND: f64 = 100.0;
pub const SHIFT_BOUND: f64 = 80.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Cec2017,
    Cec2022,
}

impl Suite {
    pub fn name(&self) -> &'static str {
        match self {
            Suite::Cec2017 => "cec2017",
            Suite::Cec2022 => "cec2022",
        }
    }

    pub fn function_count(&self) -> usize {
        self.table().len()
    }

    pub fn function_ids(&self) -> std::ops::RangeInclusive<usize> {
        1..=self.function_count()
    }

    fn code(&self) -> u64 {
        match self {
            Suite::Cec2017 => 17,
            Suite::Cec2022 => 22,
        }
    }

    fn table(&self) -> &'static [Entry] {
        match self {
            Suite::Cec2017 => CEC2017,
            Suite::Cec2022 => CEC2022,
        }
    }

    fn entry(&self, id: usize) -> Result<&'static Entry> {
        id.checked_sub(1)
            .and_then(|i| self.table().get(i))
            .ok_or_else(|| Error::config(format!("{} has no function F{id}", self.name())))
    }

    /// Display name of function `id`.
    pub fn function_name(&self, id: usize) -> Result<&'static str> {
        Ok(self.entry(id)?.name)
    }

    pub fn function_class(&self, id: usize) -> Result<FunctionClass> {
        Ok(self.entry(id)?.class)
    }

    /// Optimal value `fmin` of function `id`.
    pub fn function_bias(&self, id: usize) -> Result<f64> {
        Ok(self.entry(id)?.bias)
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cec2017" | "cec2017-like" => Ok(Suite::Cec2017),
            "cec2022" | "cec2022-like" => Ok(Suite::Cec2022),
            _ => Err(Error::config(format!("unknown suite '{s}'"))),
        }
    }
}

/// Reporting group. CEC 2017: F1–F2 unimodal, F3–F9 multimodal;
/// CEC 2022: F1 unimodal, F2–F5 basic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FunctionClass {
    Unimodal,
    Multimodal,
    Basic,
    Hybrid,
    Composition,
}

impl fmt::Display for FunctionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FunctionClass::Unimodal => "unimodal",
            FunctionClass::Multimodal => "multimodal",
            FunctionClass::Basic => "basic",
            FunctionClass::Hybrid => "hybrid",
            FunctionClass::Composition => "composition",
        };
        f.write_str(s)
    }
}

type Blocks = &'static [(BaseFn, f64)];

#[derive(Clone, Copy)]
enum Part {
    Basic(BaseFn),
    Hybrid(Blocks),
}

struct Component {
    part: Part,
    sigma: f64,
    lambda: f64,
    bias: f64,
}

enum Recipe {
    Basic(BaseFn),
    Hybrid(Blocks),
    Composition(&'static [Component]),
}

struct Entry {
    name: &'static str,
    class: FunctionClass,
    bias: f64,
    recipe: Recipe,
}

const fn comp(part: Part, sigma: f64, lambda: f64, bias: f64) -> Component {
    Component {
        part,
        sigma,
        lambda,
        bias,
    }
}

use BaseFn::*;
use FunctionClass as C;
use Part::Basic as B;

const HF17_1: Blocks = &[(Zakharov, 0.2), (Rosenbrock, 0.4), (Rastrigin, 0.4)];
const HF17_2: Blocks = &[(HighConditionedElliptic, 0.3), (Schwefel, 0.3), (BentCigar, 0.4)];
const HF17_3: Blocks = &[(BentCigar, 0.3), (Rosenbrock, 0.3), (LunacekBiRastrigin, 0.4)];
const HF17_4: Blocks = &[(HighConditionedElliptic, 0.2), (Ackley, 0.2), (SchafferF7, 0.2), (Rastrigin, 0.4)];
const HF17_5: Blocks = &[(BentCigar, 0.2), (HgBat, 0.2), (Rastrigin, 0.3), (Rosenbrock, 0.3)];
const HF17_6: Blocks = &[(ExpandedSchafferF6, 0.2), (HgBat, 0.2), (Rosenbrock, 0.3), (Schwefel, 0.3)];
const HF17_7: Blocks = &[
    (Katsuura, 0.1),
    (Ackley, 0.2),
    (ExpandedGriewankRosenbrock, 0.2),
    (Schwefel, 0.2),
    (Rastrigin, 0.3),
];
const HF17_8: Blocks = &[
    (HighConditionedElliptic, 0.2),
    (Ackley, 0.2),
    (Rastrigin, 0.2),
    (HgBat, 0.2),
    (Discus, 0.2),
];
const HF17_9: Blocks = &[
    (BentCigar, 0.2),
    (Rastrigin, 0.2),
    (ExpandedGriewankRosenbrock, 0.2),
    (Weierstrass, 0.2),
    (ExpandedSchafferF6, 0.2),
];
const HF17_10: Blocks = &[
    (HappyCat, 0.1),
    (Katsuura, 0.1),
    (Ackley, 0.2),
    (Rastrigin, 0.2),
    (Schwefel, 0.2),
    (SchafferF7, 0.2),
];

const CF17_1: &[Component] = &[
    comp(B(Rosenbrock), 10.0, 1.0, 0.0),
    comp(B(HighConditionedElliptic), 20.0, 1e-6, 100.0),
    comp(B(Rastrigin), 30.0, 1.0, 200.0),
];
const CF17_2: &[Component] = &[
    comp(B(Rastrigin), 10.0, 1.0, 0.0),
    comp(B(Griewank), 20.0, 10.0, 100.0),
    comp(B(Schwefel), 30.0, 1.0, 200.0),
];
const CF17_3: &[Component] = &[
    comp(B(Rosenbrock), 10.0, 1.0, 0.0),
    comp(B(Ackley), 20.0, 10.0, 100.0),
    comp(B(Schwefel), 30.0, 1.0, 200.0),
    comp(B(Rastrigin), 40.0, 1.0, 300.0),
];
const CF17_4: &[Component] = &[
    comp(B(Ackley), 10.0, 10.0, 0.0),
    comp(B(HighConditionedElliptic), 20.0, 1e-6, 100.0),
    comp(B(Griewank), 30.0, 10.0, 200.0),
    comp(B(Rastrigin), 40.0, 1.0, 300.0),
];
const CF17_5: &[Component] = &[
    comp(B(Rastrigin), 10.0, 10.0, 0.0),
    comp(B(HappyCat), 20.0, 1.0, 100.0),
    comp(B(Ackley), 30.0, 10.0, 200.0),
    comp(B(Discus), 40.0, 1e-6, 300.0),
    comp(B(Rosenbrock), 50.0, 1.0, 400.0),
];
const CF17_6: &[Component] = &[
    comp(B(ExpandedSchafferF6), 10.0, 5e-4, 0.0),
    comp(B(Schwefel), 20.0, 1.0, 100.0),
    comp(B(Griewank), 20.0, 10.0, 200.0),
    comp(B(Rosenbrock), 30.0, 1.0, 300.0),
    comp(B(Rastrigin), 40.0, 10.0, 400.0),
];
const CF17_7: &[Component] = &[
    comp(B(HgBat), 10.0, 10.0, 0.0),
    comp(B(Rastrigin), 20.0, 10.0, 100.0),
    comp(B(Schwefel), 30.0, 2.5, 200.0),
    comp(B(BentCigar), 40.0, 1e-26, 300.0),
    comp(B(HighConditionedElliptic), 50.0, 1e-6, 400.0),
    comp(B(ExpandedSchafferF6), 60.0, 5e-4, 500.0),
];
const CF17_8: &[Component] = &[
    comp(B(Ackley), 10.0, 10.0, 0.0),
    comp(B(Griewank), 20.0, 10.0, 100.0),
    comp(B(Discus), 30.0, 1e-6, 200.0),
    comp(B(Rosenbrock), 40.0, 1.0, 300.0),
    comp(B(HappyCat), 50.0, 1.0, 400.0),
    comp(B(ExpandedSchafferF6), 60.0, 5e-4, 500.0),
];
const CF17_9: &[Component] = &[
    comp(Part::Hybrid(HF17_5), 10.0, 1.0, 0.0),
    comp(Part::Hybrid(HF17_8), 30.0, 1.0, 100.0),
    comp(Part::Hybrid(HF17_9), 50.0, 1.0, 200.0),
];
const CF17_10: &[Component] = &[
    comp(Part::Hybrid(HF17_5), 10.0, 1.0, 0.0),
    comp(Part::Hybrid(HF17_6), 30.0, 1.0, 100.0),
    comp(Part::Hybrid(HF17_7), 50.0, 1.0, 200.0),
];

const fn entry(name: &'static str, class: FunctionClass, bias: f64, recipe: Recipe) -> Entry {
    Entry {
        name,
        class,
        bias,
        recipe,
    }
}

const CEC2017: &[Entry] = &[
    entry("Shifted and Rotated Bent Cigar", C::Unimodal, 100.0, Recipe::Basic(BentCigar)),
    entry("Shifted and Rotated Zakharov", C::Unimodal, 300.0, Recipe::Basic(Zakharov)),
    entry("Shifted and Rotated Rosenbrock", C::Multimodal, 400.0, Recipe::Basic(Rosenbrock)),
    entry("Shifted and Rotated Rastrigin", C::Multimodal, 500.0, Recipe::Basic(Rastrigin)),
    entry("Shifted and Rotated Expanded Schaffer F6", C::Multimodal, 600.0, Recipe::Basic(ExpandedSchafferF6)),
    entry("Shifted and Rotated Lunacek Bi-Rastrigin", C::Multimodal, 700.0, Recipe::Basic(LunacekBiRastrigin)),
    entry("Shifted and Rotated Non-Continuous Rastrigin", C::Multimodal, 800.0, Recipe::Basic(NonContinuousRastrigin)),
    entry("Shifted and Rotated Levy", C::Multimodal, 900.0, Recipe::Basic(Levy)),
    entry("Shifted and Rotated Schwefel", C::Multimodal, 1000.0, Recipe::Basic(Schwefel)),
    entry("Hybrid Function 1 (N=3)", C::Hybrid, 1100.0, Recipe::Hybrid(HF17_1)),
    entry("Hybrid Function 2 (N=3)", C::Hybrid, 1200.0, Recipe::Hybrid(HF17_2)),
    entry("Hybrid Function 3 (N=3)", C::Hybrid, 1300.0, Recipe::Hybrid(HF17_3)),
    entry("Hybrid Function 4 (N=4)", C::Hybrid, 1400.0, Recipe::Hybrid(HF17_4)),
    entry("Hybrid Function 5 (N=4)", C::Hybrid, 1500.0, Recipe::Hybrid(HF17_5)),
    entry("Hybrid Function 6 (N=4)", C::Hybrid, 1600.0, Recipe::Hybrid(HF17_6)),
    entry("Hybrid Function 7 (N=5)", C::Hybrid, 1700.0, Recipe::Hybrid(HF17_7)),
    entry("Hybrid Function 8 (N=5)", C::Hybrid, 1800.0, Recipe::Hybrid(HF17_8)),
    entry("Hybrid Function 9 (N=5)", C::Hybrid, 1900.0, Recipe::Hybrid(HF17_9)),
    entry("Hybrid Function 10 (N=6)", C::Hybrid, 2000.0, Recipe::Hybrid(HF17_10)),
    entry("Composition Function 1 (N=3)", C::Composition, 2100.0, Recipe::Composition(CF17_1)),
    entry("Composition Function 2 (N=3)", C::Composition, 2200.0, Recipe::Composition(CF17_2)),
    entry("Composition Function 3 (N=4)", C::Composition, 2300.0, Recipe::Composition(CF17_3)),
    entry("Composition Function 4 (N=4)", C::Composition, 2400.0, Recipe::Composition(CF17_4)),
    entry("Composition Function 5 (N=5)", C::Composition, 2500.0, Recipe::Composition(CF17_5)),
    entry("Composition Function 6 (N=5)", C::Composition, 2600.0, Recipe::Composition(CF17_6)),
    entry("Composition Function 7 (N=6)", C::Composition, 2700.0, Recipe::Composition(CF17_7)),
    entry("Composition Function 8 (N=6)", C::Composition, 2800.0, Recipe::Composition(CF17_8)),
    entry("Composition Function 9 (N=3)", C::Composition, 2900.0, Recipe::Composition(CF17_9)),
    entry("Composition Function 10 (N=3)", C::Composition, 3000.0, Recipe::Composition(CF17_10)),
];

const HF22_1: Blocks = &[(BentCigar, 0.4), (HgBat, 0.4), (Rastrigin, 0.2)];
const HF22_2: Blocks = &[
    (HgBat, 0.1),
    (Katsuura, 0.2),
    (Ackley, 0.2),
    (Rastrigin, 0.2),
    (Schwefel, 0.1),
    (SchafferF7, 0.2),
];
const HF22_3: Blocks = &[
    (Katsuura, 0.3),
    (HappyCat, 0.2),
    (ExpandedGriewankRosenbrock, 0.2),
    (Schwefel, 0.1),
    (Ackley, 0.2),
];

const CF22_1: &[Component] = &[
    comp(B(Rosenbrock), 10.0, 1.0, 0.0),
    comp(B(HighConditionedElliptic), 20.0, 1e-6, 200.0),
    comp(B(BentCigar), 30.0, 1e-26, 300.0),
    comp(B(Discus), 40.0, 1e-6, 100.0),
    comp(B(HighConditionedElliptic), 50.0, 1e-6, 400.0),
];
const CF22_2: &[Component] = &[
    comp(B(Schwefel), 20.0, 1.0, 0.0),
    comp(B(Rastrigin), 10.0, 1.0, 200.0),
    comp(B(HgBat), 10.0, 1.0, 100.0),
    comp(B(Griewank), 20.0, 1.0, 300.0),
];
const CF22_3: &[Component] = &[
    comp(B(ExpandedSchafferF6), 20.0, 5e-4, 0.0),
    comp(B(Schwefel), 20.0, 1.0, 200.0),
    comp(B(Griewank), 30.0, 10.0, 300.0),
    comp(B(Rosenbrock), 30.0, 1.0, 400.0),
    comp(B(Rastrigin), 20.0, 10.0, 200.0),
];
const CF22_4: &[Component] = &[
    comp(B(HgBat), 10.0, 10.0, 0.0),
    comp(B(Rastrigin), 20.0, 10.0, 300.0),
    comp(B(Schwefel), 30.0, 2.5, 500.0),
    comp(B(BentCigar), 40.0, 1e-26, 100.0),
    comp(B(HighConditionedElliptic), 50.0, 1e-6, 400.0),
    comp(B(ExpandedSchafferF6), 60.0, 5e-4, 200.0),
];

const CEC2022: &[Entry] = &[
    entry("Shifted and full Rotated Zakharov", C::Unimodal, 300.0, Recipe::Basic(Zakharov)),
    entry("Shifted and full Rotated Rosenbrock", C::Basic, 400.0, Recipe::Basic(Rosenbrock)),
    entry("Shifted and full Rotated Expanded Schaffer F6", C::Basic, 600.0, Recipe::Basic(ExpandedSchafferF6)),
    entry("Shifted and full Rotated Non-Continuous Rastrigin", C::Basic, 800.0, Recipe::Basic(NonContinuousRastrigin)),
    entry("Shifted and full Rotated Levy", C::Basic, 900.0, Recipe::Basic(Levy)),
    entry("Hybrid Function 1 (N=3)", C::Hybrid, 1800.0, Recipe::Hybrid(HF22_1)),
    entry("Hybrid Function 2 (N=6)", C::Hybrid, 2000.0, Recipe::Hybrid(HF22_2)),
    entry("Hybrid Function 3 (N=5)", C::Hybrid, 2200.0, Recipe::Hybrid(HF22_3)),
    entry("Composition Function 1 (N=5)", C::Composition, 2300.0, Recipe::Composition(CF22_1)),
    entry("Composition Function 2 (N=4)", C::Composition, 2400.0, Recipe::Composition(CF22_2)),
    entry("Composition Function 3 (N=5)", C::Composition, 2600.0, Recipe::Composition(CF22_3)),
    entry("Composition Function 4 (N=6)", C::Composition, 2700.0, Recipe::Composition(CF22_4)),
];

/// `z = scale · R (x − o)`.
#[derive(Debug, Clone, PartialEq)]
struct Transform {
    shift: Vec<f64>,
    rotation: DMatrix<f64>,
}

impl Transform {
    fn apply(&self, x: &[f64], scale: f64) -> Vec<f64> {
        let d = DVector::from_iterator(x.len(), x.iter().zip(&self.shift).map(|(a, o)| a - o));
        (&self.rotation * d).iter().map(|v| v * scale).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Body {
    Basic {
        base: BaseFn,
        transform: Transform,
    },
    Hybrid {
        transform: Transform,
        permutation: Vec<usize>,
        blocks: Vec<(BaseFn, usize)>,
    },
    Composition {
        components: Vec<ComposedPart>,
    },
}

#[derive(Debug, Clone, PartialEq)]
struct ComposedPart {
    body: Body,
    sigma: f64,
    lambda: f64,
    bias: f64,
}

impl Body {
    fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Body::Basic { base, transform } => base.eval(&transform.apply(x, base.input_scale())),
            Body::Hybrid {
                transform,
                permutation,
                blocks,
            } => {
                let z = transform.apply(x, 1.0);
                let mut offset = 0;
                let mut total = 0.0;
                for (base, len) in blocks {
                    let scale = base.input_scale();
                    let block: Vec<f64> = permutation[offset..offset + len].iter().map(|&p| z[p] * scale).collect();
                    total += base.eval(&block);
                    offset += len;
                }
                total
            }
            Body::Composition { components } => composition_value(components, x),
        }
    }

    fn transform(&self) -> &Transform {
        match self {
            Body::Basic { transform, .. } | Body::Hybrid { transform, .. } => transform,
            Body::Composition { components } => components[0].body.transform(),
        }
    }
}

/// Σ wₖ(λₖ gₖ(x) + biasₖ) with wₖ ∝ exp(−‖x − oₖ‖²/(2Dσₖ²)) / ‖x − oₖ‖.
fn composition_value(components: &[ComposedPart], x: &[f64]) -> f64 {
    let dim = x.len() as f64;
    let mut weights = Vec::with_capacity(components.len());
    for c in components {
        let d2: f64 = x
            .iter()
            .zip(&c.body.transform().shift)
            .map(|(a, o)| (a - o) * (a - o))
            .sum();
        if d2 == 0.0 {
            // Exactly on a component optimum: that component alone.
            return c.lambda * c.body.eval(x) + c.bias;
        }
        weights.push((-d2 / (2.0 * dim * c.sigma * c.sigma)).exp() / d2.sqrt());
    }
    let total: f64 = weights.iter().sum();
    if total == 0.0 || !total.is_finite() {
        weights.iter_mut().for_each(|w| *w = 1.0);
    }
    let total: f64 = weights.iter().sum();
    components
        .iter()
        .zip(&weights)
        .map(|(c, w)| w / total * (c.lambda * c.body.eval(x) + c.bias))
        .sum()
}

/// One generated benchmark problem; evaluation is pure and thread-safe.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkInstance {
    suite: Suite,
    id: usize,
    dim: usize,
    seed: u64,
    rotation_seed: u64,
    bias: f64,
    body: Body,
}

impl BenchmarkInstance {
    pub fn suite(&self) -> Suite {
        self.suite
    }

    pub fn function_id(&self) -> usize {
        self.id
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn class(&self) -> FunctionClass {
        self.suite.entry(self.id).map(|e| e.class).expect("instance built from a valid entry")
    }

    /// Location of the global optimum (the first component for compositions).
    pub fn shift(&self) -> &[f64] {
        &self.body.transform().shift
    }

    pub fn rotation(&self) -> &DMatrix<f64> {
        &self.body.transform().rotation
    }

    /// Short stable identifier, e.g. `cec2017-F3-D10`.
    pub fn label(&self) -> String {
        format!("{}-F{}-D{}", self.suite, self.id, self.dim)
    }

    pub fn space(&self) -> SearchSpace {
        SearchSpace::uniform(self.dim, -SEARCH_BOUND, SEARCH_BOUND).expect("fixed bounds are valid")
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.body.eval(x) + self.bias
    }

    pub fn descriptor(&self) -> InstanceDescriptor {
        InstanceDescriptor {
            suite: self.suite,
            function_id: self.id,
            dim: self.dim,
            seed: self.seed,
            rotation_seed: (self.rotation_seed != self.seed).then_some(self.rotation_seed),
            bias: self.bias,
        }
    }
}

impl Objective for BenchmarkInstance {
    fn evaluate(&self, x: &[f64]) -> f64 {
        BenchmarkInstance::evaluate(self, x)
    }
}

pub fn make_instance(suite: Suite, function_id: usize, dim: usize, seed: u64) -> Result<BenchmarkInstance> {
    make_instance_with_rotation_seed(suite, function_id, dim, seed, seed)
}

/// Like [`make_instance`] but drawing rotations from `rotation_seed`, leaving
/// shifts and permutations tied to `seed`.
pub fn make_instance_with_rotation_seed(
    suite: Suite,
    function_id: usize,
    dim: usize,
    seed: u64,
    rotation_seed: u64,
) -> Result<BenchmarkInstance> {
    let entry = suite.entry(function_id)?;
    if dim == 0 {
        return Err(Error::config("instance dimension must be positive"));
    }
    let streams = InstanceStreams {
        seed,
        rotation_seed,
        prefix: (suite.code() << 56) | ((function_id as u64) << 40) | ((dim as u64) << 8),
    };
    let body = match entry.recipe {
        Recipe::Basic(base) => Body::Basic {
            base,
            transform: streams.transform(0, dim),
        },
        Recipe::Hybrid(blocks) => hybrid_body(blocks, &streams, 0, dim)?,
        Recipe::Composition(parts) => {
            let components = parts
                .iter()
                .enumerate()
                .map(|(k, c)| {
                    let slot = k as u64 + 1;
                    let body = match c.part {
                        Part::Basic(base) => Body::Basic {
                            base,
                            transform: streams.transform(slot, dim),
                        },
                        Part::Hybrid(blocks) => hybrid_body(blocks, &streams, slot, dim)?,
                    };
                    Ok(ComposedPart {
                        body,
                        sigma: c.sigma,
                        lambda: c.lambda,
                        bias: c.bias,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Body::Composition { components }
        }
    };
    Ok(BenchmarkInstance {
        suite,
        id: function_id,
        dim,
        seed,
        rotation_seed,
        bias: entry.bias,
        body,
    })
}

fn hybrid_body(blocks: Blocks, streams: &InstanceStreams, slot: u64, dim: usize) -> Result<Body> {
    let sizes = block_sizes(blocks, dim)?;
    let mut permutation: Vec<usize> = (0..dim).collect();
    permutation.shuffle(&mut streams.stream(slot, Stream::Permutation));
    Ok(Body::Hybrid {
        transform: streams.transform(slot, dim),
        permutation,
        blocks: blocks.iter().map(|(b, _)| *b).zip(sizes).collect(),
    })
}

/// `round(pₖ·D)` for every block but the last, which takes the remainder; every
/// block keeps at least one dimension.
fn block_sizes(blocks: Blocks, dim: usize) -> Result<Vec<usize>> {
    let n = blocks.len();
    if dim < n {
        return Err(Error::config(format!("hybrid with {n} blocks needs at least {n} dimensions, got {dim}")));
    }
    let mut sizes: Vec<usize> = blocks[..n - 1]
        .iter()
        .map(|(_, p)| ((p * dim as f64).round() as usize).max(1))
        .collect();
    // Shrink the largest leading blocks until the last one fits.
    while sizes.iter().sum::<usize>() > dim - 1 {
        let (i, _) = sizes.iter().enumerate().max_by_key(|(i, s)| (**s, usize::MAX - i)).unwrap();
        sizes[i] -= 1;
    }
    let used: usize = sizes.iter().sum();
    sizes.push(dim - used);
    Ok(sizes)
}

#[derive(Clone, Copy)]
enum Stream {
    Shift = 0,
    Rotation = 1,
    Permutation = 2,
}

struct InstanceStreams {
    seed: u64,
    rotation_seed: u64,
    prefix: u64,
}

impl InstanceStreams {
    fn stream(&self, slot: u64, kind: Stream) -> ChaCha8Rng {
        let seed = match kind {
            Stream::Rotation => self.rotation_seed,
            _ => self.seed,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(self.prefix | (slot << 2) | kind as u64);
        rng
    }

    fn transform(&self, slot: u64, dim: usize) -> Transform {
        let mut rng = self.stream(slot, Stream::Shift);
        let shift = (0..dim).map(|_| rng.random_range(-SHIFT_BOUND..SHIFT_BOUND)).collect();
        let rotation = random_rotation(dim, &mut self.stream(slot, Stream::Rotation));
        Transform { shift, rotation }
    }
}

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// signs of `R`'s diagonal folded into `Q`.
pub fn random_rotation<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::<f64>::from_fn(dim, dim, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Serializable pointer to an instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceDescriptor {
    pub suite: Suite,
    pub function_id: usize,
    pub dim: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation_seed: Option<u64>,
    pub bias: f64,
}

impl InstanceDescriptor {
    /// Rebuild the instance; fails if the recorded bias no longer matches.
    pub fn build(&self) -> Result<BenchmarkInstance> {
        let inst = make_instance_with_rotation_seed(
            self.suite,
            self.function_id,
            self.dim,
            self.seed,
            self.rotation_seed.unwrap_or(self.seed),
        )?;
        if inst.bias() != self.bias {
            return Err(Error::config(format!(
                "descriptor bias {} does not match {} for {}",
                self.bias,
                inst.bias(),
                inst.label()
            )));
        }
        Ok(inst)
    }
}

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

/// TOML list of instance descriptors, `[[instance]]` tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    #[serde(default, rename = "instance")]
    pub instances: Vec<InstanceDescriptor>,
}

impl Manifest {
    pub fn new(instances: Vec<InstanceDescriptor>) -> Self {
        Self {
            schema_version: MANIFEST_SCHEMA_VERSION,
            instances,
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config(format!("manifest serialization: {e}")))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let m: Manifest = toml::from_str(text).map_err(|e| Error::config(format!("manifest parse: {e}")))?;
        if m.schema_version != MANIFEST_SCHEMA_VERSION {
            return Err(Error::config(format!(
                "manifest schema version {} unsupported (expected {MANIFEST_SCHEMA_VERSION})",
                m.schema_version
            )));
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn orthogonality_error(r: &DMatrix<f64>) -> f64 {
        let n = r.nrows();
        (r.transpose() * r - DMatrix::<f64>::identity(n, n)).amax()
    }

    #[test]
    fn rotation_is_orthogonal() {
        for &d in &[1usize, 2, 10, 50] {
            let inst = make_instance(Suite::Cec2017, 1, d, 3).unwrap();
            assert!(orthogonality_error(inst.rotation()) <= 1e-10);
        }
    }

    #[test]
    fn deterministic_generation() {
        let a = make_instance(Suite::Cec2017, 13, 10, 77).unwrap();
        let b = make_instance(Suite::Cec2017, 13, 10, 77).unwrap();
        assert_eq!(a, b);
        let c = make_instance(Suite::Cec2017, 13, 10, 78).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn biases_follow_tables() {
        let inst = make_instance(Suite::Cec2017, 1, 10, 5).unwrap();
        assert_eq!(inst.evaluate(inst.shift()), 100.0);
        assert_eq!(make_instance(Suite::Cec2022, 1, 10, 5).unwrap().bias(), 300.0);
        let biases17: Vec<f64> = Suite::Cec2017.function_ids().map(|i| Suite::Cec2017.function_bias(i).unwrap()).collect();
        assert_eq!(biases17, (1..=29).map(|i| if i == 1 { 100.0 } else { 100.0 * (i + 1) as f64 }).collect::<Vec<_>>());
        let biases22: Vec<f64> = Suite::Cec2022.function_ids().map(|i| Suite::Cec2022.function_bias(i).unwrap()).collect();
        assert_eq!(
            biases22,
            vec![300.0, 400.0, 600.0, 800.0, 900.0, 1800.0, 2000.0, 2200.0, 2300.0, 2400.0, 2600.0, 2700.0]
        );
    }

    #[test]
    fn invalid_ids() {
        assert!(make_instance(Suite::Cec2017, 0, 10, 1).is_err());
        assert!(make_instance(Suite::Cec2017, 30, 10, 1).is_err());
        assert!(make_instance(Suite::Cec2022, 13, 10, 1).is_err());
        assert!(make_instance(Suite::Cec2017, 19, 3, 1).is_err());
    }

    #[test]
    fn optimum_matches_bias_for_every_function() {
        for suite in [Suite::Cec2017, Suite::Cec2022] {
            for id in suite.function_ids() {
                for dim in [10, 20] {
                    let inst = make_instance(suite, id, dim, 11).unwrap();
                    let v = inst.evaluate(inst.shift());
                    assert!((v - inst.bias()).abs() <= 1e-8, "{} = {v}", inst.label());
                }
            }
        }
    }

    #[test]
    fn at_least_bias_everywhere() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for suite in [Suite::Cec2017, Suite::Cec2022] {
            for id in suite.function_ids() {
                let inst = make_instance(suite, id, 10, 2).unwrap();
                for _ in 0..50 {
                    let x: Vec<f64> = (0..10).map(|_| rng.random_range(-100.0..100.0)).collect();
                    assert!(inst.evaluate(&x) >= inst.bias() - 1e-9, "{}", inst.label());
                }
            }
        }
    }

    #[test]
    fn bent_cigar_optimum_is_strict() {
        let inst = make_instance(Suite::Cec2017, 1, 10, 21).unwrap();
        let at = inst.evaluate(inst.shift());
        for j in 0..10 {
            for eps in [1e-3, -1e-3] {
                let mut x = inst.shift().to_vec();
                x[j] += eps;
                assert!(inst.evaluate(&x) > at);
            }
        }
    }

    #[test]
    fn rotation_seed_does_not_move_optimum() {
        for id in [1, 2, 4, 9, 12, 22] {
            let a = make_instance(Suite::Cec2017, id, 10, 4).unwrap();
            let b = make_instance_with_rotation_seed(Suite::Cec2017, id, 10, 4, 999).unwrap();
            assert_ne!(a.rotation(), b.rotation());
            assert_eq!(a.shift(), b.shift());
            assert!((a.evaluate(a.shift()) - b.evaluate(b.shift())).abs() <= 1e-8);
        }
    }

    #[test]
    fn shift_within_range() {
        let inst = make_instance(Suite::Cec2022, 2, 20, 6).unwrap();
        assert!(inst.shift().iter().all(|v| v.abs() <= SHIFT_BOUND));
    }

    #[test]
    fn block_partition() {
        assert_eq!(block_sizes(HF17_1, 10).unwrap(), vec![2, 4, 4]);
        assert_eq!(block_sizes(HF17_7, 10).unwrap(), vec![1, 2, 2, 2, 3]);
        assert_eq!(block_sizes(HF17_10, 6).unwrap(), vec![1, 1, 1, 1, 1, 1]);
        assert_eq!(block_sizes(HF17_1, 3).unwrap(), vec![1, 1, 1]);
        for d in 6..60 {
            let s = block_sizes(HF17_10, d).unwrap();
            assert_eq!(s.iter().sum::<usize>(), d);
            assert!(s.iter().all(|&n| n >= 1));
        }
    }

    #[test]
    fn manifest_roundtrip() {
        let descs = vec![
            make_instance(Suite::Cec2017, 3, 10, 1).unwrap().descriptor(),
            make_instance_with_rotation_seed(Suite::Cec2022, 9, 20, 2, 5).unwrap().descriptor(),
        ];
        let text = Manifest::new(descs.clone()).to_toml().unwrap();
        assert!(text.contains("schema_version = 1"));
        let back = Manifest::from_toml(&text).unwrap();
        assert_eq!(back.instances, descs);
        let rebuilt = back.instances[1].build().unwrap();
        assert_eq!(rebuilt, make_instance_with_rotation_seed(Suite::Cec2022, 9, 20, 2, 5).unwrap());

        let mut bad = descs[0].clone();
        bad.bias = 1.0;
        assert!(bad.build().is_err());
        assert!(Manifest::from_toml("schema_version = 2\n").is_err());
    }
}
