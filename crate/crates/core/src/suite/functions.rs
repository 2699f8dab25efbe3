//! Base functions, each shifted internally so that its global minimum is 0 at
//! the origin. `input_scale` maps the `[−100, 100]` search box onto each
//! function's customary domain.

use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseFn {
    Sphere,
    BentCigar,
    Discus,
    HighConditionedElliptic,
    Zakharov,
    Rosenbrock,
    Rastrigin,
    ExpandedSchafferF6,
    SchafferF7,
    LunacekBiRastrigin,
    NonContinuousRastrigin,
    Levy,
    Schwefel,
    Ackley,
    Griewank,
    Weierstrass,
    Katsuura,
    HappyCat,
    HgBat,
    ExpandedGriewankRosenbrock,
}

impl BaseFn {
    pub const ALL: [BaseFn; 20] = [
        BaseFn::Sphere,
        BaseFn::BentCigar,
        BaseFn::Discus,
        BaseFn::HighConditionedElliptic,
        BaseFn::Zakharov,
        BaseFn::Rosenbrock,
        BaseFn::Rastrigin,
        BaseFn::ExpandedSchafferF6,
        BaseFn::SchafferF7,
        BaseFn::LunacekBiRastrigin,
        BaseFn::NonContinuousRastrigin,
        BaseFn::Levy,
        BaseFn::Schwefel,
        BaseFn::Ackley,
        BaseFn::Griewank,
        BaseFn::Weierstrass,
        BaseFn::Katsuura,
        BaseFn::HappyCat,
        BaseFn::HgBat,
        BaseFn::ExpandedGriewankRosenbrock,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            BaseFn::Sphere => "sphere",
            BaseFn::BentCigar => "bent_cigar",
            BaseFn::Discus => "discus",
            BaseFn::HighConditionedElliptic => "high_conditioned_elliptic",
            BaseFn::Zakharov => "zakharov",
            BaseFn::Rosenbrock => "rosenbrock",
            BaseFn::Rastrigin => "rastrigin",
            BaseFn::ExpandedSchafferF6 => "expanded_schaffer_f6",
            BaseFn::SchafferF7 => "schaffer_f7",
            BaseFn::LunacekBiRastrigin => "lunacek_bi_rastrigin",
            BaseFn::NonContinuousRastrigin => "non_continuous_rastrigin",
            BaseFn::Levy => "levy",
            BaseFn::Schwefel => "schwefel",
            BaseFn::Ackley => "ackley",
            BaseFn::Griewank => "griewank",
            BaseFn::Weierstrass => "weierstrass",
            BaseFn::Katsuura => "katsuura",
            BaseFn::HappyCat => "happy_cat",
            BaseFn::HgBat => "hgbat",
            BaseFn::ExpandedGriewankRosenbrock => "expanded_griewank_rosenbrock",
        }
    }

    /// Multiplier applied to the rotated, shifted input before evaluation.
    pub fn input_scale(&self) -> f64 {
        match self {
            BaseFn::Rosenbrock => 2.048 / 100.0,
            BaseFn::Rastrigin | BaseFn::NonContinuousRastrigin => 5.12 / 100.0,
            BaseFn::LunacekBiRastrigin => 10.0 / 100.0,
            BaseFn::Schwefel => 1000.0 / 100.0,
            BaseFn::Griewank => 600.0 / 100.0,
            BaseFn::Weierstrass => 0.5 / 100.0,
            BaseFn::Katsuura | BaseFn::HappyCat | BaseFn::HgBat | BaseFn::ExpandedGriewankRosenbrock => 5.0 / 100.0,
            _ => 1.0,
        }
    }

    pub fn eval(&self, z: &[f64]) -> f64 {
        match self {
            BaseFn::Sphere => z.iter().map(|v| v * v).sum(),
            BaseFn::BentCigar => bent_cigar(z),
            BaseFn::Discus => discus(z),
            BaseFn::HighConditionedElliptic => elliptic(z),
            BaseFn::Zakharov => zakharov(z),
            BaseFn::Rosenbrock => rosenbrock(z),
            BaseFn::Rastrigin => rastrigin(z),
            BaseFn::ExpandedSchafferF6 => expanded_schaffer_f6(z),
            BaseFn::SchafferF7 => schaffer_f7(z),
            BaseFn::LunacekBiRastrigin => lunacek_bi_rastrigin(z),
            BaseFn::NonContinuousRastrigin => non_continuous_rastrigin(z),
            BaseFn::Levy => levy(z),
            BaseFn::Schwefel => schwefel(z),
            BaseFn::Ackley => ackley(z),
            BaseFn::Griewank => griewank(z),
            BaseFn::Weierstrass => weierstrass(z),
            BaseFn::Katsuura => katsuura(z),
            BaseFn::HappyCat => happy_cat(z),
            BaseFn::HgBat => hgbat(z),
            BaseFn::ExpandedGriewankRosenbrock => expanded_griewank_rosenbrock(z),
        }
    }
}

impl fmt::Display for BaseFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for BaseFn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BaseFn::ALL
            .into_iter()
            .find(|b| b.tag() == s)
            .ok_or_else(|| Error::config(format!("unknown base function '{s}'")))
    }
}

/// Evaluate the base function named by `tag` at `z`.
pub fn base_function(tag: &str, z: &[f64]) -> Result<f64> {
    if z.is_empty() {
        return Err(Error::Empty("base function needs at least one coordinate".into()));
    }
    Ok(tag.parse::<BaseFn>()?.eval(z))
}

/// z₁² + 10⁶ Σ_{i≥2} zᵢ²
fn bent_cigar(z: &[f64]) -> f64 {
    z[0] * z[0] + 1e6 * z[1..].iter().map(|v| v * v).sum::<f64>()
}

/// 10⁶ z₁² + Σ_{i≥2} zᵢ²
fn discus(z: &[f64]) -> f64 {
    1e6 * z[0] * z[0] + z[1..].iter().map(|v| v * v).sum::<f64>()
}

/// Σ (10⁶)^{(i−1)/(D−1)} zᵢ²
fn elliptic(z: &[f64]) -> f64 {
    let d = z.len();
    if d == 1 {
        return z[0] * z[0];
    }
    z.iter()
        .enumerate()
        .map(|(i, v)| 1e6f64.powf(i as f64 / (d - 1) as f64) * v * v)
        .sum()
}

/// Σ zᵢ² + (Σ ½ i zᵢ)² + (Σ ½ i zᵢ)⁴
fn zakharov(z: &[f64]) -> f64 {
    let s1: f64 = z.iter().map(|v| v * v).sum();
    let s2: f64 = z.iter().enumerate().map(|(i, v)| 0.5 * (i + 1) as f64 * v).sum();
    s1 + s2 * s2 + s2.powi(4)
}

/// Σ 100(yᵢ² − yᵢ₊₁)² + (yᵢ − 1)² with y = z + 1.
fn rosenbrock(z: &[f64]) -> f64 {
    z.windows(2)
        .map(|w| {
            let (a, b) = (w[0] + 1.0, w[1] + 1.0);
            100.0 * (a * a - b).powi(2) + (a - 1.0).powi(2)
        })
        .sum()
}

/// Σ zᵢ² − 10 cos(2π zᵢ) + 10
fn rastrigin(z: &[f64]) -> f64 {
    z.iter().map(|v| v * v - 10.0 * (2.0 * PI * v).cos() + 10.0).sum()
}

fn schaffer_pair(x: f64, y: f64) -> f64 {
    let s = x * x + y * y;
    let num = s.sqrt().sin().powi(2) - 0.5;
    let den = (1.0 + 0.001 * s).powi(2);
    0.5 + num / den
}

/// Σ g(zᵢ, zᵢ₊₁) cyclically, g(x, y) = ½ + (sin²√(x²+y²) − ½)/(1 + 0.001(x²+y²))²
fn expanded_schaffer_f6(z: &[f64]) -> f64 {
    let d = z.len();
    (0..d).map(|i| schaffer_pair(z[i], z[(i + 1) % d])).sum()
}

/// [1/(D−1) Σ (√sᵢ + √sᵢ sin²(50 sᵢ^0.2))]², sᵢ = √(zᵢ² + zᵢ₊₁²)
fn schaffer_f7(z: &[f64]) -> f64 {
    let d = z.len();
    if d < 2 {
        return 0.0;
    }
    let sum: f64 = z
        .windows(2)
        .map(|w| {
            let s = (w[0] * w[0] + w[1] * w[1]).sqrt();
            let r = s.sqrt();
            r + r * (50.0 * s.powf(0.2)).sin().powi(2)
        })
        .sum();
    (sum / (d - 1) as f64).powi(2)
}

/// min(Σ(x̂ − μ₀)², dD + sΣ(x̂ − μ₁)²) + 10Σ(1 − cos 2π(x̂ − μ₀)), x̂ = z + μ₀
fn lunacek_bi_rastrigin(z: &[f64]) -> f64 {
    let d = z.len() as f64;
    let mu0 = 2.5;
    let s = 1.0 - 1.0 / (2.0 * (d + 20.0).sqrt() - 8.2);
    let mu1 = -((mu0 * mu0 - 1.0) / s).sqrt();
    let mut near = 0.0;
    let mut far = 0.0;
    let mut ripple = 0.0;
    for v in z {
        let xh = v + mu0;
        near += (xh - mu0).powi(2);
        far += (xh - mu1).powi(2);
        ripple += 1.0 - (2.0 * PI * v).cos();
    }
    near.min(d + s * far) + 10.0 * ripple
}

/// Rastrigin on y, yᵢ = zᵢ if |zᵢ| ≤ ½ else round(2zᵢ)/2
fn non_continuous_rastrigin(z: &[f64]) -> f64 {
    let y: Vec<f64> = z
        .iter()
        .map(|&v| if v.abs() <= 0.5 { v } else { (2.0 * v).round() / 2.0 })
        .collect();
    rastrigin(&y)
}

/// Levy with wᵢ = 1 + zᵢ/4
fn levy(z: &[f64]) -> f64 {
    let w: Vec<f64> = z.iter().map(|v| 1.0 + v / 4.0).collect();
    let d = w.len();
    let head = (PI * w[0]).sin().powi(2);
    let body: f64 = w[..d - 1]
        .iter()
        .map(|wi| (wi - 1.0).powi(2) * (1.0 + 10.0 * (PI * wi + 1.0).sin().powi(2)))
        .sum();
    let last = w[d - 1];
    let tail = (last - 1.0).powi(2) * (1.0 + (2.0 * PI * last).sin().powi(2));
    head + body + tail
}

const SCHWEFEL_OFFSET: f64 = 420.968_746_227_503_6;
const SCHWEFEL_CONST: f64 = 418.982_887_272_433_8;

/// 418.98·D − Σ g(zᵢ + 420.97), with the out-of-range fold of the modified
/// Schwefel function.
fn schwefel(z: &[f64]) -> f64 {
    let d = z.len() as f64;
    let sum: f64 = z
        .iter()
        .map(|v| {
            let y = v + SCHWEFEL_OFFSET;
            if y > 500.0 {
                let m = 500.0 - y % 500.0;
                m * m.abs().sqrt().sin() - (y - 500.0).powi(2) / (10_000.0 * d)
            } else if y < -500.0 {
                let m = y.abs() % 500.0 - 500.0;
                m * m.abs().sqrt().sin() - (y + 500.0).powi(2) / (10_000.0 * d)
            } else {
                y * y.abs().sqrt().sin()
            }
        })
        .sum();
    SCHWEFEL_CONST * d - sum
}

/// −20 exp(−0.2 √(Σz²/D)) − exp(Σcos(2πz)/D) + 20 + e
fn ackley(z: &[f64]) -> f64 {
    let d = z.len() as f64;
    let sq: f64 = z.iter().map(|v| v * v).sum::<f64>() / d;
    let cs: f64 = z.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>() / d;
    (-20.0 * (-0.2 * sq.sqrt()).exp() - cs.exp() + 20.0 + E).max(0.0)
}

/// Σz²/4000 − Π cos(zᵢ/√i) + 1
fn griewank(z: &[f64]) -> f64 {
    let s: f64 = z.iter().map(|v| v * v).sum::<f64>() / 4000.0;
    let p: f64 = z
        .iter()
        .enumerate()
        .map(|(i, v)| (v / ((i + 1) as f64).sqrt()).cos())
        .product();
    s - p + 1.0
}

/// a = 0.5, b = 3, k_max = 20
fn weierstrass(z: &[f64]) -> f64 {
    let (a, b, kmax) = (0.5f64, 3.0f64, 20);
    let d = z.len() as f64;
    let offset: f64 = (0..=kmax).map(|k| a.powi(k) * (PI * b.powi(k)).cos()).sum();
    let sum: f64 = z
        .iter()
        .map(|v| {
            (0..=kmax)
                .map(|k| a.powi(k) * (2.0 * PI * b.powi(k) * (v + 0.5)).cos())
                .sum::<f64>()
        })
        .sum();
    sum - d * offset
}

/// 10/D² Π(1 + i Σ_{j=1..32} |2ʲzᵢ − round(2ʲzᵢ)|/2ʲ)^{10/D^1.2} − 10/D²
fn katsuura(z: &[f64]) -> f64 {
    let d = z.len() as f64;
    let expo = 10.0 / d.powf(1.2);
    let prod: f64 = z
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let inner: f64 = (1..=32)
                .map(|j| {
                    let t = 2f64.powi(j) * v;
                    (t - t.round()).abs() / 2f64.powi(j)
                })
                .sum();
            (1.0 + (i + 1) as f64 * inner).powf(expo)
        })
        .product();
    let k = 10.0 / (d * d);
    k * prod - k
}

/// |Σy² − D|^¼ + (½Σy² + Σy)/D + ½ with y = z − 1
fn happy_cat(z: &[f64]) -> f64 {
    let d = z.len() as f64;
    let sq: f64 = z.iter().map(|v| (v - 1.0).powi(2)).sum();
    let s: f64 = z.iter().map(|v| v - 1.0).sum();
    (sq - d).abs().powf(0.25) + (0.5 * sq + s) / d + 0.5
}

/// |(Σy²)² − (Σy)²|^½ + (½Σy² + Σy)/D + ½ with y = z − 1
fn hgbat(z: &[f64]) -> f64 {
    let d = z.len() as f64;
    let sq: f64 = z.iter().map(|v| (v - 1.0).powi(2)).sum();
    let s: f64 = z.iter().map(|v| v - 1.0).sum();
    (sq * sq - s * s).abs().sqrt() + (0.5 * sq + s) / d + 0.5
}

/// Σ G(R(yᵢ, yᵢ₊₁)) cyclically, y = z + 1, R the 2-D Rosenbrock term and
/// G(t) = t²/4000 − cos t + 1.
fn expanded_griewank_rosenbrock(z: &[f64]) -> f64 {
    let d = z.len();
    (0..d)
        .map(|i| {
            let (a, b) = (z[i] + 1.0, z[(i + 1) % d] + 1.0);
            let t = 100.0 * (a * a - b).powi(2) + (a - 1.0).powi(2);
            t * t / 4000.0 - t.cos() + 1.0
        })
        .sum()
}
