//! Seeded instance generators.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Instance, Item};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `w ~ U(w_min, 1)`, `v ~ U(0, 1)`.
    Uniform,
    /// `w ~ U(w_min, 1)`, `v = w + U(0, noise)`.
    Correlated,
    /// `w ~ U(0, 1/(2k))`, `v ~ U(0, 1)`: any `k` items fit by weight.
    CardinalityTight,
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Family::Uniform),
            "correlated" => Ok(Family::Correlated),
            "cardinality-tight" => Ok(Family::CardinalityTight),
            other => Err(Error::input(format!("unknown generator family '{other}'"))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Uniform => "uniform",
            Family::Correlated => "correlated",
            Family::CardinalityTight => "cardinality-tight",
        })
    }
}

fn default_w_min() -> f64 {
    0.05
}

fn default_noise() -> f64 {
    0.1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub family: Family,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub seed: u64,
    #[serde(default = "default_w_min")]
    pub w_min: f64,
    #[serde(default = "default_noise")]
    pub noise: f64,
}

impl GeneratorSpec {
    pub fn new(family: Family, n: usize, m: usize, k: usize, seed: u64) -> Self {
        GeneratorSpec {
            family,
            n,
            m,
            k,
            seed,
            w_min: default_w_min(),
            noise: default_noise(),
        }
    }
}

/// Numbers are rounded to six decimals so instances print compactly and
/// convert to small rationals.
fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

pub fn generate(spec: &GeneratorSpec) -> Result<Instance> {
    if spec.n == 0 || spec.m == 0 || spec.k == 0 {
        return Err(Error::input("n, m and k must be positive"));
    }
    if !(spec.w_min >= 0.0 && spec.w_min <= 1.0) || !(spec.noise >= 0.0) {
        return Err(Error::input("weight range or noise out of bounds"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let items = (0..spec.n)
        .map(|i| {
            let (w, v) = match spec.family {
                Family::Uniform => {
                    let w = round6(rng.gen_range(spec.w_min..=1.0));
                    (w, round6(rng.gen_range(0.0..1.0)))
                }
                Family::Correlated => {
                    let w = round6(rng.gen_range(spec.w_min..=1.0));
                    (w, round6(w + rng.gen_range(0.0..=spec.noise)))
                }
                Family::CardinalityTight => {
                    let cap = 1.0 / (2.0 * spec.k as f64);
                    // floor keeps the rounded weight below the cap
                    let w = (rng.gen_range(0.0..=cap) * 1e6).floor() / 1e6;
                    (w, round6(rng.gen_range(0.0..1.0)))
                }
            };
            Item::new(i as u32, w, v)
        })
        .collect();
    Instance::new(items, spec.m, spec.k)
}
