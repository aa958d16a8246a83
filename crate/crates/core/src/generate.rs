//! Seeded instance generators.
//!
//! Every generator draws from `ChaCha8Rng::seed_from_u64(seed)`, so output
//! depends only on the configuration.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instance::{Instance, Side};
use crate::robust::{ErrorSpec, WeightFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeneratorMode {
    /// Independent uniform permutations.
    Uniform,
    /// All boys share one list and all girls share one; one stable matching.
    MasterList,
    /// Cyclic lists (boy `i` ranks girl `i + j` at position `j`, girl `j`
    /// ranks boy `j + 1 + i` at position `i`) under random relabelling; `n`
    /// stable matchings on a chain.
    AdversarialSwap,
}

impl fmt::Display for GeneratorMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GeneratorMode::Uniform => "uniform",
            GeneratorMode::MasterList => "master-list",
            GeneratorMode::AdversarialSwap => "adversarial-swap",
        })
    }
}

impl FromStr for GeneratorMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform" => Ok(GeneratorMode::Uniform),
            "master-list" => Ok(GeneratorMode::MasterList),
            "adversarial-swap" => Ok(GeneratorMode::AdversarialSwap),
            other => Err(format!("unknown generator mode `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GeneratorConfig {
    pub n: usize,
    pub seed: u64,
    pub mode: GeneratorMode,
}

fn permutation(n: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(rng);
    v
}

/// Panics if `cfg.n == 0`.
pub fn generate(cfg: &GeneratorConfig) -> Instance {
    assert!(cfg.n > 0, "generator needs n >= 1");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    random_instance(cfg.n, cfg.mode, &mut rng)
}

pub fn random_instance(n: usize, mode: GeneratorMode, rng: &mut impl Rng) -> Instance {
    let (boys, girls) = match mode {
        GeneratorMode::Uniform => {
            let boys = (0..n).map(|_| permutation(n, rng)).collect();
            let girls = (0..n).map(|_| permutation(n, rng)).collect();
            (boys, girls)
        }
        GeneratorMode::MasterList => {
            let b = permutation(n, rng);
            let g = permutation(n, rng);
            (vec![b; n], vec![g; n])
        }
        GeneratorMode::AdversarialSwap => {
            let relabel_boy = permutation(n, rng);
            let relabel_girl = permutation(n, rng);
            let mut boys = vec![Vec::new(); n];
            let mut girls = vec![Vec::new(); n];
            for i in 0..n {
                boys[relabel_boy[i]] = (0..n).map(|j| relabel_girl[(i + j) % n]).collect();
                girls[relabel_girl[i]] = (0..n).map(|j| relabel_boy[(i + 1 + j) % n]).collect();
            }
            (boys, girls)
        }
    };
    Instance::new(boys, girls).expect("generated lists are permutations")
}

/// One error on a random agent of a random side (or of `side`).
pub fn random_error(n: usize, side: Option<Side>, rng: &mut impl Rng) -> ErrorSpec {
    let side = side.unwrap_or_else(|| if rng.random::<bool>() { Side::Boy } else { Side::Girl });
    ErrorSpec {
        side,
        agent: rng.random_range(0..n),
        new_list: permutation(n, rng),
    }
}

/// Uniform weights in `[lo, hi)`.
pub fn random_weights(n: usize, lo: f64, hi: f64, rng: &mut impl Rng) -> WeightFunction {
    let rows = (0..n)
        .map(|_| (0..n).map(|_| rng.random_range(lo..hi)).collect())
        .collect();
    WeightFunction::new(rows).expect("finite weights")
}
