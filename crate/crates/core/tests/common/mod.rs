#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use robust_stable::{generate, GeneratorConfig, GeneratorMode, Instance, Matching};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mostly uniform instances with cyclic and perturbed cyclic ones mixed in, `n` in
/// `lo..=hi`.
pub fn corpus(count: usize, lo: usize, hi: usize, base: u64) -> Vec<Instance> {
    (0..count)
        .map(|i| {
            let seed = base.wrapping_add(i as u64);
            let n = lo + (seed as usize * 7 + i) % (hi - lo + 1);
            match i % 5 {
                3 => perturbed_cyclic(n, seed, n / 2),
                4 => generate(&GeneratorConfig { n, seed, mode: GeneratorMode::AdversarialSwap }),
                _ => generate(&GeneratorConfig { n, seed, mode: GeneratorMode::Uniform }),
            }
        })
        .collect()
}

pub fn sorted(mut v: Vec<Matching>) -> Vec<Matching> {
    v.sort();
    v.dedup();
    v
}

/// A cyclic instance with a few adjacent swaps: lattices with many rotations
/// that are not simple chains.
pub fn perturbed_cyclic(n: usize, seed: u64, swaps: usize) -> Instance {
    use rand::Rng;
    let base = generate(&GeneratorConfig { n, seed, mode: GeneratorMode::AdversarialSwap });
    let mut r = rng(seed ^ 0x5eed);
    let mut boys = base.boy_prefs().to_vec();
    let mut girls = base.girl_prefs().to_vec();
    for _ in 0..swaps {
        if n < 2 {
            break;
        }
        let lists = if r.random::<bool>() { &mut boys } else { &mut girls };
        let who = r.random_range(0..n);
        let at = r.random_range(0..n - 1);
        lists[who].swap(at, at + 1);
    }
    Instance::new(boys, girls).expect("swaps keep permutations")
}
