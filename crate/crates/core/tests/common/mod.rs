#![allow(dead_code)]

use quasikernel::random;
use quasikernel::{Kernel, Partition};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random (π, E) with 1 ≤ n ≤ max_n, drawn from all kernel families.
pub fn instance(seed: u64, max_n: usize) -> (Kernel, Partition) {
    let mut rng = rng(seed);
    let n = rng.gen_range(1..=max_n);
    let e = random::partition(&mut rng, n);
    let k = random::any_kernel(&mut rng, &e);
    (k, e)
}
