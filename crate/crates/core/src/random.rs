//! Seeded generators of random instances for property tests and the
//! oracle runner. Values use small denominators so exact arithmetic stays
//! cheap.

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::kernel::Kernel;
use crate::partition::Partition;
use crate::polytope::{enum_vertices, je_hrep};
use crate::rational::Rational;
use crate::space::{ProbabilityMeasure, Subset};
use crate::towers::{conditional_kernel, ChainSpec};

pub fn partition<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Partition {
    let k = rng.gen_range(1..=n);
    let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
    Partition::from_labels(&labels)
}

/// A partition whose blocks are unions of blocks of `finer`.
pub fn coarsening<R: Rng + ?Sized>(rng: &mut R, finer: &Partition) -> Partition {
    let k = rng.gen_range(1..=finer.num_blocks());
    let merged: Vec<usize> = (0..finer.num_blocks())
        .map(|_| rng.gen_range(0..k))
        .collect();
    let labels: Vec<usize> = (0..finer.size())
        .map(|x| merged[finer.block_of(x)])
        .collect();
    Partition::from_labels(&labels)
}

/// Random probability vector supported inside `allowed` (which must be
/// nonempty), with integer weights 0..=3 before normalization.
pub fn distribution_on<R: Rng + ?Sized>(rng: &mut R, n: usize, allowed: &[usize]) -> Vec<Rational> {
    let mut weights = vec![0i64; n];
    for &y in allowed {
        weights[y] = rng.gen_range(0..=3);
    }
    if allowed.iter().all(|&y| weights[y] == 0) {
        weights[*allowed.choose(rng).expect("nonempty support")] = 1;
    }
    let total: i64 = weights.iter().sum();
    weights
        .into_iter()
        .map(|w| Rational::new(w.into(), total.into()))
        .collect()
}

pub fn measure<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ProbabilityMeasure {
    let all: Vec<usize> = (0..n).collect();
    ProbabilityMeasure::new(distribution_on(rng, n, &all)).expect("normalized")
}

fn random_subset<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<usize> {
    let out: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
    if out.is_empty() {
        vec![rng.gen_range(0..n)]
    } else {
        out
    }
}

fn blockwise<R, F>(rng: &mut R, e: &Partition, mut row_for: F) -> Kernel
where
    R: Rng + ?Sized,
    F: FnMut(&mut R, &[usize]) -> Option<Vec<Rational>>,
{
    let n = e.size();
    let mut rows = vec![vec![Rational::zero(); n]; n];
    for block in e.blocks() {
        if let Some(row) = row_for(rng, block) {
            for &x in block {
                rows[x] = row.clone();
            }
        }
    }
    Kernel::new(rows, e.clone()).expect("rows constant on blocks")
}

/// Arbitrary E-measurable quasi-kernel: per block a zero row or a random
/// distribution, sometimes kept on the block itself.
pub fn quasi_kernel<R: Rng + ?Sized>(rng: &mut R, e: &Partition) -> Kernel {
    let n = e.size();
    blockwise(rng, e, |rng, block| match rng.gen_range(0..6) {
        0 => None,
        1 | 2 => Some(distribution_on(rng, n, block)),
        _ => {
            let allowed = random_subset(rng, n);
            Some(distribution_on(rng, n, &allowed))
        }
    })
}

/// Proper kernel: every nonzero row lives on its own block.
pub fn proper_kernel<R: Rng + ?Sized>(rng: &mut R, e: &Partition) -> Kernel {
    let n = e.size();
    blockwise(rng, e, |rng, block| {
        (rng.gen_range(0..5) != 0).then(|| {
            let allowed: Vec<usize> = block
                .iter()
                .copied()
                .filter(|_| rng.gen_bool(0.7))
                .collect();
            let allowed = if allowed.is_empty() {
                block.to_vec()
            } else {
                allowed
            };
            distribution_on(rng, n, &allowed)
        })
    })
}

/// Normal kernel that is usually not proper: blocks of a random coarsening
/// share one row concentrated on a single E-atom inside that block.
pub fn normal_kernel<R: Rng + ?Sized>(rng: &mut R, e: &Partition) -> Kernel {
    let n = e.size();
    let c = coarsening(rng, e);
    let mut rows = vec![vec![Rational::zero(); n]; n];
    for block in c.blocks() {
        if rng.gen_range(0..5) == 0 {
            continue;
        }
        let x = *block.choose(rng).expect("blocks are nonempty");
        let atom = &e.blocks()[e.block_of(x)];
        let row = distribution_on(rng, n, atom);
        for &y in block {
            rows[y] = row.clone();
        }
    }
    Kernel::new(rows, e.clone()).expect("rows constant on coarser blocks")
}

/// One of the three kernel families, chosen uniformly.
pub fn any_kernel<R: Rng + ?Sized>(rng: &mut R, e: &Partition) -> Kernel {
    match rng.gen_range(0..3) {
        0 => quasi_kernel(rng, e),
        1 => proper_kernel(rng, e),
        _ => normal_kernel(rng, e),
    }
}

/// A random E-measurable set.
pub fn measurable_set<R: Rng + ?Sized>(rng: &mut R, e: &Partition) -> Subset {
    let keep: Vec<bool> = (0..e.num_blocks()).map(|_| rng.gen_bool(0.6)).collect();
    Subset::from_flags((0..e.size()).map(|x| keep[e.block_of(x)]).collect())
}

/// Random convex combination of the vertices of J_E(π); `None` when J_E(π)
/// is empty.
pub fn member<R: Rng + ?Sized>(
    rng: &mut R,
    kernel: &Kernel,
    e: &Partition,
) -> Option<ProbabilityMeasure> {
    let vertices = enum_vertices(&je_hrep(kernel, e).ok()?).ok()?;
    if vertices.is_empty() {
        return None;
    }
    let weights: Vec<i64> = vertices.iter().map(|_| rng.gen_range(0..=2)).collect();
    let total: i64 = weights.iter().sum();
    if total == 0 {
        return vertices.as_slice().choose(rng).cloned();
    }
    let n = kernel.size();
    let mut mass = vec![Rational::zero(); n];
    for (v, &w) in vertices.iter().zip(&weights) {
        let w = Rational::new(w.into(), total.into());
        for (m, p) in mass.iter_mut().zip(v.masses()) {
            *m += &w * p;
        }
    }
    Some(ProbabilityMeasure::new(mass).expect("convex combination"))
}

/// Decreasing chain of `len` partitions starting from a random partition.
pub fn decreasing_chain<R: Rng + ?Sized>(rng: &mut R, n: usize, len: usize) -> Vec<Partition> {
    let mut chain = vec![if rng.gen_bool(0.5) {
        Partition::discrete(n)
    } else {
        partition(rng, n)
    }];
    while chain.len() < len {
        let next = coarsening(rng, chain.last().expect("nonempty"));
        chain.push(next);
    }
    chain
}

/// Chain with per-level kernels whose J-sets decrease: conditional kernels
/// of one random measure (some atoms may be null), optionally
/// restricted to a common tail-measurable set, with a random kernel tried
/// at the last level.
pub fn kernel_chain<R: Rng + ?Sized>(rng: &mut R, n: usize, len: usize) -> ChainSpec {
    let parts = decreasing_chain(rng, n, len);
    let tail = parts.last().expect("nonempty").clone();
    let lambda = {
        let allowed = random_subset(rng, n);
        ProbabilityMeasure::new(distribution_on(rng, n, &allowed)).expect("normalized")
    };
    let keep = if rng.gen_bool(0.3) {
        measurable_set(rng, &tail)
    } else {
        Subset::full(n)
    };
    let mut kernels: Vec<Kernel> = parts
        .iter()
        .map(|e| {
            let k = conditional_kernel(&lambda, e).expect("same space");
            crate::refine::restriction(&k, &keep).expect("tail sets are measurable")
        })
        .collect();
    if rng.gen_bool(0.5) {
        for _ in 0..4 {
            let mut trial = kernels.clone();
            *trial.last_mut().expect("nonempty") = any_kernel(rng, &tail);
            if let Ok(chain) = ChainSpec::new(parts.clone(), Some(trial), None) {
                return chain;
            }
        }
    }
    if rng.gen_bool(0.3) && parts[0] == Partition::discrete(n) {
        kernels[0] = Kernel::identity(n);
    }
    ChainSpec::new(parts, Some(kernels), None).expect("conditional kernels give decreasing J-sets")
}
