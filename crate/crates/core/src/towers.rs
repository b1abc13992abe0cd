//! Decreasing towers E_1 ⊃ E_2 ⊃ … of sub-σ-algebras with one kernel per
//! level: conditional kernels of a fixed measure, compatible proper
//! families, stabilized limits and the tail-field refinement pipeline.

use num_traits::{One, Zero};

use crate::classify::is_proper;
use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::partition::Partition;
use crate::polytope::{enum_vertices, je_hrep, HPolytope, VertexSet};
use crate::refine::{normal_refinement, proper_refinement, restriction};
use crate::space::{ensure_same, ProbabilityMeasure, Subset};

/// A decreasing chain of partitions with optional per-level kernels and an
/// optional reference measure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainSpec {
    partitions: Vec<Partition>,
    kernels: Option<Vec<Kernel>>,
    reference: Option<ProbabilityMeasure>,
}

impl ChainSpec {
    /// Validates that each partition is at least as fine as the next and,
    /// when kernels are given, that each kernel is measurable for its level
    /// and that the J-sets decrease (checked on vertices).
    pub fn new(
        partitions: Vec<Partition>,
        kernels: Option<Vec<Kernel>>,
        reference: Option<ProbabilityMeasure>,
    ) -> Result<Self> {
        let Some(first) = partitions.first() else {
            return Err(Error::ChainOrder {
                level: 0,
                detail: "chain has no levels".into(),
            });
        };
        let n = first.size();
        for (level, pair) in partitions.windows(2).enumerate() {
            if !pair[0].refines(&pair[1])? {
                return Err(Error::ChainOrder {
                    level: level + 1,
                    detail: format!("level {} is not contained in level {}", level + 1, level),
                });
            }
        }
        if let Some(mu) = &reference {
            ensure_same(n, mu.len())?;
        }
        let kernels = match kernels {
            None => None,
            Some(ks) => {
                if ks.len() != partitions.len() {
                    return Err(Error::ChainOrder {
                        level: ks.len().min(partitions.len()),
                        detail: format!("{} kernels for {} partitions", ks.len(), partitions.len()),
                    });
                }
                let ks: Vec<Kernel> = ks
                    .iter()
                    .zip(&partitions)
                    .map(|(k, e)| k.regovern(e))
                    .collect::<Result<_>>()?;
                for level in 1..ks.len() {
                    let inner = enum_vertices(&je_hrep(&ks[level], &partitions[level])?)?;
                    let outer = je_hrep(&ks[level - 1], &partitions[level - 1])?;
                    if let Some(v) = inner.iter().find(|v| !outer.contains(v.masses())) {
                        return Err(Error::ChainOrder {
                            level,
                            detail: format!(
                                "vertex {:?} of J at level {} is not in J at level {}",
                                v.masses()
                                    .iter()
                                    .map(crate::rational::format)
                                    .collect::<Vec<_>>(),
                                level,
                                level - 1
                            ),
                        });
                    }
                }
                Some(ks)
            }
        };
        Ok(Self {
            partitions,
            kernels,
            reference,
        })
    }

    pub fn size(&self) -> usize {
        self.partitions[0].size()
    }

    pub fn len(&self) -> usize {
        self.partitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partitions.is_empty()
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    pub fn kernels(&self) -> Option<&[Kernel]> {
        self.kernels.as_deref()
    }

    pub fn reference(&self) -> Option<&ProbabilityMeasure> {
        self.reference.as_ref()
    }

    /// E = ∩_n E_n.
    pub fn meet_all(&self) -> Partition {
        self.partitions
            .iter()
            .skip(1)
            .fold(self.partitions[0].clone(), |acc, p| {
                acc.meet(p).expect("chain levels share a space")
            })
    }

    /// Reads the finite chain as eventually constant by repeating its last
    /// level `copies` more times.
    pub fn with_stationary_tail(&self, copies: usize) -> ChainSpec {
        let mut out = self.clone();
        let last = self.partitions.len() - 1;
        for _ in 0..copies {
            out.partitions.push(self.partitions[last].clone());
            if let Some(ks) = out.kernels.as_mut() {
                ks.push(ks[last].clone());
            }
        }
        out
    }

    /// ∩_n J_{E_n}(π_n) as one constraint system.
    pub fn intersection_hrep(&self) -> Result<HPolytope> {
        let kernels = self.require_kernels()?;
        let mut poly = HPolytope::simplex(self.size());
        for (k, e) in kernels.iter().zip(&self.partitions) {
            poly = poly.intersect(&je_hrep(k, e)?)?;
        }
        Ok(poly)
    }

    fn require_kernels(&self) -> Result<&[Kernel]> {
        self.kernels
            .as_deref()
            .ok_or_else(|| Error::Precondition("chain carries no kernels".into()))
    }
}

/// Conditional probability kernel of `mu` given `e`: each row is `mu`
/// conditioned on the atom of the row's point, or zero on null atoms.
pub fn conditional_kernel(mu: &ProbabilityMeasure, e: &Partition) -> Result<Kernel> {
    let n = e.size();
    ensure_same(n, mu.len())?;
    let mut rows = vec![vec![num_traits::zero(); n]; n];
    for b in 0..e.num_blocks() {
        let block = e.block_set(b);
        let mass = mu.of_set(&block);
        if mass.is_zero() {
            continue;
        }
        let inv = mass.recip();
        let row: Vec<_> = (0..n)
            .map(|y| {
                if block.contains(y) {
                    &mu.masses()[y] * &inv
                } else {
                    num_traits::zero()
                }
            })
            .collect();
        for x in block.iter() {
            rows[x] = row.clone();
        }
    }
    Kernel::new(rows, e.clone())
}

/// One inductive step of the compatible-family construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompatibleStep {
    /// D = { x : (ππ′) row x = π row x }.
    pub agreement_set: Subset,
    pub kernel: Kernel,
}

/// Given E ⊂ E′ and μ ∈ J_E(π) ∩ J_{E′}(π′), returns a proper E-measurable
/// ρ with ρπ′ = ρ and μ ∈ J_E(ρ).
pub fn compatible_step(
    pi: &Kernel,
    pi_prime: &Kernel,
    e: &Partition,
    e_prime: &Partition,
    mu: &ProbabilityMeasure,
) -> Result<CompatibleStep> {
    if !e_prime.refines(e)? {
        return Err(Error::Precondition(
            "the coarse partition is not contained in the fine one".into(),
        ));
    }
    let pi = pi.regovern(e)?;
    let pi_prime = pi_prime.regovern(e_prime)?;
    if !pi.in_je(mu, e)? || !pi_prime.in_je(mu, e_prime)? {
        return Err(Error::Precondition(
            "reference measure is not a member of both J-sets".into(),
        ));
    }
    let product = pi.compose(&pi_prime)?;
    let agreement_set = Subset::from_flags(
        (0..pi.size())
            .map(|x| product.rows()[x] == pi.row(x))
            .collect(),
    );
    let tau = restriction(&pi, &agreement_set)?;
    let kernel = proper_refinement(&tau, e)?.kernel;
    Ok(CompatibleStep {
        agreement_set,
        kernel,
    })
}

/// A named verification outcome recorded on tower results.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub label: String,
    pub holds: bool,
}

/// How `limit_kernel` treats points whose rows never settle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitMode {
    /// Any unstable point is an error.
    Strict,
    /// Unstable points get zero rows.
    Lenient,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LimitKernel {
    pub kernel: Kernel,
    /// Points whose rows agree across the window.
    pub stable: Subset,
    /// Stable points with limiting row mass one.
    pub live: Subset,
    pub unstable: Vec<usize>,
}

/// Pointwise limit of a kernel sequence, read off the last `window` terms.
/// The result is governed by the meet of all governing partitions.
pub fn limit_kernel(kernels: &[Kernel], window: usize, mode: LimitMode) -> Result<LimitKernel> {
    if window < 2 || window > kernels.len() {
        return Err(Error::WindowTooLarge {
            window,
            len: kernels.len(),
        });
    }
    let n = kernels[0].size();
    for k in kernels {
        ensure_same(n, k.size())?;
    }
    let tail = &kernels[kernels.len() - window..];
    let last = &tail[window - 1];
    let stable = Subset::from_flags(
        (0..n)
            .map(|x| tail.iter().all(|k| k.row(x) == last.row(x)))
            .collect(),
    );
    let unstable = stable.complement().indices();
    if mode == LimitMode::Strict && !unstable.is_empty() {
        return Err(Error::NotStabilized(unstable));
    }
    let governing = kernels
        .iter()
        .skip(1)
        .fold(kernels[0].governing().clone(), |acc, k| {
            acc.meet(k.governing()).expect("sizes checked")
        });
    let mut live = stable.intersection(&last.support());
    // A block with some unstable point cannot carry a limiting row.
    for block in governing.blocks() {
        if !block.iter().all(|&x| live.contains(x)) {
            live = live.intersection(&Subset::from_flags(
                (0..n).map(|x| !block.contains(&x)).collect(),
            ));
        }
    }
    let rows = (0..n)
        .map(|x| {
            if live.contains(x) {
                last.row(x).to_vec()
            } else {
                vec![num_traits::zero(); n]
            }
        })
        .collect();
    Ok(LimitKernel {
        kernel: Kernel::new(rows, governing)?,
        stable,
        live,
        unstable,
    })
}

/// Output of [`tower_refine`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerRefinement {
    pub kernel: Kernel,
    /// Support points of the candidate whose rows lie in every level's J-set.
    pub level_set: Subset,
    pub restriction_set: Subset,
    pub intersection: VertexSet,
    pub normal: bool,
    /// Vertex sets of J_E(result) and ∩_n J_{E_n}(π_n) coincide.
    pub matches_intersection: bool,
}

/// Restricts an E-measurable candidate with ∩_n J_{E_n}(π_n) ⊂ J_E(candidate)
/// to a normal kernel whose J-set is exactly the intersection.
pub fn tower_refine(candidate: &Kernel, chain: &ChainSpec) -> Result<TowerRefinement> {
    let kernels = chain.require_kernels()?;
    let e = chain.meet_all();
    let candidate = candidate.regovern(&e)?;
    // proper (hence normal) refinements make J_{E_n} = J_* level by level
    let levels: Vec<Kernel> = kernels
        .iter()
        .zip(chain.partitions())
        .map(|(k, en)| proper_refinement(k, en).map(|r| r.kernel))
        .collect::<Result<_>>()?;
    let intersection = enum_vertices(&chain.intersection_hrep()?)?;
    if let Some(v) = intersection
        .iter()
        .find(|v| !candidate.in_je(v, &e).unwrap_or(false))
    {
        return Err(Error::Precondition(format!(
            "intersection vertex {:?} is not in J_E(candidate)",
            v.masses()
                .iter()
                .map(crate::rational::format)
                .collect::<Vec<_>>()
        )));
    }
    let support = candidate.support();
    let level_set = Subset::from_flags(
        (0..candidate.size())
            .map(|x| {
                support.contains(x)
                    && levels.iter().all(|rho| {
                        let row = candidate.row_measure(x);
                        rho.push(&row).map(|p| p == row).unwrap_or(false)
                    })
            })
            .collect(),
    );
    let tau = restriction(&candidate, &level_set)?;
    let refined = normal_refinement(&tau, &e)?;
    let result_vertices = enum_vertices(&je_hrep(&refined.kernel, &e)?)?;
    Ok(TowerRefinement {
        normal: refined.certificate.normal,
        matches_intersection: result_vertices == intersection,
        kernel: refined.kernel,
        level_set,
        restriction_set: refined.restriction_set,
        intersection,
    })
}

/// Everything produced and verified along a tower computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerResult {
    pub refined: Vec<Kernel>,
    pub limit: Option<LimitKernel>,
    pub refinement: Option<TowerRefinement>,
    pub checks: Vec<Check>,
}

impl TowerResult {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }
}

/// Proper kernels ρ_n, one per level, with μ ∈ J_{E_n}(ρ_n) and
/// ρ_nρ_m = ρ_n for m ≤ n, built from conditional kernels of μ.
pub fn compatible_chain(mu: &ProbabilityMeasure, chain: &ChainSpec) -> Result<TowerResult> {
    ensure_same(chain.size(), mu.len())?;
    let parts = chain.partitions();
    let conditionals: Vec<Kernel> = parts
        .iter()
        .map(|e| conditional_kernel(mu, e))
        .collect::<Result<_>>()?;
    let mut refined = vec![proper_refinement(&conditionals[0], &parts[0])?.kernel];
    for level in 1..parts.len() {
        let step = compatible_step(
            &conditionals[level],
            &refined[level - 1],
            &parts[level],
            &parts[level - 1],
            mu,
        )?;
        refined.push(step.kernel);
    }
    let mut checks = Vec::new();
    for (level, (rho, e)) in refined.iter().zip(parts).enumerate() {
        checks.push(Check {
            label: format!("rho_{} proper w.r.t. E_{}", level + 1, level + 1),
            holds: is_proper(rho, e)?.holds(),
        });
        checks.push(Check {
            label: format!("mu in J_E_{}(rho_{})", level + 1, level + 1),
            holds: rho.in_je(mu, e)?,
        });
    }
    for n in 0..refined.len() {
        for m in 0..=n {
            checks.push(Check {
                label: format!("rho_{} rho_{} = rho_{}", n + 1, m + 1, n + 1),
                holds: refined[n].compose(&refined[m])?.equals_kernel(&refined[n]),
            });
        }
    }
    Ok(TowerResult {
        refined,
        limit: None,
        refinement: None,
        checks,
    })
}

/// Limit of the level-wise proper refinements followed by [`tower_refine`]:
/// a normal E-measurable kernel whose J-set is ∩_n J_{E_n}(π_n).
pub fn tail_pipeline(chain: &ChainSpec, window: usize) -> Result<TowerResult> {
    let kernels = chain.require_kernels()?;
    let refined: Vec<Kernel> = kernels
        .iter()
        .zip(chain.partitions())
        .map(|(k, e)| proper_refinement(k, e).map(|r| r.kernel))
        .collect::<Result<_>>()?;
    let limit = limit_kernel(&refined, window, LimitMode::Strict)?;
    let refinement = tower_refine(&limit.kernel, chain)?;
    let checks = vec![
        Check {
            label: "result normal w.r.t. E".into(),
            holds: refinement.normal,
        },
        Check {
            label: "J_E(result) equals the intersection of level J-sets".into(),
            holds: refinement.matches_intersection,
        },
        Check {
            label: "limit rows have mass 0 or 1".into(),
            holds: (0..limit.kernel.size()).all(|x| {
                let m = limit.kernel.row_mass(x);
                m.is_zero() || m.is_one()
            }),
        },
    ];
    Ok(TowerResult {
        refined,
        limit: Some(limit),
        refinement: Some(refinement),
        checks,
    })
}
