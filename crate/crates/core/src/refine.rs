//! Restrictions of kernels to E-sets, the refinement test, and three
//! constructions: proper refinements (E is always countably generated
//! here), proper refinements from a full set, and normal refinements when
//! J_E(π) = J_*(π).

use num_traits::{One, Zero};

use crate::classify::{is_normal, is_proper, sigma_pi};
use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::partition::Partition;
use crate::polytope::{enum_vertices, je_hrep, jstar_hrep, same_polytope, VertexSet};
use crate::space::{ensure_same, Subset};

/// Properties re-verified on a refinement output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub set_measurable: bool,
    /// J_E(ρ) = J_E(π), via the full-set criterion.
    pub refinement: bool,
    pub proper: bool,
    pub normal: bool,
    /// J_E(π) has at least one member.
    pub je_nonempty: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefinementResult {
    pub kernel: Kernel,
    pub restriction_set: Subset,
    pub certificate: Certificate,
}

/// The restriction of π to `set`: rows outside `set` are zeroed. `set`
/// must belong to σ(governing partition).
pub fn restriction(kernel: &Kernel, set: &Subset) -> Result<Kernel> {
    if !kernel.governing().contains_set(set)? {
        return Err(Error::NotMeasurableSet(set.indices()));
    }
    Ok(kernel.restrict_rows(set))
}

/// Recovers the set D with ρ = restriction of π to D, atom by atom of `e`.
/// Atoms where π vanishes are left out of D.
pub fn restriction_set(rho: &Kernel, pi: &Kernel, e: &Partition) -> Result<Subset> {
    ensure_same(rho.size(), pi.size())?;
    pi.check_measurable(e)?;
    rho.check_measurable(e)?;
    let n = pi.size();
    let mut flags = vec![false; n];
    for (b, block) in e.blocks().iter().enumerate() {
        let x = block[0];
        let zero = rho.row_mass(x).is_zero();
        if rho.row(x) == pi.row(x) {
            if !pi.row_mass(x).is_one() {
                continue;
            }
            for &y in block {
                flags[y] = true;
            }
        } else if !zero {
            return Err(Error::NotRestriction {
                block: b,
                members: block.clone(),
            });
        }
    }
    Ok(Subset::from_flags(flags))
}

fn mass_one_on_vertices(set: &Subset, vertices: &VertexSet) -> bool {
    vertices.iter().all(|v| v.of_set(set).is_one())
}

/// ρ is a refinement of π iff every member of J_E(π) gives the restriction
/// set mass one; checked on the vertices of J_E(π).
pub fn is_refinement(rho: &Kernel, pi: &Kernel, e: &Partition) -> Result<bool> {
    let set = restriction_set(rho, pi, e)?;
    let vertices = enum_vertices(&je_hrep(pi, e)?)?;
    Ok(mass_one_on_vertices(&set, &vertices))
}

/// D ∈ σ(E) and every member of J_E(π) gives D mass one.
pub fn is_full(set: &Subset, kernel: &Kernel, e: &Partition) -> Result<bool> {
    ensure_same(kernel.size(), set.len())?;
    if !e.contains_set(set)? {
        return Ok(false);
    }
    let vertices = enum_vertices(&je_hrep(kernel, e)?)?;
    Ok(mass_one_on_vertices(set, &vertices))
}

fn certify(rho: Kernel, pi: &Kernel, e: &Partition, set: Subset) -> Result<RefinementResult> {
    let vertices = enum_vertices(&je_hrep(pi, e)?)?;
    let certificate = Certificate {
        set_measurable: e.contains_set(&set)?,
        refinement: is_refinement(&rho, pi, e)?,
        proper: is_proper(&rho, e)?.holds(),
        normal: is_normal(&rho, e)?.holds(),
        je_nonempty: !vertices.is_empty(),
    };
    Ok(RefinementResult {
        kernel: rho,
        restriction_set: set,
        certificate,
    })
}

/// Points x of `domain` where π(g·I_y)(x) = g(x)·π(I_y)(x) for every atom
/// indicator g of `atoms` (extended by zero) and every point y.
fn product_rule_set(kernel: &Kernel, atoms: &[Vec<usize>], domain: &Subset) -> Subset {
    let n = kernel.size();
    Subset::from_flags(
        (0..n)
            .map(|x| {
                domain.contains(x)
                    && atoms.iter().all(|atom| {
                        let inside = atom.contains(&x);
                        (0..n).all(|y| {
                            // both sides are either π(x,{y}) or 0
                            atom.contains(&y) == inside || kernel.row(x)[y].is_zero()
                        })
                    })
            })
            .collect(),
    )
}

/// Restricts π to D = { x ∈ S_π : π(I_A·I_y)(x) = I_A(x)·π(I_y)(x) for all
/// atoms A and points y }. The result is proper, and a refinement whenever
/// J_E(π) is nonempty (vacuously also when it is empty).
pub fn proper_refinement(kernel: &Kernel, e: &Partition) -> Result<RefinementResult> {
    kernel.check_measurable(e)?;
    let set = product_rule_set(kernel, e.blocks(), &kernel.support());
    let rho = restriction(&kernel.regovern(e)?, &set)?;
    certify(rho, kernel, e, set)
}

/// Proper refinement built from a π-full set D using the trace atoms of E
/// on D ∩ S_π.
pub fn proper_refinement_on_full(
    kernel: &Kernel,
    e: &Partition,
    full: &Subset,
) -> Result<RefinementResult> {
    kernel.check_measurable(e)?;
    if !is_full(full, kernel, e)? {
        return Err(Error::NotFull(full.indices()));
    }
    let domain = full.intersection(&kernel.support());
    let trace = e.trace(&domain);
    let set = product_rule_set(kernel, &trace.blocks, &domain);
    let rho = restriction(&kernel.regovern(e)?, &set)?;
    certify(rho, kernel, e, set)
}

/// Normal refinement under J_E(π) = J_*(π): a proper refinement of π seen
/// as an S_π-measurable kernel, then re-certified against E.
pub fn normal_refinement(kernel: &Kernel, e: &Partition) -> Result<RefinementResult> {
    kernel.check_measurable(e)?;
    if !same_polytope(&je_hrep(kernel, e)?, &jstar_hrep(kernel)?)? {
        return Err(Error::Precondition(
            "J_E(pi) differs from J_*(pi); no normal refinement is guaranteed".into(),
        ));
    }
    let s = sigma_pi(kernel);
    let on_s = proper_refinement(&kernel.regovern(&s)?, &s)?;
    let set = on_s.restriction_set;
    let rho = restriction(&kernel.regovern(e)?, &set)?;
    certify(rho, kernel, e, set)
}
