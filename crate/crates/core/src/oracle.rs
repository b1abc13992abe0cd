//! Brute-force reference implementations. Every function here works from
//! the definitions by enumerating subsets of the space as bitmasks and
//! shares no algorithm with the fast paths; `diff` compares the two.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};

use crate::classify::{
    delta_set, e_pi, is_adapted, is_normal, is_proper, n_pi, normality_report, sigma_pi,
};
use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::partition::{Partition, Refinement};
use crate::polytope::{enum_vertices, extreme_members, je_hrep, jstar_hrep};
use crate::rational::{self, Rational};
use crate::refine::{normal_refinement, proper_refinement};
use crate::space::{ensure_same, Measure, ProbabilityMeasure};
use crate::towers::{compatible_chain, conditional_kernel, tail_pipeline, ChainSpec};

/// Default dimension guard for exhaustive enumeration.
pub const ORACLE_LIMIT: usize = 8;

/// Hard ceiling; beyond this bitmasks overflow.
const HARD_LIMIT: usize = 20;

pub fn check_dimension(n: usize, force: bool) -> Result<()> {
    let limit = if force { HARD_LIMIT } else { ORACLE_LIMIT };
    if n > limit {
        return Err(Error::DimensionTooLarge { n, limit });
    }
    Ok(())
}

type Set = u32;

fn members(n: usize, s: Set) -> impl Iterator<Item = usize> {
    (0..n).filter(move |&i| s >> i & 1 == 1)
}

fn all_sets(n: usize) -> impl Iterator<Item = Set> {
    0..(1u32 << n)
}

fn kernel_value(kernel: &Kernel, x: usize, f: Set) -> Rational {
    members(kernel.size(), f).map(|y| &kernel.row(x)[y]).sum()
}

fn measure_of(mu: &[Rational], s: Set) -> Rational {
    members(mu.len(), s).map(|x| &mu[x]).sum()
}

/// σ(P): every subset that is a union of blocks, found by testing each
/// subset of the space against the blocks.
pub fn sigma_sets(p: &Partition) -> Vec<Set> {
    let n = p.size();
    all_sets(n)
        .filter(|&s| {
            p.blocks().iter().all(|b| {
                let hits = b.iter().filter(|&&x| s >> x & 1 == 1).count();
                hits == 0 || hits == b.len()
            })
        })
        .collect()
}

/// Atoms of the σ-algebra generated by `family`: points are together iff
/// no member of the family separates them.
fn atoms(n: usize, family: &[Set]) -> Partition {
    let labels: Vec<Vec<bool>> = (0..n)
        .map(|x| family.iter().map(|&s| s >> x & 1 == 1).collect())
        .collect();
    Partition::from_labels(&labels)
}

pub fn meet(p: &Partition, q: &Partition) -> Result<Partition> {
    ensure_same(p.size(), q.size())?;
    let qs: BTreeSet<Set> = sigma_sets(q).into_iter().collect();
    let common: Vec<Set> = sigma_sets(p)
        .into_iter()
        .filter(|s| qs.contains(s))
        .collect();
    Ok(atoms(p.size(), &common))
}

pub fn compare(p: &Partition, q: &Partition) -> Result<Refinement> {
    ensure_same(p.size(), q.size())?;
    let ps: BTreeSet<Set> = sigma_sets(p).into_iter().collect();
    let qs: BTreeSet<Set> = sigma_sets(q).into_iter().collect();
    Ok(match (qs.is_subset(&ps), ps.is_subset(&qs)) {
        (true, true) => Refinement::Equal,
        (true, false) => Refinement::Finer,
        (false, true) => Refinement::Coarser,
        (false, false) => Refinement::Incomparable,
    })
}

/// Blocks of the trace σ-algebra { S ∩ A : S ∈ σ(P) } on A.
pub fn trace_blocks(p: &Partition, domain: &[bool]) -> Vec<Vec<usize>> {
    let n = p.size();
    let a: Set = (0..n).filter(|&x| domain[x]).fold(0, |s, x| s | 1 << x);
    let family: Vec<Set> = sigma_sets(p).into_iter().map(|s| s & a).collect();
    atoms(n, &family)
        .blocks()
        .iter()
        .filter(|b| a >> b[0] & 1 == 1)
        .cloned()
        .collect()
}

pub fn is_trivial(mu: &[Rational], p: &Partition) -> bool {
    sigma_sets(p).into_iter().all(|s| {
        let m = measure_of(mu, s);
        m.is_zero() || m.is_one()
    })
}

/// μ ∈ J_E(π) by definition: μ is a probability and
/// μ(I_E·π(I_F)) = μ(E ∩ F) for every E ∈ σ(E) and every F ⊂ X.
pub fn in_je(kernel: &Kernel, e: &Partition, mu: &[Rational]) -> bool {
    let n = kernel.size();
    if !mu.iter().all(|m| !m.is_negative()) || !rational::sum(mu).is_one() {
        return false;
    }
    let sets = sigma_sets(e);
    all_sets(n).all(|f| {
        let pf: Vec<Rational> = (0..n).map(|x| kernel_value(kernel, x, f)).collect();
        sets.iter().all(|&s| {
            let lhs: Rational = members(n, s).map(|x| &mu[x] * &pf[x]).sum();
            lhs == measure_of(mu, s & f)
        })
    })
}

/// μπ = μ, tested on every F ⊂ X.
pub fn in_jstar(kernel: &Kernel, mu: &[Rational]) -> bool {
    let n = kernel.size();
    if !mu.iter().all(|m| !m.is_negative()) || !rational::sum(mu).is_one() {
        return false;
    }
    all_sets(n).all(|f| {
        let lhs: Rational = (0..n).map(|x| &mu[x] * kernel_value(kernel, x, f)).sum();
        lhs == measure_of(mu, f)
    })
}

fn support(kernel: &Kernel) -> Set {
    let full = (1u32 << kernel.size()) - 1;
    (0..kernel.size())
        .filter(|&x| kernel_value(kernel, x, full).is_one())
        .fold(0, |s, x| s | 1 << x)
}

/// Points x where π(x, E∩F) = I_E(x)·π(x, F) for all E ∈ σ(E), F ⊂ X.
fn product_rule_points(kernel: &Kernel, e: &Partition) -> Set {
    let n = kernel.size();
    let sets = sigma_sets(e);
    (0..n)
        .filter(|&x| {
            sets.iter().all(|&s| {
                all_sets(n).all(|f| {
                    let lhs = kernel_value(kernel, x, s & f);
                    if s >> x & 1 == 1 {
                        lhs == kernel_value(kernel, x, f)
                    } else {
                        lhs.is_zero()
                    }
                })
            })
        })
        .fold(0, |s, x| s | 1 << x)
}

/// Properness by its defining product rule, on every pair (E, F).
pub fn is_proper_def(kernel: &Kernel, e: &Partition) -> bool {
    product_rule_points(kernel, e) == (1u32 << kernel.size()) - 1
}

pub fn is_adapted_def(kernel: &Kernel, e: &Partition) -> bool {
    members(kernel.size(), support(kernel)).all(|x| in_je(kernel, e, kernel.row(x)))
}

pub fn is_normal_def(kernel: &Kernel, e: &Partition) -> bool {
    is_adapted_def(kernel, e)
        && members(kernel.size(), support(kernel)).all(|x| is_trivial(kernel.row(x), e))
}

/// S_π: generated by the level sets of x ↦ π(x, F) over all F.
pub fn sigma_pi_def(kernel: &Kernel) -> Partition {
    let n = kernel.size();
    let labels: Vec<Vec<Rational>> = (0..n)
        .map(|x| all_sets(n).map(|f| kernel_value(kernel, x, f)).collect())
        .collect();
    Partition::from_labels(&labels)
}

/// { x ∈ S_π : π(I_F)(x) = μ(F) for all F }, using every subset indicator
/// as the separating family.
pub fn delta_set_def(kernel: &Kernel, mu: &[Rational]) -> Vec<usize> {
    let n = kernel.size();
    members(n, support(kernel))
        .filter(|&x| all_sets(n).all(|f| kernel_value(kernel, x, f) == measure_of(mu, f)))
        .collect()
}

/// N_π: all sets that contain or avoid each Δ-class entirely.
pub fn n_pi_def(kernel: &Kernel) -> Partition {
    let n = kernel.size();
    let classes: Vec<Set> = members(n, support(kernel))
        .map(|x| {
            delta_set_def(kernel, kernel.row(x))
                .into_iter()
                .fold(0, |s, y| s | 1 << y)
        })
        .collect();
    let family: Vec<Set> = all_sets(n)
        .filter(|&s| classes.iter().all(|&c| s & c == 0 || s & c == c))
        .collect();
    atoms(n, &family)
}

/// Gauss-Jordan elimination on augmented rows with `cols` unknowns;
/// returns the number of pivots, or `None` when 0 = 1 appears.
fn eliminate(rows: &mut Vec<Vec<Rational>>, cols: usize) -> Option<usize> {
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = rows[rank][c].recip();
        for v in rows[rank].iter_mut() {
            *v *= &inv;
        }
        for r in 0..rows.len() {
            if r != rank && !rows[r][c].is_zero() {
                let factor = rows[r][c].clone();
                for k in 0..=cols {
                    let delta = &factor * &rows[rank][k];
                    rows[r][k] -= delta;
                }
            }
        }
        rank += 1;
    }
    if rows[rank..].iter().any(|r| !r[cols].is_zero()) {
        return None;
    }
    rows.truncate(rank);
    Some(rank)
}

/// Vertices of { μ ≥ 0 : Σμ = 1, rows·μ = 0 }: for each candidate zero
/// pattern Z, solve on the remaining coordinates and keep nonnegative
/// unique solutions.
pub fn vertices(n: usize, equalities: Vec<Vec<Rational>>) -> Vec<Vec<Rational>> {
    let mut base: Vec<Vec<Rational>> = equalities
        .into_iter()
        .map(|mut r| {
            r.push(Rational::zero());
            r
        })
        .collect();
    base.push(vec![Rational::one(); n + 1]);
    if eliminate(&mut base, n).is_none() {
        return Vec::new();
    }
    let mut found = BTreeSet::new();
    for zeros in all_sets(n) {
        let free: Vec<usize> = (0..n).filter(|&i| zeros >> i & 1 == 0).collect();
        let mut sys: Vec<Vec<Rational>> = base
            .iter()
            .map(|r| {
                let mut v: Vec<Rational> = free.iter().map(|&i| r[i].clone()).collect();
                v.push(r[n].clone());
                v
            })
            .collect();
        match eliminate(&mut sys, free.len()) {
            Some(rank) if rank == free.len() => {}
            _ => continue,
        }
        let mut point = vec![Rational::zero(); n];
        for (k, &i) in free.iter().enumerate() {
            point[i] = sys[k][free.len()].clone();
        }
        if point.iter().all(|v| !v.is_negative()) {
            found.insert(point);
        }
    }
    found.into_iter().collect()
}

/// Vertices of J_E(π) from the constraints over all E ∈ σ(E) and points y.
pub fn je_vertices(kernel: &Kernel, e: &Partition) -> Vec<Vec<Rational>> {
    vertices(kernel.size(), je_equalities(kernel, e))
}

fn je_equalities(kernel: &Kernel, e: &Partition) -> Vec<Vec<Rational>> {
    let n = kernel.size();
    let mut rows = Vec::new();
    for s in sigma_sets(e) {
        for y in 0..n {
            rows.push(
                (0..n)
                    .map(|x| {
                        if s >> x & 1 == 0 {
                            Rational::zero()
                        } else if x == y {
                            Rational::one() - &kernel.row(x)[y]
                        } else {
                            -kernel.row(x)[y].clone()
                        }
                    })
                    .collect(),
            );
        }
    }
    rows
}

/// Vertices of J_*(π) from μπ(F) = μ(F) over all F.
pub fn jstar_vertices(kernel: &Kernel) -> Vec<Vec<Rational>> {
    let n = kernel.size();
    let rows = all_sets(n)
        .map(|f| {
            (0..n)
                .map(|x| {
                    let inside = if f >> x & 1 == 1 {
                        Rational::one()
                    } else {
                        Rational::zero()
                    };
                    inside - kernel_value(kernel, x, f)
                })
                .collect()
        })
        .collect();
    vertices(n, rows)
}

fn restricted(kernel: &Kernel, keep: Set) -> Vec<Vec<Rational>> {
    (0..kernel.size())
        .map(|x| {
            if keep >> x & 1 == 1 {
                kernel.row(x).to_vec()
            } else {
                vec![Rational::zero(); kernel.size()]
            }
        })
        .collect()
}

/// The proper refinement's set D taken over all (E, F) pairs on S_π.
pub fn proper_refinement_set(kernel: &Kernel, e: &Partition) -> Vec<usize> {
    let set = support(kernel) & product_rule_points(kernel, e);
    members(kernel.size(), set).collect()
}

/// The five normality statements, each from its own definition.
pub fn normality_statements(kernel: &Kernel, e: &Partition) -> Result<[bool; 5]> {
    let n = kernel.size();
    let je = je_vertices(kernel, e);
    let adapted = is_adapted_def(kernel, e);
    let s1 = is_normal_def(kernel, e);
    let s2 = adapted
        && members(n, support(kernel)).all(|x| {
            let class = delta_set_def(kernel, kernel.row(x));
            class
                .iter()
                .map(|&y| &kernel.row(x)[y])
                .sum::<Rational>()
                .is_one()
        });
    let npi = n_pi_def(kernel);
    let s3 = adapted && is_proper_def(&kernel.regovern(&npi)?, &npi);
    let epi = meet(e, &npi)?;
    let s4 = is_proper_def(&kernel.regovern(&epi)?, &epi) && je_vertices(kernel, &epi) == je;
    let spi = sigma_pi_def(kernel);
    let s5 = is_proper_def(&kernel.regovern(&spi)?, &spi) && je_vertices(kernel, &spi) == je;
    Ok([s1, s2, s3, s4, s5])
}

/// Conditional kernel of μ given `e`, straight from μ(· ∩ A)/μ(A).
pub fn conditional_rows(mu: &[Rational], e: &Partition) -> Vec<Vec<Rational>> {
    let n = mu.len();
    (0..n)
        .map(|x| {
            let atom: Set = e.blocks()[e.block_of(x)].iter().fold(0, |s, &y| s | 1 << y);
            let mass = measure_of(mu, atom);
            (0..n)
                .map(|y| {
                    if mass.is_zero() || atom >> y & 1 == 0 {
                        Rational::zero()
                    } else {
                        &mu[y] / &mass
                    }
                })
                .collect()
        })
        .collect()
}

/// One disagreement between a fast path and the oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Discrepancy {
    pub item: String,
    pub fast: String,
    pub oracle: String,
}

#[derive(Default)]
struct Diff(Vec<Discrepancy>);

impl Diff {
    fn check<T: PartialEq + std::fmt::Display>(&mut self, item: &str, fast: T, oracle: T) {
        if fast != oracle {
            self.0.push(Discrepancy {
                item: item.to_string(),
                fast: fast.to_string(),
                oracle: oracle.to_string(),
            });
        }
    }
}

pub fn format_vector(v: &[Rational]) -> String {
    let inner: Vec<String> = v.iter().map(rational::format).collect();
    format!("({})", inner.join(","))
}

pub fn format_blocks(blocks: &[Vec<usize>]) -> String {
    let mut out = String::from("{");
    for (i, b) in blocks.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let inner: Vec<String> = b.iter().map(usize::to_string).collect();
        let _ = write!(out, "{{{}}}", inner.join(","));
    }
    out.push('}');
    out
}

fn format_points(points: &[Vec<Rational>]) -> String {
    let inner: Vec<String> = points.iter().map(|p| format_vector(p)).collect();
    format!("[{}]", inner.join(" "))
}

fn fast_points<'a, I: IntoIterator<Item = &'a ProbabilityMeasure>>(vs: I) -> Vec<Vec<Rational>> {
    vs.into_iter().map(|v| v.masses().to_vec()).collect()
}

/// Re-derives every classification, induced partition, polytope and
/// refinement for one kernel and lists the disagreements.
pub fn diff(kernel: &Kernel, e: &Partition, force: bool) -> Result<Vec<Discrepancy>> {
    let n = kernel.size();
    ensure_same(n, e.size())?;
    check_dimension(n, force)?;
    kernel.check_measurable(e)?;
    let mut d = Diff::default();

    d.check(
        "support",
        format!("{:?}", kernel.support().indices()),
        format!("{:?}", members(n, support(kernel)).collect::<Vec<_>>()),
    );
    d.check(
        "proper",
        is_proper(kernel, e)?.holds(),
        is_proper_def(kernel, e),
    );
    d.check(
        "adapted",
        is_adapted(kernel, e)?.holds(),
        is_adapted_def(kernel, e),
    );
    d.check(
        "normal",
        is_normal(kernel, e)?.holds(),
        is_normal_def(kernel, e),
    );

    let spi = sigma_pi(kernel);
    let npi = n_pi(kernel);
    d.check(
        "sigma_pi",
        format_blocks(spi.blocks()),
        format_blocks(sigma_pi_def(kernel).blocks()),
    );
    d.check(
        "n_pi",
        format_blocks(npi.blocks()),
        format_blocks(n_pi_def(kernel).blocks()),
    );
    d.check(
        "e_pi",
        format_blocks(e_pi(kernel, e)?.blocks()),
        format_blocks(meet(e, &n_pi_def(kernel))?.blocks()),
    );
    d.check(
        "n_pi vs sigma_pi",
        npi.compare(&spi)?.name(),
        compare(&npi, &spi)?.name(),
    );
    let report = normality_report(kernel, e)?;
    let oracle_statements = normality_statements(kernel, e)?;
    for i in 0..5 {
        d.check(
            &format!("normality statement {}", i + 1),
            report.statements[i],
            oracle_statements[i],
        );
    }

    let je = je_vertices(kernel, e);
    let fast_je = fast_points(&enum_vertices(&je_hrep(kernel, e)?)?);
    d.check("J_E vertices", format_points(&fast_je), format_points(&je));
    d.check(
        "J_* vertices",
        format_points(&fast_points(&enum_vertices(&jstar_hrep(kernel)?)?)),
        format_points(&jstar_vertices(kernel)),
    );
    d.check(
        "extreme members",
        format_points(&fast_points(&extreme_members(kernel, e)?)),
        format_points(&je),
    );
    for v in &je {
        let label = format_vector(v);
        d.check(
            &format!("J_E membership of {label}"),
            kernel.in_je(&Measure::new(v.clone())?, e)?,
            in_je(kernel, e, v),
        );
        d.check(
            &format!("J_* membership of {label}"),
            kernel.in_jstar(&Measure::new(v.clone())?)?,
            in_jstar(kernel, v),
        );
        let pm = ProbabilityMeasure::new(v.clone())?;
        d.check(
            &format!("triviality of {label}"),
            e.is_trivial(&pm)?,
            is_trivial(v, e),
        );
        d.check(
            &format!("delta set of {label}"),
            format!("{:?}", delta_set(kernel, pm.as_measure())?.indices()),
            format!("{:?}", delta_set_def(kernel, v)),
        );
    }
    for x in kernel.support().iter() {
        d.check(
            &format!("J_E membership of row {x}"),
            kernel.in_je(&kernel.row_measure(x), e)?,
            in_je(kernel, e, kernel.row(x)),
        );
    }

    let proper = proper_refinement(kernel, e)?;
    let oracle_set = proper_refinement_set(kernel, e);
    d.check(
        "proper refinement set",
        format!("{:?}", proper.restriction_set.indices()),
        format!("{oracle_set:?}"),
    );
    let keep = oracle_set.iter().fold(0u32, |s, &x| s | 1 << x);
    let rho = Kernel::new(restricted(kernel, keep), e.clone())?;
    d.check(
        "proper refinement is proper",
        proper.certificate.proper,
        is_proper_def(&rho, e),
    );
    d.check(
        "proper refinement preserves J_E",
        proper.certificate.refinement,
        je_vertices(&rho, e) == je,
    );

    let equal_sets = je == jstar_vertices(kernel);
    match normal_refinement(kernel, e) {
        Ok(result) => {
            d.check("normal refinement applicable", true, equal_sets);
            d.check(
                "normal refinement is normal",
                result.certificate.normal,
                is_normal_def(&result.kernel, e),
            );
            d.check(
                "normal refinement preserves J_E",
                result.certificate.refinement,
                je_vertices(&result.kernel, e) == je,
            );
        }
        Err(Error::Precondition(_)) => {
            d.check("normal refinement applicable", false, equal_sets);
        }
        Err(other) => return Err(other),
    }
    Ok(d.0)
}

/// Oracle comparison for a chain: conditional kernels and compatible family
/// for the reference measure, and the tower pipeline when kernels are given.
pub fn diff_chain(chain: &ChainSpec, window: usize, force: bool) -> Result<Vec<Discrepancy>> {
    let n = chain.size();
    check_dimension(n, force)?;
    let mut d = Diff::default();
    let parts = chain.partitions();
    for (i, pair) in parts.windows(2).enumerate() {
        d.check(
            &format!("level {} contains level {}", i + 2, i + 1),
            pair[0].refines(&pair[1])?,
            compare(&pair[0], &pair[1])?.at_least_as_fine(),
        );
    }
    d.check(
        "tail partition",
        format_blocks(chain.meet_all().blocks()),
        format_blocks(
            parts
                .iter()
                .skip(1)
                .try_fold(parts[0].clone(), |acc, p| meet(&acc, p))?
                .blocks(),
        ),
    );
    if let Some(mu) = chain.reference() {
        for (level, e) in parts.iter().enumerate() {
            d.check(
                &format!("conditional kernel at level {}", level + 1),
                format_points(conditional_kernel(mu, e)?.rows()),
                format_points(&conditional_rows(mu.masses(), e)),
            );
        }
        let result = compatible_chain(mu, chain)?;
        for (level, (rho, e)) in result.refined.iter().zip(parts).enumerate() {
            d.check(
                &format!("compatible kernel {} proper", level + 1),
                true,
                is_proper_def(rho, e),
            );
            d.check(
                &format!("reference in J at level {}", level + 1),
                true,
                in_je(rho, e, mu.masses()),
            );
        }
        d.check("compatible family checks", result.all_hold(), true);
    }
    if let Some(kernels) = chain.kernels() {
        let mut rows = Vec::new();
        for (k, e) in kernels.iter().zip(parts) {
            rows.extend(je_equalities(k, e));
        }
        let intersection = vertices(n, rows);
        let fast = enum_vertices(&chain.intersection_hrep()?)?;
        d.check(
            "intersection vertices",
            format_points(&fast_points(&fast)),
            format_points(&intersection),
        );
        let padded = chain.with_stationary_tail(window.saturating_sub(1));
        match tail_pipeline(&padded, window) {
            Ok(result) => {
                let refinement = result.refinement.expect("pipeline refines");
                let e = chain.meet_all();
                d.check(
                    "tower result J_E vertices",
                    format_points(&intersection),
                    format_points(&je_vertices(&refinement.kernel, &e)),
                );
                d.check(
                    "tower result normal",
                    refinement.normal,
                    is_normal_def(&refinement.kernel, &e),
                );
            }
            Err(Error::Precondition(msg)) => d.check("tower pipeline", msg, String::new()),
            Err(other) => return Err(other),
        }
    }
    Ok(d.0)
}
