//! The measure sets J_E(π) and J_*(π) as exact polytopes in the
//! probability simplex.
//!
//! Vertices are enumerated as basic feasible solutions: after reducing the
//! equality system (including Σμ = 1) to echelon form with rank r, every
//! r-subset of coordinates is tried as a basis, the square system is solved
//! exactly and nonnegative solutions are kept. No floating point anywhere.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::linalg::{rref, solve_square};
use crate::partition::Partition;
use crate::rational::{self, Rational};
use crate::space::{ensure_same, FunctionVec, Measure, ProbabilityMeasure, Subset};

/// Largest dimension accepted by [`enum_vertices`].
pub const VERTEX_ENUM_LIMIT: usize = 12;

/// Equality constraints `row · μ = rhs` on top of the implicit μ ≥ 0,
/// Σμ = 1. Identically zero rows are dropped on construction; a zero row
/// with nonzero right-hand side is kept and makes the set empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HPolytope {
    n: usize,
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    generated: usize,
}

impl HPolytope {
    pub fn new(n: usize, constraints: Vec<(Vec<Rational>, Rational)>) -> Result<Self> {
        let generated = constraints.len();
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for (row, b) in constraints {
            ensure_same(n, row.len())?;
            if row.iter().all(Zero::is_zero) && b.is_zero() {
                continue;
            }
            rows.push(row);
            rhs.push(b);
        }
        Ok(Self {
            n,
            rows,
            rhs,
            generated,
        })
    }

    /// The whole probability simplex.
    pub fn simplex(n: usize) -> Self {
        Self {
            n,
            rows: Vec::new(),
            rhs: Vec::new(),
            generated: 0,
        }
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    /// Retained (nonzero) constraints.
    pub fn constraints(&self) -> impl Iterator<Item = (&[Rational], &Rational)> {
        self.rows.iter().map(Vec::as_slice).zip(&self.rhs)
    }

    pub fn num_constraints(&self) -> usize {
        self.rows.len()
    }

    /// Constraint count before zero rows were dropped.
    pub fn generated_constraints(&self) -> usize {
        self.generated
    }

    pub fn contains(&self, point: &[Rational]) -> bool {
        point.len() == self.n
            && point.iter().all(|v| !v.is_negative())
            && rational::sum(point).is_one()
            && self
                .constraints()
                .all(|(row, b)| &rational::dot(row, point) == b)
    }

    /// Constraints of both polytopes together.
    pub fn intersect(&self, other: &HPolytope) -> Result<HPolytope> {
        ensure_same(self.n, other.n)?;
        Ok(HPolytope {
            n: self.n,
            rows: self.rows.iter().chain(&other.rows).cloned().collect(),
            rhs: self.rhs.iter().chain(&other.rhs).cloned().collect(),
            generated: self.generated + other.generated,
        })
    }

    pub fn vertices(&self) -> Result<VertexSet> {
        enum_vertices(self)
    }
}

/// Deduplicated vertices in ascending lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct VertexSet {
    vertices: Vec<ProbabilityMeasure>,
}

impl VertexSet {
    pub fn from_measures<I: IntoIterator<Item = ProbabilityMeasure>>(measures: I) -> Self {
        let set: BTreeSet<ProbabilityMeasure> = measures.into_iter().collect();
        Self {
            vertices: set.into_iter().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ProbabilityMeasure> {
        self.vertices.iter()
    }

    pub fn contains(&self, mu: &ProbabilityMeasure) -> bool {
        self.vertices.binary_search(mu).is_ok()
    }

    pub fn as_slice(&self) -> &[ProbabilityMeasure] {
        &self.vertices
    }
}

impl<'a> IntoIterator for &'a VertexSet {
    type Item = &'a ProbabilityMeasure;
    type IntoIter = std::slice::Iter<'a, ProbabilityMeasure>;

    fn into_iter(self) -> Self::IntoIter {
        self.vertices.iter()
    }
}

/// J_E(π): for each atom A of `e` and point y,
/// μ(y)·[y∈A] − Σ_{x∈A} π(x,{y})·μ(x) = 0.
pub fn je_hrep(kernel: &Kernel, e: &Partition) -> Result<HPolytope> {
    let n = kernel.size();
    ensure_same(n, e.size())?;
    let mut constraints = Vec::with_capacity(e.num_blocks() * n);
    for atom in e.blocks() {
        for y in 0..n {
            let mut row = vec![Rational::zero(); n];
            for &x in atom {
                row[x] -= &kernel.row(x)[y];
            }
            if atom.contains(&y) {
                row[y] += Rational::one();
            }
            constraints.push((row, Rational::zero()));
        }
    }
    HPolytope::new(n, constraints)
}

/// J_*(π): μ(y) − Σ_x μ(x)π(x,{y}) = 0 for each y.
pub fn jstar_hrep(kernel: &Kernel) -> Result<HPolytope> {
    let n = kernel.size();
    let constraints = (0..n)
        .map(|y| {
            let mut row: Vec<Rational> = (0..n).map(|x| -kernel.row(x)[y].clone()).collect();
            row[y] += Rational::one();
            (row, Rational::zero())
        })
        .collect();
    HPolytope::new(n, constraints)
}

/// Exact vertex enumeration by basic feasible solutions.
pub fn enum_vertices(poly: &HPolytope) -> Result<VertexSet> {
    let n = poly.n;
    if n > VERTEX_ENUM_LIMIT {
        return Err(Error::DimensionTooLarge {
            n,
            limit: VERTEX_ENUM_LIMIT,
        });
    }
    let mut system: Vec<Vec<Rational>> = poly
        .constraints()
        .map(|(row, b)| {
            let mut r = row.to_vec();
            r.push(b.clone());
            r
        })
        .collect();
    // Σμ = 1
    system.push(vec![Rational::one(); n + 1]);

    let pivots = rref(&mut system, n + 1);
    if pivots.last() == Some(&n) {
        // 0 = 1 after elimination
        return Ok(VertexSet::default());
    }
    let rank = pivots.len();
    let rhs: Vec<Rational> = system.iter().map(|r| r[n].clone()).collect();

    let mut found = BTreeSet::new();
    for basis in combinations(n, rank) {
        let square: Vec<Vec<Rational>> = system
            .iter()
            .map(|r| basis.iter().map(|&c| r[c].clone()).collect())
            .collect();
        let Some(solution) = solve_square(square, &rhs) else {
            continue;
        };
        if solution.iter().any(Signed::is_negative) {
            continue;
        }
        let mut point = vec![Rational::zero(); n];
        for (&c, v) in basis.iter().zip(solution) {
            point[c] = v;
        }
        found.insert(point);
    }
    Ok(VertexSet {
        vertices: found
            .into_iter()
            .map(|p| ProbabilityMeasure::new(p).expect("basic solutions are normalized"))
            .collect(),
    })
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..=(n - (k - cur.len())) {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

/// Equality of feasible sets by mutual vertex containment.
pub fn same_polytope(a: &HPolytope, b: &HPolytope) -> Result<bool> {
    ensure_same(a.n, b.n)?;
    Ok(contained_in(a, b)? && contained_in(b, a)?)
}

/// Feasible set of `a` inside that of `b`, checked on the vertices of `a`.
pub fn contained_in(a: &HPolytope, b: &HPolytope) -> Result<bool> {
    Ok(enum_vertices(a)?.iter().all(|v| b.contains(v.masses())))
}

/// Extreme points of J_E(π) via the trivial-member characterisation: the
/// distinct support rows that are members of J_E(π) and trivial on E.
pub fn extreme_members(kernel: &Kernel, e: &Partition) -> Result<VertexSet> {
    ensure_same(kernel.size(), e.size())?;
    let mut out = Vec::new();
    for x in kernel.support().iter() {
        let row = ProbabilityMeasure::try_from(kernel.row_measure(x))?;
        if kernel.in_je(&row, e)? && e.is_trivial(&row)? {
            out.push(row);
        }
    }
    Ok(VertexSet::from_measures(out))
}

/// μ = a·μ1 + (1−a)·μ2 along an E-set of mass a ∈ (0,1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub set: Subset,
    pub weight: Rational,
    pub first: ProbabilityMeasure,
    pub second: ProbabilityMeasure,
}

/// Splits a non-trivial member of J_E(π) into two distinct members by
/// conditioning on the first atom of intermediate mass. Trivial members
/// yield `None`.
pub fn split_nontrivial(
    mu: &ProbabilityMeasure,
    kernel: &Kernel,
    e: &Partition,
) -> Result<Option<Split>> {
    if !kernel.in_je(mu, e)? {
        return Err(Error::NotMember);
    }
    let Some(set) = (0..e.num_blocks()).map(|b| e.block_set(b)).find(|s| {
        let m = mu.of_set(s);
        !m.is_zero() && !m.is_one()
    }) else {
        return Ok(None);
    };
    let a = mu.of_set(&set);
    let first = mu.reweight(&set.indicator().scale(&a.recip()));
    let second = mu.reweight(
        &set.complement()
            .indicator()
            .scale(&(Rational::one() - &a).recip()),
    );
    Ok(Some(Split {
        set,
        weight: a,
        first: ProbabilityMeasure::try_from(first)?,
        second: ProbabilityMeasure::try_from(second)?,
    }))
}

/// Result of testing whether μ·h stays in J_E(π).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reweight {
    pub member: bool,
    /// h′ = π(h) when `member` holds.
    pub density: Option<FunctionVec>,
    /// μ(h·f) = μ(h′·f) for every singleton indicator f.
    pub certified: bool,
}

pub fn reweight_check(
    mu: &ProbabilityMeasure,
    h: &FunctionVec,
    kernel: &Kernel,
    e: &Partition,
) -> Result<Reweight> {
    ensure_same(kernel.size(), h.len())?;
    if !kernel.in_je(mu, e)? {
        return Err(Error::Precondition("measure is not in J_E(pi)".into()));
    }
    if !mu.integrate(h).is_one() {
        return Err(Error::Precondition(format!(
            "density integrates to {}, expected 1",
            rational::format(&mu.integrate(h))
        )));
    }
    let reweighted: Measure = mu.reweight(h);
    if !kernel.in_je(&reweighted, e)? {
        return Ok(Reweight {
            member: false,
            density: None,
            certified: false,
        });
    }
    let density = kernel.apply(h)?;
    let certified = e.is_measurable_fn(&density)?
        && mu
            .masses()
            .iter()
            .zip(h.values().iter().zip(density.values()))
            .all(|(m, (a, b))| m * a == m * b);
    Ok(Reweight {
        member: true,
        density: Some(density),
        certified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{parse, ratio};
    use crate::space::FiniteSpace;

    fn q(s: &str) -> Rational {
        parse(s).unwrap()
    }

    fn pm(v: &[&str]) -> ProbabilityMeasure {
        ProbabilityMeasure::new(v.iter().map(|s| q(s)).collect()).unwrap()
    }

    fn kernel(rows: &[&[&str]], blocks: &[&[usize]]) -> Kernel {
        let n = rows.len();
        let b: Vec<Vec<usize>> = blocks.iter().map(|b| b.to_vec()).collect();
        let e = Partition::new(FiniteSpace::new(n).unwrap(), &b).unwrap();
        Kernel::new(
            rows.iter()
                .map(|r| r.iter().map(|s| q(s)).collect())
                .collect(),
            e,
        )
        .unwrap()
    }

    fn twophase() -> Kernel {
        kernel(
            &[
                &["1/2", "1/2", "0", "0"],
                &["1/2", "1/2", "0", "0"],
                &["0", "0", "1", "0"],
                &["0", "0", "0", "0"],
            ],
            &[&[0, 1], &[2], &[3]],
        )
    }

    #[test]
    fn hrep_counts() {
        let leaky = kernel(
            &[
                &["1/2", "1/2", "0", "0"],
                &["1/2", "1/2", "0", "0"],
                &["1/4", "0", "3/4", "0"],
                &["1/4", "0", "3/4", "0"],
            ],
            &[&[0, 1], &[2, 3]],
        );
        let h = je_hrep(&leaky, leaky.governing()).unwrap();
        assert_eq!(h.generated_constraints(), 8);
        // atom {0,1} against y = 2, 3 and atom {2,3} against y = 1 vanish
        assert_eq!(h.num_constraints(), 5);

        let id = Kernel::identity(3);
        let h = je_hrep(&id, id.governing()).unwrap();
        assert_eq!(h.generated_constraints(), 9);
        assert_eq!(h.num_constraints(), 0);
    }

    #[test]
    fn vertex_examples() {
        let k = twophase();
        let v = enum_vertices(&je_hrep(&k, k.governing()).unwrap()).unwrap();
        assert_eq!(
            v.as_slice(),
            &[pm(&["0", "0", "1", "0"]), pm(&["1/2", "1/2", "0", "0"])]
        );
        let id = Kernel::identity(3);
        let v = enum_vertices(&je_hrep(&id, id.governing()).unwrap()).unwrap();
        assert_eq!(v.len(), 3);
        assert!((0..3).all(|i| v.contains(&ProbabilityMeasure::point_mass(3, i))));

        let swap = kernel(&[&["0", "1"], &["1", "0"]], &[&[0], &[1]]);
        assert!(enum_vertices(&je_hrep(&swap, swap.governing()).unwrap())
            .unwrap()
            .is_empty());
        let coin = kernel(&[&["1/2", "1/2"], &["1/2", "1/2"]], &[&[0, 1]]);
        let v = enum_vertices(&jstar_hrep(&coin).unwrap()).unwrap();
        assert_eq!(v.as_slice(), &[ProbabilityMeasure::uniform(2)]);
    }

    #[test]
    fn dimension_guard() {
        let h = HPolytope::simplex(13);
        assert_eq!(
            enum_vertices(&h).unwrap_err(),
            Error::DimensionTooLarge { n: 13, limit: 12 }
        );
    }

    #[test]
    fn extreme_member_examples() {
        let k = twophase();
        assert_eq!(
            extreme_members(&k, k.governing()).unwrap().as_slice(),
            &[pm(&["0", "0", "1", "0"]), pm(&["1/2", "1/2", "0", "0"])]
        );
        let halfdead = kernel(&[&["1", "0"], &["0", "0"]], &[&[0], &[1]]);
        assert_eq!(
            extreme_members(&halfdead, halfdead.governing())
                .unwrap()
                .as_slice(),
            &[ProbabilityMeasure::point_mass(2, 0)]
        );
    }

    #[test]
    fn split_examples() {
        let k = twophase();
        let e = k.governing();
        let s = split_nontrivial(&pm(&["1/4", "1/4", "1/2", "0"]), &k, e)
            .unwrap()
            .unwrap();
        assert_eq!(s.weight, ratio(1, 2));
        assert_eq!(s.first, pm(&["1/2", "1/2", "0", "0"]));
        assert_eq!(s.second, pm(&["0", "0", "1", "0"]));
        assert_eq!(
            split_nontrivial(&ProbabilityMeasure::point_mass(4, 2), &k, e).unwrap(),
            None
        );
        assert_eq!(
            split_nontrivial(&ProbabilityMeasure::point_mass(4, 0), &k, e).unwrap_err(),
            Error::NotMember
        );
    }

    #[test]
    fn reweight_examples() {
        let k = twophase();
        let e = k.governing();
        let mu = pm(&["1/4", "1/4", "1/2", "0"]);
        let h = FunctionVec::new(vec![q("2"), q("2"), q("0"), q("0")]).unwrap();
        let r = reweight_check(&mu, &h, &k, e).unwrap();
        assert!(r.member && r.certified);
        assert_eq!(r.density.unwrap(), h);

        let r = reweight_check(&mu, &FunctionVec::ones(4), &k, e).unwrap();
        assert!(r.member && r.certified);

        let mu = pm(&["1/2", "1/2", "0", "0"]);
        let h = FunctionVec::new(vec![q("2"), q("0"), q("0"), q("0")]).unwrap();
        assert!(!reweight_check(&mu, &h, &k, e).unwrap().member);

        let bad = FunctionVec::new(vec![q("1"), q("0"), q("0"), q("0")]).unwrap();
        assert!(matches!(
            reweight_check(&mu, &bad, &k, e),
            Err(Error::Precondition(_))
        ));
    }
}
