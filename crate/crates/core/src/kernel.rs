//! Quasi-probability kernels on a finite space and their algebra.
//!
//! A kernel is a square matrix whose row `x` is the measure ε_xπ. Each row
//! has mass exactly 0 or 1, and rows are constant on the blocks of the
//! governing partition E, which is what E-measurability means here.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::rational::{self, Rational};
use crate::space::{check_nonnegative, ensure_same, FunctionVec, Measure, Subset};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Kernel {
    rows: Vec<Vec<Rational>>,
    governing: Partition,
}

/// Location of a violated J_E constraint: atom index, atom point count and
/// target point `y` with μ({y}∩A) ≠ Σ_{x∈A} μ(x)π(x,{y}).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JeViolation {
    pub atom: usize,
    pub target: usize,
    pub lhs: Rational,
    pub rhs: Rational,
}

impl Kernel {
    /// Validates row masses, nonnegativity and block constancy on `governing`.
    pub fn new(rows: Vec<Vec<Rational>>, governing: Partition) -> Result<Self> {
        let n = governing.size();
        if rows.len() != n {
            return Err(Error::SpaceMismatch {
                left: rows.len(),
                right: n,
            });
        }
        for (x, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotSquare {
                    row: x,
                    len: row.len(),
                    n,
                });
            }
            check_nonnegative(x, row)?;
            let mass = rational::sum(row);
            if !(mass.is_zero() || mass.is_one()) {
                return Err(Error::RowMass { row: x, mass });
            }
        }
        check_block_constant(&rows, &governing)?;
        Ok(Self { rows, governing })
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|x| {
                (0..n)
                    .map(|y| {
                        if x == y {
                            Rational::one()
                        } else {
                            Rational::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        Self {
            rows,
            governing: Partition::discrete(n),
        }
    }

    pub fn zero(governing: Partition) -> Self {
        let n = governing.size();
        Self {
            rows: vec![vec![Rational::zero(); n]; n],
            governing,
        }
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    pub fn row(&self, x: usize) -> &[Rational] {
        &self.rows[x]
    }

    /// ε_xπ as a measure.
    pub fn row_measure(&self, x: usize) -> Measure {
        Measure::from_raw(self.rows[x].clone())
    }

    pub fn governing(&self) -> &Partition {
        &self.governing
    }

    pub fn row_mass(&self, x: usize) -> Rational {
        rational::sum(&self.rows[x])
    }

    /// S_π = { x : π(x,X) = 1 }.
    pub fn support(&self) -> Subset {
        Subset::from_flags(
            (0..self.size())
                .map(|x| self.row_mass(x).is_one())
                .collect(),
        )
    }

    /// Checks that rows are constant on the blocks of `partition`.
    pub fn check_measurable(&self, partition: &Partition) -> Result<()> {
        ensure_same(self.size(), partition.size())?;
        check_block_constant(&self.rows, partition)
    }

    pub fn is_measurable(&self, partition: &Partition) -> bool {
        self.check_measurable(partition).is_ok()
    }

    /// The same matrix viewed as a kernel governed by `partition`.
    pub fn regovern(&self, partition: &Partition) -> Result<Kernel> {
        self.check_measurable(partition)?;
        Ok(Kernel {
            rows: self.rows.clone(),
            governing: partition.clone(),
        })
    }

    /// π(f)(x) = Σ_y π(x,y) f(y).
    pub fn apply(&self, f: &FunctionVec) -> Result<FunctionVec> {
        ensure_same(self.size(), f.len())?;
        FunctionVec::new(
            self.rows
                .iter()
                .map(|r| rational::dot(r, f.values()))
                .collect(),
        )
    }

    /// μπ as a measure.
    pub fn push(&self, mu: &Measure) -> Result<Measure> {
        ensure_same(self.size(), mu.len())?;
        let n = self.size();
        let mut out = vec![Rational::zero(); n];
        for (m, row) in mu.masses().iter().zip(&self.rows) {
            if m.is_zero() {
                continue;
            }
            for (o, p) in out.iter_mut().zip(row) {
                *o += m * p;
            }
        }
        Ok(Measure::from_raw(out))
    }

    /// The product ρτ with (ρτ)(f) = ρ(τ(f)). Row masses of the product may
    /// fall strictly between 0 and 1, so the result is an unvalidated matrix.
    pub fn compose(&self, other: &Kernel) -> Result<SubstochasticMatrix> {
        ensure_same(self.size(), other.size())?;
        let rows = (0..self.size())
            .map(|x| {
                other
                    .push(&self.row_measure(x))
                    .expect("sizes checked")
                    .masses()
                    .to_vec()
            })
            .collect();
        Ok(SubstochasticMatrix { rows })
    }

    /// First violated J_E constraint for `mu`, scanning atoms then targets.
    pub fn je_violation(&self, mu: &Measure, e: &Partition) -> Result<Option<JeViolation>> {
        ensure_same(self.size(), mu.len())?;
        ensure_same(self.size(), e.size())?;
        let m = mu.masses();
        for (a, atom) in e.blocks().iter().enumerate() {
            for y in 0..self.size() {
                let lhs = if atom.contains(&y) {
                    m[y].clone()
                } else {
                    Rational::zero()
                };
                let rhs = atom
                    .iter()
                    .fold(Rational::zero(), |acc, &x| acc + &m[x] * &self.rows[x][y]);
                if lhs != rhs {
                    return Ok(Some(JeViolation {
                        atom: a,
                        target: y,
                        lhs,
                        rhs,
                    }));
                }
            }
        }
        Ok(None)
    }

    /// μ ∈ J_E(π): for every atom A and point y, μ({y}∩A) = Σ_{x∈A} μ(x)π(x,{y}).
    pub fn in_je(&self, mu: &Measure, e: &Partition) -> Result<bool> {
        Ok(mu.total().is_one() && self.je_violation(mu, e)?.is_none())
    }

    /// μ ∈ J_*(π): μπ = μ.
    pub fn in_jstar(&self, mu: &Measure) -> Result<bool> {
        Ok(mu.total().is_one() && &self.push(mu)? == mu)
    }

    /// The restriction of the matrix to `set`: rows outside are zeroed.
    /// Measurability of `set` is the caller's business; see `refine::restriction`.
    pub(crate) fn restrict_rows(&self, set: &Subset) -> Kernel {
        let n = self.size();
        let rows = self
            .rows
            .iter()
            .enumerate()
            .map(|(x, r)| {
                if set.contains(x) {
                    r.clone()
                } else {
                    vec![Rational::zero(); n]
                }
            })
            .collect();
        Kernel {
            rows,
            governing: self.governing.clone(),
        }
    }
}

fn check_block_constant(rows: &[Vec<Rational>], partition: &Partition) -> Result<()> {
    for (b, block) in partition.blocks().iter().enumerate() {
        let first = block[0];
        if let Some(&second) = block.iter().find(|&&x| rows[x] != rows[first]) {
            return Err(Error::Measurability {
                block: b,
                members: block.clone(),
                first,
                second,
            });
        }
    }
    Ok(())
}

/// An unvalidated nonnegative matrix, typically a product of kernels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubstochasticMatrix {
    rows: Vec<Vec<Rational>>,
}

impl SubstochasticMatrix {
    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    /// Exact row-by-row equality with a kernel's matrix.
    pub fn equals_kernel(&self, kernel: &Kernel) -> bool {
        self.rows == kernel.rows
    }

    pub fn into_kernel(self, governing: Partition) -> Result<Kernel> {
        Kernel::new(self.rows, governing)
    }
}
