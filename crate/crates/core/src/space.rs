//! Finite spaces and the vectors that live on them: subsets, bounded
//! nonnegative functions and measures.

use std::ops::Deref;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// The points `0..n`. The ambient σ-algebra is always the full power set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FiniteSpace {
    n: usize,
}

impl FiniteSpace {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySpace);
        }
        Ok(Self { n })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn points(&self) -> std::ops::Range<usize> {
        0..self.n
    }
}

pub(crate) fn ensure_same(left: usize, right: usize) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::SpaceMismatch { left, right })
    }
}

/// A subset of the space, stored as one membership flag per point.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset {
    members: Vec<bool>,
}

impl Subset {
    pub fn empty(n: usize) -> Self {
        Self {
            members: vec![false; n],
        }
    }

    pub fn full(n: usize) -> Self {
        Self {
            members: vec![true; n],
        }
    }

    pub fn from_flags(members: Vec<bool>) -> Self {
        Self { members }
    }

    pub fn from_indices(n: usize, indices: &[usize]) -> Result<Self> {
        let mut members = vec![false; n];
        for &i in indices {
            if i >= n {
                return Err(Error::IndexOutOfRange { point: i, n });
            }
            members[i] = true;
        }
        Ok(Self { members })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        !self.members.iter().any(|&b| b)
    }

    pub fn count(&self) -> usize {
        self.members.iter().filter(|&&b| b).count()
    }

    pub fn contains(&self, point: usize) -> bool {
        self.members.get(point).copied().unwrap_or(false)
    }

    pub fn flags(&self) -> &[bool] {
        &self.members
    }

    pub fn indices(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
    }

    pub fn intersection(&self, other: &Subset) -> Subset {
        Subset {
            members: self
                .members
                .iter()
                .zip(&other.members)
                .map(|(&a, &b)| a && b)
                .collect(),
        }
    }

    pub fn union(&self, other: &Subset) -> Subset {
        Subset {
            members: self
                .members
                .iter()
                .zip(&other.members)
                .map(|(&a, &b)| a || b)
                .collect(),
        }
    }

    pub fn complement(&self) -> Subset {
        Subset {
            members: self.members.iter().map(|&b| !b).collect(),
        }
    }

    pub fn is_subset_of(&self, other: &Subset) -> bool {
        self.members
            .iter()
            .zip(&other.members)
            .all(|(&a, &b)| !a || b)
    }

    pub fn indicator(&self) -> FunctionVec {
        FunctionVec {
            values: self
                .members
                .iter()
                .map(|&b| if b { Rational::one() } else { Rational::zero() })
                .collect(),
        }
    }
}

/// A bounded nonnegative function on the space (an element of B(F)).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FunctionVec {
    values: Vec<Rational>,
}

impl FunctionVec {
    pub fn new(values: Vec<Rational>) -> Result<Self> {
        check_nonnegative(0, &values)?;
        Ok(Self { values })
    }

    pub fn constant(n: usize, value: Rational) -> Self {
        Self {
            values: vec![value; n],
        }
    }

    pub fn ones(n: usize) -> Self {
        Self::constant(n, Rational::one())
    }

    pub fn point_indicator(n: usize, point: usize) -> Self {
        let mut values = vec![Rational::zero(); n];
        values[point] = Rational::one();
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Rational> {
        self.values
    }

    /// Pointwise product.
    pub fn mul(&self, other: &FunctionVec) -> FunctionVec {
        FunctionVec {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .collect(),
        }
    }

    pub fn scale(&self, factor: &Rational) -> FunctionVec {
        FunctionVec {
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }
}

pub(crate) fn check_nonnegative(row: usize, values: &[Rational]) -> Result<()> {
    match values
        .iter()
        .enumerate()
        .find(|(_, v)| !rational::is_nonnegative(v))
    {
        Some((col, value)) => Err(Error::NegativeEntry {
            row,
            col,
            value: value.clone(),
        }),
        None => Ok(()),
    }
}

/// A finite nonnegative measure given by its point masses.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Measure {
    mass: Vec<Rational>,
}

impl Measure {
    pub fn new(mass: Vec<Rational>) -> Result<Self> {
        check_nonnegative(0, &mass)?;
        Ok(Self { mass })
    }

    pub fn zero(n: usize) -> Self {
        Self {
            mass: vec![Rational::zero(); n],
        }
    }

    pub(crate) fn from_raw(mass: Vec<Rational>) -> Self {
        Self { mass }
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn masses(&self) -> &[Rational] {
        &self.mass
    }

    pub fn total(&self) -> Rational {
        rational::sum(&self.mass)
    }

    pub fn is_zero(&self) -> bool {
        self.mass.iter().all(Zero::is_zero)
    }

    /// μ(f), the integral of `f`.
    pub fn integrate(&self, f: &FunctionVec) -> Rational {
        rational::dot(&self.mass, f.values())
    }

    /// μ(I_A).
    pub fn of_set(&self, set: &Subset) -> Rational {
        set.iter()
            .fold(Rational::zero(), |acc, i| acc + &self.mass[i])
    }

    /// The measure f ↦ μ(h·f).
    pub fn reweight(&self, density: &FunctionVec) -> Measure {
        Measure {
            mass: self
                .mass
                .iter()
                .zip(density.values())
                .map(|(m, h)| m * h)
                .collect(),
        }
    }
}

/// A measure with total mass exactly one.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProbabilityMeasure(Measure);

impl ProbabilityMeasure {
    pub fn new(mass: Vec<Rational>) -> Result<Self> {
        Self::try_from(Measure::new(mass)?)
    }

    pub fn point_mass(n: usize, point: usize) -> Self {
        let mut mass = vec![Rational::zero(); n];
        mass[point] = Rational::one();
        Self(Measure { mass })
    }

    pub fn uniform(n: usize) -> Self {
        let w = rational::ratio(1, n as i64);
        Self(Measure { mass: vec![w; n] })
    }

    pub fn as_measure(&self) -> &Measure {
        &self.0
    }

    pub fn into_measure(self) -> Measure {
        self.0
    }
}

impl TryFrom<Measure> for ProbabilityMeasure {
    type Error = Error;

    fn try_from(measure: Measure) -> Result<Self> {
        let total = measure.total();
        if total.is_one() {
            Ok(Self(measure))
        } else {
            Err(Error::NotProbability(total))
        }
    }
}

impl Deref for ProbabilityMeasure {
    type Target = Measure;

    fn deref(&self) -> &Measure {
        &self.0
    }
}
