//! Sub-σ-algebras of a finite power set, represented by their atoms.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::space::{ensure_same, FiniteSpace, FunctionVec, ProbabilityMeasure, Subset};

/// A partition of `0..n` into nonempty blocks.
///
/// Blocks are sorted internally and ordered by their least element, so two
/// partitions generating the same σ-algebra compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    n: usize,
    blocks: Vec<Vec<usize>>,
    block_of: Vec<usize>,
}

/// How two σ-algebras on the same space relate under inclusion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Refinement {
    /// The first partition is strictly finer: its σ-algebra strictly contains the other.
    Finer,
    Coarser,
    Equal,
    Incomparable,
}

impl Refinement {
    /// True for `Finer` or `Equal`.
    pub fn at_least_as_fine(self) -> bool {
        matches!(self, Refinement::Finer | Refinement::Equal)
    }

    pub fn name(self) -> &'static str {
        match self {
            Refinement::Finer => "finer",
            Refinement::Coarser => "coarser",
            Refinement::Equal => "equal",
            Refinement::Incomparable => "incomparable",
        }
    }
}

impl Partition {
    /// Validates `blocks` as a partition of `space`.
    pub fn new(space: FiniteSpace, blocks: &[Vec<usize>]) -> Result<Self> {
        let n = space.size();
        let mut owner = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            for &x in block {
                if x >= n {
                    return Err(Error::IndexOutOfRange { point: x, n });
                }
                if owner[x] != usize::MAX {
                    return Err(Error::Overlap { point: x });
                }
                owner[x] = b;
            }
        }
        if let Some(point) = owner.iter().position(|&o| o == usize::MAX) {
            return Err(Error::Coverage { point });
        }
        Ok(Self::from_labels(&owner))
    }

    /// Groups points carrying equal labels.
    pub fn from_labels<L: PartialEq>(labels: &[L]) -> Self {
        let n = labels.len();
        let mut block_of = vec![usize::MAX; n];
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for x in 0..n {
            if block_of[x] != usize::MAX {
                continue;
            }
            let id = blocks.len();
            let mut block = Vec::new();
            for y in x..n {
                if block_of[y] == usize::MAX && labels[y] == labels[x] {
                    block_of[y] = id;
                    block.push(y);
                }
            }
            blocks.push(block);
        }
        Self {
            n,
            blocks,
            block_of,
        }
    }

    pub fn discrete(n: usize) -> Self {
        Self::from_labels(&(0..n).collect::<Vec<_>>())
    }

    pub fn trivial(n: usize) -> Self {
        Self::from_labels(&vec![0u8; n])
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Index of the block containing `point`.
    pub fn block_of(&self, point: usize) -> usize {
        self.block_of[point]
    }

    pub fn block_set(&self, block: usize) -> Subset {
        let mut flags = vec![false; self.n];
        for &x in &self.blocks[block] {
            flags[x] = true;
        }
        Subset::from_flags(flags)
    }

    pub fn block_indicator(&self, block: usize) -> FunctionVec {
        self.block_set(block).indicator()
    }

    /// Atoms of σ(self) ∩ σ(other): connected components of the
    /// block-overlap graph.
    pub fn meet(&self, other: &Partition) -> Result<Partition> {
        ensure_same(self.n, other.n)?;
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for block in self.blocks.iter().chain(&other.blocks) {
            for w in block.windows(2) {
                let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let roots: Vec<usize> = (0..self.n).map(|x| find(&mut parent, x)).collect();
        Ok(Partition::from_labels(&roots))
    }

    /// True when every block of `other` is a union of blocks of `self`,
    /// i.e. σ(other) ⊂ σ(self).
    pub fn refines(&self, other: &Partition) -> Result<bool> {
        ensure_same(self.n, other.n)?;
        Ok(self
            .blocks
            .iter()
            .all(|b| b.iter().all(|&x| other.block_of[x] == other.block_of[b[0]])))
    }

    pub fn compare(&self, other: &Partition) -> Result<Refinement> {
        let fine = self.refines(other)?;
        let coarse = other.refines(self)?;
        Ok(match (fine, coarse) {
            (true, true) => Refinement::Equal,
            (true, false) => Refinement::Finer,
            (false, true) => Refinement::Coarser,
            (false, false) => Refinement::Incomparable,
        })
    }

    /// The trace σ-algebra on `domain`: nonempty intersections of blocks with it.
    pub fn trace(&self, domain: &Subset) -> TracePartition {
        let mut blocks: Vec<Vec<usize>> = self
            .blocks
            .iter()
            .map(|b| {
                b.iter()
                    .copied()
                    .filter(|&x| domain.contains(x))
                    .collect::<Vec<_>>()
            })
            .filter(|b| !b.is_empty())
            .collect();
        // blocks are sorted internally, so this orders them by least element
        blocks.sort();
        TracePartition {
            domain: domain.clone(),
            blocks,
        }
    }

    /// Membership of a set in σ(self).
    pub fn contains_set(&self, set: &Subset) -> Result<bool> {
        ensure_same(self.n, set.len())?;
        Ok(self
            .blocks
            .iter()
            .all(|b| b.iter().all(|&x| set.contains(x) == set.contains(b[0]))))
    }

    /// Membership of `f` in B(σ(self)): constant on every block.
    pub fn is_measurable_fn(&self, f: &FunctionVec) -> Result<bool> {
        ensure_same(self.n, f.len())?;
        let v = f.values();
        Ok(self
            .blocks
            .iter()
            .all(|b| b.iter().all(|&x| v[x] == v[b[0]])))
    }

    /// Every block (hence every set of σ(self)) has mass 0 or 1.
    pub fn is_trivial(&self, mu: &ProbabilityMeasure) -> Result<bool> {
        ensure_same(self.n, mu.len())?;
        Ok((0..self.blocks.len()).all(|b| {
            let m = mu.of_set(&self.block_set(b));
            m.is_zero() || m.is_one()
        }))
    }

    /// Block index lists, handy for reports.
    pub fn to_blocks(&self) -> Vec<Vec<usize>> {
        self.blocks.clone()
    }
}

/// A partition of a subset `domain` of the space (the atoms of a trace σ-algebra).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TracePartition {
    pub domain: Subset,
    pub blocks: Vec<Vec<usize>>,
}

impl TracePartition {
    /// Indicator of a trace atom, extended by zero off the domain.
    pub fn extended_indicator(&self, block: usize) -> FunctionVec {
        let n = self.domain.len();
        Subset::from_indices(n, &self.blocks[block])
            .expect("trace blocks are in range")
            .indicator()
    }
}
