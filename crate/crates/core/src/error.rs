use thiserror::Error;

use crate::rational::{format, Rational};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("a finite space needs at least one point")]
    EmptySpace,
    #[error("point {point} is out of range for a space of {n} points")]
    IndexOutOfRange { point: usize, n: usize },
    #[error("blocks overlap at point {point}")]
    Overlap { point: usize },
    #[error("point {point} is not covered by any block")]
    Coverage { point: usize },
    #[error("space mismatch: {left} points vs {right} points")]
    SpaceMismatch { left: usize, right: usize },
    #[error("negative entry {} at row {row}, column {col}", format(.value))]
    NegativeEntry {
        row: usize,
        col: usize,
        value: Rational,
    },
    #[error("total mass is {}, expected 1", format(.0))]
    NotProbability(Rational),
    #[error("kernel matrix must be square: row {row} has {len} entries, expected {n}")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("kernel row {row} has mass {}, expected 0 or 1", format(.mass))]
    RowMass { row: usize, mass: Rational },
    #[error("kernel rows {first} and {second} differ inside block {block} {members:?}")]
    Measurability {
        block: usize,
        members: Vec<usize>,
        first: usize,
        second: usize,
    },
    #[error("set {0:?} is not a union of partition blocks")]
    NotMeasurableSet(Vec<usize>),
    #[error("kernel is not a restriction of the reference kernel: block {block} {members:?}")]
    NotRestriction { block: usize, members: Vec<usize> },
    #[error("set {0:?} is not full for the kernel")]
    NotFull(Vec<usize>),
    #[error("measure is not a member of J_E(pi)")]
    NotMember,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("dimension {n} exceeds the enumeration limit {limit}")]
    DimensionTooLarge { n: usize, limit: usize },
    #[error("chain is not decreasing at level {level}: {detail}")]
    ChainOrder { level: usize, detail: String },
    #[error("kernel sequence has not stabilized at points {0:?}")]
    NotStabilized(Vec<usize>),
    #[error("window {window} is invalid for a sequence of {len} kernels")]
    WindowTooLarge { window: usize, len: usize },
}
