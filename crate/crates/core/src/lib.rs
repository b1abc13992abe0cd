//! Exact analysis of quasi-probability kernels on finite measurable spaces.
//!
//! Sub-σ-algebras are partitions, kernels are exact rational matrices with
//! row mass 0 or 1, and the measure sets J_E(π) and J_*(π) are polytopes in
//! the probability simplex whose vertices are enumerated exactly.

pub mod classify;
pub mod error;
pub mod kernel;
pub mod linalg;
pub mod oracle;
pub mod partition;
pub mod polytope;
pub mod random;
pub mod rational;
pub mod refine;
pub mod space;
pub mod towers;

pub use classify::{
    classify, delta_class, delta_set, e_pi, is_adapted, is_normal, is_proper, n_pi,
    normality_report, sigma_pi, ClassificationReport, NormalityReport, Verdict,
};
pub use error::{Error, Result};
pub use kernel::{JeViolation, Kernel, SubstochasticMatrix};
pub use partition::{Partition, Refinement, TracePartition};
pub use polytope::{
    enum_vertices, extreme_members, je_hrep, jstar_hrep, reweight_check, same_polytope,
    split_nontrivial, HPolytope, VertexSet,
};
pub use rational::Rational;
pub use refine::{
    is_full, is_refinement, normal_refinement, proper_refinement, proper_refinement_on_full,
    restriction, RefinementResult,
};
pub use space::{FiniteSpace, FunctionVec, Measure, ProbabilityMeasure, Subset};
pub use towers::{
    compatible_chain, compatible_step, conditional_kernel, limit_kernel, tail_pipeline,
    tower_refine, ChainSpec, LimitMode, TowerResult,
};
