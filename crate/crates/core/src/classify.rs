//! Proper / adapted / normal classification and the σ-algebras a kernel
//! induces (S_π, N_π, E_π) through its Δ-classes.

use num_traits::{One, Zero};

use crate::error::Result;
use crate::kernel::{JeViolation, Kernel};
use crate::partition::Partition;
use crate::polytope::{je_hrep, same_polytope};
use crate::rational::Rational;
use crate::space::{ensure_same, Measure, ProbabilityMeasure, Subset};

/// Outcome of a property check, carrying a witness on failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict<W> {
    Holds,
    Fails(W),
}

impl<W> Verdict<W> {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            Verdict::Holds => None,
            Verdict::Fails(w) => Some(w),
        }
    }
}

/// π(I_A)(x) ≠ I_A(x)·π(1)(x) at the given atom and point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProperWitness {
    pub atom: usize,
    pub block: Vec<usize>,
    pub point: usize,
    pub lhs: Rational,
    pub rhs: Rational,
}

/// Support row `point` is not in J_E(π).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdaptedWitness {
    pub point: usize,
    pub violation: JeViolation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NormalWitness {
    NotAdapted(AdaptedWitness),
    /// Support row `point` gives its Δ-class mass `mass` < 1.
    DeltaMass {
        point: usize,
        mass: Rational,
    },
}

/// Properness in atom-indicator form: π(I_A) = I_A·π(1) for every atom A of `e`.
///
/// Points are scanned in order; for each point its own atom is tested
/// before the others, so the witness names the atom the row should sit on.
pub fn is_proper(kernel: &Kernel, e: &Partition) -> Result<Verdict<ProperWitness>> {
    kernel.check_measurable(e)?;
    let n = kernel.size();
    for x in 0..n {
        let mass = kernel.row_mass(x);
        let own = e.block_of(x);
        let order = std::iter::once(own).chain((0..e.num_blocks()).filter(|&a| a != own));
        for a in order {
            let block = &e.blocks()[a];
            let lhs = block
                .iter()
                .fold(Rational::zero(), |acc, &y| acc + &kernel.row(x)[y]);
            let rhs = if a == own {
                mass.clone()
            } else {
                Rational::zero()
            };
            if lhs != rhs {
                return Ok(Verdict::Fails(ProperWitness {
                    atom: a,
                    block: block.clone(),
                    point: x,
                    lhs,
                    rhs,
                }));
            }
        }
    }
    Ok(Verdict::Holds)
}

/// Every support row is a member of J_E(π); vacuous on an empty support.
pub fn is_adapted(kernel: &Kernel, e: &Partition) -> Result<Verdict<AdaptedWitness>> {
    kernel.check_measurable(e)?;
    for x in kernel.support().iter() {
        if let Some(violation) = kernel.je_violation(&kernel.row_measure(x), e)? {
            return Ok(Verdict::Fails(AdaptedWitness {
                point: x,
                violation,
            }));
        }
    }
    Ok(Verdict::Holds)
}

/// Normality via the Δ-class criterion: adapted, and each support row puts
/// mass one on its own Δ-class. Debug builds also evaluate the definition
/// (rows trivial on E) and assert that both agree.
pub fn is_normal(kernel: &Kernel, e: &Partition) -> Result<Verdict<NormalWitness>> {
    let verdict = match is_adapted(kernel, e)? {
        Verdict::Fails(w) => Verdict::Fails(NormalWitness::NotAdapted(w)),
        Verdict::Holds => match delta_mass_failure(kernel) {
            Some((point, mass)) => Verdict::Fails(NormalWitness::DeltaMass { point, mass }),
            None => Verdict::Holds,
        },
    };
    debug_assert_eq!(
        verdict.holds(),
        is_normal_by_definition(kernel, e)?,
        "normality criteria disagree"
    );
    Ok(verdict)
}

/// Normality straight from the definition: adapted and every support row
/// trivial on E.
pub fn is_normal_by_definition(kernel: &Kernel, e: &Partition) -> Result<bool> {
    if !is_adapted(kernel, e)?.holds() {
        return Ok(false);
    }
    for x in kernel.support().iter() {
        let row = ProbabilityMeasure::try_from(kernel.row_measure(x))?;
        if !e.is_trivial(&row)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn delta_mass_failure(kernel: &Kernel) -> Option<(usize, Rational)> {
    kernel.support().iter().find_map(|x| {
        let mass = kernel.row_measure(x).of_set(&delta_class(kernel, x));
        (!mass.is_one()).then_some((x, mass))
    })
}

/// Δ_μ^π = { x ∈ S_π : ε_xπ = μ }.
pub fn delta_set(kernel: &Kernel, mu: &Measure) -> Result<Subset> {
    ensure_same(kernel.size(), mu.len())?;
    let support = kernel.support();
    Ok(Subset::from_flags(
        (0..kernel.size())
            .map(|x| support.contains(x) && kernel.row(x) == mu.masses())
            .collect(),
    ))
}

/// Δ_x^π; empty when `x` is off the support.
pub fn delta_class(kernel: &Kernel, x: usize) -> Subset {
    if !kernel.row_mass(x).is_one() {
        return Subset::empty(kernel.size());
    }
    delta_set(kernel, &kernel.row_measure(x)).expect("same space")
}

/// Atoms of S_π: points with identical rows (zero rows form one class).
pub fn sigma_pi(kernel: &Kernel) -> Partition {
    Partition::from_labels(kernel.rows())
}

/// Atoms of N_π: the Δ-classes of support points, plus a singleton for
/// every point off the support.
pub fn n_pi(kernel: &Kernel) -> Partition {
    let support = kernel.support();
    let labels: Vec<(bool, usize)> = (0..kernel.size())
        .map(|x| {
            if support.contains(x) {
                let first = (0..kernel.size())
                    .find(|&y| support.contains(y) && kernel.row(y) == kernel.row(x))
                    .expect("x itself matches");
                (true, first)
            } else {
                (false, x)
            }
        })
        .collect();
    Partition::from_labels(&labels)
}

/// E_π = E ∩ N_π.
pub fn e_pi(kernel: &Kernel, e: &Partition) -> Result<Partition> {
    kernel.check_measurable(e)?;
    e.meet(&n_pi(kernel))
}

/// The five equivalent characterisations of normality, each evaluated on
/// its own terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalityReport {
    /// In order:
    /// 1. normal (adapted with support rows trivial on E)
    /// 2. adapted, and every support row has mass one on its Δ-class
    /// 3. adapted, and proper as an N_π-measurable kernel
    /// 4. proper as an E_π-measurable kernel, and J_{E_π} = J_E
    /// 5. proper as an S_π-measurable kernel, and J_{S_π} = J_E
    pub statements: [bool; 5],
}

impl NormalityReport {
    pub fn all_equal(&self) -> bool {
        self.statements.iter().all(|&s| s == self.statements[0])
    }
}

pub fn normality_report(kernel: &Kernel, e: &Partition) -> Result<NormalityReport> {
    kernel.check_measurable(e)?;
    let adapted = is_adapted(kernel, e)?.holds();
    let s1 = is_normal_by_definition(kernel, e)?;
    let s2 = adapted && delta_mass_failure(kernel).is_none();
    let s3 = adapted && is_proper(kernel, &n_pi(kernel))?.holds();
    let je = je_hrep(kernel, e)?;
    let e_pi = e_pi(kernel, e)?;
    let s4 = is_proper(kernel, &e_pi)?.holds() && same_polytope(&je_hrep(kernel, &e_pi)?, &je)?;
    let s_pi = sigma_pi(kernel);
    let s5 = is_proper(kernel, &s_pi)?.holds() && same_polytope(&je_hrep(kernel, &s_pi)?, &je)?;
    Ok(NormalityReport {
        statements: [s1, s2, s3, s4, s5],
    })
}

/// Proper / adapted / normal with witnesses for whatever fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassificationReport {
    pub proper: Verdict<ProperWitness>,
    pub adapted: Verdict<AdaptedWitness>,
    pub normal: Verdict<NormalWitness>,
    pub support: Subset,
}

impl ClassificationReport {
    pub fn is_proper(&self) -> bool {
        self.proper.holds()
    }

    pub fn is_adapted(&self) -> bool {
        self.adapted.holds()
    }

    pub fn is_normal(&self) -> bool {
        self.normal.holds()
    }
}

pub fn classify(kernel: &Kernel, e: &Partition) -> Result<ClassificationReport> {
    let report = ClassificationReport {
        proper: is_proper(kernel, e)?,
        adapted: is_adapted(kernel, e)?,
        normal: is_normal(kernel, e)?,
        support: kernel.support(),
    };
    // proper ⇒ normal ⇒ adapted
    assert!(
        !report.is_normal() || report.is_adapted(),
        "normal kernel reported as not adapted"
    );
    assert!(
        !report.is_proper() || report.is_normal(),
        "proper kernel reported as not normal"
    );
    Ok(report)
}
