use alloc::boxed::Box;
use alloc::string::String;
use core::fmt;

use crate::Rational;

/// The orthomodular poset axioms checked by [`validate_logic`](crate::validate_logic).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    /// `e ≤ f` implies `f' ≤ e'`.
    A,
    /// `e'' = e`.
    B,
    /// Orthogonal pairs have a supremum.
    C,
    /// `e ∨ e' = 1`.
    D,
    /// Orthomodular law: `f ≤ e` implies `e = f ∨ (e ∧ f')`.
    E,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Axiom::A => "A",
            Axiom::B => "B",
            Axiom::C => "C",
            Axiom::D => "D",
            Axiom::E => "E",
        };
        f.write_str(c)
    }
}

/// Errors raised by the library. Element indices in payloads refer to the
/// canonical ordering of the logic the operation ran on.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("malformed logic description: {0}")]
    Malformed(String),
    #[error("logic has {size} elements, limit is {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error("order is not antisymmetric: {a} and {b} lie below each other")]
    NotAPartialOrder { a: usize, b: usize },
    #[error("declared zero/one are not the minimum/maximum of the order")]
    NoBounds,
    #[error("orthocomplementation is not involutive at element {0}")]
    OrthoNotInvolutive(usize),
    #[error("axiom ({axiom}) fails with witness e={e}, f={f}")]
    AxiomViolation { axiom: Axiom, e: usize, f: usize },
    #[error("no supremum of {0} and {1}")]
    NoSupremum(usize, usize),
    #[error("no infimum of {0} and {1}")]
    NoInfimum(usize, usize),
    #[error("search budget of {0} nodes exceeded")]
    SearchBudgetExceeded(u64),
    #[error("vertex budget of {0} exceeded")]
    VertexBudgetExceeded(usize),
    #[error("the logic admits no state")]
    EmptyStateSpace,
    #[error("state assigns probability zero to the conditioning event {0}")]
    ZeroCondition(usize),
    #[error("the conditioning projection has zero probability in this state")]
    ZeroProbability,
    #[error("no state assigns probability one to event {0}")]
    Undefined(usize),
    #[error("element {0} is not an atom")]
    NotAnAtom(usize),
    #[error("more than one state takes value one on atom {0}")]
    NotUnique(usize),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("atom equivalences disagree for atoms {e} and {f}: {table:?}")]
    EquivalenceViolated {
        e: usize,
        f: usize,
        table: [bool; 4],
    },
    #[error("map does not preserve order: {0} ≤ {1} but images are not ordered")]
    NotOrderPreserving(usize, usize),
    #[error("map does not preserve orthocomplement at element {0}")]
    OrthoNotPreserved(usize),
    #[error("map does not send the unit to the unit")]
    UnitNotPreserved,
    #[error("map is not injective: {0} and {1} share an image")]
    NotInjective(usize, usize),
    #[error("map is not a bijection")]
    NotBijective,
    #[error("map has length {found}, expected {expected}")]
    MapLength { expected: usize, found: usize },
    #[error("{lemma} violated: {detail}")]
    LemmaViolated {
        lemma: &'static str,
        detail: Box<LemmaDetail>,
    },
    #[error("logic is not Boolean")]
    NotBoolean,
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("construction failed: {0}")]
    ConstructionFailed(String),
    #[error("certificate failed for pair ({e1}, {e2}): {detail}")]
    CertificateFailed {
        e1: usize,
        e2: usize,
        detail: String,
    },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid operator: {0}")]
    InvalidOperator(String),
    #[error("check failed: {0}")]
    CheckFailed(String),
}

/// Values attached to a [`Error::LemmaViolated`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaDetail {
    pub message: String,
    pub expected: Option<Rational>,
    pub found: Option<Rational>,
}

impl fmt::Display for LemmaDetail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)?;
        if let Some(x) = &self.expected {
            write!(f, " (expected {x}")?;
            match &self.found {
                Some(y) => write!(f, ", found {y})")?,
                None => f.write_str(", found none)")?,
            }
        }
        Ok(())
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
