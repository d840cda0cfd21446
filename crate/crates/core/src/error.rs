//! Shared error type for the engine.

use thiserror::Error;

/// Errors surfaced by the engine's fallible operations.
#[derive(Debug, Error)]
pub enum EngineError {
    /// The root-of-unity order must be a positive integer.
    #[error("root-of-unity order must be positive, got {0}")]
    InvalidOrder(u64),

    /// Two objects that must share a dimension do not.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// An exact division had a nonzero remainder.
    #[error("exact division failed: {0}")]
    NotDivisible(String),

    /// An element that must be invertible is not.
    #[error("element is not a unit")]
    NotAUnit,

    /// A step or size budget was exhausted before the computation finished.
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    /// The coprimality assumption fails for this order, so the requested
    /// operation is not defined.
    #[error("coprimality violated at order {ell}: {detail}")]
    CoprimeViolated { ell: u64, detail: String },

    /// The supplied matrix pair fails the compatibility congruences.
    #[error("pair is not compatible: {0}")]
    Incompatible(String),

    /// An element could not be written over the module basis with central
    /// coefficients.
    #[error("decomposition failed: {0}")]
    DecompositionFailed(String),

    /// The supplied seed collection is not a nerve.
    #[error("not a nerve: {0}")]
    NotANerve(String),

    /// A weight that must lie in the root lattice does not.
    #[error("not in the root lattice: {0}")]
    NotInRootLattice(String),

    /// A word in the Weyl group letters is not reduced.
    #[error("word is not reduced: {0}")]
    NotReduced(String),

    /// The word falls outside the families the engine can realize.
    #[error("unsupported word: {0}")]
    UnsupportedWord(String),

    /// Malformed or inconsistent caller input.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
