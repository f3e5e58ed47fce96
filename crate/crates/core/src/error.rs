use thiserror::Error;

use crate::monodromy::Violation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("series has zero constant term and is not invertible")]
    ZeroConstantTerm,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonodromyError {
    #[error("invalid datum: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("Riemann-Hurwitz gives a non-integral or negative genus (2g-2 = {0})")]
    NonIntegralGenus(i64),
    #[error("locus is empty: g = {g} < 3g' = {}", 3 * .gprime)]
    EmptyLocus { g: u32, gprime: u32 },
    #[error("no residue is coprime to m = {0}; no totally ramified expansion point")]
    NoTotallyRamifiedPoint(u32),
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoverError {
    #[error("branch points are not distinct")]
    RepeatedBranchPoints,
    #[error("datum is not normalized: need a_1 = 1 and t_1 = 0")]
    NotNormalized,
    #[error("expected {expected} branch points, got {got}")]
    BranchPointCount { expected: usize, got: usize },
    #[error("form {label:?} vanishes to precision {precision}; raise the precision")]
    PrecisionTooLow { label: (u32, u32), precision: usize },
    #[error("precision {0} is too small (need at least m + 2)")]
    PrecisionBelowMinimum(usize),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Monodromy(#[from] MonodromyError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GaussianError {
    #[error("selected subspace has {0} element(s); need at least 2")]
    SubspaceTooSmall(usize),
    #[error("selector {0} needs a Z/4 datum (W1, W3 are the nu >= 1 forms of characters 1 and 3)")]
    SelectorNeedsOrderFour(&'static str),
    #[error("vector is not in the kernel of the multiplication map to precision {0}")]
    NotAQuadric(usize),
    #[error("quadric vector has length {got}, expected {expected}")]
    QuadricLength { expected: usize, got: usize },
    #[error("degenerate witness: {0}")]
    Degenerate(String),
    #[error("cover: {0}")]
    Cover(#[from] CoverError),
    #[error("monodromy: {0}")]
    Monodromy(#[from] MonodromyError),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
