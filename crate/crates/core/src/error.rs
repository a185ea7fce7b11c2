use thiserror::Error;

use crate::sequence::GSequence;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("cyclic order must be at least 1, got {0}")]
    InvalidOrder(u64),
    #[error("group order overflows")]
    TooLarge,
    #[error("element has {found} coordinates, group has {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("residue {residue} out of range for coordinate {coordinate} of order {order}")]
    ResidueOutOfRange { coordinate: usize, residue: u64, order: u64 },
    #[error("cannot parse `{0}`")]
    Parse(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("exponents must be non-decreasing: {0:?}")]
    ExponentsNotSorted(Vec<u32>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SequenceError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("invalid witness: {0}")]
    InvalidWitness(String),
    #[error("index {index} out of range for sequence of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("index {0} used more than once")]
    RepeatedIndex(usize),
    #[error("expected length {expected}, found {found}")]
    WrongLength { expected: usize, found: usize },
    #[error("malformed sequence: {0}")]
    Malformed(String),
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("group of order {order} (r = {r}) exceeds the size guard")]
    SizeGuard { order: u64, r: u64 },
    #[error("search budget exhausted after {nodes} nodes; best lower bound {lower_bound}")]
    BudgetExceeded {
        lower_bound: u64,
        nodes: u64,
        certificate: Box<GSequence>,
    },
    #[error("r must be at least 1")]
    ZeroR,
}

#[derive(Debug, Error)]
pub enum ConstructionError {
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("input not certified: {0}")]
    CertifiedInput(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// A construction step that the underlying proposition guarantees
    /// failed; this would contradict the proposition.
    #[error("construction failed where a witness is guaranteed: {0}")]
    Inconsistency(String),
    #[error("no zero-sum subsequence found for a sequence claimed to have one")]
    Counterexample(Box<GSequence>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundsError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    /// Two sources disagree; one of them is wrong.
    #[error("contradictory bounds: {0}")]
    Contradiction(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CacheError {
    #[error("cache i/o: {0}")]
    Io(String),
    #[error("cache file malformed: {0}")]
    Parse(String),
    #[error("cache conflict: {0}")]
    Conflict(String),
}
