use thiserror::Error;

use crate::fst::StateId;
use crate::semiring::Ring;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid weight {value} for the {ring} semiring")]
    InvalidWeight { ring: Ring, value: f64 },
    #[error("division by the zero element of the {0} semiring")]
    DivisionByZero(Ring),
    #[error("unknown state {0}")]
    UnknownState(StateId),
    #[error("ring mismatch: expected {expected}, found {found}")]
    RingMismatch { expected: Ring, found: Ring },
    #[error("operation is not supported for the {ring} semiring: {reason}")]
    UnsupportedRing { ring: Ring, reason: &'static str },
    #[error("oracle not applicable: {0}")]
    OracleInapplicable(String),
    #[error("exhaustive sweep too large: {pairs} string pairs (limit {limit})")]
    SweepTooLarge { pairs: u128, limit: u128 },
    #[error("automaton is cyclic")]
    Cyclic,
    #[error("input is not an acceptor")]
    NotAcceptor,
    #[error("input has epsilon input labels")]
    EpsilonInput,
    #[error("input is not deterministic")]
    NotDeterministic,
    #[error("determinization exceeded {limit} subset states ({subsets} created)")]
    NonDeterminable { subsets: usize, limit: usize },
    #[error("negative cycle detected")]
    NegativeCycle,
    #[error(
        "composition of epsilon paths on both sides is refused in the non-idempotent {0} semiring"
    )]
    AmbiguousEpsilonComposition(Ring),
    #[error("transducer with {0} initial states cannot be serialized")]
    MultipleInitial(usize),
    #[error("initial weight must be one for serialization")]
    InitialWeight,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown symbol {0:?}")]
    UnknownSymbol(String),
    #[error("unknown label {0}")]
    UnknownLabel(u32),
    #[error("invalid symbol table: {0}")]
    SymbolTable(String),
    #[error("no path matches the input")]
    NoPath,
    #[error("invalid input: {0}")]
    Invalid(String),
}
