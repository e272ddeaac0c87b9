//! Weighted finite-state transducers: semirings, composition with an
//! ε-filter, weighted determinization, weight pushing, minimization, a
//! text format, and a brute-force path oracle used to test all of them.

pub mod cascade;
pub mod compose;
pub mod determinize;
pub mod error;
pub mod fst;
pub mod harness;
pub mod minimize;
pub mod oracle;
pub mod reweight;
pub mod semiring;
pub mod textio;

pub use compose::{compose, compose_unfiltered, compose_with_stats, ComposeStats};
pub use determinize::{
    determinize, determinize_with_subsets, twins_check_bounded, Determinization, TwinsOutcome,
    TwinsWitness, DEFAULT_MAX_STATES,
};
pub use error::{Error, Result};
pub use fst::{EncodeTable, Fst, Label, StateId, Transition, EPSILON};
pub use minimize::{equivalence_pushed, minimize, minimize_with_delta};
pub use oracle::{equivalent, oracle_weight, relation, Relation};
pub use reweight::{push_weights, shortest_distance_to_final, shortest_path};
pub use semiring::{LogWeight, ProbabilityWeight, Ring, Semiring, TropicalWeight, DEFAULT_DELTA};
pub use textio::{read_fst, write_fst, SymbolTable};
