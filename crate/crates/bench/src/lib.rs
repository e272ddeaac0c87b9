//! Benchmark inputs shared by the criterion targets.

use wfst::harness::{generate, RandomSpec};
use wfst::{Fst, TropicalWeight};

/// A random acyclic transducer of up to `max_states` states.
pub fn transducer(seed: u64, max_states: usize) -> Fst<TropicalWeight> {
    let spec = RandomSpec {
        max_states,
        arc_density: 1.0,
        ..RandomSpec::acyclic_transducer(seed)
    };
    generate(&spec).expect("feasible spec")
}

/// A random acyclic acceptor of up to `max_states` states.
pub fn acceptor(seed: u64, max_states: usize) -> Fst<TropicalWeight> {
    let spec = RandomSpec {
        max_states,
        arc_density: 1.0,
        ..RandomSpec::acyclic_acceptor(seed)
    };
    generate(&spec).expect("feasible spec")
}

/// A random deterministic cyclic acceptor of up to `max_states` states.
pub fn deterministic(seed: u64, max_states: usize) -> Fst<TropicalWeight> {
    let spec = RandomSpec {
        max_states,
        ..RandomSpec::deterministic_acceptor(seed)
    };
    generate(&spec).expect("feasible spec")
}
