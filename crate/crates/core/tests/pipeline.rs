use wfst::harness::{check_property, check_suite_with, generate, Mutation, Property, RandomSpec};
use wfst::oracle::{equivalent_with_delta, relation, relations_agree};
use wfst::{
    compose, determinize, minimize, push_weights, read_fst, write_fst, Error, Fst, LogWeight,
    Semiring, SymbolTable, TropicalWeight, DEFAULT_MAX_STATES,
};

#[test]
fn log_ring_determinize_and_push_preserve_weights() {
    for seed in 0..40 {
        let a: Fst<LogWeight> = generate(&RandomSpec::acyclic_acceptor(seed)).unwrap();
        let d = determinize(&a, DEFAULT_MAX_STATES).unwrap();
        assert!(d.is_deterministic());
        assert!(
            equivalent_with_delta(&a, &d, 6, 1e-9).unwrap(),
            "seed {seed}"
        );
        let p = push_weights(&a).unwrap();
        assert!(
            equivalent_with_delta(&a, &p, 6, 1e-9).unwrap(),
            "seed {seed}"
        );
    }
}

#[test]
fn log_ring_minimize_preserves_weights() {
    for seed in 0..40 {
        let spec = RandomSpec {
            acyclic: true,
            ..RandomSpec::deterministic_acceptor(seed)
        };
        let a: Fst<LogWeight> = generate(&spec).unwrap();
        let m = minimize(&a).unwrap();
        assert!(m.num_states() <= a.num_states());
        assert!(
            equivalent_with_delta(&a, &m, 8, 1e-9).unwrap(),
            "seed {seed}"
        );
    }
}

#[test]
fn log_ring_refuses_two_sided_epsilon_composition() {
    let text = "#wfst log\n0\t1\t1\t0\t1\n1\n";
    let a: Fst<LogWeight> = read_fst(text, None, None).unwrap();
    let b: Fst<LogWeight> = read_fst("#wfst log\n0\t1\t0\t2\t1\n1\n", None, None).unwrap();
    assert_eq!(
        compose(&a, &b),
        Err(Error::AmbiguousEpsilonComposition(wfst::Ring::Log))
    );
}

#[test]
fn symbolic_round_trip_through_composition() {
    let syms = SymbolTable::from_symbols(["a", "b"]);
    let text = "#wfst tropical\n0\t1\ta\tb\t1\n1\t1\tb\ta\t2\n1\t0.5\n";
    let t: Fst<TropicalWeight> = read_fst(text, Some(&syms), Some(&syms)).unwrap();
    assert_eq!(write_fst(&t, Some(&syms), Some(&syms)).unwrap(), text);
    let swap_text = "#wfst tropical\n0\t0\ta\tb\t2\n0\t0\tb\ta\t1\n0\t0\n";
    let swap: Fst<TropicalWeight> = read_fst(swap_text, Some(&syms), Some(&syms)).unwrap();
    let tt = compose(&t, &swap).unwrap();
    let r = relation(&tt, 3, 3).unwrap();
    // a b -> b a -> a b
    assert_eq!(r[&(vec![1, 2], vec![1, 2])], TropicalWeight::new(6.5));
    let back: Fst<TropicalWeight> = read_fst(
        &write_fst(&tt, Some(&syms), Some(&syms)).unwrap(),
        Some(&syms),
        Some(&syms),
    )
    .unwrap();
    assert!(relations_agree(&r, &relation(&back, 3, 3).unwrap(), 0.0));
}

#[test]
fn determinize_rejects_unsupported_inputs() {
    let t: Fst<TropicalWeight> = read_fst("#wfst tropical\n0\t1\t1\t2\n1\n", None, None).unwrap();
    assert_eq!(determinize(&t, 10).unwrap_err(), Error::NotAcceptor);
    let e: Fst<TropicalWeight> = read_fst("#wfst tropical\n0\t1\t0\t0\n1\n", None, None).unwrap();
    assert_eq!(determinize(&e, 10).unwrap_err(), Error::EpsilonInput);
    let p: Fst<wfst::ProbabilityWeight> =
        read_fst("#wfst prob\n0\t1\t1\t1\t0.5\n1\n", None, None).unwrap();
    assert!(matches!(
        determinize(&p, 10),
        Err(Error::UnsupportedRing { .. })
    ));
}

#[test]
fn every_mutated_property_fails_and_replays() {
    let report = check_suite_with(20, 100, Mutation::FlipArcWeight);
    for result in &report.results {
        if result.property == Property::PushedEquivalenceAgreement {
            continue;
        }
        assert!(
            !result.ok(),
            "{} did not notice the mutation",
            result.property
        );
        for (seed, reason) in &result.failures {
            assert_eq!(
                check_property(result.property, *seed, Mutation::FlipArcWeight),
                Err(reason.clone())
            );
        }
    }
}

#[test]
fn generated_weights_stay_in_range() {
    for seed in 0..30 {
        let f: Fst<TropicalWeight> = generate(&RandomSpec::acyclic_transducer(seed)).unwrap();
        for q in f.states() {
            for t in f.transitions(q) {
                let v = t.weight.value();
                assert!((0.0..=5.0).contains(&v) && v.fract() == 0.0);
            }
        }
    }
}
