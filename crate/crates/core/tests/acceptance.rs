//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails or overruns its time budget.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wfst::cascade::{
    build_grammar, build_lexicon, build_recognition_graph, decode, parse_grammar, parse_lexicon,
    DEMO_GRAMMAR, DEMO_LEXICON,
};
use wfst::harness::{check_property, generate, Mutation, Property, RandomSpec};
use wfst::oracle::{count_matching_paths, relation, relations_agree};
use wfst::{
    compose, compose_unfiltered, determinize, push_weights, read_fst, twins_check_bounded,
    write_fst, Error, Fst, Label, LogWeight, ProbabilityWeight, Semiring, SymbolTable,
    TropicalWeight, TwinsOutcome, EPSILON,
};

const SEED: u64 = 42;
const DELTA: f64 = 1e-9;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("semiring laws", Duration::from_secs(1), semiring_laws),
        (
            "composition join identity",
            Duration::from_secs(120),
            composition_join,
        ),
        (
            "epsilon-filter redundancy",
            Duration::from_secs(1),
            epsilon_filter,
        ),
        ("determinization", Duration::from_secs(120), determinization),
        (
            "twins and state guard",
            Duration::from_secs(10),
            twins_guard,
        ),
        ("weight pushing", Duration::from_secs(60), weight_pushing),
        ("minimization", Duration::from_secs(120), minimization),
        (
            "equivalence via pushing",
            Duration::from_secs(60),
            pushed_equivalence,
        ),
        ("cascade demo", Duration::from_secs(10), cascade_demo),
        ("text round-trip", Duration::from_secs(5), round_trip),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > *budget => {
                Err(format!("{detail}; took {elapsed:.2?}, budget {budget:?}"))
            }
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS  {:>2} {name}: {detail} ({elapsed:.2?})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {:>2} {name}: {detail} ({elapsed:.2?})", i + 1);
            }
        }
    }
    if failed == 0 {
        println!("acceptance: all {} criteria passed", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn laws<W: Semiring>(
    draw: impl Fn(&mut ChaCha8Rng) -> W,
    rng: &mut ChaCha8Rng,
) -> Result<(), String> {
    let eq = |x: W, y: W| x.approx_eq(&y, DELTA);
    for _ in 0..1000 {
        let (a, b, c) = (draw(rng), draw(rng), draw(rng));
        let ctx = || format!("{} on ({a}, {b}, {c})", W::RING);
        check(eq(a.plus(&b).plus(&c), a.plus(&b.plus(&c))), || {
            format!("⊕ associativity {}", ctx())
        })?;
        check(eq(a.times(&b).times(&c), a.times(&b.times(&c))), || {
            format!("⊗ associativity {}", ctx())
        })?;
        check(eq(a.plus(&b), b.plus(&a)), || {
            format!("⊕ commutativity {}", ctx())
        })?;
        check(
            eq(a.times(&b.plus(&c)), a.times(&b).plus(&a.times(&c))),
            || format!("left distributivity {}", ctx()),
        )?;
        check(
            eq(b.plus(&c).times(&a), b.times(&a).plus(&c.times(&a))),
            || format!("right distributivity {}", ctx()),
        )?;
        check(
            eq(a.plus(&W::zero()), a) && eq(W::zero().plus(&a), a),
            || format!("⊕ identity {}", ctx()),
        )?;
        check(
            eq(a.times(&W::one()), a) && eq(W::one().times(&a), a),
            || format!("⊗ identity {}", ctx()),
        )?;
        check(
            a.times(&W::zero()).is_zero() && W::zero().times(&a).is_zero(),
            || format!("annihilator {}", ctx()),
        )?;
        if W::IDEMPOTENT {
            check(a.plus(&a) == a, || format!("idempotence {}", ctx()))?;
        }
    }
    Ok(())
}

fn semiring_laws() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    // A tenth of the draws are the zero element.
    laws(
        |r| {
            if r.gen_bool(0.1) {
                TropicalWeight::zero()
            } else {
                TropicalWeight::new(r.gen_range(-50.0..50.0))
            }
        },
        &mut rng,
    )?;
    laws(
        |r| {
            if r.gen_bool(0.1) {
                LogWeight::zero()
            } else {
                LogWeight::new(r.gen_range(-5.0..20.0))
            }
        },
        &mut rng,
    )?;
    laws(
        |r| {
            if r.gen_bool(0.1) {
                ProbabilityWeight::zero()
            } else {
                ProbabilityWeight::new(r.gen_range(0.0..1.0))
            }
        },
        &mut rng,
    )?;
    Ok("1000 triples per ring".into())
}

fn property_sweep(property: Property, n: u64) -> Outcome {
    let failures: Vec<String> = (0..n)
        .filter_map(|i| {
            check_property(property, SEED + i, Mutation::None)
                .err()
                .map(|e| format!("seed {}: {e}", SEED + i))
        })
        .collect();
    if failures.is_empty() {
        Ok(format!("{n} instances"))
    } else {
        Err(format!(
            "{} of {n} failed; first: {}",
            failures.len(),
            failures[0]
        ))
    }
}

fn composition_join() -> Outcome {
    property_sweep(Property::ComposeJoin, 200)
}

fn linear(arcs: &[(Label, Label, f64)]) -> Fst<TropicalWeight> {
    let mut f = Fst::new();
    f.add_states(arcs.len() + 1);
    f.set_start(0).unwrap();
    for (k, &(i, o, w)) in arcs.iter().enumerate() {
        f.add_arc(k, i, o, TropicalWeight::new(w), k + 1).unwrap();
    }
    f.set_final(arcs.len(), TropicalWeight::one()).unwrap();
    f
}

fn epsilon_filter() -> Outcome {
    // Left: a:a b:ε c:ε d:d. Right: a:d ε:e d:a. The ε-moves of the two
    // sides interleave freely in the unfiltered product.
    let (a, b, c, d, e) = (1, 2, 3, 4, 5);
    let left = linear(&[
        (a, a, 1.0),
        (b, EPSILON, 2.0),
        (c, EPSILON, 3.0),
        (d, d, 4.0),
    ]);
    let right = linear(&[(a, d, 1.0), (EPSILON, e, 2.0), (d, a, 3.0)]);
    let filtered = compose(&left, &right).map_err(|e| e.to_string())?;
    let naive = compose_unfiltered(&left, &right);

    let rl = relation(&left, usize::MAX, usize::MAX).map_err(|e| e.to_string())?;
    let rr = relation(&right, usize::MAX, usize::MAX).map_err(|e| e.to_string())?;
    let joined = wfst::harness::join_relation(&rl, &rr, usize::MAX);
    let got = relation(&filtered, usize::MAX, usize::MAX).map_err(|e| e.to_string())?;
    check(relations_agree(&joined, &got, 0.0), || {
        "weights differ from the join".into()
    })?;
    check(!joined.is_empty(), || "construction accepts nothing".into())?;
    for (x, y) in joined.keys() {
        let f = count_matching_paths(&filtered, x, y).map_err(|e| e.to_string())?;
        let u = count_matching_paths(&naive, x, y).map_err(|e| e.to_string())?;
        check(f == 1 && u >= 2, || {
            format!("{x:?}:{y:?} has {f} filtered and {u} unfiltered paths")
        })?;
    }
    let (x, y) = joined.keys().next().unwrap();
    let u = count_matching_paths(&naive, x, y).unwrap();
    Ok(format!(
        "{} accepted pair(s); 1 filtered path vs {u} unfiltered",
        joined.len()
    ))
}

fn determinization() -> Outcome {
    property_sweep(Property::DeterminizeEquivalence, 200)
}

/// 0 -a/0-> 1 and 0 -a/1-> 2, with b-cycles of weight `w1` at 1 and `w2` at 2.
fn siblings(w1: f64, w2: f64) -> Fst<TropicalWeight> {
    let mut f = Fst::new();
    f.add_states(3);
    f.set_start(0).unwrap();
    f.add_arc(0, 1, 1, TropicalWeight::new(0.0), 1).unwrap();
    f.add_arc(0, 1, 1, TropicalWeight::new(1.0), 2).unwrap();
    f.add_arc(1, 2, 2, TropicalWeight::new(w1), 1).unwrap();
    f.add_arc(2, 2, 2, TropicalWeight::new(w2), 2).unwrap();
    f.set_final(1, TropicalWeight::one()).unwrap();
    f.set_final(2, TropicalWeight::one()).unwrap();
    f
}

fn twins_guard() -> Outcome {
    let bad = siblings(3.0, 4.0);
    match determinize(&bad, 1000) {
        Err(Error::NonDeterminable { limit: 1000, .. }) => {}
        other => return Err(format!("expected NonDeterminable, got {other:?}")),
    }
    let witness = match twins_check_bounded(&bad, 4).map_err(|e| e.to_string())? {
        TwinsOutcome::ViolationWitness(w) => w,
        other => return Err(format!("expected a witness, got {other:?}")),
    };
    check(witness.weights.0 != witness.weights.1, || {
        "witness cycles have equal weights".into()
    })?;
    let good = siblings(3.0, 3.0);
    let det = determinize(&good, 1000).map_err(|e| e.to_string())?;
    check(det.is_deterministic(), || {
        "output is not deterministic".into()
    })?;
    check(
        wfst::equivalent(&good, &det, 6).map_err(|e| e.to_string())?,
        || "equal-cycle variant changed its weights".into(),
    )?;
    Ok(format!(
        "witness at states {:?} on cycle {:?}; equal-cycle variant has {} states",
        witness.states,
        witness.cycle,
        det.num_states()
    ))
}

fn weight_pushing() -> Outcome {
    property_sweep(Property::PushEquivalence, 200)?;
    let mut f: Fst<ProbabilityWeight> = Fst::new();
    f.add_states(2);
    f.set_start(0).unwrap();
    f.add_arc(0, 1, 1, ProbabilityWeight::new(0.3), 1).unwrap();
    f.add_arc(0, 2, 2, ProbabilityWeight::new(0.5), 1).unwrap();
    f.set_final(1, ProbabilityWeight::new(0.4)).unwrap();
    let p = push_weights(&f).map_err(|e| e.to_string())?;
    for q in p.states() {
        let sum: f64 = p
            .transitions(q)
            .iter()
            .map(|t| t.weight.value())
            .sum::<f64>()
            + p.final_weight(q).value();
        check((sum - 1.0).abs() <= DELTA, || {
            format!("state {q} sums to {sum}")
        })?;
    }
    Ok("200 instances; probability branches sum to 1".into())
}

fn minimization() -> Outcome {
    property_sweep(Property::MinimizeMinimality, 100)
}

fn pushed_equivalence() -> Outcome {
    property_sweep(Property::PushedEquivalenceAgreement, 100)
        .map(|_| "100 instances, 300 pairs".into())
}

/// Lowest −ln weight and word sequence for every phone string reachable by
/// word sequences of up to `max_words` words, by direct enumeration.
fn enumerate_cascade(
    lexicon: &[wfst::cascade::LexiconEntry],
    bigrams: &[(String, String, f64)],
    max_words: usize,
) -> BTreeMap<Vec<String>, Vec<(f64, Vec<String>)>> {
    let mut out: BTreeMap<Vec<String>, Vec<(f64, Vec<String>)>> = BTreeMap::new();
    let bigram = |a: &str, b: &str| {
        bigrams
            .iter()
            .find(|(x, y, _)| x == a && y == b)
            .map(|&(_, _, p)| p)
    };
    let mut frontier: Vec<(Vec<String>, Vec<String>, f64)> = vec![(vec![], vec![], 1.0)];
    for _ in 0..max_words {
        let mut next = Vec::new();
        for (words, phones, p) in &frontier {
            for e in lexicon {
                let transition = match words.last() {
                    None => Some(1.0),
                    Some(prev) => bigram(prev, &e.word),
                };
                let Some(t) = transition else { continue };
                let mut w = words.clone();
                w.push(e.word.clone());
                let mut ph = phones.clone();
                ph.extend(e.pronunciation.iter().cloned());
                let prob = p * t * e.probability;
                out.entry(ph.clone())
                    .or_default()
                    .push((-prob.ln(), w.clone()));
                next.push((w, ph, prob));
            }
        }
        frontier = next;
    }
    out
}

fn cascade_demo() -> Outcome {
    let entries = parse_lexicon(DEMO_LEXICON).map_err(|e| e.to_string())?;
    let spec = parse_grammar(DEMO_GRAMMAR).map_err(|e| e.to_string())?;
    let (mut phones, mut words) = (SymbolTable::new(), SymbolTable::new());
    let l = build_lexicon(&entries, &mut phones, &mut words).map_err(|e| e.to_string())?;
    let g = build_grammar(&spec, &mut words).map_err(|e| e.to_string())?;
    let graph = build_recognition_graph(&l, &g, 1000).map_err(|e| e.to_string())?;

    let count = |stage: &str| {
        graph
            .stages
            .iter()
            .find(|s| s.stage == stage)
            .map(|s| s.states)
    };
    let (det, min) = (count("determinize").unwrap(), count("minimize").unwrap());
    check(det >= min, || format!("determinize {det} < minimize {min}"))?;
    if let (Some(pd), Some(pm)) = (
        count("projection/determinize"),
        count("projection/minimize"),
    ) {
        check(pd >= pm, || {
            format!("projection: determinize {pd} < minimize {pm}")
        })?;
    }

    let expected = enumerate_cascade(&entries, &spec.bigrams, 4);
    let label = |s: &[String], t: &SymbolTable| -> Vec<Label> {
        s.iter().map(|x| t.label(x).unwrap()).collect()
    };
    let mut swept = 0;
    for (phone_string, parses) in &expected {
        let mut parses = parses.clone();
        parses.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (best_w, best_words) = &parses[0];
        if let Some((second, _)) = parses.get(1) {
            check(second - best_w > DELTA, || {
                format!("tie on {phone_string:?}")
            })?;
        }
        let x = label(phone_string, &phones);
        let y = label(best_words, &words);
        for (name, fst) in [("raw", &graph.composed), ("optimized", &graph.optimized)] {
            let (got_y, got_w) =
                decode(fst, &x).map_err(|e| format!("{name} {phone_string:?}: {e}"))?;
            check(got_y == y, || {
                format!("{name} {phone_string:?}: words {got_y:?}, expected {y:?}")
            })?;
            check((got_w.value() - best_w).abs() <= DELTA, || {
                format!("{name} {phone_string:?}: weight {got_w}, expected {best_w}")
            })?;
        }
        if let Some(p) = &graph.projection {
            let (_, w) = decode(p, &x).map_err(|e| format!("projection {phone_string:?}: {e}"))?;
            check((w.value() - best_w).abs() <= DELTA, || {
                format!("projection {phone_string:?}: weight {w}, expected {best_w}")
            })?;
        }
        swept += 1;
    }
    for bad in ["d ey t", "t ax t ax", "ax", "d uw"] {
        let x = wfst::cascade::labels_of(bad, &phones).map_err(|e| e.to_string())?;
        for fst in [&graph.composed, &graph.optimized] {
            check(decode(fst, &x) == Err(Error::NoPath), || {
                format!("{bad:?} decoded")
            })?;
        }
        swept += 1;
    }
    Ok(format!(
        "{swept} phone strings; compose {} -> determinize {det} -> minimize {min} states",
        count("compose").unwrap()
    ))
}

fn round_trip() -> Outcome {
    for i in 0..200u64 {
        let spec = RandomSpec {
            seed: SEED + i,
            max_states: 8,
            alphabet_size: 4,
            arc_density: 0.7,
            weight_range: (0, 20),
            acyclic: i % 2 == 0,
            deterministic: false,
            acceptor: false,
            epsilon_rate: 0.2,
        };
        let mut f: Fst<TropicalWeight> = generate(&spec).map_err(|e| e.to_string())?;
        // Fractional weights exercise the shortest round-trip formatting.
        if i % 3 == 0 {
            for q in f.states() {
                for t in f.transitions_mut(q) {
                    t.weight = TropicalWeight::new(t.weight.value() / 7.0);
                }
            }
        }
        let text = write_fst(&f, None, None).map_err(|e| e.to_string())?;
        check(text == write_fst(&f, None, None).unwrap(), || {
            format!("seed {}: unstable", SEED + i)
        })?;
        let back: Fst<TropicalWeight> = read_fst(&text, None, None).map_err(|e| e.to_string())?;
        check(back == f, || {
            format!("seed {}: parsed structure differs", SEED + i)
        })?;
        check(write_fst(&back, None, None).unwrap() == text, || {
            format!("seed {}: text differs after a round trip", SEED + i)
        })?;
    }
    Ok("200 transducers".into())
}
