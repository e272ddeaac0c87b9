//! Seeded random instances and the property suite that binds every algorithm
//! to the brute-force oracle.
//!
//! Instance `i` of a run with base seed `s` is generated from seed `s + i`, so
//! a failing seed reported by [`check_suite`] replays with [`check_property`].

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::compose::compose_with_stats;
use crate::determinize::{determinize_with_subsets, DEFAULT_MAX_STATES};
use crate::error::{Error, Result};
use crate::fst::{Fst, Label, StateId, Transition, EPSILON};
use crate::minimize::{equivalence_pushed, minimize};
use crate::oracle::{equivalent, relation, relations_agree, Relation};
use crate::reweight::push_weights;
use crate::semiring::{Semiring, TropicalWeight, DEFAULT_DELTA};

/// Length bound used for every oracle sweep in the suite.
pub const SWEEP_LEN: usize = 6;
/// Suffix depth of the brute-force state-equivalence oracle.
pub const SUFFIX_DEPTH: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct RandomSpec {
    pub seed: u64,
    /// Upper bound on the state count; the actual count is drawn from the
    /// upper half of `1..=max_states`.
    pub max_states: usize,
    /// Labels are drawn from `1..=alphabet_size`.
    pub alphabet_size: u32,
    /// Expected number of transitions per (state, label) slot. At most 1 when
    /// `deterministic` is set.
    pub arc_density: f64,
    /// Inclusive range of integer weights.
    pub weight_range: (i64, i64),
    pub acyclic: bool,
    pub deterministic: bool,
    /// When false, output labels are drawn independently of input labels.
    pub acceptor: bool,
    /// Probability that a label side is ε.
    pub epsilon_rate: f64,
}

impl RandomSpec {
    /// Acyclic acceptor, up to 6 states, alphabet 3, weights 0..=5.
    pub fn acyclic_acceptor(seed: u64) -> Self {
        RandomSpec {
            seed,
            max_states: 6,
            alphabet_size: 3,
            arc_density: 0.7,
            weight_range: (0, 5),
            acyclic: true,
            deterministic: false,
            acceptor: true,
            epsilon_rate: 0.0,
        }
    }

    /// Cyclic deterministic acceptor, up to 8 states, alphabet 3, weights 0..=5.
    pub fn deterministic_acceptor(seed: u64) -> Self {
        RandomSpec {
            seed,
            max_states: 8,
            alphabet_size: 3,
            arc_density: 0.6,
            weight_range: (0, 5),
            acyclic: false,
            deterministic: true,
            acceptor: true,
            epsilon_rate: 0.0,
        }
    }

    /// Acyclic transducer, up to 6 states, alphabet 3, weights 0..=5.
    pub fn acyclic_transducer(seed: u64) -> Self {
        RandomSpec {
            acceptor: false,
            arc_density: 1.0,
            ..Self::acyclic_acceptor(seed)
        }
    }
}

/// Draws a trim, non-empty automaton with a single initial state `0`.
pub fn generate<W: Semiring>(spec: &RandomSpec) -> Result<Fst<W>> {
    if spec.max_states == 0 || spec.alphabet_size == 0 {
        return Err(Error::Invalid(
            "max_states and alphabet_size must be positive".into(),
        ));
    }
    if spec.weight_range.0 > spec.weight_range.1 {
        return Err(Error::Invalid("empty weight range".into()));
    }
    if !(0.0..=1.0).contains(&spec.epsilon_rate) || spec.arc_density < 0.0 {
        return Err(Error::Invalid(
            "rates must be non-negative probabilities".into(),
        ));
    }
    if spec.deterministic && (spec.arc_density > 1.0 || spec.epsilon_rate > 0.0) {
        return Err(Error::Invalid(
            "a deterministic automaton allows at most one ε-free arc per label".into(),
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = rng.gen_range(spec.max_states.div_ceil(2)..=spec.max_states);
    let mut fst = Fst::new();
    fst.add_states(n);
    fst.set_start(0)?;

    let weight = |rng: &mut ChaCha8Rng| -> Result<W> {
        let v = rng.gen_range(spec.weight_range.0..=spec.weight_range.1) as f64;
        let w = W::from_value(v)?;
        Ok(if w.is_zero() { W::one() } else { w })
    };
    let mut used: Vec<Vec<Label>> = vec![Vec::new(); n];
    let draw_labels = |rng: &mut ChaCha8Rng, ilabel: Label| -> (Label, Label) {
        let mut i = ilabel;
        if rng.gen_bool(spec.epsilon_rate) {
            i = EPSILON;
        }
        if spec.acceptor {
            return (i, i);
        }
        let o = if rng.gen_bool(spec.epsilon_rate) {
            EPSILON
        } else {
            rng.gen_range(1..=spec.alphabet_size)
        };
        (i, o)
    };

    // Spanning arcs: every state q > 0 gets an incoming arc from some p < q.
    for q in 1..n {
        let candidates: Vec<(StateId, Vec<Label>)> = (0..q)
            .map(|p| {
                let free: Vec<Label> = (1..=spec.alphabet_size)
                    .filter(|l| !spec.deterministic || !used[p].contains(l))
                    .collect();
                (p, free)
            })
            .filter(|(_, free)| !free.is_empty())
            .collect();
        // q - 1 has no outgoing arcs yet, so candidates is never empty.
        let (p, free) = &candidates[rng.gen_range(0..candidates.len())];
        let label = free[rng.gen_range(0..free.len())];
        let (i, o) = draw_labels(&mut rng, label);
        used[*p].push(label);
        let w = weight(&mut rng)?;
        fst.add_transition(*p, Transition::new(i, o, w, q))?;
    }

    // Extra arcs.
    for (p, used_p) in used.iter_mut().enumerate() {
        for label in 1..=spec.alphabet_size {
            if spec.deterministic {
                if used_p.contains(&label) || !rng.gen_bool(spec.arc_density) {
                    continue;
                }
                let target = draw_target(&mut rng, p, n, spec.acyclic);
                let Some(q) = target else { continue };
                used_p.push(label);
                let w = weight(&mut rng)?;
                fst.add_transition(p, Transition::new(label, label, w, q))?;
            } else {
                let mut budget = spec.arc_density;
                while budget > 0.0 {
                    let p_take = budget.min(1.0);
                    budget -= 1.0;
                    if !rng.gen_bool(p_take) {
                        continue;
                    }
                    let Some(q) = draw_target(&mut rng, p, n, spec.acyclic) else {
                        continue;
                    };
                    let (i, o) = draw_labels(&mut rng, label);
                    let w = weight(&mut rng)?;
                    fst.add_transition(p, Transition::new(i, o, w, q))?;
                }
            }
        }
    }

    // Finals: the last state, states without exits, and a few random ones.
    for q in 0..n {
        if q == n - 1 || fst.transitions(q).is_empty() || rng.gen_bool(0.3) {
            let w = weight(&mut rng)?;
            fst.set_final(q, w)?;
        }
    }
    // Cycles can still trap states; make them final.
    let coacc = fst.coaccessible();
    for q in (0..n).filter(|&q| !coacc[q]) {
        let w = weight(&mut rng)?;
        fst.set_final(q, w)?;
    }
    debug_assert!(fst.is_trim());
    Ok(fst)
}

fn draw_target(rng: &mut ChaCha8Rng, p: StateId, n: usize, acyclic: bool) -> Option<StateId> {
    if acyclic {
        (p + 1 < n).then(|| rng.gen_range(p + 1..n))
    } else {
        Some(rng.gen_range(0..n))
    }
}

/// Adds up to `extra` copies of random states of a deterministic automaton
/// and redirects some incoming transitions to them. A copy repeats its
/// original's transitions and final weight, shifted by a constant, so it is
/// equivalent to the original once weights are pushed.
pub fn with_redundant_copies(
    fst: &Fst<TropicalWeight>,
    extra: usize,
    seed: u64,
) -> Fst<TropicalWeight> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = fst.clone();
    for _ in 0..extra {
        let incoming: Vec<(StateId, usize)> = out
            .states()
            .flat_map(|p| (0..out.transitions(p).len()).map(move |k| (p, k)))
            .collect();
        if incoming.is_empty() {
            break;
        }
        let (p, k) = incoming[rng.gen_range(0..incoming.len())];
        let original = out.transitions(p)[k].nextstate;
        let shift = rng.gen_range(0..=2) as f64;
        let copy = out.add_state();
        let shifted = |w: TropicalWeight| TropicalWeight::new(w.value() + shift);
        for t in out.transitions(original).to_vec() {
            let next = if t.nextstate == original {
                copy
            } else {
                t.nextstate
            };
            let t = Transition {
                weight: shifted(t.weight),
                nextstate: next,
                ..t
            };
            out.add_transition(copy, t).expect("state exists");
        }
        if out.is_final(original) {
            let w = shifted(out.final_weight(original));
            out.set_final(copy, w).expect("state exists");
        }
        out.transitions_mut(p)[k].nextstate = copy;
    }
    out
}

/// Deterministic acceptor with up to `max_states` states, some of them
/// redundant.
pub fn redundant_deterministic(seed: u64, max_states: usize) -> Result<Fst<TropicalWeight>> {
    let spec = RandomSpec {
        max_states: max_states.div_ceil(2).max(1),
        ..RandomSpec::deterministic_acceptor(seed)
    };
    let base: Fst<TropicalWeight> = generate(&spec)?;
    let extra = max_states - base.num_states();
    Ok(with_redundant_copies(&base, extra, seed ^ 0x5eed))
}

/// ⊕ over intermediate strings `z` of `left(x, z) ⊗ right(z, y)`, for every
/// `(x, y)` with both sides at most `max_len` long.
pub fn join_relation<W: Semiring>(
    left: &Relation<W>,
    right: &Relation<W>,
    max_len: usize,
) -> Relation<W> {
    let mut by_input: HashMap<&[Label], Vec<(&[Label], W)>> = HashMap::new();
    for ((z, y), w) in right {
        by_input
            .entry(z.as_slice())
            .or_default()
            .push((y.as_slice(), *w));
    }
    let mut out = Relation::new();
    for ((x, z), w1) in left {
        if x.len() > max_len {
            continue;
        }
        let Some(continuations) = by_input.get(z.as_slice()) else {
            continue;
        };
        for &(y, w2) in continuations {
            if y.len() > max_len {
                continue;
            }
            let w = w1.times(&w2);
            out.entry((x.clone(), y.to_vec()))
                .and_modify(|e: &mut W| *e = e.plus(&w))
                .or_insert(w);
        }
    }
    out.retain(|_, w| !w.is_zero());
    out
}

/// Truncates a relation to pairs with both sides at most `max_len` long.
pub fn restrict<W: Semiring>(rel: &Relation<W>, max_len: usize) -> Relation<W> {
    rel.iter()
        .filter(|((x, y), _)| x.len() <= max_len && y.len() <= max_len)
        .map(|(k, w)| (k.clone(), *w))
        .collect()
}

/// Brute-force weighted Myhill–Nerode classes of a deterministic tropical
/// acceptor: two states are merged when their suffix functions up to
/// `depth` have the same support and differ by a constant. Only accessible
/// and co-accessible states are counted.
pub fn brute_force_classes(fst: &Fst<TropicalWeight>, depth: usize) -> usize {
    let (acc, coacc) = (fst.accessible(), fst.coaccessible());
    let suffixes: Vec<BTreeMap<Vec<Label>, f64>> = fst
        .states()
        .map(|q| suffix_function(fst, q, depth))
        .collect();
    let equivalent = |p: usize, q: usize| {
        let (fp, fq) = (&suffixes[p], &suffixes[q]);
        if fp.len() != fq.len() || !fp.keys().eq(fq.keys()) {
            return false;
        }
        let mut offset = None;
        fp.iter().zip(fq.values()).all(|((_, a), b)| {
            let d = a - b;
            *offset.get_or_insert(d) == d
        })
    };
    let mut reps: Vec<StateId> = Vec::new();
    for q in fst.states().filter(|&q| acc[q] && coacc[q]) {
        if !reps.iter().any(|&r| equivalent(r, q)) {
            reps.push(q);
        }
    }
    reps.len()
}

fn suffix_function(
    fst: &Fst<TropicalWeight>,
    state: StateId,
    depth: usize,
) -> BTreeMap<Vec<Label>, f64> {
    let mut out = BTreeMap::new();
    let mut stack = vec![(state, Vec::new(), 0.0)];
    while let Some((q, labels, acc)) = stack.pop() {
        if fst.is_final(q) {
            let w = acc + fst.final_weight(q).value();
            out.entry(labels.clone())
                .and_modify(|e: &mut f64| *e = e.min(w))
                .or_insert(w);
        }
        if labels.len() == depth {
            continue;
        }
        for t in fst.transitions(q) {
            let mut next = labels.clone();
            next.push(t.ilabel);
            stack.push((t.nextstate, next, acc + t.weight.value()));
        }
    }
    out
}

/// Changes one transition weight so the automaton's relation changes on a
/// string no longer than `max_len`. Returns false if no such transition exists.
pub fn mutate_weight(fst: &mut Fst<TropicalWeight>, max_len: usize) -> bool {
    let n = fst.num_states();
    // Distances in arcs from the start and to a final state.
    let mut from_start = vec![usize::MAX; n];
    for (q, _) in fst.initials() {
        from_start[q] = 0;
    }
    let mut to_final: Vec<usize> = fst
        .states()
        .map(|q| if fst.is_final(q) { 0 } else { usize::MAX })
        .collect();
    for _ in 0..n {
        for p in fst.states() {
            for t in fst.transitions(p) {
                if from_start[p] != usize::MAX {
                    from_start[t.nextstate] = from_start[t.nextstate].min(from_start[p] + 1);
                }
                if to_final[t.nextstate] != usize::MAX {
                    to_final[p] = to_final[p].min(to_final[t.nextstate] + 1);
                }
            }
        }
    }
    for p in fst.states() {
        for k in 0..fst.transitions(p).len() {
            let next = fst.transitions(p)[k].nextstate;
            if from_start[p] != usize::MAX
                && to_final[next] != usize::MAX
                && from_start[p] + 1 + to_final[next] <= max_len
            {
                let t = &mut fst.transitions_mut(p)[k];
                t.weight = TropicalWeight::new(t.weight.value() + 1.0);
                return true;
            }
        }
    }
    false
}

/// Properties exercised by [`check_suite`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Property {
    ComposeJoin,
    ComposeEpsilonJoin,
    DeterminizeEquivalence,
    PushEquivalence,
    MinimizeMinimality,
    PushedEquivalenceAgreement,
}

impl Property {
    pub const ALL: [Property; 6] = [
        Property::ComposeJoin,
        Property::ComposeEpsilonJoin,
        Property::DeterminizeEquivalence,
        Property::PushEquivalence,
        Property::MinimizeMinimality,
        Property::PushedEquivalenceAgreement,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::ComposeJoin => "compose/join-identity",
            Property::ComposeEpsilonJoin => "compose/epsilon-join-identity",
            Property::DeterminizeEquivalence => "determinize/equivalence",
            Property::PushEquivalence => "push/equivalence-normalization",
            Property::MinimizeMinimality => "minimize/minimality",
            Property::PushedEquivalenceAgreement => "equal/agrees-with-oracle",
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Fault injection for testing the suite itself.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Mutation {
    #[default]
    None,
    /// Bump one transition weight of each algorithm output before checking.
    FlipArcWeight,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PropertyResult {
    pub property: Property,
    pub passed: usize,
    /// Instance seeds that failed, ascending, with a short reason.
    pub failures: Vec<(u64, String)>,
}

impl PropertyResult {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub instances: usize,
    pub seed: u64,
    pub results: Vec<PropertyResult>,
}

impl Report {
    pub fn ok(&self) -> bool {
        self.results.iter().all(PropertyResult::ok)
    }

    pub fn result(&self, property: Property) -> Option<&PropertyResult> {
        self.results.iter().find(|r| r.property == property)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "property suite: {} instances, base seed {}",
            self.instances, self.seed
        )?;
        for r in &self.results {
            let status = if r.ok() { "PASS" } else { "FAIL" };
            writeln!(
                f,
                "{status}\t{}\t{}/{}",
                r.property,
                r.passed,
                r.passed + r.failures.len()
            )?;
            for (seed, reason) in &r.failures {
                writeln!(f, "\tseed {seed}: {reason}")?;
            }
        }
        Ok(())
    }
}

pub fn check_suite(n: usize, seed: u64) -> Report {
    check_suite_with(n, seed, Mutation::None)
}

pub fn check_suite_with(n: usize, seed: u64, mutation: Mutation) -> Report {
    let results = Property::ALL
        .iter()
        .map(|&property| {
            let mut passed = 0;
            let mut failures = Vec::new();
            for i in 0..n as u64 {
                let instance = seed.wrapping_add(i);
                match check_property(property, instance, mutation) {
                    Ok(()) => passed += 1,
                    Err(reason) => failures.push((instance, reason)),
                }
            }
            PropertyResult {
                property,
                passed,
                failures,
            }
        })
        .collect();
    Report {
        instances: n,
        seed,
        results,
    }
}

fn fail<T>(msg: impl Into<String>) -> std::result::Result<T, String> {
    Err(msg.into())
}

fn mutated(mut fst: Fst<TropicalWeight>, mutation: Mutation) -> Fst<TropicalWeight> {
    if mutation == Mutation::FlipArcWeight {
        mutate_weight(&mut fst, SWEEP_LEN);
    }
    fst
}

/// Runs one property on the instance drawn from `seed`.
pub fn check_property(
    property: Property,
    seed: u64,
    mutation: Mutation,
) -> std::result::Result<(), String> {
    let err = |e: Error| e.to_string();
    match property {
        Property::ComposeJoin | Property::ComposeEpsilonJoin => {
            let epsilon = property == Property::ComposeEpsilonJoin;
            let spec = |s: u64| RandomSpec {
                epsilon_rate: if epsilon { 0.25 } else { 0.0 },
                ..RandomSpec::acyclic_transducer(s)
            };
            let a: Fst<TropicalWeight> = generate(&spec(seed.wrapping_mul(2))).map_err(err)?;
            let b: Fst<TropicalWeight> =
                generate(&spec(seed.wrapping_mul(2).wrapping_add(1))).map_err(err)?;
            let (c, stats) = compose_with_stats(&a, &b).map_err(err)?;
            let c = mutated(c, mutation);
            if stats.expansions != stats.pair_states {
                return fail("a pair state was expanded more than once");
            }
            if stats.pair_states > a.num_states() * b.num_states() * 3 {
                return fail("too many pair states");
            }
            // Acyclic operands: relations are finite and enumerated in full.
            let ra = relation(&a, usize::MAX, usize::MAX).map_err(err)?;
            let rb = relation(&b, usize::MAX, usize::MAX).map_err(err)?;
            let expected = join_relation(&ra, &rb, SWEEP_LEN);
            let got = restrict(&relation(&c, SWEEP_LEN, SWEEP_LEN).map_err(err)?, SWEEP_LEN);
            if !relations_agree(&expected, &got, 0.0) {
                return fail("composed weights differ from the join oracle");
            }
        }
        Property::DeterminizeEquivalence => {
            let a: Fst<TropicalWeight> =
                generate(&RandomSpec::acyclic_acceptor(seed)).map_err(err)?;
            let det =
                determinize_with_subsets(&a, DEFAULT_MAX_STATES, DEFAULT_DELTA).map_err(err)?;
            let d = mutated(det.fst, mutation);
            if !d.is_deterministic() {
                return fail("output is not deterministic");
            }
            for subset in &det.subsets {
                let min = subset
                    .iter()
                    .map(|(_, w)| w.value())
                    .fold(f64::INFINITY, f64::min);
                if min != 0.0 {
                    return fail(format!("subset residuals not normalized: min {min}"));
                }
            }
            if !equivalent_exact(&a, &d)? {
                return fail("determinized automaton is not equivalent");
            }
        }
        Property::PushEquivalence => {
            let a: Fst<TropicalWeight> =
                generate(&RandomSpec::acyclic_acceptor(seed)).map_err(err)?;
            let p = mutated(push_weights(&a).map_err(err)?, mutation);
            if !equivalent_exact(&a, &p)? {
                return fail("pushed automaton is not equivalent");
            }
            if let Some(q) = unnormalized_state(&p) {
                return fail(format!("state {q} is not normalized after pushing"));
            }
            let pp = push_weights(&p).map_err(err)?;
            if !same_arc_weights(&p, &pp, DEFAULT_DELTA) {
                return fail("pushing is not idempotent");
            }
        }
        Property::MinimizeMinimality => {
            let a = redundant_deterministic(seed, 8).map_err(err)?;
            let m = mutated(minimize(&a).map_err(err)?, mutation);
            if !m.is_deterministic() {
                return fail("minimized automaton is not deterministic");
            }
            let classes = brute_force_classes(&a, SUFFIX_DEPTH);
            if m.num_states() != classes {
                return fail(format!(
                    "{} states, brute force finds {classes} classes",
                    m.num_states()
                ));
            }
            if brute_force_classes(&m, SUFFIX_DEPTH) != m.num_states() {
                return fail("minimized automaton has equivalent states");
            }
            if m.num_transitions() > a.num_transitions() {
                return fail("minimization added transitions");
            }
            if !equivalent_exact(&a, &m)? {
                return fail("minimized automaton is not equivalent");
            }
            let mm = minimize(&m).map_err(err)?;
            if mm.num_states() != m.num_states() {
                return fail("minimization is not idempotent");
            }
        }
        Property::PushedEquivalenceAgreement => {
            let a = redundant_deterministic(seed, 8).map_err(err)?;
            let mut mutant = a.clone();
            mutate_weight(&mut mutant, SWEEP_LEN);
            let others = [
                ("push", push_weights(&a).map_err(err)?),
                ("minimize", minimize(&a).map_err(err)?),
                ("mutant", mutant),
            ];
            for (name, b) in others {
                let b = mutated(b, mutation);
                let fast = equivalence_pushed(&a, &b, DEFAULT_DELTA).map_err(err)?;
                let slow = equivalent(&a, &b, SWEEP_LEN).map_err(err)?;
                if fast != slow {
                    return fail(format!(
                        "{name}: pushed test says {fast}, oracle says {slow}"
                    ));
                }
            }
        }
    }
    Ok(())
}

fn equivalent_exact(
    a: &Fst<TropicalWeight>,
    b: &Fst<TropicalWeight>,
) -> std::result::Result<bool, String> {
    let ra = relation(a, SWEEP_LEN, SWEEP_LEN).map_err(|e| e.to_string())?;
    let rb = relation(b, SWEEP_LEN, SWEEP_LEN).map_err(|e| e.to_string())?;
    Ok(relations_agree(&ra, &rb, 0.0))
}

/// First co-accessible state whose outgoing weights and final weight do not
/// have minimum exactly zero.
pub fn unnormalized_state(fst: &Fst<TropicalWeight>) -> Option<StateId> {
    let coacc = fst.coaccessible();
    fst.states().filter(|&q| coacc[q]).find(|&q| {
        let min = fst
            .transitions(q)
            .iter()
            .map(|t| t.weight.value())
            .fold(fst.final_weight(q).value(), f64::min);
        min != 0.0
    })
}

/// Structural equality with weights compared within `delta`.
pub fn same_arc_weights<W: Semiring>(a: &Fst<W>, b: &Fst<W>, delta: f64) -> bool {
    a.num_states() == b.num_states()
        && a.initials().count() == b.initials().count()
        && a.initials()
            .zip(b.initials())
            .all(|((p, v), (q, w))| p == q && v.approx_eq(&w, delta))
        && a.states().all(|q| {
            a.final_weight(q).approx_eq(&b.final_weight(q), delta)
                && a.transitions(q).len() == b.transitions(q).len()
                && a.transitions(q).iter().zip(b.transitions(q)).all(|(x, y)| {
                    x.ilabel == y.ilabel
                        && x.olabel == y.olabel
                        && x.nextstate == y.nextstate
                        && x.weight.approx_eq(&y.weight, delta)
                })
        })
}

/// Timing of a closure, for reports.
pub fn timed<T>(f: impl FnOnce() -> T) -> (T, std::time::Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}
