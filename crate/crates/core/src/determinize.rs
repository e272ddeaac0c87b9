//! Weighted subset construction for acceptors over the tropical and log
//! semirings, plus a bounded search for twins-property violations.
//!
//! A subset state is a set of `(state, residual)` pairs, normalised so that
//! the residuals ⊕-sum to one. Termination is not guaranteed for automata
//! without the twins property, so the construction stops with
//! [`Error::NonDeterminable`] once `max_states` subsets exist.

use std::collections::{BTreeMap, HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::fst::{Fst, Label, StateId, Transition};
use crate::semiring::{Ring, Semiring, TropicalWeight, DEFAULT_DELTA};

pub const DEFAULT_MAX_STATES: usize = 10_000;

/// `(state, residual)` pairs sorted by state.
pub type SubsetState<W> = Vec<(StateId, W)>;

#[derive(Clone, Debug)]
pub struct Determinization<W> {
    pub fst: Fst<W>,
    /// `subsets[s]` is the subset state behind output state `s`.
    pub subsets: Vec<SubsetState<W>>,
}

pub fn determinize<W: Semiring>(fst: &Fst<W>, max_states: usize) -> Result<Fst<W>> {
    determinize_with_subsets(fst, max_states, DEFAULT_DELTA).map(|d| d.fst)
}

/// Determinizes `fst`, returning the subset behind each output state.
/// Residuals are compared on a grid of step `quant` when looking up subsets.
pub fn determinize_with_subsets<W: Semiring>(
    fst: &Fst<W>,
    max_states: usize,
    quant: f64,
) -> Result<Determinization<W>> {
    if !matches!(W::RING, Ring::Tropical | Ring::Log) {
        return Err(Error::UnsupportedRing {
            ring: W::RING,
            reason: "determinization is implemented for the tropical and log semirings",
        });
    }
    if !fst.is_acceptor() {
        return Err(Error::NotAcceptor);
    }
    if fst.has_epsilon_inputs() {
        return Err(Error::EpsilonInput);
    }

    let mut builder = SubsetBuilder {
        fst,
        quant,
        max_states,
        ids: HashMap::new(),
        subsets: Vec::new(),
        queue: VecDeque::new(),
        out: Fst::new(),
    };
    if fst.num_initials() == 0 {
        return Ok(Determinization {
            fst: builder.out,
            subsets: builder.subsets,
        });
    }

    let total = fst.initials().fold(W::zero(), |acc, (_, w)| acc.plus(&w));
    let mut initial = Vec::new();
    for (q, w) in fst.initials() {
        initial.push((q, total.left_divide(&w)?));
    }
    let start = builder.intern(initial)?;
    builder.out.set_initial(start, total)?;

    while let Some(id) = builder.queue.pop_front() {
        builder.expand(id)?;
    }
    Ok(Determinization {
        fst: builder.out,
        subsets: builder.subsets,
    })
}

struct SubsetBuilder<'a, W> {
    fst: &'a Fst<W>,
    quant: f64,
    max_states: usize,
    ids: HashMap<Vec<(StateId, i64)>, StateId>,
    subsets: Vec<SubsetState<W>>,
    queue: VecDeque<StateId>,
    out: Fst<W>,
}

impl<W: Semiring> SubsetBuilder<'_, W> {
    fn intern(&mut self, subset: SubsetState<W>) -> Result<StateId> {
        let key: Vec<(StateId, i64)> = subset
            .iter()
            .map(|&(q, w)| (q, w.quantize(self.quant)))
            .collect();
        if let Some(&id) = self.ids.get(&key) {
            return Ok(id);
        }
        if self.subsets.len() >= self.max_states {
            return Err(Error::NonDeterminable {
                subsets: self.subsets.len() + 1,
                limit: self.max_states,
            });
        }
        let id = self.out.add_state();
        let rho = subset.iter().fold(W::zero(), |acc, &(q, v)| {
            acc.plus(&v.times(&self.fst.final_weight(q)))
        });
        if !rho.is_zero() {
            self.out.set_final(id, rho)?;
        }
        self.ids.insert(key, id);
        self.subsets.push(subset);
        self.queue.push_back(id);
        Ok(id)
    }

    fn expand(&mut self, id: StateId) -> Result<()> {
        // label -> destination state -> ⊕ v ⊗ w
        let mut by_label: BTreeMap<Label, BTreeMap<StateId, W>> = BTreeMap::new();
        for &(p, v) in &self.subsets[id] {
            for t in self.fst.transitions(p) {
                let w = v.times(&t.weight);
                by_label
                    .entry(t.ilabel)
                    .or_default()
                    .entry(t.nextstate)
                    .and_modify(|acc| *acc = acc.plus(&w))
                    .or_insert(w);
            }
        }
        for (label, dests) in by_label {
            let arc_weight = dests.values().fold(W::zero(), |acc, w| acc.plus(w));
            if arc_weight.is_zero() {
                continue;
            }
            let mut next = Vec::with_capacity(dests.len());
            for (q, w) in dests {
                next.push((q, arc_weight.left_divide(&w)?));
            }
            let target = self.intern(next)?;
            self.out
                .add_transition(id, Transition::new(label, label, arc_weight, target))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TwinsWitness {
    /// The sibling pair.
    pub states: (StateId, StateId),
    /// A common input string reaching both states from initial states.
    pub access: Vec<Label>,
    /// A common cycle label string at both states.
    pub cycle: Vec<Label>,
    /// Weights of the two cycles.
    pub weights: (TropicalWeight, TropicalWeight),
}

#[derive(Clone, Debug, PartialEq)]
pub enum TwinsOutcome {
    /// Every sibling pair and every relevant cycle was examined.
    HasTwins,
    ViolationWitness(TwinsWitness),
    /// No violation found, but the bound cut the search short.
    Inconclusive,
}

type ProductEdge = (Label, TropicalWeight, TropicalWeight, usize);

/// Searches pairs of states reachable by a common input string of length at
/// most `max_len` for common cycle strings of length at most `max_len` whose
/// weights differ.
///
/// The answer is [`TwinsOutcome::HasTwins`] only when the bounded search is
/// provably exhaustive: pair discovery converged within `max_len` steps and
/// `max_len` covers every simple cycle of the pair graph.
pub fn twins_check_bounded(fst: &Fst<TropicalWeight>, max_len: usize) -> Result<TwinsOutcome> {
    if fst.has_epsilon_inputs() {
        return Err(Error::EpsilonInput);
    }
    if !fst.is_trim() {
        return Err(Error::Invalid("twins check needs a trim automaton".into()));
    }
    if fst.is_deterministic() {
        // Every pair is (q, q) reached along one path.
        return Ok(TwinsOutcome::HasTwins);
    }

    // Pair discovery, breadth first.
    let mut index: HashMap<(StateId, StateId), usize> = HashMap::new();
    let mut pairs: Vec<(StateId, StateId)> = Vec::new();
    let mut access: Vec<Vec<Label>> = Vec::new();
    let mut edges: Vec<Vec<ProductEdge>> = Vec::new();
    let mut queue = VecDeque::new();
    let initials: Vec<StateId> = fst.initials().map(|(q, _)| q).collect();
    for &p in &initials {
        for &q in &initials {
            index.insert((p, q), pairs.len());
            queue.push_back(pairs.len());
            pairs.push((p, q));
            access.push(Vec::new());
            edges.push(Vec::new());
        }
    }
    let mut truncated = false;
    while let Some(k) = queue.pop_front() {
        let (p, q) = pairs[k];
        let depth = access[k].len();
        for t1 in fst.transitions(p) {
            for t2 in fst.transitions(q).iter().filter(|t| t.ilabel == t1.ilabel) {
                let key = (t1.nextstate, t2.nextstate);
                let target = match index.get(&key) {
                    Some(&j) => j,
                    None if depth < max_len => {
                        let j = pairs.len();
                        index.insert(key, j);
                        pairs.push(key);
                        let mut s = access[k].clone();
                        s.push(t1.ilabel);
                        access.push(s);
                        edges.push(Vec::new());
                        queue.push_back(j);
                        j
                    }
                    None => {
                        truncated = true;
                        continue;
                    }
                };
                edges[k].push((t1.ilabel, t1.weight, t2.weight, target));
            }
        }
    }

    let component = strongly_connected_components(&edges);
    let mut sizes: HashMap<usize, usize> = HashMap::new();
    for &c in &component {
        *sizes.entry(c).or_default() += 1;
    }
    let cyclic = |k: usize| sizes[&component[k]] > 1 || edges[k].iter().any(|&(.., j)| j == k);
    let longest_simple_cycle = (0..pairs.len())
        .filter(|&k| cyclic(k))
        .map(|k| sizes[&component[k]])
        .max()
        .unwrap_or(0);
    if longest_simple_cycle > max_len {
        truncated = true;
    }

    for k in 0..pairs.len() {
        if !cyclic(k) {
            continue;
        }
        if let Some((cycle, w1, w2)) = find_unequal_cycle(&edges, &component, k, max_len) {
            return Ok(TwinsOutcome::ViolationWitness(TwinsWitness {
                states: pairs[k],
                access: access[k].clone(),
                cycle,
                weights: (w1, w2),
            }));
        }
    }
    Ok(if truncated {
        TwinsOutcome::Inconclusive
    } else {
        TwinsOutcome::HasTwins
    })
}

/// Breadth-first search over path pairs from `start` back to itself, staying
/// inside its strongly connected component.
fn find_unequal_cycle(
    edges: &[Vec<ProductEdge>],
    component: &[usize],
    start: usize,
    max_len: usize,
) -> Option<(Vec<Label>, TropicalWeight, TropicalWeight)> {
    let one = TropicalWeight::one();
    let mut frontier: Vec<(usize, TropicalWeight, TropicalWeight, Vec<Label>)> =
        vec![(start, one, one, Vec::new())];
    for _ in 0..max_len {
        let mut next = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for (node, w1, w2, labels) in frontier {
            for &(label, a, b, target) in &edges[node] {
                if component[target] != component[start] {
                    continue;
                }
                let (n1, n2) = (w1.times(&a), w2.times(&b));
                let mut s = labels.clone();
                s.push(label);
                if target == start && !n1.approx_eq(&n2, DEFAULT_DELTA) {
                    return Some((s, n1, n2));
                }
                let key = (
                    target,
                    n1.quantize(DEFAULT_DELTA),
                    n2.quantize(DEFAULT_DELTA),
                );
                if seen.insert(key) {
                    next.push((target, n1, n2, s));
                }
            }
        }
        frontier = next;
    }
    None
}

/// Tarjan's algorithm; returns a component id per node.
fn strongly_connected_components(edges: &[Vec<ProductEdge>]) -> Vec<usize> {
    struct Tarjan<'a> {
        edges: &'a [Vec<ProductEdge>],
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        next: usize,
        component: Vec<usize>,
        count: usize,
    }

    impl Tarjan<'_> {
        fn visit(&mut self, v: usize) {
            self.index[v] = Some(self.next);
            self.low[v] = self.next;
            self.next += 1;
            self.stack.push(v);
            self.on_stack[v] = true;
            for &(.., w) in &self.edges[v] {
                match self.index[w] {
                    None => {
                        self.visit(w);
                        self.low[v] = self.low[v].min(self.low[w]);
                    }
                    Some(iw) if self.on_stack[w] => self.low[v] = self.low[v].min(iw),
                    Some(_) => {}
                }
            }
            if Some(self.low[v]) == self.index[v] {
                while let Some(w) = self.stack.pop() {
                    self.on_stack[w] = false;
                    self.component[w] = self.count;
                    if w == v {
                        break;
                    }
                }
                self.count += 1;
            }
        }
    }

    let n = edges.len();
    let mut t = Tarjan {
        edges,
        index: vec![None; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        next: 0,
        component: vec![0; n],
        count: 0,
    };
    for v in 0..n {
        if t.index[v].is_none() {
            t.visit(v);
        }
    }
    t.component
}
