//! The transducer data model.
//!
//! An [`Fst`] keeps a dense vector of states, each with an ordered list of
//! outgoing transitions and a final weight (`zero` for non-final states), plus
//! a map of initial states to initial weights. Acceptors are transducers whose
//! transitions all have `ilabel == olabel`.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::semiring::Semiring;

pub type StateId = usize;
pub type Label = u32;

/// The empty label.
pub const EPSILON: Label = 0;

#[derive(Clone, Debug, PartialEq)]
pub struct Transition<W> {
    pub ilabel: Label,
    pub olabel: Label,
    pub weight: W,
    pub nextstate: StateId,
}

impl<W> Transition<W> {
    pub fn new(ilabel: Label, olabel: Label, weight: W, nextstate: StateId) -> Self {
        Transition {
            ilabel,
            olabel,
            weight,
            nextstate,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
struct StateData<W> {
    transitions: Vec<Transition<W>>,
    final_weight: W,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fst<W> {
    states: Vec<StateData<W>>,
    initials: BTreeMap<StateId, W>,
}

impl<W: Semiring> Default for Fst<W> {
    fn default() -> Self {
        Self::new()
    }
}

impl<W: Semiring> Fst<W> {
    pub fn new() -> Self {
        Fst {
            states: Vec::new(),
            initials: BTreeMap::new(),
        }
    }

    pub fn add_state(&mut self) -> StateId {
        self.states.push(StateData {
            transitions: Vec::new(),
            final_weight: W::zero(),
        });
        self.states.len() - 1
    }

    pub fn add_states(&mut self, n: usize) {
        for _ in 0..n {
            self.add_state();
        }
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.states.iter().map(|s| s.transitions.len()).sum()
    }

    pub fn states(&self) -> std::ops::Range<StateId> {
        0..self.states.len()
    }

    fn check_state(&self, state: StateId) -> Result<()> {
        if state < self.states.len() {
            Ok(())
        } else {
            Err(Error::UnknownState(state))
        }
    }

    pub fn add_transition(&mut self, src: StateId, transition: Transition<W>) -> Result<()> {
        self.check_state(src)?;
        self.check_state(transition.nextstate)?;
        self.states[src].transitions.push(transition);
        Ok(())
    }

    /// Shorthand for [`Fst::add_transition`].
    pub fn add_arc(
        &mut self,
        src: StateId,
        ilabel: Label,
        olabel: Label,
        weight: W,
        dst: StateId,
    ) -> Result<()> {
        self.add_transition(src, Transition::new(ilabel, olabel, weight, dst))
    }

    pub fn transitions(&self, state: StateId) -> &[Transition<W>] {
        &self.states[state].transitions
    }

    pub fn transitions_mut(&mut self, state: StateId) -> &mut [Transition<W>] {
        &mut self.states[state].transitions
    }

    /// Sets `λ(state)`; a `zero` weight removes the state from `I`.
    pub fn set_initial(&mut self, state: StateId, weight: W) -> Result<()> {
        self.check_state(state)?;
        if weight.is_zero() {
            self.initials.remove(&state);
        } else {
            self.initials.insert(state, weight);
        }
        Ok(())
    }

    /// Makes `state` the only initial state, with weight `one`.
    pub fn set_start(&mut self, state: StateId) -> Result<()> {
        self.check_state(state)?;
        self.initials.clear();
        self.initials.insert(state, W::one());
        Ok(())
    }

    pub fn initials(&self) -> impl Iterator<Item = (StateId, W)> + '_ {
        self.initials.iter().map(|(&q, &w)| (q, w))
    }

    pub fn num_initials(&self) -> usize {
        self.initials.len()
    }

    pub fn initial_weight(&self, state: StateId) -> W {
        self.initials.get(&state).copied().unwrap_or_else(W::zero)
    }

    /// The unique initial state, if there is exactly one.
    pub fn start(&self) -> Option<StateId> {
        if self.initials.len() == 1 {
            self.initials.keys().next().copied()
        } else {
            None
        }
    }

    /// Sets `ρ(state)`; a `zero` weight makes the state non-final.
    pub fn set_final(&mut self, state: StateId, weight: W) -> Result<()> {
        self.check_state(state)?;
        self.states[state].final_weight = weight;
        Ok(())
    }

    pub fn final_weight(&self, state: StateId) -> W {
        self.states[state].final_weight
    }

    pub fn is_final(&self, state: StateId) -> bool {
        !self.states[state].final_weight.is_zero()
    }

    pub fn num_finals(&self) -> usize {
        self.states().filter(|&q| self.is_final(q)).count()
    }

    pub fn is_acceptor(&self) -> bool {
        self.states
            .iter()
            .all(|s| s.transitions.iter().all(|t| t.ilabel == t.olabel))
    }

    /// Unique initial state, no ε input labels, and no two transitions leaving
    /// a state with the same input label.
    pub fn is_deterministic(&self) -> bool {
        if self.initials.len() != 1 {
            return false;
        }
        let mut seen = BTreeSet::new();
        for state in &self.states {
            seen.clear();
            for t in &state.transitions {
                if t.ilabel == EPSILON || !seen.insert(t.ilabel) {
                    return false;
                }
            }
        }
        true
    }

    pub fn has_epsilon_inputs(&self) -> bool {
        self.states
            .iter()
            .any(|s| s.transitions.iter().any(|t| t.ilabel == EPSILON))
    }

    pub fn has_epsilon_outputs(&self) -> bool {
        self.states
            .iter()
            .any(|s| s.transitions.iter().any(|t| t.olabel == EPSILON))
    }

    /// Sorted non-ε input labels.
    pub fn input_alphabet(&self) -> BTreeSet<Label> {
        self.states
            .iter()
            .flat_map(|s| s.transitions.iter().map(|t| t.ilabel))
            .filter(|&l| l != EPSILON)
            .collect()
    }

    /// Sorted non-ε output labels.
    pub fn output_alphabet(&self) -> BTreeSet<Label> {
        self.states
            .iter()
            .flat_map(|s| s.transitions.iter().map(|t| t.olabel))
            .filter(|&l| l != EPSILON)
            .collect()
    }

    /// States in a topological order, or `None` if a cycle exists.
    pub fn topological_order(&self) -> Option<Vec<StateId>> {
        let n = self.num_states();
        let mut indegree = vec![0usize; n];
        for state in &self.states {
            for t in &state.transitions {
                indegree[t.nextstate] += 1;
            }
        }
        let mut queue: VecDeque<StateId> = (0..n).filter(|&q| indegree[q] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(q) = queue.pop_front() {
            order.push(q);
            for t in &self.states[q].transitions {
                indegree[t.nextstate] -= 1;
                if indegree[t.nextstate] == 0 {
                    queue.push_back(t.nextstate);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }

    /// States reachable from an initial state.
    pub fn accessible(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_states()];
        let mut stack: Vec<StateId> = self.initials.keys().copied().collect();
        for &q in &stack {
            seen[q] = true;
        }
        while let Some(q) = stack.pop() {
            for t in &self.states[q].transitions {
                if !seen[t.nextstate] {
                    seen[t.nextstate] = true;
                    stack.push(t.nextstate);
                }
            }
        }
        seen
    }

    /// States from which a final state is reachable.
    pub fn coaccessible(&self) -> Vec<bool> {
        let n = self.num_states();
        let mut reverse = vec![Vec::new(); n];
        for (q, state) in self.states.iter().enumerate() {
            for t in &state.transitions {
                reverse[t.nextstate].push(q);
            }
        }
        let mut seen = vec![false; n];
        let mut stack: Vec<StateId> = (0..n).filter(|&q| self.is_final(q)).collect();
        for &q in &stack {
            seen[q] = true;
        }
        while let Some(q) = stack.pop() {
            for &p in &reverse[q] {
                if !seen[p] {
                    seen[p] = true;
                    stack.push(p);
                }
            }
        }
        seen
    }

    pub fn is_trim(&self) -> bool {
        let acc = self.accessible();
        let coacc = self.coaccessible();
        acc.iter().zip(&coacc).all(|(&a, &c)| a && c)
    }

    /// Keeps only states that are both accessible and co-accessible. Surviving
    /// states keep their relative order and are renumbered densely.
    pub fn connect(&self) -> Fst<W> {
        let acc = self.accessible();
        let coacc = self.coaccessible();
        let keep: Vec<bool> = acc.iter().zip(&coacc).map(|(&a, &c)| a && c).collect();
        self.retain_states(&keep)
    }

    fn retain_states(&self, keep: &[bool]) -> Fst<W> {
        let mut map = vec![None; self.num_states()];
        let mut out = Fst::new();
        for q in self.states() {
            if keep[q] {
                map[q] = Some(out.add_state());
            }
        }
        for q in self.states() {
            let Some(nq) = map[q] else { continue };
            out.states[nq].final_weight = self.states[q].final_weight;
            for t in &self.states[q].transitions {
                if let Some(nn) = map[t.nextstate] {
                    out.states[nq].transitions.push(Transition {
                        nextstate: nn,
                        ..t.clone()
                    });
                }
            }
        }
        for (&q, &w) in &self.initials {
            if let Some(nq) = map[q] {
                out.initials.insert(nq, w);
            }
        }
        out
    }

    /// Renumbers states in breadth-first discovery order from the initial
    /// states, dropping inaccessible ones.
    pub fn bfs_renumber(&self) -> Fst<W> {
        let mut order = vec![None; self.num_states()];
        let mut queue = VecDeque::new();
        let mut next = 0;
        for &q in self.initials.keys() {
            order[q] = Some(next);
            next += 1;
            queue.push_back(q);
        }
        while let Some(q) = queue.pop_front() {
            for t in &self.states[q].transitions {
                if order[t.nextstate].is_none() {
                    order[t.nextstate] = Some(next);
                    next += 1;
                    queue.push_back(t.nextstate);
                }
            }
        }
        let mut out = Fst::new();
        out.add_states(next);
        for q in self.states() {
            let Some(nq) = order[q] else { continue };
            out.states[nq].final_weight = self.states[q].final_weight;
            out.states[nq].transitions = self.states[q]
                .transitions
                .iter()
                .map(|t| Transition {
                    nextstate: order[t.nextstate].unwrap(),
                    ..t.clone()
                })
                .collect();
        }
        for (&q, &w) in &self.initials {
            out.initials.insert(order[q].unwrap(), w);
        }
        out
    }

    /// Equivalent automaton whose single initial state has weight one. The
    /// initial weight moves onto the start state's transitions and final
    /// weight; a fresh start state is added when the old one is re-entered.
    pub fn fold_initial_weight(&self) -> Result<Fst<W>> {
        let Some(start) = self.start() else {
            return match self.num_initials() {
                0 => Ok(self.clone()),
                n => Err(Error::MultipleInitial(n)),
            };
        };
        let lambda = self.initial_weight(start);
        if lambda.is_one() {
            return Ok(self.clone());
        }
        let mut out = self.clone();
        let re_entered = self
            .states
            .iter()
            .any(|s| s.transitions.iter().any(|t| t.nextstate == start));
        let target = if re_entered {
            let fresh = out.add_state();
            out.states[fresh].transitions = self.states[start].transitions.clone();
            out.states[fresh].final_weight = self.states[start].final_weight;
            fresh
        } else {
            start
        };
        for t in &mut out.states[target].transitions {
            t.weight = lambda.times(&t.weight);
        }
        let rho = out.states[target].final_weight;
        out.states[target].final_weight = lambda.times(&rho);
        out.set_start(target)?;
        Ok(out)
    }

    /// Copies the input label onto the output side.
    pub fn project_input(&self) -> Fst<W> {
        let mut out = self.clone();
        for state in &mut out.states {
            for t in &mut state.transitions {
                t.olabel = t.ilabel;
            }
        }
        out
    }

    /// Replaces every `(ilabel, olabel)` pair with a single fresh label so that
    /// a transducer can be processed by acceptor algorithms.
    pub fn encode(&self) -> (Fst<W>, EncodeTable) {
        let mut table = EncodeTable::default();
        let out = self.encode_with(&mut table);
        (out, table)
    }

    /// Like [`Fst::encode`], extending an existing table so that several
    /// automata share one encoding.
    pub fn encode_with(&self, table: &mut EncodeTable) -> Fst<W> {
        let mut out = self.clone();
        for state in &mut out.states {
            for t in &mut state.transitions {
                let code = table.encode(t.ilabel, t.olabel);
                t.ilabel = code;
                t.olabel = code;
            }
        }
        out
    }

    /// Inverse of [`Fst::encode`].
    pub fn decode(&self, table: &EncodeTable) -> Result<Fst<W>> {
        let mut out = self.clone();
        for state in &mut out.states {
            for t in &mut state.transitions {
                let (i, o) = table
                    .decode(t.ilabel)
                    .ok_or(Error::UnknownLabel(t.ilabel))?;
                t.ilabel = i;
                t.olabel = o;
            }
        }
        Ok(out)
    }
}

/// Bijection between label pairs and the codes assigned by [`Fst::encode`].
/// `(ε, ε)` always encodes to ε.
#[derive(Clone, Debug, Default)]
pub struct EncodeTable {
    pairs: Vec<(Label, Label)>,
    codes: HashMap<(Label, Label), Label>,
}

impl EncodeTable {
    pub fn encode(&mut self, ilabel: Label, olabel: Label) -> Label {
        if ilabel == EPSILON && olabel == EPSILON {
            return EPSILON;
        }
        if let Some(&code) = self.codes.get(&(ilabel, olabel)) {
            return code;
        }
        self.pairs.push((ilabel, olabel));
        let code = self.pairs.len() as Label;
        self.codes.insert((ilabel, olabel), code);
        code
    }

    pub fn decode(&self, code: Label) -> Option<(Label, Label)> {
        if code == EPSILON {
            return Some((EPSILON, EPSILON));
        }
        self.pairs.get(code as usize - 1).copied()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}
