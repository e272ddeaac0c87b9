//! Pairwise composition.
//!
//! Pair states `(q1, q2, f)` are discovered breadth-first from `I1 × I2`.
//! Besides matching a non-ε output of the left operand with an equal input of
//! the right operand, three ε-moves exist: the left operand follows an
//! ε-output transition alone, the right operand follows an ε-input transition
//! alone, or both move together. The filter state `f` admits exactly one
//! interleaving of any run of ε-moves:
//!
//! | f | symbol match | both | left alone | right alone |
//! |---|--------------|------|------------|-------------|
//! | 0 | → 0          | → 0  | → 1        | → 2         |
//! | 1 | → 0          |      | → 1        |             |
//! | 2 | → 0          |      |            | → 2         |

use std::collections::{BTreeMap, HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::fst::{Fst, Label, StateId, Transition, EPSILON};
use crate::semiring::Semiring;

/// Epsilon coordination state of a pair state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FilterState {
    /// No ε-run in progress.
    Free,
    /// Only the left operand may take further ε-moves.
    LeftOnly,
    /// Only the right operand may take further ε-moves.
    RightOnly,
}

impl FilterState {
    pub fn index(self) -> u8 {
        match self {
            FilterState::Free => 0,
            FilterState::LeftOnly => 1,
            FilterState::RightOnly => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PairState {
    pub q1: StateId,
    pub q2: StateId,
    pub filter: FilterState,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ComposeStats {
    /// Pair states discovered, before trimming.
    pub pair_states: usize,
    /// Pair states taken off the worklist and expanded.
    pub expansions: usize,
}

/// Filtered composition, trimmed.
pub fn compose<W: Semiring>(left: &Fst<W>, right: &Fst<W>) -> Result<Fst<W>> {
    compose_with_stats(left, right).map(|(fst, _)| fst)
}

pub fn compose_with_stats<W: Semiring>(
    left: &Fst<W>,
    right: &Fst<W>,
) -> Result<(Fst<W>, ComposeStats)> {
    if !W::IDEMPOTENT && left.has_epsilon_outputs() && right.has_epsilon_inputs() {
        return Err(Error::AmbiguousEpsilonComposition(W::RING));
    }
    let (fst, stats) = Composer::new(left, right, true).run();
    Ok((fst.connect(), stats))
}

/// Composition without the ε-filter: every interleaving of left-alone and
/// right-alone ε-moves becomes its own path. Only useful to exhibit the
/// redundancy the filter removes; in non-idempotent rings the result
/// over-counts.
pub fn compose_unfiltered<W: Semiring>(left: &Fst<W>, right: &Fst<W>) -> Fst<W> {
    Composer::new(left, right, false).run().0.connect()
}

struct Composer<'a, W> {
    left: &'a Fst<W>,
    right: &'a Fst<W>,
    filtered: bool,
    /// Per right state: input label → transition indices.
    right_index: Vec<BTreeMap<Label, Vec<usize>>>,
    ids: HashMap<PairState, StateId>,
    queue: VecDeque<(PairState, StateId)>,
    out: Fst<W>,
}

impl<'a, W: Semiring> Composer<'a, W> {
    fn new(left: &'a Fst<W>, right: &'a Fst<W>, filtered: bool) -> Self {
        let right_index = right
            .states()
            .map(|q| {
                let mut index: BTreeMap<Label, Vec<usize>> = BTreeMap::new();
                for (i, t) in right.transitions(q).iter().enumerate() {
                    index.entry(t.ilabel).or_default().push(i);
                }
                index
            })
            .collect();
        Composer {
            left,
            right,
            filtered,
            right_index,
            ids: HashMap::new(),
            queue: VecDeque::new(),
            out: Fst::new(),
        }
    }

    fn state(&mut self, pair: PairState) -> StateId {
        if let Some(&id) = self.ids.get(&pair) {
            return id;
        }
        let id = self.out.add_state();
        self.ids.insert(pair, id);
        self.queue.push_back((pair, id));
        id
    }

    fn arc(&mut self, src: StateId, ilabel: Label, olabel: Label, weight: W, dst: PairState) {
        let next = self.state(dst);
        self.out
            .add_transition(src, Transition::new(ilabel, olabel, weight, next))
            .expect("pair states are allocated before use");
    }

    fn run(mut self) -> (Fst<W>, ComposeStats) {
        let initials: Vec<_> = self
            .left
            .initials()
            .flat_map(|(q1, w1)| {
                self.right
                    .initials()
                    .map(move |(q2, w2)| (q1, q2, w1.times(&w2)))
            })
            .collect();
        for (q1, q2, w) in initials {
            let id = self.state(PairState {
                q1,
                q2,
                filter: FilterState::Free,
            });
            self.out.set_initial(id, w).expect("state exists");
        }

        let mut expansions = 0;
        while let Some((pair, src)) = self.queue.pop_front() {
            expansions += 1;
            self.expand(pair, src);
        }
        let stats = ComposeStats {
            pair_states: self.ids.len(),
            expansions,
        };
        (self.out, stats)
    }

    fn expand(&mut self, pair: PairState, src: StateId) {
        let PairState { q1, q2, filter } = pair;
        let (left, right) = (self.left, self.right);
        let rho = left.final_weight(q1).times(&right.final_weight(q2));
        if !rho.is_zero() {
            self.out.set_final(src, rho).expect("state exists");
        }

        let (left_alone, right_alone, both) = if self.filtered {
            (
                filter != FilterState::RightOnly,
                filter != FilterState::LeftOnly,
                filter == FilterState::Free,
            )
        } else {
            (true, true, false)
        };
        let filtered = self.filtered;
        let next_filter = move |f: FilterState| if filtered { f } else { FilterState::Free };

        let right_eps: Vec<usize> = self.right_index[q2]
            .get(&EPSILON)
            .cloned()
            .unwrap_or_default();
        for t1 in left.transitions(q1) {
            if t1.olabel != EPSILON {
                let Some(matches) = self.right_index[q2].get(&t1.olabel).cloned() else {
                    continue;
                };
                for i in matches {
                    let t2 = &right.transitions(q2)[i];
                    let dst = PairState {
                        q1: t1.nextstate,
                        q2: t2.nextstate,
                        filter: FilterState::Free,
                    };
                    self.arc(src, t1.ilabel, t2.olabel, t1.weight.times(&t2.weight), dst);
                }
                continue;
            }
            if left_alone {
                let dst = PairState {
                    q1: t1.nextstate,
                    q2,
                    filter: next_filter(FilterState::LeftOnly),
                };
                self.arc(src, t1.ilabel, EPSILON, t1.weight, dst);
            }
            if both {
                for &i in &right_eps {
                    let t2 = &right.transitions(q2)[i];
                    let dst = PairState {
                        q1: t1.nextstate,
                        q2: t2.nextstate,
                        filter: FilterState::Free,
                    };
                    self.arc(src, t1.ilabel, t2.olabel, t1.weight.times(&t2.weight), dst);
                }
            }
        }
        if right_alone {
            for &i in &right_eps {
                let t2 = &right.transitions(q2)[i];
                let dst = PairState {
                    q1,
                    q2: t2.nextstate,
                    filter: next_filter(FilterState::RightOnly),
                };
                self.arc(src, EPSILON, t2.olabel, t2.weight, dst);
            }
        }
    }
}
