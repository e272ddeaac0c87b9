//! Weighted minimization of deterministic automata: push weights, then run
//! unweighted partition refinement where each transition's
//! `(ilabel, olabel, weight)` triple acts as a single opaque label.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::fst::{Fst, Label, StateId, Transition};
use crate::reweight::push_weights;
use crate::semiring::{Semiring, DEFAULT_DELTA};

/// Blocks of equivalent states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub blocks: Vec<Vec<StateId>>,
}

impl Partition {
    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_of(&self, num_states: usize) -> Vec<usize> {
        let mut out = vec![usize::MAX; num_states];
        for (b, block) in self.blocks.iter().enumerate() {
            for &q in block {
                out[q] = b;
            }
        }
        out
    }
}

pub fn minimize<W: Semiring>(fst: &Fst<W>) -> Result<Fst<W>> {
    minimize_with_delta(fst, DEFAULT_DELTA)
}

/// Minimizes a deterministic automaton. Transition and final weights are
/// compared on a grid of step `delta` after pushing. The result is numbered
/// in breadth-first order from its initial state.
pub fn minimize_with_delta<W: Semiring>(fst: &Fst<W>, delta: f64) -> Result<Fst<W>> {
    if !fst.is_deterministic() {
        return Err(Error::NotDeterministic);
    }
    let pushed = push_weights(&fst.connect())?;
    if pushed.num_states() == 0 {
        return Ok(pushed);
    }
    let partition = refine(&pushed, delta);
    Ok(quotient(&pushed, &partition))
}

type CombinedLabel = (Label, Label, i64);

/// Hopcroft refinement on the completed automaton (a sink state absorbs
/// missing transitions). The sink's block is dropped from the result.
pub fn refine<W: Semiring>(fst: &Fst<W>, delta: f64) -> Partition {
    let n = fst.num_states();
    let sink = n;
    let total = n + 1;

    let mut label_ids: BTreeMap<CombinedLabel, usize> = BTreeMap::new();
    for q in fst.states() {
        for t in fst.transitions(q) {
            let key = (t.ilabel, t.olabel, t.weight.quantize(delta));
            let next = label_ids.len();
            label_ids.entry(key).or_insert(next);
        }
    }
    let k = label_ids.len();

    // inverse[c][q]: states p with δ(p, c) = q
    let mut inverse = vec![vec![Vec::new(); total]; k];
    let mut has = vec![vec![false; k]; total];
    for q in fst.states() {
        for t in fst.transitions(q) {
            let c = label_ids[&(t.ilabel, t.olabel, t.weight.quantize(delta))];
            inverse[c][t.nextstate].push(q);
            has[q][c] = true;
        }
    }
    for (p, row) in has.iter().enumerate() {
        for (c, &present) in row.iter().enumerate() {
            if !present {
                inverse[c][sink].push(p);
            }
        }
    }

    let mut initial: BTreeMap<(bool, i64), Vec<StateId>> = BTreeMap::new();
    for q in 0..total {
        let key = if q == sink {
            (false, i64::MAX)
        } else {
            (fst.is_final(q), fst.final_weight(q).quantize(delta))
        };
        initial.entry(key).or_default().push(q);
    }
    let mut blocks: Vec<Vec<StateId>> = initial.into_values().collect();
    let mut block_of = vec![0usize; total];
    for (b, block) in blocks.iter().enumerate() {
        for &q in block {
            block_of[q] = b;
        }
    }

    let mut queue: VecDeque<(usize, usize)> = VecDeque::new();
    let mut pending: HashSet<(usize, usize)> = HashSet::new();
    for b in 0..blocks.len() {
        for c in 0..k {
            queue.push_back((b, c));
            pending.insert((b, c));
        }
    }

    while let Some((b, c)) = queue.pop_front() {
        pending.remove(&(b, c));
        let mut touched: BTreeMap<usize, Vec<StateId>> = BTreeMap::new();
        for &q in &blocks[b] {
            for &p in &inverse[c][q] {
                touched.entry(block_of[p]).or_default().push(p);
            }
        }
        for (y, hits) in touched {
            if hits.len() == blocks[y].len() {
                continue;
            }
            let marked: HashSet<StateId> = hits.into_iter().collect();
            let (inside, outside): (Vec<_>, Vec<_>) =
                blocks[y].iter().partition(|q| marked.contains(q));
            let z = blocks.len();
            for &q in &inside {
                block_of[q] = z;
            }
            blocks[y] = outside;
            blocks.push(inside);
            for a in 0..k {
                if pending.contains(&(y, a)) {
                    pending.insert((z, a));
                    queue.push_back((z, a));
                } else {
                    let smaller = if blocks[z].len() <= blocks[y].len() {
                        z
                    } else {
                        y
                    };
                    pending.insert((smaller, a));
                    queue.push_back((smaller, a));
                }
            }
        }
    }

    let mut blocks: Vec<Vec<StateId>> = blocks
        .into_iter()
        .map(|mut b| {
            b.retain(|&q| q != sink);
            b.sort_unstable();
            b
        })
        .filter(|b| !b.is_empty())
        .collect();
    blocks.sort();
    Partition { blocks }
}

fn quotient<W: Semiring>(fst: &Fst<W>, partition: &Partition) -> Fst<W> {
    let block_of = partition.block_of(fst.num_states());
    let mut out = Fst::new();
    out.add_states(partition.num_blocks());
    for (b, block) in partition.blocks.iter().enumerate() {
        let rep = block[0];
        for t in fst.transitions(rep) {
            out.add_transition(
                b,
                Transition {
                    nextstate: block_of[t.nextstate],
                    ..t.clone()
                },
            )
            .expect("blocks are allocated");
        }
        out.set_final(b, fst.final_weight(rep))
            .expect("blocks are allocated");
    }
    for (q, w) in fst.initials() {
        out.set_initial(block_of[q], w)
            .expect("blocks are allocated");
    }
    out.bfs_renumber()
}

/// Equivalence of two deterministic automata by comparing their minimal
/// pushed forms up to state renaming.
pub fn equivalence_pushed<W: Semiring>(a: &Fst<W>, b: &Fst<W>, delta: f64) -> Result<bool> {
    let ma = minimize_with_delta(a, delta)?;
    let mb = minimize_with_delta(b, delta)?;
    Ok(isomorphic(&ma, &mb, delta))
}

/// Parallel breadth-first walk of two deterministic automata matching
/// transitions by input label.
pub fn isomorphic<W: Semiring>(a: &Fst<W>, b: &Fst<W>, delta: f64) -> bool {
    if a.num_states() != b.num_states() || a.num_transitions() != b.num_transitions() {
        return false;
    }
    let (sa, sb) = match (a.start(), b.start()) {
        (None, None) => return a.num_initials() == b.num_initials(),
        (Some(x), Some(y)) => (x, y),
        _ => return false,
    };
    if !a.initial_weight(sa).approx_eq(&b.initial_weight(sb), delta) {
        return false;
    }
    let mut forward: HashMap<StateId, StateId> = HashMap::from([(sa, sb)]);
    let mut used: BTreeSet<StateId> = BTreeSet::from([sb]);
    let mut queue = VecDeque::from([(sa, sb)]);
    while let Some((p, q)) = queue.pop_front() {
        if a.is_final(p) != b.is_final(q) || !a.final_weight(p).approx_eq(&b.final_weight(q), delta)
        {
            return false;
        }
        let mut ta: Vec<_> = a.transitions(p).iter().collect();
        let mut tb: Vec<_> = b.transitions(q).iter().collect();
        if ta.len() != tb.len() {
            return false;
        }
        ta.sort_by_key(|t| t.ilabel);
        tb.sort_by_key(|t| t.ilabel);
        for (x, y) in ta.into_iter().zip(tb) {
            if x.ilabel != y.ilabel || x.olabel != y.olabel || !x.weight.approx_eq(&y.weight, delta)
            {
                return false;
            }
            match forward.get(&x.nextstate) {
                Some(&m) if m != y.nextstate => return false,
                Some(_) => {}
                None => {
                    if !used.insert(y.nextstate) {
                        return false;
                    }
                    forward.insert(x.nextstate, y.nextstate);
                    queue.push_back((x.nextstate, y.nextstate));
                }
            }
        }
    }
    true
}
