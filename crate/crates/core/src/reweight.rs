//! Shortest distance to final states and weight pushing toward the initial
//! state.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::fst::{Fst, StateId, Transition};
use crate::semiring::{Semiring, TropicalWeight};

/// `d[q]`: the ⊕-sum over all paths from `q` to a final state of the path
/// weight times the final weight.
pub type PotentialMap<W> = Vec<W>;

/// Computes the fixed point `d[q] = ρ(q) ⊕ ⊕_{e ∈ E[q]} w[e] ⊗ d[n[e]]`.
///
/// Idempotent rings use a relaxation worklist and accept cycles; a negative
/// cycle is reported once the number of relaxations exceeds `|Q|·|E|`.
/// Non-idempotent rings need an acyclic input and are solved in reverse
/// topological order.
pub fn shortest_distance_to_final<W: Semiring>(fst: &Fst<W>) -> Result<PotentialMap<W>> {
    if W::IDEMPOTENT {
        relax_to_final(fst)
    } else {
        let order = fst.topological_order().ok_or(Error::UnsupportedRing {
            ring: W::RING,
            reason: "shortest distance over cyclic automata needs an idempotent semiring",
        })?;
        let mut d: PotentialMap<W> = fst.states().map(|q| fst.final_weight(q)).collect();
        for &q in order.iter().rev() {
            let mut acc = fst.final_weight(q);
            for t in fst.transitions(q) {
                acc = acc.plus(&t.weight.times(&d[t.nextstate]));
            }
            d[q] = acc;
        }
        Ok(d)
    }
}

fn relax_to_final<W: Semiring>(fst: &Fst<W>) -> Result<PotentialMap<W>> {
    let n = fst.num_states();
    let mut reverse: Vec<Vec<(StateId, W)>> = vec![Vec::new(); n];
    for q in fst.states() {
        for t in fst.transitions(q) {
            reverse[t.nextstate].push((q, t.weight));
        }
    }
    let mut d: PotentialMap<W> = fst.states().map(|q| fst.final_weight(q)).collect();
    let mut queued = vec![false; n];
    let mut queue = VecDeque::new();
    for q in fst.states().filter(|&q| fst.is_final(q)) {
        queued[q] = true;
        queue.push_back(q);
    }
    let limit = n.saturating_mul(fst.num_transitions()).max(1);
    let mut relaxations = 0usize;
    while let Some(q) = queue.pop_front() {
        queued[q] = false;
        for &(p, w) in &reverse[q] {
            let candidate = w.times(&d[q]);
            let merged = d[p].plus(&candidate);
            if merged != d[p] {
                relaxations += 1;
                if relaxations > limit {
                    return Err(Error::NegativeCycle);
                }
                d[p] = merged;
                if !queued[p] {
                    queued[p] = true;
                    queue.push_back(p);
                }
            }
        }
    }
    Ok(d)
}

/// Reweights `fst` so that every co-accessible state's outgoing mass
/// (transitions plus final weight) ⊕-sums to one, moving the residue onto the
/// initial weights. The input is trimmed first.
pub fn push_weights<W: Semiring>(fst: &Fst<W>) -> Result<Fst<W>> {
    let trimmed = fst.connect();
    let d = shortest_distance_to_final(&trimmed)?;
    let mut out = Fst::new();
    out.add_states(trimmed.num_states());
    for q in trimmed.states() {
        for t in trimmed.transitions(q) {
            let weight = d[q].left_divide(&t.weight.times(&d[t.nextstate]))?;
            out.add_transition(
                q,
                Transition {
                    weight,
                    ..t.clone()
                },
            )?;
        }
        if trimmed.is_final(q) {
            out.set_final(q, d[q].left_divide(&trimmed.final_weight(q))?)?;
        }
    }
    for (q, w) in trimmed.initials() {
        if d[q].is_zero() {
            return Err(Error::DivisionByZero(W::RING));
        }
        out.set_initial(q, w.times(&d[q]))?;
    }
    Ok(out)
}

/// The single best successful path as a linear transducer, with initial and
/// final weights folded into it.
pub fn shortest_path(fst: &Fst<TropicalWeight>) -> Result<Fst<TropicalWeight>> {
    let n = fst.num_states();
    let mut dist = vec![TropicalWeight::zero(); n];
    let mut back: Vec<Option<(StateId, usize)>> = vec![None; n];
    let mut queued = vec![false; n];
    let mut queue = VecDeque::new();
    for (q, w) in fst.initials() {
        dist[q] = w;
        queued[q] = true;
        queue.push_back(q);
    }
    let limit = n.saturating_mul(fst.num_transitions()).max(1);
    let mut relaxations = 0usize;
    while let Some(q) = queue.pop_front() {
        queued[q] = false;
        for (i, t) in fst.transitions(q).iter().enumerate() {
            let candidate = dist[q].times(&t.weight);
            if candidate.value() < dist[t.nextstate].value() {
                relaxations += 1;
                if relaxations > limit {
                    return Err(Error::NegativeCycle);
                }
                dist[t.nextstate] = candidate;
                back[t.nextstate] = Some((q, i));
                if !queued[t.nextstate] {
                    queued[t.nextstate] = true;
                    queue.push_back(t.nextstate);
                }
            }
        }
    }
    let best = fst
        .states()
        .filter(|&q| fst.is_final(q) && !dist[q].is_zero())
        .min_by(|&a, &b| {
            let wa = dist[a].times(&fst.final_weight(a)).value();
            let wb = dist[b].times(&fst.final_weight(b)).value();
            wa.total_cmp(&wb)
        })
        .ok_or(Error::NoPath)?;

    let mut arcs = Vec::new();
    let mut q = best;
    while let Some((p, i)) = back[q] {
        arcs.push(fst.transitions(p)[i].clone());
        q = p;
        if arcs.len() > n {
            return Err(Error::NegativeCycle);
        }
    }
    arcs.reverse();
    let mut out = Fst::new();
    out.add_states(arcs.len() + 1);
    out.set_initial(0, fst.initial_weight(q))?;
    for (k, t) in arcs.into_iter().enumerate() {
        out.add_transition(
            k,
            Transition {
                nextstate: k + 1,
                ..t
            },
        )?;
    }
    out.set_final(out.num_states() - 1, fst.final_weight(best))?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{equivalent, oracle_weight};
    use crate::semiring::{LogWeight, ProbabilityWeight as P, TropicalWeight as T};

    fn chain() -> Fst<T> {
        let mut f = Fst::new();
        f.add_states(3);
        f.set_start(0).unwrap();
        f.add_arc(0, 1, 1, T::new(2.0), 1).unwrap();
        f.add_arc(1, 2, 2, T::new(3.0), 2).unwrap();
        f.set_final(2, T::new(1.0)).unwrap();
        f
    }

    #[test]
    fn single_final_state() {
        let mut f: Fst<T> = Fst::new();
        f.add_state();
        f.set_start(0).unwrap();
        f.set_final(0, T::one()).unwrap();
        assert_eq!(shortest_distance_to_final(&f).unwrap(), vec![T::one()]);
    }

    #[test]
    fn chain_distances() {
        let d = shortest_distance_to_final(&chain()).unwrap();
        assert_eq!(d, vec![T::new(6.0), T::new(4.0), T::new(1.0)]);
    }

    #[test]
    fn diamond_distance() {
        let mut f: Fst<T> = Fst::new();
        f.add_states(4);
        f.set_start(0).unwrap();
        f.add_arc(0, 1, 1, T::new(1.0), 1).unwrap();
        f.add_arc(1, 3, 3, T::new(5.0), 3).unwrap();
        f.add_arc(0, 2, 2, T::new(2.0), 2).unwrap();
        f.add_arc(2, 3, 3, T::new(1.0), 3).unwrap();
        f.set_final(3, T::one()).unwrap();
        let d = shortest_distance_to_final(&f).unwrap();
        assert_eq!(d[0], T::new(3.0));
    }

    #[test]
    fn cycles_in_tropical_ring() {
        let mut f = chain();
        f.add_arc(2, 3, 3, T::new(1.0), 0).unwrap();
        let d = shortest_distance_to_final(&f).unwrap();
        assert_eq!(d, vec![T::new(6.0), T::new(4.0), T::new(1.0)]);
    }

    #[test]
    fn negative_cycle_detected() {
        let mut f = chain();
        f.add_arc(2, 3, 3, T::new(-10.0), 0).unwrap();
        assert_eq!(shortest_distance_to_final(&f), Err(Error::NegativeCycle));
    }

    #[test]
    fn cyclic_log_ring_unsupported() {
        let mut f: Fst<LogWeight> = Fst::new();
        f.add_state();
        f.set_start(0).unwrap();
        f.set_final(0, LogWeight::one()).unwrap();
        f.add_arc(0, 1, 1, LogWeight::new(1.0), 0).unwrap();
        assert!(matches!(
            shortest_distance_to_final(&f),
            Err(Error::UnsupportedRing { .. })
        ));
    }

    #[test]
    fn chain_pushes_everything_to_the_start() {
        let f = chain();
        let p = push_weights(&f).unwrap();
        assert_eq!(p.initial_weight(0), T::new(6.0));
        assert!(p.transitions(0)[0].weight.is_one());
        assert!(p.transitions(1)[0].weight.is_one());
        assert!(p.final_weight(2).is_one());
        assert_eq!(oracle_weight(&p, &[1, 2], &[1, 2]).unwrap(), T::new(6.0));
        assert_eq!(oracle_weight(&f, &[1, 2], &[1, 2]).unwrap(), T::new(6.0));
    }

    #[test]
    fn pushed_input_is_unchanged() {
        let p = push_weights(&chain()).unwrap();
        let pp = push_weights(&p).unwrap();
        assert_eq!(p, pp);
    }

    #[test]
    fn probability_branches_normalise() {
        let mut f: Fst<P> = Fst::new();
        f.add_states(2);
        f.set_start(0).unwrap();
        f.add_arc(0, 1, 1, P::new(0.3), 1).unwrap();
        f.add_arc(0, 2, 2, P::new(0.5), 1).unwrap();
        f.set_final(1, P::new(0.4)).unwrap();
        let p = push_weights(&f).unwrap();
        let sum: f64 = p.transitions(0).iter().map(|t| t.weight.value()).sum();
        assert!((sum - 1.0).abs() < 1e-12);
        assert!((p.transitions(0)[0].weight.value() - 0.375).abs() < 1e-12);
        assert!((p.final_weight(1).value() - 1.0).abs() < 1e-12);
        assert!((p.initial_weight(0).value() - 0.32).abs() < 1e-12);
        assert!(equivalent(&f, &p, 2).unwrap());
    }

    #[test]
    fn shortest_path_picks_cheapest() {
        let mut f: Fst<T> = Fst::new();
        f.add_states(4);
        f.set_start(0).unwrap();
        f.add_arc(0, 1, 1, T::new(1.0), 1).unwrap();
        f.add_arc(1, 3, 3, T::new(5.0), 3).unwrap();
        f.add_arc(0, 2, 2, T::new(2.0), 2).unwrap();
        f.add_arc(2, 3, 4, T::new(1.0), 3).unwrap();
        f.set_final(3, T::new(0.5)).unwrap();
        let p = shortest_path(&f).unwrap();
        assert_eq!(p.num_states(), 3);
        assert_eq!(oracle_weight(&p, &[2, 3], &[2, 4]).unwrap(), T::new(3.5));
        let mut empty: Fst<T> = Fst::new();
        empty.add_state();
        empty.set_start(0).unwrap();
        assert_eq!(shortest_path(&empty), Err(Error::NoPath));
    }
}
