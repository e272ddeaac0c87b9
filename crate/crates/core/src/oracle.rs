//! Brute-force semantics by path enumeration.
//!
//! These functions define what a transducer *means*: the weight of a string
//! pair is the ⊕-sum, over every successful path whose ε-free labels spell the
//! pair, of `λ ⊗ arc weights ⊗ ρ`. They are deliberately naive and serve as the
//! ground truth that every optimization is checked against.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::fst::{Fst, Label, StateId, EPSILON};
use crate::semiring::{Semiring, DEFAULT_DELTA};

/// Largest number of string pairs [`equivalent`] agrees to sweep.
pub const MAX_SWEEP: u128 = 1_000_000;

/// Weighted relation restricted to bounded string lengths. Pairs absent from
/// the map have weight `zero`.
pub type Relation<W> = BTreeMap<(Vec<Label>, Vec<Label>), W>;

fn path_cap(num_states: usize, labels: usize) -> usize {
    num_states.saturating_mul(labels.saturating_add(1)).max(1)
}

/// Weight of mapping `input` to `output`.
///
/// Paths are cut at `|Q| × (|input| + |output| + 1)` transitions. For
/// idempotent rings the truncation is harmless when ε-cycles are not
/// negative; for other rings a binding cut means an infinite sum and the
/// oracle refuses.
pub fn oracle_weight<W: Semiring>(fst: &Fst<W>, input: &[Label], output: &[Label]) -> Result<W> {
    struct Walk<'a, W> {
        fst: &'a Fst<W>,
        input: &'a [Label],
        output: &'a [Label],
        cap: usize,
        capped: bool,
        total: W,
    }

    impl<W: Semiring> Walk<'_, W> {
        fn visit(&mut self, q: StateId, ipos: usize, opos: usize, depth: usize, acc: W) {
            if ipos == self.input.len() && opos == self.output.len() && self.fst.is_final(q) {
                self.total = self.total.plus(&acc.times(&self.fst.final_weight(q)));
            }
            for t in self.fst.transitions(q) {
                let ni = match t.ilabel {
                    EPSILON => ipos,
                    l if self.input.get(ipos) == Some(&l) => ipos + 1,
                    _ => continue,
                };
                let no = match t.olabel {
                    EPSILON => opos,
                    l if self.output.get(opos) == Some(&l) => opos + 1,
                    _ => continue,
                };
                if depth == self.cap {
                    self.capped = true;
                    continue;
                }
                self.visit(t.nextstate, ni, no, depth + 1, acc.times(&t.weight));
            }
        }
    }

    let mut walk = Walk {
        fst,
        input,
        output,
        cap: path_cap(fst.num_states(), input.len() + output.len()),
        capped: false,
        total: W::zero(),
    };
    for (q, w) in fst.initials() {
        walk.visit(q, 0, 0, 0, w);
    }
    if walk.capped && !W::IDEMPOTENT {
        return Err(Error::OracleInapplicable(format!(
            "path length cap {} reached in the non-idempotent {} semiring",
            walk.cap,
            W::RING
        )));
    }
    Ok(walk.total)
}

/// Every string pair with `|input| <= max_in` and `|output| <= max_out` that
/// has a successful path, with its weight.
///
/// For acyclic transducers the enumeration is exhaustive and the bounds may
/// be `usize::MAX`. Otherwise paths are cut at `|Q| × (max_in + max_out + 1)`
/// transitions, with the same refusal rule as [`oracle_weight`].
pub fn relation<W: Semiring>(fst: &Fst<W>, max_in: usize, max_out: usize) -> Result<Relation<W>> {
    struct Walk<'a, W> {
        fst: &'a Fst<W>,
        max_in: usize,
        max_out: usize,
        cap: usize,
        capped: bool,
        input: Vec<Label>,
        output: Vec<Label>,
        out: Relation<W>,
    }

    impl<W: Semiring> Walk<'_, W> {
        fn visit(&mut self, q: StateId, depth: usize, acc: W) {
            if self.fst.is_final(q) {
                let w = acc.times(&self.fst.final_weight(q));
                self.out
                    .entry((self.input.clone(), self.output.clone()))
                    .and_modify(|e| *e = e.plus(&w))
                    .or_insert(w);
            }
            for t in self.fst.transitions(q) {
                if t.ilabel != EPSILON && self.input.len() >= self.max_in {
                    continue;
                }
                if t.olabel != EPSILON && self.output.len() >= self.max_out {
                    continue;
                }
                if depth == self.cap {
                    self.capped = true;
                    continue;
                }
                if t.ilabel != EPSILON {
                    self.input.push(t.ilabel);
                }
                if t.olabel != EPSILON {
                    self.output.push(t.olabel);
                }
                self.visit(t.nextstate, depth + 1, acc.times(&t.weight));
                if t.ilabel != EPSILON {
                    self.input.pop();
                }
                if t.olabel != EPSILON {
                    self.output.pop();
                }
            }
        }
    }

    let cap = if fst.is_acyclic() {
        usize::MAX
    } else {
        path_cap(fst.num_states(), max_in.saturating_add(max_out))
    };
    let mut walk = Walk {
        fst,
        max_in,
        max_out,
        cap,
        capped: false,
        input: Vec::new(),
        output: Vec::new(),
        out: Relation::new(),
    };
    for (q, w) in fst.initials() {
        walk.visit(q, 0, w);
    }
    if walk.capped && !W::IDEMPOTENT {
        return Err(Error::OracleInapplicable(format!(
            "path length cap {cap} reached in the non-idempotent {} semiring",
            W::RING
        )));
    }
    walk.out.retain(|_, w| !w.is_zero());
    Ok(walk.out)
}

/// Compares two relations pair by pair; missing pairs count as `zero`.
pub fn relations_agree<W: Semiring>(a: &Relation<W>, b: &Relation<W>, delta: f64) -> bool {
    let zero = W::zero();
    a.iter()
        .all(|(k, wa)| wa.approx_eq(b.get(k).unwrap_or(&zero), delta))
        && b.iter()
            .all(|(k, wb)| wb.approx_eq(a.get(k).unwrap_or(&zero), delta))
}

/// Number of strings of length `0..=max_len` over `alphabet` symbols.
fn strings_up_to(alphabet: usize, max_len: usize) -> u128 {
    let mut total: u128 = 0;
    let mut power: u128 = 1;
    for _ in 0..=max_len {
        total = total.saturating_add(power);
        power = power.saturating_mul(alphabet as u128);
    }
    total
}

/// Bounded equivalence with the default tolerance.
pub fn equivalent<W: Semiring>(a: &Fst<W>, b: &Fst<W>, max_len: usize) -> Result<bool> {
    equivalent_with_delta(a, b, max_len, DEFAULT_DELTA)
}

/// True iff both transducers give every string pair with sides of length
/// `<= max_len` the same weight within `delta`.
///
/// The sweep covers the union alphabet of both operands: strings for a pair of
/// acceptors, string pairs otherwise. Sweeps over [`MAX_SWEEP`] are refused.
pub fn equivalent_with_delta<W: Semiring>(
    a: &Fst<W>,
    b: &Fst<W>,
    max_len: usize,
    delta: f64,
) -> Result<bool> {
    let alphabet: BTreeSet<Label> = [a, b]
        .iter()
        .flat_map(|f| f.input_alphabet().into_iter().chain(f.output_alphabet()))
        .collect();
    let strings = strings_up_to(alphabet.len(), max_len);
    let pairs = if a.is_acceptor() && b.is_acceptor() {
        strings
    } else {
        strings.saturating_mul(strings)
    };
    if pairs > MAX_SWEEP {
        return Err(Error::SweepTooLarge {
            pairs,
            limit: MAX_SWEEP,
        });
    }
    let ra = relation(a, max_len, max_len)?;
    let rb = relation(b, max_len, max_len)?;
    Ok(relations_agree(&ra, &rb, delta))
}

/// Number of distinct successful paths whose ε-free labels spell the pair.
pub fn count_matching_paths<W: Semiring>(
    fst: &Fst<W>,
    input: &[Label],
    output: &[Label],
) -> Result<u64> {
    if !fst.is_acyclic() {
        return Err(Error::Cyclic);
    }
    fn count<W: Semiring>(fst: &Fst<W>, q: StateId, input: &[Label], output: &[Label]) -> u64 {
        let mut n = u64::from(input.is_empty() && output.is_empty() && fst.is_final(q));
        for t in fst.transitions(q) {
            let rest_in = match t.ilabel {
                EPSILON => input,
                l if input.first() == Some(&l) => &input[1..],
                _ => continue,
            };
            let rest_out = match t.olabel {
                EPSILON => output,
                l if output.first() == Some(&l) => &output[1..],
                _ => continue,
            };
            n += count(fst, t.nextstate, rest_in, rest_out);
        }
        n
    }
    Ok(fst
        .initials()
        .map(|(q, _)| count(fst, q, input, output))
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiring::{LogWeight, TropicalWeight as T};

    fn single_path() -> Fst<T> {
        let mut f = Fst::new();
        f.add_states(2);
        f.set_start(0).unwrap();
        f.add_arc(0, 1, 2, T::new(2.0), 1).unwrap();
        f.set_final(1, T::one()).unwrap();
        f
    }

    #[test]
    fn single_path_weight() {
        let f = single_path();
        assert_eq!(oracle_weight(&f, &[1], &[2]).unwrap(), T::new(2.0));
        assert!(oracle_weight(&f, &[1], &[3]).unwrap().is_zero());
        assert!(oracle_weight(&f, &[], &[]).unwrap().is_zero());
    }

    #[test]
    fn parallel_paths_take_min() {
        let mut f = single_path();
        let s = f.add_state();
        f.add_arc(0, 1, 2, T::new(3.0), s).unwrap();
        f.set_final(s, T::one()).unwrap();
        assert_eq!(oracle_weight(&f, &[1], &[2]).unwrap(), T::new(2.0));
        assert_eq!(count_matching_paths(&f, &[1], &[2]).unwrap(), 2);
    }

    #[test]
    fn initial_and_final_weights_count() {
        let mut f = single_path();
        f.set_initial(0, T::new(1.5)).unwrap();
        f.set_final(1, T::new(0.25)).unwrap();
        assert_eq!(oracle_weight(&f, &[1], &[2]).unwrap(), T::new(3.75));
    }

    #[test]
    fn epsilon_cycle_refused_in_log_ring() {
        let mut f: Fst<LogWeight> = Fst::new();
        f.add_states(1);
        f.set_start(0).unwrap();
        f.set_final(0, LogWeight::one()).unwrap();
        f.add_arc(0, EPSILON, EPSILON, LogWeight::new(1.0), 0)
            .unwrap();
        assert!(matches!(
            oracle_weight(&f, &[], &[]),
            Err(Error::OracleInapplicable(_))
        ));
        assert!(matches!(
            relation(&f, 2, 2),
            Err(Error::OracleInapplicable(_))
        ));
    }

    #[test]
    fn epsilon_cycle_truncated_in_tropical_ring() {
        let mut f: Fst<T> = Fst::new();
        f.add_states(1);
        f.set_start(0).unwrap();
        f.set_final(0, T::new(1.0)).unwrap();
        f.add_arc(0, EPSILON, EPSILON, T::new(1.0), 0).unwrap();
        f.add_arc(0, 1, 1, T::new(1.0), 0).unwrap();
        assert_eq!(oracle_weight(&f, &[1], &[1]).unwrap(), T::new(2.0));
    }

    #[test]
    fn relation_matches_pointwise_oracle() {
        let mut f = single_path();
        f.add_arc(1, EPSILON, 3, T::new(1.0), 1).unwrap();
        let rel = relation(&f, 2, 2).unwrap();
        for ((x, y), w) in &rel {
            assert_eq!(oracle_weight(&f, x, y).unwrap(), *w);
        }
        assert_eq!(rel.len(), 2);
        assert_eq!(rel[&(vec![1], vec![2, 3])], T::new(3.0));
    }

    #[test]
    fn equivalent_detects_changed_weight() {
        let f = single_path();
        assert!(equivalent(&f, &f, 4).unwrap());
        assert!(equivalent(&f, &f.connect(), 4).unwrap());
        let mut g = f.clone();
        g.transitions_mut(0)[0].weight = T::new(5.0);
        assert!(!equivalent(&f, &g, 4).unwrap());
    }

    #[test]
    fn equivalent_refuses_huge_sweeps() {
        let mut f: Fst<T> = Fst::new();
        f.add_states(1);
        f.set_start(0).unwrap();
        for l in 1..=20 {
            f.add_arc(0, l, l, T::one(), 0).unwrap();
        }
        f.set_final(0, T::one()).unwrap();
        assert!(matches!(
            equivalent(&f, &f, 6),
            Err(Error::SweepTooLarge { .. })
        ));
    }

    #[test]
    fn counting_requires_acyclic() {
        let mut f = single_path();
        assert_eq!(count_matching_paths(&f, &[1], &[2]).unwrap(), 1);
        assert_eq!(count_matching_paths(&f, &[2], &[2]).unwrap(), 0);
        f.add_arc(1, 1, 1, T::one(), 0).unwrap();
        assert_eq!(count_matching_paths(&f, &[1], &[2]), Err(Error::Cyclic));
    }
}
