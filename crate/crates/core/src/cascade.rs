//! A toy recognition cascade: a pronunciation lexicon `L` (phones to words)
//! composed with a bigram word grammar `G`, optimized, and decoded.

use std::collections::BTreeMap;

use crate::compose::compose;
use crate::determinize::determinize;
use crate::error::{Error, Result};
use crate::fst::{Fst, Label, StateId, Transition, EPSILON};
use crate::minimize::minimize;
use crate::semiring::{Semiring, TropicalWeight};
use crate::textio::SymbolTable;

/// Illustrative three-word lexicon (`word<TAB>prob<TAB>phones`).
pub const DEMO_LEXICON: &str = include_str!("../fixtures/lexicon.tsv");
/// Bigrams over the demo words (`w1<TAB>w2<TAB>prob`).
pub const DEMO_GRAMMAR: &str = include_str!("../fixtures/grammar.tsv");

#[derive(Clone, Debug, PartialEq)]
pub struct LexiconEntry {
    pub word: String,
    pub pronunciation: Vec<String>,
    pub probability: f64,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct GrammarSpec {
    pub bigrams: Vec<(String, String, f64)>,
}

fn neg_log(p: f64) -> Result<TropicalWeight> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Invalid(format!("probability {p} outside (0, 1]")));
    }
    // -ln 1 is -0.0; normalize so 1.0 prints as 0.
    Ok(TropicalWeight::new(-p.ln() + 0.0))
}

/// Builds the lexicon transducer. Every pronunciation is a phone path whose
/// first arc carries the word and `-ln(probability)`; all paths end in a
/// shared final state that repeats the start state's arcs, so any sequence of
/// one or more words is accepted.
pub fn build_lexicon(
    entries: &[LexiconEntry],
    phones: &mut SymbolTable,
    words: &mut SymbolTable,
) -> Result<Fst<TropicalWeight>> {
    if entries.is_empty() {
        return Err(Error::Invalid("empty lexicon".into()));
    }
    let mut mass: BTreeMap<&str, f64> = BTreeMap::new();
    for e in entries {
        if e.pronunciation.is_empty() {
            return Err(Error::Invalid(format!(
                "empty pronunciation for {:?}",
                e.word
            )));
        }
        *mass.entry(&e.word).or_default() += e.probability;
    }
    if let Some((w, p)) = mass.iter().find(|(_, &p)| p > 1.0 + 1e-9) {
        return Err(Error::Invalid(format!(
            "pronunciation probabilities of {w:?} sum to {p}"
        )));
    }

    let mut fst = Fst::new();
    let start = fst.add_state();
    let end = fst.add_state();
    fst.set_start(start)?;
    fst.set_final(end, TropicalWeight::one())?;
    let mut first_arcs = Vec::new();
    for e in entries {
        let word = words.add_symbol(&e.word);
        let labels: Vec<Label> = e
            .pronunciation
            .iter()
            .map(|p| phones.add_symbol(p))
            .collect();
        let mut src = start;
        for (k, &phone) in labels.iter().enumerate() {
            let dst = if k + 1 == labels.len() {
                end
            } else {
                fst.add_state()
            };
            let t = if k == 0 {
                Transition::new(phone, word, neg_log(e.probability)?, dst)
            } else {
                Transition::new(phone, EPSILON, TropicalWeight::one(), dst)
            };
            if k == 0 {
                first_arcs.push(t.clone());
            }
            fst.add_transition(src, t)?;
            src = dst;
        }
    }
    for t in first_arcs {
        fst.add_transition(end, t)?;
    }
    // Number states so the start comes first and the end state last.
    Ok(fst.bfs_renumber())
}

/// Builds the grammar acceptor: a start state with weight-one arcs into one
/// state per word, and a `-ln(probability)` arc for every bigram. Every word
/// state is final.
pub fn build_grammar(spec: &GrammarSpec, words: &mut SymbolTable) -> Result<Fst<TropicalWeight>> {
    if spec.bigrams.is_empty() {
        return Err(Error::Invalid("empty grammar".into()));
    }
    let mut mass: BTreeMap<&str, f64> = BTreeMap::new();
    for (w1, _, p) in &spec.bigrams {
        *mass.entry(w1).or_default() += p;
    }
    if let Some((w, p)) = mass.iter().find(|(_, &p)| p > 1.0 + 1e-9) {
        return Err(Error::Invalid(format!(
            "bigram probabilities after {w:?} sum to {p}"
        )));
    }

    let mut fst = Fst::new();
    let start = fst.add_state();
    fst.set_start(start)?;
    let mut state_of: BTreeMap<Label, StateId> = BTreeMap::new();
    let mut state_for = |fst: &mut Fst<TropicalWeight>, label: Label| -> Result<StateId> {
        if let Some(&q) = state_of.get(&label) {
            return Ok(q);
        }
        let q = fst.add_state();
        fst.set_final(q, TropicalWeight::one())?;
        fst.add_arc(start, label, label, TropicalWeight::one(), q)?;
        state_of.insert(label, q);
        Ok(q)
    };
    for (w1, w2, p) in &spec.bigrams {
        let (l1, l2) = (words.add_symbol(w1), words.add_symbol(w2));
        let q1 = state_for(&mut fst, l1)?;
        let q2 = state_for(&mut fst, l2)?;
        fst.add_arc(q1, l2, l2, neg_log(*p)?, q2)?;
    }
    Ok(fst)
}

/// One-state grammar accepting every word sequence at weight one.
pub fn identity_grammar(words: &SymbolTable) -> Fst<TropicalWeight> {
    let mut fst = Fst::new();
    fst.add_state();
    fst.set_start(0).expect("state exists");
    fst.set_final(0, TropicalWeight::one())
        .expect("state exists");
    for (label, _) in words.iter().filter(|&(l, _)| l != EPSILON) {
        fst.add_arc(0, label, label, TropicalWeight::one(), 0)
            .expect("state exists");
    }
    fst
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageCount {
    pub stage: &'static str,
    pub states: usize,
    pub transitions: usize,
}

impl StageCount {
    fn of<W: Semiring>(stage: &'static str, fst: &Fst<W>) -> Self {
        StageCount {
            stage,
            states: fst.num_states(),
            transitions: fst.num_transitions(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RecognitionGraph {
    /// `connect(L ∘ G)`.
    pub composed: Fst<TropicalWeight>,
    /// Minimal deterministic phone acceptor of the composed graph, when its
    /// input projection determinizes within the state limit.
    pub projection: Option<Fst<TropicalWeight>>,
    /// The composed graph determinized and minimized with each phone:word
    /// pair treated as one label.
    pub optimized: Fst<TropicalWeight>,
    pub stages: Vec<StageCount>,
}

pub fn build_recognition_graph(
    lexicon: &Fst<TropicalWeight>,
    grammar: &Fst<TropicalWeight>,
    max_states: usize,
) -> Result<RecognitionGraph> {
    let missing: Vec<Label> = lexicon
        .output_alphabet()
        .difference(&grammar.input_alphabet())
        .copied()
        .collect();
    if !missing.is_empty() {
        return Err(Error::Invalid(format!(
            "lexicon words {missing:?} are not in the grammar"
        )));
    }
    let composed = compose(lexicon, grammar)?.connect();
    let mut stages = vec![StageCount::of("compose", &composed)];

    let projection = match determinize(&composed.project_input(), max_states) {
        Ok(det) => {
            stages.push(StageCount::of("projection/determinize", &det));
            let min = minimize(&det)?;
            stages.push(StageCount::of("projection/minimize", &min));
            Some(min)
        }
        Err(Error::NonDeterminable { .. }) => None,
        Err(e) => return Err(e),
    };

    let (encoded, table) = composed.encode();
    let det = determinize(&encoded, max_states)?;
    stages.push(StageCount::of("determinize", &det));
    let min = minimize(&det)?;
    stages.push(StageCount::of("minimize", &min));
    let optimized = min.decode(&table)?;

    Ok(RecognitionGraph {
        composed,
        projection,
        optimized,
        stages,
    })
}

/// Best-scoring path whose input, with ε removed, is `phones`. Returns its
/// output labels with ε removed and its total weight.
pub fn decode(
    graph: &Fst<TropicalWeight>,
    phones: &[Label],
) -> Result<(Vec<Label>, TropicalWeight)> {
    let n = graph.num_states();
    let len = phones.len();
    type Back = Option<(usize, StateId, usize)>;
    let mut dist = vec![vec![f64::INFINITY; n]; len + 1];
    let mut back: Vec<Vec<Back>> = vec![vec![None; n]; len + 1];
    for (q, w) in graph.initials() {
        dist[0][q] = w.value();
    }
    for pos in 0..=len {
        // ε-input closure at this position; weights are non-negative here
        // but the worklist copes with any cycle-free improvement sequence.
        let mut queue: Vec<StateId> = (0..n).filter(|&q| dist[pos][q].is_finite()).collect();
        let mut rounds = 0usize;
        while let Some(q) = queue.pop() {
            rounds += 1;
            if rounds > n.saturating_mul(graph.num_transitions()).max(n) + n {
                return Err(Error::NegativeCycle);
            }
            for (k, t) in graph.transitions(q).iter().enumerate() {
                if t.ilabel != EPSILON {
                    continue;
                }
                let cand = dist[pos][q] + t.weight.value();
                if cand < dist[pos][t.nextstate] {
                    dist[pos][t.nextstate] = cand;
                    back[pos][t.nextstate] = Some((pos, q, k));
                    queue.push(t.nextstate);
                }
            }
        }
        if pos == len {
            break;
        }
        for q in 0..n {
            if !dist[pos][q].is_finite() {
                continue;
            }
            for (k, t) in graph.transitions(q).iter().enumerate() {
                if t.ilabel != phones[pos] {
                    continue;
                }
                let cand = dist[pos][q] + t.weight.value();
                if cand < dist[pos + 1][t.nextstate] {
                    dist[pos + 1][t.nextstate] = cand;
                    back[pos + 1][t.nextstate] = Some((pos, q, k));
                }
            }
        }
    }

    let (best, total) = (0..n)
        .filter(|&q| graph.is_final(q) && dist[len][q].is_finite())
        .map(|q| (q, dist[len][q] + graph.final_weight(q).value()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or(Error::NoPath)?;

    let mut words = Vec::new();
    let (mut pos, mut q) = (len, best);
    while let Some((p, src, k)) = back[pos][q] {
        let t = &graph.transitions(src)[k];
        if t.olabel != EPSILON {
            words.push(t.olabel);
        }
        pos = p;
        q = src;
    }
    words.reverse();
    Ok((words, TropicalWeight::new(total)))
}

/// Parses `word<TAB>prob<TAB>phone phone ...` lines.
pub fn parse_lexicon(text: &str) -> Result<Vec<LexiconEntry>> {
    let mut out = Vec::new();
    for (n, line) in data_lines(text) {
        let fields: Vec<&str> = line.split('\t').collect();
        let [word, prob, phones] = fields[..] else {
            return Err(Error::Parse {
                line: n,
                message: "expected word<TAB>prob<TAB>phones".into(),
            });
        };
        out.push(LexiconEntry {
            word: word.trim().to_string(),
            pronunciation: phones.split_whitespace().map(str::to_string).collect(),
            probability: parse_prob(prob, n)?,
        });
    }
    Ok(out)
}

/// Parses `w1<TAB>w2<TAB>prob` lines.
pub fn parse_grammar(text: &str) -> Result<GrammarSpec> {
    let mut bigrams = Vec::new();
    for (n, line) in data_lines(text) {
        let fields: Vec<&str> = line.split('\t').collect();
        let [w1, w2, prob] = fields[..] else {
            return Err(Error::Parse {
                line: n,
                message: "expected w1<TAB>w2<TAB>prob".into(),
            });
        };
        bigrams.push((
            w1.trim().to_string(),
            w2.trim().to_string(),
            parse_prob(prob, n)?,
        ));
    }
    Ok(GrammarSpec { bigrams })
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(n, l)| (n + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
}

fn parse_prob(token: &str, line: usize) -> Result<f64> {
    token.trim().parse().map_err(|_| Error::Parse {
        line,
        message: format!("invalid probability {token:?}"),
    })
}

/// Maps whitespace-separated symbols to labels.
pub fn labels_of(text: &str, table: &SymbolTable) -> Result<Vec<Label>> {
    text.split_whitespace()
        .map(|s| {
            table
                .label(s)
                .ok_or_else(|| Error::UnknownSymbol(s.to_string()))
        })
        .collect()
}
