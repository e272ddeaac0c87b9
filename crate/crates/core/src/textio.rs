//! Text serialization.
//!
//! ```text
//! #wfst tropical
//! 0    1    a    a    1
//! 1    0
//! ```
//!
//! Fields are tab-separated. The header names the semiring. Arc lines are
//! `src<TAB>dst<TAB>isym<TAB>osym[<TAB>weight]` (a missing weight is one),
//! final lines are `state[<TAB>weight]`. The first state mentioned is the
//! start state. Without a symbol table labels are written as integers.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::fst::{Fst, Label, StateId, Transition, EPSILON};
use crate::semiring::Semiring;

pub const EPSILON_SYMBOL: &str = "<eps>";
const HEADER_TAG: &str = "#wfst";

/// Bijection between symbols and labels; `<eps>` is always label 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolTable {
    by_label: BTreeMap<Label, String>,
    by_symbol: HashMap<String, Label>,
}

impl Default for SymbolTable {
    fn default() -> Self {
        Self::new()
    }
}

impl SymbolTable {
    pub fn new() -> Self {
        let mut table = SymbolTable {
            by_label: BTreeMap::new(),
            by_symbol: HashMap::new(),
        };
        table.by_label.insert(EPSILON, EPSILON_SYMBOL.to_string());
        table.by_symbol.insert(EPSILON_SYMBOL.to_string(), EPSILON);
        table
    }

    /// Table with the given symbols numbered from 1.
    pub fn from_symbols<I, S>(symbols: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut table = Self::new();
        for s in symbols {
            table.add_symbol(s.as_ref());
        }
        table
    }

    /// Returns the label of `symbol`, assigning the next free id if needed.
    pub fn add_symbol(&mut self, symbol: &str) -> Label {
        if let Some(&label) = self.by_symbol.get(symbol) {
            return label;
        }
        let label = self.by_label.keys().next_back().map_or(0, |&l| l + 1);
        self.by_label.insert(label, symbol.to_string());
        self.by_symbol.insert(symbol.to_string(), label);
        label
    }

    pub fn insert(&mut self, symbol: &str, label: Label) -> Result<()> {
        match (self.by_symbol.get(symbol), self.by_label.get(&label)) {
            (Some(&l), Some(s)) if l == label && s == symbol => Ok(()),
            (None, None) => {
                self.by_label.insert(label, symbol.to_string());
                self.by_symbol.insert(symbol.to_string(), label);
                Ok(())
            }
            _ => Err(Error::SymbolTable(format!(
                "conflicting entry {symbol:?} -> {label}"
            ))),
        }
    }

    pub fn label(&self, symbol: &str) -> Option<Label> {
        self.by_symbol.get(symbol).copied()
    }

    pub fn symbol(&self, label: Label) -> Option<&str> {
        self.by_label.get(&label).map(String::as_str)
    }

    /// Number of entries, including `<eps>`.
    pub fn len(&self) -> usize {
        self.by_label.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_label.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Label, &str)> {
        self.by_label.iter().map(|(&l, s)| (l, s.as_str()))
    }

    /// Parses `symbol<TAB>id` lines.
    pub fn parse(text: &str) -> Result<Self> {
        let mut by_label = BTreeMap::new();
        let mut by_symbol = HashMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let [symbol, id] = fields[..] else {
                return Err(Error::Parse {
                    line: n + 1,
                    message: "expected symbol<TAB>id".into(),
                });
            };
            let label: Label = id.trim().parse().map_err(|_| Error::Parse {
                line: n + 1,
                message: format!("invalid label id {id:?}"),
            })?;
            if by_label.insert(label, symbol.to_string()).is_some() {
                return Err(Error::Parse {
                    line: n + 1,
                    message: format!("duplicate id {label}"),
                });
            }
            if by_symbol.insert(symbol.to_string(), label).is_some() {
                return Err(Error::Parse {
                    line: n + 1,
                    message: format!("duplicate symbol {symbol:?}"),
                });
            }
        }
        match (by_symbol.get(EPSILON_SYMBOL), by_label.get(&EPSILON)) {
            (Some(&EPSILON), _) => {}
            (None, None) => {
                by_label.insert(EPSILON, EPSILON_SYMBOL.to_string());
                by_symbol.insert(EPSILON_SYMBOL.to_string(), EPSILON);
            }
            _ => {
                return Err(Error::SymbolTable(format!(
                    "{EPSILON_SYMBOL} must have id 0"
                )))
            }
        }
        Ok(SymbolTable {
            by_label,
            by_symbol,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (label, symbol) in &self.by_label {
            let _ = writeln!(out, "{symbol}\t{label}");
        }
        out
    }
}

fn format_label(label: Label, table: Option<&SymbolTable>) -> Result<String> {
    match table {
        Some(t) => t
            .symbol(label)
            .map(str::to_string)
            .ok_or(Error::UnknownLabel(label)),
        None => Ok(label.to_string()),
    }
}

fn parse_label(token: &str, table: Option<&SymbolTable>, line: usize) -> Result<Label> {
    match table {
        Some(t) => t
            .label(token)
            .ok_or_else(|| Error::UnknownSymbol(token.to_string())),
        None => token.parse().map_err(|_| Error::Parse {
            line,
            message: format!("invalid numeric label {token:?}"),
        }),
    }
}

/// Serializes a transducer with a single initial state of weight one.
pub fn write_fst<W: Semiring>(
    fst: &Fst<W>,
    isyms: Option<&SymbolTable>,
    osyms: Option<&SymbolTable>,
) -> Result<String> {
    let mut out = format!("{HEADER_TAG} {}\n", W::RING);
    if fst.num_states() == 0 {
        return Ok(out);
    }
    let start = fst
        .start()
        .ok_or(Error::MultipleInitial(fst.num_initials()))?;
    if !fst.initial_weight(start).is_one() {
        return Err(Error::InitialWeight);
    }

    let order: Vec<StateId> = std::iter::once(start)
        .chain(fst.states().filter(|&q| q != start))
        .collect();
    if fst.transitions(start).is_empty() && !fst.is_final(start) {
        // Mention the start state before anything else.
        let _ = writeln!(out, "{start}\t{}", W::zero());
    }
    for &q in &order {
        for t in fst.transitions(q) {
            let _ = write!(
                out,
                "{q}\t{}\t{}\t{}",
                t.nextstate,
                format_label(t.ilabel, isyms)?,
                format_label(t.olabel, osyms)?
            );
            let _ = writeln!(out, "\t{}", t.weight);
        }
    }
    for &q in &order {
        if fst.is_final(q) {
            let _ = writeln!(out, "{q}\t{}", fst.final_weight(q));
        }
    }
    Ok(out)
}

/// Ring named by the header line of a serialized transducer.
pub fn peek_ring(text: &str) -> Result<crate::semiring::Ring> {
    let (n, line) = text
        .lines()
        .enumerate()
        .find(|(_, l)| !l.trim().is_empty())
        .ok_or(Error::Parse {
            line: 1,
            message: "missing header".into(),
        })?;
    let mut parts = line.split_whitespace();
    match (parts.next(), parts.next(), parts.next()) {
        (Some(HEADER_TAG), Some(ring), None) => ring.parse(),
        _ => Err(Error::Parse {
            line: n + 1,
            message: format!("expected `{HEADER_TAG} <ring>`"),
        }),
    }
}

pub fn read_fst<W: Semiring>(
    text: &str,
    isyms: Option<&SymbolTable>,
    osyms: Option<&SymbolTable>,
) -> Result<Fst<W>> {
    let ring = peek_ring(text)?;
    if ring != W::RING {
        return Err(Error::RingMismatch {
            expected: W::RING,
            found: ring,
        });
    }
    let parse_weight = |token: &str, line: usize| -> Result<W> {
        let value: f64 = token.trim().parse().map_err(|_| Error::Parse {
            line,
            message: format!("invalid weight {token:?}"),
        })?;
        W::from_value(value).map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })
    };
    let parse_state = |token: &str, line: usize| -> Result<StateId> {
        token.trim().parse().map_err(|_| Error::Parse {
            line,
            message: format!("invalid state {token:?}"),
        })
    };

    let mut fst = Fst::new();
    let mut start = None;
    let mut header_seen = false;
    let ensure = |fst: &mut Fst<W>, q: StateId| {
        while fst.num_states() <= q {
            fst.add_state();
        }
    };
    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        if !header_seen {
            header_seen = true;
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        match fields.len() {
            1 | 2 => {
                let q = parse_state(fields[0], line_no)?;
                let w = match fields.get(1) {
                    Some(tok) => parse_weight(tok, line_no)?,
                    None => W::one(),
                };
                ensure(&mut fst, q);
                start.get_or_insert(q);
                fst.set_final(q, w)?;
            }
            4 | 5 => {
                let src = parse_state(fields[0], line_no)?;
                let dst = parse_state(fields[1], line_no)?;
                let ilabel = parse_label(fields[2], isyms, line_no)?;
                let olabel = parse_label(fields[3], osyms, line_no)?;
                let weight = match fields.get(4) {
                    Some(tok) => parse_weight(tok, line_no)?,
                    None => W::one(),
                };
                ensure(&mut fst, src.max(dst));
                start.get_or_insert(src);
                fst.add_transition(src, Transition::new(ilabel, olabel, weight, dst))?;
            }
            k => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected 1, 2, 4 or 5 tab-separated fields, found {k}"),
                })
            }
        }
    }
    if let Some(q) = start {
        fst.set_start(q)?;
    }
    Ok(fst)
}
