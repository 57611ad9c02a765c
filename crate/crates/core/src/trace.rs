//! Trace equivalence over letters and trace closures of context-free
//! languages.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::engine::{member, EngineError};
use crate::grammar::Grammar;
use crate::pcg::{self, ParseError};
use crate::word::{Letter, Word};

/// Longest word whose trace class is enumerated by default.
pub const DEFAULT_CAP: usize = 14;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TraceError {
    #[error("word length {len} exceeds the cap {cap}")]
    CapExceeded { len: usize, cap: usize },
    #[error("reflexive letter pair ({0}, {0})")]
    Reflexive(Letter),
    #[error("cannot parse letter pair `{0}`")]
    Syntax(String),
    #[error("the generator must be context-free (empty non-terminal independence)")]
    NotContextFree,
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Grammar(#[from] ParseError),
}

/// Symmetric, irreflexive relation on letters, stored as ordered pairs
/// `(x, y)` with `x < y`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct LetterIndependence {
    pairs: BTreeSet<(Letter, Letter)>,
}

impl LetterIndependence {
    pub fn new<I: IntoIterator<Item = (Letter, Letter)>>(pairs: I) -> Result<Self, TraceError> {
        let mut out = BTreeSet::new();
        for (x, y) in pairs {
            if x == y {
                return Err(TraceError::Reflexive(x));
            }
            out.insert(if x < y { (x, y) } else { (y, x) });
        }
        Ok(LetterIndependence { pairs: out })
    }

    /// Every pair in `xs × ys`.
    pub fn product(xs: &[&str], ys: &[&str]) -> Result<Self, TraceError> {
        Self::new(xs.iter().flat_map(|x| ys.iter().map(move |y| (Letter::new(x), Letter::new(y)))))
    }

    pub fn union(&self, other: &Self) -> Self {
        LetterIndependence { pairs: self.pairs.union(&other.pairs).cloned().collect() }
    }

    /// Parses `b c, a d`.
    pub fn parse(text: &str) -> Result<Self, TraceError> {
        let mut pairs = Vec::new();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match item.split_whitespace().collect::<Vec<_>>()[..] {
                [x, y] => pairs.push((Letter::new(x), Letter::new(y))),
                _ => return Err(TraceError::Syntax(item.to_string())),
            }
        }
        Self::new(pairs)
    }

    pub fn independent(&self, x: &Letter, y: &Letter) -> bool {
        if x < y {
            self.pairs.contains(&(x.clone(), y.clone()))
        } else {
            self.pairs.contains(&(y.clone(), x.clone()))
        }
    }

    pub fn pairs(&self) -> &BTreeSet<(Letter, Letter)> {
        &self.pairs
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn format(&self) -> String {
        self.pairs.iter().map(|(x, y)| format!("{x} {y}")).collect::<Vec<_>>().join(", ")
    }
}

/// Lexicographically least word in the trace class of `w`.
pub fn canonical_word(w: &[Letter], ind: &LetterIndependence) -> Word {
    let mut rest = w.to_vec();
    let mut out = Vec::with_capacity(rest.len());
    while !rest.is_empty() {
        let best = (0..rest.len())
            .filter(|&i| rest[..i].iter().all(|y| ind.independent(y, &rest[i])))
            .min_by(|&i, &j| rest[i].cmp(&rest[j]))
            .expect("the first letter is always minimal");
        out.push(rest.remove(best));
    }
    out
}

pub fn word_trace_equivalent(u: &[Letter], v: &[Letter], ind: &LetterIndependence) -> bool {
    u.len() == v.len() && canonical_word(u, ind) == canonical_word(v, ind)
}

pub fn trace_class(w: &[Letter], ind: &LetterIndependence) -> Result<BTreeSet<Word>, TraceError> {
    trace_class_with_cap(w, ind, DEFAULT_CAP)
}

/// The full swap class of `w`, by closure under adjacent swaps.
pub fn trace_class_with_cap(w: &[Letter], ind: &LetterIndependence, cap: usize) -> Result<BTreeSet<Word>, TraceError> {
    if w.len() > cap {
        return Err(TraceError::CapExceeded { len: w.len(), cap });
    }
    let mut seen = BTreeSet::from([w.to_vec()]);
    let mut todo = vec![w.to_vec()];
    while let Some(u) = todo.pop() {
        for k in 0..u.len().saturating_sub(1) {
            if ind.independent(&u[k], &u[k + 1]) {
                let mut v = u.clone();
                v.swap(k, k + 1);
                if !seen.contains(&v) {
                    seen.insert(v.clone());
                    todo.push(v);
                }
            }
        }
    }
    Ok(seen)
}

/// Is `w` trace equivalent to some word generated by the context-free
/// grammar `cfg`?
pub fn closure_member(cfg: &Grammar, ind: &LetterIndependence, w: &[Letter]) -> Result<bool, TraceError> {
    if !cfg.independence().is_empty() {
        return Err(TraceError::NotContextFree);
    }
    let alphabet = cfg.alphabet();
    if let Some(l) = w.iter().find(|l| !alphabet.contains(*l)) {
        return Err(EngineError::UnknownLetter(l.clone()).into());
    }
    for v in trace_class(w, ind)? {
        if member(cfg, &v)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Parses a `.pcg` file that may carry a `letter-independence: b c, a d`
/// line.
pub fn parse_with_letter_independence(text: &str) -> Result<(Grammar, LetterIndependence), TraceError> {
    let mut ind = LetterIndependence::default();
    let mut rest = String::new();
    for line in text.lines() {
        match pcg::strip_comment(line).trim().strip_prefix("letter-independence:") {
            Some(pairs) => ind = ind.union(&LetterIndependence::parse(pairs)?),
            None => {
                rest.push_str(line);
                rest.push('\n');
            }
        }
    }
    Ok((pcg::parse(&rest)?, ind))
}

pub fn print_with_letter_independence(g: &Grammar, ind: &LetterIndependence) -> String {
    format!("{}letter-independence: {}\n", pcg::print(g), ind.format())
}
