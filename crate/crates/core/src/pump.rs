//! Executable pumping conditions: checking a given decomposition and
//! exhaustively searching for one.
//!
//! Modes and their structural conditions on `w`:
//!
//! | mode          | structure                                      | lengths             | pumped word        |
//! |---------------|------------------------------------------------|---------------------|--------------------|
//! | `shuffle`     | `w ∈ x ((s (y ‖ t)) ‖ z)`                       | `1 ≤ |s|`, `|syt| ≤ N` | `x sᵐ y tᵐ z`     |
//! | `shuffle-alt` | `w ∈ x (y' ‖ z)`, `y' ∈ s (y ‖ t)`              | as `shuffle`        | `x sᵐ y' tᵐ z`     |
//! | `concat`      | `w = x y z`                                    | `1 ≤ |st| ≤ N`      | `x sᵐ y tᵐ z`      |
//! | `ccfl`        | `w ∈ x (s ‖ y)`                                | `1 ≤ |s| ≤ N`       | `x sᵐ y`           |
//!
//! Pumped words are checked for every `m` in `0..=M`. A failed search only
//! shows that the condition fails up to `M`.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::engine::{member, EngineError};
use crate::grammar::Grammar;
use crate::mpda::{accepts, Mpda};
use crate::pa::{pa_member, PaGrammar};
use crate::trace::{closure_member, LetterIndependence, TraceError};
use crate::word::{display, Letter, Word};

/// Default cap on distinct candidate decompositions examined.
pub const DEFAULT_BUDGET: usize = 5_000_000;

/// Is `w` an interleaving of `u` and `v`? Dynamic programming over prefix
/// pairs.
pub fn interleaving_member(w: &[Letter], u: &[Letter], v: &[Letter]) -> bool {
    if w.len() != u.len() + v.len() {
        return false;
    }
    // reach[j]: w[..i+j] is an interleaving of u[..i] and v[..j].
    let mut reach = vec![false; v.len() + 1];
    reach[0] = true;
    for j in 1..=v.len() {
        reach[j] = reach[j - 1] && v[j - 1] == w[j - 1];
    }
    for i in 1..=u.len() {
        reach[0] = reach[0] && u[i - 1] == w[i - 1];
        for j in 1..=v.len() {
            let c = &w[i + j - 1];
            reach[j] = (reach[j] && u[i - 1] == *c) || (reach[j - 1] && v[j - 1] == *c);
        }
    }
    reach[v.len()]
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Shuffle,
    ShuffleAlt,
    Concat,
    Ccfl,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Shuffle => "shuffle",
            Mode::ShuffleAlt => "shuffle-alt",
            Mode::Concat => "concat",
            Mode::Ccfl => "ccfl",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "shuffle" => Ok(Mode::Shuffle),
            "shuffle-alt" | "shuffle_alt" => Ok(Mode::ShuffleAlt),
            "concat" => Ok(Mode::Concat),
            "ccfl" => Ok(Mode::Ccfl),
            _ => Err(format!("unknown mode `{s}`; expected shuffle, shuffle-alt, concat or ccfl")),
        }
    }
}

/// A language given by a membership test over a fixed alphabet.
#[derive(Clone, Debug)]
pub struct Predicate {
    pub name: String,
    pub alphabet: Vec<Letter>,
    pub test: fn(&[Letter]) -> bool,
}

#[derive(Clone, Debug)]
pub enum Oracle {
    Grammar(Grammar),
    Mpda(Mpda),
    Pa(PaGrammar),
    TraceCfl { cfg: Grammar, independence: LetterIndependence },
    Predicate(Predicate),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("membership search budget exhausted")]
    Budget,
    #[error("trace class too large: {0}")]
    Trace(String),
}

impl Oracle {
    pub fn alphabet(&self) -> BTreeSet<Letter> {
        match self {
            Oracle::Grammar(g) | Oracle::TraceCfl { cfg: g, .. } => g.alphabet(),
            Oracle::Mpda(m) => m.alphabet(),
            Oracle::Pa(g) => g.alphabet(),
            Oracle::Predicate(p) => p.alphabet.iter().cloned().collect(),
        }
    }

    /// Membership; the empty word and foreign letters are simply outside.
    pub fn contains(&self, w: &[Letter]) -> Result<bool, OracleError> {
        if w.is_empty() {
            return Ok(false);
        }
        let alphabet = self.alphabet();
        if w.iter().any(|l| !alphabet.contains(l)) {
            return Ok(false);
        }
        let engine = |e: EngineError| match e {
            EngineError::BudgetExhausted { .. } => OracleError::Budget,
            EngineError::EmptyWord | EngineError::UnknownLetter(_) => unreachable!("filtered above"),
        };
        match self {
            Oracle::Grammar(g) => member(g, w).map_err(engine),
            Oracle::Mpda(m) => Ok(accepts(m, w).unwrap_or(false)),
            Oracle::Pa(g) => Ok(pa_member(g, w).unwrap_or(false)),
            Oracle::TraceCfl { cfg, independence } => closure_member(cfg, independence, w).map_err(|e| match e {
                TraceError::Engine(e) => engine(e),
                other => OracleError::Trace(other.to_string()),
            }),
            Oracle::Predicate(p) => Ok((p.test)(w)),
        }
    }
}

/// Membership with a cache, since pumped words repeat across candidates.
struct Cached<'a> {
    oracle: &'a Oracle,
    memo: RefCell<HashMap<Word, bool>>,
}

impl Cached<'_> {
    fn contains(&self, w: &[Letter]) -> Result<bool, OracleError> {
        if let Some(&hit) = self.memo.borrow().get(w) {
            return Ok(hit);
        }
        let r = self.oracle.contains(w)?;
        self.memo.borrow_mut().insert(w.to_vec(), r);
        Ok(r)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PumpDecomposition {
    pub mode: Mode,
    pub x: Word,
    pub y: Word,
    pub z: Word,
    pub s: Word,
    pub t: Word,
    /// The middle subword `y'`, used by `shuffle-alt` only.
    pub y_prime: Option<Word>,
}

impl PumpDecomposition {
    pub fn pumped(&self, m: usize) -> Word {
        let rep = |u: &Word| -> Word { u.iter().cloned().cycle().take(u.len() * m).collect() };
        let mut out = self.x.clone();
        out.extend(rep(&self.s));
        match self.mode {
            Mode::Shuffle | Mode::Concat => {
                out.extend(self.y.iter().cloned());
                out.extend(rep(&self.t));
                out.extend(self.z.iter().cloned());
            }
            Mode::ShuffleAlt => {
                out.extend(self.y_prime.clone().unwrap_or_default());
                out.extend(rep(&self.t));
                out.extend(self.z.iter().cloned());
            }
            Mode::Ccfl => out.extend(self.y.iter().cloned()),
        }
        out
    }

    fn to_json(&self) -> serde_json::Value {
        let mut v = json!({
            "mode": self.mode,
            "x": display(&self.x),
            "s": display(&self.s),
            "y": display(&self.y),
            "t": display(&self.t),
            "z": display(&self.z),
        });
        if let Some(yp) = &self.y_prime {
            v["y_prime"] = json!(display(yp));
        }
        v
    }
}

/// Is `r` an interleaving of `s · (y ‖ t)` with `z`?
fn shuffle_structure(r: &[Letter], s: &[Letter], y: &[Letter], t: &[Letter], z: &[Letter]) -> bool {
    if r.len() != s.len() + y.len() + t.len() + z.len() {
        return false;
    }
    let mut seen = HashSet::new();
    let mut todo = vec![(0usize, 0usize, 0usize, 0usize)];
    while let Some((i, j, k, l)) = todo.pop() {
        let pos = i + j + k + l;
        if pos == r.len() {
            return true;
        }
        if !seen.insert((i, j, k, l)) {
            continue;
        }
        let c = &r[pos];
        if l < z.len() && z[l] == *c {
            todo.push((i, j, k, l + 1));
        }
        if i < s.len() {
            if s[i] == *c {
                todo.push((i + 1, j, k, l));
            }
        } else {
            if j < y.len() && y[j] == *c {
                todo.push((i, j + 1, k, l));
            }
            if k < t.len() && t[k] == *c {
                todo.push((i, j, k + 1, l));
            }
        }
    }
    false
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PumpedWord {
    pub m: usize,
    pub word: Word,
    pub member: bool,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CheckReport {
    pub structure: bool,
    pub lengths: bool,
    pub pumped: Vec<PumpedWord>,
}

impl CheckReport {
    pub fn holds(&self) -> bool {
        self.structure && self.lengths && self.pumped.iter().all(|p| p.member)
    }
}

fn structure_holds(w: &[Letter], d: &PumpDecomposition) -> bool {
    let Some(r) = w.strip_prefix(&d.x[..]) else {
        return false;
    };
    match d.mode {
        Mode::Shuffle => shuffle_structure(r, &d.s, &d.y, &d.t, &d.z),
        Mode::ShuffleAlt => {
            let Some(yp) = &d.y_prime else { return false };
            let Some(q) = yp.strip_prefix(&d.s[..]) else { return false };
            interleaving_member(r, yp, &d.z) && interleaving_member(q, &d.y, &d.t)
        }
        Mode::Concat => {
            let xyz: Word = d.x.iter().chain(&d.y).chain(&d.z).cloned().collect();
            xyz == w
        }
        Mode::Ccfl => interleaving_member(r, &d.s, &d.y),
    }
}

fn lengths_hold(d: &PumpDecomposition, n: usize) -> bool {
    let (s, y, t) = (d.s.len(), d.y.len(), d.t.len());
    match d.mode {
        Mode::Shuffle | Mode::ShuffleAlt => s >= 1 && s + y + t <= n,
        Mode::Concat => (1..=n).contains(&(s + t)),
        Mode::Ccfl => (1..=n).contains(&s),
    }
}

/// Checks the structural and length conditions and the membership of every
/// pumped word for `m` in `0..=max_m`.
pub fn check_decomposition(
    oracle: &Oracle,
    w: &[Letter],
    d: &PumpDecomposition,
    n: usize,
    max_m: usize,
) -> Result<CheckReport, OracleError> {
    let cached = Cached { oracle, memo: RefCell::new(HashMap::new()) };
    check_cached(&cached, w, d, n, max_m, false)
}

fn check_cached(
    oracle: &Cached,
    w: &[Letter],
    d: &PumpDecomposition,
    n: usize,
    max_m: usize,
    stop_early: bool,
) -> Result<CheckReport, OracleError> {
    let mut report = CheckReport { structure: structure_holds(w, d), lengths: lengths_hold(d, n), pumped: Vec::new() };
    for m in 0..=max_m {
        let word = d.pumped(m);
        let member = oracle.contains(&word)?;
        report.pumped.push(PumpedWord { m, word, member });
        if stop_early && !member {
            break;
        }
    }
    Ok(report)
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Outcome {
    Found(PumpDecomposition, CheckReport),
    /// Every candidate was examined and none survived.
    None,
    BudgetExhausted,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PumpReport {
    pub word: Word,
    pub n: usize,
    pub max_m: usize,
    pub mode: Mode,
    /// Whether the oracle accepts `word` itself.
    pub word_in_language: bool,
    pub candidates: usize,
    pub outcome: Outcome,
}

impl PumpReport {
    pub fn found(&self) -> bool {
        matches!(self.outcome, Outcome::Found(..))
    }

    pub fn note(&self) -> String {
        match &self.outcome {
            Outcome::Found(..) => format!("decomposition verified for m = 0..{}", self.max_m),
            Outcome::None => format!(
                "no decomposition passes for m = 0..{}; this is a finite check, not a proof for all m",
                self.max_m
            ),
            Outcome::BudgetExhausted => format!("search stopped after {} candidates", self.candidates),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let (outcome, decomposition, checks) = match &self.outcome {
            Outcome::Found(d, c) => {
                let checks: Vec<serde_json::Value> =
                    c.pumped.iter().map(|p| json!({"m": p.m, "word": display(&p.word), "member": p.member})).collect();
                ("found", d.to_json(), json!(checks))
            }
            Outcome::None => ("none", serde_json::Value::Null, serde_json::Value::Null),
            Outcome::BudgetExhausted => ("budget-exhausted", serde_json::Value::Null, serde_json::Value::Null),
        };
        json!({
            "word": display(&self.word),
            "N": self.n,
            "M": self.max_m,
            "mode": self.mode,
            "word_in_language": self.word_in_language,
            "candidates": self.candidates,
            "outcome": outcome,
            "decomposition": decomposition,
            "checks": checks,
            "note": self.note(),
        })
    }
}

/// Index subsets of `0..len` with sizes in `1..=max`, by size then
/// lexicographically.
fn subsets(len: usize, max: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, len: usize, k: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if acc.len() == k {
            out.push(acc.clone());
            return;
        }
        for i in start..len {
            acc.push(i);
            go(i + 1, len, k, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    for k in 1..=max.min(len) {
        go(0, len, k, &mut Vec::new(), &mut out);
    }
    out
}

/// Every word over `alphabet` of length exactly `k`, lexicographically.
fn words_of_length(alphabet: &[Letter], k: usize) -> Vec<Word> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|w: Word| {
                alphabet.iter().map(move |l| {
                    let mut v = w.clone();
                    v.push(l.clone());
                    v
                })
            })
            .collect();
    }
    out
}

/// Candidate decompositions satisfying the structural and length conditions,
/// in a fixed order, without duplicates.
fn candidates<'a>(
    w: &'a [Letter],
    n: usize,
    mode: Mode,
    alphabet: &[Letter],
) -> Box<dyn Iterator<Item = PumpDecomposition> + 'a> {
    let pick = |r: &[Letter], idx: &[usize]| -> Word { idx.iter().map(|&i| r[i].clone()).collect() };
    let mut seen = HashSet::new();
    let dedup = move |d: PumpDecomposition| seen.insert(d.clone()).then_some(d);
    match mode {
        Mode::Shuffle | Mode::ShuffleAlt => {
            let it = (0..w.len()).flat_map(move |xl| {
                let r = &w[xl..];
                subsets(r.len(), n).into_iter().flat_map(move |p| {
                    let inside: BTreeSet<usize> = p.iter().copied().collect();
                    let z: Word = (0..r.len()).filter(|i| !inside.contains(i)).map(|i| r[i].clone()).collect();
                    (1..=p.len()).flat_map(move |sl| {
                        let rest = p[sl..].to_vec();
                        let (s, yp, z) = (pick(r, &p[..sl]), pick(r, &p), z.clone());
                        (0u32..1 << rest.len()).map(move |mask| {
                            let tagged = |want: bool| -> Vec<usize> {
                                rest.iter()
                                    .enumerate()
                                    .filter(|(b, _)| (mask >> b & 1 == 1) == want)
                                    .map(|(_, &i)| i)
                                    .collect()
                            };
                            PumpDecomposition {
                                mode,
                                x: w[..xl].to_vec(),
                                s: s.clone(),
                                y: pick(r, &tagged(false)),
                                t: pick(r, &tagged(true)),
                                z: z.clone(),
                                y_prime: (mode == Mode::ShuffleAlt).then(|| yp.clone()),
                            }
                        })
                    })
                })
            });
            Box::new(it.filter_map(dedup))
        }
        Mode::Ccfl => {
            let it = (0..w.len()).flat_map(move |xl| {
                let r = &w[xl..];
                subsets(r.len(), n).into_iter().map(move |p| {
                    let inside: BTreeSet<usize> = p.iter().copied().collect();
                    PumpDecomposition {
                        mode,
                        x: w[..xl].to_vec(),
                        s: pick(r, &p),
                        y: (0..r.len()).filter(|i| !inside.contains(i)).map(|i| r[i].clone()).collect(),
                        t: Vec::new(),
                        z: Vec::new(),
                        y_prime: None,
                    }
                })
            });
            Box::new(it.filter_map(dedup))
        }
        Mode::Concat => {
            let alphabet = alphabet.to_vec();
            let pairs: Vec<(Word, Word)> = (1..=n)
                .flat_map(|k| {
                    let alphabet = alphabet.clone();
                    (0..=k).flat_map(move |sl| {
                        let ts = words_of_length(&alphabet, k - sl);
                        words_of_length(&alphabet, sl)
                            .into_iter()
                            .flat_map(move |s| ts.clone().into_iter().map(move |t| (s.clone(), t)))
                    })
                })
                .collect();
            let it = pairs.into_iter().flat_map(move |(s, t)| {
                (0..=w.len()).flat_map(move |i| {
                    let (s, t) = (s.clone(), t.clone());
                    (i..=w.len()).map(move |j| PumpDecomposition {
                        mode,
                        x: w[..i].to_vec(),
                        y: w[i..j].to_vec(),
                        z: w[j..].to_vec(),
                        s: s.clone(),
                        t: t.clone(),
                        y_prime: None,
                    })
                })
            });
            Box::new(it)
        }
    }
}

/// Exhaustive search for a decomposition of `w` that passes every check.
pub fn find_decomposition(
    oracle: &Oracle,
    w: &[Letter],
    n: usize,
    mode: Mode,
    max_m: usize,
    budget: usize,
) -> Result<PumpReport, OracleError> {
    let cached = Cached { oracle, memo: RefCell::new(HashMap::new()) };
    let alphabet: Vec<Letter> = oracle.alphabet().into_iter().collect();
    let word_in_language = cached.contains(w)?;
    let mut report =
        PumpReport { word: w.to_vec(), n, max_m, mode, word_in_language, candidates: 0, outcome: Outcome::None };
    for d in candidates(w, n, mode, &alphabet) {
        if report.candidates >= budget {
            report.outcome = Outcome::BudgetExhausted;
            return Ok(report);
        }
        report.candidates += 1;
        // Try the most selective pumped words first.
        let quick = (1..=max_m).rev().chain([0]).all(|m| cached.contains(&d.pumped(m)).unwrap_or(true));
        if !quick {
            continue;
        }
        let check = check_cached(&cached, w, &d, n, max_m, true)?;
        if check.holds() {
            report.outcome = Outcome::Found(d, check);
            return Ok(report);
        }
    }
    Ok(report)
}
