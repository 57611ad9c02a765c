//! Operational semantics: configurations up to swaps, production steps, and
//! exact bounded membership and enumeration.
//!
//! Configurations are explored as canonical traces. An occurrence of `X` is
//! *minimal* when every occurrence before it is independent of `X`; such an
//! occurrence can be swapped to the head, so firing it is one production
//! step preceded by swaps. The canonical representative of a trace is the
//! lexicographically least word in its swap class, built greedily by always
//! taking the least minimal occurrence.

use std::collections::{BTreeSet, HashSet};

use thiserror::Error;

use crate::grammar::{Grammar, LetterId, Nt, ProdId};
use crate::word::{Letter, Word};

/// Default cap on visited search states.
pub const DEFAULT_BUDGET: usize = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("the empty word is never generated by a Greibach grammar")]
    EmptyWord,
    #[error("letter `{0}` is not in the alphabet")]
    UnknownLetter(Letter),
    #[error("search budget exhausted after {visited} states")]
    BudgetExhausted { visited: usize },
}

/// Lexicographically least representative of a swap class.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct CanonicalTrace(Vec<Nt>);

impl CanonicalTrace {
    pub fn symbols(&self) -> &[Nt] {
        &self.0
    }

    pub fn into_symbols(self) -> Vec<Nt> {
        self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn format(&self, g: &Grammar) -> String {
        g.names(&self.0).join(" ")
    }
}

fn is_minimal(g: &Grammar, cfg: &[Nt], i: usize) -> bool {
    cfg[..i].iter().all(|&y| g.independent(y, cfg[i]))
}

/// Indices of minimal occurrences, in position order.
pub fn minimal_occurrences(g: &Grammar, cfg: &[Nt]) -> Vec<usize> {
    (0..cfg.len()).filter(|&i| is_minimal(g, cfg, i)).collect()
}

pub fn canonical(g: &Grammar, cfg: &[Nt]) -> CanonicalTrace {
    let mut rest = cfg.to_vec();
    let mut out = Vec::with_capacity(rest.len());
    while !rest.is_empty() {
        // Two occurrences of one label are dependent, so the least minimal
        // label has exactly one minimal occurrence.
        let best = (0..rest.len())
            .filter(|&i| is_minimal(g, &rest, i))
            .min_by_key(|&i| rest[i])
            .expect("the first occurrence is always minimal");
        out.push(rest.remove(best));
    }
    CanonicalTrace(out)
}

pub fn swap_reachable(g: &Grammar, c1: &[Nt], c2: &[Nt]) -> bool {
    canonical(g, c1) == canonical(g, c2)
}

/// Fires the occurrence at `index` with production `pid`: the right-hand
/// side replaces the occurrence at the head of the configuration.
fn fire(g: &Grammar, cfg: &[Nt], index: usize, pid: ProdId) -> Vec<Nt> {
    let rhs = &g.production(pid).rhs;
    let mut next = Vec::with_capacity(rhs.len() + cfg.len() - 1);
    next.extend_from_slice(rhs);
    next.extend(cfg.iter().enumerate().filter(|&(i, _)| i != index).map(|(_, &nt)| nt));
    next
}

/// All `(production, successor)` pairs, optionally restricted to one letter.
fn steps(g: &Grammar, cfg: &[Nt], letter: Option<LetterId>) -> Vec<(ProdId, CanonicalTrace)> {
    let mut out = Vec::new();
    for i in minimal_occurrences(g, cfg) {
        for &pid in g.productions_of(cfg[i]) {
            if letter.is_none_or(|l| g.production(pid).letter == l) {
                out.push((pid, canonical(g, &fire(g, cfg, i, pid))));
            }
        }
    }
    out
}

pub fn successors(g: &Grammar, cfg: &[Nt]) -> BTreeSet<(Letter, CanonicalTrace)> {
    steps(g, cfg, None).into_iter().map(|(pid, next)| (g.letter(g.production(pid).letter).clone(), next)).collect()
}

fn encode_word(g: &Grammar, word: &[Letter]) -> Result<Vec<LetterId>, EngineError> {
    if word.is_empty() {
        return Err(EngineError::EmptyWord);
    }
    g.encode(word).map_err(EngineError::UnknownLetter)
}

struct MemberSearch<'a> {
    g: &'a Grammar,
    word: &'a [LetterId],
    failed: HashSet<(usize, CanonicalTrace)>,
    visited: usize,
    budget: usize,
}

impl MemberSearch<'_> {
    fn run(&mut self, pos: usize, cfg: CanonicalTrace) -> Result<bool, EngineError> {
        let remaining = self.word.len() - pos;
        if cfg.is_empty() {
            return Ok(remaining == 0);
        }
        // Every non-terminal yields at least one letter.
        if cfg.len() > remaining {
            return Ok(false);
        }
        let key = (pos, cfg);
        if self.failed.contains(&key) {
            return Ok(false);
        }
        self.visited += 1;
        if self.visited > self.budget {
            return Err(EngineError::BudgetExhausted { visited: self.visited });
        }
        for (_, next) in steps(self.g, key.1.symbols(), Some(self.word[pos])) {
            if self.run(pos + 1, next)? {
                return Ok(true);
            }
        }
        self.failed.insert(key);
        Ok(false)
    }
}

pub fn member(g: &Grammar, word: &[Letter]) -> Result<bool, EngineError> {
    member_with_budget(g, word, DEFAULT_BUDGET)
}

pub fn member_with_budget(g: &Grammar, word: &[Letter], budget: usize) -> Result<bool, EngineError> {
    member_from(g, &[g.start()], word, budget)
}

/// Membership for an arbitrary initial configuration.
pub fn member_from(g: &Grammar, start: &[Nt], word: &[Letter], budget: usize) -> Result<bool, EngineError> {
    let ids = encode_word(g, word)?;
    let mut search = MemberSearch { g, word: &ids, failed: HashSet::new(), visited: 0, budget };
    search.run(0, canonical(g, start))
}

pub fn enumerate(g: &Grammar, max_len: usize) -> Result<Vec<Word>, EngineError> {
    enumerate_with_budget(g, max_len, DEFAULT_BUDGET)
}

/// Every generated word of length at most `max_len`, in shortlex order.
pub fn enumerate_with_budget(g: &Grammar, max_len: usize, budget: usize) -> Result<Vec<Word>, EngineError> {
    let mut found: BTreeSet<(usize, Vec<LetterId>)> = BTreeSet::new();
    let mut frontier: HashSet<(Vec<LetterId>, CanonicalTrace)> = HashSet::new();
    let start = canonical(g, &[g.start()]);
    if start.len() <= max_len {
        frontier.insert((Vec::new(), start));
    }
    let mut visited = frontier.len();
    while !frontier.is_empty() {
        let mut next_frontier = HashSet::new();
        for (prefix, cfg) in &frontier {
            for (pid, next) in steps(g, cfg.symbols(), None) {
                if prefix.len() + 1 + next.len() > max_len {
                    continue;
                }
                let mut w = prefix.clone();
                w.push(g.production(pid).letter);
                if next.is_empty() {
                    found.insert((w.len(), w));
                } else {
                    next_frontier.insert((w, next));
                }
            }
        }
        visited += next_frontier.len();
        if visited > budget {
            return Err(EngineError::BudgetExhausted { visited });
        }
        frontier = next_frontier;
    }
    Ok(found.into_iter().map(|(_, w)| g.decode(&w)).collect())
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Step {
    /// Production step applied to the head of the configuration.
    Produce(ProdId),
    /// Swap of the occurrences at `index` and `index + 1`.
    Swap(usize),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Derivation {
    pub start: Vec<Nt>,
    pub steps: Vec<Step>,
    pub word: Word,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DerivationError {
    #[error("step {step}: {reason}")]
    InvalidStep { step: usize, reason: String },
    #[error("derivation ends in a non-empty configuration")]
    Unfinished,
    #[error("derivation defines a different word than recorded")]
    WordMismatch,
}

impl Derivation {
    pub fn production_steps(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s, Step::Produce(_))).count()
    }

    pub fn swap_steps(&self) -> usize {
        self.steps.len() - self.production_steps()
    }

    /// Replays the steps and returns the intermediate configurations,
    /// starting with `start` and ending with the empty configuration.
    pub fn replay(&self, g: &Grammar) -> Result<Vec<Vec<Nt>>, DerivationError> {
        let mut cfg = self.start.clone();
        let mut trail = vec![cfg.clone()];
        let mut word = Vec::new();
        for (i, step) in self.steps.iter().enumerate() {
            let invalid = |reason: String| DerivationError::InvalidStep { step: i, reason };
            match *step {
                Step::Swap(k) => {
                    if k + 1 >= cfg.len() {
                        return Err(invalid(format!("swap index {k} out of range")));
                    }
                    if !g.independent(cfg[k], cfg[k + 1]) {
                        return Err(invalid(format!("{} and {} are dependent", g.name(cfg[k]), g.name(cfg[k + 1]))));
                    }
                    cfg.swap(k, k + 1);
                }
                Step::Produce(pid) => {
                    if pid.0 >= g.productions().len() {
                        return Err(invalid(format!("no production #{}", pid.0)));
                    }
                    let p = g.production(pid);
                    if cfg.first() != Some(&p.lhs) {
                        return Err(invalid(format!("head is not {}", g.name(p.lhs))));
                    }
                    word.push(g.letter(p.letter).clone());
                    cfg = fire(g, &cfg, 0, pid);
                }
            }
            trail.push(cfg.clone());
        }
        if !cfg.is_empty() {
            return Err(DerivationError::Unfinished);
        }
        if word != self.word {
            return Err(DerivationError::WordMismatch);
        }
        Ok(trail)
    }

    pub fn format(&self, g: &Grammar) -> String {
        let trail = match self.replay(g) {
            Ok(t) => t,
            Err(e) => return format!("<invalid derivation: {e}>"),
        };
        let show = |c: &Vec<Nt>| if c.is_empty() { "ε".to_string() } else { g.names(c).join(" ") };
        let mut out = show(&trail[0]);
        for (step, cfg) in self.steps.iter().zip(&trail[1..]) {
            match step {
                Step::Produce(pid) => out.push_str(&format!(" -{}-> ", g.letter(g.production(*pid).letter))),
                Step::Swap(_) => out.push_str(" --> "),
            }
            out.push_str(&show(cfg));
        }
        out
    }
}

struct WitnessSearch<'a> {
    g: &'a Grammar,
    word: &'a [LetterId],
    failed: HashSet<(usize, CanonicalTrace)>,
    steps: Vec<Step>,
    visited: usize,
    budget: usize,
}

impl WitnessSearch<'_> {
    fn run(&mut self, pos: usize, raw: Vec<Nt>) -> Result<bool, EngineError> {
        let remaining = self.word.len() - pos;
        if raw.is_empty() {
            return Ok(remaining == 0);
        }
        if raw.len() > remaining {
            return Ok(false);
        }
        let key = (pos, canonical(self.g, &raw));
        if self.failed.contains(&key) {
            return Ok(false);
        }
        self.visited += 1;
        if self.visited > self.budget {
            return Err(EngineError::BudgetExhausted { visited: self.visited });
        }
        for i in minimal_occurrences(self.g, &raw) {
            for &pid in self.g.productions_of(raw[i]) {
                if self.g.production(pid).letter != self.word[pos] {
                    continue;
                }
                let mark = self.steps.len();
                self.steps.extend((0..i).rev().map(Step::Swap));
                self.steps.push(Step::Produce(pid));
                if self.run(pos + 1, fire(self.g, &raw, i, pid))? {
                    return Ok(true);
                }
                self.steps.truncate(mark);
            }
        }
        self.failed.insert(key);
        Ok(false)
    }
}

/// A concrete derivation with explicit swap steps, or `None` if the word is
/// not generated.
pub fn derive_witness(g: &Grammar, word: &[Letter]) -> Result<Option<Derivation>, EngineError> {
    derive_witness_from(g, &[g.start()], word)
}

pub fn derive_witness_from(g: &Grammar, start: &[Nt], word: &[Letter]) -> Result<Option<Derivation>, EngineError> {
    let ids = encode_word(g, word)?;
    let mut search =
        WitnessSearch { g, word: &ids, failed: HashSet::new(), steps: Vec::new(), visited: 0, budget: DEFAULT_BUDGET };
    if search.run(0, start.to_vec())? {
        Ok(Some(Derivation { start: start.to_vec(), steps: search.steps, word: word.to_vec() }))
    } else {
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;
    use crate::word::{self, display};

    /// Every configuration reachable from `cfg` by swaps alone.
    fn swap_class(g: &Grammar, cfg: &[Nt]) -> BTreeSet<Vec<Nt>> {
        let mut seen = BTreeSet::from([cfg.to_vec()]);
        let mut todo = vec![cfg.to_vec()];
        while let Some(c) = todo.pop() {
            for k in 0..c.len().saturating_sub(1) {
                if g.independent(c[k], c[k + 1]) {
                    let mut d = c.clone();
                    d.swap(k, k + 1);
                    if seen.insert(d.clone()) {
                        todo.push(d);
                    }
                }
            }
        }
        seen
    }

    #[test]
    fn canonical_matches_swap_enumeration() {
        let g = gallery::ex1();
        let cfg = g.parse_config("C\u{304} B C B\u{304}").unwrap();
        let brute = swap_class(&g, &cfg).into_iter().next().unwrap();
        assert_eq!(g.names(&brute).join(" "), "B B\u{304} C\u{304} C");
        assert_eq!(canonical(&g, &cfg).symbols(), &brute[..]);
    }

    #[test]
    fn canonical_trivial_cases() {
        let g = gallery::ex1();
        assert!(canonical(&g, &[]).is_empty());
        let cfg = g.parse_config("W B P").unwrap();
        assert_eq!(canonical(&g, &cfg).symbols(), &cfg[..]);
    }

    #[test]
    fn swap_reachability() {
        let g = gallery::ex1();
        let c1 = g.parse_config("C\u{304} B C B\u{304}").unwrap();
        let c2 = g.parse_config("B C\u{304} B\u{304} C").unwrap();
        assert!(swap_reachable(&g, &c1, &c2));
        assert!(swap_reachable(&g, &c1, &c1));
        let dep = gallery::l3_cfg();
        let bc = dep.parse_config("S Y").unwrap();
        let cb = dep.parse_config("Y S").unwrap();
        assert!(!swap_reachable(&dep, &bc, &cb));
    }

    #[test]
    fn successors_of_start() {
        let g = gallery::ex1();
        let succ = successors(&g, &[g.start()]);
        let shown: Vec<(String, String)> = succ.iter().map(|(a, c)| (a.to_string(), c.format(&g))).collect();
        let expected = canonical(&g, &g.parse_config("W B C B\u{304}").unwrap()).format(&g);
        assert_eq!(shown, vec![("a".to_string(), expected)]);
    }

    #[test]
    fn successors_fire_minimal_occurrences() {
        let g = gallery::ex1();
        let cfg = g.parse_config("C\u{304} B C B\u{304}").unwrap();
        let succ = successors(&g, &cfg);
        let c_bar = (Letter::new("c\u{304}"), canonical(&g, &g.parse_config("B C B\u{304}").unwrap()));
        let b = (Letter::new("b"), canonical(&g, &g.parse_config("C\u{304} C B\u{304}").unwrap()));
        assert!(succ.contains(&c_bar));
        assert!(succ.contains(&b));
        // Brute force over swap sequences: fire whatever reaches the head.
        let mut brute = BTreeSet::new();
        for c in swap_class(&g, &cfg) {
            for &pid in g.productions_of(c[0]) {
                brute.insert((g.letter(g.production(pid).letter).clone(), canonical(&g, &fire(&g, &c, 0, pid))));
            }
        }
        assert_eq!(succ, brute);
        assert!(successors(&g, &[]).is_empty());
    }

    #[test]
    fn membership_examples() {
        let ex1 = gallery::ex1();
        let ex2 = gallery::ex2();
        assert!(member(&ex1, &word::parse("a a\u{304} b b\u{304} c\u{304} c")).unwrap());
        assert!(member(&ex2, &word::parse("absccab")).unwrap());
        assert!(!member(&ex1, &word::parse("ab")).unwrap());
        assert_eq!(member(&ex1, &[]), Err(EngineError::EmptyWord));
        assert_eq!(member(&ex2, &word::parse("axb")), Err(EngineError::UnknownLetter(Letter::new("x"))));
    }

    #[test]
    fn budget_exhaustion_is_not_false() {
        let ex2 = gallery::ex2();
        let w = word::parse("ababsccccbaba");
        assert!(matches!(member_with_budget(&ex2, &w, 1), Err(EngineError::BudgetExhausted { .. })));
        assert!(matches!(enumerate_with_budget(&ex2, 10, 5), Err(EngineError::BudgetExhausted { .. })));
    }

    #[test]
    fn enumerate_example_one_to_six() {
        let g = gallery::ex1();
        let words: Vec<String> = enumerate(&g, 6).unwrap().iter().map(|w| display(w)).collect();
        let expected: Vec<String> = [
            "a a\u{304} b b\u{304} c\u{304} c",
            "a a\u{304} b c\u{304} b\u{304} c",
            "a a\u{304} b c\u{304} c b\u{304}",
            "a a\u{304} c\u{304} b b\u{304} c",
            "a a\u{304} c\u{304} b c b\u{304}",
            "a a\u{304} c\u{304} c b b\u{304}",
        ]
        .iter()
        .map(|s| display(&word::parse(s)))
        .collect();
        assert_eq!(words, expected);
    }

    #[test]
    fn enumerate_example_two_to_four() {
        let g = gallery::ex2();
        let words: Vec<String> = enumerate(&g, 4).unwrap().iter().map(|w| display(w)).collect();
        assert_eq!(words, vec!["s", "asca", "bscb"]);
        assert!(enumerate(&g, 0).unwrap().is_empty());
    }

    #[test]
    fn witness_for_example_two() {
        let g = gallery::ex2();
        let d = derive_witness(&g, &word::parse("absccab")).unwrap().unwrap();
        assert_eq!(d.production_steps(), 7);
        assert!(d.swap_steps() >= 1);
        let trail = d.replay(&g).unwrap();
        assert!(trail.last().unwrap().is_empty());
        assert_eq!(derive_witness(&g, &word::parse("abab")).unwrap(), None);
    }

    #[test]
    fn hand_written_example_one_derivation_replays() {
        let g = gallery::ex1();
        let pid = |lhs: &str, letter: &str| {
            let nt = g.nt(lhs).unwrap();
            *g.productions_of(nt).iter().find(|&&p| g.letter(g.production(p).letter).as_str() == letter).unwrap()
        };
        // P -a-> W B C B̄ -ā-> C̄ B C B̄ -> C̄ B B̄ C -> B C̄ B̄ C -> B B̄ C̄ C -b-> ... -c-> ε
        let d = Derivation {
            start: vec![g.start()],
            steps: vec![
                Step::Produce(pid("P", "a")),
                Step::Produce(pid("W", "a\u{304}")),
                Step::Swap(2),
                Step::Swap(0),
                Step::Swap(1),
                Step::Produce(pid("B", "b")),
                Step::Produce(pid("B\u{304}", "b\u{304}")),
                Step::Produce(pid("C\u{304}", "c\u{304}")),
                Step::Produce(pid("C", "c")),
            ],
            word: word::parse("a a\u{304} b b\u{304} c\u{304} c"),
        };
        let trail = d.replay(&g).unwrap();
        assert_eq!(trail.len(), 10);
        assert_eq!(g.names(&trail[5]).join(" "), "B B\u{304} C\u{304} C");
        let found = derive_witness(&g, &d.word).unwrap().unwrap();
        assert_eq!(found.production_steps(), 6);
        assert_eq!(found.swap_steps(), 3);
        assert!(found.replay(&g).is_ok());
    }

    #[test]
    fn replay_rejects_bad_steps() {
        let g = gallery::ex2();
        let mut d = derive_witness(&g, &word::parse("absccab")).unwrap().unwrap();
        let swap_at = d.steps.iter().position(|s| matches!(s, Step::Swap(_))).unwrap();
        d.steps[swap_at] = Step::Swap(40);
        assert!(matches!(d.replay(&g), Err(DerivationError::InvalidStep { step, .. }) if step == swap_at));
    }
}
