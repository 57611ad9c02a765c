//! Stateless multi-pushdown automata and their translation to and from
//! grammars with transitive dependence.
//!
//! A transition `X -a-> α1 ; ... ; αk` reads `a`, pops `X` from the stack
//! that owns it and pushes `αi` on stack `i`. Acceptance is by empty stacks.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use thiserror::Error;

use crate::grammar::{threads, Grammar, GrammarError, NonTransitive, RawGrammar, RawProduction};
use crate::pcg::{format_letter, split_arrow, strip_comment};
use crate::word::{Letter, Word};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Transition {
    pub pop: String,
    pub letter: Letter,
    /// One push sequence per stack, leftmost symbol on top.
    pub push: Vec<Vec<String>>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Mpda {
    stacks: Vec<Vec<String>>,
    initial: String,
    transitions: Vec<Transition>,
    home: BTreeMap<String, usize>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MpdaError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("symbol `{0}` belongs to more than one stack")]
    SharedSymbol(String),
    #[error("symbol `{0}` is not in any stack alphabet")]
    UnknownSymbol(String),
    #[error("transition #{index} pushes `{symbol}` on stack {stack}, which does not own it")]
    WrongStack { index: usize, symbol: String, stack: usize },
    #[error("transition #{index} has {found} push sequences for {expected} stacks")]
    Arity { index: usize, expected: usize, found: usize },
    #[error("the initial symbol `{0}` generates no word")]
    UnproductiveInitial(String),
    #[error("letter `{0}` is not in the alphabet")]
    UnknownLetter(Letter),
    #[error(transparent)]
    NotTransitive(#[from] NonTransitive),
    #[error(transparent)]
    Grammar(#[from] GrammarError),
}

/// Automaton configuration: one stack per thread, top at the front.
pub type MpdaConfig = Vec<Vec<String>>;

impl Mpda {
    pub fn new(stacks: Vec<Vec<String>>, initial: String, transitions: Vec<Transition>) -> Result<Mpda, MpdaError> {
        let mut home = BTreeMap::new();
        for (i, alphabet) in stacks.iter().enumerate() {
            for s in alphabet {
                if home.insert(s.clone(), i).is_some() {
                    return Err(MpdaError::SharedSymbol(s.clone()));
                }
            }
        }
        if !home.contains_key(&initial) {
            return Err(MpdaError::UnknownSymbol(initial));
        }
        for (index, t) in transitions.iter().enumerate() {
            if !home.contains_key(&t.pop) {
                return Err(MpdaError::UnknownSymbol(t.pop.clone()));
            }
            if t.push.len() != stacks.len() {
                return Err(MpdaError::Arity { index, expected: stacks.len(), found: t.push.len() });
            }
            for (stack, seq) in t.push.iter().enumerate() {
                for symbol in seq {
                    match home.get(symbol) {
                        None => return Err(MpdaError::UnknownSymbol(symbol.clone())),
                        Some(&h) if h != stack => {
                            return Err(MpdaError::WrongStack { index, symbol: symbol.clone(), stack: stack + 1 })
                        }
                        _ => {}
                    }
                }
            }
        }
        Ok(Mpda { stacks, initial, transitions, home })
    }

    pub fn stack_count(&self) -> usize {
        self.stacks.len()
    }

    pub fn stack_alphabets(&self) -> &[Vec<String>] {
        &self.stacks
    }

    pub fn initial(&self) -> &str {
        &self.initial
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    /// Index of the stack that owns `symbol`.
    pub fn home(&self, symbol: &str) -> Option<usize> {
        self.home.get(symbol).copied()
    }

    pub fn alphabet(&self) -> BTreeSet<Letter> {
        self.transitions.iter().map(|t| t.letter.clone()).collect()
    }

    pub fn initial_config(&self) -> MpdaConfig {
        let mut c = vec![Vec::new(); self.stacks.len()];
        c[self.home[&self.initial]].push(self.initial.clone());
        c
    }

    /// Every `(letter, successor)` pair, stacks scanned in order and
    /// transitions in file order.
    pub fn steps(&self, config: &MpdaConfig) -> Vec<(Letter, MpdaConfig)> {
        let mut out = Vec::new();
        for (i, stack) in config.iter().enumerate() {
            let Some(top) = stack.first() else { continue };
            for t in self.transitions.iter().filter(|t| &t.pop == top) {
                let mut next = config.clone();
                next[i].remove(0);
                for (j, seq) in t.push.iter().enumerate() {
                    next[j].splice(0..0, seq.iter().cloned());
                }
                out.push((t.letter.clone(), next));
            }
        }
        out
    }

    pub fn format_transition(&self, t: &Transition) -> String {
        let push: Vec<String> =
            t.push.iter().map(|s| if s.is_empty() { "eps".to_string() } else { s.join(" ") }).collect();
        format!("{} -{}-> {}", t.pop, format_letter(t.letter.as_str()), push.join(" ; "))
    }
}

fn size(c: &MpdaConfig) -> usize {
    c.iter().map(Vec::len).sum()
}

/// Acceptance by empty stacks after reading `word`.
pub fn accepts(m: &Mpda, word: &[Letter]) -> Result<bool, MpdaError> {
    let alphabet = m.alphabet();
    if let Some(l) = word.iter().find(|l| !alphabet.contains(*l)) {
        return Err(MpdaError::UnknownLetter(l.clone()));
    }
    fn run(m: &Mpda, word: &[Letter], pos: usize, c: MpdaConfig, failed: &mut HashSet<(usize, MpdaConfig)>) -> bool {
        let remaining = word.len() - pos;
        if size(&c) == 0 {
            return remaining == 0;
        }
        if size(&c) > remaining {
            return false;
        }
        let key = (pos, c);
        if failed.contains(&key) {
            return false;
        }
        for (l, next) in m.steps(&key.1) {
            if l == word[pos] && run(m, word, pos + 1, next, failed) {
                return true;
            }
        }
        failed.insert(key);
        false
    }
    Ok(run(m, word, 0, m.initial_config(), &mut HashSet::new()))
}

/// Accepted words of length at most `max_len`, in shortlex order.
pub fn enumerate_mpda(m: &Mpda, max_len: usize) -> Vec<Word> {
    let mut found: BTreeSet<(usize, Word)> = BTreeSet::new();
    let mut frontier: HashSet<(Word, MpdaConfig)> = HashSet::new();
    if max_len > 0 {
        frontier.insert((Vec::new(), m.initial_config()));
    }
    while !frontier.is_empty() {
        let mut next_frontier = HashSet::new();
        for (prefix, c) in &frontier {
            for (l, next) in m.steps(c) {
                if prefix.len() + 1 + size(&next) > max_len {
                    continue;
                }
                let mut w = prefix.clone();
                w.push(l);
                if size(&next) == 0 {
                    found.insert((w.len(), w));
                } else {
                    next_frontier.insert((w, next));
                }
            }
        }
        frontier = next_frontier;
    }
    found.into_iter().map(|(_, w)| w).collect()
}

/// One stack per thread; each production becomes a transition pushing the
/// projections of its right-hand side onto the threads.
pub fn from_transitive_grammar(g: &Grammar) -> Result<Mpda, MpdaError> {
    let tp = threads(g)?;
    let stacks: Vec<Vec<String>> =
        tp.blocks.iter().map(|b| b.iter().map(|&nt| g.name(nt).to_string()).collect()).collect();
    let transitions = g
        .productions()
        .iter()
        .map(|p| {
            let mut push = vec![Vec::new(); stacks.len()];
            for &nt in &p.rhs {
                push[tp.thread_of(nt)].push(g.name(nt).to_string());
            }
            Transition { pop: g.name(p.lhs).to_string(), letter: g.letter(p.letter).clone(), push }
        })
        .collect();
    Mpda::new(stacks, g.name(g.start()).to_string(), transitions)
}

/// Symbols of different stacks become independent non-terminals. Symbols
/// that generate no word are dropped, since grammars require productivity.
pub fn to_grammar(m: &Mpda) -> Result<Grammar, MpdaError> {
    let mut productive: BTreeSet<&str> = BTreeSet::new();
    loop {
        let before = productive.len();
        for t in &m.transitions {
            if t.push.iter().flatten().all(|s| productive.contains(s.as_str())) {
                productive.insert(t.pop.as_str());
            }
        }
        if productive.len() == before {
            break;
        }
    }
    if !productive.contains(m.initial.as_str()) {
        return Err(MpdaError::UnproductiveInitial(m.initial.clone()));
    }
    let mut raw = RawGrammar { start: m.initial.clone(), ..RawGrammar::default() };
    for t in &m.transitions {
        if t.push.iter().flatten().chain([&t.pop]).all(|s| productive.contains(s.as_str())) {
            raw.productions.push(RawProduction {
                lhs: t.pop.clone(),
                letter: t.letter.to_string(),
                rhs: t.push.iter().flatten().cloned().collect(),
            });
        }
    }
    let used: BTreeSet<&str> = raw.productions.iter().map(|p| p.lhs.as_str()).collect();
    for x in &used {
        for y in &used {
            if x < y && m.home[*x] != m.home[*y] {
                raw.independence.push((x.to_string(), y.to_string()));
            }
        }
    }
    Ok(Grammar::from_raw(&raw)?)
}

/// Parses the `.mpda` text format.
pub fn parse(text: &str) -> Result<Mpda, MpdaError> {
    let syntax = |line: usize, message: String| MpdaError::Syntax { line, message };
    let mut k: Option<usize> = None;
    let mut stacks: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    let mut initial = None;
    let mut transitions = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = strip_comment(line).trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("stacks:") {
            k = Some(rest.trim().parse().map_err(|_| syntax(lineno, "expected a stack count".into()))?);
        } else if let Some(rest) = line.strip_prefix("initial:") {
            initial = Some(rest.trim().to_string());
        } else if let Some(rest) = line.strip_prefix("stack ") {
            let (num, symbols) =
                rest.split_once(':').ok_or_else(|| syntax(lineno, "expected `stack i: ...`".into()))?;
            let i: usize = num.trim().parse().map_err(|_| syntax(lineno, format!("bad stack number `{num}`")))?;
            if i == 0 {
                return Err(syntax(lineno, "stacks are numbered from 1".into()));
            }
            stacks.insert(i, symbols.split_whitespace().map(str::to_string).collect());
        } else {
            let (lhs, letter, rest) =
                split_arrow(line).ok_or_else(|| syntax(lineno, format!("cannot parse transition `{line}`")))?;
            let push = rest
                .split(';')
                .map(|seq| seq.split_whitespace().filter(|s| *s != "eps" && *s != "ε").map(str::to_string).collect())
                .collect();
            transitions.push(Transition { pop: lhs.to_string(), letter: Letter::new(letter), push });
        }
    }
    let k = k.ok_or_else(|| syntax(0, "missing `stacks:` line".into()))?;
    let initial = initial.ok_or_else(|| syntax(0, "missing `initial:` line".into()))?;
    let alphabets: Vec<Vec<String>> = (1..=k).map(|i| stacks.remove(&i).unwrap_or_default()).collect();
    if let Some((&i, _)) = stacks.iter().next() {
        return Err(syntax(0, format!("stack {i} exceeds the declared count {k}")));
    }
    Mpda::new(alphabets, initial, transitions)
}

pub fn print(m: &Mpda) -> String {
    let mut out = format!("stacks: {}\n", m.stacks.len());
    for (i, s) in m.stacks.iter().enumerate() {
        out.push_str(&format!("stack {}: {}\n", i + 1, s.join(" ")));
    }
    out.push_str(&format!("initial: {}\n", m.initial));
    for t in &m.transitions {
        out.push_str(&m.format_transition(t));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::enumerate;
    use crate::gallery;
    use crate::word::parse as word;

    #[test]
    fn example_two_automaton() {
        let m = from_transitive_grammar(&gallery::ex2()).unwrap();
        assert_eq!(m.stack_count(), 3);
        assert_eq!(m.stack_alphabets()[0], vec!["A", "B", "S"]);
        let shown: Vec<String> = m.transitions().iter().map(|t| m.format_transition(t)).collect();
        assert!(shown.contains(&"S -a-> S A ; eps ; eps".to_string()));
        assert!(shown.contains(&"A -c-> eps ; A' ; eps".to_string()));
        assert!(shown.contains(&"A' -a-> eps ; eps ; eps".to_string()));
        assert!(accepts(&m, &word("absccab")).unwrap());
        assert!(accepts(&m, &word("s")).unwrap());
        assert!(!accepts(&m, &[]).unwrap());
        assert!(matches!(accepts(&m, &word("x")), Err(MpdaError::UnknownLetter(_))));
    }

    #[test]
    fn example_one_is_rejected() {
        let g = gallery::ex1();
        match from_transitive_grammar(&g) {
            Err(MpdaError::NotTransitive(w)) => assert_eq!(w.names(&g), ("B", "P", "C")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn single_thread_is_a_pushdown() {
        let g = gallery::l3_cfg();
        let m = from_transitive_grammar(&g).unwrap();
        assert_eq!(m.stack_count(), 1);
        for (t, p) in m.transitions().iter().zip(g.productions()) {
            assert_eq!(t.push[0], g.names(&p.rhs));
        }
        let back = to_grammar(&m).unwrap();
        assert!(back.independence().is_empty());
    }

    #[test]
    fn round_trips() {
        let g = gallery::ex2();
        let m = from_transitive_grammar(&g).unwrap();
        assert_eq!(enumerate_mpda(&m, 8), enumerate(&g, 8).unwrap());
        assert_eq!(enumerate(&to_grammar(&m).unwrap(), 8).unwrap(), enumerate(&g, 8).unwrap());
        assert_eq!(parse(&print(&m)).unwrap(), m);
    }

    #[test]
    fn idle_stack_becomes_its_own_thread() {
        let text = "stacks: 2\nstack 1: S\nstack 2: Z\ninitial: S\nS -a-> eps ; eps\nZ -z-> eps ; eps\n";
        let m = parse(text).unwrap();
        let g = to_grammar(&m).unwrap();
        let tp = threads(&g).unwrap();
        assert_eq!(tp.format(&g), "{S} {Z}");
    }

    #[test]
    fn malformed_automata() {
        assert!(matches!(parse("stacks: 1\nstack 1: S\ninitial: S\nS -a-> eps ; eps\n"), Err(MpdaError::Arity { .. })));
        assert!(matches!(
            parse("stacks: 2\nstack 1: S\nstack 2: T\ninitial: S\nS -a-> T ; eps\nT -b-> eps ; eps\n"),
            Err(MpdaError::WrongStack { .. })
        ));
        assert!(matches!(parse("stacks: 2\nstack 1: S\nstack 2: S\ninitial: S\n"), Err(MpdaError::SharedSymbol(_))));
        let loop_only = parse("stacks: 1\nstack 1: S\ninitial: S\nS -a-> S\n").unwrap();
        assert!(matches!(to_grammar(&loop_only), Err(MpdaError::UnproductiveInitial(_))));
    }
}
