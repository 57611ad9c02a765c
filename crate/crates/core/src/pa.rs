//! PA grammars: Greibach productions whose right-hand sides are terms
//! built with sequential (`;`) and parallel (`||`) composition.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use thiserror::Error;

use crate::grammar::{is_nonterminal_name, Nt};
use crate::pcg::{format_letter, split_arrow, strip_comment};
use crate::word::{Letter, Word};

/// Terms up to associativity, commutativity of `||` and neutrality of the
/// empty term. The derived order sorts `Par` children.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum PaTerm {
    Empty,
    Atom(Nt),
    Seq(Vec<PaTerm>),
    Par(Vec<PaTerm>),
}

impl PaTerm {
    pub fn seq(parts: Vec<PaTerm>) -> PaTerm {
        normalize(&PaTerm::Seq(parts))
    }

    pub fn par(parts: Vec<PaTerm>) -> PaTerm {
        normalize(&PaTerm::Par(parts))
    }

    /// Number of atoms: a lower bound on the length of any word it yields.
    pub fn atoms(&self) -> usize {
        match self {
            PaTerm::Empty => 0,
            PaTerm::Atom(_) => 1,
            PaTerm::Seq(v) | PaTerm::Par(v) => v.iter().map(PaTerm::atoms).sum(),
        }
    }

    pub fn format(&self, g: &PaGrammar) -> String {
        match self {
            PaTerm::Empty => "eps".into(),
            PaTerm::Atom(x) => g.name(*x).to_string(),
            PaTerm::Seq(v) => v
                .iter()
                .map(|t| if matches!(t, PaTerm::Par(_)) { format!("({})", t.format(g)) } else { t.format(g) })
                .collect::<Vec<_>>()
                .join(" ; "),
            PaTerm::Par(v) => v.iter().map(|t| t.format(g)).collect::<Vec<_>>().join(" || "),
        }
    }
}

pub fn normalize(t: &PaTerm) -> PaTerm {
    match t {
        PaTerm::Empty | PaTerm::Atom(_) => t.clone(),
        PaTerm::Seq(v) | PaTerm::Par(v) => {
            let is_seq = matches!(t, PaTerm::Seq(_));
            let mut flat = Vec::new();
            for child in v.iter().map(normalize) {
                match child {
                    PaTerm::Empty => {}
                    PaTerm::Seq(inner) if is_seq => flat.extend(inner),
                    PaTerm::Par(inner) if !is_seq => flat.extend(inner),
                    other => flat.push(other),
                }
            }
            if !is_seq {
                flat.sort();
            }
            match flat.len() {
                0 => PaTerm::Empty,
                1 => flat.pop().expect("one child"),
                _ if is_seq => PaTerm::Seq(flat),
                _ => PaTerm::Par(flat),
            }
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PaProduction {
    pub lhs: Nt,
    pub letter: Letter,
    pub term: PaTerm,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PaGrammar {
    names: Vec<String>,
    start: Nt,
    productions: Vec<PaProduction>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PaError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing `start:` line")]
    MissingStart,
    #[error("undeclared non-terminal `{0}`")]
    Undeclared(String),
    #[error("unproductive: {0}")]
    Unproductive(String),
    #[error("letter clashes with a non-terminal name: {0}")]
    LetterClash(String),
    #[error("the empty word is never generated")]
    EmptyWord,
    #[error("letter `{0}` is not in the alphabet")]
    UnknownLetter(Letter),
}

/// A term over non-terminal names, before indexing.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum RawTerm {
    Empty,
    Atom(String),
    Seq(Vec<RawTerm>),
    Par(Vec<RawTerm>),
}

impl RawTerm {
    fn atoms<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            RawTerm::Empty => {}
            RawTerm::Atom(s) => out.push(s),
            RawTerm::Seq(v) | RawTerm::Par(v) => v.iter().for_each(|t| t.atoms(out)),
        }
    }
}

impl PaGrammar {
    pub fn new(start: &str, productions: Vec<(String, String, RawTerm)>) -> Result<PaGrammar, PaError> {
        let declared: BTreeSet<&str> = productions.iter().map(|p| p.0.as_str()).collect();
        if !declared.contains(start) {
            return Err(PaError::Undeclared(start.to_string()));
        }
        for (_, letter, term) in &productions {
            if declared.contains(letter.as_str()) {
                return Err(PaError::LetterClash(letter.clone()));
            }
            let mut atoms = Vec::new();
            term.atoms(&mut atoms);
            if let Some(bad) = atoms.iter().find(|a| !declared.contains(**a)) {
                return Err(PaError::Undeclared(bad.to_string()));
            }
        }
        let mut productive: BTreeSet<&str> = BTreeSet::new();
        loop {
            let before = productive.len();
            for (lhs, _, term) in &productions {
                let mut atoms = Vec::new();
                term.atoms(&mut atoms);
                if atoms.iter().all(|a| productive.contains(a)) {
                    productive.insert(lhs);
                }
            }
            if productive.len() == before {
                break;
            }
        }
        if let Some(bad) = declared.iter().find(|d| !productive.contains(*d)) {
            return Err(PaError::Unproductive(bad.to_string()));
        }
        let names: Vec<String> = declared.iter().map(|s| s.to_string()).collect();
        let index: BTreeMap<&str, Nt> = declared.iter().enumerate().map(|(i, s)| (*s, Nt(i as u32))).collect();
        fn convert(t: &RawTerm, index: &BTreeMap<&str, Nt>) -> PaTerm {
            match t {
                RawTerm::Empty => PaTerm::Empty,
                RawTerm::Atom(s) => PaTerm::Atom(index[s.as_str()]),
                RawTerm::Seq(v) => PaTerm::Seq(v.iter().map(|t| convert(t, index)).collect()),
                RawTerm::Par(v) => PaTerm::Par(v.iter().map(|t| convert(t, index)).collect()),
            }
        }
        let productions = productions
            .iter()
            .map(|(lhs, letter, term)| PaProduction {
                lhs: index[lhs.as_str()],
                letter: Letter::new(letter),
                term: normalize(&convert(term, &index)),
            })
            .collect();
        Ok(PaGrammar { start: index[start], names, productions })
    }

    pub fn start(&self) -> Nt {
        self.start
    }

    pub fn name(&self, nt: Nt) -> &str {
        &self.names[nt.0 as usize]
    }

    pub fn nt(&self, name: &str) -> Option<Nt> {
        self.names.binary_search_by(|n| n.as_str().cmp(name)).ok().map(|i| Nt(i as u32))
    }

    pub fn productions(&self) -> &[PaProduction] {
        &self.productions
    }

    pub fn alphabet(&self) -> BTreeSet<Letter> {
        self.productions.iter().map(|p| p.letter.clone()).collect()
    }
}

/// Every `(letter, successor)` reachable by one step. Enabled atoms are the
/// atom itself, those of the first component of a sequence, and those of
/// every component of a parallel composition.
pub fn pa_successors(g: &PaGrammar, term: &PaTerm) -> BTreeSet<(Letter, PaTerm)> {
    steps(g, term).into_iter().collect()
}

fn steps(g: &PaGrammar, term: &PaTerm) -> Vec<(Letter, PaTerm)> {
    match term {
        PaTerm::Empty => Vec::new(),
        PaTerm::Atom(x) => {
            g.productions.iter().filter(|p| p.lhs == *x).map(|p| (p.letter.clone(), p.term.clone())).collect()
        }
        PaTerm::Seq(v) => steps(g, &v[0])
            .into_iter()
            .map(|(a, t)| {
                let mut parts = vec![t];
                parts.extend(v[1..].iter().cloned());
                (a, PaTerm::seq(parts))
            })
            .collect(),
        PaTerm::Par(v) => {
            let mut out = Vec::new();
            for i in 0..v.len() {
                for (a, t) in steps(g, &v[i]) {
                    let mut parts = v.clone();
                    parts[i] = t;
                    out.push((a, PaTerm::par(parts)));
                }
            }
            out
        }
    }
}

pub fn pa_member(g: &PaGrammar, word: &[Letter]) -> Result<bool, PaError> {
    if word.is_empty() {
        return Err(PaError::EmptyWord);
    }
    let alphabet = g.alphabet();
    if let Some(l) = word.iter().find(|l| !alphabet.contains(*l)) {
        return Err(PaError::UnknownLetter(l.clone()));
    }
    fn run(g: &PaGrammar, word: &[Letter], pos: usize, t: PaTerm, failed: &mut HashSet<(usize, PaTerm)>) -> bool {
        let remaining = word.len() - pos;
        if t == PaTerm::Empty {
            return remaining == 0;
        }
        if t.atoms() > remaining {
            return false;
        }
        let key = (pos, t);
        if failed.contains(&key) {
            return false;
        }
        for (a, next) in steps(g, &key.1) {
            if a == word[pos] && run(g, word, pos + 1, next, failed) {
                return true;
            }
        }
        failed.insert(key);
        false
    }
    Ok(run(g, word, 0, PaTerm::Atom(g.start), &mut HashSet::new()))
}

/// Generated words of length at most `max_len`, in shortlex order.
pub fn pa_enumerate(g: &PaGrammar, max_len: usize) -> Vec<Word> {
    let mut found: BTreeSet<(usize, Word)> = BTreeSet::new();
    let mut frontier: HashSet<(Word, PaTerm)> = HashSet::new();
    if max_len > 0 {
        frontier.insert((Vec::new(), PaTerm::Atom(g.start)));
    }
    while !frontier.is_empty() {
        let mut next_frontier = HashSet::new();
        for (prefix, t) in &frontier {
            for (a, next) in steps(g, t) {
                if prefix.len() + 1 + next.atoms() > max_len {
                    continue;
                }
                let mut w = prefix.clone();
                w.push(a);
                if next == PaTerm::Empty {
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

/// Parses a term: `||` binds loosest, then `;`; parentheses group.
pub fn parse_term(text: &str) -> Result<RawTerm, String> {
    let mut tokens = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == '(' || c == ')' || c == ';' {
            tokens.push(c.to_string());
            chars.next();
        } else if c == '|' {
            chars.next();
            if chars.next().map(|x| x.1) != Some('|') {
                return Err(format!("expected `||` at offset {i}"));
            }
            tokens.push("||".into());
        } else {
            let mut end = text.len();
            while let Some(&(j, d)) = chars.peek() {
                if d.is_whitespace() || "();|".contains(d) {
                    end = j;
                    break;
                }
                chars.next();
            }
            tokens.push(text[i..end].to_string());
        }
    }
    let mut pos = 0;
    let t = parse_par(&tokens, &mut pos)?;
    if pos != tokens.len() {
        return Err(format!("unexpected `{}`", tokens[pos]));
    }
    Ok(t)
}

fn parse_par(tokens: &[String], pos: &mut usize) -> Result<RawTerm, String> {
    let mut parts = vec![parse_seq(tokens, pos)?];
    while tokens.get(*pos).map(String::as_str) == Some("||") {
        *pos += 1;
        parts.push(parse_seq(tokens, pos)?);
    }
    Ok(if parts.len() == 1 { parts.pop().expect("one part") } else { RawTerm::Par(parts) })
}

fn parse_seq(tokens: &[String], pos: &mut usize) -> Result<RawTerm, String> {
    let mut parts = vec![parse_atom(tokens, pos)?];
    while tokens.get(*pos).map(String::as_str) == Some(";") {
        *pos += 1;
        parts.push(parse_atom(tokens, pos)?);
    }
    Ok(if parts.len() == 1 { parts.pop().expect("one part") } else { RawTerm::Seq(parts) })
}

fn parse_atom(tokens: &[String], pos: &mut usize) -> Result<RawTerm, String> {
    let tok = tokens.get(*pos).ok_or("unexpected end of term")?;
    *pos += 1;
    match tok.as_str() {
        "(" => {
            let t = parse_par(tokens, pos)?;
            if tokens.get(*pos).map(String::as_str) != Some(")") {
                return Err("missing `)`".into());
            }
            *pos += 1;
            Ok(t)
        }
        "eps" | "ε" => Ok(RawTerm::Empty),
        s if is_nonterminal_name(s) => Ok(RawTerm::Atom(s.to_string())),
        s => Err(format!("unexpected `{s}`")),
    }
}

/// Parses the `.pag` text format.
pub fn parse(text: &str) -> Result<PaGrammar, PaError> {
    let mut start = None;
    let mut productions = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = strip_comment(line).trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("start:") {
            start = Some(rest.trim().to_string());
            continue;
        }
        let syntax = |message: String| PaError::Syntax { line: lineno, message };
        let (lhs, letter, rest) =
            split_arrow(line).ok_or_else(|| syntax(format!("cannot parse production `{line}`")))?;
        let term = if rest.trim().is_empty() { RawTerm::Empty } else { parse_term(rest).map_err(syntax)? };
        productions.push((lhs.to_string(), letter, term));
    }
    PaGrammar::new(&start.ok_or(PaError::MissingStart)?, productions)
}

pub fn print(g: &PaGrammar) -> String {
    let mut out = format!("start: {}\n", g.name(g.start));
    for p in &g.productions {
        out.push_str(&format!("{} -{}-> {}\n", g.name(p.lhs), format_letter(p.letter.as_str()), p.term.format(g)));
    }
    out
}
