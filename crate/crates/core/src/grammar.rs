//! Greibach grammars with an independence relation over non-terminals.
//!
//! A grammar is first described by a [`RawGrammar`] (plain names, as read
//! from a file or assembled by a construction). [`validate`] reports every
//! problem with a raw grammar; [`Grammar::from_raw`] builds the indexed form
//! only when there are none.
//!
//! Non-terminals and letters are indexed in name order, so comparing ids is
//! comparing names. Every downstream canonical form relies on this.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::word::{Letter, Word};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Nt(pub u32);

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct LetterId(pub u32);

/// Index of a production in file order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ProdId(pub usize);

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Production {
    pub lhs: Nt,
    pub letter: LetterId,
    pub rhs: Vec<Nt>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RawProduction {
    pub lhs: String,
    pub letter: String,
    pub rhs: Vec<String>,
}

impl RawProduction {
    pub fn new(lhs: &str, letter: &str, rhs: &[&str]) -> Self {
        RawProduction {
            lhs: lhs.to_string(),
            letter: letter.to_string(),
            rhs: rhs.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct RawGrammar {
    pub start: String,
    pub productions: Vec<RawProduction>,
    /// Unordered pairs; `(x, y)` and `(y, x)` mean the same thing.
    pub independence: Vec<(String, String)>,
    /// Shorthand for "every pair of distinct non-terminals".
    pub all_independent: bool,
    /// Optional declared threads, checked against the computed ones.
    pub threads: Option<Vec<Vec<String>>>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Diagnostic {
    UndeclaredSymbol { symbol: String, context: String },
    ReflexivePair { symbol: String },
    NonGreibach { production: usize, reason: String },
    LetterClash { letter: String },
    Unproductive { symbol: String },
    ThreadMismatch { declared: String, computed: String },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::UndeclaredSymbol { symbol, context } => {
                write!(f, "undeclared symbol: {symbol} ({context})")
            }
            Diagnostic::ReflexivePair { symbol } => write!(f, "reflexive pair: {{{symbol},{symbol}}}"),
            Diagnostic::NonGreibach { production, reason } => {
                write!(f, "non-Greibach production #{production}: {reason}")
            }
            Diagnostic::LetterClash { letter } => {
                write!(f, "letter clashes with a non-terminal name: {letter}")
            }
            Diagnostic::Unproductive { symbol } => write!(f, "unproductive: {symbol}"),
            Diagnostic::ThreadMismatch { declared, computed } => {
                write!(f, "declared threads {declared} differ from computed threads {computed}")
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrammarError {
    #[error("invalid grammar: {}", join_diagnostics(.0))]
    Invalid(Vec<Diagnostic>),
}

fn join_diagnostics(d: &[Diagnostic]) -> String {
    d.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; ")
}

/// Non-terminal names start with an uppercase character.
pub fn is_nonterminal_name(s: &str) -> bool {
    s.chars().next().is_some_and(char::is_uppercase)
}

fn is_empty_label(s: &str) -> bool {
    s.is_empty() || s == "eps" || s == "ε"
}

/// Reports every violated grammar invariant. An empty result means
/// [`Grammar::from_raw`] will succeed.
pub fn validate(raw: &RawGrammar) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let declared: BTreeSet<&str> = raw.productions.iter().map(|p| p.lhs.as_str()).collect();

    if !declared.contains(raw.start.as_str()) {
        diags.push(Diagnostic::UndeclaredSymbol { symbol: raw.start.clone(), context: "start symbol".into() });
    }

    for (i, p) in raw.productions.iter().enumerate() {
        if !is_nonterminal_name(&p.lhs) {
            diags.push(Diagnostic::NonGreibach {
                production: i,
                reason: format!("left-hand side `{}` is not a non-terminal", p.lhs),
            });
        }
        if is_empty_label(&p.letter) {
            diags.push(Diagnostic::NonGreibach {
                production: i,
                reason: "production must emit exactly one letter".into(),
            });
        }
        for sym in &p.rhs {
            if !is_nonterminal_name(sym) {
                diags.push(Diagnostic::NonGreibach {
                    production: i,
                    reason: format!("terminal `{sym}` in right-hand side"),
                });
            } else if !declared.contains(sym.as_str()) {
                diags.push(Diagnostic::UndeclaredSymbol {
                    symbol: sym.clone(),
                    context: format!("right-hand side of production #{i}"),
                });
            }
        }
    }

    for (x, y) in &raw.independence {
        if x == y {
            diags.push(Diagnostic::ReflexivePair { symbol: x.clone() });
        }
        for s in [x, y] {
            if !declared.contains(s.as_str()) {
                diags.push(Diagnostic::UndeclaredSymbol { symbol: s.clone(), context: "independence relation".into() });
            }
        }
    }

    let letters: BTreeSet<&str> = raw.productions.iter().map(|p| p.letter.as_str()).collect();
    for l in letters {
        if declared.contains(l) {
            diags.push(Diagnostic::LetterClash { letter: l.to_string() });
        }
    }

    // Least fixpoint: X is productive once some X-production has an
    // all-productive right-hand side.
    let mut productive: BTreeSet<&str> = BTreeSet::new();
    loop {
        let before = productive.len();
        for p in &raw.productions {
            if !productive.contains(p.lhs.as_str()) && p.rhs.iter().all(|s| productive.contains(s.as_str())) {
                productive.insert(p.lhs.as_str());
            }
        }
        if productive.len() == before {
            break;
        }
    }
    for nt in &declared {
        if !productive.contains(nt) {
            diags.push(Diagnostic::Unproductive { symbol: nt.to_string() });
        }
    }

    if diags.is_empty() {
        if let Some(declared_threads) = &raw.threads {
            let g = Grammar::build_unchecked(raw);
            let declared_blocks: BTreeSet<BTreeSet<String>> =
                declared_threads.iter().map(|b| b.iter().cloned().collect()).collect();
            let computed = threads(&g).ok().map(|tp| {
                tp.blocks
                    .iter()
                    .map(|b| b.iter().map(|nt| g.name(*nt).to_string()).collect::<BTreeSet<_>>())
                    .collect::<BTreeSet<_>>()
            });
            if computed.as_ref() != Some(&declared_blocks) {
                diags.push(Diagnostic::ThreadMismatch {
                    declared: format_blocks(declared_blocks.iter()),
                    computed: computed
                        .map(|c| format_blocks(c.iter()))
                        .unwrap_or_else(|| "none (dependence is not transitive)".into()),
                });
            }
        }
    }
    diags
}

fn format_blocks<'a>(blocks: impl Iterator<Item = &'a BTreeSet<String>>) -> String {
    blocks.map(|b| format!("{{{}}}", b.iter().cloned().collect::<Vec<_>>().join(" "))).collect::<Vec<_>>().join(" ")
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Grammar {
    nonterminals: Vec<String>,
    letters: Vec<Letter>,
    start: Nt,
    productions: Vec<Production>,
    by_lhs: Vec<Vec<ProdId>>,
    independent: Vec<bool>,
}

impl Grammar {
    pub fn from_raw(raw: &RawGrammar) -> Result<Grammar, GrammarError> {
        let diags = validate(raw);
        if diags.is_empty() {
            Ok(Grammar::build_unchecked(raw))
        } else {
            Err(GrammarError::Invalid(diags))
        }
    }

    /// Starts a programmatic grammar description.
    pub fn builder(start: &str) -> GrammarBuilder {
        GrammarBuilder { raw: RawGrammar { start: start.to_string(), ..RawGrammar::default() } }
    }

    fn build_unchecked(raw: &RawGrammar) -> Grammar {
        let names: BTreeSet<&str> = raw.productions.iter().map(|p| p.lhs.as_str()).collect();
        let nonterminals: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let nt_index: BTreeMap<&str, Nt> = names.iter().enumerate().map(|(i, s)| (*s, Nt(i as u32))).collect();
        let letter_set: BTreeSet<Letter> = raw.productions.iter().map(|p| Letter::new(&p.letter)).collect();
        let letters: Vec<Letter> = letter_set.into_iter().collect();
        let letter_index: BTreeMap<&str, LetterId> =
            letters.iter().enumerate().map(|(i, l)| (l.as_str(), LetterId(i as u32))).collect();

        let productions: Vec<Production> = raw
            .productions
            .iter()
            .map(|p| Production {
                lhs: nt_index[p.lhs.as_str()],
                letter: letter_index[p.letter.as_str()],
                rhs: p.rhs.iter().map(|s| nt_index[s.as_str()]).collect(),
            })
            .collect();
        let n = nonterminals.len();
        let mut by_lhs = vec![Vec::new(); n];
        for (i, p) in productions.iter().enumerate() {
            by_lhs[p.lhs.0 as usize].push(ProdId(i));
        }
        let mut independent = vec![false; n * n];
        if raw.all_independent {
            for i in 0..n {
                for j in 0..n {
                    independent[i * n + j] = i != j;
                }
            }
        }
        for (x, y) in &raw.independence {
            let (i, j) = (nt_index[x.as_str()].0 as usize, nt_index[y.as_str()].0 as usize);
            independent[i * n + j] = true;
            independent[j * n + i] = true;
        }
        Grammar { start: nt_index[raw.start.as_str()], nonterminals, letters, productions, by_lhs, independent }
    }

    pub fn start(&self) -> Nt {
        self.start
    }

    pub fn nonterminals(&self) -> impl ExactSizeIterator<Item = Nt> {
        (0..self.nonterminals.len() as u32).map(Nt)
    }

    pub fn nonterminal_count(&self) -> usize {
        self.nonterminals.len()
    }

    pub fn name(&self, nt: Nt) -> &str {
        &self.nonterminals[nt.0 as usize]
    }

    pub fn nt(&self, name: &str) -> Option<Nt> {
        self.nonterminals.binary_search_by(|n| n.as_str().cmp(name)).ok().map(|i| Nt(i as u32))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn alphabet(&self) -> BTreeSet<Letter> {
        self.letters.iter().cloned().collect()
    }

    pub fn letter(&self, id: LetterId) -> &Letter {
        &self.letters[id.0 as usize]
    }

    pub fn letter_id(&self, letter: &Letter) -> Option<LetterId> {
        self.letters.binary_search(letter).ok().map(|i| LetterId(i as u32))
    }

    pub fn productions(&self) -> &[Production] {
        &self.productions
    }

    pub fn production(&self, id: ProdId) -> &Production {
        &self.productions[id.0]
    }

    pub fn productions_of(&self, nt: Nt) -> &[ProdId] {
        &self.by_lhs[nt.0 as usize]
    }

    pub fn independent(&self, x: Nt, y: Nt) -> bool {
        self.independent[x.0 as usize * self.nonterminals.len() + y.0 as usize]
    }

    /// Independent pairs `(x, y)` with `x < y`.
    pub fn independence(&self) -> BTreeSet<(Nt, Nt)> {
        let mut out = BTreeSet::new();
        for x in self.nonterminals() {
            for y in self.nonterminals() {
                if x < y && self.independent(x, y) {
                    out.insert((x, y));
                }
            }
        }
        out
    }

    /// Translates letters to ids; the first unknown letter is returned as error.
    pub fn encode(&self, w: &[Letter]) -> Result<Vec<LetterId>, Letter> {
        w.iter().map(|l| self.letter_id(l).ok_or_else(|| l.clone())).collect()
    }

    pub fn decode(&self, w: &[LetterId]) -> Word {
        w.iter().map(|&l| self.letter(l).clone()).collect()
    }

    pub fn names(&self, cfg: &[Nt]) -> Vec<&str> {
        cfg.iter().map(|&nt| self.name(nt)).collect()
    }

    /// Looks up a configuration given by non-terminal names.
    pub fn config(&self, names: &[&str]) -> Option<Vec<Nt>> {
        names.iter().map(|n| self.nt(n)).collect()
    }

    /// Parses a space-separated configuration such as `"W B C B̄"`.
    pub fn parse_config(&self, text: &str) -> Option<Vec<Nt>> {
        text.split_whitespace().map(|n| self.nt(n)).collect()
    }

    pub fn to_raw(&self) -> RawGrammar {
        let full = self.nonterminal_count() > 1
            && self.independence().len() == {
                let n = self.nonterminal_count();
                n * (n - 1) / 2
            };
        RawGrammar {
            start: self.name(self.start).to_string(),
            productions: self
                .productions
                .iter()
                .map(|p| RawProduction {
                    lhs: self.name(p.lhs).to_string(),
                    letter: self.letter(p.letter).to_string(),
                    rhs: p.rhs.iter().map(|&nt| self.name(nt).to_string()).collect(),
                })
                .collect(),
            independence: if full {
                Vec::new()
            } else {
                self.independence()
                    .into_iter()
                    .map(|(x, y)| (self.name(x).to_string(), self.name(y).to_string()))
                    .collect()
            },
            all_independent: full,
            threads: None,
        }
    }

    pub fn format_production(&self, id: ProdId) -> String {
        let p = self.production(id);
        let rhs = self.names(&p.rhs).join(" ");
        if rhs.is_empty() {
            format!("{} -{}->", self.name(p.lhs), self.letter(p.letter))
        } else {
            format!("{} -{}-> {}", self.name(p.lhs), self.letter(p.letter), rhs)
        }
    }
}

pub struct GrammarBuilder {
    raw: RawGrammar,
}

impl GrammarBuilder {
    pub fn rule(mut self, lhs: &str, letter: &str, rhs: &[&str]) -> Self {
        self.raw.productions.push(RawProduction::new(lhs, letter, rhs));
        self
    }

    pub fn independent(mut self, x: &str, y: &str) -> Self {
        self.raw.independence.push((x.to_string(), y.to_string()));
        self
    }

    /// Declares every pair in `xs × ys` independent.
    pub fn independent_sets(mut self, xs: &[&str], ys: &[&str]) -> Self {
        for x in xs {
            for y in ys {
                self.raw.independence.push((x.to_string(), y.to_string()));
            }
        }
        self
    }

    pub fn all_independent(mut self) -> Self {
        self.raw.all_independent = true;
        self
    }

    pub fn raw(self) -> RawGrammar {
        self.raw
    }

    pub fn build(self) -> Result<Grammar, GrammarError> {
        Grammar::from_raw(&self.raw)
    }
}

/// Dependent pairs `(x, y)` with `x <= y`; singletons `(x, x)` included.
pub fn dependence(g: &Grammar) -> BTreeSet<(Nt, Nt)> {
    let mut out = BTreeSet::new();
    for x in g.nonterminals() {
        for y in g.nonterminals() {
            if x <= y && !g.independent(x, y) {
                out.insert((x, y));
            }
        }
    }
    out
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ThreadPartition {
    /// Blocks ordered by their least member.
    pub blocks: Vec<BTreeSet<Nt>>,
}

impl ThreadPartition {
    pub fn thread_of(&self, nt: Nt) -> usize {
        self.blocks.iter().position(|b| b.contains(&nt)).expect("partition covers every non-terminal")
    }

    pub fn format(&self, g: &Grammar) -> String {
        self.blocks
            .iter()
            .map(|b| format!("{{{}}}", b.iter().map(|&nt| g.name(nt)).collect::<Vec<_>>().join(" ")))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Witness that dependence is not transitive: `{x,y}` and `{y,z}` are
/// dependent while `{x,z}` is independent.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Error)]
#[error("dependence is not transitive")]
pub struct NonTransitive {
    pub x: Nt,
    pub y: Nt,
    pub z: Nt,
}

impl NonTransitive {
    pub fn names<'g>(&self, g: &'g Grammar) -> (&'g str, &'g str, &'g str) {
        (g.name(self.x), g.name(self.y), g.name(self.z))
    }
}

pub fn threads(g: &Grammar) -> Result<ThreadPartition, NonTransitive> {
    for x in g.nonterminals() {
        for z in g.nonterminals() {
            if x >= z || !g.independent(x, z) {
                continue;
            }
            if let Some(y) =
                g.nonterminals().find(|&y| y != x && y != z && !g.independent(x, y) && !g.independent(y, z))
            {
                return Err(NonTransitive { x, y, z });
            }
        }
    }
    let mut blocks: Vec<BTreeSet<Nt>> = Vec::new();
    for x in g.nonterminals() {
        match blocks.iter_mut().find(|b| b.iter().next().is_some_and(|&r| !g.independent(r, x))) {
            Some(b) => {
                b.insert(x);
            }
            None => blocks.push(BTreeSet::from([x])),
        }
    }
    Ok(ThreadPartition { blocks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;

    #[test]
    fn example_one_is_valid() {
        let raw = gallery::ex1().to_raw();
        assert!(validate(&raw).is_empty());
    }

    #[test]
    fn reflexive_pair_is_reported() {
        let raw = Grammar::builder("S").rule("S", "a", &["B"]).rule("B", "b", &[]).independent("B", "B").raw();
        let d = validate(&raw);
        assert_eq!(d, vec![Diagnostic::ReflexivePair { symbol: "B".into() }]);
        assert_eq!(d[0].to_string(), "reflexive pair: {B,B}");
    }

    #[test]
    fn self_loop_is_unproductive() {
        let raw = Grammar::builder("S").rule("S", "a", &[]).rule("S", "b", &["X"]).rule("X", "a", &["X"]).raw();
        let d = validate(&raw);
        assert_eq!(d, vec![Diagnostic::Unproductive { symbol: "X".into() }]);
        assert_eq!(d[0].to_string(), "unproductive: X");
    }

    #[test]
    fn undeclared_and_terminal_in_rhs() {
        let raw = Grammar::builder("S")
            .rule("S", "a", &["Y"])
            .rule("S", "a", &["b"])
            .rule("S", "eps", &[])
            .independent("S", "Q")
            .raw();
        let d = validate(&raw);
        assert!(d.iter().any(|d| matches!(d, Diagnostic::UndeclaredSymbol { symbol, .. } if symbol == "Y")));
        assert!(d.iter().any(|d| matches!(d, Diagnostic::UndeclaredSymbol { symbol, .. } if symbol == "Q")));
        assert_eq!(d.iter().filter(|d| matches!(d, Diagnostic::NonGreibach { .. })).count(), 2);
        assert!(Grammar::from_raw(&raw).is_err());
    }

    #[test]
    fn letter_clash_is_reported() {
        let raw = Grammar::builder("S").rule("S", "A", &["A"]).rule("A", "b", &[]).raw();
        assert_eq!(validate(&raw), vec![Diagnostic::LetterClash { letter: "A".into() }]);
    }

    #[test]
    fn dependence_of_example_one() {
        let g = gallery::ex1();
        let dep = dependence(&g);
        let pair = |a: &str, b: &str| {
            let (x, y) = (g.nt(a).unwrap(), g.nt(b).unwrap());
            (x.min(y), x.max(y))
        };
        assert!(dep.contains(&pair("P", "B")));
        assert!(dep.contains(&pair("P", "C")));
        assert!(!dep.contains(&pair("B", "C\u{304}")));
    }

    #[test]
    fn dependence_extremes() {
        let none =
            Grammar::builder("S").rule("S", "a", &["A", "B"]).rule("A", "a", &[]).rule("B", "b", &[]).build().unwrap();
        assert_eq!(dependence(&none).len(), 6);
        let all = Grammar::builder("S")
            .rule("S", "a", &["A", "B"])
            .rule("A", "a", &[])
            .rule("B", "b", &[])
            .all_independent()
            .build()
            .unwrap();
        let dep = dependence(&all);
        assert_eq!(dep.len(), 3);
        assert!(dep.iter().all(|(x, y)| x == y));
    }

    #[test]
    fn threads_of_example_two() {
        let g = gallery::ex2();
        let tp = threads(&g).unwrap();
        assert_eq!(tp.format(&g), "{A B S} {A'} {B'}");
    }

    #[test]
    fn example_one_is_not_transitive() {
        let g = gallery::ex1();
        let w = threads(&g).unwrap_err();
        assert_eq!(w.names(&g), ("B", "P", "C"));
    }

    #[test]
    fn full_independence_gives_singletons() {
        let g = Grammar::builder("S")
            .rule("S", "a", &["A", "B"])
            .rule("A", "a", &[])
            .rule("B", "b", &[])
            .all_independent()
            .build()
            .unwrap();
        let tp = threads(&g).unwrap();
        assert_eq!(tp.blocks.len(), 3);
        assert!(tp.blocks.iter().all(|b| b.len() == 1));
    }

    #[test]
    fn declared_threads_are_checked() {
        let mut raw = gallery::ex2().to_raw();
        raw.threads = Some(vec![vec!["S".into(), "A".into(), "B".into()], vec!["A'".into()], vec!["B'".into()]]);
        assert!(validate(&raw).is_empty());
        raw.threads = Some(vec![vec!["S".into(), "A".into(), "B".into(), "A'".into()], vec!["B'".into()]]);
        assert!(matches!(validate(&raw)[..], [Diagnostic::ThreadMismatch { .. }]));
    }
}
