//! Built-in grammars, automata and predicates.

use std::fmt;

use thiserror::Error;

use crate::closure::{self, Homomorphism};
use crate::grammar::Grammar;
use crate::mpda::{self, Mpda};
use crate::pa::{self, PaGrammar};
use crate::pcg;
use crate::pump::{Oracle, Predicate};
use crate::trace::{self, LetterIndependence};
use crate::word::Letter;

const BAR: &str = "\u{304}";

fn bar(s: &str) -> String {
    format!("{s}{BAR}")
}

fn build(b: crate::grammar::GrammarBuilder) -> Grammar {
    b.build().expect("gallery grammars are valid")
}

/// Two bar-decorated chains whose dependence is not transitive.
pub fn ex1() -> Grammar {
    let (bb, cb) = (bar("B"), bar("C"));
    build(
        Grammar::builder("P")
            .rule("P", "a", &["W", "B", "C", &bb])
            .rule("W", "a", &["W", "B", "C"])
            .rule("W", &bar("a"), &[&cb])
            .rule("B", "b", &[])
            .rule(&bb, &bar("b"), &[])
            .rule("C", "c", &[])
            .rule(&cb, &bar("c"), &[])
            .independent_sets(&["B", &bb], &["C", &cb]),
    )
}

/// Three threads `{S A B}`, `{A'}`, `{B'}`.
pub fn ex2() -> Grammar {
    build(
        Grammar::builder("S")
            .rule("S", "s", &[])
            .rule("S", "a", &["S", "A"])
            .rule("S", "b", &["S", "B"])
            .rule("A", "c", &["A'"])
            .rule("B", "c", &["B'"])
            .rule("A'", "a", &[])
            .rule("B'", "b", &[])
            .independent_sets(&["S", "A", "B"], &["A'", "B'"])
            .independent("A'", "B'"),
    )
}

/// `a^n s (b^n || c^n)` with threads `{S P}`, `{B}`, `{C}`.
pub fn l3_grammar() -> Grammar {
    build(
        Grammar::builder("S")
            .rule("S", "a", &["S", "P"])
            .rule("S", "s", &[])
            .rule("P", "b", &["C"])
            .rule("P", "c", &["B"])
            .rule("C", "c", &[])
            .rule("B", "b", &[])
            .independent_sets(&["S", "P"], &["B", "C"])
            .independent("B", "C"),
    )
}

/// Context-free `a^n s (bc)^n`.
pub fn l3_cfg() -> Grammar {
    build(Grammar::builder("S").rule("S", "s", &[]).rule("S", "a", &["S", "Y"]).rule("Y", "b", &["C"]).rule(
        "C",
        "c",
        &[],
    ))
}

/// Context-free `(ab)^n ā d̄ (cd)^n`.
pub fn l6_cfg() -> Grammar {
    let db = bar("D");
    build(
        Grammar::builder("S")
            .rule("S", &bar("a"), &[&db])
            .rule(&db, &bar("d"), &[])
            .rule("S", "a", &["Q"])
            .rule("Q", "b", &["S", "Z"])
            .rule("Z", "c", &["W"])
            .rule("W", "d", &[]),
    )
}

/// `{a, ā} × {b, c} ∪ {d̄, d} × {c}`, symmetric.
pub fn l6_independence() -> LetterIndependence {
    let (ab, db) = (bar("a"), bar("d"));
    let left = LetterIndependence::product(&["a", &ab], &["b", "c"]).expect("irreflexive");
    let right = LetterIndependence::product(&[&db, "d"], &["c"]).expect("irreflexive");
    left.union(&right)
}

pub fn l3_independence() -> LetterIndependence {
    LetterIndependence::product(&["b"], &["c"]).expect("irreflexive")
}

/// Words with equally many `a`, `b` and `c`, at least one each. Every
/// non-terminal commutes with every other.
pub fn equal_abc() -> Grammar {
    build(
        Grammar::builder("S")
            .rule("S", "a", &["B", "C"])
            .rule("S", "a", &["S", "B", "C"])
            .rule("S", "b", &["A", "C"])
            .rule("S", "b", &["S", "A", "C"])
            .rule("S", "c", &["A", "B"])
            .rule("S", "c", &["S", "A", "B"])
            .rule("A", "a", &[])
            .rule("B", "b", &[])
            .rule("C", "c", &[])
            .all_independent(),
    )
}

pub fn singleton_d() -> Grammar {
    build(Grammar::builder("D").rule("D", "d", &[]))
}

/// `A^{n+1} S B^n T` over upper-case letters.
pub fn invhom_l1() -> Grammar {
    build(
        Grammar::builder("K")
            .rule("K", "A", &["M", "Nt"])
            .rule("M", "A", &["M", "Nb"])
            .rule("M", "A", &["Ns", "Nb"])
            .rule("Ns", "S", &[])
            .rule("Nb", "B", &[])
            .rule("Nt", "T", &[]),
    )
}

/// `S B^n T C^n` over upper-case letters.
pub fn invhom_l2() -> Grammar {
    build(
        Grammar::builder("K")
            .rule("K", "S", &["N"])
            .rule("N", "B", &["N", "Nc"])
            .rule("N", "B", &["Ntt", "Nc"])
            .rule("Ntt", "T", &[])
            .rule("Nc", "C", &[]),
    )
}

/// `a (b c || d)`: three words.
pub fn pa_example() -> PaGrammar {
    pa::parse("start: S\nS -a-> (A ; B) || C\nA -b->\nB -c->\nC -d->\n").expect("valid")
}

/// `e (a^n b^n || c^m d^m)` for `n, m >= 0`.
pub fn pa_shuffle() -> PaGrammar {
    pa::parse(
        "start: S
S -e-> eps
S -e-> T
S -e-> U
S -e-> T || U
T -a-> Y
T -a-> T ; Y
Y -b->
U -c-> Z
U -c-> U ; Z
Z -d->
",
    )
    .expect("valid")
}

/// Language classes an entry is known to belong to.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Class {
    Cfl,
    Ccfl,
    Pccfl,
    /// Partially-commutative with transitive dependence.
    TrPcCfl,
    ShuffleCfl,
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Class::Cfl => "CFL",
            Class::Ccfl => "CCFL",
            Class::Pccfl => "PCCFL",
            Class::TrPcCfl => "tr-PCCFL",
            Class::ShuffleCfl => "shuffle-CFL",
        })
    }
}

#[derive(Clone, Debug)]
pub enum Payload {
    Grammar(Grammar),
    Mpda(Mpda),
    Pa(PaGrammar),
    TraceCfl {
        cfg: Grammar,
        independence: LetterIndependence,
    },
    Predicate(Predicate),
    /// Named component grammars, an optional homomorphism, and the grammar
    /// of the combined language.
    Witness {
        parts: Vec<(String, Grammar)>,
        hom: Option<Homomorphism>,
        language: Grammar,
    },
}

#[derive(Clone, Debug)]
pub struct GalleryEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub payload: Payload,
    /// Characterization of the same language, when one is available.
    pub predicate: Option<Predicate>,
    pub classes: Vec<Class>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GalleryError {
    #[error("unknown gallery entry `{name}`; available: {}", available.join(", "))]
    Unknown { name: String, available: Vec<String> },
    #[error("gallery entry `{0}` has no file form")]
    NotExportable(String),
}

impl GalleryEntry {
    pub fn kind(&self) -> &'static str {
        match self.payload {
            Payload::Grammar(_) => "grammar",
            Payload::Mpda(_) => "mpda",
            Payload::Pa(_) => "pa-grammar",
            Payload::TraceCfl { .. } => "cfg+letter-independence",
            Payload::Predicate(_) => "predicate",
            Payload::Witness { .. } => "witness",
        }
    }

    /// The grammar of the entry's language, if it has one.
    pub fn grammar(&self) -> Option<&Grammar> {
        match &self.payload {
            Payload::Grammar(g) | Payload::TraceCfl { cfg: g, .. } | Payload::Witness { language: g, .. } => Some(g),
            _ => None,
        }
    }

    pub fn oracle(&self) -> Oracle {
        match &self.payload {
            Payload::Grammar(g) | Payload::Witness { language: g, .. } => Oracle::Grammar(g.clone()),
            Payload::Mpda(m) => Oracle::Mpda(m.clone()),
            Payload::Pa(g) => Oracle::Pa(g.clone()),
            Payload::TraceCfl { cfg, independence } => {
                Oracle::TraceCfl { cfg: cfg.clone(), independence: independence.clone() }
            }
            Payload::Predicate(p) => Oracle::Predicate(p.clone()),
        }
    }

    /// File name and contents of each exported file.
    pub fn export(&self) -> Result<Vec<(String, String)>, GalleryError> {
        let name = self.name.replace('+', "-");
        Ok(match &self.payload {
            Payload::Grammar(g) => vec![(format!("{name}.pcg"), pcg::print(g))],
            Payload::Mpda(m) => vec![(format!("{name}.mpda"), mpda::print(m))],
            Payload::Pa(g) => vec![(format!("{name}.pag"), pa::print(g))],
            Payload::TraceCfl { cfg, independence } => {
                vec![(format!("{name}.pcg"), trace::print_with_letter_independence(cfg, independence))]
            }
            Payload::Predicate(_) => return Err(GalleryError::NotExportable(self.name.to_string())),
            Payload::Witness { parts, hom, language } => {
                let mut files: Vec<(String, String)> = parts
                    .iter()
                    .map(|(part, g)| (format!("{name}-{}.pcg", part.to_lowercase()), pcg::print(g)))
                    .collect();
                files.push((format!("{name}.pcg"), pcg::print(language)));
                if let Some(h) = hom {
                    let lines: String = h.iter().map(|(a, w)| format!("{a}={}\n", crate::word::display(w))).collect();
                    files.push((format!("{name}.hom"), lines));
                }
                files
            }
        })
    }
}

fn predicate(name: &str, alphabet: &[&str], test: fn(&[Letter]) -> bool) -> Predicate {
    Predicate { name: name.to_string(), alphabet: alphabet.iter().map(Letter::new).collect(), test }
}

const NAMES: [&str; 14] = [
    "anbn",
    "anbncn",
    "concat-witness",
    "equal-abc",
    "ex1",
    "ex2",
    "ex2-mpda",
    "invhom-witness",
    "l3-cfg+indep",
    "l3-grammar",
    "l6-cfg+indep",
    "pa-example",
    "pa-shuffle",
    "singleton-d",
];

pub fn gallery_list() -> Vec<&'static str> {
    NAMES.to_vec()
}

pub fn gallery_get(name: &str) -> Result<GalleryEntry, GalleryError> {
    let (ab, bb, cb, db) = (bar("a"), bar("b"), bar("c"), bar("d"));
    let entry = |name, description, payload, predicate, classes: &[Class]| GalleryEntry {
        name,
        description,
        payload,
        predicate,
        classes: classes.to_vec(),
    };
    use Class::*;
    Ok(match name {
        "ex1" => entry(
            "ex1",
            "a^n ā (b^n b̄ || c̄ c^n), n >= 1; dependence is not transitive",
            Payload::Grammar(ex1()),
            Some(predicate("ex1", &["a", &ab, "b", &bb, "c", &cb], is_ex1)),
            &[Pccfl],
        ),
        "ex2" => entry(
            "ex2",
            "w s v with three threads; c pops the most recent a or b",
            Payload::Grammar(ex2()),
            Some(predicate("ex2", &["a", "b", "c", "s"], is_ex2)),
            &[Pccfl, TrPcCfl],
        ),
        "ex2-mpda" => entry(
            "ex2-mpda",
            "three-stack automaton for ex2",
            Payload::Mpda(mpda::from_transitive_grammar(&ex2()).expect("ex2 is transitive")),
            Some(predicate("ex2", &["a", "b", "c", "s"], is_ex2)),
            &[Pccfl, TrPcCfl],
        ),
        "l3-grammar" => entry(
            "l3-grammar",
            "a^n s (b^n || c^n) with threads {S P}, {B}, {C}",
            Payload::Grammar(l3_grammar()),
            Some(predicate("l3", &["a", "b", "c", "s"], is_l3)),
            &[Pccfl, TrPcCfl],
        ),
        "l3-cfg+indep" => entry(
            "l3-cfg+indep",
            "trace closure of a^n s (bc)^n with b, c independent",
            Payload::TraceCfl { cfg: l3_cfg(), independence: l3_independence() },
            Some(predicate("l3", &["a", "b", "c", "s"], is_l3)),
            &[],
        ),
        "l6-cfg+indep" => entry(
            "l6-cfg+indep",
            "trace closure of (ab)^n ā d̄ (cd)^n",
            Payload::TraceCfl { cfg: l6_cfg(), independence: l6_independence() },
            Some(predicate("l6", &["a", &ab, "b", "c", "d", &db], is_l6)),
            &[],
        ),
        "anbn" => entry(
            "anbn",
            "a^n b^n, n >= 1",
            Payload::Predicate(predicate("anbn", &["a", "b"], is_anbn)),
            None,
            &[Cfl, Pccfl, TrPcCfl, ShuffleCfl],
        ),
        "anbncn" => entry(
            "anbncn",
            "a^n b^n c^n, n >= 1; outside PCCFL and shuffle-CFL",
            Payload::Predicate(predicate("anbncn", &["a", "b", "c"], is_anbncn)),
            None,
            &[],
        ),
        "equal-abc" => entry(
            "equal-abc",
            "#a = #b = #c >= 1, all non-terminals commuting",
            Payload::Grammar(equal_abc()),
            Some(predicate("equal-abc", &["a", "b", "c"], is_equal_abc)),
            &[Ccfl, Pccfl, TrPcCfl, ShuffleCfl],
        ),
        "singleton-d" => entry("singleton-d", "{d}", Payload::Grammar(singleton_d()), None, &[Cfl, Pccfl, TrPcCfl, ShuffleCfl]),
        "concat-witness" => entry(
            "concat-witness",
            "L1 L2 with L1 = equal-abc and L2 = {d}; in PCCFL, not in tr-PCCFL",
            Payload::Witness {
                parts: vec![("L1".into(), equal_abc()), ("L2".into(), singleton_d())],
                hom: None,
                language: closure::concat(&equal_abc(), &singleton_d()).expect("valid"),
            },
            None,
            &[Pccfl],
        ),
        "invhom-witness" => entry(
            "invhom-witness",
            "L = L1 || L2 with L1 = A^{n+1} S B^n T, L2 = S B^n T C^n; the inverse image under h is a^{n+1} s b^n t c^n",
            Payload::Witness {
                parts: vec![("L1".into(), invhom_l1()), ("L2".into(), invhom_l2())],
                hom: Some(
                    closure::parse_homomorphism(["a=A", "s=S S", "b=B B", "t=T T", "c=C"]).expect("valid"),
                ),
                language: closure::shuffle(&invhom_l1(), &invhom_l2()).expect("valid"),
            },
            None,
            &[Pccfl, TrPcCfl, ShuffleCfl],
        ),
        "pa-example" => entry(
            "pa-example",
            "a (b c || d)",
            Payload::Pa(pa_example()),
            None,
            &[ShuffleCfl],
        ),
        "pa-shuffle" => entry(
            "pa-shuffle",
            "e (a^n b^n || c^m d^m)",
            Payload::Pa(pa_shuffle()),
            None,
            &[ShuffleCfl],
        ),
        _ => {
            return Err(GalleryError::Unknown {
                name: name.to_string(),
                available: NAMES.iter().map(|s| s.to_string()).collect(),
            })
        }
    })
}

fn count(w: &[Letter], l: &str) -> usize {
    w.iter().filter(|x| x.as_str() == l).count()
}

fn only(w: &[Letter], alphabet: &[&str]) -> bool {
    w.iter().all(|x| alphabet.contains(&x.as_str()))
}

/// Splits `w` into maximal runs of equal letters.
fn runs(w: &[Letter]) -> Vec<(&str, usize)> {
    let mut out: Vec<(&str, usize)> = Vec::new();
    for l in w {
        match out.last_mut() {
            Some((x, n)) if *x == l.as_str() => *n += 1,
            _ => out.push((l.as_str(), 1)),
        }
    }
    out
}

pub fn is_anbn(w: &[Letter]) -> bool {
    matches!(runs(w)[..], [("a", i), ("b", j)] if i == j)
}

pub fn is_anbncn(w: &[Letter]) -> bool {
    matches!(runs(w)[..], [("a", i), ("b", j), ("c", k)] if i == j && j == k)
}

pub fn is_equal_abc(w: &[Letter]) -> bool {
    only(w, &["a", "b", "c"]) && count(w, "a") >= 1 && count(w, "a") == count(w, "b") && count(w, "b") == count(w, "c")
}

/// Is `w` an interleaving of `u` and `v`?
fn shuffles(w: &[Letter], u: &[&str], v: &[&str]) -> bool {
    let u: Vec<Letter> = u.iter().map(Letter::new).collect();
    let v: Vec<Letter> = v.iter().map(Letter::new).collect();
    crate::pump::interleaving_member(w, &u, &v)
}

fn repeat(l: &str, n: usize) -> Vec<&str> {
    vec![l; n]
}

/// `a^n ā (b^n b̄ || c̄ c^n)`, `n >= 1`.
pub fn is_ex1(w: &[Letter]) -> bool {
    let n = count(w, "a");
    if n == 0 || w.len() != 3 * n + 3 {
        return false;
    }
    let (ab, bb, cb) = (bar("a"), bar("b"), bar("c"));
    let head: Vec<&str> = repeat("a", n).into_iter().chain([ab.as_str()]).collect();
    if w[..n + 1].iter().map(Letter::as_str).ne(head.iter().copied()) {
        return false;
    }
    let left: Vec<&str> = repeat("b", n).into_iter().chain([bb.as_str()]).collect();
    let right: Vec<&str> = [cb.as_str()].into_iter().chain(repeat("c", n)).collect();
    shuffles(&w[n + 1..], &left, &right)
}

/// The characterization of the three-thread example: `w s v` with
/// balanced counts and every `c`-prefix of `v` covered by a suffix of `w`.
pub fn is_ex2(word: &[Letter]) -> bool {
    let Some(pos) = word.iter().position(|l| l.as_str() == "s") else {
        return false;
    };
    let (w, v) = (&word[..pos], &word[pos + 1..]);
    if !only(w, &["a", "b"]) || !only(v, &["a", "b", "c"]) {
        return false;
    }
    if count(w, "a") != count(v, "a") || count(w, "b") != count(v, "b") {
        return false;
    }
    if count(v, "c") != count(v, "a") + count(v, "b") {
        return false;
    }
    for i in 0..=v.len() {
        let vp = &v[..i];
        let k = count(vp, "c");
        if k > w.len() {
            continue;
        }
        let ws = &w[w.len() - k..];
        if count(ws, "a") < count(vp, "a") || count(ws, "b") < count(vp, "b") {
            return false;
        }
    }
    true
}

/// `a^n s (b^n || c^n)`, `n >= 0`.
pub fn is_l3(w: &[Letter]) -> bool {
    let n = w.iter().take_while(|l| l.as_str() == "a").count();
    if w.get(n).map(Letter::as_str) != Some("s") {
        return false;
    }
    let rest = &w[n + 1..];
    only(rest, &["b", "c"]) && count(rest, "b") == n && count(rest, "c") == n
}

/// Shuffles of `a^n ā d̄ d^n` with `b^n c^n` in which every `b` precedes
/// every `d` and `d̄`.
pub fn is_l6(w: &[Letter]) -> bool {
    let n = count(w, "a");
    if w.len() != 4 * n + 2 {
        return false;
    }
    let (ab, db) = (bar("a"), bar("d"));
    let left: Vec<&str> = repeat("a", n).into_iter().chain([ab.as_str(), db.as_str()]).chain(repeat("d", n)).collect();
    let right: Vec<&str> = repeat("b", n).into_iter().chain(repeat("c", n)).collect();
    if !shuffles(w, &left, &right) {
        return false;
    }
    let last_b = w.iter().rposition(|l| l.as_str() == "b");
    let first_d = w.iter().position(|l| l.as_str() == "d" || *l.as_str() == *db);
    match (last_b, first_d) {
        (Some(b), Some(d)) => b < d,
        _ => true,
    }
}
