//! Grammar constructions for union, shuffle, concatenation, letter
//! substitution and homomorphic images.
//!
//! Inputs are renamed apart with numeric suffixes (`_1`, `_2`, ...), so a
//! grammar may be combined with itself. The fresh start symbol is `S`,
//! primed if that name is taken.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::grammar::{Grammar, GrammarError, RawGrammar, RawProduction};
use crate::word::{Letter, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClosureError {
    #[error("no image given for letter `{0}`")]
    MissingImage(Letter),
    #[error("letter `{0}` has an empty image")]
    EmptyImage(Letter),
    #[error("cannot parse `{0}`; expected LETTER=WORD")]
    Syntax(String),
    #[error(transparent)]
    Grammar(#[from] GrammarError),
}

/// Productions and independence of `g` with every non-terminal suffixed.
fn renamed(g: &Grammar, suffix: &str) -> RawGrammar {
    let mut raw = g.to_raw();
    let tag = |s: &String| format!("{s}{suffix}");
    raw.start = tag(&raw.start);
    for p in &mut raw.productions {
        p.lhs = tag(&p.lhs);
        p.rhs = p.rhs.iter().map(tag).collect();
    }
    raw.independence = g
        .independence()
        .into_iter()
        .map(|(x, y)| (format!("{}{suffix}", g.name(x)), format!("{}{suffix}", g.name(y))))
        .collect();
    raw.all_independent = false;
    raw
}

fn names(raw: &RawGrammar) -> Vec<String> {
    let mut v: Vec<String> = raw.productions.iter().map(|p| p.lhs.clone()).collect();
    v.sort();
    v.dedup();
    v
}

fn start_productions(raw: &RawGrammar) -> impl Iterator<Item = &RawProduction> {
    raw.productions.iter().filter(move |p| p.lhs == raw.start)
}

fn cross_pairs(xs: &[String], ys: &[String]) -> Vec<(String, String)> {
    xs.iter().flat_map(|x| ys.iter().map(move |y| (x.clone(), y.clone()))).collect()
}

/// `S`, primed until it clashes with no letter or non-terminal.
fn fresh_start(parts: &[&RawGrammar]) -> String {
    let mut name = "S".to_string();
    while parts.iter().flat_map(|r| &r.productions).any(|p| p.lhs == name || p.letter == name) {
        name.push('\'');
    }
    name
}

/// Combines two renamed grammars under the start of `start_rules`. Cross
/// pairs are independent when `commute` holds and dependent otherwise; the
/// fresh start follows the same rule.
fn combine(
    r1: RawGrammar,
    r2: RawGrammar,
    commute: bool,
    start_rules: Vec<RawProduction>,
) -> Result<Grammar, ClosureError> {
    let (n1, n2) = (names(&r1), names(&r2));
    let start = start_rules[0].lhs.clone();
    let mut raw = RawGrammar { start: start.clone(), ..RawGrammar::default() };
    raw.productions = start_rules;
    raw.productions.extend(r1.productions);
    raw.productions.extend(r2.productions);
    raw.independence = r1.independence;
    raw.independence.extend(r2.independence);
    if commute {
        raw.independence.extend(cross_pairs(&n1, &n2));
        let all: Vec<String> = n1.iter().chain(&n2).cloned().collect();
        raw.independence.extend(cross_pairs(&[start], &all));
    }
    Ok(Grammar::from_raw(&raw)?)
}

pub fn union(g1: &Grammar, g2: &Grammar) -> Result<Grammar, ClosureError> {
    let (r1, r2) = (renamed(g1, "_1"), renamed(g2, "_2"));
    let start = fresh_start(&[&r1, &r2]);
    let rules = start_productions(&r1)
        .chain(start_productions(&r2))
        .map(|p| RawProduction { lhs: start.clone(), ..p.clone() })
        .collect();
    combine(r1, r2, true, rules)
}

/// `S -a1-> α1 S2` and `S -a2-> α2 S1` for the start productions of each side.
pub fn shuffle(g1: &Grammar, g2: &Grammar) -> Result<Grammar, ClosureError> {
    let (r1, r2) = (renamed(g1, "_1"), renamed(g2, "_2"));
    let start = fresh_start(&[&r1, &r2]);
    let mut rules: Vec<RawProduction> = Vec::new();
    for (a, b) in [(&r1, &r2), (&r2, &r1)] {
        for p in start_productions(a) {
            let mut rhs = p.rhs.clone();
            rhs.push(b.start.clone());
            rules.push(RawProduction { lhs: start.clone(), letter: p.letter.clone(), rhs });
        }
    }
    combine(r1, r2, true, rules)
}

/// Like [`shuffle`] with only the left start productions and with every
/// cross pair dependent.
pub fn concat(g1: &Grammar, g2: &Grammar) -> Result<Grammar, ClosureError> {
    let (r1, r2) = (renamed(g1, "_1"), renamed(g2, "_2"));
    let start = fresh_start(&[&r1, &r2]);
    let rules = start_productions(&r1)
        .map(|p| {
            let mut rhs = p.rhs.clone();
            rhs.push(r2.start.clone());
            RawProduction { lhs: start.clone(), letter: p.letter.clone(), rhs }
        })
        .collect();
    combine(r1, r2, false, rules)
}

pub type LetterSubstitution = BTreeMap<Letter, Grammar>;

/// `L[s]`: each production `X -a-> α` of `g` becomes `X -b-> β α` for every
/// start production `S_a -b-> β` of the image grammar of `a`. Non-terminals
/// of different grammars are dependent.
pub fn substitute_letters(g: &Grammar, s: &LetterSubstitution) -> Result<Grammar, ClosureError> {
    let base = renamed(g, "_0");
    let mut images: BTreeMap<&Letter, RawGrammar> = BTreeMap::new();
    for (i, letter) in g.letters().iter().enumerate() {
        let image = s.get(letter).ok_or_else(|| ClosureError::MissingImage(letter.clone()))?;
        images.insert(letter, renamed(image, &format!("_{}", i + 1)));
    }
    let mut raw = RawGrammar { start: base.start.clone(), ..RawGrammar::default() };
    for p in &base.productions {
        let image = &images[&Letter::new(&p.letter)];
        for q in start_productions(image) {
            let rhs = q.rhs.iter().chain(&p.rhs).cloned().collect();
            raw.productions.push(RawProduction { lhs: p.lhs.clone(), letter: q.letter.clone(), rhs });
        }
    }
    raw.independence = base.independence;
    for image in images.into_values() {
        raw.productions.extend(image.productions);
        raw.independence.extend(image.independence);
    }
    Ok(Grammar::from_raw(&raw)?)
}

pub type Homomorphism = BTreeMap<Letter, Word>;

/// Parses `a=bc` style assignments; the image follows word syntax.
pub fn parse_homomorphism<'a>(items: impl IntoIterator<Item = &'a str>) -> Result<Homomorphism, ClosureError> {
    let mut h = Homomorphism::new();
    for item in items {
        let (l, w) = item.split_once('=').ok_or_else(|| ClosureError::Syntax(item.to_string()))?;
        let (l, w) = (l.trim(), w.trim());
        if l.is_empty() {
            return Err(ClosureError::Syntax(item.to_string()));
        }
        h.insert(Letter::new(l), crate::word::parse(w));
    }
    Ok(h)
}

/// The grammar of a single non-empty word, as a chain `H0 -a-> H1 ...`.
pub fn word_grammar(w: &[Letter]) -> Option<Grammar> {
    let mut b = Grammar::builder("H0");
    for (i, l) in w.iter().enumerate() {
        let next = format!("H{}", i + 1);
        let rhs: Vec<&str> = if i + 1 < w.len() { vec![next.as_str()] } else { vec![] };
        b = b.rule(&format!("H{i}"), l.as_str(), &rhs);
    }
    b.build().ok()
}

pub fn hom_image(g: &Grammar, h: &Homomorphism) -> Result<Grammar, ClosureError> {
    let mut s = LetterSubstitution::new();
    for letter in g.letters() {
        let w = h.get(letter).ok_or_else(|| ClosureError::MissingImage(letter.clone()))?;
        let image = word_grammar(w).ok_or_else(|| ClosureError::EmptyImage(letter.clone()))?;
        s.insert(letter.clone(), image);
    }
    substitute_letters(g, &s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::enumerate;
    use crate::gallery;
    use crate::grammar::threads;
    use crate::word::{display, parse};

    fn words(g: &Grammar, n: usize) -> Vec<String> {
        enumerate(g, n).unwrap().iter().map(|w| display(w)).collect()
    }

    fn lang(ws: &[&str]) -> Grammar {
        let mut b = Grammar::builder("W");
        let mut chains = Vec::new();
        for (i, w) in ws.iter().enumerate() {
            let letters = parse(w);
            for (j, l) in letters.iter().enumerate() {
                let lhs = if j == 0 { "W".to_string() } else { format!("C{i}x{j}") };
                let rhs = if j + 1 < letters.len() { vec![format!("C{i}x{}", j + 1)] } else { vec![] };
                chains.push((lhs, l.to_string(), rhs));
            }
        }
        for (lhs, l, rhs) in &chains {
            let rhs: Vec<&str> = rhs.iter().map(String::as_str).collect();
            b = b.rule(lhs, l, &rhs);
        }
        b.build().unwrap()
    }

    #[test]
    fn finite_languages() {
        assert_eq!(words(&lang(&["ab", "c"]), 5), vec!["c", "ab"]);
        assert_eq!(words(&union(&lang(&["a"]), &lang(&["b"])).unwrap(), 5), vec!["a", "b"]);
        assert_eq!(words(&shuffle(&lang(&["ab"]), &lang(&["c"])).unwrap(), 5), vec!["abc", "acb", "cab"]);
        assert_eq!(words(&shuffle(&lang(&["a"]), &lang(&["b"])).unwrap(), 5), vec!["ab", "ba"]);
        assert_eq!(words(&concat(&lang(&["a"]), &lang(&["b"])).unwrap(), 5), vec!["ab"]);
        assert_eq!(words(&concat(&lang(&["a", "aa"]), &lang(&["b"])).unwrap(), 5), vec!["ab", "aab"]);
    }

    #[test]
    fn union_with_itself() {
        let g = gallery::ex2();
        assert_eq!(words(&union(&g, &g).unwrap(), 7), words(&g, 7));
    }

    #[test]
    fn transitivity() {
        let (ex2, l3) = (gallery::ex2(), gallery::l3_grammar());
        assert!(threads(&union(&ex2, &l3).unwrap()).is_ok());
        assert!(threads(&shuffle(&ex2, &l3).unwrap()).is_ok());
        assert!(threads(&concat(&ex2, &l3).unwrap()).is_err());
        let d = gallery::singleton_d();
        let sub: LetterSubstitution = ex2.letters().iter().map(|l| (l.clone(), d.clone())).collect();
        assert!(threads(&substitute_letters(&ex2, &sub).unwrap()).is_err());
    }

    #[test]
    fn substitution_examples() {
        let g = lang(&["ab"]);
        let s = LetterSubstitution::from([(Letter::new("a"), lang(&["c", "d"])), (Letter::new("b"), lang(&["e"]))]);
        assert_eq!(words(&substitute_letters(&g, &s).unwrap(), 5), vec!["ce", "de"]);
        let missing = LetterSubstitution::from([(Letter::new("a"), lang(&["c"]))]);
        assert_eq!(substitute_letters(&g, &missing), Err(ClosureError::MissingImage(Letter::new("b"))));
    }

    #[test]
    fn homomorphisms() {
        let an = Grammar::builder("A").rule("A", "a", &[]).rule("A", "a", &["A"]).build().unwrap();
        let h = parse_homomorphism(["a=bc"]).unwrap();
        assert_eq!(words(&hom_image(&an, &h).unwrap(), 8), vec!["bc", "bcbc", "bcbcbc", "bcbcbcbc"]);
        let id = parse_homomorphism(["a=a"]).unwrap();
        assert_eq!(words(&hom_image(&an, &id).unwrap(), 5), words(&an, 5));
        let h = parse_homomorphism(["a=A", "s=SS", "b=BB", "t=TT", "c=C"]).unwrap();
        let img = hom_image(&lang(&["a s b t c"]), &h).unwrap();
        assert_eq!(words(&img, 8), vec!["ASSBBTTC"]);
        assert_eq!(
            hom_image(&an, &parse_homomorphism(["a="]).unwrap()),
            Err(ClosureError::EmptyImage(Letter::new("a")))
        );
    }
}
