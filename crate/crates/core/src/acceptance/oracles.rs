//! Reference implementations used to cross-check the engines. They share no
//! code with the modules they check beyond the grammar data structure.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::grammar::{Grammar, Nt, RawGrammar, RawProduction};
use crate::pa::PaTerm;
use crate::word::{Letter, Word};

pub fn letters(tokens: &[&str]) -> Word {
    tokens.iter().map(Letter::new).collect()
}

fn repeat(l: &str, n: usize) -> Word {
    vec![Letter::new(l); n]
}

fn cat(parts: &[Word]) -> Word {
    parts.concat()
}

/// Every non-empty word over `alphabet` of length at most `max_len`.
pub fn all_words(alphabet: &[Letter], max_len: usize) -> Vec<Word> {
    let mut out = Vec::new();
    let mut layer: Vec<Word> = vec![Vec::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w| {
                alphabet.iter().map(move |l| {
                    let mut v = w.clone();
                    v.push(l.clone());
                    v
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// All interleavings of `u` and `v`, by recursion on the first letters.
pub fn interleave(u: &[Letter], v: &[Letter]) -> BTreeSet<Word> {
    match (u.split_first(), v.split_first()) {
        (None, _) => BTreeSet::from([v.to_vec()]),
        (_, None) => BTreeSet::from([u.to_vec()]),
        (Some((a, ur)), Some((b, vr))) => {
            let mut out = BTreeSet::new();
            for w in interleave(ur, v) {
                out.insert([vec![a.clone()], w].concat());
            }
            for w in interleave(u, vr) {
                out.insert([vec![b.clone()], w].concat());
            }
            out
        }
    }
}

/// `a^n ā (b^n b̄ || c̄ c^n)` for `n` in `1..=max_n`.
pub fn ex1_expansion(max_n: usize) -> BTreeSet<Word> {
    let mut out = BTreeSet::new();
    for n in 1..=max_n {
        let head = cat(&[repeat("a", n), letters(&["a\u{304}"])]);
        let left = cat(&[repeat("b", n), letters(&["b\u{304}"])]);
        let right = cat(&[letters(&["c\u{304}"]), repeat("c", n)]);
        for tail in interleave(&left, &right) {
            out.insert(cat(&[head.clone(), tail]));
        }
    }
    out
}

/// `a^n s (b^n || c^n)` for `n` in `0..=max_n`.
pub fn l3_expansion(max_n: usize) -> BTreeSet<Word> {
    let mut out = BTreeSet::new();
    for n in 0..=max_n {
        for tail in interleave(&repeat("b", n), &repeat("c", n)) {
            out.insert(cat(&[repeat("a", n), letters(&["s"]), tail]));
        }
    }
    out
}

/// Shuffles of `a^n ā d̄ d^n` with `b^n c^n` in which no `d` or `d̄`
/// precedes a `b`, for `n` in `0..=max_n`.
pub fn l6_expansion(max_n: usize) -> BTreeSet<Word> {
    let mut out = BTreeSet::new();
    for n in 0..=max_n {
        let left = cat(&[repeat("a", n), letters(&["a\u{304}", "d\u{304}"]), repeat("d", n)]);
        let right = cat(&[repeat("b", n), repeat("c", n)]);
        for w in interleave(&left, &right) {
            let last_b = w.iter().rposition(|l| l.as_str() == "b");
            let first_d = w.iter().position(|l| matches!(l.as_str(), "d" | "d\u{304}"));
            if matches!((last_b, first_d), (Some(b), Some(d)) if b > d) {
                continue;
            }
            out.insert(w);
        }
    }
    out
}

/// All configurations reachable from `cfgs` by swapping adjacent independent
/// symbols.
fn swap_closure(g: &Grammar, cfgs: BTreeSet<Vec<Nt>>) -> BTreeSet<Vec<Nt>> {
    let mut seen = cfgs.clone();
    let mut todo: Vec<Vec<Nt>> = cfgs.into_iter().collect();
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

/// The words of length at most `max_len`, by tracking every raw
/// configuration explicitly and closing under swaps after each step.
pub fn naive_language(g: &Grammar, max_len: usize) -> BTreeSet<Word> {
    fn go(g: &Grammar, prefix: &mut Word, cfgs: BTreeSet<Vec<Nt>>, max_len: usize, out: &mut BTreeSet<Word>) {
        if cfgs.contains(&Vec::new()) && !prefix.is_empty() {
            out.insert(prefix.clone());
        }
        let mut by_letter: BTreeMap<Letter, BTreeSet<Vec<Nt>>> = BTreeMap::new();
        for c in &cfgs {
            let Some((&head, rest)) = c.split_first() else { continue };
            for p in g.productions() {
                if p.lhs != head {
                    continue;
                }
                let next: Vec<Nt> = p.rhs.iter().chain(rest).copied().collect();
                if prefix.len() + 1 + next.len() <= max_len {
                    by_letter.entry(g.letter(p.letter).clone()).or_default().insert(next);
                }
            }
        }
        for (l, next) in by_letter {
            prefix.push(l);
            go(g, prefix, swap_closure(g, next), max_len, out);
            prefix.pop();
        }
    }
    let mut out = BTreeSet::new();
    go(g, &mut Vec::new(), swap_closure(g, BTreeSet::from([vec![g.start()]])), max_len, &mut out);
    out
}

/// A small random Greibach grammar over `a`, `b`, `c` with random
/// independence. Every non-terminal gets a terminating production.
pub fn random_grammar(rng: &mut ChaCha8Rng) -> Grammar {
    let names = ["S", "A", "B", "C"];
    let k = rng.gen_range(2..=4);
    let names = &names[..k];
    let alphabet = ["a", "b", "c"];
    let mut productions = Vec::new();
    for lhs in names {
        productions.push(RawProduction::new(lhs, alphabet.choose(rng).unwrap(), &[]));
    }
    for _ in 0..rng.gen_range(2..=4) {
        let lhs = names.choose(rng).unwrap();
        let len = rng.gen_range(1..=2);
        let rhs: Vec<&str> = (0..len).map(|_| *names.choose(rng).unwrap()).collect();
        productions.push(RawProduction::new(lhs, alphabet.choose(rng).unwrap(), &rhs));
    }
    let mut independence = Vec::new();
    for (i, x) in names.iter().enumerate() {
        for y in &names[i + 1..] {
            if rng.gen_bool(0.5) {
                independence.push((x.to_string(), y.to_string()));
            }
        }
    }
    let raw = RawGrammar { start: "S".into(), productions, independence, ..RawGrammar::default() };
    Grammar::from_raw(&raw).expect("random grammars are valid by construction")
}

pub fn union_set(a: &BTreeSet<Word>, b: &BTreeSet<Word>) -> BTreeSet<Word> {
    a.union(b).cloned().collect()
}

pub fn shuffle_set(a: &BTreeSet<Word>, b: &BTreeSet<Word>, max_len: usize) -> BTreeSet<Word> {
    let mut out = BTreeSet::new();
    for u in a {
        for v in b {
            if u.len() + v.len() <= max_len {
                out.extend(interleave(u, v));
            }
        }
    }
    out
}

pub fn concat_set(a: &BTreeSet<Word>, b: &BTreeSet<Word>, max_len: usize) -> BTreeSet<Word> {
    let mut out = BTreeSet::new();
    for u in a {
        for v in b {
            if u.len() + v.len() <= max_len {
                out.insert(cat(&[u.clone(), v.clone()]));
            }
        }
    }
    out
}

/// Replaces every letter by each of its images, keeping results of length
/// at most `max_len`.
pub fn substitute_set(
    words: &BTreeSet<Word>,
    images: &BTreeMap<Letter, BTreeSet<Word>>,
    max_len: usize,
) -> BTreeSet<Word> {
    let mut out = BTreeSet::new();
    for w in words {
        let mut partial: BTreeSet<Word> = BTreeSet::from([Vec::new()]);
        for l in w {
            let mut next = BTreeSet::new();
            for p in &partial {
                for img in &images[l] {
                    if p.len() + img.len() <= max_len {
                        next.insert(cat(&[p.clone(), img.clone()]));
                    }
                }
            }
            partial = next;
        }
        out.extend(partial);
    }
    out
}

/// A random term over atoms `0..4`.
pub fn random_term(rng: &mut ChaCha8Rng, depth: usize) -> PaTerm {
    if depth == 0 || rng.gen_bool(0.3) {
        return if rng.gen_bool(0.1) { PaTerm::Empty } else { PaTerm::Atom(Nt(rng.gen_range(0..4))) };
    }
    let n = rng.gen_range(0..=3);
    let parts = (0..n).map(|_| random_term(rng, depth - 1)).collect();
    if rng.gen_bool(0.5) {
        PaTerm::Seq(parts)
    } else {
        PaTerm::Par(parts)
    }
}

/// Regroups children into random nestings of the same operator, permutes
/// parallel children and sprinkles empty terms.
pub fn reassociate(rng: &mut ChaCha8Rng, t: &PaTerm) -> PaTerm {
    fn regroup(rng: &mut ChaCha8Rng, mut parts: Vec<PaTerm>, seq: bool) -> PaTerm {
        if rng.gen_bool(0.3) {
            let at = rng.gen_range(0..=parts.len());
            parts.insert(at, PaTerm::Empty);
        }
        if parts.len() > 2 && rng.gen_bool(0.5) {
            let i = rng.gen_range(0..parts.len() - 1);
            let j = rng.gen_range(i + 1..=parts.len());
            let inner: Vec<PaTerm> = parts.drain(i..j).collect();
            let inner = regroup(rng, inner, seq);
            parts.insert(i, inner);
        }
        if seq {
            PaTerm::Seq(parts)
        } else {
            PaTerm::Par(parts)
        }
    }
    match t {
        PaTerm::Empty | PaTerm::Atom(_) => t.clone(),
        PaTerm::Seq(v) => {
            let parts = v.iter().map(|c| reassociate(rng, c)).collect();
            regroup(rng, parts, true)
        }
        PaTerm::Par(v) => {
            let mut parts: Vec<PaTerm> = v.iter().map(|c| reassociate(rng, c)).collect();
            parts.shuffle(rng);
            regroup(rng, parts, false)
        }
    }
}
