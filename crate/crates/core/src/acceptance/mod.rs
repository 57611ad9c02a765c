//! The acceptance suite: ten end-to-end checks, each against a reference
//! computed independently of the engine under test. Shared by the
//! `acceptance` test target and the `selftest` command.

pub mod oracles;

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::closure::{self, Homomorphism, LetterSubstitution};
use crate::engine::{derive_witness, enumerate, member};
use crate::gallery::{self, gallery_get, gallery_list, Class, GalleryEntry, Payload};
use crate::grammar::{threads, Grammar};
use crate::mpda::{enumerate_mpda, from_transitive_grammar, to_grammar, MpdaError};
use crate::pa::{normalize, pa_enumerate};
use crate::pump::{self, find_decomposition, Mode, Oracle, Outcome};
use crate::trace::{closure_member, trace_class};
use crate::tree::{tree_from_derivation, verify_certificate, words_of_tree, Certificate, DerivationTree};
use crate::word::{display, Letter, Word};

use oracles::*;

pub const DEFAULT_SEED: u64 = 0x5eed_2024;

pub const CRITERIA: usize = 10;

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    /// Outcome of the checks themselves, ignoring time.
    pub checks_passed: bool,
    pub elapsed: Duration,
    pub limit: Duration,
    pub detail: String,
}

impl CriterionResult {
    pub fn passed(&self) -> bool {
        self.checks_passed && self.elapsed <= self.limit
    }

    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} {:<28} {} ({:.2}s, limit {}s): {}",
            self.id,
            self.name,
            if self.passed() { "PASS" } else { "FAIL" },
            self.elapsed.as_secs_f64(),
            self.limit.as_secs(),
            self.detail
        )
    }
}

/// Collects failed checks and a short summary.
#[derive(Default)]
struct Log {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Log {
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn note(&mut self, what: impl Into<String>) {
        self.notes.push(what.into());
    }

    fn finish(self) -> (bool, String) {
        let mut parts = self.notes;
        if !self.failures.is_empty() {
            let shown: Vec<String> = self.failures.iter().take(5).cloned().collect();
            parts.push(format!("{} failed check(s): {}", self.failures.len(), shown.join("; ")));
        }
        (self.failures.is_empty(), parts.join("; "))
    }
}

pub fn run_criterion(id: usize, seed: u64) -> CriterionResult {
    let (name, limit, run): (&'static str, u64, fn(u64) -> Log) = match id {
        1 => ("example-1 fidelity", 5, c1_example1),
        2 => ("example-2 fidelity", 30, c2_example2),
        3 => ("trace vs word semantics", 60, c3_trace_vs_word),
        4 => ("certificates", 60, c4_certificates),
        5 => ("closure constructions", 60, c5_closures),
        6 => ("mpda correspondence", 10, c6_mpda),
        7 => ("pumping positive", 120, c7_pumping_positive),
        8 => ("pumping negative", 120, c8_pumping_negative),
        9 => ("trace-closure witnesses", 60, c9_witnesses),
        10 => ("pa engine", 10, c10_pa),
        _ => panic!("criteria are numbered 1..={CRITERIA}"),
    };
    let started = Instant::now();
    let log = run(seed);
    let elapsed = started.elapsed();
    let (checks_passed, detail) = log.finish();
    CriterionResult { id, name, checks_passed, elapsed, limit: Duration::from_secs(limit), detail }
}

pub fn run_all(seed: u64) -> Vec<CriterionResult> {
    (1..=CRITERIA).map(|id| run_criterion(id, seed)).collect()
}

fn entry(name: &str) -> GalleryEntry {
    gallery_get(name).expect("built-in entry")
}

fn grammar(name: &str) -> Grammar {
    entry(name).grammar().expect("entry has a grammar").clone()
}

fn enumerate_set(g: &Grammar, max_len: usize) -> BTreeSet<Word> {
    enumerate(g, max_len).expect("desk-scale enumeration fits the budget").into_iter().collect()
}

fn alphabet_of(g: &Grammar) -> Vec<Letter> {
    g.alphabet().into_iter().collect()
}

fn show(words: &BTreeSet<Word>, limit: usize) -> String {
    let shown: Vec<String> = words.iter().take(limit).map(|w| display(w)).collect();
    format!("{{{}}}", shown.join(", "))
}

fn compare_sets(log: &mut Log, what: &str, got: &BTreeSet<Word>, want: &BTreeSet<Word>) {
    let missing: BTreeSet<Word> = want.difference(got).cloned().collect();
    let extra: BTreeSet<Word> = got.difference(want).cloned().collect();
    log.check(
        missing.is_empty() && extra.is_empty(),
        format!("{what}: missing {} extra {}", show(&missing, 3), show(&extra, 3)),
    );
}

fn c1_example1(_seed: u64) -> Log {
    let mut log = Log::default();
    let got = enumerate_set(&gallery::ex1(), 9);
    let want = ex1_expansion(2);
    for w in &want {
        let n = w.iter().filter(|l| l.as_str() == "a").count();
        let tail = &w[n + 1..];
        let left = [vec![Letter::new("b"); n], vec![Letter::new("b\u{304}")]].concat();
        let right = [vec![Letter::new("c\u{304}")], vec![Letter::new("c"); n]].concat();
        log.check(
            pump::interleaving_member(tail, &left, &right),
            format!("expansion word {} not an interleaving", display(w)),
        );
    }
    compare_sets(&mut log, "ex1 up to 9", &got, &want);
    let by_len: BTreeMap<usize, usize> = want.iter().fold(BTreeMap::new(), |mut m, w| {
        *m.entry(w.len()).or_default() += 1;
        m
    });
    log.note(format!("{} words, by length {:?}", got.len(), by_len));
    log
}

fn c2_example2(_seed: u64) -> Log {
    let mut log = Log::default();
    let g = gallery::ex2();
    for w in ["absccab", "abscbca"] {
        log.check(member(&g, &crate::word::parse(w)) == Ok(true), format!("{w} rejected"));
    }
    let got = enumerate_set(&g, 10);
    let want: BTreeSet<Word> = all_words(&alphabet_of(&g), 10).into_iter().filter(|w| gallery::is_ex2(w)).collect();
    compare_sets(&mut log, "ex2 up to 10", &got, &want);
    log.note(format!("{} words up to length 10", got.len()));
    log
}

fn c3_trace_vs_word(seed: u64) -> Log {
    let mut log = Log::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut grammars: Vec<(String, Grammar)> = vec![
        ("ex1".into(), gallery::ex1()),
        ("ex2".into(), gallery::ex2()),
        ("l3-grammar".into(), gallery::l3_grammar()),
    ];
    for i in 0..3 {
        grammars.push((format!("random-{i}"), random_grammar(&mut rng)));
    }
    let mut total = 0;
    for (name, g) in &grammars {
        let reference = naive_language(g, 7);
        let mut disagreements = 0;
        for w in all_words(&alphabet_of(g), 7) {
            total += 1;
            if member(g, &w) != Ok(reference.contains(&w)) {
                disagreements += 1;
            }
        }
        log.check(disagreements == 0, format!("{name}: {disagreements} disagreements"));
    }
    log.note(format!("{} grammars, {total} words compared", grammars.len()));
    log
}

fn gallery_grammars() -> Vec<(&'static str, Grammar)> {
    gallery_list().into_iter().filter_map(|n| gallery_get(n).ok()?.grammar().cloned().map(|g| (n, g))).collect()
}

fn c4_certificates(seed: u64) -> Log {
    let mut log = Log::default();
    let mut pool: Vec<(&str, Grammar, Word, Certificate)> = Vec::new();
    for (name, g) in gallery_grammars() {
        for w in enumerate_set(&g, 8) {
            let cert = derive_witness(&g, &w).ok().flatten().and_then(|d| tree_from_derivation(&g, &d).ok());
            match cert {
                Some(cert) => {
                    log.check(
                        verify_certificate(&g, &w, &cert) == Ok(true),
                        format!("{name}: certificate for {} rejected", display(&w)),
                    );
                    pool.push((name, g.clone(), w, cert));
                }
                None => log.check(false, format!("{name}: no certificate for {}", display(&w))),
            }
        }
    }
    let certified = pool.len();
    pool.retain(|(_, _, _, c)| c.order.len() >= 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut rejected, mut other_word) = (0, 0);
    for i in 0..200 {
        let (name, g, w, cert) = pool.choose(&mut rng).expect("non-empty pool");
        if i % 2 == 0 {
            let mut order = cert.order.clone();
            while order == cert.order {
                if rng.gen_bool(0.5) {
                    order.shuffle(&mut rng);
                } else {
                    let (a, b) = (rng.gen_range(0..order.len()), rng.gen_range(0..order.len()));
                    order.swap(a, b);
                }
            }
            let mutated = Certificate::new(cert.tree.clone(), order);
            let spelled = mutated.spelled(g).expect("same nodes");
            let for_w = verify_certificate(g, w, &mutated) == Ok(true);
            let for_spelled = verify_certificate(g, &spelled, &mutated) == Ok(true);
            let tree_words = words_of_tree(g, &cert.tree, usize::MAX).words;
            log.check(!for_w || spelled == *w, format!("{name}: permuted order accepted for {}", display(w)));
            log.check(
                !for_spelled || tree_words.contains(&spelled),
                format!("{name}: order spelling {} accepted outside words_of_tree", display(&spelled)),
            );
            if for_spelled {
                log.check(
                    member(g, &spelled) == Ok(true),
                    format!("{name}: {} accepted but not a member", display(&spelled)),
                );
                other_word += 1;
            } else {
                rejected += 1;
            }
        } else {
            let mut nodes: Vec<_> = cert.tree.nodes().cloned().collect();
            let k = rng.gen_range(0..nodes.len());
            let others: Vec<_> = g.nonterminals().filter(|&x| x != nodes[k].label).collect();
            let Some(&label) = others.choose(&mut rng) else {
                rejected += 1;
                continue;
            };
            nodes[k].label = label;
            let accepted = match DerivationTree::from_nodes(g, cert.tree.root(), nodes) {
                Err(_) => false,
                Ok(tree) => verify_certificate(g, w, &Certificate::new(tree, cert.order.clone())) == Ok(true),
            };
            log.check(!accepted, format!("{name}: relabeled tree accepted for {}", display(w)));
            if !accepted {
                rejected += 1;
            }
        }
    }
    log.note(format!(
        "{certified} certificates verified; 200 mutations: {rejected} rejected, {other_word} valid for another word of the same tree"
    ));
    log
}

fn images(sub: &LetterSubstitution, max_len: usize) -> BTreeMap<Letter, BTreeSet<Word>> {
    sub.iter().map(|(l, g)| (l.clone(), enumerate_set(g, max_len))).collect()
}

fn word_grammar(w: &str) -> Grammar {
    closure::word_grammar(&crate::word::parse(w)).expect("non-empty")
}

type Combine = fn(&Grammar, &Grammar) -> Result<Grammar, closure::ClosureError>;

fn c5_closures(_seed: u64) -> Log {
    const LEN: usize = 8;
    let mut log = Log::default();
    let pairs = [("ex2", "l3-grammar"), ("equal-abc", "singleton-d"), ("l3-cfg+indep", "ex1")];
    let mut checked = 0;
    for (n1, n2) in pairs {
        let (g1, g2) = (grammar(n1), grammar(n2));
        let (e1, e2) = (enumerate_set(&g1, LEN), enumerate_set(&g2, LEN));
        let ops: [(&str, Combine, BTreeSet<Word>); 3] = [
            ("union", closure::union, union_set(&e1, &e2)),
            ("shuffle", closure::shuffle, shuffle_set(&e1, &e2, LEN)),
            ("concat", closure::concat, concat_set(&e1, &e2, LEN)),
        ];
        for (op, f, want) in ops {
            let g = f(&g1, &g2).expect("closure construction");
            compare_sets(&mut log, &format!("{op}({n1}, {n2})"), &enumerate_set(&g, LEN), &want);
            checked += 1;
            if op != "concat" && threads(&g1).is_ok() && threads(&g2).is_ok() {
                log.check(threads(&g).is_ok(), format!("{op}({n1}, {n2}) lost transitivity"));
            }
        }
    }
    let subs: [(&str, Vec<(&str, Grammar)>); 2] = [
        (
            "l3-cfg+indep",
            vec![
                ("a", gallery::singleton_d()),
                ("s", gallery::l3_grammar()),
                ("b", word_grammar("b")),
                ("c", word_grammar("cc")),
            ],
        ),
        (
            "ex2",
            vec![
                ("a", gallery::l3_cfg()),
                ("b", word_grammar("b")),
                ("c", word_grammar("d")),
                ("s", word_grammar("s")),
            ],
        ),
    ];
    for (name, images_of) in subs {
        let g = grammar(name);
        let sub: LetterSubstitution = images_of.into_iter().map(|(l, h)| (Letter::new(l), h)).collect();
        let got = enumerate_set(&closure::substitute_letters(&g, &sub).expect("substitution"), LEN);
        let want = substitute_set(&enumerate_set(&g, LEN), &images(&sub, LEN), LEN);
        compare_sets(&mut log, &format!("substitute({name})"), &got, &want);
        checked += 1;
    }
    let homs: [(&str, &[&str]); 2] =
        [("ex2", &["a=aa", "b=b", "c=c", "s=ss"]), ("l3-cfg+indep", &["a=A", "s=S S", "b=B B", "c=C"])];
    for (name, items) in homs {
        let g = grammar(name);
        let h: Homomorphism = closure::parse_homomorphism(items.iter().copied()).expect("valid");
        let got = enumerate_set(&closure::hom_image(&g, &h).expect("hom image"), LEN);
        let singletons = h.iter().map(|(l, w)| (l.clone(), BTreeSet::from([w.clone()]))).collect();
        let want = substitute_set(&enumerate_set(&g, LEN), &singletons, LEN);
        compare_sets(&mut log, &format!("hom({name})"), &got, &want);
        checked += 1;
    }
    log.note(format!("{checked} constructions compared up to length {LEN}"));
    log
}

fn c6_mpda(_seed: u64) -> Log {
    let mut log = Log::default();
    let g = gallery::ex2();
    let want = enumerate_set(&g, 8);
    match from_transitive_grammar(&g) {
        Ok(m) => {
            let got: BTreeSet<Word> = enumerate_mpda(&m, 8).into_iter().collect();
            compare_sets(&mut log, "mpda(ex2)", &got, &want);
            match to_grammar(&m) {
                Ok(back) => compare_sets(&mut log, "to_grammar(mpda(ex2))", &enumerate_set(&back, 8), &want),
                Err(e) => log.check(false, format!("to_grammar failed: {e}")),
            }
            log.note(format!("{} stacks, {} words up to 8", m.stack_count(), want.len()));
        }
        Err(e) => log.check(false, format!("ex2 conversion failed: {e}")),
    }
    let ex1 = gallery::ex1();
    match from_transitive_grammar(&ex1) {
        Err(MpdaError::NotTransitive(t)) => {
            let dep = |x, y| !ex1.independent(x, y);
            log.check(
                dep(t.x, t.y) && dep(t.y, t.z) && !dep(t.x, t.z),
                "witness triple is not a transitivity violation",
            );
            let (x, y, z) = t.names(&ex1);
            log.note(format!("ex1 rejected: {x} D {y}, {y} D {z}, {x} I {z}"));
        }
        other => log.check(false, format!("ex1 conversion gave {other:?}")),
    }
    log
}

/// Words of the entry's language of length at most `max_len`.
fn entry_words(e: &GalleryEntry, max_len: usize) -> BTreeSet<Word> {
    match &e.payload {
        Payload::Grammar(g) | Payload::Witness { language: g, .. } => enumerate_set(g, max_len),
        Payload::Mpda(m) => enumerate_mpda(m, max_len).into_iter().collect(),
        Payload::Pa(g) => pa_enumerate(g, max_len).into_iter().collect(),
        Payload::Predicate(p) => all_words(&p.alphabet, max_len).into_iter().filter(|w| (p.test)(w)).collect(),
        Payload::TraceCfl { .. } => BTreeSet::new(),
    }
}

/// Smallest `N` at which the search succeeds for `w`, if any up to `cap`.
fn smallest_working_n(oracle: &Oracle, w: &[Letter], mode: Mode, from: usize, cap: usize) -> Option<usize> {
    (from..=cap.min(w.len()))
        .find(|&n| find_decomposition(oracle, w, n, mode, 2, pump::DEFAULT_BUDGET).map(|r| r.found()).unwrap_or(false))
}

fn c7_pumping_positive(seed: u64) -> Log {
    const N: usize = 4;
    const M: usize = 2;
    let mut log = Log::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut summary = Vec::new();
    for name in gallery_list() {
        let e = entry(name);
        let shuffle_mode = e.classes.iter().any(|c| matches!(c, Class::Pccfl | Class::ShuffleCfl));
        if !shuffle_mode || matches!(e.payload, Payload::TraceCfl { .. }) {
            continue;
        }
        let concat_mode = e.classes.iter().any(|c| matches!(c, Class::TrPcCfl | Class::ShuffleCfl));
        let candidates: Vec<Word> = entry_words(&e, 14).into_iter().filter(|w| w.len() > N).collect();
        let mut sample: Vec<Word> = candidates.choose_multiple(&mut rng, 10).cloned().collect();
        sample.sort_by(|a, b| crate::word::shortlex(a, b));
        let oracle = e.oracle();
        let modes: &[Mode] = if concat_mode { &[Mode::Shuffle, Mode::Concat] } else { &[Mode::Shuffle] };
        for &mode in modes {
            let mut failed: Vec<&Word> = Vec::new();
            for w in &sample {
                let found = find_decomposition(&oracle, w, N, mode, M, pump::DEFAULT_BUDGET)
                    .map(|r| r.found())
                    .unwrap_or(false);
                if !found {
                    failed.push(w);
                }
            }
            summary.push(format!("{name}/{mode} {}/{}", sample.len() - failed.len(), sample.len()));
            if let Some(w) = failed.first() {
                let evidence = match smallest_working_n(&oracle, w, mode, N + 1, 8) {
                    Some(n) => format!("succeeds from N = {n}"),
                    None => "no N up to 8 works".to_string(),
                };
                log.check(
                    false,
                    format!(
                        "{name}/{mode}: {} of {} words fail, e.g. {} ({evidence})",
                        failed.len(),
                        sample.len(),
                        display(w)
                    ),
                );
            }
        }
    }
    log.note(summary.join(", "));
    log
}

fn c8_pumping_negative(_seed: u64) -> Log {
    let mut log = Log::default();
    let cases = [
        (entry("anbncn").oracle(), "a a a a a b b b b b c c c c c", 4, Mode::Shuffle),
        (Oracle::Grammar(gallery::ex1()), "a a a a a\u{304} b b b b b\u{304} c\u{304} c c c c", 3, Mode::Concat),
    ];
    for (oracle, w, n, mode) in cases {
        let w = crate::word::parse(w);
        match find_decomposition(&oracle, &w, n, mode, 2, pump::DEFAULT_BUDGET) {
            Ok(r) => {
                log.check(r.word_in_language, format!("{} is not in the language", display(&w)));
                log.check(r.outcome == Outcome::None, format!("{mode} search on {}: {:?}", display(&w), r.outcome));
                log.note(format!("{mode} {}: {} candidates, none pass", display(&w), r.candidates));
            }
            Err(e) => log.check(false, format!("oracle error: {e}")),
        }
    }
    log
}

/// Words at edit distance one from `w` over `alphabet`.
fn neighbours(w: &[Letter], alphabet: &[Letter]) -> Vec<Word> {
    let mut out = Vec::new();
    for i in 0..=w.len() {
        for l in alphabet {
            out.push([&w[..i], std::slice::from_ref(l), &w[i..]].concat());
            if i < w.len() {
                let mut v = w.to_vec();
                v[i] = l.clone();
                out.push(v);
            }
        }
        if i < w.len() {
            out.push([&w[..i], &w[i + 1..]].concat());
        }
        if i + 1 < w.len() {
            let mut v = w.to_vec();
            v.swap(i, i + 1);
            out.push(v);
        }
    }
    out.retain(|v| !v.is_empty());
    out
}

fn c9_witnesses(_seed: u64) -> Log {
    let mut log = Log::default();
    let l3 = gallery::l3_grammar();
    let want = l3_expansion(2);
    compare_sets(&mut log, "l3-grammar up to 9", &enumerate_set(&l3, 9), &want);
    let (l3_cfg, l3_ind) = (gallery::l3_cfg(), gallery::l3_independence());
    let mut l3_words = 0;
    for w in all_words(&alphabet_of(&l3_cfg), 9) {
        l3_words += 1;
        let closure = closure_member(&l3_cfg, &l3_ind, &w).expect("within cap");
        if closure != want.contains(&w) {
            log.check(false, format!("l3 closure membership of {} is {closure}", display(&w)));
        }
    }
    let (l6_cfg, l6_ind) = (gallery::l6_cfg(), gallery::l6_independence());
    let predicate = l6_expansion(2);
    let mut generated = BTreeSet::new();
    for w in enumerate_set(&l6_cfg, 12) {
        generated.extend(trace_class(&w, &l6_ind).expect("within cap"));
    }
    compare_sets(&mut log, "l6 closure of generator vs predicate", &generated, &predicate);
    let alphabet = alphabet_of(&l6_cfg);
    let mut probes: BTreeSet<Word> = generated.union(&predicate).cloned().collect();
    for w in predicate.iter() {
        probes.extend(neighbours(w, &alphabet).into_iter().filter(|v| v.len() <= 12));
    }
    probes.extend(all_words(&alphabet, 6));
    for w in &probes {
        let closure = closure_member(&l6_cfg, &l6_ind, w).expect("within cap");
        log.check(closure == gallery::is_l6(w), format!("l6 closure membership of {} is {closure}", display(w)));
        log.check(
            predicate.contains(w) == gallery::is_l6(w),
            format!("l6 predicate and expansion disagree on {}", display(w)),
        );
    }
    log.note(format!(
        "l3: {} words, {l3_words} probed; l6: {} words, {} probed",
        want.len(),
        predicate.len(),
        probes.len()
    ));
    log
}

fn c10_pa(seed: u64) -> Log {
    let mut log = Log::default();
    let g = gallery::pa_example();
    let got: BTreeSet<Word> = pa_enumerate(&g, 4).into_iter().collect();
    let bc = crate::word::parse("bc");
    let want: BTreeSet<Word> =
        interleave(&bc, &crate::word::parse("d")).into_iter().map(|w| [crate::word::parse("a"), w].concat()).collect();
    compare_sets(&mut log, "pa-example", &got, &want);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    for _ in 0..1000 {
        let t = random_term(&mut rng, 4);
        let n = normalize(&t);
        let r = reassociate(&mut rng, &t);
        if normalize(&n) != n || normalize(&r) != n {
            failures += 1;
        }
    }
    log.check(failures == 0, format!("{failures} of 1000 terms violate normalization laws"));
    log.note(format!("{} words; 1000 random terms normalized", got.len()));
    log
}
