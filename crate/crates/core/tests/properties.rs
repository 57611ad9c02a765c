//! Randomized invariants.

use std::collections::BTreeSet;

use pccfl::acceptance::oracles::{interleave, random_grammar, random_term, reassociate};
use pccfl::engine::{canonical, derive_witness, enumerate, member, successors, swap_reachable};
use pccfl::gallery;
use pccfl::grammar::{dependence, threads, Grammar, Nt, RawGrammar, RawProduction};
use pccfl::mpda::{accepts, from_transitive_grammar};
use pccfl::pa::{normalize, pa_enumerate, pa_member};
use pccfl::pump::{check_decomposition, interleaving_member, Mode, Oracle, Predicate, PumpDecomposition};
use pccfl::trace::{closure_member, trace_class, word_trace_equivalent, LetterIndependence};
use pccfl::tree::{tree_from_derivation, verify_certificate, CertificateDoc};
use pccfl::word::{Letter, Word};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn word_over(alphabet: &'static [&'static str], max: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(prop::sample::select(alphabet), 1..=max)
        .prop_map(|v| v.into_iter().map(Letter::new).collect())
}

fn config(g: &Grammar, picks: &[usize]) -> Vec<Nt> {
    let nts: Vec<Nt> = g.nonterminals().collect();
    picks.iter().map(|&i| nts[i % nts.len()]).collect()
}

fn ex2_language(max: usize) -> BTreeSet<Word> {
    enumerate(&gallery::ex2(), max).unwrap().into_iter().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn canonical_is_idempotent_and_swap_equivalent(picks in prop::collection::vec(0usize..8, 0..7), which in 0usize..2) {
        let g = if which == 0 { gallery::ex1() } else { gallery::ex2() };
        let c = config(&g, &picks);
        let once = canonical(&g, &c);
        prop_assert_eq!(canonical(&g, once.symbols()), once.clone());
        prop_assert!(swap_reachable(&g, &c, once.symbols()));
        prop_assert_eq!(successors(&g, &c), successors(&g, once.symbols()));
    }

    #[test]
    fn member_agrees_with_enumerate(w in word_over(&["a", "b", "c", "s"], 7)) {
        let lang = ex2_language(7);
        prop_assert_eq!(member(&gallery::ex2(), &w).unwrap(), lang.contains(&w));
    }

    #[test]
    fn closure_with_empty_independence_is_membership(w in word_over(&["a", "b", "c", "s"], 7)) {
        let g = gallery::l3_cfg();
        prop_assert_eq!(closure_member(&g, &LetterIndependence::default(), &w).unwrap(), member(&g, &w).unwrap());
    }

    #[test]
    fn trace_equivalence_is_an_equivalence(
        u in word_over(&["a", "b", "c"], 6),
        pairs in prop::collection::vec((0usize..3, 0usize..3), 0..4),
        pick in 0usize..1000,
    ) {
        let names = ["a", "b", "c"];
        let ind = LetterIndependence::new(
            pairs.into_iter().filter(|(x, y)| x != y).map(|(x, y)| (Letter::new(names[x]), Letter::new(names[y]))),
        ).unwrap();
        prop_assert!(word_trace_equivalent(&u, &u, &ind));
        let class: Vec<Word> = trace_class(&u, &ind).unwrap().into_iter().collect();
        let v = &class[pick % class.len()];
        let w = &class[(pick / 7) % class.len()];
        prop_assert!(word_trace_equivalent(&u, v, &ind) && word_trace_equivalent(v, &u, &ind));
        prop_assert!(word_trace_equivalent(v, w, &ind));
        prop_assert_eq!(trace_class(v, &ind).unwrap(), class.iter().cloned().collect::<BTreeSet<_>>());
    }

    #[test]
    fn interleaving_matches_recursive_expansion(
        w in word_over(&["a", "b"], 6),
        u in word_over(&["a", "b"], 3),
        v in word_over(&["a", "b"], 3),
    ) {
        prop_assert_eq!(interleaving_member(&w, &u, &v), interleave(&u, &v).contains(&w));
    }

    #[test]
    fn normalization_laws(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_term(&mut rng, 4);
        let n = normalize(&t);
        prop_assert_eq!(normalize(&n), n.clone());
        prop_assert_eq!(normalize(&reassociate(&mut rng, &t)), n);
    }

    #[test]
    fn pa_member_agrees_with_enumerate(w in word_over(&["a", "b", "c", "d", "e"], 7)) {
        let g = gallery::pa_shuffle();
        let lang: BTreeSet<Word> = pa_enumerate(&g, 7).into_iter().collect();
        prop_assert_eq!(pa_member(&g, &w).unwrap(), lang.contains(&w));
    }

    #[test]
    fn mpda_agrees_with_grammar(w in word_over(&["a", "b", "c", "s"], 7)) {
        let m = from_transitive_grammar(&gallery::ex2()).unwrap();
        prop_assert_eq!(accepts(&m, &w).unwrap(), ex2_language(7).contains(&w));
    }

    #[test]
    fn pumping_checks_are_monotone_in_m(n in 1usize..6, xs in 0usize..4, ss in 1usize..3, zs in 0usize..4, big_m in 0usize..5) {
        let oracle = Oracle::Predicate(Predicate {
            name: "anbn".into(),
            alphabet: vec![Letter::new("a"), Letter::new("b")],
            test: gallery::is_anbn,
        });
        let a = |k| vec![Letter::new("a"); k];
        let b = |k| vec![Letter::new("b"); k];
        let w: Word = [a(n), b(n)].concat();
        let d = PumpDecomposition { mode: Mode::Shuffle, x: a(xs.min(n)), s: a(ss), y: Vec::new(), t: b(ss), z: b(zs), y_prime: None };
        if check_decomposition(&oracle, &w, &d, 4, big_m).unwrap().holds() {
            for m in 0..=big_m {
                prop_assert!(check_decomposition(&oracle, &w, &d, 4, m).unwrap().holds());
            }
        }
    }

    #[test]
    fn random_grammars_have_consistent_relations(seed in any::<u64>()) {
        let g = random_grammar(&mut ChaCha8Rng::seed_from_u64(seed));
        let dep = dependence(&g);
        for x in g.nonterminals() {
            for y in g.nonterminals() {
                let pair = if x <= y { (x, y) } else { (y, x) };
                prop_assert!(dep.contains(&pair) != g.independent(x, y));
            }
        }
        if let Ok(p) = threads(&g) {
            for x in g.nonterminals() {
                for y in g.nonterminals() {
                    prop_assert_eq!(p.thread_of(x) == p.thread_of(y), !g.independent(x, y));
                }
            }
        }
    }
}

#[test]
fn witnesses_replay_and_certificates_round_trip() {
    for g in [gallery::ex1(), gallery::ex2(), gallery::l3_grammar(), gallery::equal_abc()] {
        for w in enumerate(&g, 9).unwrap() {
            let d = derive_witness(&g, &w).unwrap().expect("enumerated words have witnesses");
            let trail = d.replay(&g).unwrap();
            assert!(trail.last().unwrap().is_empty());
            assert_eq!(d.production_steps(), w.len());
            let cert = tree_from_derivation(&g, &d).unwrap();
            assert_eq!(cert.tree.len(), w.len());
            assert!(verify_certificate(&g, &w, &cert).unwrap());
            let doc = CertificateDoc::from_certificate(&g, &w, &cert);
            let json = doc.to_json();
            let back = CertificateDoc::from_json(&json).unwrap();
            assert_eq!(back.to_json(), json);
            let (w2, cert2) = back.to_certificate(&g).unwrap();
            assert_eq!((w2, cert2), (w.clone(), cert));
        }
    }
}

#[test]
fn validation_flags_randomized_violations() {
    let base = gallery::ex2().to_raw();
    let mut broken = Vec::new();
    let mut r = base.clone();
    r.independence.push(("S".into(), "S".into()));
    broken.push(r);
    let mut r = base.clone();
    r.productions.push(RawProduction::new("S", "a", &["Q"]));
    broken.push(r);
    let mut r = base.clone();
    r.productions.push(RawProduction::new("S", "A", &[]));
    broken.push(r);
    let mut r: RawGrammar = base.clone();
    r.productions.retain(|p| p.lhs != "B'");
    broken.push(r);
    for r in broken {
        assert!(!pccfl::validate(&r).is_empty());
        assert!(Grammar::from_raw(&r).is_err());
    }
    assert!(pccfl::validate(&base).is_empty());
}
