//! Gallery entries against their characterizations, plus cross-module
//! round trips.

use std::collections::BTreeSet;

use pccfl::acceptance::oracles::{all_words, ex1_expansion, l3_expansion};
use pccfl::engine::enumerate;
use pccfl::gallery::{self, gallery_get, gallery_list, Payload};
use pccfl::mpda::{self, enumerate_mpda, from_transitive_grammar, to_grammar};
use pccfl::pa::{self, pa_enumerate};
use pccfl::pump::{find_decomposition, Mode, DEFAULT_BUDGET};
use pccfl::trace::closure_member;
use pccfl::word::{parse, Word};

fn set(words: Vec<Word>) -> BTreeSet<Word> {
    words.into_iter().collect()
}

#[test]
fn entries_match_their_predicates() {
    let bounds = [
        ("ex1", 9),
        ("ex2", 10),
        ("ex2-mpda", 10),
        ("l3-grammar", 9),
        ("equal-abc", 9),
        ("l3-cfg+indep", 7),
        ("l6-cfg+indep", 6),
    ];
    for (name, len) in bounds {
        let e = gallery_get(name).unwrap();
        let p = e.predicate.clone().unwrap();
        let want: BTreeSet<Word> = all_words(&p.alphabet, len).into_iter().filter(|w| (p.test)(w)).collect();
        let got = match &e.payload {
            Payload::Grammar(g) => set(enumerate(g, len).unwrap()),
            Payload::Mpda(m) => set(enumerate_mpda(m, len)),
            Payload::TraceCfl { cfg, independence } => all_words(&p.alphabet, len)
                .into_iter()
                .filter(|w| closure_member(cfg, independence, w).unwrap())
                .collect(),
            _ => unreachable!(),
        };
        assert_eq!(got, want, "{name}");
    }
}

#[test]
fn worked_examples_expand_as_written() {
    assert_eq!(set(enumerate(&gallery::ex1(), 9).unwrap()), ex1_expansion(2));
    assert_eq!(set(enumerate(&gallery::l3_grammar(), 9).unwrap()), l3_expansion(2));
    assert_eq!(set(enumerate(&gallery::ex2(), 4).unwrap()), set(vec![parse("s"), parse("asca"), parse("bscb")]));
}

#[test]
fn mpda_round_trips() {
    let g = gallery::ex2();
    let m = from_transitive_grammar(&g).unwrap();
    let back = to_grammar(&m).unwrap();
    assert_eq!(set(enumerate(&back, 8).unwrap()), set(enumerate(&g, 8).unwrap()));
    let again = from_transitive_grammar(&back).unwrap();
    assert_eq!(set(enumerate_mpda(&again, 8)), set(enumerate_mpda(&m, 8)));
    let text = "stacks: 2\nstack 1: X\nstack 2: Y\ninitial: X\nX -a-> X ; Y\nX -b-> eps ; Y\nY -c-> eps ; eps\n";
    let hand = mpda::parse(text).unwrap();
    let via = from_transitive_grammar(&to_grammar(&hand).unwrap()).unwrap();
    assert_eq!(set(enumerate_mpda(&via, 8)), set(enumerate_mpda(&hand, 8)));
}

#[test]
fn mpda_runs_stay_in_stack_alphabets() {
    let m = from_transitive_grammar(&gallery::ex2()).unwrap();
    let mut frontier = vec![m.initial_config()];
    for _ in 0..6 {
        let mut next = Vec::new();
        for cfg in &frontier {
            for (_, succ) in m.steps(cfg) {
                for (i, stack) in succ.iter().enumerate() {
                    assert!(stack.iter().all(|s| m.stack_alphabets()[i].contains(s)));
                }
                next.push(succ);
            }
        }
        frontier = next;
    }
}

#[test]
fn sequential_pa_grammar_matches_its_context_free_twin() {
    let pag = pa::parse("start: S\nS -s->\nS -a-> S ; Y\nY -b-> C\nC -c->\n").unwrap();
    assert_eq!(set(pa_enumerate(&pag, 10)), set(enumerate(&gallery::l3_cfg(), 10).unwrap()));
}

#[test]
fn shuffle_cfl_words_pump_in_both_modes() {
    let oracle = gallery_get("pa-shuffle").unwrap().oracle();
    for w in pa_enumerate(&gallery::pa_shuffle(), 9).into_iter().filter(|w| w.len() > 3) {
        for mode in [Mode::Shuffle, Mode::Concat] {
            let r = find_decomposition(&oracle, &w, 3, mode, 2, DEFAULT_BUDGET).unwrap();
            assert!(r.found(), "{mode} {}", pccfl::word::display(&w));
        }
    }
}

#[test]
fn every_entry_is_listed_and_exportable_or_a_predicate() {
    for name in gallery_list() {
        let e = gallery_get(name).unwrap();
        assert_eq!(e.export().is_err(), e.kind() == "predicate", "{name}");
    }
}

#[test]
fn pump_report_json_states_the_bound() {
    let oracle = gallery_get("anbncn").unwrap().oracle();
    let r = find_decomposition(&oracle, &parse("aabbcc"), 2, Mode::Shuffle, 2, DEFAULT_BUDGET).unwrap();
    let j = r.to_json();
    assert_eq!(j["outcome"], "none");
    assert!(j["note"].as_str().unwrap().contains("not a proof"));
    let r =
        find_decomposition(&gallery_get("anbn").unwrap().oracle(), &parse("aabb"), 2, Mode::Shuffle, 2, DEFAULT_BUDGET)
            .unwrap();
    assert_eq!(r.to_json()["outcome"], "found");
}
