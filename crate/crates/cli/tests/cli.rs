//! Runs the binary and compares its verdicts with direct library calls.

use std::fs;
use std::path::PathBuf;
use std::process::Command;

use pccfl::engine::{enumerate, member};
use pccfl::gallery;
use pccfl::tree::CertificateDoc;
use pccfl::word::{display, parse};
use serde_json::Value;

struct Run {
    code: i32,
    stdout: String,
}

fn pccfl(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_pccfl")).args(args).output().expect("binary runs");
    Run { code: out.status.code().expect("exit code"), stdout: String::from_utf8(out.stdout).expect("utf-8") }
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let r = pccfl(&all);
    (r.code, serde_json::from_str(&r.stdout).expect("valid JSON"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pccfl-cli-{}-{name}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn membership_examples() {
    let r = pccfl(&["member", "gallery:ex2", "absccab"]);
    assert_eq!((r.code, r.stdout.trim()), (0, "true"));
    let r = pccfl(&["member", "gallery:ex1", "ab"]);
    assert_eq!((r.code, r.stdout.trim()), (1, "false"));
    let (code, v) = json(&["enumerate", "gallery:ex2", "--max-len", "4"]);
    assert_eq!(code, 0);
    assert_eq!(v, serde_json::json!(["s", "asca", "bscb"]));
}

#[test]
fn verdicts_match_the_library() {
    let g = gallery::ex2();
    for w in ["s", "asca", "abscbca", "absccba", "abscbac", "ss", "bscb"] {
        let want = member(&g, &parse(w)).unwrap();
        let r = pccfl(&["member", "gallery:ex2", w]);
        assert_eq!(r.code, if want { 0 } else { 1 }, "{w}");
        assert_eq!(r.stdout.trim(), want.to_string());
    }
    let (_, v) = json(&["enumerate", "gallery:l3-grammar", "--max-len", "7"]);
    let want: Vec<String> = enumerate(&gallery::l3_grammar(), 7).unwrap().iter().map(|w| display(w)).collect();
    assert_eq!(v, serde_json::json!(want));
}

#[test]
fn certificates_round_trip_through_files() {
    let dir = scratch("cert");
    let path = dir.join("cert.json");
    let r = pccfl(&["witness", "gallery:ex2", "absccab", "--cert-out", path.to_str().unwrap()]);
    assert_eq!(r.code, 0);
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(CertificateDoc::from_json(&text).unwrap().to_json(), text);
    assert_eq!(pccfl(&["verify-cert", "gallery:ex2", path.to_str().unwrap()]).code, 0);
    assert_eq!(pccfl(&["verify-cert", "gallery:l3-grammar", path.to_str().unwrap()]).code, 1);
    let tampered = text.replacen("\"b\"", "\"a\"", 1);
    fs::write(&path, tampered).unwrap();
    assert_eq!(pccfl(&["verify-cert", "gallery:ex2", path.to_str().unwrap()]).code, 1);
    let (_, v) = json(&["witness", "gallery:ex2", "absccab"]);
    let doc: CertificateDoc = serde_json::from_value(v["certificate"].clone()).unwrap();
    assert_eq!(doc.order, vec![1, 2, 4, 5, 3, 7, 6]);
}

#[test]
fn closure_commands_emit_loadable_grammars() {
    let dir = scratch("closures");
    let out = dir.join("u.pcg");
    assert_eq!(pccfl(&["union", "gallery:ex2", "gallery:l3-grammar", "-o", out.to_str().unwrap()]).code, 0);
    let u = pccfl::pcg::parse(&fs::read_to_string(&out).unwrap()).unwrap();
    let direct = pccfl::closure::union(&gallery::ex2(), &gallery::l3_grammar()).unwrap();
    assert_eq!(enumerate(&u, 7).unwrap(), enumerate(&direct, 7).unwrap());
    for op in ["shuffle", "concat"] {
        let r = pccfl(&[op, "gallery:l3-grammar", "gallery:singleton-d"]);
        assert_eq!(r.code, 0);
        assert!(pccfl::pcg::parse(&r.stdout).is_ok(), "{op}");
    }
    let r = pccfl(&["subst", "gallery:singleton-d", "--sub", "d=gallery:ex2"]);
    let g = pccfl::pcg::parse(&r.stdout).unwrap();
    assert_eq!(enumerate(&g, 7).unwrap(), enumerate(&gallery::ex2(), 7).unwrap());
    let r = pccfl(&["hom", "gallery:l3-cfg+indep", "--hom", "a=x", "--hom", "s=y", "--hom", "b=z", "--hom", "c=z"]);
    let g = pccfl::pcg::parse(&r.stdout).unwrap();
    assert!(member(&g, &parse("xyzz")).unwrap());
    assert_eq!(pccfl(&["hom", "gallery:ex2", "--hom", "a=b"]).code, 2);
}

#[test]
fn automata_and_pa_commands() {
    let r = pccfl(&["to-mpda", "gallery:ex1"]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.contains("not transitive"));
    let dir = scratch("mpda");
    let path = dir.join("ex2.mpda");
    assert_eq!(pccfl(&["to-mpda", "gallery:ex2", "-o", path.to_str().unwrap()]).code, 0);
    assert_eq!(pccfl(&["mpda", "run", path.to_str().unwrap(), "abscbca"]).code, 0);
    assert_eq!(pccfl(&["mpda", "run", "gallery:ex2-mpda", "abscbac"]).code, 1);
    let (_, v) = json(&["mpda", "enum", path.to_str().unwrap(), "--max-len", "4"]);
    assert_eq!(v, serde_json::json!(["s", "asca", "bscb"]));
    let (_, v) = json(&["pa", "enum", "gallery:pa-example", "--max-len", "4"]);
    assert_eq!(v, serde_json::json!(["abcd", "abdc", "adbc"]));
    assert_eq!(pccfl(&["pa", "member", "gallery:pa-example", "acbd"]).code, 1);
}

#[test]
fn trace_closure_commands() {
    assert_eq!(pccfl(&["trace-closure", "member", "gallery:l6-cfg+indep", "a b a\u{304} d\u{304} c d"]).code, 0);
    assert_eq!(pccfl(&["trace-closure", "member", "gallery:l6-cfg+indep", "a a\u{304} d\u{304} b c d"]).code, 1);
    let dir = scratch("trace");
    let path = dir.join("l3.pcg");
    fs::write(&path, pccfl::pcg::print(&gallery::l3_cfg())).unwrap();
    assert_eq!(pccfl(&["trace-closure", "member", path.to_str().unwrap(), "ascb"]).code, 1);
    assert_eq!(pccfl(&["trace-closure", "member", path.to_str().unwrap(), "ascb", "--letter-indep", "b c"]).code, 0);
    let (_, v) = json(&["trace-closure", "class", "abc", "--letter-indep", "b c"]);
    assert_eq!(v, serde_json::json!(["abc", "acb"]));
}

#[test]
fn pump_exit_codes_follow_the_outcome() {
    assert_eq!(pccfl(&["pump", "--mode", "shuffle", "--N", "2", "--oracle", "builtin:anbn", "aaaabbbb"]).code, 0);
    let (code, v) = json(&["pump", "--mode", "shuffle", "--N", "4", "--oracle", "builtin:anbncn", "aaaaabbbbbccccc"]);
    assert_eq!((code, v["outcome"].as_str()), (1, Some("none")));
    let r = pccfl(&["pump", "--mode", "shuffle", "--N", "4", "--budget", "2", "--oracle", "builtin:anbncn", "aabbcc"]);
    assert_eq!(r.code, 3);
    assert_eq!(pccfl(&["pump", "--mode", "sideways", "--N", "2", "--oracle", "builtin:anbn", "ab"]).code, 2);
}

#[test]
fn gallery_commands() {
    let (_, v) = json(&["gallery", "list"]);
    assert_eq!(v.as_array().unwrap().len(), gallery::gallery_list().len());
    let r = pccfl(&["gallery", "get", "l3-grammar"]);
    assert!(r.stdout.contains("S -a-> S P"));
    assert_eq!(pccfl(&["gallery", "get", "nope"]).code, 2);
    let dir = scratch("export");
    assert_eq!(pccfl(&["gallery", "export", "invhom-witness", "--dir", dir.to_str().unwrap()]).code, 0);
    let l1 = dir.join("invhom-witness-l1.pcg");
    assert_eq!(pccfl(&["member", l1.to_str().unwrap(), "AASBT"]).code, 0);
    assert_eq!(pccfl(&["validate", dir.join("invhom-witness.pcg").to_str().unwrap()]).code, 0);
}

#[test]
fn usage_and_budget_errors() {
    assert_eq!(pccfl(&["member"]).code, 2);
    assert_eq!(pccfl(&["member", "/nonexistent.pcg", "a"]).code, 2);
    assert_eq!(pccfl(&["member", "gallery:pa-example", "a"]).code, 2);
    assert_eq!(pccfl(&["member", "gallery:ex2", "  "]).code, 2);
    assert_eq!(pccfl(&["member", "gallery:equal-abc", "aaaaabbbbbccccc", "--budget", "3"]).code, 3);
    let dir = scratch("invalid");
    let path = dir.join("bad.pcg");
    fs::write(&path, "start: S\nindependence: S S\nS -a-> S X\n").unwrap();
    let (code, v) = json(&["validate", path.to_str().unwrap()]);
    assert_eq!((code, v["valid"].as_bool()), (1, Some(false)));
    fs::write(&path, "start S\n").unwrap();
    assert_eq!(pccfl(&["validate", path.to_str().unwrap()]).code, 2);
}

#[test]
fn selftest_runs_a_criterion() {
    let r = pccfl(&["selftest", "--criterion", "1"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("PASS"));
    assert_eq!(pccfl(&["selftest", "--criterion", "11"]).code, 2);
}
