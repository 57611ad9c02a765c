//! Command-line front end. Exit codes: 0 success, 1 negative answer,
//! 2 usage or parse error, 3 budget exhausted.

use std::collections::BTreeSet;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use pccfl::acceptance::{run_criterion, CRITERIA, DEFAULT_SEED};
use pccfl::closure::{self, LetterSubstitution};
use pccfl::engine::{self, derive_witness, EngineError, Step};
use pccfl::gallery::{gallery_get, gallery_list, Payload};
use pccfl::grammar::{threads, validate, Grammar};
use pccfl::mpda::{self, Mpda, MpdaError};
use pccfl::pa::{self, PaGrammar};
use pccfl::pcg;
use pccfl::pump::{self, find_decomposition, Mode, Oracle, OracleError, Outcome};
use pccfl::trace::{self, closure_member, trace_class_with_cap, LetterIndependence, TraceError};
use pccfl::tree::{tree_from_derivation, verify_certificate, CertificateDoc};
use pccfl::word::{display, parse_with_alphabet, Letter, Word};

#[derive(Parser)]
#[command(name = "pccfl")]
#[command(about = "Partially-commutative context-free grammars: membership, closures, automata and pumping")]
#[command(version)]
struct Cli {
    /// Print machine-readable JSON instead of text
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a grammar and report its threads
    Validate { grammar: String },
    /// Decide membership of a word
    Member {
        grammar: String,
        word: String,
        /// Visited-state budget
        #[arg(long, default_value_t = engine::DEFAULT_BUDGET)]
        budget: usize,
    },
    /// List every word up to a length, in shortlex order
    Enumerate {
        grammar: String,
        #[arg(long)]
        max_len: usize,
        #[arg(long, default_value_t = engine::DEFAULT_BUDGET)]
        budget: usize,
    },
    /// Find a derivation and its certificate
    Witness {
        grammar: String,
        word: String,
        /// Write the certificate JSON here
        #[arg(long)]
        cert_out: Option<PathBuf>,
    },
    /// Check a certificate file against a grammar
    VerifyCert { grammar: String, certificate: PathBuf },
    /// Grammar for the union of two languages
    Union {
        first: String,
        second: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Grammar for the shuffle of two languages
    Shuffle {
        first: String,
        second: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Grammar for the concatenation of two languages
    Concat {
        first: String,
        second: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Substitute a language for every letter
    Subst {
        grammar: String,
        /// LETTER=GRAMMAR, once per letter
        #[arg(long = "sub", required = true)]
        subs: Vec<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Homomorphic image
    Hom {
        grammar: String,
        /// LETTER=WORD, once per letter
        #[arg(long = "hom", required = true)]
        images: Vec<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Multi-stack automaton of a grammar with transitive dependence
    ToMpda {
        grammar: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Stateless multi-pushdown automata
    Mpda {
        #[command(subcommand)]
        command: MpdaCommand,
    },
    /// PA grammars
    Pa {
        #[command(subcommand)]
        command: PaCommand,
    },
    /// Trace closures of context-free languages
    TraceClosure {
        #[command(subcommand)]
        command: TraceCommand,
    },
    /// Check pumping conditions by exhaustive search
    Pump {
        #[arg(long, default_value = "shuffle")]
        mode: Mode,
        #[arg(long = "N")]
        n: usize,
        #[arg(long, default_value_t = 2)]
        max_m: usize,
        /// A .pcg, .mpda or .pag file, or builtin:NAME
        #[arg(long)]
        oracle: String,
        #[arg(long, default_value_t = pump::DEFAULT_BUDGET)]
        budget: usize,
        word: String,
    },
    /// Built-in languages
    Gallery {
        #[command(subcommand)]
        command: GalleryCommand,
    },
    /// Run the acceptance suite
    Selftest {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Run a single criterion
        #[arg(long)]
        criterion: Option<usize>,
    },
}

#[derive(Subcommand)]
enum MpdaCommand {
    /// Decide acceptance of a word
    Run { automaton: String, word: String },
    /// List accepted words up to a length
    Enum {
        automaton: String,
        #[arg(long)]
        max_len: usize,
    },
}

#[derive(Subcommand)]
enum PaCommand {
    /// Decide membership of a word
    Member { grammar: String, word: String },
    /// List words up to a length
    Enum {
        grammar: String,
        #[arg(long)]
        max_len: usize,
    },
}

#[derive(Subcommand)]
enum TraceCommand {
    /// Is the word trace equivalent to a word of the grammar?
    Member {
        grammar: String,
        word: String,
        /// Independent letter pairs, e.g. "b c, a d"
        #[arg(long)]
        letter_indep: Option<String>,
    },
    /// Every word trace equivalent to the given one
    Class {
        word: String,
        #[arg(long)]
        letter_indep: String,
        #[arg(long, default_value_t = trace::DEFAULT_CAP)]
        cap: usize,
    },
}

#[derive(Subcommand)]
enum GalleryCommand {
    /// Names of all entries
    List,
    /// Describe one entry
    Get { name: String },
    /// Write an entry's files
    Export {
        name: String,
        /// Target directory; standard output when absent
        #[arg(long)]
        dir: Option<PathBuf>,
    },
}

struct Output {
    code: u8,
    text: String,
    json: Value,
}

impl Output {
    fn ok(text: impl Into<String>, json: Value) -> Self {
        Output { code: 0, text: text.into(), json }
    }

    fn verdict(yes: bool, json: Value) -> Self {
        Output { code: if yes { 0 } else { 1 }, text: yes.to_string(), json }
    }
}

enum Failure {
    Usage(String),
    Budget(String),
}

type Res = Result<Output, Failure>;

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

fn engine_failure(e: EngineError) -> Failure {
    match e {
        EngineError::BudgetExhausted { .. } => Failure::Budget(e.to_string()),
        other => usage(other),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn gallery_name(source: &str) -> Option<&str> {
    source.strip_prefix("gallery:").or_else(|| source.strip_prefix("builtin:"))
}

fn entry(name: &str) -> Result<pccfl::gallery::GalleryEntry, Failure> {
    gallery_get(name).map_err(usage)
}

fn load_grammar(source: &str) -> Result<(Grammar, LetterIndependence), Failure> {
    if let Some(name) = gallery_name(source) {
        let e = entry(name)?;
        return match &e.payload {
            Payload::TraceCfl { cfg, independence } => Ok((cfg.clone(), independence.clone())),
            _ => e
                .grammar()
                .map(|g| (g.clone(), LetterIndependence::default()))
                .ok_or_else(|| usage(format!("gallery entry `{name}` is a {}, not a grammar", e.kind()))),
        };
    }
    trace::parse_with_letter_independence(&read(Path::new(source))?).map_err(usage)
}

fn load_mpda(source: &str) -> Result<Mpda, Failure> {
    if let Some(name) = gallery_name(source) {
        let e = entry(name)?;
        return match &e.payload {
            Payload::Mpda(m) => Ok(m.clone()),
            _ => Err(usage(format!("gallery entry `{name}` is a {}, not an automaton", e.kind()))),
        };
    }
    mpda::parse(&read(Path::new(source))?).map_err(usage)
}

fn load_pa(source: &str) -> Result<PaGrammar, Failure> {
    if let Some(name) = gallery_name(source) {
        let e = entry(name)?;
        return match &e.payload {
            Payload::Pa(g) => Ok(g.clone()),
            _ => Err(usage(format!("gallery entry `{name}` is a {}, not a PA grammar", e.kind()))),
        };
    }
    pa::parse(&read(Path::new(source))?).map_err(usage)
}

fn load_oracle(source: &str) -> Result<Oracle, Failure> {
    if let Some(name) = gallery_name(source) {
        return Ok(entry(name)?.oracle());
    }
    match Path::new(source).extension().and_then(|e| e.to_str()) {
        Some("mpda") => Ok(Oracle::Mpda(load_mpda(source)?)),
        Some("pag") => Ok(Oracle::Pa(load_pa(source)?)),
        _ => {
            let (g, ind) = load_grammar(source)?;
            Ok(if ind.is_empty() { Oracle::Grammar(g) } else { Oracle::TraceCfl { cfg: g, independence: ind } })
        }
    }
}

fn word(text: &str, alphabet: &BTreeSet<Letter>) -> Result<Word, Failure> {
    let w = parse_with_alphabet(text, alphabet);
    if w.is_empty() {
        return Err(usage("the empty word is never generated"));
    }
    Ok(w)
}

fn word_list(words: &[Word]) -> Output {
    let shown: Vec<String> = words.iter().map(|w| display(w)).collect();
    Output::ok(shown.join("\n"), json!(shown))
}

fn emit_grammar(g: &Grammar, output: &Option<PathBuf>) -> Res {
    let text = pcg::print(g);
    if let Some(path) = output {
        fs::write(path, &text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        return Ok(Output::ok(format!("wrote {}", path.display()), json!({"written": path, "grammar": text})));
    }
    Ok(Output::ok(text.trim_end(), json!({"grammar": text})))
}

fn cmd_validate(source: &str) -> Res {
    let raw = match gallery_name(source) {
        Some(_) => load_grammar(source)?.0.to_raw(),
        None => {
            let text = read(Path::new(source))?;
            let body: String = text
                .lines()
                .filter(|l| !pcg::strip_comment(l).trim().starts_with("letter-independence:"))
                .map(|l| format!("{l}\n"))
                .collect();
            pcg::parse_raw(&body).map_err(usage)?
        }
    };
    let diags = validate(&raw);
    if !diags.is_empty() {
        let lines: Vec<String> = diags.iter().map(|d| d.to_string()).collect();
        return Ok(Output { code: 1, text: lines.join("\n"), json: json!({"valid": false, "diagnostics": lines}) });
    }
    let g = Grammar::from_raw(&raw).map_err(usage)?;
    Ok(match threads(&g) {
        Ok(p) => {
            let blocks: Vec<Vec<&str>> = p.blocks.iter().map(|b| b.iter().map(|&x| g.name(x)).collect()).collect();
            Output::ok(format!("valid\nthreads: {}", p.format(&g)), json!({"valid": true, "threads": blocks}))
        }
        Err(t) => {
            let (x, y, z) = t.names(&g);
            Output::ok(
                format!("valid\ndependence is not transitive: {x} D {y}, {y} D {z}, {x} I {z}"),
                json!({"valid": true, "threads": null, "non_transitive": [x, y, z]}),
            )
        }
    })
}

fn cmd_witness(source: &str, text: &str, cert_out: &Option<PathBuf>) -> Res {
    let (g, _) = load_grammar(source)?;
    let w = word(text, &g.alphabet())?;
    let Some(d) = derive_witness(&g, &w).map_err(engine_failure)? else {
        return Ok(Output::verdict(false, json!({"word": display(&w), "member": false})));
    };
    let cert = tree_from_derivation(&g, &d).map_err(usage)?;
    let doc = CertificateDoc::from_certificate(&g, &w, &cert);
    if let Some(path) = cert_out {
        fs::write(path, doc.to_json()).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    }
    let steps: Vec<String> = d
        .steps
        .iter()
        .map(|s| match *s {
            Step::Produce(p) => format!("produce {}", g.format_production(p)),
            Step::Swap(i) => format!("swap {i}"),
        })
        .collect();
    let order: Vec<String> = cert.order.iter().map(|c| c.0.to_string()).collect();
    let text = format!("{}\n\n{}\norder: {}", d.format(&g), cert.tree.format(&g).trim_end(), order.join(" "));
    let certificate: Value = serde_json::from_str(&doc.to_json()).map_err(usage)?;
    Ok(Output::ok(text, json!({"word": display(&w), "member": true, "steps": steps, "certificate": certificate})))
}

fn cmd_verify_cert(source: &str, path: &Path) -> Res {
    let (g, _) = load_grammar(source)?;
    let doc = CertificateDoc::from_json(&read(path)?).map_err(usage)?;
    let ok = match doc.to_certificate(&g) {
        Ok((w, cert)) => verify_certificate(&g, &w, &cert).unwrap_or(false),
        Err(_) => false,
    };
    Ok(Output::verdict(ok, json!({"word": display(&doc.word), "valid": ok})))
}

fn cmd_subst(source: &str, subs: &[String], output: &Option<PathBuf>) -> Res {
    let (g, _) = load_grammar(source)?;
    let mut map = LetterSubstitution::new();
    for item in subs {
        let (l, path) = item.split_once('=').ok_or_else(|| usage(format!("expected LETTER=GRAMMAR, got `{item}`")))?;
        map.insert(Letter::new(l.trim()), load_grammar(path.trim())?.0);
    }
    emit_grammar(&closure::substitute_letters(&g, &map).map_err(usage)?, output)
}

fn cmd_to_mpda(source: &str, output: &Option<PathBuf>) -> Res {
    let (g, _) = load_grammar(source)?;
    match mpda::from_transitive_grammar(&g) {
        Ok(m) => {
            let text = mpda::print(&m);
            if let Some(path) = output {
                fs::write(path, &text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
                return Ok(Output::ok(format!("wrote {}", path.display()), json!({"written": path, "mpda": text})));
            }
            Ok(Output::ok(text.trim_end(), json!({"mpda": text})))
        }
        Err(MpdaError::NotTransitive(t)) => {
            let (x, y, z) = t.names(&g);
            Ok(Output {
                code: 1,
                text: format!("dependence is not transitive: {x} D {y}, {y} D {z}, {x} I {z}"),
                json: json!({"transitive": false, "witness": [x, y, z]}),
            })
        }
        Err(e) => Err(usage(e)),
    }
}

fn cmd_mpda(command: &MpdaCommand) -> Res {
    match command {
        MpdaCommand::Run { automaton, word: text } => {
            let m = load_mpda(automaton)?;
            let w = word(text, &m.alphabet())?;
            let yes = mpda::accepts(&m, &w).map_err(usage)?;
            Ok(Output::verdict(yes, json!({"word": display(&w), "accepted": yes})))
        }
        MpdaCommand::Enum { automaton, max_len } => {
            Ok(word_list(&mpda::enumerate_mpda(&load_mpda(automaton)?, *max_len)))
        }
    }
}

fn cmd_pa(command: &PaCommand) -> Res {
    match command {
        PaCommand::Member { grammar, word: text } => {
            let g = load_pa(grammar)?;
            let w = word(text, &g.alphabet())?;
            let yes = pa::pa_member(&g, &w).map_err(usage)?;
            Ok(Output::verdict(yes, json!({"word": display(&w), "member": yes})))
        }
        PaCommand::Enum { grammar, max_len } => Ok(word_list(&pa::pa_enumerate(&load_pa(grammar)?, *max_len))),
    }
}

fn trace_failure(e: TraceError) -> Failure {
    match e {
        TraceError::Engine(e) => engine_failure(e),
        TraceError::CapExceeded { .. } => Failure::Budget(e.to_string()),
        other => usage(other),
    }
}

fn cmd_trace(command: &TraceCommand) -> Res {
    match command {
        TraceCommand::Member { grammar, word: text, letter_indep } => {
            let (g, mut ind) = load_grammar(grammar)?;
            if let Some(pairs) = letter_indep {
                ind = ind.union(&LetterIndependence::parse(pairs).map_err(usage)?);
            }
            let w = word(text, &g.alphabet())?;
            let yes = match closure_member(&g, &ind, &w) {
                Err(TraceError::Engine(EngineError::UnknownLetter(_))) => false,
                other => other.map_err(trace_failure)?,
            };
            Ok(Output::verdict(yes, json!({"word": display(&w), "member": yes})))
        }
        TraceCommand::Class { word: text, letter_indep, cap } => {
            let ind = LetterIndependence::parse(letter_indep).map_err(usage)?;
            let alphabet: BTreeSet<Letter> = ind.pairs().iter().flat_map(|(x, y)| [x.clone(), y.clone()]).collect();
            let w = word(text, &alphabet)?;
            let class: Vec<Word> = trace_class_with_cap(&w, &ind, *cap).map_err(trace_failure)?.into_iter().collect();
            Ok(word_list(&class))
        }
    }
}

fn cmd_pump(mode: Mode, n: usize, max_m: usize, oracle: &str, budget: usize, text: &str) -> Res {
    let oracle = load_oracle(oracle)?;
    let w = word(text, &oracle.alphabet())?;
    let report = find_decomposition(&oracle, &w, n, mode, max_m, budget).map_err(|e| match e {
        OracleError::Budget => Failure::Budget(e.to_string()),
        other => usage(other),
    })?;
    let code = match report.outcome {
        Outcome::Found(..) => 0,
        Outcome::None => 1,
        Outcome::BudgetExhausted => 3,
    };
    let mut text = format!("{mode} pumping of {} with N = {n}, M = {max_m}\n", display(&w));
    if !report.word_in_language {
        text.push_str("warning: the word is not in the language\n");
    }
    if let Outcome::Found(d, checks) = &report.outcome {
        let part =
            |name: &str, u: &Word| format!("  {name} = {}\n", if u.is_empty() { "ε".to_string() } else { display(u) });
        text.push_str("found:\n");
        text.push_str(&part("x", &d.x));
        text.push_str(&part("s", &d.s));
        if let Some(yp) = &d.y_prime {
            text.push_str(&part("y'", yp));
        }
        text.push_str(&part("y", &d.y));
        text.push_str(&part("t", &d.t));
        text.push_str(&part("z", &d.z));
        for p in &checks.pumped {
            text.push_str(&format!("  m = {}: {} {}\n", p.m, display(&p.word), if p.member { "in" } else { "out" }));
        }
    }
    text.push_str(&format!("{} candidates examined; {}", report.candidates, report.note()));
    Ok(Output { code, text, json: report.to_json() })
}

fn cmd_gallery(command: &GalleryCommand) -> Res {
    match command {
        GalleryCommand::List => {
            let names = gallery_list();
            Ok(Output::ok(names.join("\n"), json!(names)))
        }
        GalleryCommand::Get { name } => {
            let e = entry(name)?;
            let classes: Vec<String> = e.classes.iter().map(|c| c.to_string()).collect();
            let files = e.export().unwrap_or_default();
            let mut text = format!("{} ({})\n{}\nclasses: {}", e.name, e.kind(), e.description, classes.join(", "));
            for (file, body) in &files {
                text.push_str(&format!("\n\n# {file}\n{}", body.trim_end()));
            }
            let files: serde_json::Map<String, Value> = files.into_iter().map(|(f, b)| (f, json!(b))).collect();
            Ok(Output::ok(
                text,
                json!({"name": e.name, "kind": e.kind(), "description": e.description, "classes": classes, "files": files}),
            ))
        }
        GalleryCommand::Export { name, dir } => {
            let files = entry(name)?.export().map_err(usage)?;
            match dir {
                Some(dir) => {
                    fs::create_dir_all(dir).map_err(|e| usage(format!("{}: {e}", dir.display())))?;
                    let mut written = Vec::new();
                    for (file, body) in files {
                        let path = dir.join(file);
                        fs::write(&path, body).map_err(|e| usage(format!("{}: {e}", path.display())))?;
                        written.push(path.display().to_string());
                    }
                    Ok(Output::ok(written.join("\n"), json!(written)))
                }
                None => {
                    let text: Vec<String> = files.iter().map(|(f, b)| format!("# {f}\n{}", b.trim_end())).collect();
                    let map: serde_json::Map<String, Value> = files.into_iter().map(|(f, b)| (f, json!(b))).collect();
                    Ok(Output::ok(text.join("\n\n"), Value::Object(map)))
                }
            }
        }
    }
}

fn cmd_selftest(seed: u64, only: Option<usize>) -> Res {
    let ids: Vec<usize> = match only {
        Some(k) if (1..=CRITERIA).contains(&k) => vec![k],
        Some(k) => return Err(usage(format!("criteria are numbered 1 to {CRITERIA}, got {k}"))),
        None => (1..=CRITERIA).collect(),
    };
    let results: Vec<_> = ids.into_iter().map(|id| run_criterion(id, seed)).collect();
    let lines: Vec<String> = results.iter().map(|r| r.line()).collect();
    let all = results.iter().all(|r| r.passed());
    let json = json!({
        "seed": seed,
        "passed": all,
        "criteria": results.iter().map(|r| json!({
            "id": r.id,
            "name": r.name,
            "passed": r.passed(),
            "seconds": r.elapsed.as_secs_f64(),
            "limit_seconds": r.limit.as_secs(),
            "detail": r.detail,
        })).collect::<Vec<_>>(),
    });
    Ok(Output { code: if all { 0 } else { 1 }, text: lines.join("\n"), json })
}

fn run(cli: &Cli) -> Res {
    match &cli.command {
        Command::Validate { grammar } => cmd_validate(grammar),
        Command::Member { grammar, word: text, budget } => {
            let (g, _) = load_grammar(grammar)?;
            let w = word(text, &g.alphabet())?;
            let yes = match engine::member_with_budget(&g, &w, *budget) {
                Err(EngineError::UnknownLetter(_)) => false,
                other => other.map_err(engine_failure)?,
            };
            Ok(Output::verdict(yes, json!({"word": display(&w), "member": yes})))
        }
        Command::Enumerate { grammar, max_len, budget } => {
            let (g, _) = load_grammar(grammar)?;
            Ok(word_list(&engine::enumerate_with_budget(&g, *max_len, *budget).map_err(engine_failure)?))
        }
        Command::Witness { grammar, word, cert_out } => cmd_witness(grammar, word, cert_out),
        Command::VerifyCert { grammar, certificate } => cmd_verify_cert(grammar, certificate),
        Command::Union { first, second, output } => {
            emit_grammar(&closure::union(&load_grammar(first)?.0, &load_grammar(second)?.0).map_err(usage)?, output)
        }
        Command::Shuffle { first, second, output } => {
            emit_grammar(&closure::shuffle(&load_grammar(first)?.0, &load_grammar(second)?.0).map_err(usage)?, output)
        }
        Command::Concat { first, second, output } => {
            emit_grammar(&closure::concat(&load_grammar(first)?.0, &load_grammar(second)?.0).map_err(usage)?, output)
        }
        Command::Subst { grammar, subs, output } => cmd_subst(grammar, subs, output),
        Command::Hom { grammar, images, output } => {
            let h = closure::parse_homomorphism(images.iter().map(String::as_str)).map_err(usage)?;
            emit_grammar(&closure::hom_image(&load_grammar(grammar)?.0, &h).map_err(usage)?, output)
        }
        Command::ToMpda { grammar, output } => cmd_to_mpda(grammar, output),
        Command::Mpda { command } => cmd_mpda(command),
        Command::Pa { command } => cmd_pa(command),
        Command::TraceClosure { command } => cmd_trace(command),
        Command::Pump { mode, n, max_m, oracle, budget, word } => cmd_pump(*mode, *n, *max_m, oracle, *budget, word),
        Command::Gallery { command } => cmd_gallery(command),
        Command::Selftest { seed, criterion } => cmd_selftest(*seed, *criterion),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let text = if cli.json { serde_json::to_string_pretty(&out.json).expect("serializable") } else { out.text };
            // A closed pipe is not an error worth reporting.
            if !text.is_empty() {
                let _ = writeln!(io::stdout().lock(), "{text}");
            }
            ExitCode::from(out.code)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("budget exhausted: {msg}");
            ExitCode::from(3)
        }
    }
}
