//! The `.pcg` grammar text format.
//!
//! ```text
//! # comment
//! start: S
//! independence: A B, C D      # or `all` / `none`
//! threads: {S A B} {A'} {B'}  # optional, checked against computed threads
//! S -a-> A B
//! A -b->
//! ```
//!
//! The letter sits between `-` and `->`. Letters that could be mistaken for
//! non-terminals or contain syntax characters are written in single quotes.

use thiserror::Error;

use crate::grammar::{is_nonterminal_name, Grammar, GrammarError, RawGrammar, RawProduction};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing `start:` line")]
    MissingStart,
    #[error(transparent)]
    Grammar(#[from] GrammarError),
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, message: message.into() }
}

pub fn strip_comment(line: &str) -> &str {
    // `#` inside a quoted letter (`-'...'->`) is not a comment; primes in
    // names like `A'` do not open quotes.
    let mut quoted = false;
    let mut prev = ' ';
    for (i, c) in line.char_indices() {
        match c {
            '\'' if quoted => quoted = false,
            '\'' if prev == '-' => quoted = true,
            '#' if !quoted => return &line[..i],
            _ => {}
        }
        prev = c;
    }
    line
}

/// Splits `LHS -label-> rest` into its three parts.
pub(crate) fn split_arrow(line: &str) -> Option<(&str, String, &str)> {
    let line = line.trim();
    let lhs_end = line.find(char::is_whitespace).unwrap_or(line.len());
    let lhs = &line[..lhs_end];
    let after = line[lhs_end..].trim_start();
    let after = after.strip_prefix('-')?;
    let (label, rest) = if let Some(q) = after.strip_prefix('\'') {
        let close = q.find('\'')?;
        let rest = q[close + 1..].strip_prefix("->")?;
        (q[..close].to_string(), rest)
    } else {
        let arrow = after.find("->")?;
        (after[..arrow].trim().to_string(), &after[arrow + 2..])
    };
    Some((lhs, label, rest))
}

pub fn parse_raw(text: &str) -> Result<RawGrammar, ParseError> {
    let mut raw = RawGrammar::default();
    let mut start = None;
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = strip_comment(line).trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("start:") {
            start = Some(rest.trim().to_string());
        } else if let Some(rest) = line.strip_prefix("independence:") {
            let rest = rest.trim();
            match rest {
                "all" => raw.all_independent = true,
                "none" | "" => {}
                _ => {
                    for pair in rest.split(',') {
                        let names: Vec<&str> = pair.split_whitespace().collect();
                        match names[..] {
                            [x, y] => raw.independence.push((x.to_string(), y.to_string())),
                            _ => {
                                return Err(syntax(
                                    lineno,
                                    format!("expected a pair of non-terminals, got `{}`", pair.trim()),
                                ))
                            }
                        }
                    }
                }
            }
        } else if let Some(rest) = line.strip_prefix("threads:") {
            let mut blocks = Vec::new();
            for chunk in rest.split('}') {
                let chunk = chunk.trim();
                if chunk.is_empty() {
                    continue;
                }
                let inner =
                    chunk.strip_prefix('{').ok_or_else(|| syntax(lineno, "threads are written as {A B} {C}"))?;
                blocks.push(inner.split_whitespace().map(str::to_string).collect());
            }
            raw.threads = Some(blocks);
        } else {
            let (lhs, letter, rest) =
                split_arrow(line).ok_or_else(|| syntax(lineno, format!("cannot parse production `{line}`")))?;
            let rhs: Vec<String> =
                rest.split_whitespace().filter(|s| *s != "eps" && *s != "ε").map(str::to_string).collect();
            raw.productions.push(RawProduction { lhs: lhs.to_string(), letter, rhs });
        }
    }
    raw.start = start.ok_or(ParseError::MissingStart)?;
    Ok(raw)
}

pub fn parse(text: &str) -> Result<Grammar, ParseError> {
    Ok(Grammar::from_raw(&parse_raw(text)?)?)
}

pub(crate) fn format_letter(letter: &str) -> String {
    let plain = !letter.is_empty()
        && !is_nonterminal_name(letter)
        && letter != "eps"
        && !letter.contains(|c: char| c.is_whitespace() || matches!(c, '-' | '>' | '#' | '\'' | ';' | '|' | '(' | ')'));
    if plain {
        letter.to_string()
    } else {
        format!("'{letter}'")
    }
}

pub fn print(g: &Grammar) -> String {
    print_raw(&g.to_raw())
}

pub fn print_raw(raw: &RawGrammar) -> String {
    let mut out = format!("start: {}\n", raw.start);
    if raw.all_independent {
        out.push_str("independence: all\n");
    } else if raw.independence.is_empty() {
        out.push_str("independence: none\n");
    } else {
        let pairs: Vec<String> = raw.independence.iter().map(|(x, y)| format!("{x} {y}")).collect();
        out.push_str(&format!("independence: {}\n", pairs.join(", ")));
    }
    if let Some(blocks) = &raw.threads {
        let b: Vec<String> = blocks.iter().map(|b| format!("{{{}}}", b.join(" "))).collect();
        out.push_str(&format!("threads: {}\n", b.join(" ")));
    }
    for p in &raw.productions {
        let letter = format_letter(&p.letter);
        if p.rhs.is_empty() {
            out.push_str(&format!("{} -{}->\n", p.lhs, letter));
        } else {
            out.push_str(&format!("{} -{}-> {}\n", p.lhs, letter, p.rhs.join(" ")));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;
    use crate::grammar::Diagnostic;

    const EX2: &str = "\
# running example with three threads
start: S
independence: S A', S B', A A', A B', B A', B B', A' B'
threads: {S A B} {A'} {B'}
S -s->
S -a-> S A   # comment after a prime-free line
S -b-> S B
A -c-> A'
B -c-> B'
A' -a->      # comment after a primed name
B' -b->   # empty right-hand side
";

    #[test]
    fn parses_example_two() {
        let g = parse(EX2).unwrap();
        assert_eq!(g.name(g.start()), "S");
        assert_eq!(g.productions().len(), 7);
        assert_eq!(g, gallery::ex2());
    }

    #[test]
    fn print_then_parse_is_identity() {
        for g in [gallery::ex1(), gallery::ex2(), gallery::l3_grammar(), gallery::equal_abc()] {
            let text = print(&g);
            assert_eq!(parse(&text).unwrap(), g, "{text}");
        }
    }

    #[test]
    fn quoted_letters() {
        let g = parse("start: K\nK -'A'-> M\nM -'#'->\n").unwrap();
        let letters: Vec<&str> = g.letters().iter().map(|l| l.as_str()).collect();
        assert_eq!(letters, vec!["#", "A"]);
        assert_eq!(parse(&print(&g)).unwrap(), g);
    }

    #[test]
    fn shorthands() {
        let g = parse("start: S\nindependence: all\nS -a-> A B\nA -a->\nB -b->\n").unwrap();
        assert_eq!(g.independence().len(), 3);
        let g = parse("start: S\nindependence: none\nS -a-> A\nA -a->\n").unwrap();
        assert!(g.independence().is_empty());
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        assert!(matches!(parse("start: S\nS a A\n"), Err(ParseError::Syntax { line: 2, .. })));
        assert_eq!(parse("S -a->\n"), Err(ParseError::MissingStart));
        assert!(matches!(parse("start: S\nindependence: A\nS -a->\n"), Err(ParseError::Syntax { line: 2, .. })));
    }

    #[test]
    fn invalid_grammar_surfaces_diagnostics() {
        let err = parse("start: S\nindependence: S S\nS -a->\n").unwrap_err();
        assert_eq!(
            err,
            ParseError::Grammar(GrammarError::Invalid(vec![Diagnostic::ReflexivePair { symbol: "S".into() }]))
        );
    }
}
