//! On-disk instance format.
//!
//! UTF-8 with LF line endings:
//!
//! ```text
//! CSPI 1
//! k=3 I=1,2
//! n=5 m=2
//! seed=42            (or `seed=-` when unknown)
//! c 0 1 2
//! c 3 4 0
//! ```
//!
//! Format version 1 additionally pins the generator recorded in `seed=` to
//! the SplitMix64 scheme of [`crate::rng`]. Parsers reject unknown magic,
//! count mismatches and trailing garbage; errors carry the 1-based offending
//! line.

use crate::relation::{Constraint, Instance, RelationIndexSet};
use thiserror::Error;

pub const MAGIC: &str = "CSPI 1";

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub msg: String,
}

fn err<T>(line: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { line, msg: msg.into() })
}

/// Renders an instance in the `CSPI 1` format.
pub fn serialize_instance(inst: &Instance) -> String {
    let rel = inst.relation();
    let counts: Vec<String> = rel.allowed().iter().map(|c| c.to_string()).collect();
    let mut out = String::new();
    out.push_str(MAGIC);
    out.push('\n');
    out.push_str(&format!("k={} I={}\n", rel.k(), counts.join(",")));
    out.push_str(&format!("n={} m={}\n", inst.n(), inst.m()));
    match inst.seed() {
        Some(s) => out.push_str(&format!("seed={s}\n")),
        None => out.push_str("seed=-\n"),
    }
    for c in inst.constraints() {
        out.push('c');
        for &v in c.vars() {
            out.push(' ');
            out.push_str(&v.to_string());
        }
        out.push('\n');
    }
    out
}

fn parse_kv<'a>(line: &'a str, key: &str, lineno: usize) -> Result<&'a str, ParseError> {
    match line.strip_prefix(key) {
        Some(rest) => Ok(rest),
        None => err(lineno, format!("expected `{key}<value>`")),
    }
}

fn parse_usize(text: &str, what: &str, lineno: usize) -> Result<usize, ParseError> {
    text.parse::<usize>().map_err(|_| ParseError {
        line: lineno,
        msg: format!("invalid {what}: `{text}`"),
    })
}

/// Parses the `CSPI 1` format back into an [`Instance`], validating the
/// relation invariants and every variable index.
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (ln, magic) = lines.next().ok_or(ParseError { line: 1, msg: "empty input".into() })?;
    if magic != MAGIC {
        return err(ln, format!("unknown magic `{magic}`, expected `{MAGIC}`"));
    }

    let (ln, rel_line) =
        lines.next().ok_or(ParseError { line: 2, msg: "missing relation line".into() })?;
    let mut parts = rel_line.split_whitespace();
    let k_part = parts.next().unwrap_or("");
    let i_part = parts.next().unwrap_or("");
    if parts.next().is_some() {
        return err(ln, "trailing tokens on relation line");
    }
    let k = parse_usize(parse_kv(k_part, "k=", ln)?, "arity", ln)?;
    let counts_text = parse_kv(i_part, "I=", ln)?;
    let mut counts = Vec::new();
    for c in counts_text.split(',') {
        counts.push(parse_usize(c, "allowed count", ln)?);
    }
    let relation = RelationIndexSet::new(k, counts)
        .map_err(|e| ParseError { line: ln, msg: e.to_string() })?;

    let (ln, size_line) =
        lines.next().ok_or(ParseError { line: 3, msg: "missing size line".into() })?;
    let mut parts = size_line.split_whitespace();
    let n_part = parts.next().unwrap_or("");
    let m_part = parts.next().unwrap_or("");
    if parts.next().is_some() {
        return err(ln, "trailing tokens on size line");
    }
    let n = parse_usize(parse_kv(n_part, "n=", ln)?, "variable count", ln)?;
    let m = parse_usize(parse_kv(m_part, "m=", ln)?, "constraint count", ln)?;
    if n == 0 {
        return err(ln, "need at least one variable");
    }

    let (ln, seed_line) =
        lines.next().ok_or(ParseError { line: 4, msg: "missing seed line".into() })?;
    let seed_text = parse_kv(seed_line, "seed=", ln)?;
    let seed = if seed_text == "-" {
        None
    } else {
        Some(seed_text.parse::<u64>().map_err(|_| ParseError {
            line: ln,
            msg: format!("invalid seed `{seed_text}`"),
        })?)
    };

    let mut constraints = Vec::with_capacity(m);
    for _ in 0..m {
        let (ln, line) = match lines.next() {
            Some(x) => x,
            None => {
                return err(4 + m, format!("expected {m} constraint lines, found {}", constraints.len()))
            }
        };
        let mut toks = line.split_whitespace();
        if toks.next() != Some("c") {
            return err(ln, "constraint line must start with `c`");
        }
        let mut vars = Vec::with_capacity(k);
        for t in toks {
            let idx = parse_usize(t, "variable index", ln)?;
            if idx >= n {
                return err(ln, format!("variable index {idx} out of range for n={n}"));
            }
            vars.push(idx);
        }
        if vars.len() != k {
            return err(ln, format!("constraint has {} indices, expected k={k}", vars.len()));
        }
        constraints.push(Constraint::new(vars));
    }

    if let Some((ln, extra)) = lines.find(|(_, l)| !l.trim().is_empty()) {
        return err(ln, format!("trailing garbage `{extra}`"));
    }

    Instance::new(n, relation, constraints, seed)
        .map_err(|e| ParseError { line: 0, msg: e.to_string() })
}
