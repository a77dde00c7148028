//! Text formats: DIMACS CNF input, the `p 2of4` instance format and a
//! DIMACS-style model line for assignments.

use std::fmt::Write as _;

use super::{Assignment, Cnf3, Lit, TwoFourInstance};
use crate::error::{Error, Result};

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

struct Header {
    vars: usize,
    clauses: usize,
}

fn parse_header(line_no: usize, line: &str, kind: &str) -> Result<Header> {
    let toks: Vec<&str> = line.split_whitespace().collect();
    if toks.len() != 4 || toks[0] != "p" || toks[1] != kind {
        return Err(perr(line_no, format!("malformed header, expected `p {kind} <vars> <clauses>`")));
    }
    let vars = toks[2]
        .parse()
        .map_err(|_| perr(line_no, format!("malformed header: bad variable count `{}`", toks[2])))?;
    let clauses = toks[3]
        .parse()
        .map_err(|_| perr(line_no, format!("malformed header: bad clause count `{}`", toks[3])))?;
    Ok(Header { vars, clauses })
}

/// Clauses tagged with the line they ended on.
type LineClauses = Vec<(usize, Vec<Lit>)>;

/// Shared tokenizer: yields `(line, clause)` for every 0-terminated clause,
/// enforcing the literal range and a maximum clause width.
fn parse_clauses(
    text: &str,
    kind: &str,
    max_width: usize,
) -> Result<(Header, LineClauses)> {
    let mut header: Option<Header> = None;
    let mut out = Vec::new();
    let mut pending: Vec<Lit> = Vec::new();
    let mut pending_line = 0;
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(perr(line_no, "duplicate header"));
            }
            header = Some(parse_header(line_no, line, kind)?);
            continue;
        }
        let Some(h) = header.as_ref() else {
            return Err(perr(line_no, "clause before header"));
        };
        for tok in line.split_whitespace() {
            let v: i32 = tok
                .parse()
                .map_err(|_| perr(line_no, format!("not an integer literal: `{tok}`")))?;
            if v == 0 {
                if pending.is_empty() {
                    return Err(perr(line_no, "empty clause"));
                }
                out.push((pending_line, std::mem::take(&mut pending)));
                continue;
            }
            let lit = Lit(v);
            if lit.var() > h.vars {
                return Err(perr(
                    line_no,
                    format!("literal {v} out of range 1..={}", h.vars),
                ));
            }
            if pending.is_empty() {
                pending_line = line_no;
            }
            pending.push(lit);
            if pending.len() > max_width {
                return Err(perr(
                    line_no,
                    format!("clause exceeds {max_width} literals"),
                ));
            }
        }
    }

    let header = header.ok_or_else(|| perr(last_line.max(1), "missing header"))?;
    if !pending.is_empty() {
        return Err(perr(pending_line, "missing terminating 0"));
    }
    if out.len() != header.clauses {
        return Err(perr(
            last_line.max(1),
            format!("header declares {} clauses, found {}", header.clauses, out.len()),
        ));
    }
    Ok((header, out))
}

/// Parse DIMACS CNF with at most three literals per clause. Short clauses
/// are padded to width 3 by repeating their last literal.
pub fn parse_dimacs(text: &str) -> Result<Cnf3> {
    let (header, raw) = parse_clauses(text, "cnf", 3)?;
    let clauses = raw
        .into_iter()
        .map(|(_, c)| {
            let last = *c.last().expect("non-empty clause");
            [c[0], *c.get(1).unwrap_or(&last), *c.get(2).unwrap_or(&last)]
        })
        .collect();
    Cnf3::new(header.vars, clauses)
}

pub fn write_dimacs(cnf: &Cnf3) -> String {
    let mut s = format!("p cnf {} {}\n", cnf.num_vars(), cnf.clauses().len());
    for c in cnf.clauses() {
        let _ = writeln!(s, "{} {} {} 0", c[0], c[1], c[2]);
    }
    s
}

/// Parse the `p 2of4 <vars> <clauses>` format.
pub fn parse_2of4(text: &str) -> Result<TwoFourInstance> {
    let (header, raw) = parse_clauses(text, "2of4", 4)?;
    let mut clauses = Vec::with_capacity(raw.len());
    for (line, c) in raw {
        if c.len() != 4 {
            return Err(perr(line, format!("2of4 clause has {} literals, expected 4", c.len())));
        }
        clauses.push([c[0], c[1], c[2], c[3]]);
    }
    TwoFourInstance::new(header.vars, clauses)
}

/// Serialize an instance, clauses sorted (stably) by the variable of their
/// first literal.
pub fn write_2of4(inst: &TwoFourInstance) -> String {
    let mut clauses: Vec<&[Lit; 4]> = inst.clauses().iter().collect();
    clauses.sort_by_key(|c| c[0].var());
    let mut s = format!("p 2of4 {} {}\n", inst.num_vars(), inst.num_clauses());
    for c in clauses {
        let _ = writeln!(s, "{} {} {} {} 0", c[0], c[1], c[2], c[3]);
    }
    s
}

/// Parse an assignment given as signed variable indices (`v` prefixes and
/// `c` comment lines allowed, optional trailing 0). Every variable in
/// `1..=num_vars` must appear exactly once.
pub fn parse_assignment(text: &str, num_vars: usize) -> Result<Assignment> {
    let mut signs = vec![0i8; num_vars];
    let mut last_line = 1;
    'lines: for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('s') {
            continue;
        }
        for tok in line.split_whitespace() {
            if tok == "v" {
                continue;
            }
            let v: i32 = tok
                .parse()
                .map_err(|_| perr(line_no, format!("not an integer literal: `{tok}`")))?;
            if v == 0 {
                break 'lines;
            }
            let lit = Lit(v);
            if lit.var() > num_vars {
                return Err(perr(line_no, format!("literal {v} out of range 1..={num_vars}")));
            }
            let slot = &mut signs[lit.var() - 1];
            if *slot != 0 {
                return Err(perr(line_no, format!("variable {} assigned twice", lit.var())));
            }
            *slot = lit.sign();
        }
    }
    if let Some(j) = signs.iter().position(|&s| s == 0) {
        return Err(perr(last_line, format!("variable {} is unassigned", j + 1)));
    }
    Assignment::new(signs)
}

pub fn write_assignment(a: &Assignment) -> String {
    let mut s = String::from("v");
    for (j, &sign) in a.signs().iter().enumerate() {
        let _ = write!(s, " {}", sign as i32 * (j as i32 + 1));
    }
    s.push_str(" 0\n");
    s
}
