use std::io::{self, Write};

use crate::cnf::{is_tautology, BoolClauseSet};

use super::SatError;

/// One `c map <vertex> <slot> <boolvar>` comment line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MapEntry {
    pub vertex: u64,
    pub slot: usize,
    pub var: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DimacsFile {
    pub clauses: BoolClauseSet,
    pub map: Vec<MapEntry>,
}

/// Writes map comments, the `p cnf` header, then one clause per line terminated by `0`.
pub fn write_dimacs<W: Write>(f: &BoolClauseSet, map: &[MapEntry], mut sink: W) -> io::Result<()> {
    let mut out = String::new();
    for e in map {
        out.push_str(&format!("c map {} {} {}\n", e.vertex, e.slot, e.var));
    }
    out.push_str(&format!("p cnf {} {}\n", f.num_vars, f.clauses.len()));
    for c in &f.clauses {
        for l in c {
            out.push_str(&l.to_string());
            out.push(' ');
        }
        out.push_str("0\n");
    }
    sink.write_all(out.as_bytes())
}

pub fn parse_dimacs(source: &str) -> Result<BoolClauseSet, SatError> {
    parse_dimacs_file(source).map(|d| d.clauses)
}

/// Parses a DIMACS CNF text including `c map` comments.
pub fn parse_dimacs_file(source: &str) -> Result<DimacsFile, SatError> {
    let err = |line: usize, message: String| SatError::Parse { line, message };
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut map = Vec::new();
    let mut current: Vec<i32> = Vec::new();
    let mut last_line = 0;

    for (i, raw) in source.lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('c') {
            let mut words = comment.split_whitespace();
            if words.next() == Some("map") {
                let nums: Vec<&str> = words.collect();
                if nums.len() != 3 {
                    return Err(err(
                        line_no,
                        "map comment needs vertex, slot and variable".into(),
                    ));
                }
                let bad = |s: &str| err(line_no, format!("invalid number `{s}` in map comment"));
                map.push(MapEntry {
                    vertex: nums[0].parse().map_err(|_| bad(nums[0]))?,
                    slot: nums[1].parse().map_err(|_| bad(nums[1]))?,
                    var: nums[2].parse().map_err(|_| bad(nums[2]))?,
                });
            }
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(err(line_no, "duplicate problem line".into()));
            }
            let words: Vec<&str> = line.split_whitespace().collect();
            if words.len() != 4 || words[0] != "p" || words[1] != "cnf" {
                return Err(err(line_no, "expected `p cnf <vars> <clauses>`".into()));
            }
            let vars: usize = words[2]
                .parse()
                .ok()
                .filter(|&v| v <= i32::MAX as usize)
                .ok_or_else(|| err(line_no, format!("invalid variable count `{}`", words[2])))?;
            let count: usize = words[3]
                .parse()
                .map_err(|_| err(line_no, format!("invalid clause count `{}`", words[3])))?;
            header = Some((vars, count));
            continue;
        }
        let Some((vars, _)) = header else {
            return Err(err(line_no, "clause before problem line".into()));
        };
        for tok in line.split_whitespace() {
            let lit: i32 = tok
                .parse()
                .map_err(|_| err(line_no, format!("invalid literal `{tok}`")))?;
            if lit == 0 {
                if is_tautology(&current) {
                    return Err(err(
                        line_no,
                        "clause contains a literal and its complement".into(),
                    ));
                }
                clauses.push(std::mem::take(&mut current));
            } else if lit.unsigned_abs() as usize > vars {
                return Err(err(
                    line_no,
                    format!("literal {lit} exceeds variable count {vars}"),
                ));
            } else {
                current.push(lit);
            }
        }
    }

    let Some((vars, count)) = header else {
        return Err(err(last_line.max(1), "missing problem line".into()));
    };
    if !current.is_empty() {
        return Err(err(last_line, "last clause is not terminated by 0".into()));
    }
    if clauses.len() != count {
        return Err(err(
            last_line,
            format!("header announces {count} clauses, found {}", clauses.len()),
        ));
    }
    Ok(DimacsFile {
        clauses: BoolClauseSet::with_clauses(vars, clauses),
        map,
    })
}
