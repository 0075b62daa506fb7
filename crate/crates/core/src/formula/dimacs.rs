//! DIMACS CNF reading and writing.
//!
//! The writer emits `c key = value` metadata comments, the `p cnf` header and
//! one zero-terminated clause per line. The reader is lenient: clauses may
//! span lines, tokens may be separated by any whitespace, comments may trail a
//! clause, and a `%` line (SATLIB style) ends the input.

use super::{Clause, Formula, Literal};
use std::fmt::Write as _;
use std::io::{self, BufRead, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DimacsError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("no `p cnf` header found")]
    MissingHeader,
    #[error("line {line}: second `p cnf` header")]
    DuplicateHeader { line: usize },
    #[error("line {line}: malformed header `{text}`")]
    BadHeader { line: usize, text: String },
    #[error("line {line}: clause data before the `p cnf` header")]
    ClauseBeforeHeader { line: usize },
    #[error("line {line}: `{token}` is not an integer literal")]
    InvalidToken { line: usize, token: String },
    #[error("line {line}: literal {literal} exceeds the {n} declared variables")]
    LiteralOutOfRange { line: usize, literal: i64, n: u32 },
}

/// A parsed file: the formula plus everything around it.
#[derive(Clone, Debug, PartialEq)]
pub struct DimacsDocument {
    /// Comment lines without the leading `c` and one space.
    pub comments: Vec<String>,
    pub header_n: u32,
    pub header_m: u64,
    pub formula: Formula,
    /// Non-fatal problems, such as a clause count that disagrees with the header.
    pub warnings: Vec<String>,
}

impl DimacsDocument {
    /// `key = value` pairs found in the comments, in file order.
    pub fn metadata(&self) -> Vec<(String, String)> {
        self.comments
            .iter()
            .filter_map(|c| {
                let (k, v) = c.split_once('=')?;
                let k = k.trim();
                (!k.is_empty() && !k.contains(char::is_whitespace))
                    .then(|| (k.to_string(), v.trim().to_string()))
            })
            .collect()
    }

    /// Value of the first `key = value` comment with this key.
    pub fn metadata_value(&self, key: &str) -> Option<String> {
        self.metadata()
            .into_iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v)
    }
}

/// Writes `formula` in DIMACS CNF, preceded by one comment per metadata pair.
pub fn write_dimacs<W, K, V>(
    formula: &Formula,
    metadata: impl IntoIterator<Item = (K, V)>,
    mut out: W,
) -> io::Result<()>
where
    W: Write,
    K: AsRef<str>,
    V: AsRef<str>,
{
    for (k, v) in metadata {
        writeln!(out, "c {} = {}", k.as_ref(), v.as_ref())?;
    }
    writeln!(
        out,
        "p cnf {} {}",
        formula.num_vars(),
        formula.num_clauses()
    )?;
    let mut line = String::new();
    for clause in formula.clauses() {
        line.clear();
        for lit in clause.literals() {
            let _ = write!(line, "{lit} ");
        }
        line.push_str("0\n");
        out.write_all(line.as_bytes())?;
    }
    out.flush()
}

/// Parses a CNF file, keeping only the formula.
pub fn parse_dimacs<R: BufRead>(source: R) -> Result<Formula, DimacsError> {
    read_dimacs(source).map(|doc| doc.formula)
}

/// Parses a CNF file with comments, header and warnings.
///
/// Memory use follows the actual content; the header's clause count is
/// never used to preallocate.
pub fn read_dimacs<R: BufRead>(mut source: R) -> Result<DimacsDocument, DimacsError> {
    let mut comments = Vec::new();
    let mut header: Option<(u32, u64)> = None;
    let mut clauses: Vec<Clause> = Vec::new();
    let mut current: Vec<Literal> = Vec::new();
    let mut warnings = Vec::new();

    let mut buf = String::new();
    let mut line_no = 0;
    loop {
        buf.clear();
        if source.read_line(&mut buf)? == 0 {
            break;
        }
        line_no += 1;
        let line = buf.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('c') {
            if rest.is_empty() || rest.starts_with(char::is_whitespace) {
                comments.push(
                    rest.strip_prefix(' ')
                        .unwrap_or(rest)
                        .trim_end()
                        .to_string(),
                );
                continue;
            }
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(DimacsError::DuplicateHeader { line: line_no });
            }
            header = Some(parse_header(line, line_no)?);
            continue;
        }
        let Some((n, _)) = header else {
            return Err(DimacsError::ClauseBeforeHeader { line: line_no });
        };
        for token in line.split_whitespace() {
            if token.starts_with('c') {
                // trailing comment
                break;
            }
            let value: i64 = token.parse().map_err(|_| DimacsError::InvalidToken {
                line: line_no,
                token: token.to_string(),
            })?;
            if value == 0 {
                clauses.push(Clause::new(current.drain(..)));
                continue;
            }
            if value.unsigned_abs() > u64::from(n) {
                return Err(DimacsError::LiteralOutOfRange {
                    line: line_no,
                    literal: value,
                    n,
                });
            }
            current.push(Literal::from_dimacs(value as i32).expect("nonzero and in range"));
        }
    }

    let (n, m) = header.ok_or(DimacsError::MissingHeader)?;
    if !current.is_empty() {
        warnings.push(format!(
            "last clause is missing its terminating 0 ({} literals kept)",
            current.len()
        ));
        clauses.push(Clause::new(current));
    }
    if clauses.len() as u64 != m {
        warnings.push(format!(
            "header declares {m} clauses but {} were read",
            clauses.len()
        ));
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    let formula = Formula::with_clauses(n, clauses).expect("literals validated while parsing");
    Ok(DimacsDocument {
        comments,
        header_n: n,
        header_m: m,
        formula,
        warnings,
    })
}

fn parse_header(line: &str, line_no: usize) -> Result<(u32, u64), DimacsError> {
    let bad = || DimacsError::BadHeader {
        line: line_no,
        text: line.to_string(),
    };
    let mut parts = line.split_whitespace();
    if parts.next() != Some("p") || parts.next() != Some("cnf") {
        return Err(bad());
    }
    let n: u32 = parts.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
    let m: u64 = parts.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
    if parts.next().is_some() || n > i32::MAX as u32 {
        return Err(bad());
    }
    Ok((n, m))
}
