//! DIMACS CNF reading and writing, including the model counting
//! competition weight lines (`c p weight <lit> <w> 0`) and type line
//! (`c t wmc`).

use std::fmt::Write as _;

use thiserror::Error;

use super::weight::{format_rational, parse_rational};
use super::{CnfFormula, FormulaError, Lit, WeightMap};

/// How weight lines are interpreted.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum ParseMode {
    /// Weighted iff the input carries a weight line or a `c t wmc` line.
    #[default]
    Auto,
    /// Plain model counting; weight lines are validated and then ignored.
    Mc,
    /// Weighted model counting, even without any weight line.
    Wmc,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("input is not valid ASCII/UTF-8")]
    Encoding,
    #[error("line {line}: malformed header `{text}`")]
    MalformedHeader { line: usize, text: String },
    #[error("line {line}: duplicate header")]
    DuplicateHeader { line: usize },
    #[error("missing `p cnf` header")]
    MissingHeader,
    #[error("line {line}: `{token}` is not an integer literal")]
    BadLiteral { line: usize, token: String },
    #[error("line {line}: literal {lit} exceeds the declared variable count {num_vars}")]
    VariableOutOfRange { line: usize, lit: i64, num_vars: usize },
    #[error("line {line}: malformed weight line `{text}`")]
    MalformedWeight { line: usize, text: String },
    #[error("line {line}: weight `{value}` is not a non-negative number")]
    BadWeight { line: usize, value: String },
    #[error("line {line}: weight line for variable 0")]
    WeightForZero { line: usize },
    #[error("line {line}: projected counting (`{text}`) is not supported")]
    Unsupported { line: usize, text: String },
    #[error("last clause is not terminated by 0")]
    UnterminatedClause,
    #[error("header declares {declared} clauses but {found} were read")]
    ClauseCountMismatch { declared: usize, found: usize },
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

struct Header {
    num_vars: usize,
    num_clauses: usize,
}

/// Parses a DIMACS stream into a normalized formula.
pub fn parse_input(text: &[u8], mode: ParseMode) -> Result<CnfFormula, ParseError> {
    let text = std::str::from_utf8(text).map_err(|_| ParseError::Encoding)?;
    let mut header: Option<Header> = None;
    let mut clauses: Vec<Vec<Lit>> = Vec::new();
    let mut current: Vec<Lit> = Vec::new();
    let mut weight_lines: Vec<(usize, i64, String)> = Vec::new();
    let mut typed_weighted = false;

    for (idx, raw) in text.split('\n').enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('c') {
            let tokens: Vec<&str> = line.split_whitespace().collect();
            match tokens.as_slice() {
                ["c", "p", "weight", rest @ ..] => {
                    let (lit, value) = match rest {
                        [lit, value] | [lit, value, "0"] => (*lit, *value),
                        _ => {
                            return Err(ParseError::MalformedWeight {
                                line: line_no,
                                text: line.to_string(),
                            })
                        }
                    };
                    let lit: i64 = lit.parse().map_err(|_| ParseError::MalformedWeight {
                        line: line_no,
                        text: line.to_string(),
                    })?;
                    if lit == 0 {
                        return Err(ParseError::WeightForZero { line: line_no });
                    }
                    weight_lines.push((line_no, lit, value.to_string()));
                }
                ["c", "p", "show", ..] => {
                    return Err(ParseError::Unsupported {
                        line: line_no,
                        text: line.to_string(),
                    })
                }
                ["c", "t", kind, ..] => match *kind {
                    "wmc" => typed_weighted = true,
                    "pmc" | "pwmc" => {
                        return Err(ParseError::Unsupported {
                            line: line_no,
                            text: line.to_string(),
                        })
                    }
                    _ => {}
                },
                _ => {}
            }
            continue;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(ParseError::DuplicateHeader { line: line_no });
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            let bad = || ParseError::MalformedHeader {
                line: line_no,
                text: line.to_string(),
            };
            match tokens.as_slice() {
                ["p", "cnf", n, m] => {
                    header = Some(Header {
                        num_vars: n.parse().map_err(|_| bad())?,
                        num_clauses: m.parse().map_err(|_| bad())?,
                    });
                }
                _ => return Err(bad()),
            }
            continue;
        }
        let Some(h) = &header else {
            return Err(ParseError::MissingHeader);
        };
        for token in line.split_whitespace() {
            let value: i64 = token.parse().map_err(|_| ParseError::BadLiteral {
                line: line_no,
                token: token.to_string(),
            })?;
            if value == 0 {
                clauses.push(std::mem::take(&mut current));
                continue;
            }
            if value.unsigned_abs() > h.num_vars as u64 {
                return Err(ParseError::VariableOutOfRange {
                    line: line_no,
                    lit: value,
                    num_vars: h.num_vars,
                });
            }
            current.push(Lit::from_dimacs(value));
        }
    }

    let header = header.ok_or(ParseError::MissingHeader)?;
    if !current.is_empty() {
        return Err(ParseError::UnterminatedClause);
    }
    if clauses.len() != header.num_clauses {
        return Err(ParseError::ClauseCountMismatch {
            declared: header.num_clauses,
            found: clauses.len(),
        });
    }

    let mut weights = WeightMap::new();
    for (line, lit, value) in &weight_lines {
        if lit.unsigned_abs() > header.num_vars as u64 {
            return Err(ParseError::VariableOutOfRange {
                line: *line,
                lit: *lit,
                num_vars: header.num_vars,
            });
        }
        let w = parse_rational(value).ok_or_else(|| ParseError::BadWeight {
            line: *line,
            value: value.clone(),
        })?;
        weights.set(Lit::from_dimacs(*lit), w)?;
    }
    let weighted = match mode {
        ParseMode::Auto => typed_weighted || !weight_lines.is_empty(),
        ParseMode::Mc => false,
        ParseMode::Wmc => true,
    };
    let weights = weighted.then_some(weights);
    Ok(CnfFormula::new(header.num_vars, clauses, weights)?)
}

/// Writes `formula` in the same dialect [`parse_input`] reads. Variables keep
/// their numbering; weighted formulas get a `c t wmc` line and their weight
/// lines ahead of the clauses.
pub fn write_cnf(formula: &CnfFormula) -> String {
    let mut out = String::new();
    if formula.is_weighted() {
        out.push_str("c t wmc\n");
    }
    let _ = writeln!(out, "p cnf {} {}", formula.num_vars(), formula.num_clauses());
    if let Some(weights) = formula.weights() {
        for (lit, w) in weights.iter() {
            let _ = writeln!(out, "c p weight {} {} 0", lit, format_rational(w));
        }
    }
    for clause in formula.clauses() {
        for lit in clause.iter() {
            let _ = write!(out, "{lit} ");
        }
        out.push_str("0\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn parse(s: &str) -> Result<CnfFormula, ParseError> {
        parse_input(s.as_bytes(), ParseMode::Auto)
    }

    #[test]
    fn reads_plain_formula() {
        let f = parse("p cnf 2 1\n1 2 0").unwrap();
        assert_eq!(f.num_vars(), 2);
        assert_eq!(f.num_clauses(), 1);
        assert!(!f.is_weighted());
        assert_eq!(
            f.clauses()[0].lits(),
            &[Lit::from_dimacs(1), Lit::from_dimacs(2)]
        );
    }

    #[test]
    fn reads_weights() {
        let f = parse("p cnf 1 1\nc p weight 1 0.3 0\nc p weight -1 0.7 0\n1 0").unwrap();
        assert!(f.is_weighted());
        assert_eq!(f.weight(Lit::from_dimacs(1)), BigRational::new(3.into(), 10.into()));
        assert_eq!(f.weight(Lit::from_dimacs(-1)), BigRational::new(7.into(), 10.into()));
    }

    #[test]
    fn tautology_dropped_and_free_vars_counted() {
        let f = parse("p cnf 2 1\n1 -1 0").unwrap();
        assert_eq!(f.num_clauses(), 0);
        assert_eq!(f.free_var_count(), 2);
    }

    #[test]
    fn tolerates_crlf_and_spacing_and_multiline_clauses() {
        let f = parse("c hello\r\np  cnf   3  2 \r\n 1   -2\r\n 0 3 0\r\n").unwrap();
        assert_eq!(f.num_clauses(), 2);
        assert_eq!(f.clauses()[0].len(), 2);
    }

    #[test]
    fn mode_overrides() {
        let text = "p cnf 1 1\nc p weight 1 0.3 0\n1 0\n";
        assert!(!parse_input(text.as_bytes(), ParseMode::Mc).unwrap().is_weighted());
        assert!(parse_input(b"p cnf 1 1\n1 0\n", ParseMode::Wmc).unwrap().is_weighted());
        assert!(parse("c t wmc\np cnf 1 1\n1 0\n").unwrap().is_weighted());
    }

    #[test]
    fn error_cases() {
        assert!(matches!(parse("p dnf 2 1\n1 0"), Err(ParseError::MalformedHeader { .. })));
        assert!(matches!(parse("p cnf x 1\n1 0"), Err(ParseError::MalformedHeader { .. })));
        assert!(matches!(parse("p cnf 2 1\n3 0"), Err(ParseError::VariableOutOfRange { lit: 3, .. })));
        assert!(matches!(
            parse("p cnf 1 1\nc p weight 1 abc 0\n1 0"),
            Err(ParseError::BadWeight { .. })
        ));
        assert!(matches!(
            parse("p cnf 1 1\nc p weight 1 -0.5 0\n1 0"),
            Err(ParseError::BadWeight { .. })
        ));
        assert!(matches!(parse("p cnf 2 1\n1 2"), Err(ParseError::UnterminatedClause)));
        assert!(matches!(
            parse("p cnf 1 1\nc p weight 0 0.5 0\n1 0"),
            Err(ParseError::WeightForZero { .. })
        ));
        assert!(matches!(
            parse("p cnf 2 2\n1 2 0"),
            Err(ParseError::ClauseCountMismatch { declared: 2, found: 1 })
        ));
        assert!(matches!(parse("p cnf 2 1\nc p show 1 0\n1 0"), Err(ParseError::Unsupported { .. })));
        assert!(matches!(parse("1 2 0"), Err(ParseError::MissingHeader)));
        assert!(matches!(parse("p cnf 2 1\n1 x 0"), Err(ParseError::BadLiteral { .. })));
    }

    #[test]
    fn write_format_is_exact() {
        let f = parse("p cnf 2 1\n1 2 0").unwrap();
        assert_eq!(write_cnf(&f), "p cnf 2 1\n1 2 0\n");
        let w = parse("p cnf 1 1\nc p weight 1 0.3 0\nc p weight -1 0.7 0\n1 0").unwrap();
        assert_eq!(
            write_cnf(&w),
            "c t wmc\np cnf 1 1\nc p weight 1 0.3 0\nc p weight -1 0.7 0\n1 0\n"
        );
    }
}
