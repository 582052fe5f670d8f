use std::fmt::Write as _;

use super::{Lit, ParseError, Var};

pub type Clause = Vec<Lit>;

/// A CNF formula over variables `0..num_vars`.
///
/// Clauses are kept in input order. Repeated literals inside a clause are
/// collapsed; clauses containing both polarities of a variable are dropped
/// and counted in [`CnfFormula::tautologies_dropped`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<Clause>,
    tautologies_dropped: usize,
}

impl CnfFormula {
    pub fn new(num_vars: usize) -> Self {
        CnfFormula {
            num_vars,
            clauses: Vec::new(),
            tautologies_dropped: 0,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn tautologies_dropped(&self) -> usize {
        self.tautologies_dropped
    }

    /// Allocates a fresh variable at the end of the range.
    pub fn new_var(&mut self) -> Var {
        let v = Var::from_index(self.num_vars);
        self.num_vars += 1;
        v
    }

    /// Adds a clause. Returns `false` if the clause was a tautology and got dropped.
    ///
    /// Panics if a literal refers to a variable outside the formula.
    pub fn add_clause<I: IntoIterator<Item = Lit>>(&mut self, lits: I) -> bool {
        let mut clause: Clause = Vec::new();
        for lit in lits {
            assert!(
                lit.var().index() < self.num_vars,
                "literal {lit} outside of {} variables",
                self.num_vars
            );
            if clause.contains(&!lit) {
                self.tautologies_dropped += 1;
                return false;
            }
            if !clause.contains(&lit) {
                clause.push(lit);
            }
        }
        self.clauses.push(clause);
        true
    }

    /// Marks which variables occur in at least one clause.
    pub fn occurring_vars(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_vars];
        for lit in self.clauses.iter().flatten() {
            seen[lit.var().index()] = true;
        }
        seen
    }

    pub fn has_empty_clause(&self) -> bool {
        self.clauses.iter().any(|c| c.is_empty())
    }

    /// Evaluates the formula under a full assignment indexed by variable.
    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|l| l.holds(assignment[l.var().index()])))
    }

    /// Reads a DIMACS CNF file.
    pub fn parse_dimacs(text: &str) -> Result<Self, ParseError> {
        let mut header: Option<(usize, usize, usize)> = None;
        let mut formula = CnfFormula::default();
        let mut pending: Vec<Lit> = Vec::new();
        let mut pending_start = 0;
        let mut seen = 0usize;
        let mut last_line = 0;

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            last_line = line;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('c') {
                continue;
            }
            if trimmed.starts_with('%') {
                break;
            }
            if trimmed.starts_with('p') {
                if header.is_some() {
                    return Err(ParseError::DuplicateHeader { line });
                }
                header = Some(parse_cnf_header(trimmed, line)?);
                let (n, _, _) = header.unwrap();
                formula.num_vars = n;
                continue;
            }
            let Some((num_vars, _, _)) = header else {
                return Err(ParseError::MissingHeader { line });
            };
            for token in trimmed.split_whitespace() {
                let value: i64 = token.parse().map_err(|_| ParseError::InvalidToken {
                    line,
                    token: token.to_string(),
                })?;
                if value == 0 {
                    seen += 1;
                    formula.add_clause(pending.drain(..));
                    continue;
                }
                if value.unsigned_abs() > num_vars as u64 {
                    return Err(ParseError::LiteralOutOfRange {
                        line,
                        literal: value,
                        declared: num_vars,
                    });
                }
                if pending.is_empty() {
                    pending_start = line;
                }
                pending.push(Lit::from_dimacs(value).expect("non-zero literal"));
            }
        }

        let Some((_, expected, header_line)) = header else {
            return Err(ParseError::MissingHeader {
                line: last_line.max(1),
            });
        };
        if !pending.is_empty() {
            return Err(ParseError::MissingTerminator { line: pending_start });
        }
        if seen != expected {
            return Err(ParseError::ClauseCountMismatch {
                line: header_line,
                expected,
                found: seen,
            });
        }
        Ok(formula)
    }

    /// Writes the formula in DIMACS CNF.
    pub fn to_dimacs(&self) -> String {
        let mut out = String::new();
        writeln!(out, "p cnf {} {}", self.num_vars, self.clauses.len()).unwrap();
        for clause in &self.clauses {
            for lit in clause {
                write!(out, "{} ", lit.to_dimacs()).unwrap();
            }
            out.push_str("0\n");
        }
        out
    }
}

fn parse_cnf_header(line_text: &str, line: usize) -> Result<(usize, usize, usize), ParseError> {
    let parts: Vec<&str> = line_text.split_whitespace().collect();
    let malformed = |reason: &str| ParseError::MalformedHeader {
        line,
        reason: reason.to_string(),
    };
    if parts.len() != 4 || parts[0] != "p" {
        return Err(malformed("expected `p cnf <vars> <clauses>`"));
    }
    if parts[1] != "cnf" {
        return Err(malformed("format must be `cnf`"));
    }
    let n = parts[2]
        .parse()
        .map_err(|_| malformed("variable count is not a non-negative integer"))?;
    let m = parts[3]
        .parse()
        .map_err(|_| malformed("clause count is not a non-negative integer"))?;
    Ok((n, m, line))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lits(xs: &[i64]) -> Vec<Lit> {
        xs.iter().map(|&x| Lit::from_dimacs(x).unwrap()).collect()
    }

    #[test]
    fn parses_single_clause() {
        let f = CnfFormula::parse_dimacs("p cnf 2 1\n1 -2 0").unwrap();
        assert_eq!(f.num_vars(), 2);
        assert_eq!(f.clauses(), &[lits(&[1, -2])]);
    }

    #[test]
    fn parses_empty_formula() {
        let f = CnfFormula::parse_dimacs("p cnf 1 0").unwrap();
        assert_eq!(f.num_vars(), 1);
        assert_eq!(f.num_clauses(), 0);
    }

    #[test]
    fn drops_tautologies() {
        let f = CnfFormula::parse_dimacs("p cnf 2 1\n1 -1 0").unwrap();
        assert_eq!(f.num_vars(), 2);
        assert_eq!(f.num_clauses(), 0);
        assert_eq!(f.tautologies_dropped(), 1);
    }

    #[test]
    fn clauses_may_span_lines_and_comments() {
        let f = CnfFormula::parse_dimacs("c hi\np cnf 3 2\n1 2\n3 0 c\n-1 0\n").unwrap_err();
        assert!(matches!(f, ParseError::InvalidToken { line: 4, .. }));
        let f = CnfFormula::parse_dimacs("c hi\np cnf 3 2\n1 2\nc mid\n3 0\n-1 0\n").unwrap();
        assert_eq!(f.clauses(), &[lits(&[1, 2, 3]), lits(&[-1])]);
    }

    #[test]
    fn empty_clause_is_kept() {
        let f = CnfFormula::parse_dimacs("p cnf 1 1\n0\n").unwrap();
        assert!(f.has_empty_clause());
    }

    #[test]
    fn duplicate_literals_collapse() {
        let f = CnfFormula::parse_dimacs("p cnf 2 1\n1 1 2 0\n").unwrap();
        assert_eq!(f.clauses(), &[lits(&[1, 2])]);
    }

    #[test]
    fn error_paths_carry_lines() {
        assert!(matches!(
            CnfFormula::parse_dimacs("p cnf x 1\n1 0"),
            Err(ParseError::MalformedHeader { line: 1, .. })
        ));
        assert!(matches!(
            CnfFormula::parse_dimacs("p cnf 2 1\n1 3 0"),
            Err(ParseError::LiteralOutOfRange {
                line: 2,
                literal: 3,
                ..
            })
        ));
        assert!(matches!(
            CnfFormula::parse_dimacs("p cnf 2 2\n1 0\n\n2 -1"),
            Err(ParseError::MissingTerminator { line: 4 })
        ));
        assert!(matches!(
            CnfFormula::parse_dimacs("1 2 0"),
            Err(ParseError::MissingHeader { line: 1 })
        ));
        assert!(matches!(
            CnfFormula::parse_dimacs("p cnf 2 2\n1 0"),
            Err(ParseError::ClauseCountMismatch {
                expected: 2,
                found: 1,
                ..
            })
        ));
    }

    #[test]
    fn dimacs_emit_roundtrip() {
        let text = "p cnf 3 3\n1 -2 0\n-3 0\n0\n";
        let f = CnfFormula::parse_dimacs(text).unwrap();
        assert_eq!(f.to_dimacs(), "p cnf 3 3\n1 -2 0\n-3 0\n0\n");
        assert_eq!(CnfFormula::parse_dimacs(&f.to_dimacs()).unwrap(), f);
    }
}
