use thiserror::Error;

/// Errors raised by the text-format readers (DIMACS, ASP, PACE).
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: missing problem header")]
    MissingHeader { line: usize },
    #[error("line {line}: malformed header: {reason}")]
    MalformedHeader { line: usize, reason: String },
    #[error("line {line}: duplicate header")]
    DuplicateHeader { line: usize },
    #[error("line {line}: invalid token `{token}`")]
    InvalidToken { line: usize, token: String },
    #[error("line {line}: literal {literal} out of range (declared {declared} variables)")]
    LiteralOutOfRange {
        line: usize,
        literal: i64,
        declared: usize,
    },
    #[error("line {line}: clause not terminated by 0")]
    MissingTerminator { line: usize },
    #[error("line {line}: expected {expected} clauses, found {found}")]
    ClauseCountMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: vertex {vertex} out of range (declared {declared} vertices)")]
    VertexOutOfRange {
        line: usize,
        vertex: i64,
        declared: usize,
    },
    #[error("line {line}: expected {expected} edges, found {found}")]
    EdgeCountMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: bag index {bag} out of range (declared {declared} bags)")]
    BagIndexOutOfRange {
        line: usize,
        bag: i64,
        declared: usize,
    },
    #[error("line {line}: bag {bag} defined twice")]
    DuplicateBag { line: usize, bag: usize },
    #[error("line {line}: bag {bag} never defined")]
    MissingBag { line: usize, bag: usize },
    #[error("line {line}: declared maximum bag size {declared}, found {found}")]
    BagSizeMismatch {
        line: usize,
        declared: usize,
        found: usize,
    },
    #[error("line {line}: disjunctive heads are not supported")]
    UnsupportedDisjunction { line: usize },
    #[error("line {line}: syntax error: {reason}")]
    Syntax { line: usize, reason: String },
}

impl ParseError {
    pub fn line(&self) -> usize {
        match self {
            ParseError::MissingHeader { line }
            | ParseError::MalformedHeader { line, .. }
            | ParseError::DuplicateHeader { line }
            | ParseError::InvalidToken { line, .. }
            | ParseError::LiteralOutOfRange { line, .. }
            | ParseError::MissingTerminator { line }
            | ParseError::ClauseCountMismatch { line, .. }
            | ParseError::VertexOutOfRange { line, .. }
            | ParseError::EdgeCountMismatch { line, .. }
            | ParseError::BagIndexOutOfRange { line, .. }
            | ParseError::DuplicateBag { line, .. }
            | ParseError::MissingBag { line, .. }
            | ParseError::BagSizeMismatch { line, .. }
            | ParseError::UnsupportedDisjunction { line }
            | ParseError::Syntax { line, .. } => *line,
        }
    }
}
