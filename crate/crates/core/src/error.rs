use std::fmt;

use thiserror::Error;

/// A 1-based line/column location in program or interpretation text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at {at}: {message}")]
    Syntax { at: Position, message: String },

    #[error("{kind} `{symbol}` used with arity {found} but earlier with arity {expected}{}", fmt_at(.at))]
    Arity {
        kind: SymbolKind,
        symbol: String,
        expected: usize,
        found: usize,
        at: Option<Position>,
    },

    #[error("goal clause at {at}: headless clauses are not Horn programs here")]
    GoalClause { at: Position },

    #[error("atom `{atom}` is not ground{}", fmt_at(.at))]
    NonGround { atom: String, at: Option<Position> },

    #[error("depth bound must be at least 1 (got {0})")]
    InvalidDepth(u32),

    #[error("signature has no constant symbols; the Herbrand universe is empty")]
    NoConstants,

    #[error("clause `{clause}` is not finitary: head variable {variable} is not bound by the body")]
    NonFinitary { clause: String, variable: String },

    #[error("atom `{atom}` has level {level}, above the depth bound {depth}")]
    AboveDepth { atom: String, level: u32, depth: u32 },

    #[error("program is not certified: {0}")]
    Uncertified(String),

    #[error("the limit of the program sequence does not exist: `{obstruction}` occurs infinitely often but not almost always")]
    LimitDoesNotExist { obstruction: String },

    #[error("invalid sequence schema: {0}")]
    Schema(String),

    #[error("sequence index must be at least 1 (got {0})")]
    InvalidIndex(u64),

    #[error("interpretation is not a fixed point: `{atom}` {reason}")]
    NotFixpoint { atom: String, reason: &'static str },

    #[error("the perturbation list is empty")]
    NoPerturbations,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolKind {
    Predicate,
    Function,
}

impl fmt::Display for SymbolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolKind::Predicate => f.write_str("predicate"),
            SymbolKind::Function => f.write_str("function symbol"),
        }
    }
}

fn fmt_at(at: &Option<Position>) -> String {
    match at {
        Some(p) => format!(" at {p}"),
        None => String::new(),
    }
}

impl Error {
    /// Location in the source text, when the error carries one.
    pub fn position(&self) -> Option<Position> {
        match self {
            Error::Syntax { at, .. } | Error::GoalClause { at } => Some(*at),
            Error::Arity { at, .. } | Error::NonGround { at, .. } => *at,
            _ => None,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
