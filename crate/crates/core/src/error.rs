use alloc::string::String;

use crate::module::JoinFailure;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{kind} `{name}` used with arity {found}, previously {expected}")]
    ArityMismatch {
        kind: &'static str,
        name: String,
        expected: usize,
        found: usize,
    },

    #[error("`{name}` is used both as {first} and as {second}")]
    SymbolClash {
        name: String,
        first: &'static str,
        second: &'static str,
    },

    #[error("count aggregate bound must be at least 1")]
    AggregateBound,

    #[error("predicate `{0}` listed twice")]
    DuplicatePredicate(String),

    #[error("predicate lists do not match: {0}")]
    ListMismatch(String),

    #[error("step expression `{expr}` evaluates below zero at step {step}")]
    NegativeStep { expr: String, step: u64 },

    #[error("instantiated predicate `{0}` collides with a declared predicate")]
    StepNameCollision(String),

    #[error("parameterized atom `{0}` is not allowed here")]
    UnexpectedStep(String),

    #[error("`{0}` is not covered by the interpretation")]
    Uncovered(String),

    #[error("free variable `{0}` in a sentence")]
    FreeVariable(String),

    #[error("model search needs a function-free signature, found `{0}`")]
    FunctionSymbols(String),

    #[error("signature has no object constant, the Herbrand universe is empty")]
    NoObjectConstant,

    #[error("universe must not be empty")]
    EmptyUniverse,

    #[error("enumeration needs {count} candidates, limit is {limit}")]
    CandidateLimit { count: u128, limit: u64 },

    #[error("interpretations are not compatible: {0}")]
    Incompatible(String),

    #[error("not ground: {0}")]
    NonGround(String),

    #[error("count aggregates are not supported here: {0}")]
    Aggregate(String),

    #[error("invalid module: {0}")]
    InvalidModule(String),

    #[error("modules are not joinable: {0}")]
    NotJoinable(JoinFailure),

    #[error("theory is not acyclic: {0}")]
    NotAcyclic(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}
