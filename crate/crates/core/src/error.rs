use thiserror::Error;

use crate::ir::{GateId, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("ill-formed formula: {0}")]
    WellFormedness(String),
    #[error("{what} budget of {budget} exceeded")]
    BudgetExceeded { what: &'static str, budget: usize },
    #[error("syntactic monotonicity is undefined over an unordered field")]
    FieldUnordered,
    #[error("formulas differ in commutativity mode")]
    ModeMismatch,
    #[error("formulas live in different fields")]
    FieldMismatch,
    #[error("formula is not skew: product gate {0} has two non-leaf children")]
    NotSkew(GateId),
    #[error("variable {0} labels more than one leaf")]
    DuplicateLeafVariable(Var),
    #[error("formula of size {size} is not larger than k = {k}")]
    TooSmall { size: u64, k: u64 },
    #[error("gate {0} does not have fan-in 2")]
    NotFanIn2(GateId),
    #[error("formula does not compute a homogeneous polynomial of degree >= 2")]
    NotSemanticallyHomogeneous,
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error("{count} gates satisfy the split predicate; expected exactly one")]
    SplitNotUnique { count: usize },
    #[error("formula does not compute the hard polynomial")]
    NotComputingH,
    #[error("variable universe of size {size} exceeds the bound {bound}")]
    UniverseTooLarge { size: u128, bound: u128 },
    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),
    #[error("infeasible shape: {0}")]
    InfeasibleShape(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
