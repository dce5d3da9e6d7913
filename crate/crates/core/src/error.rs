use thiserror::Error;

use crate::eval::InfeasibilityReport;
use crate::instance::Violation;
use crate::patterns::PatternId;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid instance: {}", join_violations(.0))]
    Validation(Vec<Violation>),

    #[error("unknown pattern id {0}")]
    UnknownPattern(PatternId),

    #[error("mold {mold} needs {load} periods but the horizon is {horizon}")]
    Horizon {
        mold: usize,
        load: u32,
        horizon: u32,
    },

    #[error("infeasible chromosome: {0}")]
    Infeasible(InfeasibilityReport),

    #[error("no cutting or overlapping pattern produces bars for mold class {class}")]
    EmptyRatios { class: usize },

    #[error("search budget of {budget} nodes exceeded")]
    BudgetExceeded { budget: u64 },

    #[error("no feasible solution exists within the search bounds")]
    NoFeasibleSolution,

    #[error("assignment has {got} values, model has {expected} variables")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("no feasible individual could be constructed for this instance")]
    InfeasibleInstance,

    #[error("every pattern is already used by the chromosome")]
    NoPatternOutside,

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("domain error: {0}")]
    Domain(String),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
