//! Error vocabulary shared across the crate.

use thiserror::Error;

/// Errors produced by parsing, algebra, and the summation algorithms.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Input text does not match the expression grammar.
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    /// A factorial, binomial, Pochhammer, or gamma argument is not an
    /// integer-linear combination of k and n plus a parameter constant.
    #[error("argument is not linear in the summation variables: {detail}")]
    NonLinearArgument { detail: String },

    /// The term ratio in the requested variable and step is not a rational
    /// function, so the hypergeometric machinery does not apply.
    #[error("term is not hypergeometric: {detail}")]
    NotHypergeometric { detail: String },

    /// The antidifference equation has no rational-function solution.
    #[error("no hypergeometric antidifference exists")]
    NoSolution,

    /// A linear system required by the algorithm is inconsistent.
    #[error("linear system has no solution")]
    Unsolvable,

    /// No holonomic recurrence was found up to the requested order.
    #[error("no recurrence found up to order {max_order}")]
    NoRecurrenceFound { max_order: usize },

    /// The summand does not have eventually-zero support, so the definite
    /// sum over all integers k is not a finite sum.
    #[error("sum does not terminate: {detail}")]
    NonTerminating { detail: String },

    /// Numeric evaluation hit a pole (zero denominator or gamma at a
    /// nonpositive integer).
    #[error("evaluation hit a pole: {detail}")]
    Pole { detail: String },

    /// Numeric evaluation requires a value outside the exact rational domain
    /// (for example a factorial at a non-integer).
    #[error("not exactly evaluable: {detail}")]
    NotEvaluable { detail: String },

    /// A variable had no assigned value during evaluation.
    #[error("variable {0} has no assigned value")]
    UnassignedVariable(char),

    /// A structurally invalid request (zero stride, missing variable, and
    /// similar caller mistakes).
    #[error("invalid input: {detail}")]
    InvalidInput { detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;
