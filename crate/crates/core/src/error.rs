use std::fmt;

use crate::model::Coalition;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A situation failed shape or sign validation.
    InvalidSituation(String),
    /// A coalition is empty or references players outside the situation.
    InvalidCoalition(String),
    /// An ordering plan violates the zero-matching convention or points
    /// outside the horizon.
    InfeasiblePlan { period: usize, detail: String },
    /// A plan carries inventory and backlog across the same period boundary
    /// in opposite directions; netted flows would undercount its cost.
    CrossingPlan { boundary: usize },
    /// A brute-force oracle was asked for an instance beyond its size cap.
    OracleLimit(String),
    /// Building a game over more players than the configured cap.
    TooManyPlayers { players: usize, cap: usize },
    /// Alpha weights are missing, negative, or sum to zero.
    InvalidAlpha(String),
    /// An operation that requires a consolidated situation was called on a
    /// non-consolidated one.
    NotConsolidated,
    /// A pmas candidate does not cover every nonempty coalition.
    IncompletePmas(Coalition),
    /// An allocation has the wrong number of shares.
    InvalidAllocation { expected: usize, got: usize },
    /// A coalition collection fails the balancedness equations.
    NotBalanced(String),
    /// The replication factor of a balanced collection exceeds the cap.
    RCapExceeded { required: u64, cap: u64 },
    /// A linear program is structurally malformed (dimension mismatch).
    InvalidProblem(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidSituation(msg) => write!(f, "invalid situation: {msg}"),
            Error::InvalidCoalition(msg) => write!(f, "invalid coalition: {msg}"),
            Error::InfeasiblePlan { period, detail } => {
                write!(f, "infeasible plan at period {period}: {detail}")
            }
            Error::CrossingPlan { boundary } => write!(
                f,
                "crossing plan: opposite flows across boundary {boundary}|{}",
                boundary + 1
            ),
            Error::OracleLimit(msg) => write!(f, "oracle limit exceeded: {msg}"),
            Error::TooManyPlayers { players, cap } => {
                write!(f, "{players} players exceed the cap of {cap}")
            }
            Error::InvalidAlpha(msg) => write!(f, "invalid alpha weights: {msg}"),
            Error::NotConsolidated => write!(f, "situation is not consolidated"),
            Error::IncompletePmas(c) => write!(f, "pmas misses coalition {c}"),
            Error::InvalidAllocation { expected, got } => {
                write!(f, "allocation has {got} shares, expected {expected}")
            }
            Error::NotBalanced(msg) => write!(f, "collection is not balanced: {msg}"),
            Error::RCapExceeded { required, cap } => {
                write!(f, "replication factor {required} exceeds cap {cap}")
            }
            Error::InvalidProblem(msg) => write!(f, "invalid linear program: {msg}"),
        }
    }
}

impl std::error::Error for Error {}
