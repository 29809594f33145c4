use thiserror::Error;

/// Errors raised by the algebraic constructions and exhaustive checks.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("group mismatch: {0}")]
    GroupMismatch(String),

    #[error("relation matrix has infinite cokernel (rank {rank} < {rows} rows)")]
    InfiniteCokernel { rank: usize, rows: usize },

    #[error("{what}: needs {needed}, bound is {limit}")]
    BoundExceeded {
        what: &'static str,
        needed: u128,
        limit: u128,
    },

    #[error("pairing is degenerate: {0}")]
    Degenerate(String),

    #[error("centre group is not cyclic (factors {0:?})")]
    NonCyclicCentre(Vec<u64>),

    #[error("square does not commute: {0}")]
    SquareNotCommuting(String),

    #[error("characteristic {p} divides group order {order}")]
    Coprimality { p: u64, order: u128 },

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
