use serde::Serialize;

use crate::error::{Error, Result};

/// Environment variable that overrides every exhaustiveness bound.
pub const BOUND_ENV: &str = "NILPOTENT_ACTIONS_BOUND";

/// Per-operation limits on exhaustive enumeration.
///
/// Exceeding a limit is always reported as [`Error::BoundExceeded`]; no
/// operation silently falls back to sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Bounds {
    /// Largest group order accepted by subgroup enumeration (`rank_bruteforce`).
    pub rank_order: usize,
    /// Multiplication budget for centre computations.
    pub centre_work: u64,
    /// Largest group order for exhaustive axiom, homomorphism and diagram checks.
    pub group_order: usize,
    /// Largest `|A|` accepted by the Hermitian form search.
    pub hermitian_order: usize,
    /// Largest source order for embedding search.
    pub embed_source: usize,
    /// Largest target order for embedding search.
    pub embed_target: usize,
    /// Candidate budget for combinatorial searches.
    pub search_budget: u64,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            rank_order: 512,
            centre_work: 1_000_000,
            group_order: 4096,
            hermitian_order: 729,
            embed_source: 64,
            embed_target: 4096,
            search_budget: 20_000_000,
        }
    }
}

impl Bounds {
    /// Replaces every order bound by `n`; multiplication budgets scale as `256 * n`.
    pub fn with_order_cap(n: usize) -> Self {
        Bounds {
            rank_order: n,
            centre_work: 256 * n as u64,
            group_order: n,
            hermitian_order: n,
            embed_source: n,
            embed_target: n,
            search_budget: Bounds::default().search_budget,
        }
    }

    /// Reads [`BOUND_ENV`]; unset means defaults.
    pub fn from_env() -> Result<Self> {
        match std::env::var(BOUND_ENV) {
            Err(_) => Ok(Bounds::default()),
            Ok(raw) => raw
                .trim()
                .parse::<usize>()
                .map(Bounds::with_order_cap)
                .map_err(|_| Error::InvalidInput(format!("{BOUND_ENV}={raw:?} is not a count"))),
        }
    }

    pub(crate) fn check(what: &'static str, needed: u128, limit: u128) -> Result<()> {
        if needed > limit {
            Err(Error::BoundExceeded {
                what,
                needed,
                limit,
            })
        } else {
            Ok(())
        }
    }
}
