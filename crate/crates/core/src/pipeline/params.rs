//! Dimensions of the uniform target spaces in terms of a rank bound `r`.

use serde::Serialize;

use crate::chern::r3_bound;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VarietyParams {
    pub torus_power: u128,
    pub projective_dim: u128,
}

/// `T^{r⌊r/2⌋} × P^r`.
pub fn variety_params(r: u64) -> VarietyParams {
    let r = r as u128;
    VarietyParams {
        torus_power: r * (r / 2),
        projective_dim: r,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Fiber {
    /// `stiefel` or `grassmann`.
    pub kind: String,
    pub k: u128,
    /// `n` of the ambient `C^n`.
    pub ambient: u128,
    pub dim: u128,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ManifoldParams {
    /// Real dimension of the torus factor.
    pub torus_dim: u128,
    pub t: u128,
    /// `Stiefel_k(C^t)` for `1 ≤ k ≤ t` and `Grassmann_k(C^{t+1})` for
    /// `1 ≤ k ≤ t + 1`.
    pub fiber_choices: Vec<Fiber>,
}

/// Real dimension `k(2t − k)` of the Stiefel manifold of unitary `k`-frames
/// in `C^t`.
pub fn stiefel_dim(k: u128, t: u128) -> Result<u128> {
    if k == 0 || k > t {
        return Err(Error::InvalidInput(format!("Stiefel index {k} outside 1..={t}")));
    }
    Ok(k * (2 * t - k))
}

/// `k(t − k)`, the dimension of the Grassmannian of `k`-planes in `C^t`.
pub fn grassmann_dim(k: u128, t: u128) -> Result<u128> {
    if k == 0 || k > t {
        return Err(Error::InvalidInput(format!("Grassmann index {k} outside 1..={t}")));
    }
    Ok(k * (t - k))
}

/// `T^{2r⌊r/2⌋}` with `t = R3(2⌊r/2⌋)` and the available fibres.
pub fn manifold_params(r: u64) -> ManifoldParams {
    let half = (r / 2) as u128;
    let t = r3_bound(2 * (r / 2) as u32);
    let mut fiber_choices = Vec::new();
    for k in 1..=t {
        fiber_choices.push(Fiber {
            kind: "stiefel".into(),
            k,
            ambient: t,
            dim: stiefel_dim(k, t).expect("k in range"),
        });
    }
    for k in 1..=t + 1 {
        fiber_choices.push(Fiber {
            kind: "grassmann".into(),
            k,
            ambient: t + 1,
            dim: grassmann_dim(k, t + 1).expect("k in range"),
        });
    }
    ManifoldParams {
        torus_dim: 2 * r as u128 * half,
        t,
        fiber_choices,
    }
}
