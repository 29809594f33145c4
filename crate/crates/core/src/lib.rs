//! Exact constructions and exhaustive checks for finite class-two nilpotent
//! groups: Heisenberg groups, theta groups, isotropic sublattice data and
//! their cocycles, the modular Waring extension, and Chern-character
//! certificates on tori.

pub mod bounds;
pub mod chern;
pub mod error;
pub mod finabel;
pub mod heisenberg;
pub mod intmat;
pub mod lattice;
pub mod pipeline;
pub mod table;
pub mod theta;
pub mod verify;
pub mod waring;

pub use bounds::Bounds;
pub use error::{Error, Result};
