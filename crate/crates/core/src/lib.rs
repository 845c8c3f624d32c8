//! Integer-valued angles between radial foliations of the closed annulus, and
//! the twist-map computations built on them: monotonicity certificates,
//! periodic orbits of type `(p, q)`, rotation numbers, invariant graphs and
//! connecting-orbit searches.

pub mod annulus_maps;
pub mod digital_line;
pub mod foliation_engine;
pub mod theorems;

/// Library version, recorded in result documents.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
