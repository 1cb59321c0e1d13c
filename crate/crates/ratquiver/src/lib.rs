//! Exact computations with Galois-rational quivers, etale species, their
//! representations, unipotent iterations and rational sl2 Harish-Chandra blocks.

pub mod exact_algebra;
pub mod gsets;
pub mod harish_chandra;
pub mod quiver;
pub mod random;
pub mod report;
pub mod representations;
pub mod species;
pub mod sweeps;
pub mod unipotent;
