//! Linear Rayleigh-Taylor stability of two viscous, capillary fluid layers.
//!
//! The crate evaluates the interface boundary symbol of the two-phase
//! Stokes problem with surface tension and gravity, finds and counts its
//! zeros, solves the per-mode transmission problem, runs approximate
//! eigenfunction experiments on periodic grids and evolves interface
//! perturbations mode by mode.

pub mod dispersion;
pub mod error;
pub mod grid;
pub mod io;
pub mod mode;
pub mod params;
pub mod simulator;
pub mod symbol;
pub mod witness;

pub use error::{Error, Result};
pub use params::{FluidParams, Phase};
pub use symbol::Complex64;
