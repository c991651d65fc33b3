//! Pseudo-spectral machinery for the 2-D Boussinesq system with
//! temperature-dependent viscosity and fractional temperature dissipation,
//! together with a Littlewood-Paley/Besov diagnostic toolkit, decay-rate
//! fitting, Schonbek frequency splitting, stability experiments, and the
//! parameter-admissibility calculator.
//!
//! Everything is posed on the periodic torus `[0, L]^2`; a run owns its state
//! exclusively and is deterministic for a fixed seed.

pub mod admissibility;
pub mod checkpoint;
pub mod config;
pub mod diag;
pub mod error;
pub mod fft;
pub mod field;
pub mod grid;
pub mod init;
pub mod lp;
pub mod ops;
pub mod physics;
pub mod run;
pub mod solver;
pub mod stability;

pub use error::FbsqError;
pub use field::{PhysField, SpectralField, VectorField};
pub use grid::Grid;
