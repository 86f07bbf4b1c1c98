//! Compound superradiance: several small Dicke samples exchanging photons
//! through one shared radiation mode.
//!
//! The pipeline runs bottom-up:
//!
//! - [`coupling`]: unit system and the far-field couplings α(r), β(r).
//! - [`basis`]: photon-number sectors of the uncoupled product basis.
//! - [`hamiltonian`]: the photon-conserving exchange interaction per sector.
//! - [`dressed`]: sector diagonalization, labels and the two-sample closed form.
//! - [`rates`]: transverse dipole, transition tables and cascade branches.
//! - [`dynamics`]: cascade populations and intensity traces.
//! - [`spectrum`]: chirp schedules, frequency excursion, trapped-ion sweep
//!   and the external-field coupling model.
//! - [`cli`]: configuration and the command-line subcommands.

pub mod basis;
pub mod cli;
pub mod coupling;
pub mod dressed;
pub mod dynamics;
mod error;
pub mod hamiltonian;
pub mod rates;
pub mod spectrum;

pub use error::{Error, Result};

/// Complex amplitude type used throughout.
pub type C64 = nalgebra::Complex<f64>;
