//! Stimulated Raman coincidence spectroscopy of a Frenkel-exciton aggregate
//! probed by entangled twin photons.
//!
//! Energies are carried in eV and times in fs throughout. The only place the
//! two meet is [`HBAR`]: every phase is written `exp(-i * omega * t / HBAR)`.
//!
//! The crate is organised bottom-up:
//!
//! * [`exciton`] builds the one-exciton Hamiltonian, diagonalizes it and
//!   propagates the reduced density matrix under a secular Lindblad generator.
//! * [`source`] evaluates the twin-photon joint amplitude (frequency and time
//!   domain) plus the uncorrelated and classical reference sources.
//! * [`signal`] turns a density-matrix timeline and a photon source into the
//!   coincidence signal, either through the closed-form impulsive expression
//!   or by direct double-time quadrature.
//! * [`config`], [`table`] and [`run`] drive declarative scans and write CSV;
//!   [`validate`] holds the invariant suite behind the `validate` mode.

pub mod config;
pub mod error;
pub mod exciton;
pub mod run;
pub mod signal;
pub mod source;
pub mod table;
pub mod validate;

pub use error::{Error, Result};

/// Reduced Planck constant in eV·fs.
pub const HBAR: f64 = 0.658_211_956_9;

pub type C64 = num_complex::Complex64;
pub type CMatrix = nalgebra::DMatrix<C64>;
