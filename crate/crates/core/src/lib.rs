//! Simulation of pulsed SPDC heralded single photons, seeded-DFG coherent
//! states, and their two-photon interference.
//!
//! * [`optics`]: units, spectral grids, amplitude profiles
//! * [`phasematch`]: dispersion models and quasi-phase matching
//! * [`jsa`]: joint spectral amplitudes, filters, marginals
//! * [`schmidt`]: Schmidt decomposition, purity, `g2(0)`
//! * [`photstat`]: photon-number statistics of each arm
//! * [`hom`]: Hong-Ou-Mandel visibility, dip shape and Fock-space oracle
//! * [`scenario`]: scenario files and the batch pipelines behind the CLI

pub mod error;
pub mod export;
pub mod hom;
pub mod jsa;
pub mod optics;
pub mod phasematch;
pub mod photstat;
pub mod scenario;
pub mod schmidt;

pub use error::{Error, Module, Result};
