//! Simulation of parity-breaking multi-excitation processes in singly driven
//! Jaynes-Cummings systems.
//!
//! A single coherent drive on a qubit coupled to cavities produces, in the
//! dressed-qubit basis, coupling terms of the form `Sz (a + a^dag)`. Those
//! terms break parity and enable three effective processes:
//!
//! - **I**: one dressed qubit exciting one photon in each of two cavities,
//! - **II**: frequency conversion between two cavities,
//! - **III**: one photon exciting two dressed qubits.
//!
//! The crate builds the Hamiltonians ([`models`]), derives effective couplings
//! both in closed form and by block elimination ([`effective`]), measures them
//! from exact spectra ([`spectral`]), and evolves states with and without
//! cavity loss ([`dynamics`]). [`feasibility`] turns the rates into
//! rate-to-decoherence ratios for experimental platforms.

pub mod config;
pub mod dynamics;
pub mod effective;
pub mod error;
pub mod feasibility;
pub mod hilbert;
pub mod linalg;
pub mod models;
pub mod optimize;
pub mod output;
pub mod scenario;
pub mod spectral;

pub use error::{Error, ErrorCategory, Result};
pub use hilbert::{OperatorMatrix, SpaceSpec, Subsystem};
pub use models::{DressedFrame, DriveParams, TwoQubitDriveParams};
pub use effective::Process;
