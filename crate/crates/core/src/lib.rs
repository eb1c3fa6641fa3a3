//! Coherence and entanglement measures for finite-dimensional quantum
//! systems, incoherent channels, and the generalized-CNOT conversion of
//! coherence into system–ancilla entanglement.

pub mod channels;
pub mod cli;
pub mod coherence;
pub mod conversion;
pub mod entanglement;
pub mod error;
pub mod io;
pub mod linalg;
pub mod report;
pub mod simplex;
pub mod states;
pub mod suites;

pub use error::{Error, Result};
pub use num_complex::Complex64;
