//! Product-operator simulation of liquid-state NMR quantum information
//! processing.
//!
//! Spins are 0-based in the library API (spin 0 is the first spin, written
//! `Iz¹` in the usual notation); the text formats and the CLI use 1-based
//! spin numbers. Dense matrices put spin 0 in the most significant bit.

pub mod decoherence;
pub mod error;
pub mod hardy;
pub mod pauli;
pub mod pulse;
pub mod qec;
pub mod readout;
pub mod state_prep;

pub use error::{Error, Result};
pub use pauli::{Basis, DensityOperator, Form, PauliLabel, SpinOperator, Symbol};
