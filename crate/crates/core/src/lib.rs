//! Single-qubit gate design for an rf-SQUID Λ system.
//!
//! * [`spectrum`]: flux eigenproblem of the SQUID, Λ-level extraction, Rabi
//!   frequencies.
//! * [`lambda`]: rotating-frame three-level and effective two-level dynamics,
//!   closed-form propagator, off-resonance checklist.
//! * [`compiler`]: pulse sequences for NOT, Hadamard, phase and arbitrary
//!   SU(2) gates; composite propagators; fidelity.
//! * [`geometric`]: Aharonov–Anandan rotation and phase gates, field-off gaps.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod compiler;
pub mod constants;
pub mod error;
pub mod geometric;
pub mod lambda;
pub mod linalg;
pub mod spectrum;
pub mod tridiag;

pub use error::{Error, Result};
