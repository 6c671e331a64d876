//! Physical constants shared by every module.

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Superconducting flux quantum h/2e, Wb.
pub const FLUX_QUANTUM: f64 = 2.067_833_848e-15;

/// Planck constant, J·s.
pub const PLANCK: f64 = 2.0 * std::f64::consts::PI * HBAR;
