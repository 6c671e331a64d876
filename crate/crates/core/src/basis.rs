//! Operators in the fixed basis order (|0⟩, |1⟩) and (|0⟩, |1⟩, |a⟩).
//!
//! The qubit Pauli set treats |1⟩ as "up": σ_z = σ11 − σ00, σ⁻ = |0⟩⟨1|,
//! σ⁺ = |1⟩⟨0|, σ_x = σ⁺ + σ⁻ and σ_y = i(σ⁻ − σ⁺). With this choice
//! ω0σ_z − g e^{iδφ}σ⁻ − g e^{−iδφ}σ⁺ equals B·σ with
//! B = (−g cos δφ, −g sin δφ, ω0), and the σ_y eigenstates are
//! |±⟩ = (±i|0⟩ + |1⟩)/√2.

use nalgebra::{Matrix2, Matrix3};

use crate::linalg::{c, C64};

const Z: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

pub const LEVEL_0: usize = 0;
pub const LEVEL_1: usize = 1;
pub const LEVEL_A: usize = 2;

pub fn sigma_00() -> Matrix2<C64> {
    Matrix2::new(ONE, Z, Z, Z)
}

pub fn sigma_11() -> Matrix2<C64> {
    Matrix2::new(Z, Z, Z, ONE)
}

/// |0⟩⟨1|
pub fn sigma_minus() -> Matrix2<C64> {
    Matrix2::new(Z, ONE, Z, Z)
}

/// |1⟩⟨0|
pub fn sigma_plus() -> Matrix2<C64> {
    Matrix2::new(Z, Z, ONE, Z)
}

pub fn sigma_x() -> Matrix2<C64> {
    sigma_plus() + sigma_minus()
}

pub fn sigma_y() -> Matrix2<C64> {
    (sigma_minus() - sigma_plus()) * c(0.0, 1.0)
}

pub fn sigma_z() -> Matrix2<C64> {
    sigma_11() - sigma_00()
}

/// Bloch vector (⟨σ_x⟩, ⟨σ_y⟩, ⟨σ_z⟩) of the (possibly unnormalized) qubit
/// amplitudes c0, c1.
pub fn bloch_components(c0: C64, c1: C64) -> [f64; 3] {
    let coherence = c0.conj() * c1;
    [2.0 * coherence.re, -2.0 * coherence.im, c1.norm_sqr() - c0.norm_sqr()]
}

/// |i⟩⟨j| in the three-level space.
pub fn ket_bra3(i: usize, j: usize) -> Matrix3<C64> {
    let mut m = Matrix3::zeros();
    m[(i, j)] = ONE;
    m
}
