//! Small complex state vectors and propagators.

use nalgebra::{DMatrix, SMatrix, SVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const NORM_TOL: f64 = 1e-12;
pub const UNITARY_TOL: f64 = 1e-12;

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub(crate) fn cis(phase: f64) -> C64 {
    C64::from_polar(1.0, phase)
}

/// Normalized amplitudes over the fixed basis (|0⟩, |1⟩) or (|0⟩, |1⟩, |a⟩).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVector<const N: usize>(SVector<C64, N>);

pub type Qubit = StateVector<2>;
pub type Qutrit = StateVector<3>;

impl<const N: usize> StateVector<N> {
    pub fn new(amplitudes: SVector<C64, N>) -> Result<Self> {
        let deviation = (amplitudes.norm_squared() - 1.0).abs();
        if !(deviation <= NORM_TOL) {
            return Err(Error::NotNormalized { deviation });
        }
        Ok(Self(amplitudes))
    }

    /// Rescales any non-zero vector to unit norm.
    pub fn normalized(amplitudes: SVector<C64, N>) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::NotNormalized { deviation: 1.0 });
        }
        Ok(Self(amplitudes / C64::from(norm)))
    }

    /// Basis state |k⟩.
    pub fn basis(k: usize) -> Self {
        assert!(k < N, "basis index {k} out of range for dimension {N}");
        let mut v = SVector::<C64, N>::zeros();
        v[k] = C64::from(1.0);
        Self(v)
    }

    pub(crate) fn from_raw(v: SVector<C64, N>) -> Self {
        Self(v)
    }

    pub fn amplitudes(&self) -> &SVector<C64, N> {
        &self.0
    }

    pub fn amplitude(&self, k: usize) -> C64 {
        self.0[k]
    }

    pub fn population(&self, k: usize) -> f64 {
        self.0[k].norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &Self) -> C64 {
        self.0.dotc(&other.0)
    }
}

impl Qubit {
    /// σ_y eigenstate |+⟩ = (i|0⟩ + |1⟩)/√2.
    pub fn plus_y() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self(SVector::<C64, 2>::new(c(0.0, s), c(s, 0.0)))
    }

    /// σ_y eigenstate |−⟩ = (−i|0⟩ + |1⟩)/√2.
    pub fn minus_y() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self(SVector::<C64, 2>::new(c(0.0, -s), c(s, 0.0)))
    }

    /// Embed into the three-level space with zero |a⟩ amplitude.
    pub fn embed(&self) -> Qutrit {
        StateVector(SVector::<C64, 3>::new(self.0[0], self.0[1], C64::from(0.0)))
    }
}

/// A 2×2 or 3×3 propagator. Columns are the images of the basis states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitaryMatrix<const N: usize>(SMatrix<C64, N, N>);

pub type Unitary2 = UnitaryMatrix<2>;
pub type Unitary3 = UnitaryMatrix<3>;

impl<const N: usize> UnitaryMatrix<N> {
    pub fn new(m: SMatrix<C64, N, N>) -> Result<Self> {
        Self::with_tolerance(m, UNITARY_TOL)
    }

    pub fn with_tolerance(m: SMatrix<C64, N, N>, tol: f64) -> Result<Self> {
        let deviation = unitarity_deviation(&m);
        if !(deviation <= tol) {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self(m))
    }

    /// Wraps a matrix without checking. Used for truncated blocks whose
    /// non-unitarity is the leakage being measured.
    pub fn from_matrix_unchecked(m: SMatrix<C64, N, N>) -> Self {
        Self(m)
    }

    pub fn identity() -> Self {
        Self(SMatrix::<C64, N, N>::identity())
    }

    pub fn matrix(&self) -> &SMatrix<C64, N, N> {
        &self.0
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.0[(row, col)]
    }

    pub fn deviation(&self) -> f64 {
        unitarity_deviation(&self.0)
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    /// self · other (other acts first).
    pub fn then_after(&self, other: &Self) -> Self {
        Self(self.0 * other.0)
    }

    pub fn apply(&self, psi: &StateVector<N>) -> StateVector<N> {
        StateVector(self.0 * psi.0)
    }

    pub fn max_abs_diff(&self, other: &SMatrix<C64, N, N>) -> f64 {
        max_abs(&(self.0 - other))
    }

    /// Row-major (re, im) pairs.
    pub fn to_pairs(&self) -> Vec<Vec<[f64; 2]>> {
        (0..N)
            .map(|r| (0..N).map(|col| [self.0[(r, col)].re, self.0[(r, col)].im]).collect())
            .collect()
    }
}

impl<const N: usize> std::ops::Mul for UnitaryMatrix<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self(self.0 * rhs.0)
    }
}

/// Serializable row-major matrix of complex pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrixJson(pub Vec<Vec<[f64; 2]>>);

impl ComplexMatrixJson {
    pub fn from_matrix<const N: usize>(m: &SMatrix<C64, N, N>) -> Self {
        Self(
            (0..N)
                .map(|r| (0..N).map(|col| [m[(r, col)].re, m[(r, col)].im]).collect())
                .collect(),
        )
    }

    pub fn to_matrix<const N: usize>(&self) -> Result<SMatrix<C64, N, N>> {
        if self.0.len() != N || self.0.iter().any(|row| row.len() != N) {
            return Err(crate::error::invalid("matrix", format!("expected a {N}x{N} matrix")));
        }
        Ok(SMatrix::<C64, N, N>::from_fn(|r, col| {
            let [re, im] = self.0[r][col];
            c(re, im)
        }))
    }
}

pub fn max_abs<const R: usize, const K: usize>(m: &SMatrix<C64, R, K>) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// max |U†U − I| entrywise.
pub fn unitarity_deviation<const N: usize>(m: &SMatrix<C64, N, N>) -> f64 {
    max_abs(&(m.adjoint() * m - SMatrix::<C64, N, N>::identity()))
}

pub fn hermiticity_deviation<const N: usize>(h: &SMatrix<C64, N, N>) -> f64 {
    max_abs(&(h - h.adjoint()))
}

/// Eigen-decomposition of a Hermitian matrix: real eigenvalues and the
/// unitary whose columns are the eigenvectors.
#[derive(Debug, Clone)]
pub struct HermitianEigen<const N: usize> {
    pub values: [f64; N],
    pub vectors: SMatrix<C64, N, N>,
}

impl<const N: usize> HermitianEigen<N> {
    pub fn new(h: &SMatrix<C64, N, N>) -> Self {
        // symmetrize away rounding before handing to the solver
        let sym = (h + h.adjoint()) * C64::from(0.5);
        let dynamic = DMatrix::<C64>::from_fn(N, N, |r, col| sym[(r, col)]);
        let eig = SymmetricEigen::new(dynamic);
        let mut values = [0.0; N];
        values.iter_mut().zip(eig.eigenvalues.iter()).for_each(|(v, e)| *v = *e);
        let vectors = SMatrix::<C64, N, N>::from_fn(|r, col| eig.eigenvectors[(r, col)]);
        Self { values, vectors }
    }

    /// exp(−i·H·t)
    pub fn propagator(&self, t: f64) -> SMatrix<C64, N, N> {
        let phases = SMatrix::<C64, N, N>::from_fn(|r, col| {
            if r == col {
                cis(-self.values[r] * t)
            } else {
                C64::from(0.0)
            }
        });
        self.vectors * phases * self.vectors.adjoint()
    }
}

/// exp(−i·H·t) for Hermitian H (angular-frequency units, ħ divided out).
pub fn hermitian_propagator<const N: usize>(h: &SMatrix<C64, N, N>, t: f64) -> UnitaryMatrix<N> {
    UnitaryMatrix(HermitianEigen::new(h).propagator(t))
}

/// ⟨ψ|H|ψ⟩
pub fn expectation<const N: usize>(h: &SMatrix<C64, N, N>, psi: &StateVector<N>) -> f64 {
    psi.0.dotc(&(h * psi.0)).re
}
