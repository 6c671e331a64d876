//! rf-SQUID flux eigenproblem.
//!
//! The loop Hamiltonian Q²/2C + (Φ−Φx)²/2L − E_J cos(2πΦ/Φ0) is solved in the
//! dimensionless flux x = Φ/Φ0 with energies in units of ħ·ω_LC. In those
//! units the kinetic term is −κ d²/dx² with
//!
//! ```text
//! κ = ħ·Z0 / (2·Φ0²)      (≈ 6.2e-4 for Z0 = 50 Ω)
//! ```
//!
//! so wavefunctions localize on a flux scale of order sqrt(2κ) ≈ 0.035 Φ0
//! around each well minimum. The potential becomes
//! (x − x_x)²/(4κ) − (E_J/ħω_LC)·cos(2πx).
//!
//! The operator is discretized with second-order central differences on a
//! uniform grid with hard walls at both window edges, which yields a real
//! symmetric tridiagonal matrix.

use serde::{Deserialize, Serialize};

use crate::constants::{FLUX_QUANTUM, HBAR};
use crate::error::{invalid, Error, Result};
use crate::tridiag::SymTridiagonal;

/// Device constants of the rf SQUID, SI units throughout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SquidParams {
    /// Junction capacitance, F.
    pub capacitance: f64,
    /// Loop inductance, H.
    pub inductance: f64,
    /// Junction critical current, A.
    pub critical_current: f64,
    /// External flux bias, Wb.
    pub flux_bias: f64,
}

impl SquidParams {
    pub fn new(capacitance: f64, inductance: f64, critical_current: f64, flux_bias: f64) -> Result<Self> {
        let params = Self {
            capacitance,
            inductance,
            critical_current,
            flux_bias,
        };
        params.validate()?;
        Ok(params)
    }

    /// Device with the bias given in units of Φ0.
    pub fn with_bias_in_flux_quanta(
        capacitance: f64,
        inductance: f64,
        critical_current: f64,
        bias: f64,
    ) -> Result<Self> {
        Self::new(capacitance, inductance, critical_current, bias * FLUX_QUANTUM)
    }

    /// C = 40 fF, L = 100 pH, I_c = 3.95 µA, Φx = −0.501 Φ0.
    pub fn reference_device() -> Self {
        Self {
            capacitance: 40e-15,
            inductance: 100e-12,
            critical_current: 3.95e-6,
            flux_bias: -0.501 * FLUX_QUANTUM,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.capacitance > 0.0 && self.capacitance.is_finite()) {
            return Err(invalid("C", format!("capacitance must be positive, got {}", self.capacitance)));
        }
        if !(self.inductance > 0.0 && self.inductance.is_finite()) {
            return Err(invalid("L", format!("inductance must be positive, got {}", self.inductance)));
        }
        if !(self.critical_current >= 0.0 && self.critical_current.is_finite()) {
            return Err(invalid(
                "I_c",
                format!("critical current must be non-negative, got {}", self.critical_current),
            ));
        }
        if !self.flux_bias.is_finite() {
            return Err(invalid("Phi_x", "flux bias must be finite"));
        }
        Ok(())
    }

    /// Bias in units of Φ0.
    pub fn bias_in_flux_quanta(&self) -> f64 {
        self.flux_bias / FLUX_QUANTUM
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedCharacteristics {
    pub beta_l: f64,
    /// Ω
    pub z0: f64,
    /// rad/s
    pub omega_lc: f64,
    /// J
    pub josephson_energy: f64,
}

pub fn derive_characteristics(params: &SquidParams) -> Result<DerivedCharacteristics> {
    params.validate()?;
    let SquidParams {
        capacitance: c,
        inductance: l,
        critical_current: ic,
        ..
    } = *params;
    Ok(DerivedCharacteristics {
        beta_l: 2.0 * std::f64::consts::PI * l * ic / FLUX_QUANTUM,
        z0: (l / c).sqrt(),
        omega_lc: 1.0 / (l * c).sqrt(),
        josephson_energy: ic * FLUX_QUANTUM / (2.0 * std::f64::consts::PI),
    })
}

/// Uniform grid over the dimensionless flux x = Φ/Φ0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluxGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

impl FluxGrid {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        let grid = Self { x_min, x_max, n_points };
        grid.validate()?;
        Ok(grid)
    }

    /// x ∈ [−1.05, 0.05] with 4001 points: both wells near x ≈ −0.5 plus margin.
    pub fn default_window() -> Self {
        Self {
            x_min: -1.05,
            x_max: 0.05,
            n_points: 4001,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x_min.is_finite() && self.x_max.is_finite() && self.x_min < self.x_max) {
            return Err(invalid(
                "grid",
                format!("need x_min < x_max, got [{}, {}]", self.x_min, self.x_max),
            ));
        }
        if self.n_points < 3 || self.n_points.is_multiple_of(2) {
            return Err(invalid(
                "n_points",
                format!("grid size must be odd and at least 3, got {}", self.n_points),
            ));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        self.x_min + (self.x_max - self.x_min) * (i as f64) / ((self.n_points - 1) as f64)
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.point(i)).collect()
    }

    /// Same window with the spacing halved (2n−1 points, still odd).
    pub fn refined(&self) -> Self {
        Self {
            n_points: 2 * self.n_points - 1,
            ..*self
        }
    }

    pub fn with_points(&self, n_points: usize) -> Result<Self> {
        Self::new(self.x_min, self.x_max, n_points)
    }
}

/// U(Φ) at every grid point, in joules.
pub fn build_potential(params: &SquidParams, grid: &FluxGrid) -> Result<Vec<f64>> {
    let scaled = ScaledModel::new(params)?;
    grid.validate()?;
    let energy_unit = scaled.energy_unit;
    let u: Vec<f64> = grid.points().iter().map(|&x| scaled.potential(x) * energy_unit).collect();
    check_brackets_minimum(&u, grid)?;
    Ok(u)
}

fn check_brackets_minimum(u: &[f64], grid: &FluxGrid) -> Result<()> {
    let argmin = u
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc })
        .0;
    if argmin == 0 || argmin == u.len() - 1 {
        return Err(Error::GridMissesMinimum {
            x_min: grid.x_min,
            x_max: grid.x_max,
        });
    }
    Ok(())
}

/// The problem in units of x = Φ/Φ0 and ħ·ω_LC.
#[derive(Debug, Clone, Copy)]
struct ScaledModel {
    kinetic: f64,
    quadratic: f64,
    josephson: f64,
    bias: f64,
    energy_unit: f64,
}

impl ScaledModel {
    fn new(params: &SquidParams) -> Result<Self> {
        let derived = derive_characteristics(params)?;
        let energy_unit = HBAR * derived.omega_lc;
        let kinetic = HBAR * derived.z0 / (2.0 * FLUX_QUANTUM * FLUX_QUANTUM);
        Ok(Self {
            kinetic,
            // Φ0²/(2L·ħω_LC) = 1/(4κ)
            quadratic: FLUX_QUANTUM * FLUX_QUANTUM / (2.0 * params.inductance * energy_unit),
            josephson: derived.josephson_energy / energy_unit,
            bias: params.bias_in_flux_quanta(),
            energy_unit,
        })
    }

    fn potential(&self, x: f64) -> f64 {
        let dx = x - self.bias;
        self.quadratic * dx * dx - self.josephson * (2.0 * std::f64::consts::PI * x).cos()
    }

    fn hamiltonian(&self, grid: &FluxGrid) -> Result<SymTridiagonal> {
        let h = grid.spacing();
        let hop = self.kinetic / (h * h);
        let diag = grid.points().iter().map(|&x| self.potential(x) + 2.0 * hop).collect();
        SymTridiagonal::new(diag, vec![-hop; grid.n_points - 1])
    }
}

/// Kinetic prefactor κ = ħZ0/(2Φ0²) of the dimensionless Hamiltonian.
pub fn kinetic_prefactor(params: &SquidParams) -> Result<f64> {
    Ok(ScaledModel::new(params)?.kinetic)
}

#[derive(Debug, Clone)]
pub struct SpectralResult {
    /// Ascending eigenvalues, J.
    pub energies: Vec<f64>,
    /// Grid-sampled real eigenvectors with Σψ² = 1.
    pub wavefunctions: Vec<Vec<f64>>,
    pub grid: FluxGrid,
    pub params: SquidParams,
}

pub fn solve_spectrum(params: &SquidParams, grid: &FluxGrid, n_levels: usize) -> Result<SpectralResult> {
    if n_levels < 3 {
        return Err(invalid("n_levels", format!("need at least 3 levels, got {n_levels}")));
    }
    if n_levels > grid.n_points {
        return Err(invalid(
            "n_levels",
            format!("{n_levels} levels requested on a {}-point grid", grid.n_points),
        ));
    }
    // validates the window as well
    build_potential(params, grid)?;
    let scaled = ScaledModel::new(params)?;
    let h = scaled.hamiltonian(grid)?;
    let pairs = h.lowest_eigenpairs(n_levels)?;
    Ok(SpectralResult {
        energies: pairs.values.iter().map(|e| e * scaled.energy_unit).collect(),
        wavefunctions: pairs.vectors,
        grid: *grid,
        params: *params,
    })
}

impl SpectralResult {
    pub fn n_levels(&self) -> usize {
        self.energies.len()
    }

    fn check_level(&self, i: usize) -> Result<()> {
        if i >= self.n_levels() {
            return Err(Error::LevelOutOfRange {
                index: i,
                available: self.n_levels(),
            });
        }
        Ok(())
    }

    /// Signed ⟨i|(x − origin)|j⟩ with x = Φ/Φ0.
    pub fn flux_moment(&self, i: usize, j: usize, origin: f64) -> Result<f64> {
        self.check_level(i)?;
        self.check_level(j)?;
        let (a, b) = (&self.wavefunctions[i.min(j)], &self.wavefunctions[i.max(j)]);
        Ok((0..self.grid.n_points)
            .map(|k| a[k] * (self.grid.point(k) - origin) * b[k])
            .sum())
    }

    /// Transition angular frequency (E_j − E_i)/ħ.
    pub fn omega(&self, i: usize, j: usize) -> Result<f64> {
        self.check_level(i)?;
        self.check_level(j)?;
        Ok((self.energies[j] - self.energies[i]) / HBAR)
    }

    /// Energies in units of ħ·ω_LC.
    pub fn scaled_energies(&self) -> Vec<f64> {
        let unit = HBAR / (self.params.inductance * self.params.capacitance).sqrt();
        self.energies.iter().map(|e| e / unit).collect()
    }

    /// Relative eigen-residual ‖Hψ − Eψ‖/‖Hψ‖ on the discrete operator.
    pub fn residual(&self, n: usize) -> Result<f64> {
        self.check_level(n)?;
        let scaled = ScaledModel::new(&self.params)?;
        let h = scaled.hamiltonian(&self.grid)?;
        let psi = &self.wavefunctions[n];
        let e = self.energies[n] / scaled.energy_unit;
        let hpsi = h.apply(psi);
        let num: f64 = hpsi.iter().zip(psi).map(|(a, b)| (a - e * b).powi(2)).sum::<f64>().sqrt();
        let den: f64 = hpsi.iter().map(|a| a * a).sum::<f64>().sqrt();
        Ok(num / den)
    }

    /// Grid inner product ⟨ψ_m|ψ_n⟩.
    pub fn overlap(&self, m: usize, n: usize) -> Result<f64> {
        self.check_level(m)?;
        self.check_level(n)?;
        Ok(self.wavefunctions[m].iter().zip(&self.wavefunctions[n]).map(|(a, b)| a * b).sum())
    }

    /// Potential samples in joules, matching the grid.
    pub fn potential(&self) -> Result<Vec<f64>> {
        build_potential(&self.params, &self.grid)
    }
}

/// |⟨i|Φ|j⟩|/Φ0. Eigenvector signs are arbitrary, so only the magnitude is reported.
pub fn flux_matrix_element(result: &SpectralResult, i: usize, j: usize) -> Result<f64> {
    Ok(result.flux_moment(i, j, 0.0)?.abs())
}

pub const DEFAULT_RATIO_THRESHOLD: f64 = 10.0;

/// Smallest a > 1 with min(φ0a, φ1a) > threshold·φ01.
pub fn select_intermediate(result: &SpectralResult, ratio_threshold: f64) -> Result<usize> {
    if result.n_levels() < 3 {
        return Err(invalid(
            "result",
            format!("need at least 3 solved levels, have {}", result.n_levels()),
        ));
    }
    let phi_01 = flux_matrix_element(result, 0, 1)?;
    for a in 2..result.n_levels() {
        let phi_0a = flux_matrix_element(result, 0, a)?;
        let phi_1a = flux_matrix_element(result, 1, a)?;
        if phi_0a.min(phi_1a) > ratio_threshold * phi_01 {
            return Ok(a);
        }
    }
    Err(Error::NoIntermediateLevel {
        threshold: ratio_threshold,
        available: result.n_levels(),
    })
}

/// Transition frequencies and flux matrix elements of the Λ system |0⟩, |1⟩, |a⟩.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaLevels {
    pub idx_a: usize,
    pub omega_01: f64,
    pub omega_0a: f64,
    pub omega_1a: f64,
    pub phi_01: f64,
    pub phi_0a: f64,
    pub phi_1a: f64,
}

pub fn build_lambda_system(result: &SpectralResult, idx_a: usize) -> Result<LambdaLevels> {
    if idx_a < 2 {
        return Err(invalid("idx_a", format!("intermediate level must lie above |1>, got {idx_a}")));
    }
    Ok(LambdaLevels {
        idx_a,
        omega_01: result.omega(0, 1)?,
        omega_0a: result.omega(0, idx_a)?,
        omega_1a: result.omega(1, idx_a)?,
        phi_01: flux_matrix_element(result, 0, 1)?,
        phi_0a: flux_matrix_element(result, 0, idx_a)?,
        phi_1a: flux_matrix_element(result, 1, idx_a)?,
    })
}

/// One microwave pulse threading the loop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSpec {
    /// Φ̃_µw, the flux amplitude of the pulse through the loop, Wb.
    pub flux_amplitude: f64,
    /// Carrier angular frequency, rad/s.
    pub omega: f64,
    pub phase: f64,
    /// λ_k = −1/L, 1/H.
    pub lambda_k: f64,
}

impl PulseSpec {
    pub fn new(flux_amplitude: f64, omega: f64, phase: f64, inductance: f64) -> Result<Self> {
        if !(flux_amplitude >= 0.0) {
            return Err(invalid("flux_amplitude", "must be non-negative"));
        }
        if !(omega > 0.0) {
            return Err(invalid("omega", "carrier frequency must be positive"));
        }
        if !(inductance > 0.0) {
            return Err(invalid("L", "inductance must be positive"));
        }
        Ok(Self {
            flux_amplitude,
            omega,
            phase,
            lambda_k: -1.0 / inductance,
        })
    }
}

/// Ω_ij = |λ_k/(2ħ) · ⟨i|Φ|j⟩| · Φ̃_µw, with ⟨i|Φ|j⟩ = φ_ij·Φ0.
pub fn compute_rabi(pulse: &PulseSpec, phi_ij: f64) -> f64 {
    (pulse.lambda_k / (2.0 * HBAR)).abs() * (phi_ij * FLUX_QUANTUM).abs() * pulse.flux_amplitude
}
