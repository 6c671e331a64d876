//! Driven Λ-system dynamics.
//!
//! Two square pulses couple |0⟩↔|a⟩ (Rabi frequency Ω_I, phase φ_I) and
//! |1⟩↔|a⟩ (Ω_II, φ_II) with the same detuning Δ from their transitions.
//! In the frame rotating with U = e^{−iη}, η = −Δ(σ00 + σ11)t, the
//! three-level Hamiltonian is time independent:
//!
//! ```text
//! H3/ħ = −Δ(|0⟩⟨0| + |1⟩⟨1|) + Ω_I(e^{iφ_I}|0⟩⟨a| + h.c.) + Ω_II(e^{iφ_II}|1⟩⟨a| + h.c.)
//! ```
//!
//! The interaction-picture form with explicit e^{−iΔt} factors differs from
//! this one only by the diagonal phase e^{−iΔt} on |0⟩ and |1⟩, which is a
//! global phase on the qubit block and invisible to populations and to the
//! gate fidelity.
//!
//! For Δ ≫ Ω the intermediate level can be eliminated, giving
//! H_eff/ħ = ω0σ_z − g e^{iδφ}σ⁻ − g e^{−iδφ}σ⁺ with g = Ω_IΩ_II/Δ,
//! ω0 = (Ω_I² − Ω_II²)/(2Δ), δφ = φ_I − φ_II. Terms proportional to the
//! qubit identity are dropped.
//!
//! Every propagator here is the exact exponential of a constant Hermitian
//! matrix; no time stepping is involved.

use nalgebra::{Matrix2, Matrix3};
use serde::{Deserialize, Serialize};

use crate::basis::{self, ket_bra3, LEVEL_0, LEVEL_1, LEVEL_A};
use crate::error::{invalid, Error, Result};
use crate::linalg::{c, cis, HermitianEigen, Qubit, Qutrit, Unitary2, Unitary3, UnitaryMatrix, C64};
use crate::spectrum::LambdaLevels;

/// One square two-tone drive segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveSegment {
    /// Ω_I = Ω_0a^I, rad/s
    #[serde(rename = "omega_I")]
    pub omega_i: f64,
    /// Ω_II = Ω_1a^II, rad/s
    #[serde(rename = "omega_II")]
    pub omega_ii: f64,
    /// Common detuning Δ, rad/s.
    pub delta: f64,
    #[serde(rename = "phi_I")]
    pub phi_i: f64,
    #[serde(rename = "phi_II")]
    pub phi_ii: f64,
    /// s
    pub duration: f64,
}

impl DriveSegment {
    pub fn new(omega_i: f64, omega_ii: f64, delta: f64, phi_i: f64, phi_ii: f64, duration: f64) -> Result<Self> {
        let seg = Self {
            omega_i,
            omega_ii,
            delta,
            phi_i,
            phi_ii,
            duration,
        };
        seg.validate()?;
        Ok(seg)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.omega_i, self.omega_ii, self.delta, self.phi_i, self.phi_ii, self.duration]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(invalid("segment", "all drive parameters must be finite"));
        }
        if self.omega_i < 0.0 || self.omega_ii < 0.0 {
            return Err(invalid("omega", "Rabi frequencies must be non-negative"));
        }
        if self.duration < 0.0 {
            return Err(invalid("duration", "segment duration must be non-negative"));
        }
        Ok(())
    }

    /// δφ = φ_I − φ_II
    pub fn phase_difference(&self) -> f64 {
        self.phi_i - self.phi_ii
    }

    pub fn with_duration(&self, duration: f64) -> Self {
        Self { duration, ..*self }
    }

    /// Same drive with φ_II lowered by `phase`, i.e. δφ raised by `phase`.
    pub fn with_phase_advance(&self, phase: f64) -> Self {
        Self {
            phi_ii: self.phi_ii - phase,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveParams {
    pub g: f64,
    pub omega_0: f64,
    pub delta_omega: f64,
    pub omega_bar: f64,
}

impl EffectiveParams {
    /// Rotation rate sqrt(g² + ω0²).
    pub fn rotation_rate(&self) -> f64 {
        self.g.hypot(self.omega_0)
    }
}

pub fn effective_params(seg: &DriveSegment) -> Result<EffectiveParams> {
    if seg.delta == 0.0 {
        return Err(Error::ZeroDetuning);
    }
    Ok(EffectiveParams {
        g: seg.omega_i * seg.omega_ii / seg.delta,
        omega_0: (seg.omega_i * seg.omega_i - seg.omega_ii * seg.omega_ii) / (2.0 * seg.delta),
        delta_omega: seg.omega_i - seg.omega_ii,
        omega_bar: 0.5 * (seg.omega_i + seg.omega_ii),
    })
}

/// H3/ħ in the rotating frame, basis (|0⟩, |1⟩, |a⟩).
pub fn h3_rotating(seg: &DriveSegment) -> Matrix3<C64> {
    let mut h = (ket_bra3(LEVEL_0, LEVEL_0) + ket_bra3(LEVEL_1, LEVEL_1)) * c(-seg.delta, 0.0);
    let coupling_i = cis(seg.phi_i) * seg.omega_i;
    let coupling_ii = cis(seg.phi_ii) * seg.omega_ii;
    h[(LEVEL_0, LEVEL_A)] = coupling_i;
    h[(LEVEL_A, LEVEL_0)] = coupling_i.conj();
    h[(LEVEL_1, LEVEL_A)] = coupling_ii;
    h[(LEVEL_A, LEVEL_1)] = coupling_ii.conj();
    h
}

/// H_eff/ħ = ω0σ_z − g e^{iδφ}σ⁻ − g e^{−iδφ}σ⁺.
pub fn h_eff(seg: &DriveSegment) -> Result<Matrix2<C64>> {
    let p = effective_params(seg)?;
    let dphi = seg.phase_difference();
    Ok(basis::sigma_z() * c(p.omega_0, 0.0)
        - basis::sigma_minus() * (cis(dphi) * p.g)
        - basis::sigma_plus() * (cis(-dphi) * p.g))
}

pub fn propagator_3(seg: &DriveSegment) -> Unitary3 {
    crate::linalg::hermitian_propagator(&h3_rotating(seg), seg.duration)
}

pub fn propagate_3(seg: &DriveSegment, psi: &Qutrit) -> Qutrit {
    propagator_3(seg).apply(psi)
}

/// exp(−i·H_eff·t) by Hermitian eigendecomposition.
pub fn propagator_eff(seg: &DriveSegment) -> Result<Unitary2> {
    Ok(crate::linalg::hermitian_propagator(&h_eff(seg)?, seg.duration))
}

pub fn propagate_eff(seg: &DriveSegment, psi: &Qubit) -> Result<Qubit> {
    Ok(propagator_eff(seg)?.apply(psi))
}

/// Closed-form qubit evolution with W = sqrt(g² + ω0²):
///
/// ```text
/// |0⟩ → (cos Wt + i(ω0/W) sin Wt)|0⟩ + i(g e^{−iδφ}/W) sin Wt |1⟩
/// |1⟩ → i(g e^{iδφ}/W) sin Wt |0⟩ + (cos Wt − i(ω0/W) sin Wt)|1⟩
/// ```
pub fn closed_form_unitary(seg: &DriveSegment) -> Result<Unitary2> {
    let p = effective_params(seg)?;
    Ok(rotation_closed_form(p.g, p.omega_0, seg.phase_difference(), seg.duration))
}

/// The closed form for raw (g, ω0, δφ, t).
pub fn rotation_closed_form(g: f64, omega_0: f64, dphi: f64, t: f64) -> Unitary2 {
    let w = g.hypot(omega_0);
    let cos = (w * t).cos();
    // sin(Wt)/W, finite as W → 0
    let sinc = if w * t == 0.0 { t } else { (w * t).sin() / w };
    let u00 = c(cos, omega_0 * sinc);
    let u11 = c(cos, -omega_0 * sinc);
    let u10 = c(0.0, 1.0) * cis(-dphi) * (g * sinc);
    let u01 = c(0.0, 1.0) * cis(dphi) * (g * sinc);
    UnitaryMatrix::from_matrix_unchecked(Matrix2::new(u00, u01, u10, u11))
}

/// Sample count that resolves the |a⟩ population oscillation (~Δ) over the
/// segment: more than 4·|Δ|·t/π.
pub fn recommended_samples(seg: &DriveSegment) -> usize {
    (4.0 * seg.delta.abs() * seg.duration / std::f64::consts::PI).ceil() as usize + 1
}

/// One sampled point of a time series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeSample {
    pub t: f64,
    pub p0: f64,
    pub p1: f64,
    pub pa: f64,
    pub sx: f64,
    pub sy: f64,
    pub sz: f64,
}

fn sample_times(duration: f64, n_samples: usize) -> impl Iterator<Item = f64> {
    let last = (n_samples.max(2) - 1) as f64;
    (0..n_samples.max(2)).map(move |k| duration * k as f64 / last)
}

/// Three-level populations and qubit-block Bloch components at `n_samples`
/// uniformly spaced times in [0, duration].
pub fn trajectory_3(seg: &DriveSegment, psi0: &Qutrit, n_samples: usize) -> Vec<TimeSample> {
    let eig = HermitianEigen::new(&h3_rotating(seg));
    sample_times(seg.duration, n_samples)
        .map(|t| {
            let psi = eig.propagator(t) * psi0.amplitudes();
            let [sx, sy, sz] = basis::bloch_components(psi[LEVEL_0], psi[LEVEL_1]);
            TimeSample {
                t,
                p0: psi[LEVEL_0].norm_sqr(),
                p1: psi[LEVEL_1].norm_sqr(),
                pa: psi[LEVEL_A].norm_sqr(),
                sx,
                sy,
                sz,
            }
        })
        .collect()
}

/// Effective-model counterpart of [`trajectory_3`]; `pa` is identically zero.
pub fn trajectory_eff(seg: &DriveSegment, psi0: &Qubit, n_samples: usize) -> Result<Vec<TimeSample>> {
    let eig = HermitianEigen::new(&h_eff(seg)?);
    Ok(sample_times(seg.duration, n_samples)
        .map(|t| {
            let psi = eig.propagator(t) * psi0.amplitudes();
            let [sx, sy, sz] = basis::bloch_components(psi[0], psi[1]);
            TimeSample {
                t,
                p0: psi[0].norm_sqr(),
                p1: psi[1].norm_sqr(),
                pa: 0.0,
                sx,
                sy,
                sz,
            }
        })
        .collect())
}

pub const MIN_LEAKAGE_SAMPLES: usize = 100;
pub const DEFAULT_LEAKAGE_SAMPLES: usize = 1000;

/// max_t |⟨a|ψ(t)⟩|² over `n_samples` uniform times in [0, duration].
///
/// The |a⟩ population oscillates at roughly Δ, so `n_samples` should exceed
/// [`recommended_samples`] for the sampled maximum to be meaningful.
pub fn max_intermediate_population(seg: &DriveSegment, psi0: &Qutrit, n_samples: usize) -> Result<f64> {
    check_samples(n_samples)?;
    Ok(trajectory_3(seg, psi0, n_samples)
        .iter()
        .fold(0.0, |acc, s| acc.max(s.pa)))
}

/// Time average of |⟨a|ψ(t)⟩|² over the same samples (trapezoidal rule).
pub fn mean_intermediate_population(seg: &DriveSegment, psi0: &Qutrit, n_samples: usize) -> Result<f64> {
    check_samples(n_samples)?;
    let samples = trajectory_3(seg, psi0, n_samples);
    let n = samples.len();
    let interior: f64 = samples[1..n - 1].iter().map(|s| s.pa).sum();
    Ok((interior + 0.5 * (samples[0].pa + samples[n - 1].pa)) / (n - 1) as f64)
}

fn check_samples(n_samples: usize) -> Result<()> {
    if n_samples < MIN_LEAKAGE_SAMPLES {
        return Err(invalid(
            "n_samples",
            format!("need at least {MIN_LEAKAGE_SAMPLES} samples, got {n_samples}"),
        ));
    }
    Ok(())
}

/// One row of the off-resonance checklist: passes when `value` clears
/// `threshold` in the stated direction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionCheck {
    pub id: &'static str,
    pub name: &'static str,
    /// rad/s
    pub value: f64,
    /// rad/s
    pub threshold: f64,
    /// `value / threshold` for lower bounds, `threshold / value` for upper bounds.
    pub margin: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    /// ω_I = ω_0a − Δ, rad/s
    pub carrier_i: f64,
    /// ω_II = ω_1a − Δ, rad/s
    pub carrier_ii: f64,
    pub required_margin: f64,
    pub checks: Vec<ConditionCheck>,
}

impl ConditionReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ConditionCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, id: &str) -> Option<&ConditionCheck> {
        self.checks.iter().find(|c| c.id == id)
    }
}

pub const DEFAULT_MARGIN: f64 = 10.0;

fn lower_bound(id: &'static str, name: &'static str, value: f64, threshold: f64) -> ConditionCheck {
    ConditionCheck {
        id,
        name,
        value,
        threshold,
        margin: if threshold > 0.0 { value / threshold } else { f64::INFINITY },
        passed: value > threshold,
    }
}

/// Evaluates the far-off-resonance, large-detuning, two-photon-exclusion and
/// rotation-regime conditions with pulse carriers ω_I = ω_0a − Δ and
/// ω_II = ω_1a − Δ.
///
/// A pulse tuned near one transition also drives the others with Rabi
/// frequency scaled by the ratio of flux matrix elements, e.g.
/// Ω_01^I = Ω_I·φ01/φ0a; those cross couplings set the thresholds of the
/// single-pulse checks.
pub fn validate_conditions(levels: &LambdaLevels, seg: &DriveSegment, margin: f64) -> Result<ConditionReport> {
    if !(margin > 1.0) {
        return Err(invalid("margin", format!("margin must exceed 1, got {margin}")));
    }
    let carrier_i = levels.omega_0a - seg.delta;
    let carrier_ii = levels.omega_1a - seg.delta;
    let cross = |rabi: f64, phi_target: f64, phi_driven: f64| {
        if phi_driven > 0.0 {
            rabi * phi_target / phi_driven
        } else {
            rabi
        }
    };
    let rabi_max = seg.omega_i.max(seg.omega_ii);

    let mut checks = vec![
        lower_bound(
            "a1",
            "pulse I far off the 0-1 transition",
            (levels.omega_01 - carrier_i).abs(),
            margin * cross(seg.omega_i, levels.phi_01, levels.phi_0a),
        ),
        lower_bound(
            "a2",
            "pulse I far off the 1-a transition",
            (levels.omega_1a - carrier_i).abs(),
            margin * cross(seg.omega_i, levels.phi_1a, levels.phi_0a),
        ),
        lower_bound(
            "b1",
            "pulse II far off the 0-1 transition",
            (levels.omega_01 - carrier_ii).abs(),
            margin * cross(seg.omega_ii, levels.phi_01, levels.phi_1a),
        ),
        lower_bound(
            "b2",
            "pulse II far off the 0-a transition",
            (levels.omega_0a - carrier_ii).abs(),
            margin * cross(seg.omega_ii, levels.phi_0a, levels.phi_1a),
        ),
        lower_bound("c", "large detuning", seg.delta.abs(), margin * rabi_max),
    ];
    let sum = carrier_i + carrier_ii;
    let diff = carrier_i - carrier_ii;
    for (id, name, value) in [
        ("d1", "omega_I + omega_II away from omega_0a", (sum - levels.omega_0a).abs()),
        ("d2", "omega_I + omega_II away from omega_1a", (sum - levels.omega_1a).abs()),
        ("d3", "omega_I - omega_II away from omega_0a", (diff - levels.omega_0a).abs()),
        ("d4", "omega_I - omega_II away from omega_1a", (diff - levels.omega_1a).abs()),
    ] {
        checks.push(lower_bound(id, name, value, margin * rabi_max));
    }

    let rotation = match effective_params(seg) {
        Ok(p) => {
            let threshold = p.g.abs() / margin;
            let value = p.omega_0.abs();
            ConditionCheck {
                id: "e",
                name: "rotation regime |omega_0| << g",
                value,
                threshold,
                margin: if value > 0.0 { threshold / value } else { f64::INFINITY },
                passed: value < threshold,
            }
        }
        Err(_) => ConditionCheck {
            id: "e",
            name: "rotation regime |omega_0| << g",
            value: f64::NAN,
            threshold: 0.0,
            margin: 0.0,
            passed: false,
        },
    };
    checks.push(rotation);

    Ok(ConditionReport {
        carrier_i,
        carrier_ii,
        required_margin: margin,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermiticity_deviation, max_abs};
    use std::f64::consts::PI;

    fn seg(omega_i: f64, omega_ii: f64, delta: f64, dphi: f64, t: f64) -> DriveSegment {
        DriveSegment::new(omega_i, omega_ii, delta, dphi, 0.0, t).unwrap()
    }

    #[test]
    fn segment_validation() {
        assert!(DriveSegment::new(-1.0, 1.0, 10.0, 0.0, 0.0, 1.0).is_err());
        assert!(DriveSegment::new(1.0, 1.0, 10.0, 0.0, 0.0, -1.0).is_err());
        assert!(DriveSegment::new(1.0, f64::NAN, 10.0, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn effective_params_examples() {
        let p = effective_params(&seg(2.0, 2.0, 7.0, 0.0, 1.0)).unwrap();
        assert!((p.g - 4.0 / 7.0).abs() < 1e-15);
        assert_eq!(p.omega_0, 0.0);

        let omega_01 = 3.0e6;
        let rabi = 100.0 * omega_01;
        let p = effective_params(&seg(rabi, rabi, 10.0 * rabi, 0.0, 1.0)).unwrap();
        assert!((p.g / (10.0 * omega_01) - 1.0).abs() < 1e-14);

        let p = effective_params(&seg(0.0, 3.0, 5.0, 0.0, 1.0)).unwrap();
        assert_eq!(p.g, 0.0);
        assert!((p.omega_0 + 9.0 / 10.0).abs() < 1e-15);
        assert_eq!(p.delta_omega, -3.0);
        assert_eq!(p.omega_bar, 1.5);

        assert_eq!(effective_params(&seg(1.0, 1.0, 0.0, 0.0, 1.0)), Err(Error::ZeroDetuning));
    }

    #[test]
    fn h3_drive_off_and_hermitian() {
        let h = h3_rotating(&seg(0.0, 0.0, 4.0, 0.3, 1.0));
        let expect = Matrix3::from_diagonal(&nalgebra::Vector3::new(c(-4.0, 0.0), c(-4.0, 0.0), c(0.0, 0.0)));
        assert_eq!(h, expect);
        let h = h3_rotating(&DriveSegment::new(1.3, 0.4, 9.0, 0.7, -2.1, 1.0).unwrap());
        assert_eq!(hermiticity_deviation(&h), 0.0);
    }

    /// Second-order elimination of |a⟩: the qubit block of the exact
    /// eigen-problem is shifted by −Ω_I²/Δ, −Ω_II²/Δ and coupled by −g e^{iδφ}.
    /// Compare against the effective Hamiltonian restricted to the two
    /// eigenvalues continuously connected to |0⟩, |1⟩.
    #[test]
    fn perturbative_reduction_matches_direct_diagonalization() {
        let (oi, oii, delta) = (1.0, 0.8, 10.0);
        let s = DriveSegment::new(oi, oii, delta, 0.4, 0.0, 1.0).unwrap();
        let eig = HermitianEigen::new(&h3_rotating(&s));
        let mut vals = eig.values.to_vec();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // qubit-like eigenvalues are the two lowest (near −Δ)
        let exact = [vals[0] + delta, vals[1] + delta];
        let g = oi * oii / delta;
        let (s0, s1) = (-oi * oi / delta, -oii * oii / delta);
        let mean = 0.5 * (s0 + s1);
        let half = (0.25 * (s0 - s1).powi(2) + g * g).sqrt();
        let predicted = [mean - half, mean + half];
        let scale = (oi * oi + oii * oii) / delta;
        let ratio = (oi.max(oii) / delta).powi(2);
        for k in 0..2 {
            let rel = (exact[k] - predicted[k]).abs() / scale;
            assert!(rel < 3.0 * ratio, "k={k}: rel {rel} vs (Omega/Delta)^2 = {ratio}");
        }
    }

    #[test]
    fn zero_duration_is_identity() {
        let s = seg(1.0, 1.0, 10.0, 0.2, 0.0);
        assert!(propagator_3(&s).max_abs_diff(&Matrix3::identity()) < 1e-15);
        assert!(closed_form_unitary(&s).unwrap().max_abs_diff(&Matrix2::identity()) < 1e-15);
        assert!(propagator_eff(&s).unwrap().max_abs_diff(&Matrix2::identity()) < 1e-15);
    }

    #[test]
    fn raman_flip_with_small_leakage() {
        let omega = 1.0;
        let delta = 10.0 * omega;
        let g = omega * omega / delta;
        let s = seg(omega, omega, delta, 0.0, PI / (2.0 * g));
        let out = propagate_3(&s, &Qutrit::basis(0));
        assert!(out.population(1) >= 0.96, "{}", out.population(1));
        assert!((out.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn effective_quarter_turn_amplitude() {
        let g: f64 = 0.3;
        let dphi = 0.9;
        // Ω_I = Ω_II = sqrt(gΔ)
        let delta = 5.0;
        let r: f64 = (g * delta).sqrt();
        let s = seg(r, r, delta, dphi, PI / (2.0 * g));
        let out = propagate_eff(&s, &Qubit::basis(0)).unwrap();
        let expect = c(0.0, 1.0) * cis(-dphi);
        assert!((out.amplitude(1) - expect).norm() < 1e-12);
        assert!(out.amplitude(0).norm() < 1e-12);
    }

    #[test]
    fn decoupled_limit_is_pure_phase() {
        // Ω_I = 0 → g = 0, ω0 = −Ω_II²/(2Δ)
        let s = seg(0.0, 2.0, 4.0, 0.0, 0.7);
        let w0 = effective_params(&s).unwrap().omega_0;
        let u = propagator_eff(&s).unwrap();
        let expect = Matrix2::new(cis(w0 * 0.7), c(0.0, 0.0), c(0.0, 0.0), cis(-w0 * 0.7));
        assert!(u.max_abs_diff(&expect) < 1e-14);
    }

    #[test]
    fn hadamard_like_action_from_closed_form() {
        let (g, delta): (f64, f64) = (2.0, 20.0);
        let r: f64 = (g * delta).sqrt();
        let s = seg(r, r, delta, PI / 2.0, PI / (4.0 * g));
        let u = closed_form_unitary(&s).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let img0 = u.apply(&Qubit::basis(0));
        let img1 = u.apply(&Qubit::basis(1));
        assert!((img0.amplitude(0) - c(h, 0.0)).norm() < 1e-12);
        assert!((img0.amplitude(1) - c(h, 0.0)).norm() < 1e-12);
        assert!((img1.amplitude(0) - c(-h, 0.0)).norm() < 1e-12);
        assert!((img1.amplitude(1) - c(h, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn closed_form_requires_detuning() {
        assert_eq!(closed_form_unitary(&seg(1.0, 1.0, 0.0, 0.0, 1.0)), Err(Error::ZeroDetuning));
        assert!(propagate_eff(&seg(1.0, 1.0, 0.0, 0.0, 1.0), &Qubit::basis(0)).is_err());
    }

    #[test]
    fn leakage_examples() {
        let s = seg(0.0, 0.0, 10.0, 0.0, 3.0);
        assert_eq!(max_intermediate_population(&s, &Qutrit::basis(0), 200).unwrap(), 0.0);
        assert!(max_intermediate_population(&s, &Qutrit::basis(0), 99).is_err());
    }

    #[test]
    fn leakage_scales_with_detuning_squared() {
        let omega = 1.0;
        let run = |m: f64| {
            let delta = m * omega;
            let s = seg(omega, omega, delta, 0.0, PI * delta / (2.0 * omega * omega));
            let n = recommended_samples(&s).max(DEFAULT_LEAKAGE_SAMPLES) * 4;
            max_intermediate_population(&s, &Qutrit::basis(0), n).unwrap()
        };
        let ratio = run(100.0) / run(10.0);
        assert!(ratio > 0.5e-2 && ratio < 2e-2, "ratio {ratio}");
    }

    #[test]
    fn conditions_paper_like_drive() {
        let levels = LambdaLevels {
            idx_a: 2,
            omega_01: 1.0e10,
            omega_0a: 1.3e11,
            omega_1a: 1.2e11,
            phi_01: 7.9e-7,
            phi_0a: 8.4e-5,
            phi_1a: 5.4e-5,
        };
        let omega = 1.0e7;
        let s = seg(omega, omega, 10.0 * omega, 0.0, 1e-6);
        // Δ = 10Ω sits exactly on the default-margin boundary of the strict check
        let report = validate_conditions(&levels, &s, DEFAULT_MARGIN).unwrap();
        assert!(!report.check("c").unwrap().passed);
        assert!(report.check("e").unwrap().passed);
        let report = validate_conditions(&levels, &s, 5.0).unwrap();
        assert!(report.check("c").unwrap().passed);
        assert!(report.all_passed(), "{:?}", report.failures().collect::<Vec<_>>());

        let bad = seg(omega, omega, omega, 0.0, 1e-6);
        let report = validate_conditions(&levels, &bad, DEFAULT_MARGIN).unwrap();
        assert!(!report.check("c").unwrap().passed);

        // ω_I + ω_II = ω_0a + ω_1a − 2Δ lands on ω_0a when Δ = ω_1a/2
        let on_sum = seg(omega, omega, levels.omega_1a / 2.0, 0.0, 1e-6);
        let report = validate_conditions(&levels, &on_sum, DEFAULT_MARGIN).unwrap();
        assert!(!report.check("d1").unwrap().passed);

        assert!(validate_conditions(&levels, &s, 1.0).is_err());
    }

    #[test]
    fn unbalanced_drive_fails_rotation_regime() {
        let levels = LambdaLevels {
            idx_a: 2,
            omega_01: 1.0e10,
            omega_0a: 1.3e11,
            omega_1a: 1.2e11,
            phi_01: 7.9e-7,
            phi_0a: 8.4e-5,
            phi_1a: 5.4e-5,
        };
        let s = seg(1.0e7, 0.5e7, 1.0e8, 0.0, 1e-6);
        let report = validate_conditions(&levels, &s, DEFAULT_MARGIN).unwrap();
        assert!(!report.check("e").unwrap().passed);
    }

    #[test]
    fn trajectory_endpoints() {
        let s = seg(1.0, 1.0, 10.0, 0.0, 2.0);
        let tr = trajectory_3(&s, &Qutrit::basis(0), 11);
        assert_eq!(tr.len(), 11);
        assert_eq!(tr[0].t, 0.0);
        assert!((tr[10].t - 2.0).abs() < 1e-15);
        assert!((tr[0].p0 - 1.0).abs() < 1e-15);
        assert!((tr[0].sz + 1.0).abs() < 1e-15);
        let last = propagate_3(&s, &Qutrit::basis(0));
        assert!((tr[10].pa - last.population(2)).abs() < 1e-14);
        let eff = trajectory_eff(&s, &Qubit::basis(0), 5).unwrap();
        assert!(eff.iter().all(|x| x.pa == 0.0));
        let h = h_eff(&s).unwrap();
        assert!(max_abs(&(h - h.adjoint())) == 0.0);
    }
}
