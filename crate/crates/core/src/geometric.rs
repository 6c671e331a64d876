//! Aharonov–Anandan geometric gates.
//!
//! H_eff = B·σ with the fictitious field B = (−ħg cos δφ, −ħg sin δφ, ħω0).
//!
//! Rotation: two steps of duration π/(2W), W = sqrt(g² + ω0²), first at
//! δφ = π (field (ħg, 0, ħω0)) and then at δφ = 0 (field (−ħg, 0, ħω0)). Each
//! step is a π rotation about an axis perpendicular to the σ_y eigenstates'
//! path, so |±⟩ acquire only the geometric phases ∓2θ with θ = arctan(ω0/g),
//! and the qubit is rotated by α = 2θ:
//! |0⟩ → cos α|0⟩ − sin α|1⟩, |1⟩ → sin α|0⟩ + cos α|1⟩.
//! With signed ω0 the reachable α is (−π, π).
//!
//! Phase gate (ω0 = 0): two π/(2g) steps at δφ0 then −δφ0 give
//! diag(e^{iβ}, e^{−iβ}) with β = π − 2δφ0.
//!
//! The composites are always computed by propagating the segments; the
//! solid-angle expressions serve only as targets.

use std::f64::consts::PI;

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::compiler::{PulseSequence, Segment};
use crate::constants::HBAR;
use crate::error::{invalid, Error, Result};
use crate::lambda::{self, DriveSegment};
use crate::linalg::{c, cis, Qubit, Unitary2, UnitaryMatrix, C64};

/// Field components in joules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FictitiousField {
    pub bx: f64,
    pub by: f64,
    pub bz: f64,
}

impl FictitiousField {
    pub fn magnitude(&self) -> f64 {
        (self.bx * self.bx + self.by * self.by + self.bz * self.bz).sqrt()
    }
}

pub fn fictitious_field(seg: &DriveSegment) -> Result<FictitiousField> {
    let p = lambda::effective_params(seg)?;
    let dphi = seg.phase_difference();
    Ok(FictitiousField {
        bx: -HBAR * p.g * dphi.cos(),
        by: -HBAR * p.g * dphi.sin(),
        bz: HBAR * p.omega_0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoRotationSpec {
    pub omega_0: f64,
    pub g: f64,
    pub theta: f64,
    pub alpha: f64,
}

impl GeoRotationSpec {
    pub fn new(omega_0: f64, g: f64) -> Result<Self> {
        if !(g > 0.0 && g.is_finite()) {
            return Err(Error::NonPositiveCoupling(g));
        }
        if !omega_0.is_finite() {
            return Err(invalid("omega_0", "must be finite"));
        }
        let theta = (omega_0 / g).atan();
        Ok(Self {
            omega_0,
            g,
            theta,
            alpha: 2.0 * theta,
        })
    }

    /// Spec realizing rotation angle α ∈ (−π, π) with coupling g.
    pub fn from_angle(alpha: f64, g: f64) -> Result<Self> {
        if !(alpha.abs() < PI) {
            return Err(invalid("alpha", format!("reachable rotation angles are (-pi, pi), got {alpha}")));
        }
        Self::new(g * (alpha / 2.0).tan(), g)
    }

    pub fn rotation_rate(&self) -> f64 {
        self.g.hypot(self.omega_0)
    }

    pub fn step_duration(&self) -> f64 {
        PI / (2.0 * self.rotation_rate())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPhaseSpec {
    pub delta_phi_0: f64,
    pub beta: f64,
}

impl GeoPhaseSpec {
    pub fn new(delta_phi_0: f64) -> Self {
        Self {
            delta_phi_0,
            beta: PI - 2.0 * delta_phi_0,
        }
    }
}

/// Both pulses off for `delta_t`; the qubit picks up e^{−i·e_gap·δt/ħ} on |1⟩
/// relative to |0⟩.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreeSegment {
    /// s
    #[serde(rename = "duration")]
    pub delta_t: f64,
    /// E1 − E0, J
    pub e_gap: f64,
}

impl FreeSegment {
    pub fn new(delta_t: f64, e_gap: f64) -> Result<Self> {
        let seg = Self { delta_t, e_gap };
        seg.validate()?;
        Ok(seg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta_t >= 0.0 && self.delta_t.is_finite()) {
            return Err(invalid("delta_t", "field-off time must be non-negative"));
        }
        if !(self.e_gap > 0.0 && self.e_gap.is_finite()) {
            return Err(invalid("e_gap", "level gap must be positive"));
        }
        Ok(())
    }

    /// (E1 − E0)·δt/ħ
    pub fn relative_phase(&self) -> f64 {
        self.e_gap * self.delta_t / HBAR
    }

    pub fn with_duration(&self, delta_t: f64) -> Self {
        Self { delta_t, ..*self }
    }

    pub fn propagator(&self) -> Unitary2 {
        free_evolution_unitary(self)
    }
}

/// diag(1, e^{−i(E1−E0)δt/ħ}); the phase of |0⟩ is factored out.
pub fn free_evolution_unitary(seg: &FreeSegment) -> Unitary2 {
    UnitaryMatrix::from_matrix_unchecked(Matrix2::new(
        c(1.0, 0.0),
        c(0.0, 0.0),
        c(0.0, 0.0),
        cis(-seg.relative_phase()),
    ))
}

/// δt_n = 2πnħ/e_gap for n = 1..=n_max.
pub fn quantized_gap_times(e_gap: f64, n_max: usize) -> Result<Vec<f64>> {
    if !(e_gap > 0.0) {
        return Err(invalid("e_gap", "level gap must be positive"));
    }
    if n_max < 1 {
        return Err(invalid("n_max", "need at least one gap time"));
    }
    Ok((1..=n_max).map(|n| 2.0 * PI * n as f64 * HBAR / e_gap).collect())
}

/// Ω_I = sqrt(Δ(W + ω0)), Ω_II = sqrt(Δ(W − ω0)) reproduce g and ω0 at
/// detuning Δ > 0.
fn drive_for(omega_0: f64, g: f64, delta: f64, dphi: f64, duration: f64) -> Result<DriveSegment> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(invalid("delta", format!("geometric segments need positive detuning, got {delta}")));
    }
    let w = g.hypot(omega_0);
    DriveSegment::new(
        (delta * (w + omega_0)).max(0.0).sqrt(),
        (delta * (w - omega_0)).max(0.0).sqrt(),
        delta,
        dphi,
        0.0,
        duration,
    )
}

/// Phase differences π then 0 (the n = 0 choice), each step π/(2W).
pub fn compile_geo_rotation(spec: &GeoRotationSpec, delta: f64) -> Result<PulseSequence> {
    let spec = GeoRotationSpec::new(spec.omega_0, spec.g)?;
    let t = spec.step_duration();
    PulseSequence::new(
        "geo_rotation",
        vec![
            Segment::Drive(drive_for(spec.omega_0, spec.g, delta, PI, t)?),
            Segment::Drive(drive_for(spec.omega_0, spec.g, delta, 0.0, t)?),
        ],
    )
}

/// The rotation with the pulses switched off for `gap` between the two steps.
pub fn compile_geo_rotation_with_gap(spec: &GeoRotationSpec, delta: f64, gap: FreeSegment) -> Result<PulseSequence> {
    gap.validate()?;
    let mut seq = compile_geo_rotation(spec, delta)?;
    seq.segments.insert(1, Segment::Free(gap));
    seq.label = "geo_rotation_gap".into();
    Ok(seq)
}

pub fn compile_geo_phase(spec: &GeoPhaseSpec, g: f64, delta: f64) -> Result<PulseSequence> {
    if !(g > 0.0 && g.is_finite()) {
        return Err(Error::NonPositiveCoupling(g));
    }
    let t = PI / (2.0 * g);
    PulseSequence::new(
        "geo_phase",
        vec![
            Segment::Drive(drive_for(0.0, g, delta, spec.delta_phi_0, t)?),
            Segment::Drive(drive_for(0.0, g, delta, -spec.delta_phi_0, t)?),
        ],
    )
}

/// [[cos α, sin α], [−sin α, cos α]]
pub fn rotation_target(alpha: f64) -> Matrix2<C64> {
    let (s, co) = alpha.sin_cos();
    Matrix2::new(c(co, 0.0), c(s, 0.0), c(-s, 0.0), c(co, 0.0))
}

/// The rotation followed by the relative phase e^{−iϕ} on |1⟩:
/// |0⟩ → cos α|0⟩ − e^{−iϕ} sin α|1⟩, |1⟩ → sin α|0⟩ + e^{−iϕ} cos α|1⟩.
pub fn gapped_rotation_target(alpha: f64, relative_phase: f64) -> Matrix2<C64> {
    let f = Matrix2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), cis(-relative_phase));
    f * rotation_target(alpha)
}

/// diag(e^{iβ}, e^{−iβ})
pub fn phase_target(beta: f64) -> Matrix2<C64> {
    Matrix2::new(cis(beta), c(0.0, 0.0), c(0.0, 0.0), cis(-beta))
}

/// Geometric phases (−2θ, +2θ) acquired by |+⟩ and |−⟩.
pub fn aa_phase(spec: &GeoRotationSpec) -> (f64, f64) {
    (-2.0 * spec.theta, 2.0 * spec.theta)
}

/// U expressed in the σ_y eigenbasis (|+⟩, |−⟩).
pub fn in_sigma_y_basis(u: &Unitary2) -> Matrix2<C64> {
    let p = Qubit::plus_y();
    let m = Qubit::minus_y();
    let basis = Matrix2::from_columns(&[*p.amplitudes(), *m.amplitudes()]);
    basis.adjoint() * u.matrix() * basis
}

/// max over samples of |⟨ψ(t)|H_eff|ψ(t)⟩| (rad/s) along the drive segments of
/// `seq`, starting from `psi0`.
pub fn max_dynamic_rate(seq: &PulseSequence, psi0: &Qubit, per_segment: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    let mut psi = *psi0;
    let mut frame_phase = 0.0;
    for segment in &seq.segments {
        match segment {
            Segment::Drive(d) => {
                let d = d.with_phase_advance(frame_phase);
                let h = lambda::h_eff(&d)?;
                let eig = crate::linalg::HermitianEigen::new(&h);
                for k in 0..per_segment.max(2) {
                    let t = d.duration * k as f64 / (per_segment.max(2) - 1) as f64;
                    let state = Qubit::from_raw(eig.propagator(t) * psi.amplitudes());
                    worst = worst.max(crate::linalg::expectation(&h, &state).abs());
                }
                psi = Qubit::from_raw(eig.propagator(d.duration) * psi.amplitudes());
            }
            Segment::Free(f) => {
                psi = f.propagator().apply(&psi);
                frame_phase += f.relative_phase();
            }
        }
    }
    Ok(worst)
}

/// Bloch-sphere samples (t, sx, sy, sz) of the effective-model evolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlochSample {
    pub t: f64,
    pub sx: f64,
    pub sy: f64,
    pub sz: f64,
}

pub fn bloch_trajectory(seq: &PulseSequence, psi0: &Qubit, per_segment: usize) -> Result<Vec<BlochSample>> {
    Ok(crate::compiler::sequence_trajectory(seq, psi0, per_segment)?
        .into_iter()
        .map(|(t, psi)| {
            let [sx, sy, sz] = crate::basis::bloch_components(psi.amplitude(0), psi.amplitude(1));
            BlochSample { t, sx, sy, sz }
        })
        .collect())
}
