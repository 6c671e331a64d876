//! Pulse sequences for the Raman gates and their composite propagators.
//!
//! Gate recipes, all built from balanced segments (Ω_I = Ω_II = sqrt(gΔ), so
//! ω0 = 0) with rotation matrix
//! R(gt, δφ) = [[cos gt, i e^{iδφ} sin gt], [i e^{−iδφ} sin gt, cos gt]]:
//!
//! * NOT: one segment, t = π/(2g).
//! * Hadamard: one segment, t = π/(4g), δφ = π/2.
//! * Phase: two π/(2g) segments, the first at the gate parameter δφ = χ and
//!   the second at δφ = π. The product R(π/2, π)·R(π/2, χ) is
//!   diag(e^{−iχ}, e^{iχ}) exactly, so the first step's phase difference is
//!   the gate parameter.
//! * Arbitrary: any U ∈ U(2) is, up to global phase, P(χ)·R(s, δφ) with
//!   cos s = |U00| and the rotation azimuth δφ absorbing the remaining phase.
//!   Diagonal targets emit only the phase block, anti-diagonal targets only
//!   the rotation block.
//!
//! Drive phases are referenced to the lab clock. A field-off gap multiplies
//! the qubit by diag(1, e^{−iϕ}) and every later drive segment sees its phase
//! difference advanced by the accumulated ϕ. Consequently a sequence with a
//! gap of phase ϕ composes to diag(1, e^{−iϕ}) times the gapless product,
//! and quantized gaps (ϕ = 2πn) are invisible.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{Matrix2, Matrix3};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometric::FreeSegment;
use crate::lambda::{self, DriveSegment, TimeSample};
use crate::linalg::{c, cis, Qubit, Qutrit, Unitary2, UnitaryMatrix, C64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Segment {
    Drive(DriveSegment),
    Free(FreeSegment),
}

impl Segment {
    pub fn duration(&self) -> f64 {
        match self {
            Segment::Drive(d) => d.duration,
            Segment::Free(f) => f.delta_t,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Segment::Drive(d) => d.validate(),
            Segment::Free(f) => f.validate(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseSequence {
    pub label: String,
    pub segments: Vec<Segment>,
}

impl PulseSequence {
    pub fn new(label: impl Into<String>, segments: Vec<Segment>) -> Result<Self> {
        let seq = Self {
            label: label.into(),
            segments,
        };
        seq.validate()?;
        Ok(seq)
    }

    pub fn validate(&self) -> Result<()> {
        if self.segments.is_empty() {
            return Err(Error::EmptySequence(self.label.clone()));
        }
        self.segments.iter().try_for_each(Segment::validate)
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(Segment::duration).sum()
    }

    /// `self` followed by `other`.
    pub fn concat(&self, other: &PulseSequence) -> PulseSequence {
        PulseSequence {
            label: format!("{}+{}", self.label, other.label),
            segments: self.segments.iter().chain(&other.segments).copied().collect(),
        }
    }

    pub fn relabel(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn drives(&self) -> impl Iterator<Item = &DriveSegment> {
        self.segments.iter().filter_map(|s| match s {
            Segment::Drive(d) => Some(d),
            Segment::Free(_) => None,
        })
    }
}

/// Which propagator composes the sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    ClosedForm,
    Effective,
    ThreeLevel,
}

impl std::str::FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed_form" => Ok(Model::ClosedForm),
            "effective" => Ok(Model::Effective),
            "three_level" => Ok(Model::ThreeLevel),
            other => Err(invalid(
                "model",
                format!("unknown model `{other}` (expected closed_form, effective or three_level)"),
            )),
        }
    }
}

impl std::fmt::Display for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Model::ClosedForm => "closed_form",
            Model::Effective => "effective",
            Model::ThreeLevel => "three_level",
        })
    }
}

pub const DEFAULT_LEAKAGE_BOUND: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SequenceOutcome {
    /// Qubit block of the composite propagator. Exactly unitary for the
    /// two-level models; for `ThreeLevel` the norm deficit is the leakage.
    pub unitary: Unitary2,
    /// max over |0⟩, |1⟩ of the final |a⟩ population (zero for two-level models).
    pub final_leakage: f64,
}

pub fn sequence_unitary(seq: &PulseSequence, model: Model) -> Result<Unitary2> {
    Ok(sequence_outcome(seq, model, DEFAULT_LEAKAGE_BOUND)?.unitary)
}

/// Ordered product of the segment propagators. For `ThreeLevel` the |a⟩ row
/// and column are dropped at the end; an error names the first segment after
/// which the |a⟩ population reached from |0⟩ or |1⟩ exceeds `leakage_bound`.
pub fn sequence_outcome(seq: &PulseSequence, model: Model, leakage_bound: f64) -> Result<SequenceOutcome> {
    seq.validate()?;
    let mut frame_phase = 0.0;
    match model {
        Model::ClosedForm | Model::Effective => {
            let mut u = Matrix2::<C64>::identity();
            for segment in &seq.segments {
                match segment {
                    Segment::Drive(d) => {
                        let d = d.with_phase_advance(frame_phase);
                        let step = match model {
                            Model::ClosedForm => lambda::closed_form_unitary(&d)?,
                            _ => lambda::propagator_eff(&d)?,
                        };
                        u = step.matrix() * u;
                    }
                    Segment::Free(f) => {
                        u = f.propagator().matrix() * u;
                        frame_phase += f.relative_phase();
                    }
                }
            }
            Ok(SequenceOutcome {
                unitary: UnitaryMatrix::from_matrix_unchecked(u),
                final_leakage: 0.0,
            })
        }
        Model::ThreeLevel => {
            let mut u = Matrix3::<C64>::identity();
            let mut leakage = 0.0;
            for (index, segment) in seq.segments.iter().enumerate() {
                match segment {
                    Segment::Drive(d) => {
                        let d = d.with_phase_advance(frame_phase);
                        u = lambda::propagator_3(&d).matrix() * u;
                    }
                    Segment::Free(f) => {
                        u = free_3(f.relative_phase()) * u;
                        frame_phase += f.relative_phase();
                    }
                }
                leakage = u[(2, 0)].norm_sqr().max(u[(2, 1)].norm_sqr());
                if leakage > leakage_bound {
                    return Err(Error::LeakageExceeded {
                        segment: index,
                        leakage,
                        bound: leakage_bound,
                    });
                }
            }
            let block = Matrix2::new(u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)]);
            Ok(SequenceOutcome {
                unitary: UnitaryMatrix::from_matrix_unchecked(block),
                final_leakage: leakage,
            })
        }
    }
}

/// Qubit states along the sequence under the effective model, sampled
/// `per_segment` times within every segment (endpoints included).
pub fn sequence_trajectory(seq: &PulseSequence, psi0: &Qubit, per_segment: usize) -> Result<Vec<(f64, Qubit)>> {
    seq.validate()?;
    let per_segment = per_segment.max(2);
    let mut out = Vec::new();
    let mut psi = *psi0;
    let mut t0 = 0.0;
    let mut frame_phase = 0.0;
    for segment in &seq.segments {
        let duration = segment.duration();
        let propagator = |t: f64| -> Result<Unitary2> {
            match segment {
                Segment::Drive(d) => lambda::propagator_eff(&d.with_phase_advance(frame_phase).with_duration(t)),
                Segment::Free(f) => Ok(f.with_duration(t).propagator()),
            }
        };
        for k in 0..per_segment {
            let t = duration * k as f64 / (per_segment - 1) as f64;
            out.push((t0 + t, propagator(t)?.apply(&psi)));
        }
        psi = propagator(duration)?.apply(&psi);
        if let Segment::Free(f) = segment {
            frame_phase += f.relative_phase();
        }
        t0 += duration;
    }
    Ok(out)
}

/// diag(1, e^{−iϕ}, 1): a field-off gap in the three-level space.
fn free_3(phase: f64) -> Matrix3<C64> {
    Matrix3::from_diagonal(&nalgebra::Vector3::new(c(1.0, 0.0), cis(-phase), c(1.0, 0.0)))
}

/// Three-level populations and Bloch components along the sequence, sampled
/// `per_segment` times within every segment. Times are measured from the
/// start of the sequence.
pub fn sequence_samples_3(seq: &PulseSequence, psi0: &Qutrit, per_segment: usize) -> Result<Vec<TimeSample>> {
    seq.validate()?;
    let per_segment = per_segment.max(2);
    let mut out = Vec::new();
    let mut psi = *psi0;
    let mut t0 = 0.0;
    let mut frame_phase = 0.0;
    for segment in &seq.segments {
        match segment {
            Segment::Drive(d) => {
                let d = d.with_phase_advance(frame_phase);
                out.extend(
                    lambda::trajectory_3(&d, &psi, per_segment)
                        .into_iter()
                        .map(|s| TimeSample { t: t0 + s.t, ..s }),
                );
                psi = lambda::propagate_3(&d, &psi);
            }
            Segment::Free(f) => {
                for k in 0..per_segment {
                    let frac = k as f64 / (per_segment - 1) as f64;
                    let v = free_3(f.relative_phase() * frac) * psi.amplitudes();
                    let [sx, sy, sz] = crate::basis::bloch_components(v[0], v[1]);
                    out.push(TimeSample {
                        t: t0 + f.delta_t * frac,
                        p0: v[0].norm_sqr(),
                        p1: v[1].norm_sqr(),
                        pa: v[2].norm_sqr(),
                        sx,
                        sy,
                        sz,
                    });
                }
                psi = Qutrit::from_raw(free_3(f.relative_phase()) * psi.amplitudes());
                frame_phase += f.relative_phase();
            }
        }
        t0 += segment.duration();
    }
    Ok(out)
}

/// |tr(U†V)|/2, insensitive to a global phase on either argument.
pub fn gate_fidelity(u: &Unitary2, v: &Unitary2) -> f64 {
    (u.matrix().adjoint() * v.matrix()).trace().norm() / 2.0
}

/// The intended logical action on (|0⟩, |1⟩).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateTarget {
    matrix: Matrix2<C64>,
}

pub const TARGET_UNITARY_TOL: f64 = 1e-10;

impl GateTarget {
    pub fn new(matrix: Matrix2<C64>) -> Result<Self> {
        UnitaryMatrix::with_tolerance(matrix, TARGET_UNITARY_TOL)?;
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &Matrix2<C64> {
        &self.matrix
    }

    pub fn unitary(&self) -> Unitary2 {
        UnitaryMatrix::from_matrix_unchecked(self.matrix)
    }

    pub fn identity() -> Self {
        Self {
            matrix: Matrix2::identity(),
        }
    }

    /// |0⟩ → i e^{−iδφ}|1⟩, |1⟩ → i e^{iδφ}|0⟩.
    pub fn not(dphi: f64) -> Self {
        Self {
            matrix: *crate::lambda::rotation_closed_form(1.0, 0.0, dphi, FRAC_PI_2).matrix(),
        }
    }

    /// |0⟩ → (|0⟩ + |1⟩)/√2, |1⟩ → (|1⟩ − |0⟩)/√2.
    pub fn hadamard() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            matrix: Matrix2::new(c(h, 0.0), c(-h, 0.0), c(h, 0.0), c(h, 0.0)),
        }
    }

    /// diag(e^{−iχ}, e^{iχ})
    pub fn phase(chi: f64) -> Self {
        Self {
            matrix: Matrix2::new(cis(-chi), c(0.0, 0.0), c(0.0, 0.0), cis(chi)),
        }
    }
}

/// Builds balanced Raman segments with a fixed effective coupling g and
/// detuning Δ > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RamanCompiler {
    g: f64,
    delta: f64,
    phi_ii: f64,
    default_dphi: f64,
}

impl RamanCompiler {
    pub fn new(g: f64, delta: f64) -> Result<Self> {
        if !(g > 0.0 && g.is_finite()) {
            return Err(Error::NonPositiveCoupling(g));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(invalid("delta", format!("compiled segments need positive detuning, got {delta}")));
        }
        Ok(Self {
            g,
            delta,
            phi_ii: 0.0,
            default_dphi: 0.0,
        })
    }

    /// Takes Δ, φ_II and the phase difference from a drive template.
    pub fn from_template(g: f64, template: &DriveSegment) -> Result<Self> {
        Ok(Self {
            phi_ii: template.phi_ii,
            default_dphi: template.phase_difference(),
            ..Self::new(g, template.delta)?
        })
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Ω_I = Ω_II = sqrt(gΔ)
    pub fn rabi(&self) -> f64 {
        (self.g * self.delta).sqrt()
    }

    pub fn segment(&self, dphi: f64, duration: f64) -> DriveSegment {
        let rabi = self.rabi();
        DriveSegment {
            omega_i: rabi,
            omega_ii: rabi,
            delta: self.delta,
            phi_i: self.phi_ii + dphi,
            phi_ii: self.phi_ii,
            duration,
        }
    }

    /// R(gt = angle, δφ) as one segment.
    pub fn rotation(&self, angle: f64, dphi: f64) -> Result<PulseSequence> {
        if angle < 0.0 {
            return Err(invalid("angle", "rotation angle must be non-negative"));
        }
        PulseSequence::new("rotation", vec![Segment::Drive(self.segment(dphi, angle / self.g))])
    }

    pub fn not(&self) -> Result<PulseSequence> {
        self.not_with_phase(self.default_dphi)
    }

    pub fn not_with_phase(&self, dphi: f64) -> Result<PulseSequence> {
        PulseSequence::new("not", vec![Segment::Drive(self.segment(dphi, PI / (2.0 * self.g)))])
    }

    pub fn hadamard(&self) -> Result<PulseSequence> {
        PulseSequence::new(
            "hadamard",
            vec![Segment::Drive(self.segment(FRAC_PI_2, PI / (4.0 * self.g)))],
        )
    }

    /// diag(e^{−iχ}, e^{iχ}) from two π/(2g) steps at δφ = χ, then δφ = π.
    pub fn phase(&self, chi: f64) -> Result<PulseSequence> {
        let t = PI / (2.0 * self.g);
        PulseSequence::new(
            "phase",
            vec![
                Segment::Drive(self.segment(chi, t)),
                Segment::Drive(self.segment(PI, t)),
            ],
        )
    }

    pub fn arbitrary(&self, target: &GateTarget) -> Result<PulseSequence> {
        let plan = decompose(target);
        let mut segments = Vec::new();
        if let Some((angle, dphi)) = plan.rotation {
            segments.extend(self.rotation(angle, dphi)?.segments);
        }
        if let Some(chi) = plan.phase {
            segments.extend(self.phase(chi)?.segments);
        }
        if segments.is_empty() {
            segments.push(Segment::Drive(self.segment(0.0, 0.0)));
        }
        PulseSequence::new("arbitrary", segments)
    }
}

pub fn compile_not(g: f64, template: &DriveSegment) -> Result<PulseSequence> {
    RamanCompiler::from_template(g, template)?.not()
}

pub fn compile_hadamard(g: f64, delta: f64) -> Result<PulseSequence> {
    RamanCompiler::new(g, delta)?.hadamard()
}

pub fn compile_phase(chi: f64, g: f64, delta: f64) -> Result<PulseSequence> {
    RamanCompiler::new(g, delta)?.phase(chi)
}

pub fn compile_arbitrary(target: &GateTarget, g: f64, delta: f64) -> Result<PulseSequence> {
    RamanCompiler::new(g, delta)?.arbitrary(target)
}

/// Target ≅ P(phase)·R(rotation) up to global phase. `None` blocks are the
/// identity and are omitted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decomposition {
    /// (gt, δφ) of the rotation block, applied first.
    pub rotation: Option<(f64, f64)>,
    /// χ of the phase block diag(e^{−iχ}, e^{iχ}), applied second.
    pub phase: Option<f64>,
}

const BRANCH_TOL: f64 = 1e-12;

pub fn decompose(target: &GateTarget) -> Decomposition {
    let m = target.matrix();
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let su2 = m / det.sqrt();
    let (a, b) = (su2[(0, 0)], su2[(1, 0)]);
    let angle = b.norm().atan2(a.norm());

    if b.norm() < BRANCH_TOL {
        return Decomposition {
            rotation: None,
            phase: phase_block(-a.arg()),
        };
    }
    if a.norm() < BRANCH_TOL {
        return Decomposition {
            rotation: Some((FRAC_PI_2, wrap(FRAC_PI_2 - b.arg()))),
            phase: None,
        };
    }
    let chi = -a.arg();
    Decomposition {
        rotation: Some((angle, wrap(chi + FRAC_PI_2 - b.arg()))),
        phase: phase_block(chi),
    }
}

/// P(χ + π) = −P(χ), so χ only matters modulo π.
fn phase_block(chi: f64) -> Option<f64> {
    let reduced = chi - PI * (chi / PI).round();
    (reduced.abs() > BRANCH_TOL).then_some(reduced)
}

/// Wraps an angle into (−π, π].
fn wrap(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}
