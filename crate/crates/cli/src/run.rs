//! Scenario runners. Each writes its files under the output directory and
//! returns the lines to print plus an overall verdict.

use std::f64::consts::{PI, TAU};
use std::fs;
use std::path::PathBuf;

use anyhow::{anyhow, Context};
use serde::Serialize;
use squid_gates::compiler::{
    gate_fidelity, sequence_outcome, sequence_samples_3, sequence_trajectory, GateTarget, Model, PulseSequence,
    RamanCompiler, Segment,
};
use squid_gates::constants::{HBAR, PLANCK};
use squid_gates::geometric::{
    bloch_trajectory, compile_geo_phase, compile_geo_rotation, compile_geo_rotation_with_gap,
    gapped_rotation_target, max_dynamic_rate, phase_target, rotation_target, FreeSegment, GeoPhaseSpec,
    GeoRotationSpec,
};
use squid_gates::lambda::{
    effective_params, recommended_samples, validate_conditions, ConditionReport, DriveSegment, TimeSample,
    DEFAULT_LEAKAGE_SAMPLES,
};
use squid_gates::linalg::{ComplexMatrixJson, Qubit, Qutrit, Unitary2};
use squid_gates::spectrum::{
    build_lambda_system, derive_characteristics, select_intermediate, solve_spectrum, DerivedCharacteristics,
    LambdaLevels, SpectralResult,
};

use crate::config::{DeviceConfig, DynamicsConfig, GateSpec, GeometricConfig, InitialState, ScenarioConfig, TableFormat};
use crate::report::{write_json, write_table};

#[derive(Debug)]
pub enum CliError {
    /// Bad invocation or unusable config document.
    Usage(anyhow::Error),
    /// Parameters rejected by validation.
    Invalid(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Invalid(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(e) | CliError::Invalid(e) => write!(f, "{e:#}"),
        }
    }
}

impl From<squid_gates::Error> for CliError {
    fn from(e: squid_gates::Error) -> Self {
        CliError::Invalid(e.into())
    }
}

fn usage(e: anyhow::Error) -> CliError {
    CliError::Usage(e)
}

fn io(e: anyhow::Error) -> CliError {
    CliError::Usage(e)
}

pub type RunResult = Result<Outcome, CliError>;

#[derive(Debug, Default)]
pub struct Outcome {
    pub passed: bool,
    pub lines: Vec<String>,
}

impl Outcome {
    fn new(passed: bool) -> Self {
        Self {
            passed,
            lines: Vec::new(),
        }
    }

    fn line(&mut self, text: impl Into<String>) {
        self.lines.push(text.into());
    }
}

/// Resolved settings shared by every runner.
#[derive(Debug, Clone)]
pub struct RunContext {
    pub config: ScenarioConfig,
    pub out_dir: PathBuf,
    pub format: TableFormat,
    pub seed: u64,
}

impl RunContext {
    pub fn model(&self) -> Model {
        self.config.model()
    }
}

// ---------------------------------------------------------------- spectrum

pub struct SolvedDevice {
    pub characteristics: DerivedCharacteristics,
    pub result: SpectralResult,
    pub levels: LambdaLevels,
}

pub fn solve_device(device: &DeviceConfig) -> Result<SolvedDevice, CliError> {
    let params = device.params()?;
    let characteristics = derive_characteristics(&params)?;
    let result = solve_spectrum(&params, &device.flux_grid()?, device.n_levels)?;
    let idx_a = match device.intermediate {
        Some(a) => a,
        None => select_intermediate(&result, device.ratio_threshold)?,
    };
    let levels = build_lambda_system(&result, idx_a)?;
    Ok(SolvedDevice {
        characteristics,
        result,
        levels,
    })
}

#[derive(Serialize)]
struct LevelRow {
    n: usize,
    energy_j: f64,
    /// E/h in GHz
    energy_ghz: f64,
    /// E/(ħω_LC)
    energy_scaled: f64,
    residual: f64,
}

#[derive(Serialize)]
struct PhiRow {
    pair: &'static str,
    i: usize,
    j: usize,
    value: f64,
}

#[derive(Serialize)]
struct Convergence {
    n_points_refined: usize,
    max_rel_energy_change: f64,
    max_rel_phi_change: f64,
    max_rel_omega_change: f64,
    converged: bool,
}

#[derive(Serialize)]
struct SpectrumReport<'a> {
    config: &'a DeviceConfig,
    beta_l: f64,
    z0_ohm: f64,
    omega_lc_rad_per_s: f64,
    josephson_energy_j: f64,
    levels: Vec<LevelRow>,
    idx_a: usize,
    phi_table: Vec<PhiRow>,
    lambda_system_rad_per_s: LambdaFreqs,
    convergence: Option<Convergence>,
}

#[derive(Serialize)]
struct LambdaFreqs {
    omega_01: f64,
    omega_0a: f64,
    omega_1a: f64,
}

fn phi_table(levels: &LambdaLevels) -> Vec<PhiRow> {
    vec![
        PhiRow {
            pair: "0a",
            i: 0,
            j: levels.idx_a,
            value: levels.phi_0a,
        },
        PhiRow {
            pair: "1a",
            i: 1,
            j: levels.idx_a,
            value: levels.phi_1a,
        },
        PhiRow {
            pair: "01",
            i: 0,
            j: 1,
            value: levels.phi_01,
        },
    ]
}

fn rel(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        b.abs()
    } else {
        (b / a - 1.0).abs()
    }
}

pub fn run_spectrum(ctx: &RunContext) -> RunResult {
    let device = ctx.config.device().map_err(usage)?;
    let solved = solve_device(device)?;
    let SolvedDevice {
        characteristics: d,
        result,
        levels,
    } = &solved;

    let convergence = if device.convergence_check {
        let grid = device.flux_grid()?.refined();
        let fine = solve_spectrum(&result.params, &grid, result.n_levels())?;
        let fine_levels = build_lambda_system(&fine, levels.idx_a)?;
        let energy = (0..result.n_levels())
            .map(|n| rel(result.energies[n], fine.energies[n]))
            .fold(0.0, f64::max);
        let phi = [
            rel(levels.phi_01, fine_levels.phi_01),
            rel(levels.phi_0a, fine_levels.phi_0a),
            rel(levels.phi_1a, fine_levels.phi_1a),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        let omega = [
            rel(levels.omega_01, fine_levels.omega_01),
            rel(levels.omega_0a, fine_levels.omega_0a),
            rel(levels.omega_1a, fine_levels.omega_1a),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        Some(Convergence {
            n_points_refined: grid.n_points,
            max_rel_energy_change: energy,
            max_rel_phi_change: phi,
            max_rel_omega_change: omega,
            converged: energy < 0.01 && phi < 0.01 && omega < 0.01,
        })
    } else {
        None
    };

    let scaled = result.scaled_energies();
    let rows = (0..result.n_levels())
        .map(|n| {
            Ok(LevelRow {
                n,
                energy_j: result.energies[n],
                energy_ghz: result.energies[n] / PLANCK / 1e9,
                energy_scaled: scaled[n],
                residual: result.residual(n)?,
            })
        })
        .collect::<squid_gates::Result<Vec<_>>>()?;

    let report = SpectrumReport {
        config: device,
        beta_l: d.beta_l,
        z0_ohm: d.z0,
        omega_lc_rad_per_s: d.omega_lc,
        josephson_energy_j: d.josephson_energy,
        levels: rows,
        idx_a: levels.idx_a,
        phi_table: phi_table(levels),
        lambda_system_rad_per_s: LambdaFreqs {
            omega_01: levels.omega_01,
            omega_0a: levels.omega_0a,
            omega_1a: levels.omega_1a,
        },
        convergence,
    };
    let json = write_json(&ctx.out_dir, "spectrum.json", &report).map_err(io)?;

    let potential = result.potential()?;
    let a = levels.idx_a;
    let table: Vec<Vec<f64>> = (0..result.grid.n_points)
        .map(|k| {
            vec![
                result.grid.point(k),
                potential[k],
                result.wavefunctions[0][k],
                result.wavefunctions[1][k],
                result.wavefunctions[a][k],
            ]
        })
        .collect();
    let csv = write_table(&ctx.out_dir, "wavefunctions", &["x", "U", "psi_0", "psi_1", "psi_a"], &table, ctx.format)
        .map_err(io)?;

    let converged = report.convergence.as_ref().is_none_or(|c| c.converged);
    let mut out = Outcome::new(converged);
    out.line(format!(
        "beta_L = {:.4}, Z0 = {:.3} ohm, omega_LC = {:.4e} rad/s",
        d.beta_l, d.z0, d.omega_lc
    ));
    out.line(format!("intermediate level a = {}", levels.idx_a));
    for row in &report.phi_table {
        out.line(format!("phi_{} = {:.4e}", row.pair, row.value));
    }
    if let Some(c) = &report.convergence {
        out.line(format!(
            "refined grid ({} points): energies {:.2e}, phi {:.2e}, omega {:.2e} relative change",
            c.n_points_refined, c.max_rel_energy_change, c.max_rel_phi_change, c.max_rel_omega_change
        ));
    }
    out.line(format!("wrote {} and {}", json.display(), csv.display()));
    Ok(out)
}

// ---------------------------------------------------------------- gates

fn template(ctx: &RunContext) -> Result<(DriveSegment, f64), CliError> {
    let drive = ctx.config.drive().map_err(usage)?;
    let seg = drive.segment(drive.duration.unwrap_or(0.0))?;
    let g = effective_params(&seg)?.g;
    Ok((seg, g))
}

fn load_sequence(spec: &GateSpec) -> Result<Option<PulseSequence>, CliError> {
    match spec {
        GateSpec::Sequence(seq) => Ok(Some(seq.clone())),
        GateSpec::SequenceFile(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading sequence {}", path.display()))
                .map_err(usage)?;
            let seq: PulseSequence = serde_json::from_str(&text)
                .with_context(|| format!("parsing sequence {}", path.display()))
                .map_err(usage)?;
            Ok(Some(seq))
        }
        _ => Ok(None),
    }
}

/// The sequence to run and the action it is meant to implement.
pub fn compile_gate(ctx: &RunContext) -> Result<(PulseSequence, GateTarget), CliError> {
    let spec = ctx.config.gate.as_ref().ok_or_else(|| usage(anyhow!("config has no \"gate\" entry")))?;
    if let Some(seq) = load_sequence(spec)? {
        seq.validate()?;
        let target = match &ctx.config.target {
            Some(m) => GateTarget::new(m.to_matrix::<2>()?)?,
            None => GateTarget::new(*sequence_outcome(&seq, Model::ClosedForm, 1.0)?.unitary.matrix())?,
        };
        return Ok((seq, target));
    }
    let (seg, g) = template(ctx)?;
    let compiler = RamanCompiler::from_template(g, &seg)?;
    Ok(match spec {
        GateSpec::Not => (compiler.not()?, GateTarget::not(seg.phase_difference())),
        GateSpec::Hadamard => (compiler.hadamard()?, GateTarget::hadamard()),
        GateSpec::Identity => (compiler.arbitrary(&GateTarget::identity())?, GateTarget::identity()),
        GateSpec::Phase(chi) => (compiler.phase(*chi)?, GateTarget::phase(*chi)),
        GateSpec::Matrix(m) => {
            let target = GateTarget::new(m.to_matrix::<2>()?)?;
            (compiler.arbitrary(&target)?, target)
        }
        GateSpec::Sequence(_) | GateSpec::SequenceFile(_) => unreachable!(),
    })
}

fn samples_per_segment(seq: &PulseSequence, requested: Option<usize>) -> usize {
    requested.unwrap_or_else(|| {
        seq.drives()
            .map(recommended_samples)
            .max()
            .unwrap_or(0)
            .max(DEFAULT_LEAKAGE_SAMPLES)
    })
}

/// max over time of the |a⟩ population, starting from |0⟩ and from |1⟩.
fn max_leakage_over_time(seq: &PulseSequence, per_segment: usize) -> squid_gates::Result<f64> {
    let mut worst: f64 = 0.0;
    for start in [Qutrit::basis(0), Qutrit::basis(1)] {
        for s in sequence_samples_3(seq, &start, per_segment)? {
            worst = worst.max(s.pa);
        }
    }
    Ok(worst)
}

#[derive(Serialize)]
struct Leakage {
    final_max: f64,
    max_over_time: f64,
    bound: f64,
}

#[derive(Serialize)]
struct GateReport<'a> {
    label: &'a str,
    model: Model,
    target: ComplexMatrixJson,
    achieved: ComplexMatrixJson,
    fidelity: f64,
    fidelity_threshold: f64,
    total_duration_s: f64,
    leakage: Option<Leakage>,
    passed: bool,
    sequence: &'a PulseSequence,
}

pub fn run_gate(ctx: &RunContext) -> RunResult {
    let (seq, target) = compile_gate(ctx)?;
    let model = ctx.model();
    let bound = ctx.config.thresholds.leakage_bound;
    let outcome = sequence_outcome(&seq, model, bound)?;
    let fidelity = gate_fidelity(&outcome.unitary, &target.unitary());
    let threshold = ctx.config.thresholds.fidelity_for(model);
    let leakage = match model {
        Model::ThreeLevel => Some(Leakage {
            final_max: outcome.final_leakage,
            max_over_time: max_leakage_over_time(&seq, samples_per_segment(&seq, None))?,
            bound,
        }),
        _ => None,
    };
    let passed = fidelity >= threshold;
    let report = GateReport {
        label: &seq.label,
        model,
        target: ComplexMatrixJson::from_matrix(target.matrix()),
        achieved: ComplexMatrixJson::from_matrix(outcome.unitary.matrix()),
        fidelity,
        fidelity_threshold: threshold,
        total_duration_s: seq.total_duration(),
        leakage,
        passed,
        sequence: &seq,
    };
    let json = write_json(&ctx.out_dir, "gate.json", &report).map_err(io)?;
    let seq_path = write_json(&ctx.out_dir, "sequence.json", &seq).map_err(io)?;

    let mut out = Outcome::new(passed);
    out.line(format!(
        "{} under {}: {} segment(s), {:.6e} s",
        seq.label,
        model,
        seq.segments.len(),
        seq.total_duration()
    ));
    out.line(format!("fidelity {fidelity:.12} (threshold {threshold})"));
    if let Some(l) = &report.leakage {
        out.line(format!(
            "leakage into |a>: final {:.3e}, max over time {:.3e} (bound {})",
            l.final_max, l.max_over_time, l.bound
        ));
    }
    if !passed {
        out.line(format!("FAIL: fidelity {fidelity} below threshold {threshold}"));
    }
    out.line(format!("wrote {} and {}", json.display(), seq_path.display()));
    Ok(out)
}

// ---------------------------------------------------------------- geometric

fn initial_qubit(state: InitialState) -> Result<Qubit, CliError> {
    Ok(match state {
        InitialState::Zero => Qubit::basis(0),
        InitialState::One => Qubit::basis(1),
        InitialState::PlusY => Qubit::plus_y(),
        InitialState::MinusY => Qubit::minus_y(),
        InitialState::Intermediate => {
            return Err(usage(anyhow!("initial state \"a\" needs the three-level model")));
        }
    })
}

fn initial_qutrit(state: InitialState) -> Qutrit {
    match state {
        InitialState::Zero => Qutrit::basis(0),
        InitialState::One => Qutrit::basis(1),
        InitialState::Intermediate => Qutrit::basis(2),
        InitialState::PlusY => Qubit::plus_y().embed(),
        InitialState::MinusY => Qubit::minus_y().embed(),
    }
}

#[derive(Serialize)]
struct GeometricReport<'a> {
    kind: &'static str,
    model: Model,
    rotation: Option<GeoRotationSpec>,
    aa_phases: Option<(f64, f64)>,
    phase: Option<GeoPhaseSpec>,
    gap_relative_phase: Option<f64>,
    target: ComplexMatrixJson,
    achieved: ComplexMatrixJson,
    max_entry_error: f64,
    fidelity: f64,
    fidelity_threshold: f64,
    /// max |⟨ψ|H_eff|ψ⟩| from |+⟩ and |−⟩ divided by the rotation rate
    dynamic_phase_rate: Option<f64>,
    passed: bool,
    sequence: &'a PulseSequence,
}

pub fn run_geometric(ctx: &RunContext) -> RunResult {
    let geo = ctx
        .config
        .geometric
        .ok_or_else(|| usage(anyhow!("config has no \"geometric\" block")))?;
    let (seg, g) = template(ctx)?;
    let p = effective_params(&seg)?;
    let delta = seg.delta;
    let model = ctx.model();

    let mut rotation = None;
    let mut phase = None;
    let mut gap_phase = None;
    let (seq, target) = match geo {
        GeometricConfig::Rotation { alpha, omega_0, gap } => {
            let spec = match (alpha, omega_0) {
                (Some(a), _) => GeoRotationSpec::from_angle(a, g)?,
                (None, Some(w)) => GeoRotationSpec::new(w.angular(), g)?,
                (None, None) => GeoRotationSpec::new(p.omega_0, g)?,
            };
            rotation = Some(spec);
            match gap {
                None => (compile_geo_rotation(&spec, delta)?, rotation_target(spec.alpha)),
                Some(gap) => {
                    let level_gap = match gap.level_gap {
                        Some(f) => f.angular(),
                        None => solve_device(ctx.config.device().map_err(usage)?)?.levels.omega_01,
                    };
                    let delta_t = match (gap.duration, gap.periods) {
                        (Some(t), None) => t,
                        (None, Some(n)) => n * TAU / level_gap,
                        _ => return Err(usage(anyhow!("gap needs exactly one of \"duration\" or \"periods\""))),
                    };
                    let free = FreeSegment::new(delta_t, HBAR * level_gap)?;
                    gap_phase = Some(free.relative_phase());
                    (
                        compile_geo_rotation_with_gap(&spec, delta, free)?,
                        gapped_rotation_target(spec.alpha, free.relative_phase()),
                    )
                }
            }
        }
        GeometricConfig::Phase { delta_phi_0 } => {
            let spec = GeoPhaseSpec::new(delta_phi_0);
            phase = Some(spec);
            (compile_geo_phase(&spec, g, delta)?, phase_target(spec.beta))
        }
    };

    let outcome = sequence_outcome(&seq, model, ctx.config.thresholds.leakage_bound)?;
    let target = Unitary2::from_matrix_unchecked(target);
    let fidelity = gate_fidelity(&outcome.unitary, &target);
    let threshold = ctx.config.thresholds.fidelity_for(model);
    let dynamic_phase_rate = match rotation {
        Some(spec) if gap_phase.is_none() => {
            let worst = [Qubit::plus_y(), Qubit::minus_y()]
                .iter()
                .map(|psi| max_dynamic_rate(&seq, psi, 200))
                .collect::<squid_gates::Result<Vec<_>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            Some(worst / spec.rotation_rate())
        }
        _ => None,
    };
    let passed = fidelity >= threshold;
    let report = GeometricReport {
        kind: if rotation.is_some() { "rotation" } else { "phase" },
        model,
        rotation,
        aa_phases: rotation.as_ref().map(squid_gates::geometric::aa_phase),
        phase,
        gap_relative_phase: gap_phase,
        target: ComplexMatrixJson::from_matrix(target.matrix()),
        achieved: ComplexMatrixJson::from_matrix(outcome.unitary.matrix()),
        max_entry_error: outcome.unitary.max_abs_diff(target.matrix()),
        fidelity,
        fidelity_threshold: threshold,
        dynamic_phase_rate,
        passed,
        sequence: &seq,
    };
    let json = write_json(&ctx.out_dir, "geometric.json", &report).map_err(io)?;

    let initial = ctx.config.dynamics.map_or(InitialState::PlusY, |d| d.initial);
    let per_segment = ctx.config.dynamics.and_then(|d| d.samples).unwrap_or(200);
    let bloch: Vec<Vec<f64>> = bloch_trajectory(&seq, &initial_qubit(initial)?, per_segment)?
        .into_iter()
        .map(|b| vec![b.t, b.sx, b.sy, b.sz])
        .collect();
    let table = write_table(&ctx.out_dir, "bloch", &["t", "sx", "sy", "sz"], &bloch, ctx.format).map_err(io)?;

    let mut out = Outcome::new(passed);
    if let Some(spec) = rotation {
        out.line(format!(
            "rotation: alpha = {:.12}, theta = {:.12}, omega_0/g = {:.6}",
            spec.alpha,
            spec.theta,
            spec.omega_0 / spec.g
        ));
    }
    if let Some(spec) = phase {
        out.line(format!("phase gate: delta_phi_0 = {}, beta = {:.12}", spec.delta_phi_0, spec.beta));
    }
    if let Some(ph) = gap_phase {
        out.line(format!("field-off gap relative phase {ph:.6} rad"));
    }
    out.line(format!(
        "max entry error {:.3e}, fidelity {fidelity:.12} (threshold {threshold})",
        report.max_entry_error
    ));
    if let Some(rate) = dynamic_phase_rate {
        out.line(format!("max |<H>|/(hbar W) from sigma_y eigenstates {rate:.3e}"));
    }
    out.line(format!("wrote {} and {}", json.display(), table.display()));
    Ok(out)
}

// ---------------------------------------------------------------- dynamics

#[derive(Serialize)]
struct DynamicsReport<'a> {
    model: Model,
    initial: InitialState,
    samples_per_segment: usize,
    total_duration_s: f64,
    max_pa: f64,
    final_populations: [f64; 3],
    sequence: &'a PulseSequence,
}

pub fn run_dynamics(ctx: &RunContext) -> RunResult {
    let dynamics: DynamicsConfig = ctx.config.dynamics.unwrap_or_default();
    let seq = if ctx.config.gate.is_some() {
        compile_gate(ctx)?.0
    } else {
        let drive = ctx.config.drive().map_err(usage)?;
        let duration = match drive.duration {
            Some(t) => t,
            None => {
                let g = effective_params(&drive.segment(0.0)?)?.g;
                if !(g > 0.0) {
                    return Err(CliError::Invalid(anyhow!(
                        "drive has no effective coupling; give an explicit \"duration\""
                    )));
                }
                PI / (2.0 * g)
            }
        };
        PulseSequence::new("drive", vec![Segment::Drive(drive.segment(duration)?)])?
    };
    let model = ctx.model();
    let per_segment = samples_per_segment(&seq, dynamics.samples);
    let samples: Vec<TimeSample> = match model {
        Model::ThreeLevel => sequence_samples_3(&seq, &initial_qutrit(dynamics.initial), per_segment)?,
        _ => sequence_trajectory(&seq, &initial_qubit(dynamics.initial)?, per_segment)?
            .into_iter()
            .map(|(t, psi)| {
                let [sx, sy, sz] = squid_gates::basis::bloch_components(psi.amplitude(0), psi.amplitude(1));
                TimeSample {
                    t,
                    p0: psi.population(0),
                    p1: psi.population(1),
                    pa: 0.0,
                    sx,
                    sy,
                    sz,
                }
            })
            .collect(),
    };
    let last = samples.last().copied().ok_or_else(|| CliError::Invalid(anyhow!("no samples produced")))?;
    let max_pa = samples.iter().map(|s| s.pa).fold(0.0, f64::max);
    let report = DynamicsReport {
        model,
        initial: dynamics.initial,
        samples_per_segment: per_segment,
        total_duration_s: seq.total_duration(),
        max_pa,
        final_populations: [last.p0, last.p1, last.pa],
        sequence: &seq,
    };
    let json = write_json(&ctx.out_dir, "dynamics.json", &report).map_err(io)?;
    let rows: Vec<Vec<f64>> = samples
        .iter()
        .map(|s| vec![s.t, s.p0, s.p1, s.pa, s.sx, s.sy, s.sz])
        .collect();
    let table = write_table(
        &ctx.out_dir,
        "timeseries",
        &["t", "p0", "p1", "pa", "sx", "sy", "sz"],
        &rows,
        ctx.format,
    )
    .map_err(io)?;

    let mut out = Outcome::new(true);
    out.line(format!(
        "{} samples under {model}, duration {:.6e} s",
        samples.len(),
        seq.total_duration()
    ));
    out.line(format!(
        "final populations p0 = {:.6}, p1 = {:.6}, pa = {:.3e}; max pa = {max_pa:.4e}",
        last.p0, last.p1, last.pa
    ));
    out.line(format!("wrote {} and {}", json.display(), table.display()));
    Ok(out)
}

// ---------------------------------------------------------------- validate

#[derive(Serialize)]
struct ValidateReport<'a> {
    idx_a: usize,
    levels: &'a LambdaLevels,
    drive: DriveSegment,
    conditions: &'a ConditionReport,
    passed: bool,
}

pub fn run_validate(ctx: &RunContext) -> RunResult {
    let device = ctx.config.device().map_err(usage)?;
    let drive = ctx.config.drive().map_err(usage)?;
    let seg = drive.segment(drive.duration.unwrap_or(0.0))?;
    let solved = solve_device(device)?;
    let report = validate_conditions(&solved.levels, &seg, ctx.config.thresholds.margin)?;
    let passed = report.all_passed();
    let json = write_json(
        &ctx.out_dir,
        "validate.json",
        &ValidateReport {
            idx_a: solved.levels.idx_a,
            levels: &solved.levels,
            drive: seg,
            conditions: &report,
            passed,
        },
    )
    .map_err(io)?;

    let mut out = Outcome::new(passed);
    out.line(format!(
        "carriers omega_I = {:.6e}, omega_II = {:.6e} rad/s; required margin {}",
        report.carrier_i, report.carrier_ii, report.required_margin
    ));
    for c in &report.checks {
        out.line(format!(
            "{} {:<3} {:<45} value {:.4e} threshold {:.4e} margin {:.3e}",
            if c.passed { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            c.value,
            c.threshold,
            c.margin
        ));
    }
    out.line(format!("wrote {}", json.display()));
    Ok(out)
}
