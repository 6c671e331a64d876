//! `validate-paper`: reruns the reference-device scenario against its expected
//! numbers and the analytic gate identities.

use std::f64::consts::{PI, TAU};

use anyhow::anyhow;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use squid_gates::compiler::{gate_fidelity, sequence_outcome, sequence_unitary, GateTarget, Model, RamanCompiler};
use squid_gates::constants::{FLUX_QUANTUM, HBAR};
use squid_gates::geometric::{
    compile_geo_phase, compile_geo_rotation, compile_geo_rotation_with_gap, gapped_rotation_target,
    phase_target, quantized_gap_times, rotation_target, FreeSegment, GeoPhaseSpec, GeoRotationSpec,
};
use squid_gates::lambda::{
    closed_form_unitary, effective_params, max_intermediate_population, propagator_eff, DriveSegment,
    DEFAULT_LEAKAGE_SAMPLES,
};
use squid_gates::linalg::Qutrit;
use squid_gates::spectrum::{build_lambda_system, compute_rabi, solve_spectrum, PulseSpec};

use crate::report::write_json;
use crate::run::{solve_device, CliError, Outcome, RunContext, RunResult};

#[derive(Debug, Serialize)]
struct Check {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

fn band(value: f64, target: f64, rel: f64) -> bool {
    (value / target - 1.0).abs() <= rel
}

pub fn run_validate_paper(ctx: &RunContext) -> RunResult {
    let device = ctx.config.device().map_err(CliError::Usage)?;
    let drive = ctx.config.drive().map_err(CliError::Usage)?;
    let solved = solve_device(device)?;
    let d = &solved.characteristics;
    let levels = &solved.levels;
    let mut checks = Vec::new();

    checks.push(check(
        "device characteristics",
        (d.beta_l - 1.2).abs() <= 1e-3 && (d.z0 - 50.0).abs() <= 1e-2 && (d.omega_lc - 5e11).abs() <= 1e8,
        format!("beta_L {:.5}, Z0 {:.4} ohm, omega_LC {:.5e} rad/s", d.beta_l, d.z0, d.omega_lc),
    ));

    let phis = [(levels.phi_0a, 8.4e-5), (levels.phi_1a, 5.4e-5), (levels.phi_01, 7.9e-7)];
    checks.push(check(
        "flux matrix elements within 15%",
        phis.iter().all(|&(v, t)| band(v, t, 0.15)),
        format!(
            "a = {}: phi_0a {:.3e}, phi_1a {:.3e}, phi_01 {:.3e}",
            levels.idx_a, levels.phi_0a, levels.phi_1a, levels.phi_01
        ),
    ));

    let fine = solve_spectrum(&solved.result.params, &device.flux_grid()?.refined(), device.n_levels)?;
    let fine_levels = build_lambda_system(&fine, levels.idx_a)?;
    let grid_change = [
        (fine_levels.phi_0a / levels.phi_0a - 1.0).abs(),
        (fine_levels.phi_1a / levels.phi_1a - 1.0).abs(),
        (fine_levels.phi_01 / levels.phi_01 - 1.0).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    checks.push(check(
        "matrix elements grid converged",
        grid_change < 0.01,
        format!("max relative change on the refined grid {grid_change:.2e}"),
    ));

    // one pulse amplitude on both transitions: Ω_0a/Ω_01 = φ0a/φ01
    let pulse = PulseSpec::new(1e-3 * FLUX_QUANTUM, levels.omega_0a, 0.0, solved.result.params.inductance)?;
    let (rabi_0a, rabi_01) = (compute_rabi(&pulse, levels.phi_0a), compute_rabi(&pulse, levels.phi_01));
    checks.push(check(
        "Rabi ratio near 1e2",
        band(rabi_0a / rabi_01, 1.06e2, 0.15),
        format!("Omega_0a/Omega_01 = {:.4e}", rabi_0a / rabi_01),
    ));

    let template = drive.segment(0.0)?;
    let g = effective_params(&template)?.g;
    let not = RamanCompiler::from_template(g, &template)?.not()?;
    let not_seg = not.drives().next().copied().ok_or_else(|| CliError::Invalid(anyhow!("empty NOT sequence")))?;
    let leakage = max_intermediate_population(&not_seg, &Qutrit::basis(0), 10 * DEFAULT_LEAKAGE_SAMPLES)?;
    checks.push(check(
        "intermediate population during NOT",
        (0.005..=0.02).contains(&leakage),
        format!(
            "Delta/Omega = {:.2}, max |<a|psi>|^2 = {leakage:.4}",
            template.delta / template.omega_i.max(template.omega_ii)
        ),
    ));

    let omega = 1e2 * rabi_01;
    let speed = DriveSegment::new(omega, omega, 10.0 * omega, 0.0, 0.0, 0.0)?;
    let speed_g = effective_params(&speed)?.g;
    let ratio = RamanCompiler::from_template(speed_g, &speed)?.not()?.total_duration() / (PI / (2.0 * rabi_01));
    checks.push(check(
        "Raman NOT ten times faster",
        (ratio - 0.1).abs() <= 1e-12,
        format!("duration ratio {ratio:.15}"),
    ));

    let full = sequence_outcome(&not, Model::ThreeLevel, 1.0)?.unitary;
    let eff = sequence_unitary(&not, Model::Effective)?;
    let infidelity = 1.0 - gate_fidelity(&full, &eff);
    checks.push(check(
        "three-level NOT matches effective model",
        infidelity <= 2e-2,
        format!("infidelity {infidelity:.3e}"),
    ));

    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut oracle: f64 = 0.0;
    for _ in 0..100 {
        let g = rng.gen_range(1e6..1e9);
        let w0 = rng.gen_range(-1e9..1e9);
        let delta = 1e11;
        let w = f64::hypot(g, w0);
        let seg = DriveSegment::new(
            (delta * (w + w0)).sqrt(),
            (delta * (w - w0)).max(0.0).sqrt(),
            delta,
            rng.gen_range(-PI..PI),
            rng.gen_range(-PI..PI),
            rng.gen_range(0.0..100.0) / w,
        )?;
        let diff = closed_form_unitary(&seg)?.max_abs_diff(propagator_eff(&seg)?.matrix());
        oracle = oracle.max(diff);
    }
    checks.push(check(
        "closed form equals eigen-propagator",
        oracle <= 1e-12,
        format!("seed {}, 100 segments, max difference {oracle:.2e}", ctx.seed),
    ));

    let compiler = RamanCompiler::new(g, template.delta)?;
    let hadamard = GateTarget::hadamard();
    let mut recipe = 1.0 - gate_fidelity(&sequence_unitary(&compiler.hadamard()?, Model::ClosedForm)?, &hadamard.unitary());
    for k in 0..8 {
        let chi = TAU * k as f64 / 8.0;
        let u = sequence_unitary(&compiler.phase(chi)?, Model::ClosedForm)?;
        recipe = recipe.max(1.0 - gate_fidelity(&u, &GateTarget::phase(chi).unitary()));
    }
    checks.push(check(
        "Hadamard and phase recipes",
        recipe <= 1e-10,
        format!("worst infidelity {recipe:.2e}"),
    ));

    let mut geo: f64 = 0.0;
    for k in 0..50 {
        let spec = GeoRotationSpec::new(g * 10.0 * k as f64 / 49.0, g)?;
        let u = sequence_unitary(&compile_geo_rotation(&spec, template.delta)?, Model::Effective)?;
        geo = geo.max(u.max_abs_diff(&rotation_target(spec.alpha)));
    }
    checks.push(check(
        "geometric rotation angle 2 arctan(omega_0/g)",
        geo <= 1e-10,
        format!("max entry error {geo:.2e}"),
    ));

    let mut geo_phase: f64 = 0.0;
    for k in 0..64 {
        let spec = GeoPhaseSpec::new(TAU * k as f64 / 64.0);
        let u = sequence_unitary(&compile_geo_phase(&spec, g, template.delta)?, Model::ClosedForm)?;
        geo_phase = geo_phase.max(u.max_abs_diff(&phase_target(spec.beta)));
    }
    checks.push(check(
        "geometric phase pi - 2 dphi_0",
        geo_phase <= 1e-12,
        format!("max entry error {geo_phase:.2e}"),
    ));

    let e_gap = HBAR * levels.omega_01;
    let spec = GeoRotationSpec::from_angle(0.8, g)?;
    let mut gap: f64 = 0.0;
    for dt in quantized_gap_times(e_gap, 5)? {
        let seq = compile_geo_rotation_with_gap(&spec, template.delta, FreeSegment::new(dt, e_gap)?)?;
        gap = gap.max(sequence_unitary(&seq, Model::ClosedForm)?.max_abs_diff(&rotation_target(spec.alpha)));
    }
    let free = FreeSegment::new(0.37 * TAU * HBAR / e_gap, e_gap)?;
    let seq = compile_geo_rotation_with_gap(&spec, template.delta, free)?;
    gap = gap.max(
        sequence_unitary(&seq, Model::ClosedForm)?
            .max_abs_diff(&gapped_rotation_target(spec.alpha, free.relative_phase())),
    );
    checks.push(check(
        "field-off gap phase",
        gap <= 1e-10,
        format!("quantized and 0.37-period gaps, max entry error {gap:.2e}"),
    ));

    let passed = checks.iter().all(|c| c.passed);
    let json = write_json(&ctx.out_dir, "validate_paper.json", &checks).map_err(CliError::Usage)?;
    let mut out = Outcome {
        passed,
        lines: Vec::new(),
    };
    for c in &checks {
        out.lines
            .push(format!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail));
    }
    out.lines.push(format!(
        "{} of {} checks passed; wrote {}",
        checks.iter().filter(|c| c.passed).count(),
        checks.len(),
        json.display()
    ));
    Ok(out)
}
