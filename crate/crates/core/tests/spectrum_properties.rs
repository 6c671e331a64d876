use squid_gates::constants::FLUX_QUANTUM;
use squid_gates::spectrum::{
    build_lambda_system, derive_characteristics, flux_matrix_element, select_intermediate, solve_spectrum, FluxGrid,
    SquidParams, DEFAULT_RATIO_THRESHOLD,
};

const LEVELS: usize = 10;

#[test]
fn eigenpairs_are_accurate_and_orthonormal() {
    let res = solve_spectrum(&SquidParams::reference_device(), &FluxGrid::default_window(), LEVELS).unwrap();
    for n in 0..LEVELS {
        assert!(res.residual(n).unwrap() < 1e-8, "level {n}: {}", res.residual(n).unwrap());
        for m in 0..LEVELS {
            let expect = if m == n { 1.0 } else { 0.0 };
            assert!((res.overlap(m, n).unwrap() - expect).abs() < 1e-10);
        }
    }
    assert!(res.energies.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn symmetric_bias_gives_parity_eigenstates() {
    let params = SquidParams::with_bias_in_flux_quanta(40e-15, 100e-12, 3.95e-6, -0.5).unwrap();
    let grid = FluxGrid::new(-1.05, 0.05, 4001).unwrap();
    let res = solve_spectrum(&params, &grid, 6).unwrap();
    let n = grid.n_points;
    for (k, psi) in res.wavefunctions.iter().enumerate() {
        let even = (0..n).map(|i| (psi[i] - psi[n - 1 - i]).abs()).fold(0.0, f64::max);
        let odd = (0..n).map(|i| (psi[i] + psi[n - 1 - i]).abs()).fold(0.0, f64::max);
        assert!(even.min(odd) < 1e-8, "level {k}: even {even}, odd {odd}");
        // alternating parity up the ladder
        assert_eq!(even < odd, k % 2 == 0, "level {k}");
    }
    // φ between equal-parity states vanishes
    assert!(flux_matrix_element(&res, 0, 2).unwrap() < 1e-8);
    // every level is centred on the symmetry point
    for k in 0..6 {
        assert!(res.flux_moment(k, k, -0.5).unwrap().abs() < 1e-8, "level {k}");
    }
}

#[test]
fn grid_refinement_changes_little() {
    let params = SquidParams::reference_device();
    let grid = FluxGrid::default_window();
    let coarse = solve_spectrum(&params, &grid, LEVELS).unwrap();
    let fine = solve_spectrum(&params, &grid.refined(), LEVELS).unwrap();
    let spacing = |r: &squid_gates::spectrum::SpectralResult, i: usize, j: usize| r.omega(i, j).unwrap();
    for j in 1..LEVELS {
        let rel = (spacing(&fine, 0, j) / spacing(&coarse, 0, j) - 1.0).abs();
        assert!(rel < 1e-2, "ω_0{j} moved by {rel}");
    }
    let a = select_intermediate(&coarse, DEFAULT_RATIO_THRESHOLD).unwrap();
    let lc = build_lambda_system(&coarse, a).unwrap();
    let lf = build_lambda_system(&fine, a).unwrap();
    for (x, y) in [(lc.phi_01, lf.phi_01), (lc.phi_0a, lf.phi_0a), (lc.phi_1a, lf.phi_1a)] {
        assert!((y / x - 1.0).abs() < 1e-2, "{x} -> {y}");
    }
}

#[test]
fn harmonic_limit_against_analytic_values() {
    // no junction: a pure LC oscillator with level spacing ħω_LC
    let params = SquidParams::new(40e-15, 100e-12, 0.0, -0.3 * FLUX_QUANTUM).unwrap();
    let d = derive_characteristics(&params).unwrap();
    let grid = FluxGrid::new(-0.6, 0.0, 4001).unwrap();
    let res = solve_spectrum(&params, &grid, 5).unwrap();
    for n in 1..5 {
        let rel = (res.omega(0, n).unwrap() / (n as f64 * d.omega_lc) - 1.0).abs();
        assert!(rel < 5e-3, "level {n}: {rel}");
    }
    let analytic = (squid_gates::constants::HBAR * d.z0 / 2.0).sqrt() / FLUX_QUANTUM;
    let got = flux_matrix_element(&res, 0, 1).unwrap();
    assert!((got / analytic - 1.0).abs() < 5e-3, "{got} vs {analytic}");
    // ladder selection rule
    assert!(flux_matrix_element(&res, 0, 2).unwrap() < 1e-3 * got);
}

#[test]
fn invalid_devices_rejected() {
    assert!(SquidParams::new(40e-15, 0.0, 3.95e-6, 0.0).is_err());
    assert!(SquidParams::new(40e-15, -1e-12, 3.95e-6, 0.0).is_err());
    assert!(SquidParams::new(0.0, 100e-12, 3.95e-6, 0.0).is_err());
    assert!(SquidParams::new(40e-15, 100e-12, -1.0, 0.0).is_err());
    assert!(FluxGrid::new(0.0, 1.0, 4).is_err());
    assert!(solve_spectrum(&SquidParams::reference_device(), &FluxGrid::default_window(), 2).is_err());
}
