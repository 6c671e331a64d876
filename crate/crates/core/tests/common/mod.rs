//! Reference implementations shared by the integration tests. Nothing here
//! calls into the library's propagators.
#![allow(dead_code)]

use nalgebra::{Matrix2, SMatrix};
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use squid_gates::lambda::DriveSegment;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// exp(−i·H·t) by scaling and squaring of a truncated Taylor series.
pub fn expm_minus_i<const N: usize>(h: &SMatrix<C64, N, N>, t: f64) -> SMatrix<C64, N, N> {
    let a = h * c(0.0, -t);
    let norm = a.iter().map(|z| z.norm()).sum::<f64>();
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm / scale > 0.25 {
        scale *= 2.0;
        squarings += 1;
    }
    let a = a / c(scale, 0.0);
    let mut term = SMatrix::<C64, N, N>::identity();
    let mut sum = term;
    for k in 1..=24 {
        term = term * a / c(k as f64, 0.0);
        sum += term;
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}

/// ω0 σz − g e^{iδφ}|0⟩⟨1| − g e^{−iδφ}|1⟩⟨0| with σz = diag(−1, 1), written
/// out entry by entry.
pub fn h_eff_reference(g: f64, omega_0: f64, dphi: f64) -> Matrix2<C64> {
    Matrix2::new(
        c(-omega_0, 0.0),
        C64::from_polar(-g, dphi),
        C64::from_polar(-g, -dphi),
        c(omega_0, 0.0),
    )
}

pub fn max_abs<const R: usize, const K: usize>(m: &SMatrix<C64, R, K>) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

/// Segment with g and |ω0| log-uniform in [1e6, 1e9] rad/s, arbitrary phases
/// and duration up to 100 rotation periods' worth of angle (W·t ≤ 100).
pub fn random_segment(rng: &mut ChaCha8Rng) -> DriveSegment {
    let g = log_uniform(rng, 1e6, 1e9);
    let omega_0 = log_uniform(rng, 1e6, 1e9) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let delta = log_uniform(rng, 1e10, 1e12);
    let w = g.hypot(omega_0);
    let omega_i = (delta * (w + omega_0)).sqrt();
    let omega_ii = (delta * (w - omega_0)).sqrt();
    let phi_i = rng.gen_range(-10.0..10.0);
    let phi_ii = rng.gen_range(-10.0..10.0);
    let duration = rng.gen_range(0.0..100.0) / w;
    DriveSegment::new(omega_i, omega_ii, delta, phi_i, phi_ii, duration).unwrap()
}

/// Haar-ish random 2×2 unitary: random SU(2) element times a random phase.
pub fn random_unitary(rng: &mut ChaCha8Rng) -> Matrix2<C64> {
    let v: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let (a, b) = (c(v[0] / n, v[1] / n), c(v[2] / n, v[3] / n));
    let phase = C64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
    Matrix2::new(a, -b.conj(), b, a.conj()) * phase
}
