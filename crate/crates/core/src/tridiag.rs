//! Symmetric tridiagonal eigensolver.
//!
//! Eigenvalues come from Sturm-sequence bisection, which brackets the k-th
//! smallest eigenvalue to machine precision without computing the others.
//! Eigenvectors come from inverse iteration with a pivoted tridiagonal LU,
//! followed by Gram-Schmidt against the vectors already accepted.

use crate::error::{Error, Result};

const MAX_INVERSE_ITERATIONS: usize = 12;
const RESIDUAL_TOL: f64 = 1e-13;

/// Real symmetric tridiagonal matrix stored as its diagonal and first
/// off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

/// Eigenpairs sorted by ascending eigenvalue. Vectors have unit Euclidean norm
/// and their largest-magnitude entry is positive.
#[derive(Debug, Clone)]
pub struct Eigenpairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(crate::error::invalid("diag", "matrix must be non-empty"));
        }
        if off.len() + 1 != diag.len() {
            return Err(crate::error::invalid(
                "off",
                format!("expected {} off-diagonal entries, got {}", diag.len() - 1, off.len()),
            ));
        }
        Ok(Self { diag, off })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    /// y = T·x
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut acc = self.diag[i] * x[i];
            if i > 0 {
                acc += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                acc += self.off[i] * x[i + 1];
            }
            y[i] = acc;
        }
        y
    }

    /// Gershgorin interval containing the whole spectrum.
    fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    fn norm_bound(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE)
    }

    /// Number of eigenvalues strictly below `x` (Sturm count via LDL^T pivots).
    pub fn count_below(&self, x: f64) -> usize {
        let pivmin = f64::MIN_POSITIVE.sqrt() * self.norm_bound();
        let mut count = 0;
        let mut q = self.diag[0] - x;
        for i in 0..self.dim() {
            if i > 0 {
                q = self.diag[i] - x - self.off[i - 1] * self.off[i - 1] / q;
            }
            if q.abs() < pivmin {
                q = -pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The k-th smallest eigenvalue (0-based) by bisection.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        let scale = self.norm_bound();
        lo -= f64::EPSILON * scale;
        hi += f64::EPSILON * scale;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Lowest `k` eigenpairs.
    pub fn lowest_eigenpairs(&self, k: usize) -> Result<Eigenpairs> {
        let n = self.dim();
        if k == 0 || k > n {
            return Err(crate::error::invalid(
                "k",
                format!("requested {k} eigenpairs of a {n}x{n} matrix"),
            ));
        }
        let values: Vec<f64> = (0..k).map(|i| self.eigenvalue(i)).collect();
        let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(k);
        for (level, &lambda) in values.iter().enumerate() {
            let v = self.inverse_iteration(level, lambda, &vectors)?;
            vectors.push(v);
        }
        Ok(Eigenpairs { values, vectors })
    }

    fn inverse_iteration(&self, level: usize, lambda: f64, previous: &[Vec<f64>]) -> Result<Vec<f64>> {
        let n = self.dim();
        let scale = self.norm_bound();
        // Shift a hair away from lambda so the factorization stays finite.
        let shift = lambda + 4.0 * f64::EPSILON * scale;
        let lu = PivotedLu::factor(self, shift, scale);

        let mut v = start_vector(n, level);
        let mut residual = f64::INFINITY;
        for iteration in 1..=MAX_INVERSE_ITERATIONS {
            lu.solve_in_place(&mut v);
            orthogonalize(&mut v, previous);
            normalize(&mut v);
            let tv = self.apply(&v);
            let r: f64 = tv
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - lambda * b).powi(2))
                .sum::<f64>()
                .sqrt();
            residual = r / scale;
            if residual < RESIDUAL_TOL && iteration >= 2 {
                fix_sign(&mut v);
                return Ok(v);
            }
        }
        Err(Error::EigenNonConvergence {
            level,
            iterations: MAX_INVERSE_ITERATIONS,
            residual,
        })
    }
}

/// Deterministic, non-degenerate start vector (splitmix64 hash of the index).
fn start_vector(n: usize, seed: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let mut z = (i as u64)
                .wrapping_add((seed as u64) << 32)
                .wrapping_add(0x9E37_79B9_7F4A_7C15);
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
            z ^= z >> 31;
            0.5 + (z >> 11) as f64 / (1u64 << 53) as f64
        })
        .collect()
}

fn orthogonalize(v: &mut [f64], basis: &[Vec<f64>]) {
    // two passes of classical Gram-Schmidt
    for _ in 0..2 {
        for b in basis {
            let overlap: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= overlap * y);
        }
    }
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}

fn fix_sign(v: &mut [f64]) {
    let peak = v
        .iter()
        .copied()
        .fold(0.0_f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
    if peak < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// LU factorization with partial pivoting of (T - shift·I). U carries two
/// superdiagonals after row interchanges.
struct PivotedLu {
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    dl: Vec<f64>,
    swapped: Vec<bool>,
}

impl PivotedLu {
    fn factor(t: &SymTridiagonal, shift: f64, scale: f64) -> Self {
        let n = t.dim();
        let mut d: Vec<f64> = t.diag.iter().map(|x| x - shift).collect();
        let mut du = t.off.clone();
        let mut dl = t.off.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        let tiny = f64::EPSILON * scale;

        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = tiny;
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        if d[n - 1] == 0.0 {
            d[n - 1] = tiny;
        }
        Self {
            d,
            du,
            du2,
            dl,
            swapped,
        }
    }

    fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.d.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let temp = b[i] - self.dl[i] * b[i + 1];
                b[i] = b[i + 1];
                b[i + 1] = temp;
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n >= 2 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
        // rescale to keep the iterate finite
        let peak = b.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
        if peak > 0.0 && peak.is_finite() {
            b.iter_mut().for_each(|x| *x /= peak);
        }
    }
}
