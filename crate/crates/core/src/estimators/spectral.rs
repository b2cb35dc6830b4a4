use super::config::EstimateResult;
use crate::error::{Error, Result};
use crate::models::SamplePath;
use num_complex::Complex64;

/// `|φ̂|` below this counts as a zero of the empirical characteristic function.
pub const DEGENERATE_MODULUS: f64 = 1e-12;

/// `(1/n) Σ exp(i u Δ_j X)`
pub fn empirical_cf(path: &SamplePath, u: f64) -> Complex64 {
    if u == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let (mut re, mut im) = (0.0, 0.0);
    for d in path.increments() {
        let (s, c) = (u * d).sin_cos();
        re += c;
        im += s;
    }
    let n = path.n as f64;
    Complex64::new(re / n, im / n)
}

/// `-(2n/u²) log|φ̂_n(u)|`, or 0 with the degenerate flag when `φ̂_n(u)` vanishes.
pub fn spectral_estimator(path: &SamplePath, u: f64) -> Result<EstimateResult> {
    if !(u > 0.0) || !u.is_finite() {
        return Err(Error::invalid("u", "spectral frequency must be positive"));
    }
    let modulus = empirical_cf(path, u).norm();
    if modulus < DEGENERATE_MODULUS {
        return Ok(EstimateResult {
            value: 0.0,
            tuning_used: Some(u),
            degenerate: true,
        });
    }
    let n = path.n as f64;
    // |φ̂| can exceed 1 by rounding; the exact value never does
    let value = (-2.0 * n / (u * u) * modulus.min(1.0).ln()).max(0.0);
    Ok(EstimateResult::plain(value, Some(u)))
}

/// `u_n = √n` for `r <= 1`, otherwise `√((r-1) n log n) / √A`.
pub fn spectral_frequency(n: usize, r: f64, a: f64) -> f64 {
    let nf = n as f64;
    if r <= 1.0 {
        nf.sqrt()
    } else {
        ((r - 1.0) * nf * nf.ln()).sqrt() / a.sqrt()
    }
}
