//! Symmetric stable increments and the truncated-stable jump scheme.

use super::spec::validate_stable;
use crate::error::Result;
use rand::Rng;
use rand_distr::{Distribution, Exp1};
use statrs::function::gamma::gamma;
use std::f64::consts::{FRAC_PI_2, PI};

/// Standard symmetric β-stable variate, characteristic function `exp(-|u|^β)`,
/// by the Chambers–Mallows–Stuck transform.
pub(crate) fn standard_symmetric_stable<R: Rng + ?Sized>(beta: f64, rng: &mut R) -> f64 {
    // V uniform on the open interval (-π/2, π/2)
    let v = loop {
        let v = PI * (rng.random::<f64>() - 0.5);
        if v.abs() < FRAC_PI_2 {
            break v;
        }
    };
    if beta == 1.0 {
        return v.tan();
    }
    let w: f64 = Exp1.sample(rng);
    let cos_v = v.cos();
    (beta * v).sin() / cos_v.powf(1.0 / beta) * (((1.0 - beta) * v).cos() / w).powf((1.0 - beta) / beta)
}

/// One increment over a time step `dt` of the symmetric β-stable Lévy process
/// with characteristic exponent `(scale |u|)^β` per unit time.
pub fn sample_stable_increment<R: Rng + ?Sized>(beta: f64, scale: f64, dt: f64, rng: &mut R) -> Result<f64> {
    validate_stable(beta, scale)?;
    if !(dt > 0.0) {
        return Err(crate::Error::invalid("dt", "must be positive"));
    }
    if scale == 0.0 {
        return Ok(0.0);
    }
    Ok(scale * dt.powf(1.0 / beta) * standard_symmetric_stable(beta, rng))
}

/// Lévy density constant: the process with exponent `(scale |u|)^β` has Lévy
/// measure `c / |x|^{1+β} dx` with `c = scale^β Γ(1+β) sin(πβ/2) / π`.
pub fn stable_levy_constant(beta: f64, scale: f64) -> f64 {
    scale.powf(beta) * gamma(1.0 + beta) * (FRAC_PI_2 * beta).sin() / PI
}

/// Expected number of explicitly simulated small jumps per unit time for a
/// truncated-stable component.
pub const SMALL_JUMP_BUDGET: f64 = 16384.0;

/// Simulation scheme of a truncated-stable component: jumps with
/// `cutoff < |x| <= truncation` are simulated exactly as compound Poisson,
/// the remaining small jumps are replaced by a Gaussian of matching variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedStableScheme {
    pub levy_constant: f64,
    pub beta: f64,
    pub truncation: f64,
    pub cutoff: f64,
    /// Intensity of jumps with `|x| > cutoff`.
    pub intensity: f64,
    /// Variance per unit time of the Gaussian small-jump surrogate.
    pub small_jump_variance: f64,
}

impl TruncatedStableScheme {
    pub fn new(beta: f64, scale: f64, truncation: f64) -> Self {
        let c = stable_levy_constant(beta, scale);
        // 2c ε^{-β}/β = budget
        let budget_cutoff = (2.0 * c / (beta * SMALL_JUMP_BUDGET)).powf(1.0 / beta);
        let cutoff = budget_cutoff.min(truncation);
        let intensity = if c == 0.0 {
            0.0
        } else {
            2.0 * c * (cutoff.powf(-beta) - truncation.powf(-beta)) / beta
        };
        let small_jump_variance = 2.0 * c * cutoff.powf(2.0 - beta) / (2.0 - beta);
        Self {
            levy_constant: c,
            beta,
            truncation,
            cutoff,
            intensity,
            small_jump_variance,
        }
    }

    /// Whether the Gaussian surrogate is numerically negligible.
    pub fn surrogate_negligible(&self) -> bool {
        self.small_jump_variance < 1e-10
    }

    /// Jump size with `cutoff < |x| <= truncation`, by inverting the tail.
    pub fn sample_jump<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let lo = self.cutoff.powf(-self.beta);
        let hi = self.truncation.powf(-self.beta);
        let u: f64 = rng.random();
        let size = (lo - u * (lo - hi)).powf(-1.0 / self.beta);
        if rng.random::<bool>() {
            size
        } else {
            -size
        }
    }

    pub fn describe(&self) -> String {
        format!(
            "truncated-stable(beta={}, truncation={}): compound Poisson above cutoff {:.3e} \
             (intensity {:.3e}), Gaussian surrogate variance {:.3e} per unit time{}",
            self.beta,
            self.truncation,
            self.cutoff,
            self.intensity,
            self.small_jump_variance,
            if self.surrogate_negligible() { " (negligible)" } else { "" }
        )
    }
}
