use super::spec::{JumpComponent, JumpLaw, ModelSpec, Volatility};
use super::stable::{standard_symmetric_stable, TruncatedStableScheme};
use crate::error::{Error, Result};
use crate::rng::{jump_stream, stream_rng, BROWNIAN_STREAM, VOLATILITY_STREAM};
use rand::Rng;
use rand_distr::{Distribution, Normal, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

/// Sub-steps per observation interval used for stochastic volatility.
pub const VOLATILITY_REFINEMENT: usize = 64;

/// Observations `X_0, X_{1/n}, ..., X_1`, plus the integrated volatility of the
/// realization when it is known (simulated paths).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePath {
    pub n: usize,
    pub values: Vec<f64>,
    pub true_c1: Option<f64>,
    pub seed: Option<u64>,
}

impl SamplePath {
    /// Wrap observed values; `n` is the number of intervals.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::invalid("values", "a path needs at least two observations"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("values", "observations must be finite"));
        }
        Ok(Self {
            n: values.len() - 1,
            values,
            true_c1: None,
            seed: None,
        })
    }

    /// `Δ_i X = X_{i/n} - X_{(i-1)/n}` for `i = 1..n`.
    pub fn increments(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        self.values.windows(2).map(|w| w[1] - w[0])
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.n as f64;
        (0..=self.n).map(move |i| i as f64 / n)
    }
}

/// Simulate `X` on the grid `i/n`, `i = 0..n`, starting from `X_0 = 0`.
///
/// Deterministic in `(model, n, seed)`; each model component draws from its own
/// stream (see [`crate::rng`]).
pub fn simulate_path(model: &ModelSpec, n: usize, seed: u64) -> Result<SamplePath> {
    if n == 0 {
        return Err(Error::invalid("n", "need at least one observation interval"));
    }
    model.validate()?;
    let dt = 1.0 / n as f64;
    let mut increments = vec![0.0; n];

    for (i, inc) in increments.iter_mut().enumerate() {
        *inc += model.drift.integral(i as f64 * dt, (i + 1) as f64 * dt);
    }

    let (interval_variance, true_c1) = integrated_variance(&model.volatility, n, seed);
    let mut brownian = stream_rng(seed, BROWNIAN_STREAM);
    for (inc, var) in increments.iter_mut().zip(&interval_variance) {
        let z: f64 = StandardNormal.sample(&mut brownian);
        *inc += var.sqrt() * z;
    }

    for (k, jump) in model.jumps.iter().enumerate() {
        let mut rng = stream_rng(seed, jump_stream(k));
        add_jumps(jump, &mut increments, &mut rng);
    }

    let mut values = Vec::with_capacity(n + 1);
    let mut x = 0.0;
    values.push(x);
    for inc in &increments {
        x += inc;
        values.push(x);
    }
    Ok(SamplePath {
        n,
        values,
        true_c1: Some(true_c1),
        seed: Some(seed),
    })
}

/// Per-interval `∫ c_s ds` and the total `C_1`.
fn integrated_variance(vol: &Volatility, n: usize, seed: u64) -> (Vec<f64>, f64) {
    let dt = 1.0 / n as f64;
    match *vol {
        Volatility::Constant { value } => (vec![value * dt; n], value),
        Volatility::Sine { .. } => {
            let per: Vec<f64> = (0..n)
                .map(|i| {
                    vol.integral(i as f64 * dt, (i + 1) as f64 * dt)
                        .expect("deterministic")
                        .max(0.0)
                })
                .collect();
            let total = vol.integral(0.0, 1.0).expect("deterministic").max(0.0);
            (per, total)
        }
        Volatility::Stochastic(sv) => {
            let mut rng = stream_rng(seed, VOLATILITY_STREAM);
            let h = dt / VOLATILITY_REFINEMENT as f64;
            let decay = (-sv.reversion * h).exp();
            let step_sd = sv.vol_of_vol * ((1.0 - decay * decay) / (2.0 * sv.reversion)).sqrt();
            let (log_floor, log_cap, log_mean) = (sv.floor.ln(), sv.cap.ln(), sv.mean.ln());
            let mut state = sv.initial.ln();
            let mut per = Vec::with_capacity(n);
            let mut total = 0.0;
            for _ in 0..n {
                let mut acc = 0.0;
                for _ in 0..VOLATILITY_REFINEMENT {
                    // left-point Riemann sum
                    acc += state.exp() * h;
                    let z: f64 = StandardNormal.sample(&mut rng);
                    state = (log_mean + (state - log_mean) * decay + step_sd * z).clamp(log_floor, log_cap);
                }
                total += acc;
                per.push(acc);
            }
            (per, total)
        }
    }
}

fn sample_law<R: Rng + ?Sized>(law: &JumpLaw, rng: &mut R) -> f64 {
    match *law {
        JumpLaw::Fixed { size } => size,
        JumpLaw::Symmetric { size } => {
            if rng.random::<bool>() {
                size
            } else {
                -size
            }
        }
        JumpLaw::Normal { mean, std } => {
            if std == 0.0 {
                mean
            } else {
                Normal::new(mean, std).expect("validated").sample(rng)
            }
        }
        JumpLaw::Uniform { low, high } => low + (high - low) * rng.random::<f64>(),
    }
}

/// Scatter a compound Poisson process with total intensity `intensity` over
/// `[0, 1]` into the observation intervals.
fn scatter_compound_poisson<R: Rng + ?Sized>(
    intensity: f64,
    increments: &mut [f64],
    rng: &mut R,
    mut size: impl FnMut(&mut R) -> f64,
) {
    if intensity <= 0.0 {
        return;
    }
    let n = increments.len();
    let count = Poisson::new(intensity).expect("positive intensity").sample(rng) as u64;
    for _ in 0..count {
        let t: f64 = rng.random();
        let bin = ((t * n as f64) as usize).min(n - 1);
        increments[bin] += size(rng);
    }
}

fn add_jumps<R: Rng + ?Sized>(jump: &JumpComponent, increments: &mut [f64], rng: &mut R) {
    let dt = 1.0 / increments.len() as f64;
    match *jump {
        JumpComponent::CompoundPoisson { intensity, law } => {
            scatter_compound_poisson(intensity, increments, rng, |r| sample_law(&law, r));
        }
        JumpComponent::SymmetricStable { beta, scale } => {
            if scale == 0.0 {
                return;
            }
            let factor = scale * dt.powf(1.0 / beta);
            for inc in increments.iter_mut() {
                *inc += factor * standard_symmetric_stable(beta, rng);
            }
        }
        JumpComponent::TruncatedStable {
            beta,
            scale,
            truncation,
        } => {
            if scale == 0.0 {
                return;
            }
            let scheme = TruncatedStableScheme::new(beta, scale, truncation);
            if scheme.small_jump_variance > 0.0 {
                let sd = (scheme.small_jump_variance * dt).sqrt();
                for inc in increments.iter_mut() {
                    let z: f64 = StandardNormal.sample(rng);
                    *inc += sd * z;
                }
            }
            scatter_compound_poisson(scheme.intensity, increments, rng, |r| scheme.sample_jump(r));
        }
    }
}
