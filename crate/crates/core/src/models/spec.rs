use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Drift coefficient `b_t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Drift {
    Constant { value: f64 },
    /// `level + amplitude * sin(2π frequency t)`
    Sine {
        level: f64,
        amplitude: f64,
        frequency: f64,
    },
}

impl Default for Drift {
    fn default() -> Self {
        Drift::Constant { value: 0.0 }
    }
}

impl Drift {
    pub fn value_at(&self, t: f64) -> f64 {
        match *self {
            Drift::Constant { value } => value,
            Drift::Sine {
                level,
                amplitude,
                frequency,
            } => level + amplitude * (2.0 * PI * frequency * t).sin(),
        }
    }

    /// `∫_{t0}^{t1} b_s ds`
    pub fn integral(&self, t0: f64, t1: f64) -> f64 {
        match *self {
            Drift::Constant { value } => value * (t1 - t0),
            Drift::Sine {
                level,
                amplitude,
                frequency,
            } => level * (t1 - t0) + sine_integral(amplitude, frequency, t0, t1),
        }
    }

    pub fn sup_abs(&self) -> f64 {
        match *self {
            Drift::Constant { value } => value.abs(),
            Drift::Sine {
                level, amplitude, ..
            } => level.abs() + amplitude.abs(),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Drift::Constant { value } => finite("drift.value", value),
            Drift::Sine {
                level,
                amplitude,
                frequency,
            } => {
                finite("drift.level", level)?;
                finite("drift.amplitude", amplitude)?;
                finite("drift.frequency", frequency)
            }
        }
    }
}

fn sine_integral(amplitude: f64, frequency: f64, t0: f64, t1: f64) -> f64 {
    if frequency == 0.0 || amplitude == 0.0 {
        return 0.0;
    }
    let w = 2.0 * PI * frequency;
    -amplitude / w * ((w * t1).cos() - (w * t0).cos())
}

/// Bounded mean-reverting squared volatility: an Ornstein–Uhlenbeck process on
/// `log c` whose state is clipped to `[floor, cap]` after every step, so that
/// `sup c <= cap` holds pathwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogOuVolatility {
    pub initial: f64,
    /// Long-run level of `c` (the OU mean is `ln mean`).
    pub mean: f64,
    pub reversion: f64,
    pub vol_of_vol: f64,
    pub floor: f64,
    pub cap: f64,
}

/// Squared volatility `c_t = σ_t²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Volatility {
    Constant { value: f64 },
    /// `level + amplitude * sin(2π frequency t)`, requires `level >= |amplitude|`.
    Sine {
        level: f64,
        amplitude: f64,
        frequency: f64,
    },
    Stochastic(LogOuVolatility),
}

impl Default for Volatility {
    fn default() -> Self {
        Volatility::Constant { value: 1.0 }
    }
}

impl Volatility {
    pub fn is_deterministic(&self) -> bool {
        !matches!(self, Volatility::Stochastic(_))
    }

    /// `∫_{t0}^{t1} c_s ds` for deterministic volatility.
    pub fn integral(&self, t0: f64, t1: f64) -> Option<f64> {
        match *self {
            Volatility::Constant { value } => Some(value * (t1 - t0)),
            Volatility::Sine {
                level,
                amplitude,
                frequency,
            } => Some(level * (t1 - t0) + sine_integral(amplitude, frequency, t0, t1)),
            Volatility::Stochastic(_) => None,
        }
    }

    pub fn sup(&self) -> f64 {
        match *self {
            Volatility::Constant { value } => value,
            Volatility::Sine {
                level, amplitude, ..
            } => level + amplitude.abs(),
            Volatility::Stochastic(sv) => sv.cap,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Volatility::Constant { value } => {
                finite("volatility.value", value)?;
                if value < 0.0 {
                    return Err(Error::invalid("volatility.value", "must be nonnegative"));
                }
            }
            Volatility::Sine {
                level,
                amplitude,
                frequency,
            } => {
                finite("volatility.level", level)?;
                finite("volatility.amplitude", amplitude)?;
                finite("volatility.frequency", frequency)?;
                if level < amplitude.abs() {
                    return Err(Error::invalid(
                        "volatility.level",
                        "level must dominate |amplitude| so that c_t >= 0",
                    ));
                }
            }
            Volatility::Stochastic(sv) => {
                for (name, v) in [
                    ("volatility.initial", sv.initial),
                    ("volatility.mean", sv.mean),
                    ("volatility.reversion", sv.reversion),
                    ("volatility.vol_of_vol", sv.vol_of_vol),
                    ("volatility.floor", sv.floor),
                    ("volatility.cap", sv.cap),
                ] {
                    finite(name, v)?;
                }
                if !(sv.floor > 0.0 && sv.floor <= sv.cap) {
                    return Err(Error::invalid("volatility.floor", "need 0 < floor <= cap"));
                }
                if !(sv.mean > 0.0) || !(sv.reversion > 0.0) || sv.vol_of_vol < 0.0 {
                    return Err(Error::invalid(
                        "volatility",
                        "need mean > 0, reversion > 0 and vol_of_vol >= 0",
                    ));
                }
                if sv.initial < sv.floor || sv.initial > sv.cap {
                    return Err(Error::invalid("volatility.initial", "must lie in [floor, cap]"));
                }
            }
        }
        Ok(())
    }
}

/// Jump-size distribution of a compound Poisson component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum JumpLaw {
    /// Every jump equals `size`.
    Fixed { size: f64 },
    /// `±size` with probability 1/2 each.
    Symmetric { size: f64 },
    Normal { mean: f64, std: f64 },
    Uniform { low: f64, high: f64 },
}

impl JumpLaw {
    fn validate(&self) -> Result<()> {
        match *self {
            JumpLaw::Fixed { size } | JumpLaw::Symmetric { size } => finite("law.size", size),
            JumpLaw::Normal { mean, std } => {
                finite("law.mean", mean)?;
                finite("law.std", std)?;
                if std < 0.0 {
                    return Err(Error::invalid("law.std", "must be nonnegative"));
                }
                Ok(())
            }
            JumpLaw::Uniform { low, high } => {
                finite("law.low", low)?;
                finite("law.high", high)?;
                if low > high {
                    return Err(Error::invalid("law.low", "must not exceed law.high"));
                }
                Ok(())
            }
        }
    }

    /// `E[J²]`
    pub fn second_moment(&self) -> f64 {
        match *self {
            JumpLaw::Fixed { size } | JumpLaw::Symmetric { size } => size * size,
            JumpLaw::Normal { mean, std } => mean * mean + std * std,
            JumpLaw::Uniform { low, high } => (low * low + low * high + high * high) / 3.0,
        }
    }
}

/// One independent jump component of the Lévy system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum JumpComponent {
    CompoundPoisson { intensity: f64, law: JumpLaw },
    /// Symmetric β-stable Lévy process; its increment over `dt` has
    /// characteristic function `exp(-dt (scale |u|)^β)`.
    SymmetricStable { beta: f64, scale: f64 },
    /// The symmetric stable Lévy measure restricted to `|x| <= truncation`.
    TruncatedStable {
        beta: f64,
        scale: f64,
        truncation: f64,
    },
}

impl JumpComponent {
    pub fn validate(&self) -> Result<()> {
        match *self {
            JumpComponent::CompoundPoisson { intensity, law } => {
                finite("intensity", intensity)?;
                if intensity < 0.0 {
                    return Err(Error::invalid("intensity", "must be nonnegative"));
                }
                law.validate()
            }
            JumpComponent::SymmetricStable { beta, scale } => validate_stable(beta, scale),
            JumpComponent::TruncatedStable {
                beta,
                scale,
                truncation,
            } => {
                validate_stable(beta, scale)?;
                if !(truncation > 0.0) || !truncation.is_finite() {
                    return Err(Error::invalid("truncation", "must be positive and finite"));
                }
                Ok(())
            }
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            JumpComponent::CompoundPoisson { .. } => "compound-poisson",
            JumpComponent::SymmetricStable { .. } => "symmetric-stable",
            JumpComponent::TruncatedStable { .. } => "truncated-stable",
        }
    }
}

pub(crate) fn validate_stable(beta: f64, scale: f64) -> Result<()> {
    if !(beta > 0.0 && beta < 2.0) {
        return Err(Error::invalid("stable_index", format!("{beta} is outside (0, 2)")));
    }
    if !(scale >= 0.0) || !scale.is_finite() {
        return Err(Error::invalid("scale", "must be nonnegative and finite"));
    }
    Ok(())
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, "must be finite"))
    }
}

/// A simulable Itô semimartingale together with the class parameters `(r, A)`
/// it is meant to belong to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub drift: Drift,
    pub volatility: Volatility,
    pub jumps: Vec<JumpComponent>,
    pub class_r: f64,
    pub class_a: f64,
}

impl Default for ModelSpec {
    fn default() -> Self {
        Self::brownian(1.0)
    }
}

impl ModelSpec {
    /// Driftless continuous model with constant squared volatility `c`.
    pub fn brownian(c: f64) -> Self {
        Self {
            drift: Drift::default(),
            volatility: Volatility::Constant { value: c },
            jumps: Vec::new(),
            class_r: 0.0,
            class_a: c.max(1.0),
        }
    }

    pub fn with_drift(mut self, drift: Drift) -> Self {
        self.drift = drift;
        self
    }

    pub fn with_volatility(mut self, volatility: Volatility) -> Self {
        self.volatility = volatility;
        self
    }

    pub fn with_jump(mut self, jump: JumpComponent) -> Self {
        self.jumps.push(jump);
        self
    }

    pub fn with_class(mut self, r: f64, a: f64) -> Self {
        self.class_r = r;
        self.class_a = a;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.drift.validate()?;
        self.volatility.validate()?;
        for j in &self.jumps {
            j.validate()?;
        }
        if !(0.0..2.0).contains(&self.class_r) {
            return Err(Error::invalid("class.r", "must lie in [0, 2)"));
        }
        if !(self.class_a > 0.0) || !self.class_a.is_finite() {
            return Err(Error::invalid("class.A", "must be positive and finite"));
        }
        Ok(())
    }

    /// `true` when every component is time-homogeneous (a Lévy process).
    pub fn is_levy(&self) -> bool {
        matches!(self.drift, Drift::Constant { .. })
            && matches!(self.volatility, Volatility::Constant { .. })
    }
}
