use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Frequency used by the spectral estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum FreqRule {
    Explicit { u: f64 },
    /// `u_n = √n` for `r <= 1`, `√((r-1) n log n / A)` otherwise. `a = None`
    /// asks the experiment harness to take `A` from the model's class check.
    Rate { r: f64, a: Option<f64> },
}

/// Which estimator to run, with its tuning.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "kebab-case")]
pub enum EstimatorConfig {
    Realized,
    /// Threshold `v_n = trunc_scale * n^{-varpi}`.
    Truncated { varpi: f64, trunc_scale: f64 },
    Multipower { k: usize },
    Spectral { freq: FreqRule },
}

impl EstimatorConfig {
    pub fn truncated(varpi: f64) -> Self {
        EstimatorConfig::Truncated { varpi, trunc_scale: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            EstimatorConfig::Realized => Ok(()),
            EstimatorConfig::Truncated { varpi, trunc_scale } => {
                if !(varpi > 0.0 && varpi < 0.5) {
                    return Err(Error::invalid("varpi", format!("{varpi} is outside (0, 1/2)")));
                }
                if !(trunc_scale > 0.0) || !trunc_scale.is_finite() {
                    return Err(Error::invalid("trunc_scale", "must be positive"));
                }
                Ok(())
            }
            EstimatorConfig::Multipower { k } => {
                if k < 2 {
                    return Err(Error::invalid("k", "multipower order must be at least 2"));
                }
                Ok(())
            }
            EstimatorConfig::Spectral { freq } => match freq {
                FreqRule::Explicit { u } if !(u > 0.0) || !u.is_finite() => {
                    Err(Error::invalid("u", "spectral frequency must be positive"))
                }
                FreqRule::Rate { r, .. } if !(0.0..2.0).contains(&r) => {
                    Err(Error::invalid("spectral.r", "must lie in [0, 2)"))
                }
                FreqRule::Rate { a: Some(a), .. } if !(a > 0.0) => {
                    Err(Error::invalid("spectral.a", "must be positive"))
                }
                _ => Ok(()),
            },
        }
    }

    pub fn variant_name(&self) -> &'static str {
        match self {
            EstimatorConfig::Realized => "realized",
            EstimatorConfig::Truncated { .. } => "truncated",
            EstimatorConfig::Multipower { .. } => "multipower",
            EstimatorConfig::Spectral { .. } => "spectral",
        }
    }

    /// Short label including the tuning, used as the estimator column in CSV output.
    pub fn label(&self) -> String {
        match *self {
            EstimatorConfig::Realized => "realized".into(),
            EstimatorConfig::Truncated { varpi, trunc_scale } => {
                format!("truncated(varpi={varpi};scale={trunc_scale})")
            }
            EstimatorConfig::Multipower { k } => format!("multipower(k={k})"),
            EstimatorConfig::Spectral { freq } => match freq {
                FreqRule::Explicit { u } => format!("spectral(u={u})"),
                FreqRule::Rate { r, a: Some(a) } => format!("spectral(r={r};A={a})"),
                FreqRule::Rate { r, a: None } => format!("spectral(r={r};A=auto)"),
            },
        }
    }
}

/// Estimate of `C_1` and the tuning quantity it used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub value: f64,
    /// `v_n`, `u_n` or `k`; `None` for realized volatility.
    pub tuning_used: Option<f64>,
    /// Set when the empirical characteristic function vanished.
    pub degenerate: bool,
}

impl EstimateResult {
    pub(crate) fn plain(value: f64, tuning_used: Option<f64>) -> Self {
        Self {
            value,
            tuning_used,
            degenerate: false,
        }
    }
}
