use crate::error::{Error, Result};
use crate::estimators::EstimatorConfig;
use serde::{Deserialize, Serialize};

/// Power of `n` in the uniform rate of an estimator on the class of index `r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TheoryRate {
    /// Rate `n^exponent`, times `(log n)^exponent` when `log_factor` is set.
    Power { exponent: f64, log_factor: bool },
    /// No rate is known for this combination.
    Unknown { reason: String },
}

impl TheoryRate {
    pub fn exponent(&self) -> Option<f64> {
        match self {
            TheoryRate::Power { exponent, .. } => Some(*exponent),
            TheoryRate::Unknown { .. } => None,
        }
    }
}

/// Minimax rate `ρ_n`: `√n` for `r <= 1`, `(n log n)^{(2-r)/2}` otherwise.
pub fn minimax_rate(n: usize, r: f64) -> f64 {
    let nf = n as f64;
    if r <= 1.0 {
        nf.sqrt()
    } else {
        (nf * nf.ln()).powf((2.0 - r) / 2.0)
    }
}

/// Rate exponent implied by the uniform-rate results for `estimator` on the
/// class of index `r`. The realized estimator is only meaningful without
/// jumps, where its rate is `1/2`.
pub fn theoretical_exponent(r: f64, estimator: &EstimatorConfig) -> Result<TheoryRate> {
    if !(0.0..2.0).contains(&r) {
        return Err(Error::invalid("r", "must lie in [0, 2)"));
    }
    estimator.validate()?;
    let power = |exponent: f64, log_factor: bool| TheoryRate::Power { exponent, log_factor };
    Ok(match *estimator {
        EstimatorConfig::Realized => power(0.5, false),
        EstimatorConfig::Truncated { varpi, .. } => {
            if r >= 1.0 {
                power(varpi * (2.0 - r), false)
            } else if varpi >= 1.0 / (4.0 - 2.0 * r) {
                power(0.5, false)
            } else {
                TheoryRate::Unknown {
                    reason: format!("varpi = {varpi} is below 1/(4-2r) = {:.4} for r < 1", 1.0 / (4.0 - 2.0 * r)),
                }
            }
        }
        EstimatorConfig::Multipower { .. } => {
            if r < 1.0 {
                power(0.5, false)
            } else {
                TheoryRate::Unknown {
                    reason: "no rate is known for multipower variation when r >= 1".into(),
                }
            }
        }
        EstimatorConfig::Spectral { .. } => {
            if r <= 1.0 {
                power(0.5, false)
            } else {
                power((2.0 - r) / 2.0, true)
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::FreqRule;

    #[test]
    fn examples() {
        let t = theoretical_exponent(0.5, &EstimatorConfig::truncated(1.0 / 3.0)).unwrap();
        assert_eq!(t, TheoryRate::Power { exponent: 0.5, log_factor: false });
        let t = theoretical_exponent(0.5, &EstimatorConfig::truncated(0.45)).unwrap();
        assert_eq!(t.exponent(), Some(0.5));
        let t = theoretical_exponent(1.5, &EstimatorConfig::truncated(0.49)).unwrap();
        assert!((t.exponent().unwrap() - 0.245).abs() < 1e-15);
        let spectral = EstimatorConfig::Spectral {
            freq: FreqRule::Rate { r: 1.5, a: None },
        };
        assert_eq!(
            theoretical_exponent(1.5, &spectral).unwrap(),
            TheoryRate::Power { exponent: 0.25, log_factor: true }
        );
        assert_eq!(theoretical_exponent(0.8, &spectral).unwrap().exponent(), Some(0.5));
    }

    #[test]
    fn unknown_cases() {
        let mp = EstimatorConfig::Multipower { k: 2 };
        assert!(matches!(theoretical_exponent(1.0, &mp).unwrap(), TheoryRate::Unknown { .. }));
        assert!(matches!(theoretical_exponent(1.5, &mp).unwrap(), TheoryRate::Unknown { .. }));
        assert_eq!(theoretical_exponent(0.5, &mp).unwrap().exponent(), Some(0.5));
        assert!(matches!(
            theoretical_exponent(0.5, &EstimatorConfig::truncated(0.2)).unwrap(),
            TheoryRate::Unknown { .. }
        ));
        assert!(theoretical_exponent(2.0, &mp).is_err());
    }

    #[test]
    fn minimax_rate_branches() {
        assert_eq!(minimax_rate(100, 0.5), 10.0);
        let v = minimax_rate(100, 1.5);
        assert!((v - (100.0 * 100f64.ln()).powf(0.25)).abs() < 1e-12);
    }
}
