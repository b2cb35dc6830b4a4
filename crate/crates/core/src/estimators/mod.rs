//! Estimators of the integrated volatility `C_1 = ∫_0^1 c_s ds`.

mod bias;
mod config;
mod spectral;
mod variation;

pub use bias::{check_bias_bound, levy_gamma, spectral_bias, BiasCheck};
pub use config::{EstimateResult, EstimatorConfig, FreqRule};
pub use spectral::{empirical_cf, spectral_estimator, spectral_frequency, DEGENERATE_MODULUS};
pub use variation::{gaussian_abs_moment, multipower, realized_volatility, truncated_rv, truncated_sum, truncation_level};

use crate::error::{Error, Result};
use crate::models::SamplePath;

/// Run the estimator described by `cfg` on `path`.
///
/// A spectral rule without `A` cannot be resolved here; the experiment harness
/// fills it in from the model.
pub fn estimate(path: &SamplePath, cfg: &EstimatorConfig) -> Result<EstimateResult> {
    cfg.validate()?;
    match *cfg {
        EstimatorConfig::Realized => Ok(realized_volatility(path)),
        EstimatorConfig::Truncated { .. } => truncated_rv(path, cfg),
        EstimatorConfig::Multipower { .. } => multipower(path, cfg),
        EstimatorConfig::Spectral { freq } => {
            let u = match freq {
                FreqRule::Explicit { u } => u,
                FreqRule::Rate { r, a: Some(a) } => spectral_frequency(path.n, r, a),
                FreqRule::Rate { a: None, .. } => {
                    return Err(Error::config("spectral rate rule needs an explicit A outside an experiment"))
                }
            };
            spectral_estimator(path, u)
        }
    }
}
