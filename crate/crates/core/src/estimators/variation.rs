use super::config::{EstimateResult, EstimatorConfig};
use crate::error::{Error, Result};
use crate::models::SamplePath;
use statrs::function::gamma::gamma;
use std::f64::consts::PI;

/// `Σ (Δ_i X)²`
pub fn realized_volatility(path: &SamplePath) -> EstimateResult {
    EstimateResult::plain(path.increments().map(|d| d * d).sum(), None)
}

/// `Σ (Δ_i X)² 1{|Δ_i X| <= v}` for an explicit threshold `v`.
pub fn truncated_sum(path: &SamplePath, threshold: f64) -> f64 {
    path.increments().filter(|d| d.abs() <= threshold).map(|d| d * d).sum()
}

/// Truncation level `v_n = trunc_scale * n^{-varpi}`.
pub fn truncation_level(n: usize, varpi: f64, trunc_scale: f64) -> f64 {
    trunc_scale * (n as f64).powf(-varpi)
}

/// Truncated realized volatility with `v_n = trunc_scale * n^{-varpi}`.
pub fn truncated_rv(path: &SamplePath, cfg: &EstimatorConfig) -> Result<EstimateResult> {
    let EstimatorConfig::Truncated { .. } = cfg else {
        return Err(Error::invalid("variant", "truncated_rv needs a truncated config"));
    };
    cfg.validate()?;
    let EstimatorConfig::Truncated { varpi, trunc_scale } = *cfg else {
        unreachable!()
    };
    let v = truncation_level(path.n, varpi, trunc_scale);
    Ok(EstimateResult::plain(truncated_sum(path, v), Some(v)))
}

/// `m_p = E|U|^p = 2^{p/2} Γ((p+1)/2) / √π` for standard normal `U`.
pub fn gaussian_abs_moment(p: f64) -> Result<f64> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::invalid("p", "moment order must be positive"));
    }
    Ok(2f64.powf(p / 2.0) * gamma((p + 1.0) / 2.0) / PI.sqrt())
}

/// Multipower variation with equal powers `2/k`, normalized by `m_{2/k}^k`.
pub fn multipower(path: &SamplePath, cfg: &EstimatorConfig) -> Result<EstimateResult> {
    let EstimatorConfig::Multipower { k } = *cfg else {
        return Err(Error::invalid("variant", "multipower needs a multipower config"));
    };
    cfg.validate()?;
    if path.n < k {
        return Err(Error::invalid(
            "path",
            format!("{} increments are fewer than the order k = {k}", path.n),
        ));
    }
    let p = 2.0 / k as f64;
    let powered: Vec<f64> = if k == 2 {
        path.increments().map(f64::abs).collect()
    } else {
        path.increments().map(|d| d.abs().powf(p)).collect()
    };
    let sum: f64 = powered.windows(k).map(|w| w.iter().product::<f64>()).sum();
    let norm = gaussian_abs_moment(p)?.powi(k as i32);
    Ok(EstimateResult::plain(sum / norm, Some(k as f64)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(v: &[f64]) -> SamplePath {
        SamplePath::from_values(v.to_vec()).unwrap()
    }

    #[test]
    fn realized_direct_sum() {
        assert_eq!(realized_volatility(&path(&[0.0, 1.0, 0.0, 2.0])).value, 6.0);
        assert_eq!(realized_volatility(&path(&[3.0; 10])).value, 0.0);
    }

    #[test]
    fn truncation_drops_large_increment() {
        let p = path(&[0.0, 1.0, 0.0, 2.0]);
        assert_eq!(truncated_sum(&p, 1.5), 2.0);
        assert_eq!(truncated_sum(&p, 10.0), realized_volatility(&p).value);
        let r = truncated_rv(&p, &EstimatorConfig::Truncated { varpi: 0.25, trunc_scale: 10.0 }).unwrap();
        assert_eq!(r.value, 6.0);
        assert!((r.tuning_used.unwrap() - 10.0 * 3f64.powf(-0.25)).abs() < 1e-15);
    }

    #[test]
    fn truncated_rejects_bad_varpi() {
        let p = path(&[0.0, 1.0]);
        for varpi in [0.0, 0.5, -0.1, 0.7] {
            assert!(truncated_rv(&p, &EstimatorConfig::truncated(varpi)).is_err());
        }
        assert!(truncated_rv(&p, &EstimatorConfig::Realized).is_err());
    }

    #[test]
    fn bipower_example() {
        let r = multipower(&path(&[0.0, 1.0, 2.0, 4.0]), &EstimatorConfig::Multipower { k: 2 }).unwrap();
        assert!((r.value - 1.5 * PI).abs() < 1e-12, "{}", r.value);
        let r = multipower(&path(&[1.0; 6]), &EstimatorConfig::Multipower { k: 3 }).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn multipower_errors() {
        assert!(multipower(&path(&[0.0, 1.0]), &EstimatorConfig::Multipower { k: 1 }).is_err());
        assert!(multipower(&path(&[0.0, 1.0, 2.0]), &EstimatorConfig::Multipower { k: 3 }).is_err());
    }

    #[test]
    fn gaussian_moments() {
        assert!((gaussian_abs_moment(2.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((gaussian_abs_moment(1.0).unwrap() - (2.0 / PI).sqrt()).abs() < 1e-14);
        assert!((gaussian_abs_moment(4.0).unwrap() - 3.0).abs() < 1e-13);
        // (2k-1)!!
        let mut dfact = 1.0;
        for k in 1..=8 {
            dfact *= (2 * k - 1) as f64;
            let m = gaussian_abs_moment(2.0 * k as f64).unwrap();
            assert!((m - dfact).abs() < 1e-12 * dfact);
        }
        assert!(gaussian_abs_moment(0.0).is_err());
        assert!(gaussian_abs_moment(-1.0).is_err());
    }

    #[test]
    fn abs_moment_monte_carlo() {
        use crate::rng::stream_rng;
        use rand_distr::{Distribution, StandardNormal};
        let mut rng = stream_rng(11, 0);
        let m: f64 = (0..1_000_000)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                z.abs()
            })
            .sum::<f64>()
            / 1e6;
        assert!((m - gaussian_abs_moment(1.0).unwrap()).abs() < 0.003);
    }
}
