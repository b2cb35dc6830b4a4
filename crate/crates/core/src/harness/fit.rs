use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Least-squares fit of `log(median |error|)` on `log n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    /// `None` when the fit is degenerate.
    pub slope: Option<f64>,
    pub stderr: Option<f64>,
    pub intercept: Option<f64>,
    /// Some median error was zero (or not finite), so no log-log fit exists.
    pub degenerate: bool,
}

/// Ordinary least squares of `ln(medians)` on `ln(ns)`.
pub fn fit_rate(ns: &[usize], medians: &[f64]) -> Result<RateFit> {
    if ns.len() != medians.len() {
        return Err(Error::invalid("medians", "one median per grid point is required"));
    }
    if ns.len() < 3 {
        return Err(Error::invalid("n_grid", "slope fitting needs at least 3 points"));
    }
    if medians.iter().any(|m| !(*m > 0.0) || !m.is_finite()) {
        return Ok(RateFit {
            slope: None,
            stderr: None,
            intercept: None,
            degenerate: true,
        });
    }
    let x: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let y: Vec<f64> = medians.iter().map(|m| m.ln()).collect();
    let k = x.len() as f64;
    let mx = x.iter().sum::<f64>() / k;
    let my = y.iter().sum::<f64>() / k;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("n_grid", "grid points must differ"));
    }
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = x
        .iter()
        .zip(&y)
        .map(|(a, b)| {
            let e = b - intercept - slope * a;
            e * e
        })
        .sum();
    let stderr = (ssr / (k - 2.0) / sxx).sqrt();
    Ok(RateFit {
        slope: Some(slope),
        stderr: Some(stderr),
        intercept: Some(intercept),
        degenerate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use rand::Rng;

    #[test]
    fn exact_power_law() {
        let ns = [256, 512, 1024, 2048];
        let med: Vec<f64> = ns.iter().map(|&n| 3.0 * (n as f64).powf(-0.5)).collect();
        let f = fit_rate(&ns, &med).unwrap();
        assert!((f.slope.unwrap() + 0.5).abs() < 1e-12);
        assert!(f.stderr.unwrap() < 1e-12);
        assert!((f.intercept.unwrap() - 3f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn flat_medians() {
        let f = fit_rate(&[2, 4, 8], &[0.1, 0.1, 0.1]).unwrap();
        assert!(f.slope.unwrap().abs() < 1e-15);
    }

    #[test]
    fn noisy_synthetic() {
        let ns: Vec<usize> = (8..=13).map(|e| 1usize << e).collect();
        let mut rng = stream_rng(3, 0);
        for _ in 0..50 {
            let med: Vec<f64> = ns
                .iter()
                .map(|&n| 0.7 * (n as f64).powf(-0.245) * (1.0 + 0.01 * (2.0 * rng.random::<f64>() - 1.0)))
                .collect();
            let f = fit_rate(&ns, &med).unwrap();
            assert!((f.slope.unwrap() + 0.245).abs() < 0.02);
        }
    }

    #[test]
    fn degenerate_and_invalid() {
        let f = fit_rate(&[2, 4, 8], &[0.0, 0.1, 0.1]).unwrap();
        assert!(f.degenerate && f.slope.is_none());
        assert!(fit_rate(&[2, 4], &[0.1, 0.1]).is_err());
        assert!(fit_rate(&[2, 4, 8], &[0.1, 0.1]).is_err());
    }
}
