//! Jump-induced bias `γ/u²` of the spectral estimator, with
//! `γ = 2∫(1 - cos(ux)) F(dx)`.

use crate::error::{Error, Result};
use crate::models::{levy_r_mass, stable_levy_constant, JumpComponent, JumpLaw};
use crate::quadrature::Adaptive;
use serde::{Deserialize, Serialize};

/// `γ/u²` summed over the Lévy components.
pub fn spectral_bias(levy: &[JumpComponent], u: f64) -> Result<f64> {
    if !(u > 0.0) || !u.is_finite() {
        return Err(Error::invalid("u", "must be positive"));
    }
    let mut gamma = 0.0;
    for j in levy {
        gamma += levy_gamma(j, u)?;
    }
    Ok(gamma / (u * u))
}

/// `γ = 2∫(1 - cos(ux)) F(dx)` for one component.
pub fn levy_gamma(jump: &JumpComponent, u: f64) -> Result<f64> {
    jump.validate()?;
    match *jump {
        JumpComponent::CompoundPoisson { intensity, law } => Ok(2.0 * intensity * one_minus_cf(&law, u)),
        JumpComponent::SymmetricStable { beta, scale } => stable_gamma(beta, scale, f64::INFINITY, u),
        JumpComponent::TruncatedStable {
            beta,
            scale,
            truncation,
        } => stable_gamma(beta, scale, truncation, u),
    }
}

/// `1 - E cos(uJ)`
fn one_minus_cf(law: &JumpLaw, u: f64) -> f64 {
    let half_sin_sq = |x: f64| 2.0 * (0.5 * u * x).sin().powi(2);
    match *law {
        JumpLaw::Fixed { size } | JumpLaw::Symmetric { size } => half_sin_sq(size),
        JumpLaw::Normal { mean, std } => {
            let damp = (-0.5 * (u * std).powi(2)).exp();
            // 1 - cos(uμ) e^{-u²σ²/2} = (1 - e^{..}) + e^{..}(1 - cos(uμ))
            -(-0.5 * (u * std).powi(2)).exp_m1() + damp * half_sin_sq(mean)
        }
        JumpLaw::Uniform { low, high } => {
            if high == low {
                half_sin_sq(low)
            } else {
                1.0 - ((u * high).sin() - (u * low).sin()) / (u * (high - low))
            }
        }
    }
}

/// `4c u^β ∫_0^{uT} (1 - cos y) y^{-1-β} dy` for Lévy density `c|x|^{-1-β}` on `|x| <= T`.
fn stable_gamma(beta: f64, scale: f64, truncation: f64, u: f64) -> Result<f64> {
    let c = stable_levy_constant(beta, scale);
    if c == 0.0 {
        return Ok(0.0);
    }
    Ok(4.0 * c * u.powf(beta) * one_minus_cos_power(beta, u * truncation)?)
}

/// `∫_0^Y (1 - cos y) y^{-1-β} dy`, `0 < β < 2`, `Y` possibly infinite.
fn one_minus_cos_power(beta: f64, upper: f64) -> Result<f64> {
    let q = Adaptive::new(1e-15, 1e-12);
    // [0, min(1, Y)] with y = s^m, which makes the integrand ~ s^{m(2-β)-1}
    let m = (2.0 / (2.0 - beta)).ceil();
    let inner_end = upper.min(1.0);
    let inner = q
        .integrate(
            |s: f64| {
                if s == 0.0 {
                    return if m * (2.0 - beta) - 1.0 == 0.0 { 0.5 * m } else { 0.0 };
                }
                let y = s.powf(m);
                let half = (0.5 * y).sin() / y;
                2.0 * half * half * m * s.powf(m * (2.0 - beta) - 1.0)
            },
            0.0,
            inner_end.powf(1.0 / m),
        )?
        .value;
    if upper <= 1.0 {
        return Ok(inner);
    }
    // ∫_1^Y y^{-1-β} dy - ∫_1^Y cos(y) y^{-1-β} dy
    let power = (1.0 - upper.powf(-beta)) / beta;
    let g = |y: f64| y.powf(-1.0 - beta);
    let mut oscillating = q.cosine_tail(g, 1.0, 1.0)?.value;
    if upper.is_finite() {
        oscillating -= q.cosine_tail(g, upper, 1.0)?.value;
    }
    Ok(inner + power - oscillating)
}

/// Outcome of the check `0 <= γ/u² <= 2A/u^{2-r}` (valid for `u >= 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiasCheck {
    pub u: f64,
    pub r: f64,
    pub a: f64,
    pub bias: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Compare the spectral bias with its guaranteed bound for a component list in
/// the class `(r, a)`. Fails if the components do not satisfy the class bound.
pub fn check_bias_bound(levy: &[JumpComponent], u: f64, r: f64, a: f64) -> Result<BiasCheck> {
    if u < 1.0 {
        return Err(Error::invalid("u", "the bias bound needs u >= 1"));
    }
    let mass = levy
        .iter()
        .map(|j| levy_r_mass(j, r))
        .collect::<Result<Vec<_>>>()?
        .iter()
        .sum::<f64>();
    if !(mass <= a) {
        return Err(Error::ClassMembership(format!(
            "levy r-mass {mass} exceeds A = {a} at r = {r}"
        )));
    }
    let bias = spectral_bias(levy, u)?;
    let bound = 2.0 * a / u.powf(2.0 - r);
    Ok(BiasCheck {
        u,
        r,
        a,
        bias,
        bound,
        holds: bias >= 0.0 && bias <= bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn no_jumps_no_bias() {
        assert_eq!(spectral_bias(&[], 3.0).unwrap(), 0.0);
    }

    #[test]
    fn two_atom_closed_form() {
        let cp = JumpComponent::CompoundPoisson {
            intensity: 1.0,
            law: JumpLaw::Symmetric { size: 1.0 },
        };
        let b = spectral_bias(&[cp], PI).unwrap();
        assert!((b - 4.0 / (PI * PI)).abs() < 1e-14);
    }

    #[test]
    fn stable_gamma_matches_exponent() {
        // the full stable exponent is (s|u|)^β, so γ = 2 (s u)^β
        for &(beta, scale) in &[(0.5, 1.0), (1.0, 0.7), (1.5, 1.0), (1.9, 0.3)] {
            let jump = JumpComponent::SymmetricStable { beta, scale };
            for u in [0.5, 3.0, 40.0] {
                let g = levy_gamma(&jump, u).unwrap();
                let closed = 2.0 * (scale * u).powf(beta);
                assert!((g - closed).abs() < 1e-8 * closed, "beta={beta} u={u}: {g} vs {closed}");
            }
        }
    }

    #[test]
    fn truncated_stable_below_untruncated() {
        let full = JumpComponent::SymmetricStable { beta: 1.2, scale: 1.0 };
        let cut = JumpComponent::TruncatedStable {
            beta: 1.2,
            scale: 1.0,
            truncation: 0.5,
        };
        for u in [1.0, 10.0, 100.0] {
            let gf = levy_gamma(&full, u).unwrap();
            let gc = levy_gamma(&cut, u).unwrap();
            assert!(gc > 0.0 && gc < gf);
            // the missing mass is 4c∫_T^∞ (1 - cos ux) x^{-1-β} dx <= 8c T^{-β}/β
            let c = stable_levy_constant(1.2, 1.0);
            assert!(gf - gc <= 8.0 * c * 0.5f64.powf(-1.2) / 1.2 + 1e-9);
        }
    }

    #[test]
    fn normal_law_closed_form() {
        let cp = JumpComponent::CompoundPoisson {
            intensity: 2.0,
            law: JumpLaw::Normal { mean: 0.5, std: 0.2 },
        };
        let u = 3.0;
        let expected = 4.0 * (1.0 - (u * 0.5f64).cos() * (-0.5 * (u * 0.2f64).powi(2)).exp());
        assert!((levy_gamma(&cp, u).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn bound_holds_for_stable() {
        let jump = [JumpComponent::SymmetricStable { beta: 1.5, scale: 1.0 }];
        let a = levy_r_mass(&jump[0], 1.6).unwrap();
        for u in [10.0, 100.0, 1000.0] {
            let check = check_bias_bound(&jump, u, 1.6, a).unwrap();
            assert!(check.holds, "{check:?}");
        }
        assert!(check_bias_bound(&jump, 10.0, 1.6, a * 0.5).is_err());
        assert!(check_bias_bound(&jump, 10.0, 1.4, 1e9).is_err());
    }
}
