//! Membership in the bounded class of semimartingales with
//! `|b_t| + c_t + ∫(|x|^r ∧ 1) F_t(dx) <= A`.

use super::spec::{JumpComponent, JumpLaw, ModelSpec};
use super::stable::stable_levy_constant;
use crate::error::{Error, Result};
use crate::quadrature::Adaptive;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub r: f64,
    pub a: f64,
    pub drift_sup: f64,
    pub volatility_sup: f64,
    /// `∫(|x|^r ∧ 1) F(dx)` per jump component; `+inf` when divergent.
    pub levy_terms: Vec<f64>,
    pub levy_integral: f64,
    /// `sup|b| + sup c + ∫(|x|^r ∧ 1) F(dx)`, the smallest passing `A`.
    pub total: f64,
    pub drift_ok: bool,
    pub volatility_ok: bool,
    pub levy_ok: bool,
    pub passes: bool,
}

impl ClassReport {
    pub fn summary(&self) -> String {
        format!(
            "class (r={}, A={}): sup|b|={:.6} [{}], sup c={:.6} [{}], levy integral={:.6} [{}], total={:.6} [{}]",
            self.r,
            self.a,
            self.drift_sup,
            ok(self.drift_ok),
            self.volatility_sup,
            ok(self.volatility_ok),
            self.levy_integral,
            ok(self.levy_ok),
            self.total,
            ok(self.passes)
        )
    }
}

fn ok(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "FAIL"
    }
}

/// Check `model` against the class with parameters `(r, a)`.
///
/// Quadrature failures are returned as errors, never as a pass.
pub fn verify_class_membership(model: &ModelSpec, r: f64, a: f64) -> Result<ClassReport> {
    if !(0.0..=2.0).contains(&r) {
        return Err(Error::invalid("r", "must lie in [0, 2]"));
    }
    if !(a > 0.0) {
        return Err(Error::invalid("A", "must be positive"));
    }
    model.validate()?;
    let drift_sup = model.drift.sup_abs();
    let volatility_sup = model.volatility.sup();
    let levy_terms = model
        .jumps
        .iter()
        .map(|j| levy_r_mass(j, r))
        .collect::<Result<Vec<_>>>()?;
    let levy_integral: f64 = levy_terms.iter().sum();
    let total = drift_sup + volatility_sup + levy_integral;
    Ok(ClassReport {
        r,
        a,
        drift_sup,
        volatility_sup,
        levy_terms,
        levy_integral,
        total,
        drift_ok: drift_sup <= a,
        volatility_ok: volatility_sup <= a,
        levy_ok: levy_integral <= a,
        passes: total <= a,
    })
}

/// Smallest `A` for which `model` lies in the class of index `r`.
pub fn minimal_class_bound(model: &ModelSpec, r: f64) -> Result<f64> {
    Ok(verify_class_membership(model, r, 1.0)?.total)
}

fn quad() -> Adaptive {
    Adaptive::new(1e-14, 1e-12)
}

/// `∫(|x|^r ∧ 1) F(dx)` for one jump component.
pub fn levy_r_mass(jump: &JumpComponent, r: f64) -> Result<f64> {
    jump.validate()?;
    match *jump {
        JumpComponent::CompoundPoisson { intensity, law } => Ok(intensity * law_r_moment(&law, r)?),
        JumpComponent::SymmetricStable { beta, scale } => stable_r_mass(beta, scale, f64::INFINITY, r),
        JumpComponent::TruncatedStable {
            beta,
            scale,
            truncation,
        } => stable_r_mass(beta, scale, truncation, r),
    }
}

fn r_weight(x: f64, r: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.abs().powf(r).min(1.0)
    }
}

/// `E(|J|^r ∧ 1)`, a jump of size zero counting as no jump.
fn law_r_moment(law: &JumpLaw, r: f64) -> Result<f64> {
    match *law {
        JumpLaw::Fixed { size } | JumpLaw::Symmetric { size } => Ok(r_weight(size, r)),
        JumpLaw::Normal { mean, std } => {
            if std == 0.0 {
                return Ok(r_weight(mean, r));
            }
            let (lo, hi) = (mean - 40.0 * std, mean + 40.0 * std);
            let density = |x: f64| {
                let z = (x - mean) / std;
                (-0.5 * z * z).exp() / (std * (2.0 * std::f64::consts::PI).sqrt())
            };
            integrate_with_kinks(|x| r_weight(x, r) * density(x), lo, hi)
        }
        JumpLaw::Uniform { low, high } => {
            if high == low {
                return Ok(r_weight(low, r));
            }
            let v = integrate_with_kinks(|x| r_weight(x, r), low, high)?;
            Ok(v / (high - low))
        }
    }
}

fn integrate_with_kinks<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> Result<f64> {
    let mut points = vec![lo];
    points.extend([-1.0, 0.0, 1.0].into_iter().filter(|&k| k > lo && k < hi));
    points.push(hi);
    Ok(quad().integrate_breaks(f, &points)?.value)
}

/// `2c [∫_0^{min(1,T)} x^{r-1-β} dx + ∫_1^T x^{-1-β} dx]` by quadrature after the
/// substitutions `x = L e^{-s}` (inner part) and `x = e^{s}` (outer part).
fn stable_r_mass(beta: f64, scale: f64, truncation: f64, r: f64) -> Result<f64> {
    let c = stable_levy_constant(beta, scale);
    if c == 0.0 {
        return Ok(0.0);
    }
    let inner_end = truncation.min(1.0);
    let p = r - beta;
    if p <= 0.0 {
        // ∫_0 x^{r-1-β} dx diverges at the origin
        return Ok(f64::INFINITY);
    }
    let q = quad();
    // ∫_0^L x^{p-1} dx = L^p ∫_0^∞ e^{-p s} ds
    let inner = q.integrate_to_infinity(|s: f64| (-p * s).exp(), 0.0)?.value * inner_end.powf(p);
    let outer = if truncation <= 1.0 {
        0.0
    } else if truncation.is_infinite() {
        q.integrate_to_infinity(|s: f64| (-beta * s).exp(), 0.0)?.value
    } else {
        q.integrate(|x: f64| x.powf(-1.0 - beta), 1.0, truncation)?.value
    };
    let v = 2.0 * c * (inner + outer);
    if !v.is_finite() {
        return Err(Error::Quadrature("stable r-mass is not finite".into()));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::spec::{Drift, Volatility};

    fn poisson_only(intensity: f64, law: JumpLaw) -> ModelSpec {
        ModelSpec::brownian(0.0).with_jump(JumpComponent::CompoundPoisson { intensity, law })
    }

    #[test]
    fn unit_poisson_r_zero() {
        let m = poisson_only(1.0, JumpLaw::Fixed { size: 1.0 });
        let rep = verify_class_membership(&m, 0.0, 1.0).unwrap();
        assert_eq!(rep.levy_integral, 1.0);
        assert!(rep.passes);
    }

    #[test]
    fn untruncated_stable_fails_below_index() {
        let m = ModelSpec::brownian(0.0).with_jump(JumpComponent::SymmetricStable { beta: 1.5, scale: 1.0 });
        for a in [1.0, 1e6, 1e300] {
            let rep = verify_class_membership(&m, 1.4, a).unwrap();
            assert!(rep.levy_integral.is_infinite());
            assert!(!rep.passes);
        }
        let rep = verify_class_membership(&m, 1.5, 1e300).unwrap();
        assert!(!rep.passes);
    }

    #[test]
    fn stable_matches_closed_form() {
        // ∫(|x|^r ∧ 1) c|x|^{-1-β} dx = 2c (1/(r-β) + 1/β)
        let (beta, r) = (1.5, 1.6);
        let c_unit = stable_levy_constant(beta, 1.0);
        let closed_unit = 2.0 * c_unit * (1.0 / (r - beta) + 1.0 / beta);
        // choose the scale so the closed form equals 0.5
        let scale = (0.5 / closed_unit).powf(1.0 / beta);
        let m = ModelSpec::brownian(0.0).with_jump(JumpComponent::SymmetricStable { beta, scale });
        let rep = verify_class_membership(&m, r, 0.5 + 1e-6).unwrap();
        assert!((rep.levy_integral - 0.5).abs() < 1e-6, "{}", rep.levy_integral);
        assert!(rep.passes);
    }

    #[test]
    fn truncated_stable_closed_form() {
        let (beta, r, t): (f64, f64, f64) = (0.7, 1.2, 3.0);
        let c = stable_levy_constant(beta, 2.0);
        let closed = 2.0 * c * (1.0 / (r - beta) + (1.0 - t.powf(-beta)) / beta);
        let v = levy_r_mass(&JumpComponent::TruncatedStable { beta, scale: 2.0, truncation: t }, r).unwrap();
        assert!((v - closed).abs() < 1e-9 * closed);
        let t: f64 = 0.25;
        let closed = 2.0 * c * t.powf(r - beta) / (r - beta);
        let v = levy_r_mass(&JumpComponent::TruncatedStable { beta, scale: 2.0, truncation: t }, r).unwrap();
        assert!((v - closed).abs() < 1e-9 * closed);
    }

    #[test]
    fn normal_and_uniform_laws() {
        // r = 0: every nonzero jump counts once
        let v = law_r_moment(&JumpLaw::Normal { mean: 0.3, std: 0.7 }, 0.0).unwrap();
        assert!((v - 1.0).abs() < 1e-10);
        // r = 2 with tiny jumps: E[J²]
        let v = law_r_moment(&JumpLaw::Normal { mean: 0.0, std: 0.01 }, 2.0).unwrap();
        assert!((v - 1e-4).abs() < 1e-12);
        // uniform on [0, 2], r = 1: ∫_0^1 x dx/2 + ∫_1^2 dx/2 = 0.75
        let v = law_r_moment(&JumpLaw::Uniform { low: 0.0, high: 2.0 }, 1.0).unwrap();
        assert!((v - 0.75).abs() < 1e-12);
    }

    #[test]
    fn drift_and_volatility_bounds() {
        let m = ModelSpec::brownian(0.5)
            .with_drift(Drift::Sine {
                level: 0.1,
                amplitude: -0.2,
                frequency: 1.0,
            })
            .with_volatility(Volatility::Sine {
                level: 0.5,
                amplitude: 0.25,
                frequency: 2.0,
            });
        let rep = verify_class_membership(&m, 1.0, 1.0).unwrap();
        assert!((rep.drift_sup - 0.3).abs() < 1e-15);
        assert!((rep.volatility_sup - 0.75).abs() < 1e-15);
        assert!(rep.drift_ok && rep.volatility_ok && !rep.passes);
        assert!(verify_class_membership(&m, 1.0, 1.05).unwrap().passes);
    }

    #[test]
    fn monotone_in_a_and_r() {
        let m = ModelSpec::brownian(1.0)
            .with_jump(JumpComponent::SymmetricStable { beta: 1.2, scale: 0.5 })
            .with_jump(JumpComponent::CompoundPoisson {
                intensity: 2.0,
                law: JumpLaw::Normal { mean: 0.0, std: 0.4 },
            });
        let mut last = f64::INFINITY;
        for r in [1.25, 1.4, 1.6, 1.8, 1.99] {
            let total = minimal_class_bound(&m, r).unwrap();
            assert!(total <= last);
            last = total;
            assert!(verify_class_membership(&m, r, total * 1.01).unwrap().passes);
            assert!(verify_class_membership(&m, r, total * 2.0).unwrap().passes);
        }
    }
}
