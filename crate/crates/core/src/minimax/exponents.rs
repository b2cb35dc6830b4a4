//! The characteristic exponents `W̃φ_n`, `W̃η_n` in the `x`-domain and the
//! exponent gap `a_n u² - 2W̃η_n` in closed form.

use super::construction::{h_fn, InverseTransform};
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Half-line extent of the `x`-domain integrals. The integrands decay like
/// `x^{-6}`, so the neglected tail is below `1e-8 a_n`.
pub const X_EXTENT: f64 = 32.0;

/// Quadrature rule on `[0, X_EXTENT]` with panels between consecutive zeros
/// of `H_n` (so `|H_n|` is smooth on each panel) and a break at `x = 1`.
#[derive(Debug, Clone)]
pub struct XRule {
    pub order: usize,
    pub r: f64,
    x: Vec<f64>,
    w: Vec<f64>,
    /// `|H_n(x)| / x²` and `H_n(x) / x²` at the nodes.
    abs_over_x2: Vec<f64>,
    h_over_x2: Vec<f64>,
    r_mass_f: f64,
    r_mass_g: f64,
}

/// Zeros of `H_n` on `(0, X_EXTENT)`, from sign changes on a grid of spacing
/// `π/(8u_n)` refined by the Illinois method.
pub fn zeros_of_h(ht: &InverseTransform) -> Vec<f64> {
    let step = PI / (8.0 * ht.u_n);
    let m = (X_EXTENT / step).ceil() as usize;
    let mut zeros = Vec::new();
    let mut prev_x = 0.0;
    let mut prev_v = ht.eval(0.0);
    for k in 1..=m {
        let x = (k as f64 * step).min(X_EXTENT);
        let v = ht.eval(x);
        if v == 0.0 {
            zeros.push(x);
        } else if prev_v != 0.0 && (v > 0.0) != (prev_v > 0.0) {
            zeros.push(illinois(|t| ht.eval(t), prev_x, prev_v, x, v));
        }
        prev_x = x;
        prev_v = v;
    }
    zeros
}

fn illinois<F: Fn(f64) -> f64>(f: F, mut a: f64, mut fa: f64, mut b: f64, mut fb: f64) -> f64 {
    let mut side = 0;
    for _ in 0..60 {
        let c = (a * fb - b * fa) / (fb - fa);
        let fc = f(c);
        if fc == 0.0 || (b - a).abs() < 4.0 * f64::EPSILON * b.abs() {
            return c;
        }
        if (fc > 0.0) == (fb > 0.0) {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    0.5 * (a + b)
}

impl XRule {
    /// Build the rule with `order` Gauss–Legendre nodes per panel.
    pub fn build(ht: &InverseTransform, zeros: &[f64], r: f64, order: usize) -> Result<Self> {
        let gl = GaussLegendre::new(order);
        let mut breaks = vec![0.0];
        breaks.extend(zeros.iter().copied());
        breaks.push(1.0);
        breaks.push(X_EXTENT);
        breaks.sort_by(f64::total_cmp);
        breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-14);

        let mut x = Vec::with_capacity(order * breaks.len());
        let mut w = Vec::with_capacity(order * breaks.len());
        let mut abs_over_x2 = Vec::with_capacity(order * breaks.len());
        let mut h_over_x2 = Vec::with_capacity(order * breaks.len());
        let (mut r_mass_f, mut r_mass_g) = (0.0, 0.0);
        for (i, pair) in breaks.windows(2).enumerate() {
            let (lo, hi) = (pair[0], pair[1]);
            for (xi, wi) in gl.mapped(lo, hi) {
                let h = ht.eval(xi);
                let x2 = xi * xi;
                x.push(xi);
                w.push(wi);
                abs_over_x2.push(h.abs() / x2);
                h_over_x2.push(h / x2);
                if i > 0 {
                    let weight = xi.powf(r).min(1.0) / x2;
                    r_mass_f += wi * weight * h.abs();
                    r_mass_g += wi * weight * (h.abs() + h);
                }
            }
            if i == 0 {
                // ∫_0^L x^{r-2} |H| dx = (1/(r-1)) ∫_0^{L^{r-1}} |H(s^{1/(r-1)})| ds
                let top = hi.powf(r - 1.0);
                for (s, ws) in gl.mapped(0.0, top) {
                    let h = ht.eval(s.powf(1.0 / (r - 1.0)));
                    r_mass_f += ws * h.abs() / (r - 1.0);
                    r_mass_g += ws * (h.abs() + h) / (r - 1.0);
                }
            }
        }
        // the tabulated weights cover the half line; the densities are even
        let rule = Self {
            order,
            r,
            x,
            w,
            abs_over_x2,
            h_over_x2,
            r_mass_f: 2.0 * r_mass_f,
            r_mass_g: 2.0 * r_mass_g,
        };
        if !rule.r_mass_f.is_finite() {
            return Err(Error::Numeric("r-mass of F_n is not finite".into()));
        }
        Ok(rule)
    }

    /// Double the per-panel order from 16 until probe values of the exponents
    /// and the r-mass change by less than `1e-9` relative (at most order 128).
    pub fn refined(ht: &InverseTransform, r: f64) -> Result<Self> {
        let zeros = zeros_of_h(ht);
        let probes = [0.5 * ht.u_n, ht.u_n, 2.0 * ht.u_n, 4.0 * ht.u_n];
        let signature = |rule: &XRule| {
            let mut v: Vec<f64> = probes
                .iter()
                .flat_map(|&u| {
                    let e = rule.exponents_at(u);
                    [e.w_phi, e.w_eta, e.w_phi_prime]
                })
                .collect();
            v.push(rule.r_mass_f);
            v
        };
        let mut rule = Self::build(ht, &zeros, r, 16)?;
        let mut sig = signature(&rule);
        while rule.order < 128 {
            let finer = Self::build(ht, &zeros, r, 2 * rule.order)?;
            let fine_sig = signature(&finer);
            let change = sig
                .iter()
                .zip(&fine_sig)
                .map(|(a, b)| (a - b).abs() / b.abs().max(1e-300))
                .fold(0.0f64, f64::max);
            rule = finer;
            sig = fine_sig;
            if change < 1e-9 {
                return Ok(rule);
            }
        }
        Err(Error::Numeric(format!(
            "x-domain quadrature did not settle at order {}",
            rule.order
        )))
    }

    pub fn nodes(&self) -> usize {
        self.x.len()
    }

    /// `∫(|x|^r ∧ 1) F_n(dx)`
    pub fn r_mass_f(&self) -> f64 {
        self.r_mass_f
    }

    /// `∫(|x|^r ∧ 1) G_n(dx)`
    pub fn r_mass_g(&self) -> f64 {
        self.r_mass_g
    }

    /// `W̃φ_n(u)`, `W̃η_n(u)` and their derivatives by quadrature.
    pub fn exponents_at(&self, u: f64) -> ExponentValues {
        let (mut wp, mut we, mut dp, mut de) = (0.0, 0.0, 0.0, 0.0);
        for i in 0..self.x.len() {
            let xi = self.x[i];
            let (s, c) = (0.5 * u * xi).sin_cos();
            // 1 - cos(ux) = 2 sin²(ux/2); sin(ux)/x = 2 sin cos x / x²
            let one_minus_cos = 2.0 * s * s;
            let sin_times_x = 2.0 * s * c * xi;
            let wa = self.w[i] * self.abs_over_x2[i];
            let wh = self.w[i] * self.h_over_x2[i];
            wp += wa * one_minus_cos;
            we += wh * one_minus_cos;
            dp += wa * sin_times_x;
            de += wh * sin_times_x;
        }
        ExponentValues {
            u,
            w_phi: 2.0 * wp,
            w_eta: 2.0 * we,
            w_phi_prime: 2.0 * dp,
            w_eta_prime: 2.0 * de,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentValues {
    pub u: f64,
    pub w_phi: f64,
    pub w_eta: f64,
    pub w_phi_prime: f64,
    pub w_eta_prime: f64,
}

/// Exponents tabulated on a list of frequencies.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ExponentTable {
    pub u: Vec<f64>,
    pub w_phi: Vec<f64>,
    pub w_eta: Vec<f64>,
    pub w_phi_prime: Vec<f64>,
    pub w_eta_prime: Vec<f64>,
}

impl ExponentTable {
    pub fn push(&mut self, e: ExponentValues) {
        self.u.push(e.u);
        self.w_phi.push(e.w_phi);
        self.w_eta.push(e.w_eta);
        self.w_phi_prime.push(e.w_phi_prime);
        self.w_eta_prime.push(e.w_eta_prime);
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }
}

/// `characteristic_exponents` over a frequency list, in parallel.
pub fn characteristic_exponents(rule: &XRule, u: &[f64]) -> ExponentTable {
    use rayon::prelude::*;
    let values: Vec<ExponentValues> = u.par_iter().map(|&v| rule.exponents_at(v)).collect();
    let mut table = ExponentTable::default();
    for e in values {
        table.push(e);
    }
    table
}

/// `∫_0^6 t^k (1 - e^{-t³}) dt` for `k = 0, 1`; beyond `t = 6` the factor is 1
/// to far below double precision.
fn gap_moments() -> (f64, f64) {
    let gl = GaussLegendre::new(20);
    let f = |t: f64| -(-t * t * t).exp_m1();
    (gl.composite(f, 0.0, 6.0, 12), gl.composite(|t| t * f(t), 0.0, 6.0, 12))
}

/// Closed form of the exponent gap `D(u) = a_n u² - 2W̃η_n(u)` and `D'(u)`.
///
/// Since `W̃η_n'' = h_n` with `W̃η_n(0) = W̃η_n'(0) = 0`,
/// `D(u) = 2∫_0^{|u|} (|u| - v)(a_n - h_n(v)) dv`, which vanishes on `|u| <= u_n`.
#[derive(Debug, Clone)]
pub struct ExponentGap {
    a_n: f64,
    u_n: f64,
    m0: f64,
    m1: f64,
    gl: GaussLegendre,
}

impl ExponentGap {
    pub fn new(a_n: f64, u_n: f64) -> Self {
        let (m0, m1) = gap_moments();
        Self {
            a_n,
            u_n,
            m0,
            m1,
            gl: GaussLegendre::new(20),
        }
    }

    /// `(D(u), D'(u))`; `D'` is odd, `D` even.
    pub fn eval(&self, u: f64) -> (f64, f64) {
        let big_u = u.abs() - self.u_n;
        if big_u <= 0.0 {
            return (0.0, 0.0);
        }
        let f = |t: f64| -(-t * t * t).exp_m1();
        let (d, dp) = if big_u <= 6.0 {
            let panels = 1 + (2.0 * big_u).ceil() as usize;
            (
                self.gl.composite(|t| (big_u - t) * f(t), 0.0, big_u, panels),
                self.gl.composite(f, 0.0, big_u, panels),
            )
        } else {
            let tail = big_u - 6.0;
            (big_u * self.m0 - self.m1 + 0.5 * tail * tail, self.m0 + tail)
        };
        (2.0 * self.a_n * d, 2.0 * self.a_n * dp * u.signum())
    }

    /// `W̃η_n(u) = (a_n u² - D(u)) / 2`
    pub fn w_eta(&self, u: f64) -> f64 {
        0.5 * (self.a_n * u * u - self.eval(u).0)
    }

    pub fn h(&self, u: f64) -> f64 {
        h_fn(u, self.a_n, self.u_n)
    }
}
