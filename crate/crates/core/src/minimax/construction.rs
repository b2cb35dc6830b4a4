//! The perturbation `h_n`, its inverse Fourier transform `H_n` and the two
//! Lévy densities built from it.

use crate::error::{Error, Result};
use crate::quadrature::{trapezoid, GaussLegendre};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::OnceLock;

/// `(a_n, u_n) = ((n log n)^{-(2-r)/2}, 2 √(n log n))`, natural logarithm.
pub fn perturbation_constants(r: f64, n: usize) -> Result<(f64, f64)> {
    if !(r > 1.0 && r < 2.0) {
        return Err(Error::invalid("r", format!("{r} is outside (1, 2)")));
    }
    if n < 2 {
        return Err(Error::invalid("n", "must be at least 2"));
    }
    let nl = n as f64 * (n as f64).ln();
    Ok((nl.powf(-(2.0 - r) / 2.0), 2.0 * nl.sqrt()))
}

/// `a_n` on `|u| <= u_n`, `a_n exp(-(|u| - u_n)³)` beyond.
pub fn h_fn(u: f64, a_n: f64, u_n: f64) -> f64 {
    let excess = u.abs() - u_n;
    if excess <= 0.0 {
        a_n
    } else {
        a_n * (-excess * excess * excess).exp()
    }
}

/// Upper end of the inner `t`-integrals; `e^{-64}` is below double precision.
const T_MAX: f64 = 4.0;
/// Range covered by the Chebyshev fits of the inner transforms.
const FIT_RANGE: f64 = 40.0;
const FIT_WIDTH: f64 = 0.5;
const FIT_DEGREE: usize = 16;

/// `(p(x), g(x)) = (∫_0^∞ cos(tx) 3t² e^{-t³} dt, ∫_0^∞ cos(tx) e^{-t³} dt)`
/// by composite Gauss–Legendre with panels scaled to the oscillation.
pub fn inner_transforms_direct(x: f64, density: usize) -> (f64, f64) {
    let gl = gl12();
    let panels = density.max(1) * (4 + (T_MAX * x.abs() / 1.5).ceil() as usize);
    let width = T_MAX / panels as f64;
    let (mut p, mut g) = (0.0, 0.0);
    for k in 0..panels {
        let lo = k as f64 * width;
        for (t, w) in gl.mapped(lo, lo + width) {
            let e = (-t * t * t).exp() * w;
            let c = (t * x).cos();
            p += 3.0 * t * t * e * c;
            g += e * c;
        }
    }
    (p, g)
}

fn gl12() -> &'static GaussLegendre {
    static GL: OnceLock<GaussLegendre> = OnceLock::new();
    GL.get_or_init(|| GaussLegendre::new(12))
}

/// Chebyshev expansion of one function on one interval.
#[derive(Debug, Clone)]
struct ChebPiece {
    lo: f64,
    hi: f64,
    coeffs: Vec<f64>,
}

impl ChebPiece {
    fn fit(lo: f64, hi: f64, values: &[f64]) -> Self {
        let m = values.len();
        let coeffs = (0..m)
            .map(|k| {
                let s: f64 = values
                    .iter()
                    .enumerate()
                    .map(|(j, v)| v * (PI * k as f64 * (j as f64 + 0.5) / m as f64).cos())
                    .sum();
                2.0 * s / m as f64
            })
            .collect();
        Self { lo, hi, coeffs }
    }

    fn nodes(lo: f64, hi: f64, m: usize) -> Vec<f64> {
        (0..m)
            .map(|j| {
                let c = (PI * (j as f64 + 0.5) / m as f64).cos();
                0.5 * (lo + hi) + 0.5 * (hi - lo) * c
            })
            .collect()
    }

    fn eval(&self, x: f64) -> f64 {
        let y = (2.0 * x - self.lo - self.hi) / (self.hi - self.lo);
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * y * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        y * b1 - b2 + 0.5 * self.coeffs[0]
    }
}

struct InnerFits {
    p: Vec<ChebPiece>,
    g: Vec<ChebPiece>,
}

fn inner_fits() -> &'static InnerFits {
    static FITS: OnceLock<InnerFits> = OnceLock::new();
    FITS.get_or_init(|| {
        let pieces = (FIT_RANGE / FIT_WIDTH).ceil() as usize;
        let mut p = Vec::with_capacity(pieces);
        let mut g = Vec::with_capacity(pieces);
        for k in 0..pieces {
            let (lo, hi) = (k as f64 * FIT_WIDTH, (k + 1) as f64 * FIT_WIDTH);
            let nodes = ChebPiece::nodes(lo, hi, FIT_DEGREE + 1);
            let vals: Vec<(f64, f64)> = nodes.iter().map(|&x| inner_transforms_direct(x, 2)).collect();
            let pv: Vec<f64> = vals.iter().map(|v| v.0).collect();
            let gv: Vec<f64> = vals.iter().map(|v| v.1).collect();
            p.push(ChebPiece::fit(lo, hi, &pv));
            g.push(ChebPiece::fit(lo, hi, &gv));
        }
        InnerFits { p, g }
    })
}

/// `(p(x), g(x))` from the Chebyshev fits, falling back to direct quadrature
/// outside the fitted range.
pub fn inner_transforms(x: f64) -> (f64, f64) {
    let ax = x.abs();
    if ax >= FIT_RANGE {
        return inner_transforms_direct(ax, 1);
    }
    let fits = inner_fits();
    let k = ((ax / FIT_WIDTH) as usize).min(fits.p.len() - 1);
    (fits.p[k].eval(ax), fits.g[k].eval(ax))
}

/// `H_n = F^{-1} h_n`, written as
/// `H_n(x) = (a/π) [sin(u_n x) p(x) / x + cos(u_n x) g(x)]`
/// after integrating the tail part of `h_n` by parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseTransform {
    pub a_n: f64,
    pub u_n: f64,
}

impl InverseTransform {
    pub fn new(a_n: f64, u_n: f64) -> Self {
        Self { a_n, u_n }
    }

    fn combine(&self, x: f64, (p, g): (f64, f64)) -> f64 {
        let (s, c) = (self.u_n * x).sin_cos();
        let sinc = if x == 0.0 { self.u_n } else { s / x };
        self.a_n / PI * (sinc * p + c * g)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.combine(x, inner_transforms(x))
    }

    /// Same value by direct quadrature with `density` times the default panels.
    pub fn eval_direct(&self, x: f64, density: usize) -> f64 {
        self.combine(x, inner_transforms_direct(x, density))
    }
}

/// Symmetric uniform grid `x_k = k * spacing`, `|k| <= half_points`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub spacing: f64,
    pub extent: f64,
}

impl GridSpec {
    /// Default x-grid for cutoff `u_n`: spacing `π/(4u_n)`, extent
    /// `max(32, 64/u_n)`. `H_n` decays only like `x^{-4}`, so smaller extents
    /// leave a visible tail in `∫H_n`.
    pub fn for_cutoff(u_n: f64) -> Self {
        Self {
            spacing: PI / (4.0 * u_n),
            extent: (64.0 / u_n).max(32.0),
        }
    }

    pub fn half_points(&self) -> usize {
        (self.extent / self.spacing).ceil() as usize
    }
}

/// Tabulation of `H_n` on a symmetric grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HGrid {
    pub spacing: f64,
    /// `x` values from `-extent` to `extent`.
    pub x: Vec<f64>,
    pub values: Vec<f64>,
}

impl HGrid {
    pub fn extent(&self) -> f64 {
        self.x.last().copied().unwrap_or(0.0)
    }

    pub fn value_at_zero(&self) -> f64 {
        self.values[self.values.len() / 2]
    }

    /// `∫H_n dx` by the trapezoid rule.
    pub fn integral(&self) -> f64 {
        trapezoid(&self.values, self.spacing)
    }

    /// `∫H_n² dx` by the trapezoid rule.
    pub fn l2_norm_sq(&self) -> f64 {
        let sq: Vec<f64> = self.values.iter().map(|v| v * v).collect();
        trapezoid(&sq, self.spacing)
    }
}

/// `(1/2π) ∫ h_n² du` by Gauss–Legendre, independent of any `x`-domain work.
pub fn h_l2_norm_sq(a_n: f64, u_n: f64) -> f64 {
    let gl = GaussLegendre::new(20);
    let tail = gl.composite(|t| (-2.0 * t * t * t).exp(), 0.0, T_MAX, 8);
    a_n * a_n * (u_n + tail) / PI
}

/// Tabulate `H_n` on `grid`, checking that the tabulation agrees with direct
/// quadrature at doubled density to `1e-8 a_n u_n` at every point.
pub fn inverse_fourier_h(a_n: f64, u_n: f64, grid: &GridSpec) -> Result<HGrid> {
    if !(a_n > 0.0 && u_n > 0.0) {
        return Err(Error::invalid("a_n/u_n", "must be positive"));
    }
    if !(grid.spacing > 0.0) || grid.spacing > PI / (4.0 * u_n) * (1.0 + 1e-12) {
        return Err(Error::Numeric(format!(
            "x-grid spacing {} does not resolve frequency u_n = {u_n}",
            grid.spacing
        )));
    }
    let ht = InverseTransform::new(a_n, u_n);
    let m = grid.half_points();
    let half: Vec<f64> = (0..=m).map(|k| ht.eval(k as f64 * grid.spacing)).collect();
    let tol = 1e-8 * a_n * u_n;
    for (k, v) in half.iter().enumerate() {
        let x = k as f64 * grid.spacing;
        let fine = ht.eval_direct(x, 2);
        if (fine - v).abs() > tol || !v.is_finite() {
            return Err(Error::Numeric(format!(
                "H_n tabulation not self-convergent at x = {x}: {v} vs {fine}"
            )));
        }
    }
    let mut x = Vec::with_capacity(2 * m + 1);
    let mut values = Vec::with_capacity(2 * m + 1);
    for k in (1..=m).rev() {
        x.push(-(k as f64) * grid.spacing);
        values.push(half[k]);
    }
    for (k, v) in half.iter().enumerate() {
        x.push(k as f64 * grid.spacing);
        values.push(*v);
    }
    Ok(HGrid {
        spacing: grid.spacing,
        x,
        values,
    })
}

/// `F_n = |H_n|/x²` and `G_n = (|H_n| + H_n)/x²` on the grid of `H_n`; the
/// entries at `x = 0` are `+inf` (or 0 for `G_n` when `H_n(0) < 0`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevyDensities {
    pub x: Vec<f64>,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
}

pub fn levy_densities(h: &HGrid) -> Result<LevyDensities> {
    let mut f = Vec::with_capacity(h.x.len());
    let mut g = Vec::with_capacity(h.x.len());
    for (&x, &v) in h.x.iter().zip(&h.values) {
        let (fv, gv) = if x == 0.0 {
            (
                if v == 0.0 { 0.0 } else { f64::INFINITY },
                if v > 0.0 { f64::INFINITY } else { 0.0 },
            )
        } else {
            let x2 = x * x;
            (v.abs() / x2, (v.abs() + v) / x2)
        };
        if gv < -1e-10 {
            return Err(Error::Numeric(format!("G_n density negative at x = {x}")));
        }
        f.push(fv);
        g.push(gv);
    }
    Ok(LevyDensities { x: h.x.clone(), f, g })
}

/// `∫_{|x|<=1} x² F_n(dx) = ∫_{|x|<=1} |H_n| dx` by the trapezoid rule.
pub fn small_jump_second_moment(h: &HGrid) -> f64 {
    let inside: Vec<f64> = h
        .x
        .iter()
        .zip(&h.values)
        .filter(|(x, _)| x.abs() <= 1.0)
        .map(|(_, v)| v.abs())
        .collect();
    trapezoid(&inside, h.spacing)
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::gamma::gamma;

    #[test]
    fn constants_example() {
        let (a, u) = perturbation_constants(1.5, 100).unwrap();
        let nl = 100.0 * 100f64.ln();
        assert!((a - nl.powf(-0.25)).abs() < 1e-15);
        assert!((a - 0.2158).abs() < 1e-4);
        assert!((u - 42.92).abs() < 1e-2);
        for &(r, n) in &[(1.1, 2usize), (1.5, 100), (1.9, 1 << 20)] {
            let (a, u) = perturbation_constants(r, n).unwrap();
            assert!(a > 0.0 && a < 1.0);
            let id = u.powf(2.0 - r) * a * 2f64.powf(r - 2.0);
            assert!((id - 1.0).abs() < 1e-12);
            assert!((u - 2.0 / a.powf(1.0 / (2.0 - r))).abs() < 1e-12 * u);
        }
        let (a, _) = perturbation_constants(2.0 - 1e-9, 1000).unwrap();
        assert!((a - 1.0).abs() < 1e-7);
        assert!(perturbation_constants(1.0, 10).is_err());
        assert!(perturbation_constants(2.0, 10).is_err());
        assert!(perturbation_constants(1.5, 1).is_err());
    }

    #[test]
    fn h_shape() {
        let (a, un) = (0.3, 10.0);
        assert_eq!(h_fn(0.0, a, un), a);
        assert_eq!(h_fn(un, a, un), a);
        assert_eq!(h_fn(-un, a, un), a);
        assert!((h_fn(un + 1.0, a, un) - a / std::f64::consts::E).abs() < 1e-15);
        let mut last = a;
        for k in 1..50 {
            let u = un + k as f64 * 0.05;
            let v = h_fn(u, a, un);
            assert!(v < last);
            assert_eq!(v, h_fn(-u, a, un));
            last = v;
        }
    }

    #[test]
    fn inner_transforms_at_zero_and_fit_accuracy() {
        let (p0, g0) = inner_transforms_direct(0.0, 1);
        assert!((p0 - 1.0).abs() < 1e-14);
        assert!((g0 - gamma(4.0 / 3.0)).abs() < 1e-14);
        for k in 0..400 {
            let x = 0.0997 * k as f64;
            let (p, g) = inner_transforms(x);
            let (pd, gd) = inner_transforms_direct(x, 3);
            assert!((p - pd).abs() < 1e-13 && (g - gd).abs() < 1e-13, "x={x}");
        }
    }

    #[test]
    fn transform_even_and_peak() {
        let (a, un) = perturbation_constants(1.5, 256).unwrap();
        let ht = InverseTransform::new(a, un);
        let h0 = ht.eval(0.0);
        assert!((h0 - a / PI * (un + gamma(4.0 / 3.0))).abs() < 1e-12 * h0);
        assert!(h0 > a * un / PI);
        for k in 1..200 {
            let x = 0.0731 * k as f64;
            assert_eq!(ht.eval(x), ht.eval(-x));
        }
    }

    #[test]
    fn transform_matches_brute_force_inversion() {
        // (1/π) ∫_0^∞ cos(ux) h(u) du by plain composite quadrature
        let (a, un) = (0.2, 12.0);
        let ht = InverseTransform::new(a, un);
        let gl = GaussLegendre::new(20);
        for x in [0.0, 0.1, 0.77, 2.5, 9.0] {
            let brute = gl.composite(|u| (u * x).cos() * h_fn(u, a, un), 0.0, un, 200)
                + gl.composite(|u| (u * x).cos() * h_fn(u, a, un), un, un + T_MAX, 200);
            let brute = brute / PI;
            assert!((ht.eval(x) - brute).abs() < 1e-13, "x={x}: {} vs {brute}", ht.eval(x));
        }
    }

    #[test]
    fn tabulation_integral_and_plancherel() {
        for n in [64usize, 1024] {
            let (a, un) = perturbation_constants(1.5, n).unwrap();
            let grid = inverse_fourier_h(a, un, &GridSpec::for_cutoff(un)).unwrap();
            assert!((grid.integral() - a).abs() < 1e-6 * a, "{} vs {a}", grid.integral());
            let lhs = grid.l2_norm_sq();
            let rhs = h_l2_norm_sq(a, un);
            assert!((lhs - rhs).abs() < 1e-6 * rhs);
            let closed = a * a * (un + gamma(4.0 / 3.0) / 2f64.powf(1.0 / 3.0)) / PI;
            assert!((rhs - closed).abs() < 1e-12 * closed);
        }
    }

    #[test]
    fn l2_ratio_stable() {
        let ratios: Vec<f64> = (6..=12)
            .map(|e| {
                let (a, un) = perturbation_constants(1.5, 1 << e).unwrap();
                let grid = inverse_fourier_h(a, un, &GridSpec::for_cutoff(un)).unwrap();
                grid.l2_norm_sq().sqrt() / (a * un.sqrt())
            })
            .collect();
        let (lo, hi) = ratios.iter().fold((f64::MAX, 0.0f64), |(l, h), &v| (l.min(v), h.max(v)));
        assert!(hi / lo < 1.1, "{ratios:?}");
    }

    #[test]
    fn coarse_grid_rejected() {
        let (a, un) = perturbation_constants(1.5, 64).unwrap();
        let grid = GridSpec {
            spacing: PI / (2.0 * un),
            extent: 4.0,
        };
        assert!(inverse_fourier_h(a, un, &grid).is_err());
    }

    #[test]
    fn densities_nonnegative_and_even() {
        let (a, un) = perturbation_constants(1.3, 128).unwrap();
        let grid = inverse_fourier_h(a, un, &GridSpec::for_cutoff(un)).unwrap();
        let d = levy_densities(&grid).unwrap();
        let m = d.x.len();
        for i in 0..m {
            assert!(d.g[i] >= 0.0 && d.f[i] >= 0.0);
            assert_eq!(d.f[i], d.f[m - 1 - i]);
            assert_eq!(d.g[i], d.g[m - 1 - i]);
            assert_eq!(grid.values[i], grid.values[m - 1 - i]);
            if d.x[i] != 0.0 {
                assert!((d.g[i] - d.f[i] - grid.values[i] / (d.x[i] * d.x[i])).abs() <= 1e-12 * d.f[i].max(1e-300));
            }
        }
        // x² F_n → |H_n(0)|
        let ht = InverseTransform::new(a, un);
        let x = 1e-5 / un;
        let near = ht.eval(x).abs() / (x * x) * x * x;
        assert!((near - grid.value_at_zero()).abs() < 1e-9 * grid.value_at_zero());
        assert!(small_jump_second_moment(&grid).is_finite());
    }
}

#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    /// Trapezoid `∫H` and `∫H²` from the fitted transforms, on `|k| <= m`.
    fn quick_grid(ht: &InverseTransform, spacing: f64, m: usize) -> (f64, f64) {
        let half: Vec<f64> = (0..=m).map(|k| ht.eval(k as f64 * spacing)).collect();
        let full: Vec<f64> = half.iter().rev().chain(&half[1..]).copied().collect();
        let sq: Vec<f64> = full.iter().map(|v| v * v).collect();
        (trapezoid(&full, spacing), trapezoid(&sq, spacing))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn transform_and_perturbation_even(r in 1.01f64..1.99, n in 16usize..1 << 16, x in 0.0f64..45.0, u in 0.0f64..2000.0) {
            let (a, un) = perturbation_constants(r, n).unwrap();
            let ht = InverseTransform::new(a, un);
            prop_assert_eq!(ht.eval(x), ht.eval(-x));
            prop_assert_eq!(h_fn(u, a, un), h_fn(-u, a, un));
        }

        #[test]
        fn plancherel_and_grid_self_convergence(r in 1.01f64..1.99, n in 16usize..4096) {
            let (a, un) = perturbation_constants(r, n).unwrap();
            let ht = InverseTransform::new(a, un);
            let spec = GridSpec::for_cutoff(un);
            let m = spec.half_points();
            let (int1, l2_1) = quick_grid(&ht, spec.spacing, m);
            let (int2, l2_2) = quick_grid(&ht, spec.spacing / 2.0, 2 * m);
            let plancherel = h_l2_norm_sq(a, un);
            prop_assert!((l2_1 - plancherel).abs() < 1e-6 * plancherel, "{} vs {}", l2_1, plancherel);
            prop_assert!((int1 - a).abs() < 1e-6 * a);
            prop_assert!((l2_1 - l2_2).abs() < 1e-9 * plancherel);
            // halving the spacing only moves the end-point weights of the truncated tail
            let xe = m as f64 * spec.spacing;
            let (pe, ge) = inner_transforms(xe);
            let edge = a / PI * (pe.abs() / xe + ge.abs());
            prop_assert!((int1 - int2).abs() <= spec.spacing * edge + 1e-12 * a);
        }
    }
}
