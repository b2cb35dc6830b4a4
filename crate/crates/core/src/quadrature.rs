//! Numerical integration: fixed Gauss–Legendre rules, adaptive Gauss–Kronrod
//! (7/15) with interval bisection, semi-infinite ranges and oscillatory
//! cosine tails accelerated with Wynn's epsilon algorithm.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Gauss–Legendre rule of fixed order on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut pp = 0.0;
            for _ in 0..100 {
                let mut p1 = 1.0;
                let mut p2 = 0.0;
                for j in 1..=n {
                    let p3 = p2;
                    p2 = p1;
                    p1 = ((2 * j - 1) as f64 * z * p2 - (j - 1) as f64 * p3) / j as f64;
                }
                pp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
                let z_old = z;
                z = z_old - p1 / pp;
                if (z - z_old).abs() < 1e-15 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - z * z) * pp * pp);
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }

    /// Composite rule over `panels` equal panels.
    pub fn composite<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64, panels: usize) -> f64 {
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|k| {
                let lo = a + k as f64 * h;
                self.integrate(&f, lo, lo + h)
            })
            .sum()
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One Gauss–Kronrod 7/15 evaluation: `(kronrod value, |kronrod - gauss|)`.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let fc = f(mid);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(mid - dx) + f(mid + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub intervals: usize,
}

/// Globally adaptive Gauss–Kronrod integrator.
#[derive(Debug, Clone, Copy)]
pub struct Adaptive {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for Adaptive {
    fn default() -> Self {
        Self {
            abs_tol: 1e-13,
            rel_tol: 1e-11,
            max_intervals: 2000,
        }
    }
}

impl Adaptive {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<QuadResult> {
        self.integrate_breaks(f, &[a, b])
    }

    /// Integrate over `[points[0], points.last()]`, never bisecting across the
    /// interior break points (kinks, singular points).
    pub fn integrate_breaks<F: Fn(f64) -> f64>(&self, f: F, points: &[f64]) -> Result<QuadResult> {
        if points.len() < 2 {
            return Err(Error::invalid("points", "need at least two break points"));
        }
        // (a, b, value, error)
        let mut pieces: Vec<(f64, f64, f64, f64)> = points
            .windows(2)
            .filter(|w| w[1] != w[0])
            .map(|w| {
                let (v, e) = gk15(&f, w[0], w[1]);
                (w[0], w[1], v, e)
            })
            .collect();
        if pieces.is_empty() {
            return Ok(QuadResult {
                value: 0.0,
                abs_error: 0.0,
                intervals: 0,
            });
        }
        loop {
            let value: f64 = pieces.iter().map(|p| p.2).sum();
            let error: f64 = pieces.iter().map(|p| p.3).sum();
            if !value.is_finite() || !error.is_finite() {
                return Err(Error::Quadrature(format!(
                    "non-finite integrand on [{}, {}]",
                    points[0],
                    points[points.len() - 1]
                )));
            }
            let tol = self.abs_tol.max(self.rel_tol * value.abs());
            if error <= tol {
                return Ok(QuadResult {
                    value,
                    abs_error: error,
                    intervals: pieces.len(),
                });
            }
            if pieces.len() >= self.max_intervals {
                return Err(Error::Quadrature(format!(
                    "{} intervals exhausted on [{}, {}]: value {value:e}, error estimate {error:e} > {tol:e}",
                    pieces.len(),
                    points[0],
                    points[points.len() - 1]
                )));
            }
            let (worst, _) = pieces
                .iter()
                .enumerate()
                .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
                .expect("non-empty");
            let (a, b, _, _) = pieces[worst];
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                return Err(Error::Quadrature(format!(
                    "interval [{a}, {b}] cannot be bisected further"
                )));
            }
            let (v1, e1) = gk15(&f, a, mid);
            let (v2, e2) = gk15(&f, mid, b);
            pieces[worst] = (a, mid, v1, e1);
            pieces.push((mid, b, v2, e2));
        }
    }

    /// `∫_a^∞ f` through the map `x = a + t / (1 - t)`.
    pub fn integrate_to_infinity<F: Fn(f64) -> f64>(&self, f: F, a: f64) -> Result<QuadResult> {
        let g = |t: f64| {
            let s = 1.0 - t;
            let x = a + t / s;
            let v = f(x) / (s * s);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        };
        self.integrate(g, 0.0, 1.0)
    }

    /// `∫_a^∞ cos(ω y) g(y) dy` for `g` decreasing to zero: integrate between
    /// consecutive zeros of the cosine and accelerate the alternating partial
    /// sums with Wynn's epsilon algorithm.
    pub fn cosine_tail<F: Fn(f64) -> f64>(&self, g: F, a: f64, omega: f64) -> Result<QuadResult> {
        if !(omega > 0.0) {
            return Err(Error::invalid("omega", "frequency must be positive"));
        }
        let integrand = |y: f64| (omega * y).cos() * g(y);
        let half_period = PI / omega;
        let first_zero = ((((omega * a - PI / 2.0) / PI).floor() + 1.0) * PI + PI / 2.0) / omega;
        let mut partial = Vec::with_capacity(40);
        let mut total = 0.0;
        let mut err = 0.0;
        let mut intervals = 0;
        let mut lo = a;
        let mut hi = first_zero;
        for _ in 0..40 {
            let piece = self.integrate(integrand, lo, hi)?;
            total += piece.value;
            err += piece.abs_error;
            intervals += piece.intervals;
            partial.push(total);
            lo = hi;
            hi += half_period;
        }
        let n = partial.len();
        let accelerated = wynn_epsilon(&partial);
        let coarse = wynn_epsilon(&partial[..n - 6]);
        Ok(QuadResult {
            value: accelerated,
            abs_error: err + (accelerated - coarse).abs(),
            intervals,
        })
    }
}

/// Wynn's epsilon extrapolation of a sequence of partial sums.
pub fn wynn_epsilon(sums: &[f64]) -> f64 {
    let n = sums.len();
    if n < 3 {
        return sums.last().copied().unwrap_or(0.0);
    }
    let mut prev = vec![0.0; n + 1];
    let mut cur = sums.to_vec();
    let mut best = sums[n - 1];
    for k in 1..n {
        if cur.len() < 2 {
            break;
        }
        let mut next = Vec::with_capacity(cur.len() - 1);
        for j in 0..cur.len() - 1 {
            let d = cur[j + 1] - cur[j];
            if d == 0.0 {
                return if k % 2 == 1 { cur[j + 1] } else { best };
            }
            next.push(prev[j + 1] + 1.0 / d);
        }
        prev = cur;
        cur = next;
        if k % 2 == 0 {
            if let Some(&v) = cur.last() {
                if v.is_finite() {
                    best = v;
                }
            }
        }
    }
    best
}

/// Trapezoid rule on uniformly spaced samples.
pub fn trapezoid(values: &[f64], spacing: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => spacing * (values[1..n - 1].iter().sum::<f64>() + 0.5 * (values[0] + values[n - 1])),
    }
}
