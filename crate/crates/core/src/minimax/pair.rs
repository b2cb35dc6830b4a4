//! The adversarial pair of Lévy processes and its indistinguishability
//! diagnostics.

use super::construction::{
    h_fn, h_l2_norm_sq, inverse_fourier_h, perturbation_constants, small_jump_second_moment, GridSpec, HGrid,
    InverseTransform,
};
use super::exponents::{characteristic_exponents, ExponentGap, ExponentTable, XRule};
use crate::error::{Error, Result};
use crate::quadrature::trapezoid;
use crate::rng::stream_rng;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Spacing of the frequency grid. `η_n` varies on scales no shorter than 1,
/// and `2π / spacing` bounds the `x`-window of the total-variation proxy.
pub const U_SPACING: f64 = 0.25;
/// Frequency grid extent in units of `u_n` (`4u_n = 8√(n log n)`).
pub const U_EXTENT_FACTOR: f64 = 4.0;
/// Half-width of the `x`-window used for `∫|k_n|`.
pub const K_EXTENT: f64 = 10.0;
/// Plateau sample points for the exponent cross-check.
const PLATEAU_PROBES: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimaxDiagnostics {
    /// `∫|η_n|² du` and `∫|η'_n|² du` over the real line.
    pub eta_l2_sq: f64,
    pub eta_prime_l2_sq: f64,
    /// `n² ∫|η_n|²`, `n² ∫|η'_n|²`.
    pub norm_eta: f64,
    pub norm_eta_prime: f64,
    /// `n ∫|k_n(x)| dx` with `k_n` the inverse transform of `η_n`.
    pub tv_proxy: f64,
    /// Share of `∫|k_n|` on `K_EXTENT/2 <= |x| <= K_EXTENT`.
    pub tv_tail_fraction: f64,
    /// `n √((‖η_n‖² + ‖η'_n‖²)/2)`, an upper bound for `n∫|k_n|`.
    pub tv_bound: f64,
    /// `∫(|x|^r ∧ 1) F_n(dx)` and the same for `G_n`.
    pub r_mass_f: f64,
    pub r_mass_g: f64,
    /// `∫_{|x|<=1} x² F_n(dx)`.
    pub small_jump_moment: f64,
    /// `‖H_n‖₂ / (a_n u_n^{1/2})`.
    pub h_l2_ratio: f64,
    /// Relative errors of `∫H_n = a_n` and of the Plancherel identity.
    pub h_integral_rel_error: f64,
    pub plancherel_rel_error: f64,
    /// Largest `|W̃η_n(u) - a_n u²/2| / (a_n u²/2)` on `0 < u <= u_n` (quadrature route).
    pub plateau_rel_error: f64,
    /// Largest deviation of the quadrature `W̃η_n` from the closed form beyond
    /// the plateau, relative to `a_n u²/2`.
    pub gap_rel_error: f64,
    /// `max_u W̃φ_n(u) / ((1 + a_n^{(3-2r)/(4-2r)}) u²)`.
    pub w_phi_ratio: f64,
    pub min_w_phi: f64,
    pub min_w_phi_plus_eta: f64,
    /// `max |η_n|` on `|u| <= u_n`; zero by construction.
    pub plateau_max_eta: f64,
    /// Bound on `|η_n|` at the grid edge relative to `max|η_n|`.
    pub boundary_ratio: f64,
    /// Analytic `η'_n` against central differences at random frequencies.
    pub fd_max_rel_error: f64,
    /// `φ_n, ψ_n <= exp(-u²/2n)` at every tabulated point.
    pub dominated: bool,
    pub x_rule_order: usize,
    pub x_rule_nodes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimaxPair {
    pub r: f64,
    pub n: usize,
    pub a_n: f64,
    pub u_n: f64,
    /// Frequency grid `u_k = k * u_spacing`, `0 <= u_k <= u_extent`; all
    /// tabulated functions of `u` are even.
    pub u_spacing: f64,
    pub u_extent: f64,
    pub h_grid: Vec<f64>,
    pub big_h: HGrid,
    /// Exponents by quadrature at plateau probes and wherever `η_n` is not
    /// negligible.
    pub exponents: ExponentTable,
    pub eta: Vec<f64>,
    pub eta_prime: Vec<f64>,
    /// Integrated volatility of `X^n` and `Y^n`.
    pub c_x: f64,
    pub c_y: f64,
    pub diagnostics: MinimaxDiagnostics,
}

impl MinimaxPair {
    pub fn u_grid(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.eta.len()).map(move |k| k as f64 * self.u_spacing)
    }

    /// Symmetric tabulation `(u, η_n(u))` for `-extent <= u <= extent`.
    pub fn eta_table(&self) -> Vec<(f64, f64)> {
        let m = self.eta.len();
        let mut out = Vec::with_capacity(2 * m - 1);
        for k in (1..m).rev() {
            out.push((-(k as f64) * self.u_spacing, self.eta[k]));
        }
        for k in 0..m {
            out.push((k as f64 * self.u_spacing, self.eta[k]));
        }
        out
    }
}

struct EtaPoint {
    eta: f64,
    eta_prime: f64,
    phi: f64,
    psi: f64,
}

/// `η_n = φ_n - ψ_n` and `η'_n` from the exponents. With the gap `D`,
/// `ψ_n = φ_n e^{D/2n}`, so `η_n = -φ_n expm1(D/2n)` keeps full relative
/// precision, and
/// `η'_n = -(1/n) [(u + a_n u + W̃φ'_n) η_n + (D'/2) ψ_n]`.
fn eta_point(u: f64, n: f64, a: f64, w_phi: f64, w_phi_prime: f64, gap: (f64, f64)) -> EtaPoint {
    let (d, dp) = gap;
    let phi = (-(u * u * (1.0 + a) + 2.0 * w_phi) / (2.0 * n)).exp();
    let eta = -phi * (d / (2.0 * n)).exp_m1();
    let psi = phi - eta;
    let eta_prime = -((u + a * u + w_phi_prime) * eta + 0.5 * dp * psi) / n;
    EtaPoint {
        eta,
        eta_prime,
        phi,
        psi,
    }
}

/// Build the pair for `(r, n)` and evaluate all diagnostics.
pub fn build_minimax_pair(r: f64, n: usize) -> Result<MinimaxPair> {
    let (a, u_n) = perturbation_constants(r, n)?;
    let nf = n as f64;
    let ht = InverseTransform::new(a, u_n);

    let big_h = inverse_fourier_h(a, u_n, &GridSpec::for_cutoff(u_n))?;
    let h_integral_rel_error = (big_h.integral() - a).abs() / a;
    let h_sq_u = h_l2_norm_sq(a, u_n);
    let plancherel_rel_error = (big_h.l2_norm_sq() - h_sq_u).abs() / h_sq_u;
    let h_l2_ratio = big_h.l2_norm_sq().sqrt() / (a * u_n.sqrt());
    let small_jump_moment = small_jump_second_moment(&big_h);

    let rule = XRule::refined(&ht, r)?;
    let gap = ExponentGap::new(a, u_n);

    let du = U_SPACING;
    let m = (U_EXTENT_FACTOR * u_n / du).ceil() as usize;
    let u_extent = m as f64 * du;
    let u_of = |k: usize| k as f64 * du;
    let h_grid: Vec<f64> = (0..=m).map(|k| h_fn(u_of(k), a, u_n)).collect();
    let gaps: Vec<(f64, f64)> = (0..=m).map(|k| gap.eval(u_of(k))).collect();

    // rigorous envelope |η_n| <= expm1(D/2n) e^{-(1+a)u²/2n} (W̃φ_n >= 0)
    let envelope: Vec<f64> = (0..=m)
        .map(|k| {
            let u = u_of(k);
            (gaps[k].0 / (2.0 * nf)).exp_m1() * (-(1.0 + a) * u * u / (2.0 * nf)).exp()
        })
        .collect();
    let env_max = envelope.iter().copied().fold(0.0, f64::max);
    if !(env_max > 0.0) {
        return Err(Error::Numeric("frequency grid does not reach beyond u_n".into()));
    }
    let active: Vec<usize> = (0..=m).filter(|&k| envelope[k] >= 1e-40 * env_max).collect();

    let active_u: Vec<f64> = active.iter().map(|&k| u_of(k)).collect();
    let active_exp = characteristic_exponents(&rule, &active_u);

    let mut eta = vec![0.0; m + 1];
    let mut eta_prime = vec![0.0; m + 1];
    let mut dominated = true;
    for (j, &k) in active.iter().enumerate() {
        let u = u_of(k);
        let p = eta_point(u, nf, a, active_exp.w_phi[j], active_exp.w_phi_prime[j], gaps[k]);
        eta[k] = p.eta;
        eta_prime[k] = p.eta_prime;
        let bound = (-u * u / (2.0 * nf)).exp() * (1.0 + 1e-9);
        dominated &= p.phi <= bound && p.psi <= bound;
    }
    let eta_max = eta.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let boundary_ratio = envelope[m] / eta_max;
    if boundary_ratio > 1e-3 {
        return Err(Error::Numeric(format!(
            "frequency grid does not cover the support of eta_n (edge/peak = {boundary_ratio:e})"
        )));
    }
    let plateau_max_eta = (0..=m)
        .filter(|&k| u_of(k) <= u_n)
        .map(|k| eta[k].abs())
        .fold(0.0, f64::max);

    // plateau cross-check through the x-domain quadrature
    let probes: Vec<f64> = (1..=PLATEAU_PROBES).map(|j| u_n * j as f64 / PLATEAU_PROBES as f64).collect();
    let plateau_exp = characteristic_exponents(&rule, &probes);
    let plateau_rel_error = plateau_exp
        .u
        .iter()
        .zip(&plateau_exp.w_eta)
        .map(|(&u, &w)| (w - a * u * u / 2.0).abs() / (a * u * u / 2.0))
        .fold(0.0, f64::max);
    if plateau_rel_error > 1e-5 {
        return Err(Error::Numeric(format!(
            "W̃η_n misses a_n u²/2 on the plateau by {plateau_rel_error:e}; x-grid refinement required"
        )));
    }
    let gap_rel_error = active_exp
        .u
        .iter()
        .zip(&active_exp.w_eta)
        .map(|(&u, &w)| (w - gap.w_eta(u)).abs() / (a * u * u / 2.0))
        .fold(0.0, f64::max);

    let mut exponents = plateau_exp.clone();
    for j in 0..active_exp.len() {
        if active_exp.u[j] > u_n {
            exponents.push(super::exponents::ExponentValues {
                u: active_exp.u[j],
                w_phi: active_exp.w_phi[j],
                w_eta: active_exp.w_eta[j],
                w_phi_prime: active_exp.w_phi_prime[j],
                w_eta_prime: active_exp.w_eta_prime[j],
            });
        }
    }
    let kfac = 1.0 + a.powf((3.0 - 2.0 * r) / (4.0 - 2.0 * r));
    let w_phi_ratio = exponents
        .u
        .iter()
        .zip(&exponents.w_phi)
        .map(|(&u, &w)| w / (kfac * u * u))
        .fold(0.0, f64::max);
    let min_w_phi = exponents.w_phi.iter().copied().fold(f64::INFINITY, f64::min);
    let min_w_phi_plus_eta = exponents
        .w_phi
        .iter()
        .zip(&exponents.w_eta)
        .map(|(p, e)| p + e)
        .fold(f64::INFINITY, f64::min);

    // even functions: full-line integrals are twice the half-line ones
    let sq: Vec<f64> = eta.iter().map(|v| v * v).collect();
    let eta_l2_sq = 2.0 * trapezoid(&sq, du);
    let sq: Vec<f64> = eta_prime.iter().map(|v| v * v).collect();
    let eta_prime_l2_sq = 2.0 * trapezoid(&sq, du);
    let tv_bound = nf * ((eta_l2_sq + eta_prime_l2_sq) / 2.0).sqrt();

    let (tv_integral, tv_tail_fraction) = k_l1_norm(&eta, du, eta_max);

    let fd_max_rel_error = derivative_check(&rule, &gap, nf, a, &eta, &eta_prime, du, eta_max);

    Ok(MinimaxPair {
        r,
        n,
        a_n: a,
        u_n,
        u_spacing: du,
        u_extent,
        h_grid,
        big_h,
        exponents,
        eta,
        eta_prime,
        c_x: 1.0 + a,
        c_y: 1.0,
        diagnostics: MinimaxDiagnostics {
            eta_l2_sq,
            eta_prime_l2_sq,
            norm_eta: nf * nf * eta_l2_sq,
            norm_eta_prime: nf * nf * eta_prime_l2_sq,
            tv_proxy: nf * tv_integral,
            tv_tail_fraction,
            tv_bound,
            r_mass_f: rule.r_mass_f(),
            r_mass_g: rule.r_mass_g(),
            small_jump_moment,
            h_l2_ratio,
            h_integral_rel_error,
            plancherel_rel_error,
            plateau_rel_error,
            gap_rel_error,
            w_phi_ratio,
            min_w_phi,
            min_w_phi_plus_eta,
            plateau_max_eta,
            boundary_ratio,
            fd_max_rel_error,
            dominated,
            x_rule_order: rule.order,
            x_rule_nodes: rule.nodes(),
        },
    })
}

/// `∫|k_n(x)| dx` over `|x| <= K_EXTENT`, with
/// `k_n(x) = (1/π) ∫_0^∞ cos(ux) η_n(u) du` by the trapezoid rule on the
/// frequency grid. Returns the integral and the share of its outer half.
fn k_l1_norm(eta: &[f64], du: f64, eta_max: f64) -> (f64, f64) {
    let support: Vec<usize> = (0..eta.len()).filter(|&k| eta[k].abs() > 1e-16 * eta_max).collect();
    let (Some(&first), Some(&last)) = (support.first(), support.last()) else {
        return (0.0, 0.0);
    };
    let u_top = last as f64 * du;
    let dx = PI / (8.0 * u_top);
    let mx = (K_EXTENT / dx).ceil() as usize;
    let slice = &eta[first..=last];
    let u0 = first as f64 * du;
    let k_vals: Vec<f64> = (0..=mx)
        .into_par_iter()
        .map(|i| {
            let x = i as f64 * dx;
            // rotate e^{iux} along the grid instead of calling cos per term
            let (s0, c0) = (u0 * x).sin_cos();
            let (sd, cd) = (du * x).sin_cos();
            let (mut c, mut s) = (c0, s0);
            let mut acc = 0.0;
            for &v in slice {
                acc += c * v;
                let nc = c * cd - s * sd;
                s = s * cd + c * sd;
                c = nc;
            }
            (acc * du / PI).abs()
        })
        .collect();
    let total = 2.0 * trapezoid(&k_vals, dx);
    let half = mx / 2;
    let outer = 2.0 * trapezoid(&k_vals[half..], dx);
    (total, if total > 0.0 { outer / total } else { 0.0 })
}

/// Largest `|η'_fd - η'| / max(|η'|, 0.01 max|η'|)` at ten random frequencies
/// where `|η_n| >= 1e-3 max|η_n|`.
#[allow(clippy::too_many_arguments)]
fn derivative_check(
    rule: &XRule,
    gap: &ExponentGap,
    n: f64,
    a: f64,
    eta: &[f64],
    eta_prime: &[f64],
    du: f64,
    eta_max: f64,
) -> f64 {
    let region: Vec<usize> = (0..eta.len()).filter(|&k| eta[k].abs() >= 1e-3 * eta_max).collect();
    let (Some(&lo), Some(&hi)) = (region.first(), region.last()) else {
        return 0.0;
    };
    let (u_lo, u_hi) = (lo as f64 * du, hi as f64 * du);
    let d_max = eta_prime.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let mut rng = stream_rng(0x5eed, 0);
    let eval = |u: f64| {
        let e = rule.exponents_at(u);
        eta_point(u, n, a, e.w_phi, e.w_phi_prime, gap.eval(u))
    };
    let h = 1e-3;
    (0..10)
        .map(|_| {
            let u = u_lo + (u_hi - u_lo) * rng.random::<f64>();
            let fd = (eval(u + h).eta - eval(u - h).eta) / (2.0 * h);
            let an = eval(u).eta_prime;
            (fd - an).abs() / an.abs().max(0.01 * d_max)
        })
        .fold(0.0, f64::max)
}

/// Pairs for every `n` in `ns`, computed in parallel, returned in input order.
pub fn minimax_batch(r: f64, ns: &[usize]) -> Result<Vec<MinimaxPair>> {
    ns.par_iter().map(|&n| build_minimax_pair(r, n)).collect()
}
