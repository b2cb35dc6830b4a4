//! Numerical construction of the two Lévy processes whose laws cannot be told
//! apart at rate faster than `(n log n)^{(2-r)/2}`, and checks of the
//! quantities that make them indistinguishable.
//!
//! `X^n` has characteristics `(0, 1 + a_n, F_n)` and `Y^n` has `(0, 1, G_n)`.
//! All logarithms are natural.

mod construction;
mod exponents;
mod pair;

pub use construction::{
    h_fn, h_l2_norm_sq, inner_transforms, inner_transforms_direct, inverse_fourier_h, levy_densities,
    perturbation_constants, small_jump_second_moment, GridSpec, HGrid, InverseTransform, LevyDensities,
};
pub use exponents::{
    characteristic_exponents, zeros_of_h, ExponentGap, ExponentTable, ExponentValues, XRule, X_EXTENT,
};
pub use pair::{build_minimax_pair, minimax_batch, MinimaxDiagnostics, MinimaxPair, K_EXTENT, U_EXTENT_FACTOR, U_SPACING};
