//! Simulation of discretely observed Itô semimartingales with jumps.

mod class;
mod simulate;
mod spec;
mod stable;

pub use class::{levy_r_mass, minimal_class_bound, verify_class_membership, ClassReport};
pub use simulate::{simulate_path, SamplePath, VOLATILITY_REFINEMENT};
pub use spec::{Drift, JumpComponent, JumpLaw, LogOuVolatility, ModelSpec, Volatility};
pub use stable::{sample_stable_increment, stable_levy_constant, TruncatedStableScheme, SMALL_JUMP_BUDGET};

/// Notes on approximations the simulator makes for `model`, if any.
pub fn simulation_notes(model: &ModelSpec) -> Vec<String> {
    let mut notes = Vec::new();
    if let Volatility::Stochastic(_) = model.volatility {
        notes.push(format!(
            "stochastic volatility: clipped log-OU, C_1 by left Riemann sum on {VOLATILITY_REFINEMENT} sub-steps per interval"
        ));
    }
    for j in &model.jumps {
        if let JumpComponent::TruncatedStable {
            beta,
            scale,
            truncation,
        } = *j
        {
            notes.push(TruncatedStableScheme::new(beta, scale, truncation).describe());
        }
    }
    notes
}
