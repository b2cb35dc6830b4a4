//! Monte Carlo rate experiments.

mod experiment;
mod fit;
mod theory;

pub use experiment::{
    quantile_sorted, replicate, resolve_estimators, run_experiment, summarize, EstimatorRates, ExperimentPlan,
    RateCell, RateReport, Replication,
};
pub use fit::{fit_rate, RateFit};
pub use theory::{minimax_rate, theoretical_exponent, TheoryRate};
