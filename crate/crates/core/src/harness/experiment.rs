use super::fit::{fit_rate, RateFit};
use super::theory::{minimax_rate, theoretical_exponent, TheoryRate};
use crate::error::{Error, Result};
use crate::estimators::{estimate, EstimatorConfig, FreqRule};
use crate::models::{
    minimal_class_bound, simulate_path, simulation_notes, verify_class_membership, ClassReport, ModelSpec,
};
use crate::rng::replication_seed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// A Monte Carlo rate experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub model: ModelSpec,
    pub estimators: Vec<EstimatorConfig>,
    pub n_grid: Vec<usize>,
    pub replications: usize,
    pub base_seed: u64,
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if self.estimators.is_empty() {
            return Err(Error::invalid("estimators", "plan has no estimator"));
        }
        for e in &self.estimators {
            e.validate()?;
        }
        if self.n_grid.len() < 3 {
            return Err(Error::invalid("n_grid", "slope fitting needs at least 3 grid points"));
        }
        if self.n_grid[0] == 0 || self.n_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("n_grid", "must be positive and strictly increasing"));
        }
        if self.n_grid.last().is_some_and(|&n| n as u64 >= 1 << 32) {
            return Err(Error::invalid("n_grid", "n must be below 2^32"));
        }
        if self.replications == 0 || self.replications as u64 >= 1 << 32 {
            return Err(Error::invalid("replications", "must lie in [1, 2^32)"));
        }
        Ok(())
    }
}

/// Outcome of one estimator on one simulated path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Replication {
    pub seed: u64,
    pub true_c1: f64,
    pub value: f64,
    pub tuning_used: Option<f64>,
    pub degenerate: bool,
}

impl Replication {
    pub fn error(&self) -> f64 {
        self.value - self.true_c1
    }
}

/// Fill in `A` for spectral rules that leave it open, and check class
/// membership for every spectral rule. Runs before any simulation.
pub fn resolve_estimators(
    model: &ModelSpec,
    estimators: &[EstimatorConfig],
) -> Result<(Vec<EstimatorConfig>, Vec<ClassReport>)> {
    let mut resolved = Vec::with_capacity(estimators.len());
    let mut reports = Vec::new();
    for e in estimators {
        e.validate()?;
        match *e {
            EstimatorConfig::Spectral {
                freq: FreqRule::Rate { r, a },
            } => {
                let a = match a {
                    Some(a) => a,
                    None => {
                        let total = minimal_class_bound(model, r)?;
                        if !total.is_finite() {
                            return Err(Error::ClassMembership(format!(
                                "model has no finite class bound at r = {r}"
                            )));
                        }
                        total
                    }
                };
                let report = verify_class_membership(model, r, a)?;
                if !report.passes {
                    return Err(Error::ClassMembership(report.summary()));
                }
                reports.push(report);
                resolved.push(EstimatorConfig::Spectral {
                    freq: FreqRule::Rate { r, a: Some(a) },
                });
            }
            other => resolved.push(other),
        }
    }
    Ok((resolved, reports))
}

/// Simulate `replications` paths with `n` intervals and apply every
/// estimator. Returns one vector per estimator, in replication order.
///
/// Estimators must already be resolved (see [`resolve_estimators`]).
pub fn replicate(
    model: &ModelSpec,
    estimators: &[EstimatorConfig],
    n: usize,
    replications: usize,
    base_seed: u64,
) -> Result<Vec<Vec<Replication>>> {
    let rows: Vec<Vec<Replication>> = (0..replications)
        .into_par_iter()
        .map(|m| {
            let seed = replication_seed(base_seed, n, m);
            let path = simulate_path(model, n, seed)?;
            let c1 = path.true_c1.expect("simulated paths carry C_1");
            estimators
                .iter()
                .map(|e| {
                    let r = estimate(&path, e)?;
                    Ok(Replication {
                        seed,
                        true_c1: c1,
                        value: r.value,
                        tuning_used: r.tuning_used,
                        degenerate: r.degenerate,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut by_estimator = vec![Vec::with_capacity(replications); estimators.len()];
    for row in rows {
        for (j, rep) in row.into_iter().enumerate() {
            by_estimator[j].push(rep);
        }
    }
    Ok(by_estimator)
}

/// Error summary for one `(estimator, n)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateCell {
    pub estimator: String,
    pub n: usize,
    pub count: usize,
    pub mean_error: f64,
    pub mean_abs_error: f64,
    pub median_abs_error: f64,
    pub rmse: f64,
    pub p90_abs_error: f64,
    pub degenerate_count: usize,
    pub tuning_used: Option<f64>,
    /// `ρ_n * median |error|` with the minimax rate of the model's class index.
    pub rho_scaled_median: f64,
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn summarize(estimator: &str, n: usize, reps: &[Replication], class_r: f64) -> RateCell {
    let errors: Vec<f64> = reps.iter().map(Replication::error).collect();
    let mut abs: Vec<f64> = errors.iter().map(|e| e.abs()).collect();
    abs.sort_by(f64::total_cmp);
    let k = errors.len() as f64;
    let median = quantile_sorted(&abs, 0.5);
    RateCell {
        estimator: estimator.to_string(),
        n,
        count: reps.len(),
        mean_error: errors.iter().sum::<f64>() / k,
        mean_abs_error: abs.iter().sum::<f64>() / k,
        median_abs_error: median,
        rmse: (errors.iter().map(|e| e * e).sum::<f64>() / k).sqrt(),
        p90_abs_error: quantile_sorted(&abs, 0.9),
        degenerate_count: reps.iter().filter(|r| r.degenerate).count(),
        tuning_used: reps.first().and_then(|r| r.tuning_used),
        rho_scaled_median: minimax_rate(n, class_r) * median,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorRates {
    pub estimator: String,
    pub config: EstimatorConfig,
    pub fit: RateFit,
    pub theory: TheoryRate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub n_grid: Vec<usize>,
    pub replications: usize,
    pub base_seed: u64,
    pub class_r: f64,
    /// Class checks run for spectral rules.
    pub class_checks: Vec<ClassReport>,
    pub simulation_notes: Vec<String>,
    /// Cells ordered by estimator, then by `n`.
    pub cells: Vec<RateCell>,
    pub rates: Vec<EstimatorRates>,
}

impl RateReport {
    pub fn cells_for<'a>(&'a self, estimator: &'a str) -> impl Iterator<Item = &'a RateCell> + 'a {
        self.cells.iter().filter(move |c| c.estimator == estimator)
    }
}

/// Run the plan. Class membership for spectral rules is checked before any
/// path is simulated; the report is a deterministic function of the plan.
pub fn run_experiment(plan: &ExperimentPlan) -> Result<RateReport> {
    plan.validate()?;
    let (estimators, class_checks) = resolve_estimators(&plan.model, &plan.estimators)?;
    let labels: Vec<String> = estimators.iter().map(EstimatorConfig::label).collect();
    let r = plan.model.class_r;

    let mut per_n = Vec::with_capacity(plan.n_grid.len());
    for &n in &plan.n_grid {
        per_n.push(replicate(&plan.model, &estimators, n, plan.replications, plan.base_seed)?);
    }

    let mut cells = Vec::new();
    let mut rates = Vec::new();
    for (j, cfg) in estimators.iter().enumerate() {
        let row: Vec<RateCell> = plan
            .n_grid
            .iter()
            .zip(&per_n)
            .map(|(&n, reps)| summarize(&labels[j], n, &reps[j], r))
            .collect();
        let medians: Vec<f64> = row.iter().map(|c| c.median_abs_error).collect();
        let fit = fit_rate(&plan.n_grid, &medians)?;
        rates.push(EstimatorRates {
            estimator: labels[j].clone(),
            config: *cfg,
            fit,
            theory: theoretical_exponent(r, cfg)?,
        });
        cells.extend(row);
    }

    Ok(RateReport {
        n_grid: plan.n_grid.clone(),
        replications: plan.replications,
        base_seed: plan.base_seed,
        class_r: r,
        class_checks,
        simulation_notes: simulation_notes(&plan.model),
        cells,
        rates,
    })
}
