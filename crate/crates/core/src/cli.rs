//! Command-line entry point.

use crate::config::{parse_seed, ConfigMap, LabConfig};
use crate::error::{Error, Result};
use crate::estimators::{estimate, EstimatorConfig, FreqRule};
use crate::harness::{resolve_estimators, run_experiment, ExperimentPlan, TheoryRate};
use crate::io::{
    json_sibling, read_path_csv, write_estimates_csv, write_eta_dump, write_minimax_csv, write_path_csv,
    write_report_csv, write_report_json, EstimateRow,
};
use crate::minimax::minimax_batch;
use crate::models::simulate_path;
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::ffi::OsString;
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "ivlab", version, about = "Integrated volatility estimators and minimax-rate checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Config file with `key = value` lines.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file.
    #[arg(long)]
    pub out: PathBuf,
    /// Base seed; overrides the `seed` key.
    #[arg(long, value_parser = seed_arg)]
    pub seed: Option<u64>,
    /// Worker threads; overrides the `threads` key.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Config override `key=value`, applied after the file. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one path and write it as `time,value` CSV.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Number of observation intervals; overrides `simulate.n`.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Apply estimators to a path CSV.
    Estimate {
        #[command(flatten)]
        common: Common,
        /// Path CSV with a `value` column.
        #[arg(long)]
        input: PathBuf,
        /// Run this estimator instead of the config's `estimators[i]` list.
        #[arg(long, value_enum)]
        variant: Option<Variant>,
        #[arg(long)]
        varpi: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        trunc_scale: f64,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Explicit spectral frequency.
        #[arg(long)]
        u: Option<f64>,
        /// Class index for the spectral frequency rule.
        #[arg(long)]
        r: Option<f64>,
        /// Class bound for the spectral frequency rule; defaults to the model's class check.
        #[arg(long)]
        a: Option<f64>,
    },
    /// Run a Monte Carlo rate experiment; writes a CSV report and a JSON summary next to it.
    Rates {
        #[command(flatten)]
        common: Common,
        /// Comma-separated sample counts; overrides `plan.n_grid`.
        #[arg(long, value_delimiter = ',')]
        n_grid: Option<Vec<usize>>,
        /// Replications per n; overrides `plan.replications`.
        #[arg(long)]
        replications: Option<usize>,
    },
    /// Build the two-point lower-bound construction over an n-grid.
    Minimax {
        #[command(flatten)]
        common: Common,
        /// Class index in (1, 2); overrides `minimax.r`.
        #[arg(long)]
        r: Option<f64>,
        /// Comma-separated sample counts; overrides `minimax.n_grid`.
        #[arg(long, value_delimiter = ',')]
        n_grid: Option<Vec<usize>>,
        /// Directory for per-n `(u, eta, eta')` tables.
        #[arg(long)]
        dump_dir: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    Realized,
    Truncated,
    Multipower,
    Spectral,
}

fn seed_arg(s: &str) -> std::result::Result<u64, String> {
    parse_seed(s).ok_or_else(|| format!("`{s}` is not a seed"))
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) => EXIT_CONFIG,
        Error::Io(_) | Error::Csv(_) | Error::Json(_) => EXIT_IO,
        Error::InvalidParameter { .. } | Error::Quadrature(_) | Error::Numeric(_) | Error::ClassMembership(_) => {
            EXIT_NUMERIC
        }
    }
}

/// Parse `args`, run, and return the process exit code. Diagnostics go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(msg) => {
            println!("{msg}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("ivlab: {e}");
            exit_code(&e)
        }
    }
}

fn load(common: &Common) -> Result<LabConfig> {
    let mut map = match &common.config {
        Some(p) => ConfigMap::load(p).map_err(|e| match e {
            Error::Io(io) => Error::config(format!("cannot read {}: {io}", p.display())),
            other => other,
        })?,
        None => ConfigMap::default(),
    };
    for s in &common.set {
        map.set(s)?;
    }
    LabConfig::from_map(&map)
}

fn configure_threads(common: &Common, cfg: &LabConfig) -> Result<()> {
    if let Some(t) = common.threads.or(cfg.threads) {
        if t == 0 {
            return Err(Error::config("--threads must be positive"));
        }
        // a pool installed earlier in the process stays in place
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    Ok(())
}

fn execute(cmd: Command) -> Result<String> {
    match cmd {
        Command::Simulate { common, n } => {
            let cfg = load(&common)?;
            configure_threads(&common, &cfg)?;
            let n = n
                .or(cfg.simulate_n)
                .ok_or_else(|| Error::config("simulate needs --n or `simulate.n`"))?;
            let seed = common.seed.unwrap_or(cfg.seed);
            let path = simulate_path(&cfg.model, n, seed)?;
            write_path_csv(&path, &common.out)?;
            Ok(format!(
                "wrote {} observations to {} (seed {seed}, C_1 = {})",
                path.values.len(),
                common.out.display(),
                path.true_c1.unwrap_or(f64::NAN)
            ))
        }
        Command::Estimate {
            common,
            input,
            variant,
            varpi,
            trunc_scale,
            k,
            u,
            r,
            a,
        } => {
            let cfg = load(&common)?;
            configure_threads(&common, &cfg)?;
            let estimators = match variant {
                Some(v) => vec![flag_estimator(v, varpi, trunc_scale, k, u, r, a)?],
                None if cfg.estimators.is_empty() => {
                    return Err(Error::config("estimate needs --variant or `estimators[i]` entries"))
                }
                None => cfg.estimators.clone(),
            };
            let (resolved, _) = resolve_estimators(&cfg.model, &estimators)?;
            let path = read_path_csv(&input)?;
            let rows = resolved
                .iter()
                .map(|e| {
                    let res = estimate(&path, e)?;
                    Ok(EstimateRow {
                        estimator: e.label(),
                        n: path.n,
                        seed: path.seed,
                        value: res.value,
                        tuning_used: res.tuning_used,
                        degenerate: res.degenerate,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            write_estimates_csv(&rows, &common.out)?;
            Ok(format!("wrote {} estimate row(s) to {}", rows.len(), common.out.display()))
        }
        Command::Rates {
            common,
            n_grid,
            replications,
        } => {
            let cfg = load(&common)?;
            configure_threads(&common, &cfg)?;
            let plan = ExperimentPlan {
                model: cfg.model.clone(),
                estimators: cfg.estimators.clone(),
                n_grid: n_grid
                    .or(cfg.n_grid.clone())
                    .ok_or_else(|| Error::config("rates needs --n-grid or `plan.n_grid`"))?,
                replications: replications
                    .or(cfg.replications)
                    .ok_or_else(|| Error::config("rates needs --replications or `plan.replications`"))?,
                base_seed: common.seed.unwrap_or(cfg.seed),
            };
            if plan.estimators.is_empty() {
                return Err(Error::config("rates needs at least one `estimators[i]` entry"));
            }
            plan.validate().map_err(|e| Error::config(e.to_string()))?;
            let report = run_experiment(&plan)?;
            write_report_csv(&report, &common.out)?;
            let json = json_sibling(&common.out);
            write_report_json(&plan, &report, &json)?;
            let mut msg = format!("wrote {} and {}", common.out.display(), json.display());
            for r in &report.rates {
                let slope = r.fit.slope.map_or("degenerate".to_string(), |s| format!("{s:.4}"));
                let theory = match &r.theory {
                    TheoryRate::Power { exponent, log_factor } => {
                        format!("-{exponent}{}", if *log_factor { " (log factor)" } else { "" })
                    }
                    TheoryRate::Unknown { .. } => "unknown".to_string(),
                };
                msg.push_str(&format!("\n{}: slope {slope}, theory {theory}", r.estimator));
            }
            Ok(msg)
        }
        Command::Minimax {
            common,
            r,
            n_grid,
            dump_dir,
        } => {
            let cfg = load(&common)?;
            configure_threads(&common, &cfg)?;
            let r = r
                .or(cfg.minimax_r)
                .ok_or_else(|| Error::config("minimax needs --r or `minimax.r`"))?;
            let ns = n_grid
                .or(cfg.minimax_n_grid.clone())
                .ok_or_else(|| Error::config("minimax needs --n-grid or `minimax.n_grid`"))?;
            if ns.is_empty() {
                return Err(Error::config("minimax n-grid is empty"));
            }
            let pairs = minimax_batch(r, &ns)?;
            write_minimax_csv(&pairs, &common.out)?;
            if let Some(dir) = &dump_dir {
                std::fs::create_dir_all(dir)?;
                for p in &pairs {
                    write_eta_dump(p, &dir.join(format!("eta_r{r}_n{}.csv", p.n)))?;
                }
            }
            Ok(format!("wrote {} row(s) to {}", pairs.len(), common.out.display()))
        }
    }
}

fn flag_estimator(
    v: Variant,
    varpi: Option<f64>,
    trunc_scale: f64,
    k: usize,
    u: Option<f64>,
    r: Option<f64>,
    a: Option<f64>,
) -> Result<EstimatorConfig> {
    let cfg = match v {
        Variant::Realized => EstimatorConfig::Realized,
        Variant::Truncated => EstimatorConfig::Truncated {
            varpi: varpi.ok_or_else(|| Error::config("truncated needs --varpi"))?,
            trunc_scale,
        },
        Variant::Multipower => EstimatorConfig::Multipower { k },
        Variant::Spectral => EstimatorConfig::Spectral {
            freq: match (u, r) {
                (Some(u), None) => FreqRule::Explicit { u },
                (None, Some(r)) => FreqRule::Rate { r, a },
                _ => return Err(Error::config("spectral needs exactly one of --u and --r")),
            },
        },
    };
    cfg.validate().map_err(|e| Error::config(e.to_string()))?;
    Ok(cfg)
}
