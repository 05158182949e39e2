//! Thin command-line front end over the `lenbias` library pipeline.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lenbias::cli::{self, ConfigMap};

#[derive(Parser)]
#[command(
    name = "lenbias",
    about = "Bayesian finite-population mean inference from length-biased transect samples",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by the pipeline subcommands; every flag overrides the
/// matching config-file key.
#[derive(Args, Clone, Default)]
struct CommonArgs {
    /// Flat key = value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Width data CSV (header replication,transect,width).
    #[arg(long)]
    data: Option<PathBuf>,
    /// Embedded survey dataset: rep1 or rep2.
    #[arg(long, value_parser = ["rep1", "rep2"])]
    embedded: Option<String>,
    /// Baseline length W in meters.
    #[arg(long = "baseline-w")]
    baseline_w: Option<f64>,
    /// Fixed selection rate mu0 in (0, 1].
    #[arg(long)]
    mu0: Option<f64>,
    /// Calibrate mu0 from a second dataset: rep1, rep2 or a CSV path.
    #[arg(long = "calibrate-from")]
    calibrate_from: Option<String>,
    /// Number of posterior draws M.
    #[arg(long)]
    draws: Option<usize>,
    /// Grid resolution G for the inverse-CDF draws.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Observation model: biased or unbiased.
    #[arg(long, value_parser = ["biased", "unbiased"])]
    variant: Option<String>,
    /// Prior on (alpha, gamma): f22 or bounded.
    #[arg(long, value_parser = ["f22", "bounded"])]
    prior: Option<String>,
    /// Bound a0 for the bounded gamma prior.
    #[arg(long)]
    a0: Option<f64>,
    /// Posterior sampler: random or gibbs.
    #[arg(long, value_parser = ["random", "gibbs"])]
    sampler: Option<String>,
    /// Burn-in sweeps (gibbs only).
    #[arg(long = "burn-in")]
    burn_in: Option<usize>,
    /// SIR resample fraction in (0, 1].
    #[arg(long = "resample-fraction")]
    resample_fraction: Option<f64>,
    /// Resample with replacement instead of without.
    #[arg(long = "with-replacement")]
    with_replacement: bool,
    /// Histogram bin count.
    #[arg(long)]
    bins: Option<usize>,
    /// Output directory for artifacts.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Fit the posterior and write draws.csv plus fit_summary.json.
    Fit(CommonArgs),
    /// Full pipeline: fit (or reuse draws), predict the population mean,
    /// write means.csv, summaries and histogram data.
    Predict {
        #[command(flatten)]
        common: CommonArgs,
        /// Reuse a draws.csv written by fit instead of fitting inline.
        #[arg(long = "draws-csv")]
        draws_csv: Option<PathBuf>,
    },
    /// Score the sample under both observation models and report LPML.
    Check(CommonArgs),
    /// Emit the propriety-bound diagnostics (theta, delta and derivatives).
    Diagnose(CommonArgs),
    /// Run a synthetic recovery study from a config file.
    Simulate {
        /// Flat key = value configuration file with the true parameters.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Shared population shape alpha.
        #[arg(long = "true-alpha")]
        true_alpha: Option<f64>,
        /// Shared population power gamma.
        #[arg(long = "true-gamma")]
        true_gamma: Option<f64>,
        /// Per-stratum scales, comma separated.
        #[arg(long = "true-betas")]
        true_betas: Option<String>,
        /// Per-stratum population sizes, comma separated.
        #[arg(long = "population-sizes")]
        population_sizes: Option<String>,
        #[arg(long = "baseline-w")]
        baseline_w: Option<f64>,
        #[arg(long)]
        replications: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        draws: Option<usize>,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long = "resample-fraction")]
        resample_fraction: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn collect(common: &CommonArgs) -> lenbias::Result<ConfigMap> {
    let mut cfg = match &common.config {
        Some(path) => ConfigMap::from_file(path)?,
        None => ConfigMap::default(),
    };
    if let Some(v) = &common.data {
        cfg.set("data", v.display().to_string());
    }
    if let Some(v) = &common.embedded {
        cfg.set("embedded", v.clone());
    }
    if let Some(v) = common.baseline_w {
        cfg.set("baseline_w", v.to_string());
    }
    if let Some(v) = common.mu0 {
        cfg.set("mu0", v.to_string());
    }
    if let Some(v) = &common.calibrate_from {
        cfg.set("calibrate_from", v.clone());
    }
    if let Some(v) = common.draws {
        cfg.set("draws", v.to_string());
    }
    if let Some(v) = common.grid {
        cfg.set("grid", v.to_string());
    }
    if let Some(v) = common.seed {
        cfg.set("seed", v.to_string());
    }
    if let Some(v) = &common.variant {
        cfg.set("variant", v.clone());
    }
    if let Some(v) = &common.prior {
        cfg.set("prior", v.clone());
    }
    if let Some(v) = common.a0 {
        cfg.set("a0", v.to_string());
    }
    if let Some(v) = &common.sampler {
        cfg.set("sampler", v.clone());
    }
    if let Some(v) = common.burn_in {
        cfg.set("burn_in", v.to_string());
    }
    if let Some(v) = common.resample_fraction {
        cfg.set("resample_fraction", v.to_string());
    }
    if common.with_replacement {
        cfg.set("with_replacement", "true");
    }
    if let Some(v) = common.bins {
        cfg.set("bins", v.to_string());
    }
    if let Some(v) = &common.out {
        cfg.set("out", v.display().to_string());
    }
    Ok(cfg)
}

fn run() -> lenbias::Result<()> {
    match Cli::parse().command {
        Command::Fit(common) => {
            let config = collect(&common)?.build_run_config()?;
            let (report, artifacts) = cli::run_fit(&config)?;
            println!(
                "fitted {} draws ({} model, {} sampler); median alpha {:.3}, gamma {:.3}",
                report.draw_count,
                report.variant,
                report.sampler,
                report.parameters.alpha.median,
                report.parameters.gamma.median
            );
            for f in artifacts.files {
                println!("wrote {}", f.display());
            }
        }
        Command::Predict { common, draws_csv } => {
            let mut cfg = collect(&common)?;
            if let Some(path) = draws_csv {
                cfg.set("draws_csv", path.display().to_string());
            }
            let config = cfg.build_run_config()?;
            let (report, artifacts) = cli::run_pipeline(&config)?;
            println!(
                "population mean: median {:.4}, IQR ({:.4}, {:.4}) from {} resampled draws (mu0 = {})",
                report.population_mean.median,
                report.population_mean.q1,
                report.population_mean.q3,
                report.resampled_count,
                report.mu0.mu0
            );
            for f in artifacts.files {
                println!("wrote {}", f.display());
            }
        }
        Command::Check(common) => {
            let config = collect(&common)?.build_run_config()?;
            let (_, artifacts) = cli::run_check(&config)?;
            for f in artifacts.files {
                println!("wrote {}", f.display());
            }
        }
        Command::Diagnose(common) => {
            let config = collect(&common)?.build_run_config()?;
            let artifacts = cli::run_diagnose(&config)?;
            for f in artifacts.files {
                println!("wrote {}", f.display());
            }
        }
        Command::Simulate {
            config,
            true_alpha,
            true_gamma,
            true_betas,
            population_sizes,
            baseline_w,
            replications,
            seed,
            draws,
            grid,
            resample_fraction,
            out,
        } => {
            let mut cfg = match &config {
                Some(path) => ConfigMap::from_file(path)?,
                None => ConfigMap::default(),
            };
            if let Some(v) = true_alpha {
                cfg.set("true_alpha", v.to_string());
            }
            if let Some(v) = true_gamma {
                cfg.set("true_gamma", v.to_string());
            }
            if let Some(v) = true_betas {
                cfg.set("true_betas", v);
            }
            if let Some(v) = population_sizes {
                cfg.set("population_sizes", v);
            }
            if let Some(v) = baseline_w {
                cfg.set("baseline_w", v.to_string());
            }
            if let Some(v) = replications {
                cfg.set("replications", v.to_string());
            }
            if let Some(v) = seed {
                cfg.set("seed", v.to_string());
            }
            if let Some(v) = draws {
                cfg.set("draws", v.to_string());
            }
            if let Some(v) = grid {
                cfg.set("grid", v.to_string());
            }
            if let Some(v) = resample_fraction {
                cfg.set("resample_fraction", v.to_string());
            }
            if let Some(v) = &out {
                cfg.set("out", v.display().to_string());
            }
            let sim = cfg.build_simulation_config()?;
            let artifacts = cli::run_simulate(&sim, &cfg.out_dir())?;
            for f in artifacts.files {
                println!("wrote {}", f.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
