//! Batch pipeline drivers behind the command-line surface: configuration
//! parsing, artifact emission, and the fit / predict / check / diagnose /
//! simulate entry points.
//!
//! Config files are flat `key = value` text; command-line flags override
//! file keys. All numeric output uses shortest round-trip decimal
//! formatting, and identical configurations with identical seeds produce
//! byte-identical artifacts.

use std::collections::BTreeMap;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

use crate::dataset::{embedded_replication, load_transects, Replication, TransectData};
use crate::gengamma::ModelVariant;
use crate::modelcheck::{compare_models, cpo, ComparisonOutcome};
use crate::popsize::{ht_population_estimate, proportional_allocation, SizePrior};
use crate::posterior::{delta, delta_double_prime, delta_prime, PriorMode};
use crate::predict::{population_mean_draws, PopulationMeanDraw, ResampleMode};
use crate::sampler::{draw_posterior, gibbs_draw_posterior, PosteriorDraw, SamplerConfig};
use crate::simulate::{recovery_study, SimulationConfig};
use crate::summary::{histogram, FitSummary, HistogramBin, SummaryStats};
use crate::{Error, Result};
use crate::gengamma::GenGammaParams;

/// Where the width data comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    Embedded(Replication),
    Path(PathBuf),
}

impl DataSource {
    pub fn load(&self, baseline_length: f64) -> Result<TransectData> {
        match self {
            DataSource::Embedded(which) => {
                let data = embedded_replication(*which);
                if baseline_length != data.baseline_length() {
                    // re-validate the embedded widths against the requested W
                    TransectData::new(data.strata().to_vec(), baseline_length)
                } else {
                    Ok(data)
                }
            }
            DataSource::Path(path) => {
                let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
                load_transects(file, baseline_length)
            }
        }
    }
}

/// Which posterior sampler drives the run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplerKind {
    Random,
    Gibbs,
}

/// Fully resolved configuration of a pipeline run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub data: DataSource,
    pub baseline_length: f64,
    /// Fixed selection rate; when absent it is calibrated from
    /// `calibrate_from` or falls back to the survey default 0.0046.
    pub mu0: Option<f64>,
    pub calibrate_from: Option<DataSource>,
    pub draws: usize,
    pub grid_points: usize,
    pub seed: u64,
    pub variant: ModelVariant,
    pub prior_mode: PriorMode,
    pub sampler: SamplerKind,
    pub burn_in: usize,
    pub resample_fraction: f64,
    pub with_replacement: bool,
    pub bins: usize,
    pub out_dir: PathBuf,
    /// For `predict`: consume a previously written draws CSV instead of
    /// fitting inline.
    pub draws_csv: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            data: DataSource::Embedded(Replication::One),
            baseline_length: 125.0,
            mu0: None,
            calibrate_from: None,
            draws: 1000,
            grid_points: 400,
            seed: 0,
            variant: ModelVariant::LengthBiased,
            prior_mode: PriorMode::F22,
            sampler: SamplerKind::Random,
            burn_in: 100,
            resample_fraction: 0.1,
            with_replacement: false,
            bins: 30,
            out_dir: PathBuf::from("."),
            draws_csv: None,
        }
    }
}

/// Flat `key = value` configuration with file loading and overrides.
#[derive(Debug, Clone, Default)]
pub struct ConfigMap {
    entries: BTreeMap<String, String>,
}

impl ConfigMap {
    /// Parse `key = value` lines; `#` starts a comment, blank lines are
    /// ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                message: format!("expected key = value, got {raw:?}"),
            })?;
            entries.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Self { entries })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.entries.insert(key.to_string(), value.into());
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    fn parse_num<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse().map(Some).map_err(|e| {
                Error::Config(format!("bad value {raw:?} for {key}: {e}"))
            }),
        }
    }

    fn parse_source(&self, raw: &str) -> DataSource {
        match raw {
            "rep1" => DataSource::Embedded(Replication::One),
            "rep2" => DataSource::Embedded(Replication::Two),
            path => DataSource::Path(PathBuf::from(path)),
        }
    }

    /// Resolve a [`RunConfig`] from the collected keys.
    pub fn build_run_config(&self) -> Result<RunConfig> {
        let mut config = RunConfig::default();
        match (self.get("data"), self.get("embedded")) {
            (Some(_), Some(_)) => {
                return Err(Error::Config("give either data or embedded, not both".into()))
            }
            (Some(path), None) => config.data = DataSource::Path(PathBuf::from(path)),
            (None, Some(which)) => {
                config.data = match which {
                    "rep1" => DataSource::Embedded(Replication::One),
                    "rep2" => DataSource::Embedded(Replication::Two),
                    other => {
                        return Err(Error::Config(format!(
                            "unknown embedded dataset {other:?}; use rep1 or rep2"
                        )))
                    }
                }
            }
            (None, None) => {}
        }
        if let Some(w) = self.parse_num::<f64>("baseline_w")? {
            config.baseline_length = w;
        }
        config.mu0 = self.parse_num::<f64>("mu0")?;
        if let Some(raw) = self.get("calibrate_from") {
            config.calibrate_from = Some(self.parse_source(raw));
        }
        if let Some(m) = self.parse_num::<usize>("draws")? {
            config.draws = m;
        }
        if let Some(g) = self.parse_num::<usize>("grid")? {
            config.grid_points = g;
        }
        if let Some(s) = self.parse_num::<u64>("seed")? {
            config.seed = s;
        }
        if let Some(v) = self.get("variant") {
            config.variant = match v {
                "biased" => ModelVariant::LengthBiased,
                "unbiased" => ModelVariant::Unweighted,
                other => {
                    return Err(Error::Config(format!(
                        "unknown variant {other:?}; use biased or unbiased"
                    )))
                }
            };
        }
        if let Some(p) = self.get("prior") {
            config.prior_mode = match p {
                "f22" => PriorMode::F22,
                "bounded" => {
                    let a0 = self.parse_num::<f64>("a0")?.unwrap_or(10.0);
                    PriorMode::BoundedGamma { a0 }
                }
                other => {
                    return Err(Error::Config(format!(
                        "unknown prior {other:?}; use f22 or bounded"
                    )))
                }
            };
        }
        if let Some(s) = self.get("sampler") {
            config.sampler = match s {
                "random" => SamplerKind::Random,
                "gibbs" => SamplerKind::Gibbs,
                other => {
                    return Err(Error::Config(format!(
                        "unknown sampler {other:?}; use random or gibbs"
                    )))
                }
            };
        }
        if let Some(b) = self.parse_num::<usize>("burn_in")? {
            config.burn_in = b;
        }
        if let Some(f) = self.parse_num::<f64>("resample_fraction")? {
            config.resample_fraction = f;
        }
        if let Some(w) = self.parse_num::<bool>("with_replacement")? {
            config.with_replacement = w;
        }
        if let Some(b) = self.parse_num::<usize>("bins")? {
            config.bins = b;
        }
        if let Some(dir) = self.get("out") {
            config.out_dir = PathBuf::from(dir);
        }
        if let Some(path) = self.get("draws_csv") {
            config.draws_csv = Some(PathBuf::from(path));
        }
        Ok(config)
    }

    /// Resolve a [`SimulationConfig`]; requires the true parameter keys.
    pub fn build_simulation_config(&self) -> Result<SimulationConfig> {
        let parse_list = |key: &str| -> Result<Vec<f64>> {
            let raw = self
                .get(key)
                .ok_or_else(|| Error::Config(format!("simulate needs {key}")))?;
            raw.split(',')
                .map(|t| {
                    t.trim()
                        .parse()
                        .map_err(|e| Error::Config(format!("bad {key} entry {t:?}: {e}")))
                })
                .collect()
        };
        let alpha = self
            .parse_num::<f64>("true_alpha")?
            .ok_or_else(|| Error::Config("simulate needs true_alpha".into()))?;
        let gamma = self
            .parse_num::<f64>("true_gamma")?
            .ok_or_else(|| Error::Config("simulate needs true_gamma".into()))?;
        let betas = parse_list("true_betas")?;
        let sizes: Vec<u64> = parse_list("population_sizes")?
            .into_iter()
            .map(|v| v as u64)
            .collect();
        let true_params = betas
            .iter()
            .map(|&b| GenGammaParams::new(alpha, b, gamma))
            .collect::<Result<Vec<_>>>()?;
        Ok(SimulationConfig {
            true_params,
            population_sizes: sizes,
            baseline_length: self.parse_num::<f64>("baseline_w")?.unwrap_or(20.0),
            replications: self.parse_num::<usize>("replications")?.unwrap_or(50),
            seed: self.parse_num::<u64>("seed")?.unwrap_or(0),
            draws: self.parse_num::<usize>("draws")?.unwrap_or(500),
            grid_points: self.parse_num::<usize>("grid")?.unwrap_or(400),
            resample_fraction: self.parse_num::<f64>("resample_fraction")?.unwrap_or(0.1),
        })
    }

    pub fn out_dir(&self) -> PathBuf {
        self.get("out").map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."))
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Data(format!("json encoding: {e}")))?;
    text.push('\n');
    write_text(path, &text)
}

fn draws_to_csv(draws: &[PosteriorDraw]) -> String {
    let stratum_count = draws[0].betas.len();
    let mut out = String::from("alpha,gamma");
    for i in 1..=stratum_count {
        out.push_str(&format!(",beta{i}"));
    }
    out.push('\n');
    for d in draws {
        out.push_str(&format!("{},{}", d.alpha, d.gamma_shape));
        for b in &d.betas {
            out.push_str(&format!(",{b}"));
        }
        out.push('\n');
    }
    out
}

/// Read a draws CSV produced by [`run_fit`]; the φᵢ are reconstructed from
/// the βᵢ.
pub fn read_draws_csv<R: Read>(reader: R) -> Result<Vec<PosteriorDraw>> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    {
        let headers = csv
            .headers()
            .map_err(|e| Error::Parse { line: 1, message: e.to_string() })?;
        let cols: Vec<&str> = headers.iter().collect();
        if cols.len() < 3 || cols[0] != "alpha" || cols[1] != "gamma" {
            return Err(Error::Parse {
                line: 1,
                message: "expected header alpha,gamma,beta1,..".into(),
            });
        }
    }
    let mut draws = Vec::new();
    for (i, record) in csv.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| Error::Parse { line, message: e.to_string() })?;
        let mut values = Vec::with_capacity(record.len());
        for field in record.iter() {
            values.push(field.parse::<f64>().map_err(|e| Error::Parse {
                line,
                message: format!("bad number {field:?}: {e}"),
            })?);
        }
        if values.len() < 3 {
            return Err(Error::Parse { line, message: "too few columns".into() });
        }
        let (alpha, gamma_shape) = (values[0], values[1]);
        let betas: Vec<f64> = values[2..].to_vec();
        let phis = betas.iter().map(|b| b.powf(-gamma_shape)).collect();
        draws.push(PosteriorDraw { alpha, gamma_shape, phis, betas });
    }
    if draws.is_empty() {
        return Err(Error::Data("draws CSV has no rows".into()));
    }
    Ok(draws)
}

fn fit_draws(data: &TransectData, config: &RunConfig) -> Result<Vec<PosteriorDraw>> {
    let sampler_config = SamplerConfig {
        draw_count: config.draws,
        grid_points: config.grid_points,
        prior_mode: config.prior_mode,
        seed: config.seed,
        burn_in: config.burn_in,
        thin: 1,
    };
    match config.sampler {
        SamplerKind::Random => draw_posterior(data, config.variant, &sampler_config),
        SamplerKind::Gibbs => {
            Ok(gibbs_draw_posterior(data, config.variant, &sampler_config)?.0)
        }
    }
}

/// Selection-rate calibration record included in predict summaries.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mu0Report {
    pub mu0: f64,
    /// Horvitz–Thompson size estimate of the calibration data, if one was
    /// computed.
    pub n_hat: Option<f64>,
    pub allocated: Option<Vec<f64>>,
    pub source: String,
}

fn resolve_mu0(config: &RunConfig, data: &TransectData) -> Result<Mu0Report> {
    if let Some(mu0) = config.mu0 {
        if !(mu0 > 0.0 && mu0 <= 1.0) {
            return Err(Error::Config(format!("mu0 = {mu0} must lie in (0, 1]")));
        }
        return Ok(Mu0Report { mu0, n_hat: None, allocated: None, source: "fixed".into() });
    }
    if let Some(source) = &config.calibrate_from {
        let calibration = source.load(config.baseline_length)?;
        let widths: Vec<f64> = calibration.all_widths().collect();
        let n_hat = ht_population_estimate(&widths, config.baseline_length)?;
        let allocated = proportional_allocation(n_hat, &data.stratum_sizes());
        let mu0 = crate::popsize::estimate_mu0(&data.stratum_sizes(), &allocated)?;
        return Ok(Mu0Report {
            mu0,
            n_hat: Some(n_hat),
            allocated: Some(allocated),
            source: format!("{source:?}"),
        });
    }
    Ok(Mu0Report { mu0: 0.0046, n_hat: None, allocated: None, source: "default".into() })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub variant: String,
    pub sampler: String,
    pub seed: u64,
    pub draw_count: usize,
    pub grid_points: usize,
    pub parameters: FitSummary,
}

/// Artifact paths written by a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifacts {
    pub files: Vec<PathBuf>,
}

/// Fit the posterior and write `draws.csv` plus `fit_summary.json`.
pub fn run_fit(config: &RunConfig) -> Result<(FitReport, Artifacts)> {
    let data = config.data.load(config.baseline_length)?;
    let draws = fit_draws(&data, config)?;
    let report = FitReport {
        variant: config.variant.to_string(),
        sampler: format!("{:?}", config.sampler).to_lowercase(),
        seed: config.seed,
        draw_count: draws.len(),
        grid_points: config.grid_points,
        parameters: FitSummary::from_draws(&draws),
    };
    let draws_path = config.out_dir.join("draws.csv");
    write_text(&draws_path, &draws_to_csv(&draws))?;
    let summary_path = config.out_dir.join("fit_summary.json");
    write_json(&summary_path, &report)?;
    Ok((report, Artifacts { files: vec![draws_path, summary_path] }))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineReport {
    pub mu0: Mu0Report,
    pub resample_fraction: f64,
    pub resampled_count: usize,
    pub population_mean: SummaryStats,
    pub parameters: FitSummary,
}

fn means_to_csv(means: &[PopulationMeanDraw]) -> String {
    let mut out = String::from("mean,log_weight,sample_fraction,total_size\n");
    for m in means {
        let total: u64 = m.sizes.iter().sum();
        out.push_str(&format!(
            "{},{},{},{total}\n",
            m.mean, m.log_weight, m.sample_fraction
        ));
    }
    out
}

fn histogram_to_csv(bins: &[HistogramBin]) -> String {
    let mut out = String::from("left,right,count\n");
    for b in bins {
        out.push_str(&format!("{},{},{}\n", b.left, b.right, b.count));
    }
    out
}

/// The full fit→predict pipeline: posterior draws, complement prediction,
/// SIR resampling, and histogram data for the posterior panels.
pub fn run_pipeline(config: &RunConfig) -> Result<(PipelineReport, Artifacts)> {
    let data = config.data.load(config.baseline_length)?;
    let mut files = Vec::new();

    let draws = match &config.draws_csv {
        Some(path) => {
            let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
            read_draws_csv(file)?
        }
        None => {
            let draws = fit_draws(&data, config)?;
            let draws_path = config.out_dir.join("draws.csv");
            write_text(&draws_path, &draws_to_csv(&draws))?;
            files.push(draws_path);
            draws
        }
    };
    for d in &draws {
        if d.betas.len() != data.stratum_count() {
            return Err(Error::Data(
                "draws do not match the data's stratum count".into(),
            ));
        }
    }

    let mu0 = resolve_mu0(config, &data)?;
    let prior = SizePrior::from_data(&data, mu0.mu0)?;
    let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
    rng.set_stream(u64::MAX); // distinct from the fit's per-draw streams
    let mode = if config.with_replacement {
        ResampleMode::WithReplacement
    } else {
        ResampleMode::WithoutReplacement
    };
    let means = population_mean_draws(
        &draws,
        &data,
        &prior,
        config.resample_fraction,
        mode,
        &mut rng,
    )?;

    let means_path = config.out_dir.join("means.csv");
    write_text(&means_path, &means_to_csv(&means))?;
    files.push(means_path);

    let mean_values: Vec<f64> = means.iter().map(|m| m.mean).collect();
    let mut panels: Vec<(String, Vec<f64>)> = vec![
        ("population_mean".into(), mean_values.clone()),
        ("alpha".into(), draws.iter().map(|d| d.alpha).collect()),
        ("gamma".into(), draws.iter().map(|d| d.gamma_shape).collect()),
    ];
    for i in 0..data.stratum_count() {
        panels.push((format!("beta{}", i + 1), draws.iter().map(|d| d.betas[i]).collect()));
    }
    for (name, values) in &panels {
        let path = config.out_dir.join(format!("hist_{name}.csv"));
        write_text(&path, &histogram_to_csv(&histogram(values, config.bins)))?;
        files.push(path);
    }

    let report = PipelineReport {
        mu0,
        resample_fraction: config.resample_fraction,
        resampled_count: means.len(),
        population_mean: SummaryStats::describe(&mean_values),
        parameters: FitSummary::from_draws(&draws),
    };
    let summary_path = config.out_dir.join("pipeline_summary.json");
    write_json(&summary_path, &report)?;
    files.push(summary_path);
    Ok((report, Artifacts { files }))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub lpml_length_biased: f64,
    pub lpml_unweighted: f64,
    pub winner: String,
    pub lpml_difference: f64,
    pub low_outliers_length_biased: Vec<usize>,
    pub draw_count: usize,
}

/// Fit the selection-corrected posterior once and score the sample under
/// both observation densities, as the survey comparison does. Writes the
/// per-observation CPO table and a summary; prints the LPML table.
pub fn run_check(config: &RunConfig) -> Result<(CheckReport, Artifacts)> {
    let data = config.data.load(config.baseline_length)?;
    let fit_config = RunConfig { variant: ModelVariant::LengthBiased, ..config.clone() };
    let draws = fit_draws(&data, &fit_config)?;

    let biased = cpo(&data, &draws, ModelVariant::LengthBiased)?;
    let unweighted = cpo(&data, &draws, ModelVariant::Unweighted)?;
    let comparison = compare_models(&biased, &unweighted)?;
    let winner = match comparison.outcome {
        ComparisonOutcome::FirstBetter => "length-biased".to_string(),
        ComparisonOutcome::SecondBetter => "unweighted".to_string(),
        ComparisonOutcome::Indistinguishable => "indistinguishable".to_string(),
    };

    let mut table = String::from("index,stratum,width,cpo_length_biased,cpo_unweighted\n");
    let mut idx = 0usize;
    for stratum in data.strata() {
        for &x in &stratum.widths {
            table.push_str(&format!(
                "{idx},{},{x},{},{}\n",
                stratum.transect, biased.cpo[idx], unweighted.cpo[idx]
            ));
            idx += 1;
        }
    }
    let cpo_path = config.out_dir.join("cpo.csv");
    write_text(&cpo_path, &table)?;

    let report = CheckReport {
        lpml_length_biased: biased.lpml,
        lpml_unweighted: unweighted.lpml,
        winner,
        lpml_difference: comparison.lpml_difference,
        low_outliers_length_biased: biased.low_outliers.clone(),
        draw_count: draws.len(),
    };
    let summary_path = config.out_dir.join("check_summary.json");
    write_json(&summary_path, &report)?;

    println!("model                 LPML");
    println!("length-biased      {:>9.2}", report.lpml_length_biased);
    println!("unweighted         {:>9.2}", report.lpml_unweighted);
    println!("winner: {}", report.winner);

    Ok((report, Artifacts { files: vec![cpo_path, summary_path] }))
}

/// Emit the propriety-bound diagnostics (θ, Δ, Δ′, Δ″) per stratum size on
/// a log-spaced θ grid, for external plotting.
pub fn run_diagnose(config: &RunConfig) -> Result<Artifacts> {
    let data = config.data.load(config.baseline_length)?;
    let mut ns: Vec<u32> = vec![2, 6, 18, 22];
    for n in data.stratum_sizes() {
        let n = n as u32;
        if !ns.contains(&n) {
            ns.push(n);
        }
    }
    ns.sort_unstable();

    let points = 200;
    let (lo, hi) = (1e-3f64, 1e4f64);
    let step = (hi / lo).powf(1.0 / (points - 1) as f64);
    let mut out = String::from("n,theta,delta,delta_prime,delta_double_prime\n");
    let mut tail_growth = Vec::new();
    for &n in &ns {
        let mut theta = lo;
        let mut last_decade = 0.0;
        for k in 0..points {
            let d = delta(theta, n)?;
            out.push_str(&format!(
                "{n},{theta},{d},{},{}\n",
                delta_prime(theta, n)?,
                delta_double_prime(theta, n)?
            ));
            if k == points - 1 {
                last_decade = d - delta(theta / 10.0, n)?;
            }
            theta *= step;
        }
        tail_growth.push((n, last_decade));
    }
    let path = config.out_dir.join("delta_diagnostics.csv");
    write_text(&path, &out)?;

    // The bound factor's log increase over the last decade of the grid;
    // still positive, so the curve has not leveled off by theta = 1e4.
    println!("delta growth over theta in [1e3, 1e4]:");
    for (n, growth) in tail_growth {
        println!("  n = {n:>2}: {growth:+.4}  (((n-1)/2)*ln(10) = {:.4})", (n as f64 - 1.0) / 2.0 * 10f64.ln());
    }
    Ok(Artifacts { files: vec![path] })
}

/// Run a recovery study and write its report and per-replication table.
pub fn run_simulate(sim: &SimulationConfig, out_dir: &Path) -> Result<Artifacts> {
    let report = recovery_study(sim)?;
    let json_path = out_dir.join("recovery.json");
    write_json(&json_path, &report)?;

    let mut table =
        String::from("replication,true_mean,lower,upper,covered,sample_size,mu0,error\n");
    for r in &report.replications {
        table.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.replication,
            r.true_mean,
            r.lower,
            r.upper,
            r.covered,
            r.sample_size,
            r.mu0,
            r.error.as_deref().unwrap_or("")
        ));
    }
    let csv_path = out_dir.join("replications.csv");
    write_text(&csv_path, &table)?;

    println!(
        "coverage {:.3} over {} replications ({} failed); mean 90% interval width {:.3}",
        report.coverage,
        report.successes + report.failures,
        report.failures,
        report.mean_interval_width
    );
    Ok(Artifacts { files: vec![json_path, csv_path] })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parsing_and_overrides() {
        let cfg = ConfigMap::parse(
            "# run configuration\nembedded = rep1\ndraws = 50\nseed = 9\nvariant = biased\n",
        )
        .unwrap();
        let run = cfg.build_run_config().unwrap();
        assert_eq!(run.data, DataSource::Embedded(Replication::One));
        assert_eq!(run.draws, 50);
        assert_eq!(run.seed, 9);

        let mut cfg = cfg;
        cfg.set("draws", "75");
        assert_eq!(cfg.build_run_config().unwrap().draws, 75);

        assert!(ConfigMap::parse("oops\n").is_err());
        let both = ConfigMap::parse("data = a.csv\nembedded = rep1\n").unwrap();
        assert!(both.build_run_config().is_err());
        let bad = ConfigMap::parse("draws = many\n").unwrap();
        assert!(bad.build_run_config().is_err());
        let bad_variant = ConfigMap::parse("variant = sideways\n").unwrap();
        assert!(bad_variant.build_run_config().is_err());
    }

    #[test]
    fn simulation_config_from_keys() {
        let cfg = ConfigMap::parse(
            "true_alpha = 1.2\ntrue_gamma = 1.7\ntrue_betas = 0.7, 1.4, 1.2\n\
             population_sizes = 500,500,500\nbaseline_w = 20\nreplications = 3\nseed = 5\n",
        )
        .unwrap();
        let sim = cfg.build_simulation_config().unwrap();
        assert_eq!(sim.true_params.len(), 3);
        assert_eq!(sim.population_sizes, vec![500, 500, 500]);
        assert_eq!(sim.replications, 3);
        assert!(sim.validate().is_ok());

        let missing = ConfigMap::parse("true_alpha = 1.0\n").unwrap();
        assert!(missing.build_simulation_config().is_err());
    }

    #[test]
    fn draws_csv_round_trip() {
        let draws = vec![
            PosteriorDraw {
                alpha: 1.25,
                gamma_shape: 1.5,
                phis: vec![0.71f64.powf(-1.5), 1.41f64.powf(-1.5)],
                betas: vec![0.71, 1.41],
            },
            PosteriorDraw {
                alpha: 0.9,
                gamma_shape: 2.0,
                phis: vec![0.5f64.powf(-2.0), 1.0],
                betas: vec![0.5, 1.0],
            },
        ];
        let text = draws_to_csv(&draws);
        let back = read_draws_csv(text.as_bytes()).unwrap();
        assert_eq!(back.len(), 2);
        for (a, b) in draws.iter().zip(&back) {
            assert_eq!(a.alpha, b.alpha);
            assert_eq!(a.gamma_shape, b.gamma_shape);
            assert_eq!(a.betas, b.betas);
            for (pa, pb) in a.phis.iter().zip(&b.phis) {
                assert!(((pa - pb) / pa).abs() < 1e-12);
            }
        }
        assert!(read_draws_csv(&b"alpha,gamma\n"[..]).is_err());
        assert!(read_draws_csv(&b"a,b,c\n1,2,3\n"[..]).is_err());
    }

    #[test]
    fn mu0_resolution_paths() {
        let data = embedded_replication(Replication::One);
        let fixed = RunConfig { mu0: Some(0.01), ..Default::default() };
        assert_eq!(resolve_mu0(&fixed, &data).unwrap().mu0, 0.01);

        let bad = RunConfig { mu0: Some(2.0), ..Default::default() };
        assert!(resolve_mu0(&bad, &data).is_err());

        let default = RunConfig::default();
        let report = resolve_mu0(&default, &data).unwrap();
        assert_eq!(report.mu0, 0.0046);
        assert_eq!(report.source, "default");

        let calibrated = RunConfig {
            calibrate_from: Some(DataSource::Embedded(Replication::Two)),
            ..Default::default()
        };
        let report = resolve_mu0(&calibrated, &data).unwrap();
        assert!((report.mu0 - 0.004571938884268685).abs() < 1e-12);
        assert_eq!(report.n_hat.unwrap().round() as i64, 10_061);
        let allocated = report.allocated.unwrap();
        let rounded: Vec<i64> = allocated.iter().map(|a| a.round() as i64).collect();
        assert_eq!(rounded, vec![3_937, 4_812, 1_312]);
    }
}
