//! Prediction of the nonsampled widths and the finite-population mean.
//!
//! Nonsampled units follow the complement-tilted density
//! (1 − x/W)·f(x)/(1 − μ/W). Sampling importance resampling uses the plain
//! population density f as the proposal, so the importance log-ratio of a
//! complement draw is Σ ln(1 − xⱼ/W) − Σᵢ (Nᵢ − nᵢ)·ln(1 − μᵢ/W) with μᵢ
//! the stratum's population mean under the parameter draw.

use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::dataset::TransectData;
use crate::numerics::{self, ln_gamma_raw};
use crate::popsize::{sample_population_size, SizePrior};
use crate::sampler::PosteriorDraw;
use crate::{Error, Result};

/// One SIR-produced draw of the finite-population mean.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationMeanDraw {
    /// Pooled mean f·x̄ₛ + (1 − f)·X̄ₙₛ (meters).
    pub mean: f64,
    /// Unnormalized importance log-ratio of the complement draw.
    pub log_weight: f64,
    /// The drawn stratum sizes Nᵢ.
    pub sizes: Vec<u64>,
    /// n / ΣNᵢ.
    pub sample_fraction: f64,
}

/// Whether the SIR step resamples with or without replacement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ResampleMode {
    #[default]
    WithoutReplacement,
    WithReplacement,
}

/// Kahan-compensated accumulator; the complement weight sums thousands of
/// small ln(1 − x/W) terms.
#[derive(Debug, Clone, Copy, Default)]
struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    fn add(&mut self, value: f64) {
        let y = value - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum
    }
}

/// Stratum population means μᵢ = βᵢ·Γ(α + 1/γ)/Γ(α) under a parameter draw;
/// errors if any μᵢ reaches the baseline length (the complement weight's
/// denominator 1 − μᵢ/W would not be positive).
fn stratum_means(draw: &PosteriorDraw, baseline_length: f64) -> Result<Vec<f64>> {
    let ratio =
        (ln_gamma_raw(draw.alpha + 1.0 / draw.gamma_shape) - ln_gamma_raw(draw.alpha)).exp();
    draw.betas
        .iter()
        .map(|&beta| {
            let mu = beta * ratio;
            if !mu.is_finite() || mu >= baseline_length {
                Err(Error::Numerical(format!(
                    "stratum mean {mu} reaches the baseline length {baseline_length}"
                )))
            } else {
                Ok(mu)
            }
        })
        .collect()
}

/// Importance log-ratio of a realized complement: Σ ln(1 − x/W) over the
/// drawn widths minus Σᵢ (Nᵢ − nᵢ)·ln(1 − μᵢ/W).
pub fn complement_log_weight(
    draw: &PosteriorDraw,
    complement: &[Vec<f64>],
    data: &TransectData,
) -> Result<f64> {
    let w = data.baseline_length();
    let means = stratum_means(draw, w)?;
    let mut acc = KahanSum::default();
    for (widths, &mu) in complement.iter().zip(&means) {
        let denom = (-mu / w).ln_1p();
        for &x in widths {
            acc.add((-x / w).ln_1p());
        }
        acc.add(-(widths.len() as f64) * denom);
    }
    Ok(acc.total())
}

/// Draw the Nᵢ − nᵢ nonsampled widths per stratum from the population
/// density at the parameter draw (proposal values at or above W are
/// redrawn), returning them with their importance log-ratio.
pub fn draw_complement<R: Rng + ?Sized>(
    draw: &PosteriorDraw,
    sizes: &[u64],
    data: &TransectData,
    rng: &mut R,
) -> Result<(Vec<Vec<f64>>, f64)> {
    if sizes.len() != data.stratum_count() || draw.betas.len() != data.stratum_count() {
        return Err(Error::Domain("draw, sizes and data must agree on the stratum count".into()));
    }
    let w = data.baseline_length();
    stratum_means(draw, w)?;
    let mut complement = Vec::with_capacity(sizes.len());
    for (i, stratum) in data.strata().iter().enumerate() {
        let n = stratum.widths.len() as u64;
        if sizes[i] < n {
            return Err(Error::Domain(format!(
                "stratum {i} size {} below its sample size {n}",
                sizes[i]
            )));
        }
        let count = (sizes[i] - n) as usize;
        let gamma = Gamma::new(draw.alpha, 1.0)
            .map_err(|e| Error::Numerical(format!("complement proposal: {e}")))?;
        let inv_g = 1.0 / draw.gamma_shape;
        let beta = draw.betas[i];
        let mut widths = Vec::with_capacity(count);
        while widths.len() < count {
            let x = beta * gamma.sample(rng).powf(inv_g);
            if x < w {
                widths.push(x);
            }
        }
        complement.push(widths);
    }
    let log_weight = complement_log_weight(draw, &complement, data)?;
    Ok((complement, log_weight))
}

/// Run the full prediction: for every posterior draw, sample the stratum
/// sizes from their negative-binomial prior, draw the complement, and pool
/// the sampled and predicted widths into one finite-population mean; then
/// resample ⌈fraction·M⌉ of the candidates with probability proportional to
/// the normalized importance weights.
pub fn population_mean_draws<R: Rng + ?Sized>(
    posterior: &[PosteriorDraw],
    data: &TransectData,
    prior: &SizePrior,
    resample_fraction: f64,
    mode: ResampleMode,
    rng: &mut R,
) -> Result<Vec<PopulationMeanDraw>> {
    if posterior.is_empty() {
        return Err(Error::Domain("no posterior draws".into()));
    }
    if !(resample_fraction > 0.0 && resample_fraction <= 1.0) {
        return Err(Error::Config(format!(
            "resample fraction must lie in (0, 1], got {resample_fraction}"
        )));
    }
    if prior.stratum_count() != data.stratum_count() {
        return Err(Error::Domain("size prior and data must agree on the stratum count".into()));
    }

    let sampled_sum: f64 = data.all_widths().sum();
    let n_total = data.total_count() as f64;

    let mut candidates = Vec::with_capacity(posterior.len());
    for draw in posterior {
        let sizes: Vec<u64> = (0..prior.stratum_count())
            .map(|i| sample_population_size(prior, i, rng))
            .collect();
        let (complement, log_weight) = draw_complement(draw, &sizes, data, rng)?;
        let big_n: u64 = sizes.iter().sum();
        let nonsampled_sum: f64 = complement.iter().flatten().sum();
        let mean = (sampled_sum + nonsampled_sum) / big_n as f64;
        candidates.push(PopulationMeanDraw {
            mean,
            log_weight,
            sizes,
            sample_fraction: n_total / big_n as f64,
        });
    }

    let keep = (resample_fraction * candidates.len() as f64).ceil() as usize;
    resample(candidates, keep, mode, rng)
}

/// Resample `keep` candidates with probability proportional to their
/// normalized importance weights.
fn resample<R: Rng + ?Sized>(
    candidates: Vec<PopulationMeanDraw>,
    keep: usize,
    mode: ResampleMode,
    rng: &mut R,
) -> Result<Vec<PopulationMeanDraw>> {
    let log_weights: Vec<f64> = candidates.iter().map(|c| c.log_weight).collect();
    let log_total = numerics::log_sum_exp(&log_weights)?;
    if !log_total.is_finite() {
        return Err(Error::Numerical("all importance weights underflowed".into()));
    }
    match mode {
        ResampleMode::WithoutReplacement => {
            // exponential-keys weighted sampling: the `keep` smallest
            // Exp(1)/w scores form the without-replacement sample
            let mut scored: Vec<(f64, usize)> = candidates
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let e: f64 = -rng.random::<f64>().max(f64::MIN_POSITIVE).ln();
                    (e.ln() - (c.log_weight - log_total), i)
                })
                .collect();
            scored.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut chosen: Vec<usize> = scored.iter().take(keep).map(|&(_, i)| i).collect();
            chosen.sort_unstable();
            let mut out = Vec::with_capacity(keep);
            let mut candidates = candidates;
            for idx in chosen.into_iter().rev() {
                out.push(candidates.swap_remove(idx));
            }
            out.reverse();
            Ok(out)
        }
        ResampleMode::WithReplacement => {
            let probs: Vec<f64> = log_weights
                .iter()
                .map(|&lw| (lw - log_total).exp())
                .collect();
            let mut cumulative = Vec::with_capacity(probs.len());
            let mut acc = 0.0;
            for p in &probs {
                acc += p;
                cumulative.push(acc);
            }
            Ok((0..keep)
                .map(|_| {
                    let u: f64 = rng.random();
                    let k = cumulative.partition_point(|&c| c < u).min(probs.len() - 1);
                    candidates[k].clone()
                })
                .collect())
        }
    }
}
