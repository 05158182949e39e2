//! Six-number summaries (min, quartiles, median, mean, max) and histogram
//! bins for the emitted artifacts.

use serde::Serialize;

use crate::sampler::PosteriorDraw;

/// Linear-interpolation quantile (R type 7) of sorted values.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty());
    let h = (sorted.len() as f64 - 1.0) * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Min / 1st Qu. / Median / Mean / 3rd Qu. / Max of one quantity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryStats {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub mean: f64,
    pub q3: f64,
    pub max: f64,
}

impl SummaryStats {
    pub fn describe(values: &[f64]) -> Self {
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        SummaryStats {
            min: sorted[0],
            q1: quantile(&sorted, 0.25),
            median: quantile(&sorted, 0.5),
            mean: sorted.iter().sum::<f64>() / sorted.len() as f64,
            q3: quantile(&sorted, 0.75),
            max: *sorted.last().unwrap(),
        }
    }
}

/// Parameter rows of a fit summary, one per model parameter.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitSummary {
    pub alpha: SummaryStats,
    pub betas: Vec<SummaryStats>,
    pub gamma: SummaryStats,
    pub draw_count: usize,
}

impl FitSummary {
    pub fn from_draws(draws: &[PosteriorDraw]) -> Self {
        let stratum_count = draws[0].betas.len();
        FitSummary {
            alpha: SummaryStats::describe(&draws.iter().map(|d| d.alpha).collect::<Vec<_>>()),
            betas: (0..stratum_count)
                .map(|i| {
                    SummaryStats::describe(&draws.iter().map(|d| d.betas[i]).collect::<Vec<_>>())
                })
                .collect(),
            gamma: SummaryStats::describe(
                &draws.iter().map(|d| d.gamma_shape).collect::<Vec<_>>(),
            ),
            draw_count: draws.len(),
        }
    }
}

/// One histogram bin: [left, right) except the last bin, which is closed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramBin {
    pub left: f64,
    pub right: f64,
    pub count: usize,
}

/// Equal-width histogram over [min, max] of the values.
pub fn histogram(values: &[f64], bins: usize) -> Vec<HistogramBin> {
    assert!(bins >= 1 && !values.is_empty());
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = if max > min { (max - min) / bins as f64 } else { 1.0 };
    let mut counts = vec![0usize; bins];
    for &v in values {
        let k = (((v - min) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(k, count)| HistogramBin {
            left: min + k as f64 * width,
            right: min + (k + 1) as f64 * width,
            count,
        })
        .collect()
}
