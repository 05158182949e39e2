//! Conditional predictive ordinates and the log pseudo marginal likelihood.
//!
//! CPOᵢ is the leave-one-out predictive density of observation xᵢ,
//! estimated without refitting as the harmonic mean of its likelihood over
//! posterior draws. LPML = Σ ln CPOᵢ; larger is better.
//!
//! The comparison scores one set of population-parameter draws under both
//! observation densities: the selection-corrected model says the sample
//! follows the size-tilted density, the uncorrected one says it follows the
//! population density itself. Only the observation model changes between
//! the two reports.

use crate::dataset::TransectData;
use crate::gengamma::{gg_log_pdf, GenGammaParams, ModelVariant};
use crate::numerics::log_sum_exp;
use crate::sampler::PosteriorDraw;
use crate::{Error, Result};

/// Per-observation CPO values and their sum of logs.
#[derive(Debug, Clone, PartialEq)]
pub struct CpoReport {
    /// CPO per observation, in data order (strata in order, widths within).
    pub cpo: Vec<f64>,
    /// Σ ln CPOᵢ.
    pub lpml: f64,
    /// The observation density the likelihoods used.
    pub variant: ModelVariant,
    /// Number of posterior draws M behind the harmonic means.
    pub draw_count: usize,
    /// Indices whose ln CPO falls more than two standard deviations below
    /// the per-dataset mean; a reporting convention for outlier screening.
    pub low_outliers: Vec<usize>,
}

/// Harmonic-mean CPO of every observation under `variant`'s observation
/// density, computed in log space from the negated log-likelihoods.
pub fn cpo(data: &TransectData, draws: &[PosteriorDraw], variant: ModelVariant) -> Result<CpoReport> {
    if draws.is_empty() {
        return Err(Error::Domain("no posterior draws".into()));
    }
    for d in draws {
        if d.betas.len() != data.stratum_count() {
            return Err(Error::Domain(
                "draws and data must agree on the stratum count".into(),
            ));
        }
    }
    let ln_m = (draws.len() as f64).ln();
    let mut log_cpo = Vec::with_capacity(data.total_count());
    let mut neg_ll = vec![0.0f64; draws.len()];
    for (i, stratum) in data.strata().iter().enumerate() {
        for &x in &stratum.widths {
            for (h, d) in draws.iter().enumerate() {
                let params = GenGammaParams::new(d.alpha, d.betas[i], d.gamma_shape)?;
                neg_ll[h] = -gg_log_pdf(x, &params, variant)?;
            }
            log_cpo.push(ln_m - log_sum_exp(&neg_ll)?);
        }
    }

    let cpo_values: Vec<f64> = log_cpo.iter().map(|&v| v.exp()).collect();
    let logs: Vec<f64> = cpo_values.iter().map(|c| c.ln()).collect();
    let lpml: f64 = logs.iter().sum();

    let n = logs.len() as f64;
    let mean = lpml / n;
    let sd = (logs.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt();
    let low_outliers = logs
        .iter()
        .enumerate()
        .filter(|(_, &v)| v < mean - 2.0 * sd)
        .map(|(i, _)| i)
        .collect();

    Ok(CpoReport { cpo: cpo_values, lpml, variant, draw_count: draws.len(), low_outliers })
}

/// Which report a comparison favored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComparisonOutcome {
    FirstBetter,
    SecondBetter,
    /// |LPML difference| < 0.01.
    Indistinguishable,
}

/// Result of comparing two CPO reports over the same data.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelComparison {
    pub outcome: ComparisonOutcome,
    /// LPML(first) − LPML(second).
    pub lpml_difference: f64,
    /// ln CPOᵢ(first) − ln CPOᵢ(second) per observation.
    pub log_cpo_differences: Vec<f64>,
}

/// Compare two reports; larger LPML wins, differences below 0.01 tie.
pub fn compare_models(first: &CpoReport, second: &CpoReport) -> Result<ModelComparison> {
    if first.cpo.len() != second.cpo.len() {
        return Err(Error::Domain(format!(
            "reports cover {} and {} observations",
            first.cpo.len(),
            second.cpo.len()
        )));
    }
    let lpml_difference = first.lpml - second.lpml;
    let outcome = if lpml_difference.abs() < 0.01 {
        ComparisonOutcome::Indistinguishable
    } else if lpml_difference > 0.0 {
        ComparisonOutcome::FirstBetter
    } else {
        ComparisonOutcome::SecondBetter
    };
    let log_cpo_differences = first
        .cpo
        .iter()
        .zip(&second.cpo)
        .map(|(a, b)| a.ln() - b.ln())
        .collect();
    Ok(ModelComparison { outcome, lpml_difference, log_cpo_differences })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{embedded_replication, Replication};
    use approx::assert_abs_diff_eq;

    const LB: ModelVariant = ModelVariant::LengthBiased;

    fn fixed_draw(alpha: f64, gamma_shape: f64, betas: Vec<f64>) -> PosteriorDraw {
        let phis = betas.iter().map(|b| b.powf(-gamma_shape)).collect();
        PosteriorDraw { alpha, gamma_shape, phis, betas }
    }

    #[test]
    fn single_draw_cpo_is_the_likelihood() {
        let data = embedded_replication(Replication::One);
        let draw = fixed_draw(1.17, 1.7, vec![0.71, 1.41, 1.24]);
        let report = cpo(&data, std::slice::from_ref(&draw), LB).unwrap();
        assert_eq!(report.draw_count, 1);
        let mut idx = 0;
        for (i, stratum) in data.strata().iter().enumerate() {
            for &x in &stratum.widths {
                let params = GenGammaParams::new(1.17, draw.betas[i], 1.7).unwrap();
                let want = gg_log_pdf(x, &params, LB).unwrap().exp();
                assert_abs_diff_eq!(report.cpo[idx], want, epsilon = 1e-12);
                idx += 1;
            }
        }
    }

    #[test]
    fn lpml_is_sum_of_log_cpo() {
        let data = embedded_replication(Replication::One);
        let draws = vec![
            fixed_draw(1.17, 1.7, vec![0.71, 1.41, 1.24]),
            fixed_draw(1.4, 1.3, vec![0.5, 0.9, 1.0]),
            fixed_draw(0.9, 1.1, vec![0.6, 1.2, 1.1]),
        ];
        let report = cpo(&data, &draws, LB).unwrap();
        let sum: f64 = report.cpo.iter().map(|c| c.ln()).sum();
        assert_abs_diff_eq!(report.lpml, sum, epsilon = 1e-12);
        assert!(report.cpo.iter().all(|&c| c > 0.0));
    }

    #[test]
    fn constant_likelihood_and_duplicate_draws() {
        let data = embedded_replication(Replication::One);
        let draw = fixed_draw(1.17, 1.7, vec![0.71, 1.41, 1.24]);
        // identical draws: harmonic mean of a constant is the constant
        let dups = vec![draw.clone(); 7];
        let once = cpo(&data, std::slice::from_ref(&draw), LB).unwrap();
        let many = cpo(&data, &dups, LB).unwrap();
        for (a, b) in once.cpo.iter().zip(&many.cpo) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
        // permutation invariance
        let mut draws = vec![
            fixed_draw(1.17, 1.7, vec![0.71, 1.41, 1.24]),
            fixed_draw(1.4, 1.3, vec![0.5, 0.9, 1.0]),
            fixed_draw(0.9, 1.1, vec![0.6, 1.2, 1.1]),
        ];
        let fwd = cpo(&data, &draws, LB).unwrap();
        draws.reverse();
        let rev = cpo(&data, &draws, LB).unwrap();
        for (a, b) in fwd.cpo.iter().zip(&rev.cpo) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn harmonic_mean_bounded_by_arithmetic_mean() {
        let data = embedded_replication(Replication::One);
        let draws = vec![
            fixed_draw(1.17, 1.7, vec![0.71, 1.41, 1.24]),
            fixed_draw(1.4, 1.3, vec![0.5, 0.9, 1.0]),
            fixed_draw(0.9, 1.1, vec![0.6, 1.2, 1.1]),
            fixed_draw(2.0, 2.0, vec![0.8, 1.0, 1.2]),
        ];
        let report = cpo(&data, &draws, LB).unwrap();
        let mut idx = 0;
        for (i, stratum) in data.strata().iter().enumerate() {
            for &x in &stratum.widths {
                let arith: f64 = draws
                    .iter()
                    .map(|d| {
                        let p = GenGammaParams::new(d.alpha, d.betas[i], d.gamma_shape).unwrap();
                        gg_log_pdf(x, &p, LB).unwrap().exp()
                    })
                    .sum::<f64>()
                    / draws.len() as f64;
                assert!(
                    report.cpo[idx] <= arith * (1.0 + 1e-12),
                    "harmonic {} > arithmetic {arith}",
                    report.cpo[idx]
                );
                idx += 1;
            }
        }
    }

    #[test]
    fn comparisons_and_errors() {
        let data = embedded_replication(Replication::One);
        let draws = vec![
            fixed_draw(1.17, 1.7, vec![0.71, 1.41, 1.24]),
            fixed_draw(1.4, 1.3, vec![0.5, 0.9, 1.0]),
        ];
        let biased = cpo(&data, &draws, LB).unwrap();
        let unweighted = cpo(&data, &draws, ModelVariant::Unweighted).unwrap();
        let cmp = compare_models(&biased, &unweighted).unwrap();
        assert_abs_diff_eq!(cmp.lpml_difference, biased.lpml - unweighted.lpml, epsilon = 1e-12);
        assert_eq!(cmp.log_cpo_differences.len(), 46);

        let tie = compare_models(&biased, &biased).unwrap();
        assert_eq!(tie.outcome, ComparisonOutcome::Indistinguishable);
        assert_abs_diff_eq!(tie.lpml_difference, 0.0, epsilon = 0.0);

        let mut truncated = biased.clone();
        truncated.cpo.pop();
        assert!(compare_models(&biased, &truncated).is_err());
        assert!(cpo(&data, &[], LB).is_err());
    }

    #[test]
    fn single_observation_comparison_direction() {
        let a = CpoReport {
            cpo: vec![(-1.0f64).exp()],
            lpml: -1.0,
            variant: LB,
            draw_count: 1,
            low_outliers: vec![],
        };
        let b = CpoReport {
            cpo: vec![(-2.0f64).exp()],
            lpml: -2.0,
            variant: ModelVariant::Unweighted,
            draw_count: 1,
            low_outliers: vec![],
        };
        let cmp = compare_models(&a, &b).unwrap();
        assert_eq!(cmp.outcome, ComparisonOutcome::FirstBetter);
        assert_abs_diff_eq!(cmp.lpml_difference, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(cmp.log_cpo_differences[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn scaling_a_likelihood_shifts_its_log_cpo_exactly() {
        // CPO_j = [mean(1/f_j)]^{-1}: scaling every draw's likelihood of
        // one observation by c < 1 moves ln CPO_j by exactly ln c, checked
        // through the same log-space estimator path.
        let harmonic = |log_lik: &[f64]| {
            let neg: Vec<f64> = log_lik.iter().map(|v| -v).collect();
            (log_lik.len() as f64).ln() - log_sum_exp(&neg).unwrap()
        };
        let log_lik = [-0.4, -1.7, -0.9, -2.3];
        let c: f64 = 0.37;
        let scaled: Vec<f64> = log_lik.iter().map(|v| v + c.ln()).collect();
        assert_abs_diff_eq!(harmonic(&scaled), harmonic(&log_lik) + c.ln(), epsilon = 1e-12);
    }
}
