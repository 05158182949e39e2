//! Finite-population-size machinery: the Horvitz–Thompson estimate from the
//! calibration replication, proportional allocation across strata,
//! calibration of the selection rate μ₀, and negative-binomial draws of the
//! unknown stratum sizes Nᵢ.

use rand::Rng;
use rand_distr::{Distribution, Gamma, Open01, Poisson};

use crate::dataset::TransectData;
use crate::{Error, Result};

/// Horvitz–Thompson estimate of the population size: W·Σ 1/xᵢ, using the
/// length-biased inclusion probabilities πᵢ = xᵢ/W.
///
/// Returned unrounded; callers round for display.
pub fn ht_population_estimate(widths: &[f64], baseline_length: f64) -> Result<f64> {
    if widths.is_empty() {
        return Err(Error::Domain("no widths".into()));
    }
    for &x in widths {
        if !x.is_finite() || x <= 0.0 || x >= baseline_length {
            return Err(Error::Domain(format!(
                "width {x} outside (0, {baseline_length})"
            )));
        }
    }
    Ok(baseline_length * widths.iter().map(|&x| 1.0 / x).sum::<f64>())
}

/// Split a total size estimate across strata in proportion to the observed
/// sample sizes: N̂ᵢ = N̂·nᵢ/Σnⱼ.
pub fn proportional_allocation(n_hat: f64, stratum_sizes: &[usize]) -> Vec<f64> {
    let total: usize = stratum_sizes.iter().sum();
    stratum_sizes
        .iter()
        .map(|&n| n_hat * n as f64 / total as f64)
        .collect()
}

/// Solve nᵢ = μ₀·N̂ᵢ for μ₀. Under proportional allocation the per-stratum
/// ratios are identical; they are checked to agree within 1e−9 and the
/// first is returned. The full-census boundary μ₀ = 1 is rejected.
pub fn estimate_mu0(stratum_sizes: &[usize], allocated: &[f64]) -> Result<f64> {
    if stratum_sizes.is_empty() || stratum_sizes.len() != allocated.len() {
        return Err(Error::Domain("stratum sizes and allocations must align".into()));
    }
    let ratios: Vec<f64> = stratum_sizes
        .iter()
        .zip(allocated)
        .map(|(&n, &a)| n as f64 / a)
        .collect();
    let first = ratios[0];
    for (i, &r) in ratios.iter().enumerate() {
        if (r - first).abs() > 1e-9 {
            return Err(Error::Numerical(format!(
                "allocation not proportional: ratio {r} in stratum {i} vs {first}"
            )));
        }
    }
    if !(first > 0.0 && first < 1.0) {
        return Err(Error::Domain(format!("mu0 = {first} must lie strictly in (0, 1)")));
    }
    Ok(first)
}

/// Per-stratum sample sizes nᵢ plus the shared selection rate μ₀,
/// parameterizing the negative-binomial posteriors of the stratum sizes.
///
/// μ₀ = 1 is accepted as a degenerate census mode (Nᵢ ≡ nᵢ), used by tests
/// and diagnostics; calibration itself always yields μ₀ < 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SizePrior {
    sample_sizes: Vec<usize>,
    mu0: f64,
}

impl SizePrior {
    pub fn new(sample_sizes: Vec<usize>, mu0: f64) -> Result<Self> {
        if sample_sizes.is_empty() || sample_sizes.iter().any(|&n| n == 0) {
            return Err(Error::Data("every stratum needs a sample size >= 1".into()));
        }
        if !(mu0 > 0.0 && mu0 <= 1.0) {
            return Err(Error::Data(format!("mu0 = {mu0} must lie in (0, 1]")));
        }
        Ok(Self { sample_sizes, mu0 })
    }

    pub fn from_data(data: &TransectData, mu0: f64) -> Result<Self> {
        Self::new(data.stratum_sizes(), mu0)
    }

    pub fn sample_sizes(&self) -> &[usize] {
        &self.sample_sizes
    }

    pub fn mu0(&self) -> f64 {
        self.mu0
    }

    pub fn stratum_count(&self) -> usize {
        self.sample_sizes.len()
    }
}

/// Draw one stratum size Nᵢ ≥ nᵢ from its negative-binomial posterior:
/// Nᵢ − nᵢ is the failure count before the nᵢ-th success at rate μ₀.
///
/// Small nᵢ (≤ 64) sum nᵢ exact geometric draws; larger nᵢ use the
/// gamma–Poisson mixture.
pub fn sample_population_size<R: Rng + ?Sized>(
    prior: &SizePrior,
    stratum_index: usize,
    rng: &mut R,
) -> u64 {
    let n = prior.sample_sizes[stratum_index] as u64;
    let p = prior.mu0;
    if p == 1.0 {
        return n;
    }
    let failures = if n <= 64 {
        let ln_q = (1.0 - p).ln();
        (0..n)
            .map(|_| {
                let u: f64 = Open01.sample(rng);
                (u.ln() / ln_q).floor() as u64
            })
            .sum()
    } else {
        let lambda: f64 = Gamma::new(n as f64, (1.0 - p) / p)
            .expect("valid gamma parameters")
            .sample(rng);
        Poisson::new(lambda).expect("valid poisson rate").sample(rng) as u64
    };
    n + failures
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{embedded_replication, Replication};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn ht_estimate_reference() {
        let two = embedded_replication(Replication::Two);
        let widths: Vec<f64> = two.all_widths().collect();
        assert_eq!(widths.len(), 43);
        let n_hat = ht_population_estimate(&widths, 125.0).unwrap();
        assert_eq!(n_hat.round() as i64, 10_061);
        // homogeneity in W
        let doubled = ht_population_estimate(&widths, 250.0).unwrap();
        assert_abs_diff_eq!(doubled, 2.0 * n_hat, epsilon = 1e-6);
    }

    #[test]
    fn ht_estimate_small_cases() {
        assert!(ht_population_estimate(&[125.0], 125.0).is_err());
        assert_abs_diff_eq!(ht_population_estimate(&[62.5], 125.0).unwrap(), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            ht_population_estimate(&[1.0, 1.0], 125.0).unwrap(),
            250.0,
            epsilon = 1e-12
        );
        assert!(ht_population_estimate(&[], 125.0).is_err());
        assert!(ht_population_estimate(&[0.0], 125.0).is_err());
    }

    #[test]
    fn allocation_reference() {
        let two = embedded_replication(Replication::Two);
        let widths: Vec<f64> = two.all_widths().collect();
        let n_hat = ht_population_estimate(&widths, 125.0).unwrap();
        let alloc = proportional_allocation(n_hat, &[18, 22, 6]);
        let rounded: Vec<i64> = alloc.iter().map(|a| a.round() as i64).collect();
        assert_eq!(rounded, vec![3_937, 4_812, 1_312]);
        assert_abs_diff_eq!(alloc.iter().sum::<f64>(), n_hat, epsilon = 1e-9);

        // equal sizes split in equal thirds; one stratum gets everything
        let thirds = proportional_allocation(9.0, &[5, 5, 5]);
        for t in &thirds {
            assert_abs_diff_eq!(*t, 3.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(proportional_allocation(7.5, &[4])[0], 7.5, epsilon = 1e-12);
    }

    #[test]
    fn mu0_reference() {
        let mu0 = estimate_mu0(&[18, 22, 6], &[3937.4, 4812.3444444444444, 1312.4666666666667]);
        // ratios agree only under exact proportionality; rebuild them exactly
        let alloc = proportional_allocation(10061.376839108, &[18, 22, 6]);
        let mu0_exact = estimate_mu0(&[18, 22, 6], &alloc).unwrap();
        assert_abs_diff_eq!(mu0_exact, 0.004571938884268685, epsilon = 1e-9);
        assert_eq!(format!("{:.4}", mu0_exact), "0.0046");
        // hand-rolled non-proportional allocation errors
        assert!(mu0.is_err());
        // boundary census rejected
        assert!(estimate_mu0(&[10], &[10.0]).is_err());
        assert_abs_diff_eq!(estimate_mu0(&[10], &[1000.0]).unwrap(), 0.01, epsilon = 1e-12);
    }

    #[test]
    fn size_prior_validation() {
        assert!(SizePrior::new(vec![], 0.5).is_err());
        assert!(SizePrior::new(vec![0], 0.5).is_err());
        assert!(SizePrior::new(vec![3], 0.0).is_err());
        assert!(SizePrior::new(vec![3], 1.2).is_err());
        assert!(SizePrior::new(vec![3], 1.0).is_ok());
    }

    #[test]
    fn census_boundary_is_degenerate() {
        let prior = SizePrior::new(vec![18, 22, 6], 1.0).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        for i in 0..3 {
            for _ in 0..100 {
                assert_eq!(sample_population_size(&prior, i, &mut rng), prior.sample_sizes()[i] as u64);
            }
        }
    }

    #[test]
    fn negative_binomial_moments() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let reps = 100_000;

        // n=18, mu0=0.0046: mean n/mu0 = 3913.04
        let prior = SizePrior::new(vec![18], 0.0046).unwrap();
        let draws: Vec<f64> = (0..reps)
            .map(|_| sample_population_size(&prior, 0, &mut rng) as f64)
            .collect();
        let mean = draws.iter().sum::<f64>() / reps as f64;
        assert!((mean - 3913.04).abs() < 40.0, "mean {mean}");
        let var = draws.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (reps - 1) as f64;
        let want_var = 18.0 * (1.0 - 0.0046) / (0.0046 * 0.0046);
        // SE of the sample variance ~ var*sqrt(2/reps)
        let se = want_var * (2.0 / reps as f64).sqrt();
        assert!((var - want_var).abs() < 5.0 * se, "var {var} vs {want_var}");

        // n=1, mu0=0.5: geometric with mean 1/mu0 = 2
        let prior = SizePrior::new(vec![1], 0.5).unwrap();
        let mean = (0..reps)
            .map(|_| sample_population_size(&prior, 0, &mut rng) as f64)
            .sum::<f64>()
            / reps as f64;
        assert!((mean - 2.0).abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn gamma_poisson_branch_moments() {
        // n > 64 exercises the mixture branch
        let prior = SizePrior::new(vec![100], 0.2).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let reps = 50_000;
        let draws: Vec<f64> = (0..reps)
            .map(|_| sample_population_size(&prior, 0, &mut rng) as f64)
            .collect();
        let mean = draws.iter().sum::<f64>() / reps as f64;
        let want = 100.0 / 0.2;
        let want_var = 100.0 * 0.8 / 0.04;
        assert!((mean - want).abs() < 4.0 * (want_var / reps as f64).sqrt(), "mean {mean}");
    }

    /// Inverse-CDF oracle over the first support points, compared by
    /// chi-square goodness of fit.
    #[test]
    fn negative_binomial_matches_pmf_oracle() {
        for (n, mu0) in [(1usize, 0.3f64), (2, 0.2), (3, 0.4)] {
            let prior = SizePrior::new(vec![n], mu0).unwrap();
            let mut rng = ChaCha12Rng::seed_from_u64(n as u64 * 100 + 17);
            let reps = 40_000usize;
            let support = 50usize;
            let mut observed = vec![0f64; support + 1]; // last cell = tail
            for _ in 0..reps {
                let k = (sample_population_size(&prior, 0, &mut rng) - n as u64) as usize;
                observed[k.min(support)] += 1.0;
            }
            // pmf of failures k: C(k+n-1, k) mu0^n (1-mu0)^k, built by recurrence
            let mut pmf = vec![0f64; support];
            pmf[0] = mu0.powi(n as i32);
            for k in 1..support {
                pmf[k] = pmf[k - 1] * (k + n - 1) as f64 / k as f64 * (1.0 - mu0);
            }
            let tail = 1.0 - pmf.iter().sum::<f64>();
            let mut chi2 = 0.0;
            let mut df = 0usize;
            for k in 0..support {
                let expected = reps as f64 * pmf[k];
                if expected >= 5.0 {
                    chi2 += (observed[k] - expected).powi(2) / expected;
                    df += 1;
                }
            }
            let etail = reps as f64 * tail;
            if etail >= 5.0 {
                chi2 += (observed[support] - etail).powi(2) / etail;
                df += 1;
            }
            let p = crate::numerics::gamma_q(df as f64 / 2.0, chi2 / 2.0).unwrap();
            assert!(p > 0.001, "chi2 {chi2} df {df} p {p} at n={n}, mu0={mu0}");
        }
    }
}
