//! Posterior-density mathematics for the stratified width model.
//!
//! The sample likelihood is a product of generalized gamma densities with a
//! shared shape pair (α, γ) and per-stratum scales. Working in
//! φᵢ = 1/βᵢ^γ, the φᵢ are conditionally Gamma given (α, γ) and integrate
//! out in closed form, leaving a two-parameter density over (α, γ). The
//! sampler operates on that density mapped to the open unit square by
//! t = v/(1+v).
//!
//! All densities here are unnormalized log densities; normalization happens
//! only inside the sampler's grid/quadrature sums.

use crate::dataset::TransectData;
use crate::gengamma::ModelVariant;
use crate::numerics::{digamma_raw, ln_gamma_raw, trigamma_raw};
use crate::{Error, Result};

/// Prior on the shape pair (α, γ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PriorMode {
    /// f(2,2) priors on both α and γ: π(v) ∝ 1/(1+v)². In transformed
    /// space these cancel the Jacobians exactly, so the unit-square density
    /// is the bare integrated kernel.
    F22,
    /// γ ~ Uniform(1/a₀, a₀) with the f(2,2) prior kept on α. Used by the
    /// propriety argument; a₀ = 10 is the conventional choice.
    BoundedGamma { a0: f64 },
}

impl Default for PriorMode {
    fn default() -> Self {
        PriorMode::F22
    }
}

impl PriorMode {
    pub fn bounded_default() -> Self {
        PriorMode::BoundedGamma { a0: 10.0 }
    }

    /// Log prior density of (α, γ) up to a constant.
    pub(crate) fn log_terms(&self, alpha: f64, gamma: f64) -> f64 {
        match *self {
            PriorMode::F22 => -2.0 * alpha.ln_1p() - 2.0 * gamma.ln_1p(),
            PriorMode::BoundedGamma { a0 } => {
                if gamma < 1.0 / a0 || gamma > a0 {
                    f64::NEG_INFINITY
                } else {
                    -2.0 * alpha.ln_1p() - (a0 - 1.0 / a0).ln()
                }
            }
        }
    }
}

/// The shape pair (α, γ), both strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeParams {
    alpha: f64,
    gamma_shape: f64,
}

impl ShapeParams {
    pub fn new(alpha: f64, gamma_shape: f64) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("gamma", gamma_shape)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self { alpha, gamma_shape })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn gamma_shape(&self) -> f64 {
        self.gamma_shape
    }

    /// The gamma-kernel shape θ the likelihood runs on: α + 1/γ for the
    /// length-biased sample model, α for the unweighted one.
    pub fn theta(&self, variant: ModelVariant) -> f64 {
        match variant {
            ModelVariant::Unweighted => self.alpha,
            ModelVariant::LengthBiased => self.alpha + 1.0 / self.gamma_shape,
        }
    }

    pub fn to_transformed(&self) -> TransformedShapeParams {
        TransformedShapeParams {
            alpha_u: self.alpha / (1.0 + self.alpha),
            gamma_u: self.gamma_shape / (1.0 + self.gamma_shape),
        }
    }
}

/// (α, γ) mapped to the open unit square by v ↦ v/(1+v).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformedShapeParams {
    alpha_u: f64,
    gamma_u: f64,
}

impl TransformedShapeParams {
    pub fn new(alpha_u: f64, gamma_u: f64) -> Result<Self> {
        for (name, v) in [("alpha_u", alpha_u), ("gamma_u", gamma_u)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Domain(format!(
                    "{name} must lie strictly inside (0, 1), got {v}"
                )));
            }
        }
        Ok(Self { alpha_u, gamma_u })
    }

    pub fn alpha_u(&self) -> f64 {
        self.alpha_u
    }

    pub fn gamma_u(&self) -> f64 {
        self.gamma_u
    }

    pub fn to_natural(&self) -> ShapeParams {
        ShapeParams {
            alpha: self.alpha_u / (1.0 - self.alpha_u),
            gamma_shape: self.gamma_u / (1.0 - self.gamma_u),
        }
    }
}

/// Per-stratum γ-powered sums the kernel needs, cached so that the α
/// direction can be scanned cheaply at a fixed γ.
#[derive(Debug, Clone)]
pub(crate) struct PowerSums {
    pub gamma_shape: f64,
    /// (nᵢ, Σⱼ ln xᵢⱼ, ln Σⱼ xᵢⱼ^γ) per stratum; the power sum is kept in
    /// log form so large γ cannot overflow it.
    pub strata: Vec<(usize, f64, f64)>,
}

impl PowerSums {
    pub fn new(data: &TransectData, gamma_shape: f64) -> Self {
        let strata = data
            .strata()
            .iter()
            .map(|s| {
                let n = s.widths.len();
                let sum_ln_x: f64 = s.widths.iter().map(|&x| x.ln()).sum();
                let max = s
                    .widths
                    .iter()
                    .map(|&x| gamma_shape * x.ln())
                    .fold(f64::NEG_INFINITY, f64::max);
                let sum: f64 = s
                    .widths
                    .iter()
                    .map(|&x| (gamma_shape * x.ln() - max).exp())
                    .sum();
                (n, sum_ln_x, max + sum.ln())
            })
            .collect();
        Self { gamma_shape, strata }
    }

    /// The φ-integrated likelihood kernel at shape α (no prior terms):
    /// Σᵢ [(nᵢ−1)·ln γ + γα·Σln x − nᵢθ·ln Σx^γ + ln Γ(nᵢθ) − nᵢ·ln Γ(θ)].
    pub fn integrated_kernel(&self, alpha: f64, variant: ModelVariant) -> f64 {
        let g = self.gamma_shape;
        let theta = match variant {
            ModelVariant::Unweighted => alpha,
            ModelVariant::LengthBiased => alpha + 1.0 / g,
        };
        let ln_gamma_theta = ln_gamma_raw(theta);
        let mut out = 0.0;
        for &(n, sum_ln_x, ln_sum_pow) in &self.strata {
            let nf = n as f64;
            out += (nf - 1.0) * g.ln() + g * alpha * sum_ln_x - nf * theta * ln_sum_pow
                + ln_gamma_raw(nf * theta)
                - nf * ln_gamma_theta;
        }
        out
    }

    /// Kernel plus prior and unit-square Jacobian terms; what the sampler
    /// normalizes over its grids.
    pub fn transformed_kernel(&self, alpha: f64, variant: ModelVariant, prior: PriorMode) -> f64 {
        self.integrated_kernel(alpha, variant)
            + prior.log_terms(alpha, self.gamma_shape)
            + 2.0 * alpha.ln_1p()
            + 2.0 * self.gamma_shape.ln_1p()
    }
}

/// Log of the unnormalized joint posterior density of (α, φ₁..φ_ℓ, γ):
/// priors × γ^{n−ℓ} (ΠΠ x^{γα}) Π φᵢ^{nᵢθ−1} exp(−Σ φᵢ Σx^γ) / Γ(θ)ⁿ.
pub fn log_joint_posterior(
    shape: &ShapeParams,
    phis: &[f64],
    data: &TransectData,
    variant: ModelVariant,
    prior: PriorMode,
) -> Result<f64> {
    if phis.len() != data.stratum_count() {
        return Err(Error::Domain(format!(
            "{} phi values for {} strata",
            phis.len(),
            data.stratum_count()
        )));
    }
    for &phi in phis {
        if !phi.is_finite() || phi <= 0.0 {
            return Err(Error::Domain(format!("phi must be positive, got {phi}")));
        }
    }
    let sums = PowerSums::new(data, shape.gamma_shape);
    let g = shape.gamma_shape;
    let theta = shape.theta(variant);
    let n_total = data.total_count() as f64;
    let ell = data.stratum_count() as f64;

    let mut out =
        prior.log_terms(shape.alpha, g) + (n_total - ell) * g.ln() - n_total * ln_gamma_raw(theta);
    for (&(n, sum_ln_x, ln_sum_pow), &phi) in sums.strata.iter().zip(phis) {
        let nf = n as f64;
        out += g * shape.alpha * sum_ln_x + (nf * theta - 1.0) * phi.ln() - phi * ln_sum_pow.exp();
    }
    Ok(out)
}

/// One stratum's conditional Gamma law for φᵢ (rate parameterization).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaLaw {
    pub shape: f64,
    pub rate: f64,
}

impl GammaLaw {
    pub fn mean(&self) -> f64 {
        self.shape / self.rate
    }

    /// Log density at φ > 0.
    pub fn log_pdf(&self, phi: f64) -> f64 {
        self.shape * self.rate.ln() - ln_gamma_raw(self.shape) + (self.shape - 1.0) * phi.ln()
            - self.rate * phi
    }
}

/// The exact conditional of the φᵢ given (α, γ): independent
/// Gamma(nᵢθ, rate Σⱼ xᵢⱼ^γ) per stratum.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiConditional {
    laws: Vec<GammaLaw>,
}

impl PhiConditional {
    pub fn laws(&self) -> &[GammaLaw] {
        &self.laws
    }

    pub fn log_pdf(&self, phis: &[f64]) -> f64 {
        self.laws
            .iter()
            .zip(phis)
            .map(|(law, &phi)| law.log_pdf(phi))
            .sum()
    }
}

pub fn phi_conditional(
    shape: &ShapeParams,
    data: &TransectData,
    variant: ModelVariant,
) -> PhiConditional {
    let theta = shape.theta(variant);
    let laws = data
        .strata()
        .iter()
        .map(|s| {
            let rate: f64 = s.widths.iter().map(|&x| x.powf(shape.gamma_shape)).sum();
            GammaLaw { shape: s.widths.len() as f64 * theta, rate }
        })
        .collect();
    PhiConditional { laws }
}

/// Log of the unnormalized two-parameter posterior of (α, γ) after the φᵢ
/// are integrated out.
pub fn log_integrated_posterior(
    shape: &ShapeParams,
    data: &TransectData,
    variant: ModelVariant,
    prior: PriorMode,
) -> f64 {
    let sums = PowerSums::new(data, shape.gamma_shape);
    sums.integrated_kernel(shape.alpha, variant) + prior.log_terms(shape.alpha, shape.gamma_shape)
}

/// The unit-square density the sampler draws from: the integrated posterior
/// plus the transformation Jacobians 2·ln(1+α) + 2·ln(1+γ).
///
/// Under the f(2,2) prior the Jacobians cancel the prior factors, so this is
/// the bare integrated kernel.
pub fn transformed_log_density(
    t: &TransformedShapeParams,
    data: &TransectData,
    variant: ModelVariant,
    prior: PriorMode,
) -> Result<f64> {
    let shape = t.to_natural();
    Ok(log_integrated_posterior(&shape, data, variant, prior)
        + 2.0 * shape.alpha.ln_1p()
        + 2.0 * shape.gamma_shape.ln_1p())
}

fn check_delta_args(theta: f64, n: u32) -> Result<f64> {
    if !theta.is_finite() || theta <= 0.0 {
        return Err(Error::Domain(format!("theta must be positive, got {theta}")));
    }
    if n < 1 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    Ok(n as f64)
}

/// Δ(θ) = ln Γ(nθ) − n·ln Γ(θ) − nθ·ln n, the log of the propriety bound's
/// per-stratum factor Γ(nθ)/(n^{nθ} Γ(θ)ⁿ).
pub fn delta(theta: f64, n: u32) -> Result<f64> {
    let nf = check_delta_args(theta, n)?;
    Ok(ln_gamma_raw(nf * theta) - nf * ln_gamma_raw(theta) - nf * theta * nf.ln())
}

/// Δ′(θ) = n·{ψ(nθ) − ψ(θ) − ln n}; nonnegative by the digamma duplication
/// property, so Δ is nondecreasing.
pub fn delta_prime(theta: f64, n: u32) -> Result<f64> {
    let nf = check_delta_args(theta, n)?;
    Ok(nf * (digamma_raw(nf * theta) - digamma_raw(theta) - nf.ln()))
}

/// Δ″(θ) = (n/θ)·{nθ·ψ′(nθ) − θ·ψ′(θ)}; nonpositive because x·ψ′(x)
/// decreases monotonically, so Δ is concave.
pub fn delta_double_prime(theta: f64, n: u32) -> Result<f64> {
    let nf = check_delta_args(theta, n)?;
    Ok(nf / theta * (nf * theta * trigamma_raw(nf * theta) - theta * trigamma_raw(theta)))
}
