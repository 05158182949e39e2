//! Bayesian predictive inference of a finite-population mean under
//! length-biased (line-intercept) transect sampling.
//!
//! Shrub widths collected by line-intercept sampling are observed with
//! probability proportional to width, so the sample follows a *weighted*
//! distribution. This crate models the population with the three-parameter
//! generalized gamma family, fits the selection-corrected posterior with a
//! non-Markovian quadrature/grid sampler, predicts the nonsampled units by
//! sampling importance resampling, and checks fit with conditional
//! predictive ordinates (CPO/LPML).
//!
//! The pieces compose into a pipeline:
//!
//! 1. [`dataset`] — stratified width data (embedded survey replications or CSV).
//! 2. [`popsize`] — Horvitz–Thompson size estimate, proportional allocation,
//!    and the negative-binomial population-size prior.
//! 3. [`posterior`] + [`sampler`] — the joint posterior over (α, γ, φ) and
//!    i.i.d. draws from it (plus a Gibbs variant for comparison).
//! 4. [`predict`] — complement draws and SIR-resampled population means.
//! 5. [`modelcheck`] — CPO/LPML comparison of the length-biased and
//!    unweighted observation models.
//! 6. [`simulate`] — synthetic end-to-end recovery studies.
//!
//! # Example
//!
//! ```
//! use lenbias::dataset::{embedded_replication, Replication};
//! use lenbias::gengamma::ModelVariant;
//! use lenbias::sampler::{draw_posterior, SamplerConfig};
//!
//! let data = embedded_replication(Replication::One);
//! let config = SamplerConfig { draw_count: 50, seed: 7, ..Default::default() };
//! let draws = draw_posterior(&data, ModelVariant::LengthBiased, &config).unwrap();
//! assert_eq!(draws.len(), 50);
//! assert!(draws.iter().all(|d| d.alpha > 0.0 && d.gamma_shape > 0.0));
//! ```
//!
//! Runnable end-to-end examples live in `examples/`; the `lenbias` binary
//! wraps the same pipeline behind `fit`, `predict`, `check`, `diagnose` and
//! `simulate` subcommands.

pub mod cli;
pub mod dataset;
mod error;
pub mod gengamma;
pub mod modelcheck;
pub mod numerics;
pub mod popsize;
pub mod posterior;
pub mod predict;
pub mod sampler;
pub mod simulate;
pub mod summary;

pub use error::{Error, Result};
