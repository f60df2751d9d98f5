//! Bayesian random-effects meta-regression in the normal-normal
//! hierarchical model, computed semi-analytically.
//!
//! Study estimates `y_i` with known standard errors `sigma_i` are modeled
//! as normal around study means `theta_i`, which in turn are normal around
//! a linear predictor `x_i' beta` with between-study standard deviation
//! `tau`. For fixed `tau` the coefficient posterior is multivariate normal
//! in closed form, and the `tau` marginal has an analytic unnormalized
//! density; the continuous normal mixture over `tau` is then discretized
//! on a divergence-controlled grid of support points. No sampling is
//! involved: results are fast, deterministic and reproducible.
//!
//! Coefficient priors are improper-uniform or multivariate normal;
//! heterogeneity priors are half-normal, half-Cauchy, exponential,
//! improper-uniform, or any tabulated density (e.g. a previous fit's
//! posterior). Under proper priors the marginal likelihood is available,
//! which powers exhaustive model selection and model averaging.
//!
//! ## Entry points
//!
//! - [`inference::fit`] produces a [`inference::FitResult`] with summary
//!   tables, density/CDF/quantile/sampling accessors, shrinkage estimates,
//!   linear combinations and predictions.
//! - [`model_selection`] enumerates covariable subsets and scores them by
//!   marginal likelihood.
//! - [`io`] reads study/design CSVs, serializes fits as JSON, and renders
//!   forest and trend plots as SVG.
//! - [`cli`] wires everything into the `metareg` binary.
//!
//! ## Examples
//!
//! One runnable example per capability, under `examples/`:
//!
//! ```text
//! cargo run -p metareg --example effect_sizes             # raw data -> yi/vi
//! cargo run -p metareg --example two_group_comparison     # subgroup means, shrinkage, sampling
//! cargo run -p metareg --example linear_combinations      # contrasts and predictions
//! cargo run -p metareg --example alternative_codings      # reparametrization + prior transforms
//! cargo run -p metareg --example intercept_only           # plain meta-analysis reduction
//! cargo run -p metareg --example sequential_heterogeneity # tau posterior reused as a prior
//! cargo run -p metareg --example indirect_comparison      # treatment network contrasts
//! cargo run -p metareg --example continuous_covariable    # trend over a continuous moderator
//! cargo run -p metareg --example model_selection          # marginal likelihoods over subsets
//! cargo run -p metareg --example forest_plot              # SVG forest plot
//! ```

pub mod cli;
pub mod effect_sizes;
pub mod error;
pub mod grid;
pub mod inference;
pub mod io;
pub mod mixture;
pub mod model_selection;
pub mod model_spec;
pub mod nnhm;
pub mod numeric;
pub mod tau_posterior;

pub use error::{Error, Result};
pub use inference::{fit, FitOptions, FitResult};
pub use model_spec::{BetaPrior, DesignMatrix, RegressionProblem, StudyDataset, TauPrior};
