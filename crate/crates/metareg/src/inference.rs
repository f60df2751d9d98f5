//! The fitted-posterior API: fitting, marginal and joint summaries,
//! accessors for densities/CDFs/quantiles/samples, credible intervals,
//! shrinkage, linear combinations and predictions.

use nalgebra::{Cholesky, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::grid::{build_grid, PosteriorGrid, DEFAULT_DELTA, DEFAULT_EPSILON};
use crate::mixture::{IntervalMethod, MixtureComponent, MixtureKind, ScalarMixture};
use crate::model_spec::{RegressionProblem, TauPrior};
use crate::nnhm::{build_tau_posterior, conditional_beta_posterior};
use crate::numeric::panel_max;
use crate::tau_posterior::TauPosterior;

/// Coverage of the credible intervals reported in summary tables.
pub const SUMMARY_LEVEL: f64 = 0.95;

/// Accuracy knobs of the discretization.
#[derive(Debug, Clone, Copy)]
pub struct FitOptions {
    /// Divergence bound between adjacent heterogeneity support points.
    pub delta: f64,
    /// Omitted upper tail mass of the heterogeneity posterior.
    pub epsilon: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            delta: DEFAULT_DELTA,
            epsilon: DEFAULT_EPSILON,
        }
    }
}

/// One row of a posterior summary table.
#[derive(Debug, Clone)]
pub struct SummaryRow {
    pub name: String,
    pub mode: f64,
    pub median: f64,
    pub mean: f64,
    pub sd: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
}

/// Marginal posterior summaries (mode/median/mean/sd and shortest
/// credible interval) per parameter or derived quantity.
#[derive(Debug, Clone)]
pub struct SummaryTable {
    pub level: f64,
    pub rows: Vec<SummaryRow>,
}

impl SummaryTable {
    pub fn row(&self, name: &str) -> Option<&SummaryRow> {
        self.rows.iter().find(|r| r.name == name)
    }
}

/// A named linear combination of the coefficients, summarized either as a
/// mean effect or as a prediction (which adds heterogeneity variance).
#[derive(Debug, Clone)]
pub struct SummaryRequest {
    pub name: String,
    pub x: Vec<f64>,
    pub mean: bool,
}

/// Maximum-a-posteriori estimates: the joint (tau, beta) optimum and the
/// per-parameter marginal modes.
#[derive(Debug, Clone)]
pub struct MapEstimates {
    pub joint_tau: f64,
    pub joint_beta: DVector<f64>,
    pub marginal_tau: f64,
    pub marginal_beta: Vec<f64>,
}

/// The fitted posterior: discretized coefficient mixture, continuous
/// heterogeneity posterior, summaries, and (under proper priors) the
/// marginal likelihood. Immutable after fitting; accessors are read-only.
pub struct FitResult {
    problem: RegressionProblem,
    grid: PosteriorGrid,
    tau_posterior: TauPosterior,
    log_marginal_likelihood: Option<f64>,
    summary: SummaryTable,
}

impl std::fmt::Debug for FitResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FitResult")
            .field("k", &self.problem.k())
            .field("d", &self.problem.d())
            .field("grid_nodes", &self.grid.len())
            .field("log_marginal_likelihood", &self.log_marginal_likelihood)
            .finish()
    }
}

/// Fit the meta-regression model: normalize the heterogeneity posterior,
/// discretize it, and precompute the marginal summary table.
pub fn fit(problem: RegressionProblem, options: &FitOptions) -> Result<FitResult> {
    problem.validate()?;
    let tau_posterior = build_tau_posterior(&problem)?;
    let grid = build_grid(&problem, &tau_posterior, options.delta, options.epsilon)?;
    let log_marginal_likelihood = if problem.beta_prior.is_proper() && problem.tau_prior.is_proper()
    {
        problem.tau_prior.verify_proper()?;
        Some(tau_posterior.log_norm_const())
    } else {
        None
    };
    let summary = build_summary(&problem, &grid, &tau_posterior)?;
    Ok(FitResult {
        problem,
        grid,
        tau_posterior,
        log_marginal_likelihood,
        summary,
    })
}

/// Mixture for a single coefficient from a discretized posterior.
pub fn coefficient_mixture(grid: &PosteriorGrid, index: usize) -> Result<ScalarMixture> {
    let d = grid.dim();
    if index >= d {
        return Err(Error::invalid(format!(
            "coefficient index {index} out of range for {d}"
        )));
    }
    ScalarMixture::new(
        MixtureKind::Coefficient,
        grid.nodes
            .iter()
            .map(|n| MixtureComponent {
                weight: n.weight,
                mean: n.moments.mean[index],
                sd: n.moments.covariance[(index, index)].max(0.0).sqrt(),
            })
            .collect(),
    )
}

/// Mixture for a linear combination x'beta; with `mean = false` the
/// heterogeneity variance is added per node, turning the combination into
/// a prediction for a new study mean at covariables x.
pub fn combination_mixture(grid: &PosteriorGrid, x: &[f64], mean: bool) -> Result<ScalarMixture> {
    let d = grid.dim();
    if x.len() != d {
        return Err(Error::invalid(format!(
            "combination vector has length {}, design has {d} columns",
            x.len()
        )));
    }
    let xv = DVector::from_vec(x.to_vec());
    let kind = if mean {
        MixtureKind::CombinationMean
    } else {
        MixtureKind::Prediction
    };
    ScalarMixture::new(
        kind,
        grid.nodes
            .iter()
            .map(|n| {
                let m = xv.dot(&n.moments.mean);
                let mut v = xv.dot(&(&n.moments.covariance * &xv)).max(0.0);
                if !mean {
                    v += n.tau * n.tau;
                }
                MixtureComponent {
                    weight: n.weight,
                    mean: m,
                    sd: v.sqrt(),
                }
            })
            .collect(),
    )
}

/// Shrinkage mixture for study i: the posterior of that study's own mean,
/// pulled from its estimate toward the fitted value.
pub fn shrinkage_mixture(
    problem: &RegressionProblem,
    grid: &PosteriorGrid,
    i: usize,
) -> Result<ScalarMixture> {
    let k = problem.k();
    if i >= k {
        return Err(Error::invalid(format!(
            "study index {i} out of range for {k}"
        )));
    }
    let yi = problem.dataset.y[i];
    let s2 = problem.dataset.sigma[i].powi(2);
    let xi = problem.design.row(i);
    ScalarMixture::new(
        MixtureKind::Shrinkage,
        grid.nodes
            .iter()
            .map(|n| {
                let t2 = n.tau * n.tau;
                let denom = s2 + t2;
                let fitted = xi.dot(&n.moments.mean);
                let m = (t2 * yi + s2 * fitted) / denom;
                let shrink = s2 / denom;
                let v = s2 * t2 / denom
                    + shrink * shrink * xi.dot(&(&n.moments.covariance * &xi)).max(0.0);
                MixtureComponent {
                    weight: n.weight,
                    mean: m,
                    sd: v.max(0.0).sqrt(),
                }
            })
            .collect(),
    )
}

pub(crate) fn mixture_summary_row(name: &str, mix: &ScalarMixture) -> Result<SummaryRow> {
    let (ci_lower, ci_upper) = mix.credible_interval(SUMMARY_LEVEL, IntervalMethod::Shortest)?;
    Ok(SummaryRow {
        name: name.to_string(),
        mode: mix.mode(),
        median: mix.quantile(0.5)?,
        mean: mix.mean(),
        sd: mix.sd(),
        ci_lower,
        ci_upper,
    })
}

fn build_summary(
    problem: &RegressionProblem,
    grid: &PosteriorGrid,
    tau_posterior: &TauPosterior,
) -> Result<SummaryTable> {
    let (tlo, thi) = tau_posterior.credible_interval(SUMMARY_LEVEL, IntervalMethod::Shortest)?;
    let mut rows = vec![SummaryRow {
        name: "tau".to_string(),
        mode: tau_posterior.mode(),
        median: tau_posterior.quantile(0.5)?,
        mean: tau_posterior.mean(),
        sd: tau_posterior.sd(),
        ci_lower: tlo,
        ci_upper: thi,
    }];
    for (j, name) in problem.design.column_names.iter().enumerate() {
        let mix = coefficient_mixture(grid, j)?;
        rows.push(mixture_summary_row(name, &mix)?);
    }
    Ok(SummaryTable {
        level: SUMMARY_LEVEL,
        rows,
    })
}

impl FitResult {
    pub fn problem(&self) -> &RegressionProblem {
        &self.problem
    }

    pub fn grid(&self) -> &PosteriorGrid {
        &self.grid
    }

    pub fn tau_posterior(&self) -> &TauPosterior {
        &self.tau_posterior
    }

    /// ln p(y); present only when both priors are proper.
    pub fn log_marginal_likelihood(&self) -> Option<f64> {
        self.log_marginal_likelihood
    }

    pub fn marginal_likelihood(&self) -> Option<f64> {
        self.log_marginal_likelihood.map(f64::exp)
    }

    pub fn summary(&self) -> &SummaryTable {
        &self.summary
    }

    /// Marginal posterior of coefficient `index` (0-based).
    pub fn coefficient_marginal(&self, index: usize) -> Result<ScalarMixture> {
        coefficient_mixture(&self.grid, index)
    }

    /// Posterior of the linear combination x'beta (`mean = true`) or of a
    /// new study mean at covariables x (`mean = false`).
    pub fn linear_combination(&self, x: &[f64], mean: bool) -> Result<ScalarMixture> {
        combination_mixture(&self.grid, x, mean)
    }

    /// Posterior of study i's own mean (0-based).
    pub fn shrinkage(&self, i: usize) -> Result<ScalarMixture> {
        shrinkage_mixture(&self.problem, &self.grid, i)
    }

    /// Heterogeneity posterior quantile, from the continuous posterior.
    pub fn tau_quantile(&self, p: f64) -> Result<f64> {
        self.tau_posterior.quantile(p)
    }

    pub fn tau_density(&self, tau: f64) -> f64 {
        self.tau_posterior.density(tau)
    }

    pub fn tau_cdf(&self, tau: f64) -> f64 {
        self.tau_posterior.cdf(tau)
    }

    pub fn tau_credible_interval(&self, level: f64, method: IntervalMethod) -> Result<(f64, f64)> {
        self.tau_posterior.credible_interval(level, method)
    }

    /// Draw (tau, beta) samples: tau by inverse-CDF on the continuous
    /// posterior, beta from the exact conditional normal at that tau.
    /// Deterministic for a fixed seed.
    pub fn sample_posterior(&self, n: usize, seed: u64) -> Result<Vec<(f64, DVector<f64>)>> {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let d = self.problem.d();
        let mut draws = Vec::with_capacity(n);
        for _ in 0..n {
            let u: f64 = rng.random::<f64>().clamp(1e-16, 1.0 - 1e-16);
            let tau = self.tau_posterior.quantile(u)?;
            let moments = conditional_beta_posterior(&self.problem, tau)?;
            let chol = Cholesky::new(moments.covariance.clone())
                .ok_or_else(|| Error::numeric("conditional covariance not positive definite"))?;
            let z = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
            let beta = &moments.mean + chol.l() * z;
            draws.push((tau, beta));
        }
        Ok(draws)
    }

    /// Joint and marginal maximum-a-posteriori estimates.
    pub fn map_estimates(&self) -> Result<MapEstimates> {
        let upper = self.tau_posterior.upper();
        let objective = |t: f64| {
            let lp = self.tau_posterior.log_density(t);
            match conditional_beta_posterior(&self.problem, t).and_then(|m| m.log_density_at_mean())
            {
                Ok(h) => lp + h,
                Err(_) => f64::NEG_INFINITY,
            }
        };
        let (joint_tau, _) = panel_max(&objective, 0.0, upper, 64, 1e-9 * (1.0 + upper));
        let joint_beta = conditional_beta_posterior(&self.problem, joint_tau)?.mean;
        let marginal_tau = self.tau_posterior.mode();
        let mut marginal_beta = Vec::with_capacity(self.problem.d());
        for j in 0..self.problem.d() {
            marginal_beta.push(self.coefficient_marginal(j)?.mode());
        }
        Ok(MapEstimates {
            joint_tau,
            joint_beta,
            marginal_tau,
            marginal_beta,
        })
    }

    /// Summary rows for additional combinations or predictions.
    pub fn summarize(&self, extra: &[SummaryRequest]) -> Result<SummaryTable> {
        let mut rows = Vec::with_capacity(extra.len());
        for req in extra {
            let mix = self.linear_combination(&req.x, req.mean)?;
            rows.push(mixture_summary_row(&req.name, &mix)?);
        }
        Ok(SummaryTable {
            level: SUMMARY_LEVEL,
            rows,
        })
    }

    /// Package the fitted heterogeneity posterior as a tabulated prior for
    /// a follow-up analysis (2001 points up to the 1 - 1e-6 quantile).
    pub fn tau_prior_from_posterior(&self) -> Result<TauPrior> {
        let (taus, dens) = self.tau_posterior.tabulate(2001)?;
        TauPrior::tabulated(taus, dens)
    }
}
