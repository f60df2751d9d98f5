//! Closed-form kernels of the normal-normal hierarchical model with
//! covariables: the conditional coefficient posterior given the
//! heterogeneity, the unnormalized heterogeneity marginal, and conditional
//! and full marginal likelihoods.
//!
//! All density and likelihood arithmetic is done in the log domain. The
//! per-tau cost is O(k d^2): the marginal covariance is diagonal and never
//! materialized, and the only factorizations are Cholesky decompositions
//! of d x d matrices.

use nalgebra::{Cholesky, DMatrix, DVector};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model_spec::{BetaPrior, RegressionProblem, TauPrior};
use crate::tau_posterior::TauPosterior;

const LN_2PI: f64 = 1.837_877_066_409_345_4;

/// Mean vector and covariance matrix of a multivariate normal.
#[derive(Debug, Clone, PartialEq)]
pub struct MvnMoments {
    pub mean: DVector<f64>,
    pub covariance: DMatrix<f64>,
}

impl MvnMoments {
    /// Construct, symmetrizing the covariance against round-off.
    pub fn new(mean: DVector<f64>, covariance: DMatrix<f64>) -> Self {
        let sym = (&covariance + covariance.transpose()) * 0.5;
        MvnMoments {
            mean,
            covariance: sym,
        }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Log-density of the multivariate normal at `x`.
    pub fn log_density(&self, x: &DVector<f64>) -> Result<f64> {
        let chol = Cholesky::new(self.covariance.clone())
            .ok_or_else(|| Error::numeric("covariance is not positive definite"))?;
        let d = self.dim() as f64;
        let diff = x - &self.mean;
        let solved = chol.solve(&diff);
        let log_det: f64 = 2.0 * chol.l().diagonal().iter().map(|v| v.ln()).sum::<f64>();
        Ok(-0.5 * (d * LN_2PI + log_det + diff.dot(&solved)))
    }

    /// Log-density of the distribution evaluated at its own mean.
    pub fn log_density_at_mean(&self) -> Result<f64> {
        let chol = Cholesky::new(self.covariance.clone())
            .ok_or_else(|| Error::numeric("covariance is not positive definite"))?;
        let d = self.dim() as f64;
        let log_det: f64 = 2.0 * chol.l().diagonal().iter().map(|v| v.ln()).sum::<f64>();
        Ok(-0.5 * (d * LN_2PI + log_det))
    }
}

/// Accumulate X'WX, X'Wr, r'Wr and the log-determinant of the diagonal
/// marginal covariance, where W = diag(1/(sigma_i^2 + tau^2)) and `r` is a
/// response vector of length k.
fn weighted_terms(
    problem: &RegressionProblem,
    tau: f64,
    r: &DVector<f64>,
) -> (DMatrix<f64>, DVector<f64>, f64, f64) {
    let k = problem.k();
    let d = problem.d();
    let x = &problem.design.entries;
    let mut xtwx = DMatrix::zeros(d, d);
    let mut xtwr = DVector::zeros(d);
    let mut rwr = 0.0;
    let mut sum_log_var = 0.0;
    for i in 0..k {
        let var = problem.dataset.sigma[i].powi(2) + tau * tau;
        let w = 1.0 / var;
        sum_log_var += var.ln();
        let xi = x.row(i);
        for a in 0..d {
            let xa = xi[a];
            xtwr[a] += w * xa * r[i];
            for b in 0..=a {
                xtwx[(a, b)] += w * xa * xi[b];
            }
        }
        rwr += w * r[i] * r[i];
    }
    // mirror the lower triangle
    for a in 0..d {
        for b in 0..a {
            xtwx[(b, a)] = xtwx[(a, b)];
        }
    }
    (xtwx, xtwr, rwr, sum_log_var)
}

/// Prior precision matrix, precision-weighted mean, and covariance
/// log-determinant.
type PriorTerms = (DMatrix<f64>, DVector<f64>, f64);

fn prior_precision(prior: &BetaPrior) -> Result<Option<PriorTerms>> {
    match prior {
        BetaPrior::ImproperUniform => Ok(None),
        BetaPrior::Normal { mean, covariance } => {
            let chol = Cholesky::new(covariance.clone())
                .ok_or_else(|| Error::numeric("prior covariance is not positive definite"))?;
            let prec = chol.inverse();
            let log_det_cov: f64 = 2.0 * chol.l().diagonal().iter().map(|v| v.ln()).sum::<f64>();
            let prec_mean = &prec * mean;
            Ok(Some((prec, prec_mean, log_det_cov)))
        }
    }
}

/// Conditional posterior of the coefficient vector given the heterogeneity.
///
/// With a uniform coefficient prior this is N(P^-1 X'Wy, P^-1) with
/// P = X'WX; a normal prior adds its precision and precision-weighted mean.
pub fn conditional_beta_posterior(problem: &RegressionProblem, tau: f64) -> Result<MvnMoments> {
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(Error::invalid(format!(
            "tau must be finite and nonnegative, got {tau}"
        )));
    }
    let (mut p, mut rhs, _, _) = weighted_terms(problem, tau, &problem.dataset.y);
    if let Some((prec, prec_mean, _)) = prior_precision(&problem.beta_prior)? {
        p += prec;
        rhs += prec_mean;
    }
    let chol = Cholesky::new(p).ok_or_else(|| {
        Error::numeric("singular coefficient precision; the design is not identifiable at this tau")
    })?;
    let mean = chol.solve(&rhs);
    let covariance = chol.inverse();
    Ok(MvnMoments::new(mean, covariance))
}

/// Unnormalized log marginal posterior density of the heterogeneity,
/// `ln f(tau) + ln m(tau)` with `m(tau)` the coefficient-integrated
/// likelihood. With a uniform coefficient prior the value carries an
/// arbitrary additive constant; with a normal prior it is fully normalized.
pub fn tau_log_marginal_unnorm(problem: &RegressionProblem, tau: f64) -> f64 {
    let prior_ld = problem.tau_prior.log_density(tau);
    if prior_ld == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    prior_ld + log_integrated_likelihood(problem, tau)
}

/// ln m(tau): the likelihood with the coefficient vector integrated out.
fn log_integrated_likelihood(problem: &RegressionProblem, tau: f64) -> f64 {
    match &problem.beta_prior {
        BetaPrior::ImproperUniform => {
            let (p, b, ywy, sum_log_var) = weighted_terms(problem, tau, &problem.dataset.y);
            let Some(chol) = Cholesky::new(p) else {
                return f64::NEG_INFINITY;
            };
            let log_det_p: f64 = 2.0 * chol.l().diagonal().iter().map(|v| v.ln()).sum::<f64>();
            let resid = ywy - b.dot(&chol.solve(&b));
            -0.5 * (sum_log_var + log_det_p + resid)
        }
        BetaPrior::Normal { mean, .. } => {
            let k = problem.k() as f64;
            let e = &problem.dataset.y - &problem.design.entries * mean;
            let (mut p, be, ewe, sum_log_var) = weighted_terms(problem, tau, &e);
            let Some((prec, _, log_det_cov)) = prior_precision(&problem.beta_prior).ok().flatten()
            else {
                return f64::NEG_INFINITY;
            };
            p += prec;
            let Some(chol) = Cholesky::new(p) else {
                return f64::NEG_INFINITY;
            };
            let log_det_p: f64 = 2.0 * chol.l().diagonal().iter().map(|v| v.ln()).sum::<f64>();
            let q = ewe - be.dot(&chol.solve(&be));
            // matrix determinant lemma: |S_tau + X S0 X'| = |S_tau| |S0| |S0^-1 + X' S_tau^-1 X|
            -0.5 * (k * LN_2PI + sum_log_var + log_det_cov + log_det_p + q)
        }
    }
}

/// ln p(y | tau) under a proper (normal) coefficient prior: the exact
/// normal density of the data with the coefficients integrated out.
pub fn log_conditional_marginal_likelihood(problem: &RegressionProblem, tau: f64) -> Result<f64> {
    if !problem.beta_prior.is_proper() {
        return Err(Error::Unsupported(
            "conditional marginal likelihood requires a proper coefficient prior".into(),
        ));
    }
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(Error::invalid(format!(
            "tau must be finite and nonnegative, got {tau}"
        )));
    }
    Ok(log_integrated_likelihood(problem, tau))
}

/// p(y | tau) under a proper coefficient prior.
pub fn conditional_marginal_likelihood(problem: &RegressionProblem, tau: f64) -> Result<f64> {
    Ok(log_conditional_marginal_likelihood(problem, tau)?.exp())
}

/// ln p(y): the marginal likelihood with both parameters integrated out.
/// Requires proper priors on both tau and the coefficients; the tau prior
/// is verified to integrate to one before use.
pub fn log_marginal_likelihood(problem: &RegressionProblem) -> Result<f64> {
    if !problem.beta_prior.is_proper() {
        return Err(Error::Unsupported(
            "marginal likelihood requires a proper coefficient prior".into(),
        ));
    }
    if !problem.tau_prior.is_proper() {
        return Err(Error::Unsupported(
            "marginal likelihood requires a proper heterogeneity prior".into(),
        ));
    }
    problem.tau_prior.verify_proper()?;
    let post = build_tau_posterior(problem)?;
    Ok(post.log_norm_const())
}

/// p(y) under proper priors.
pub fn marginal_likelihood(problem: &RegressionProblem) -> Result<f64> {
    Ok(log_marginal_likelihood(problem)?.exp())
}

/// Log-likelihood of the data at a fixed coefficient vector and
/// heterogeneity: sum of ln N(y_i; x_i'beta, sigma_i^2 + tau^2).
pub fn log_likelihood(problem: &RegressionProblem, beta: &DVector<f64>, tau: f64) -> f64 {
    let fitted = &problem.design.entries * beta;
    let mut total = 0.0;
    for i in 0..problem.k() {
        let var = problem.dataset.sigma[i].powi(2) + tau * tau;
        let resid = problem.dataset.y[i] - fitted[i];
        total += -0.5 * (LN_2PI + var.ln() + resid * resid / var);
    }
    total
}

/// A robust scale for tau searches: the median standard error.
pub(crate) fn sigma_scale(problem: &RegressionProblem) -> f64 {
    let mut s: Vec<f64> = problem.dataset.sigma.iter().cloned().collect();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    s[s.len() / 2]
}

/// Normalize the heterogeneity posterior of a validated problem.
pub(crate) fn build_tau_posterior(problem: &RegressionProblem) -> Result<TauPosterior> {
    let hint = sigma_scale(problem);
    let owned = problem.clone();
    TauPosterior::build(Arc::new(move |t| tau_log_marginal_unnorm(&owned, t)), hint)
}

impl TauPrior {
    /// Verify that a proper prior density numerically integrates to one
    /// (within 1e-8), guarding marginal-likelihood computations against
    /// misscaled densities.
    pub fn verify_proper(&self) -> Result<()> {
        let upper = match self {
            TauPrior::HalfNormal { scale } => 15.0 * scale,
            TauPrior::Exponential { rate } => 45.0 / rate,
            TauPrior::HalfCauchy { scale } => 1e10 * scale,
            TauPrior::Tabulated { taus, .. } => *taus.last().unwrap(),
            TauPrior::ImproperUniform => {
                return Err(Error::Unsupported(
                    "the uniform heterogeneity prior is improper".into(),
                ))
            }
        };
        let total = crate::numeric::adaptive_simpson(&|t| self.density(t), 0.0, upper, 1e-11);
        if (total - 1.0).abs() > 1e-8 {
            return Err(Error::numeric(format!(
                "heterogeneity prior integrates to {total}, not 1"
            )));
        }
        Ok(())
    }
}
