//! Exhaustive Bayesian model selection over covariable subsets: marginal
//! likelihoods per model, posterior model probabilities, inclusion
//! probabilities, the median probability model, and model averaging.

use crate::error::{Error, Result};
use crate::inference::{fit, FitOptions, FitResult};
use crate::mixture::{MixtureComponent, MixtureKind, ScalarMixture};
use crate::model_spec::{BetaPrior, DesignMatrix, RegressionProblem, StudyDataset, TauPrior};

/// Largest supported number of candidate variables (2^N models).
pub const MAX_VARIABLES: usize = 20;

/// Prior over the model space.
#[derive(Debug, Clone, Copy)]
pub enum ModelPrior {
    /// Every model equally likely.
    Uniform,
    /// Each variable included independently with probability pi, giving
    /// pi^n (1-pi)^(N-n) per model with n included variables.
    Bernoulli(f64),
}

/// Priors applied within each candidate model.
#[derive(Debug, Clone)]
pub struct SelectionPriors {
    /// Standard deviation of the zero-mean normal prior on the intercept.
    pub intercept_sd: f64,
    /// Standard deviation of the zero-mean normal prior on each effect.
    pub effect_sd: f64,
    /// Proper heterogeneity prior.
    pub tau_prior: TauPrior,
}

impl Default for SelectionPriors {
    fn default() -> Self {
        SelectionPriors {
            intercept_sd: 10.0,
            effect_sd: 2.82,
            tau_prior: TauPrior::half_normal(0.5).expect("valid scale"),
        }
    }
}

/// The enumerated model space with prior and (once scored) posterior
/// probabilities. The intercept is part of every model.
#[derive(Debug, Clone)]
pub struct ModelSpace {
    pub variables: Vec<String>,
    /// Inclusion masks, one boolean per variable, in enumeration order
    /// (first variable toggles fastest).
    pub models: Vec<Vec<bool>>,
    pub prior_probs: Vec<f64>,
    pub log_mls: Option<Vec<f64>>,
    pub posterior_probs: Option<Vec<f64>>,
}

/// Enumerate all 2^N subsets of the candidate variables.
pub fn enumerate_models(variables: &[&str]) -> Result<ModelSpace> {
    let n = variables.len();
    if n == 0 || n > MAX_VARIABLES {
        return Err(Error::invalid(format!(
            "variable count must be between 1 and {MAX_VARIABLES}, got {n}"
        )));
    }
    for (i, v) in variables.iter().enumerate() {
        if variables[..i].contains(v) {
            return Err(Error::invalid(format!("duplicate variable {v:?}")));
        }
    }
    let m = 1usize << n;
    let models: Vec<Vec<bool>> = (0..m)
        .map(|code| (0..n).map(|j| code >> j & 1 == 1).collect())
        .collect();
    let prior_probs = vec![1.0 / m as f64; m];
    Ok(ModelSpace {
        variables: variables.iter().map(|v| v.to_string()).collect(),
        models,
        prior_probs,
        log_mls: None,
        posterior_probs: None,
    })
}

impl ModelSpace {
    pub fn n_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn n_models(&self) -> usize {
        self.models.len()
    }

    /// Number of included variables in model `m`.
    pub fn included_count(&self, m: usize) -> usize {
        self.models[m].iter().filter(|&&b| b).count()
    }

    /// Human-readable subset, e.g. `{FP, FN}`.
    pub fn describe(&self, m: usize) -> String {
        let names: Vec<&str> = self
            .variables
            .iter()
            .zip(&self.models[m])
            .filter_map(|(v, &inc)| inc.then_some(v.as_str()))
            .collect();
        if names.is_empty() {
            "{}".to_string()
        } else {
            format!("{{{}}}", names.join(", "))
        }
    }
}

/// Assign prior model probabilities.
pub fn model_prior(space: &mut ModelSpace, kind: ModelPrior) -> Result<()> {
    match kind {
        ModelPrior::Uniform => {
            space.prior_probs = vec![1.0 / space.n_models() as f64; space.n_models()];
        }
        ModelPrior::Bernoulli(pi) => {
            if !(pi > 0.0 && pi < 1.0) {
                return Err(Error::invalid(format!(
                    "inclusion probability must be in (0,1), got {pi}"
                )));
            }
            let n = space.n_variables() as f64;
            space.prior_probs = (0..space.n_models())
                .map(|m| {
                    let k = space.included_count(m) as f64;
                    pi.powf(k) * (1.0 - pi).powf(n - k)
                })
                .collect();
        }
    }
    Ok(())
}

/// Design matrix of model `m`: an intercept column plus the included
/// covariable columns.
pub fn model_design(
    space: &ModelSpace,
    covariates: &DesignMatrix,
    m: usize,
) -> Result<DesignMatrix> {
    if covariates.column_names != space.variables {
        return Err(Error::invalid(
            "covariate columns do not match the enumerated variables",
        ));
    }
    let k = covariates.nrows();
    let mut cols = vec![("intercept".to_string(), vec![1.0; k])];
    for (j, name) in space.variables.iter().enumerate() {
        if space.models[m][j] {
            cols.push((
                name.clone(),
                covariates.entries.column(j).iter().cloned().collect(),
            ));
        }
    }
    DesignMatrix::from_columns(cols)
}

/// Fit every model and record its log marginal likelihood; returns the
/// per-model fits for downstream summaries or averaging.
pub fn score_models(
    space: &mut ModelSpace,
    dataset: &StudyDataset,
    covariates: &DesignMatrix,
    priors: &SelectionPriors,
    options: &FitOptions,
) -> Result<Vec<FitResult>> {
    if !priors.tau_prior.is_proper() {
        return Err(Error::Unsupported(
            "model scoring requires a proper heterogeneity prior".into(),
        ));
    }
    if !(priors.intercept_sd > 0.0 && priors.effect_sd > 0.0) {
        return Err(Error::invalid("prior standard deviations must be positive"));
    }
    let mut log_mls = Vec::with_capacity(space.n_models());
    let mut fits = Vec::with_capacity(space.n_models());
    for m in 0..space.n_models() {
        let design = model_design(space, covariates, m)?;
        let d = design.ncols();
        let mut sds = vec![priors.intercept_sd];
        sds.extend(std::iter::repeat_n(priors.effect_sd, d - 1));
        let beta_prior = BetaPrior::normal_diag(vec![0.0; d], sds)?;
        let problem = RegressionProblem::new(
            dataset.clone(),
            Some(design),
            priors.tau_prior.clone(),
            beta_prior,
        )?;
        let fitted = fit(problem, options)?;
        log_mls.push(
            fitted.log_marginal_likelihood().ok_or_else(|| {
                Error::numeric("marginal likelihood missing despite proper priors")
            })?,
        );
        fits.push(fitted);
    }
    space.log_mls = Some(log_mls);
    Ok(fits)
}

/// Posterior model probabilities: softmax of log prior + log marginal
/// likelihood, computed in the log domain.
pub fn posterior_model_probs(space: &mut ModelSpace) -> Result<()> {
    let log_mls = space
        .log_mls
        .as_ref()
        .ok_or_else(|| Error::invalid("models have not been scored"))?;
    let logs: Vec<f64> = space
        .prior_probs
        .iter()
        .zip(log_mls)
        .map(|(p, lml)| p.ln() + lml)
        .collect();
    let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let unnorm: Vec<f64> = logs.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = unnorm.iter().sum();
    space.posterior_probs = Some(unnorm.iter().map(|u| u / total).collect());
    Ok(())
}

/// Marginal inclusion probability per variable: the total posterior mass
/// of the models containing it.
pub fn inclusion_probabilities(space: &ModelSpace) -> Result<Vec<f64>> {
    let probs = space
        .posterior_probs
        .as_ref()
        .ok_or_else(|| Error::invalid("posterior model probabilities not computed"))?;
    let mut incl = vec![0.0; space.n_variables()];
    for (mask, p) in space.models.iter().zip(probs) {
        for (j, &inc) in mask.iter().enumerate() {
            if inc {
                incl[j] += p;
            }
        }
    }
    Ok(incl)
}

/// Variables with inclusion probability >= 0.5 (boundary inclusive).
pub fn median_probability_model(space: &ModelSpace) -> Result<Vec<String>> {
    let incl = inclusion_probabilities(space)?;
    Ok(space
        .variables
        .iter()
        .zip(&incl)
        .filter(|(_, &p)| p >= 0.5)
        .map(|(v, _)| v.clone())
        .collect())
}

/// Model indices ranked by posterior probability (descending); ties are
/// broken by fewer included variables, then by the included variable
/// names lexicographically.
pub fn ranked_models(space: &ModelSpace) -> Result<Vec<usize>> {
    let probs = space
        .posterior_probs
        .as_ref()
        .ok_or_else(|| Error::invalid("posterior model probabilities not computed"))?;
    let mut idx: Vec<usize> = (0..space.n_models()).collect();
    idx.sort_by(|&a, &b| {
        probs[b]
            .partial_cmp(&probs[a])
            .unwrap()
            .then_with(|| space.included_count(a).cmp(&space.included_count(b)))
            .then_with(|| space.describe(a).cmp(&space.describe(b)))
    });
    Ok(idx)
}

/// Model-averaged combination: each model's combination mixture, rescaled
/// by its posterior probability and pooled. `x_by_model[m]` must align
/// with model m's design (intercept first, then its included variables).
pub fn model_averaged_combination(
    space: &ModelSpace,
    fits: &[FitResult],
    x_by_model: &[Vec<f64>],
    mean: bool,
) -> Result<ScalarMixture> {
    let probs = space
        .posterior_probs
        .as_ref()
        .ok_or_else(|| Error::invalid("posterior model probabilities not computed"))?;
    if fits.len() != space.n_models() || x_by_model.len() != space.n_models() {
        return Err(Error::invalid(
            "one fit and one coefficient vector required per model",
        ));
    }
    let mut components: Vec<MixtureComponent> = Vec::new();
    for (m, fitted) in fits.iter().enumerate() {
        let mix = fitted.linear_combination(&x_by_model[m], mean)?;
        for c in mix.components() {
            components.push(MixtureComponent {
                weight: probs[m] * c.weight,
                mean: c.mean,
                sd: c.sd,
            });
        }
    }
    let kind = if mean {
        MixtureKind::CombinationMean
    } else {
        MixtureKind::Prediction
    };
    ScalarMixture::new(kind, components)
}
