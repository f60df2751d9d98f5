//! Fit serialization: a JSON document carrying the problem echo, the
//! discretized posterior, the summary table and the marginal likelihood.
//! Floats are written in shortest round-trip form, so reading a file back
//! reproduces every number bit for bit.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridNode, PosteriorGrid};
use crate::inference::{
    coefficient_mixture, combination_mixture, mixture_summary_row, shrinkage_mixture, FitResult,
    SummaryRequest, SummaryRow, SummaryTable,
};
use crate::mixture::ScalarMixture;
use crate::model_spec::{BetaPrior, DesignMatrix, RegressionProblem, StudyDataset, TauPrior};
use crate::nnhm::MvnMoments;

#[derive(Debug, Serialize, Deserialize)]
pub struct FitJson {
    pub tool: String,
    pub version: String,
    pub delta: f64,
    pub epsilon: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub problem: ProblemJson,
    pub grid: GridJson,
    pub summary: SummaryJson,
    pub log_marginal_likelihood: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ProblemJson {
    pub labels: Vec<String>,
    pub y: Vec<f64>,
    pub sigma: Vec<f64>,
    pub design: DesignJson,
    pub tau_prior: TauPriorJson,
    pub beta_prior: BetaPriorJson,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DesignJson {
    pub column_names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum TauPriorJson {
    HalfNormal { scale: f64 },
    HalfCauchy { scale: f64 },
    Exponential { rate: f64 },
    ImproperUniform,
    Tabulated { taus: Vec<f64>, densities: Vec<f64> },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BetaPriorJson {
    ImproperUniform,
    Normal {
        mean: Vec<f64>,
        /// Row-major lower triangle of the covariance, diagonal included.
        covariance_lower: Vec<f64>,
    },
}

#[derive(Debug, Serialize, Deserialize)]
pub struct GridJson {
    pub nodes: Vec<GridNodeJson>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct GridNodeJson {
    pub tau: f64,
    pub weight: f64,
    pub mean: Vec<f64>,
    /// Row-major lower triangle of the conditional covariance.
    pub covariance_lower: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SummaryJson {
    pub level: f64,
    pub rows: Vec<SummaryRowJson>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SummaryRowJson {
    pub name: String,
    pub mode: f64,
    pub median: f64,
    pub mean: f64,
    pub sd: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
}

fn lower_triangle(m: &DMatrix<f64>) -> Vec<f64> {
    let d = m.nrows();
    let mut out = Vec::with_capacity(d * (d + 1) / 2);
    for i in 0..d {
        for j in 0..=i {
            out.push(m[(i, j)]);
        }
    }
    out
}

fn from_lower_triangle(values: &[f64], d: usize) -> Result<DMatrix<f64>> {
    if values.len() != d * (d + 1) / 2 {
        return Err(Error::Parse(format!(
            "lower triangle has {} entries for dimension {d}",
            values.len()
        )));
    }
    let mut m = DMatrix::zeros(d, d);
    let mut idx = 0;
    for i in 0..d {
        for j in 0..=i {
            m[(i, j)] = values[idx];
            m[(j, i)] = values[idx];
            idx += 1;
        }
    }
    Ok(m)
}

fn tau_prior_to_json(prior: &TauPrior) -> TauPriorJson {
    match prior {
        TauPrior::HalfNormal { scale } => TauPriorJson::HalfNormal { scale: *scale },
        TauPrior::HalfCauchy { scale } => TauPriorJson::HalfCauchy { scale: *scale },
        TauPrior::Exponential { rate } => TauPriorJson::Exponential { rate: *rate },
        TauPrior::ImproperUniform => TauPriorJson::ImproperUniform,
        TauPrior::Tabulated {
            taus, densities, ..
        } => TauPriorJson::Tabulated {
            taus: taus.clone(),
            densities: densities.clone(),
        },
    }
}

fn tau_prior_from_json(json: &TauPriorJson) -> Result<TauPrior> {
    match json {
        TauPriorJson::HalfNormal { scale } => TauPrior::half_normal(*scale),
        TauPriorJson::HalfCauchy { scale } => TauPrior::half_cauchy(*scale),
        TauPriorJson::Exponential { rate } => TauPrior::exponential(*rate),
        TauPriorJson::ImproperUniform => Ok(TauPrior::ImproperUniform),
        TauPriorJson::Tabulated { taus, densities } => {
            TauPrior::tabulated(taus.clone(), densities.clone())
        }
    }
}

/// Serialize a fitted model.
pub fn fit_to_json(fit: &FitResult, seed: Option<u64>) -> FitJson {
    let problem = fit.problem();
    let grid = fit.grid();
    FitJson {
        tool: "metareg".to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        delta: grid.delta,
        epsilon: grid.epsilon,
        seed,
        problem: ProblemJson {
            labels: problem.dataset.labels.clone(),
            y: problem.dataset.y.iter().cloned().collect(),
            sigma: problem.dataset.sigma.iter().cloned().collect(),
            design: DesignJson {
                column_names: problem.design.column_names.clone(),
                rows: (0..problem.design.nrows())
                    .map(|i| problem.design.entries.row(i).iter().cloned().collect())
                    .collect(),
            },
            tau_prior: tau_prior_to_json(&problem.tau_prior),
            beta_prior: match &problem.beta_prior {
                BetaPrior::ImproperUniform => BetaPriorJson::ImproperUniform,
                BetaPrior::Normal { mean, covariance } => BetaPriorJson::Normal {
                    mean: mean.iter().cloned().collect(),
                    covariance_lower: lower_triangle(covariance),
                },
            },
        },
        grid: GridJson {
            nodes: grid
                .nodes
                .iter()
                .map(|n| GridNodeJson {
                    tau: n.tau,
                    weight: n.weight,
                    mean: n.moments.mean.iter().cloned().collect(),
                    covariance_lower: lower_triangle(&n.moments.covariance),
                })
                .collect(),
        },
        summary: summary_to_json(fit.summary()),
        log_marginal_likelihood: fit.log_marginal_likelihood(),
    }
}

pub fn summary_to_json(summary: &SummaryTable) -> SummaryJson {
    SummaryJson {
        level: summary.level,
        rows: summary
            .rows
            .iter()
            .map(|r| SummaryRowJson {
                name: r.name.clone(),
                mode: r.mode,
                median: r.median,
                mean: r.mean,
                sd: r.sd,
                ci_lower: r.ci_lower,
                ci_upper: r.ci_upper,
            })
            .collect(),
    }
}

fn summary_from_json(json: &SummaryJson) -> SummaryTable {
    SummaryTable {
        level: json.level,
        rows: json
            .rows
            .iter()
            .map(|r| SummaryRow {
                name: r.name.clone(),
                mode: r.mode,
                median: r.median,
                mean: r.mean,
                sd: r.sd,
                ci_lower: r.ci_lower,
                ci_upper: r.ci_upper,
            })
            .collect(),
    }
}

/// Write a fitted model as pretty-printed JSON (deterministic layout).
pub fn write_fit_json(fit: &FitResult, seed: Option<u64>, path: impl AsRef<Path>) -> Result<()> {
    let json = fit_to_json(fit, seed);
    let text = serde_json::to_string_pretty(&json)?;
    std::fs::write(path.as_ref(), text + "\n")?;
    Ok(())
}

/// A fit reconstructed from JSON: enough to serve summaries, combinations,
/// predictions, shrinkage and plots without refitting.
#[derive(Debug)]
pub struct LoadedFit {
    pub problem: RegressionProblem,
    pub grid: PosteriorGrid,
    pub summary: SummaryTable,
    pub log_marginal_likelihood: Option<f64>,
    pub delta: f64,
    pub epsilon: f64,
    pub seed: Option<u64>,
}

impl LoadedFit {
    pub fn coefficient_marginal(&self, index: usize) -> Result<ScalarMixture> {
        coefficient_mixture(&self.grid, index)
    }

    pub fn linear_combination(&self, x: &[f64], mean: bool) -> Result<ScalarMixture> {
        combination_mixture(&self.grid, x, mean)
    }

    pub fn shrinkage(&self, i: usize) -> Result<ScalarMixture> {
        shrinkage_mixture(&self.problem, &self.grid, i)
    }

    pub fn summarize(&self, extra: &[SummaryRequest]) -> Result<SummaryTable> {
        let mut rows = Vec::with_capacity(extra.len());
        for req in extra {
            let mix = self.linear_combination(&req.x, req.mean)?;
            rows.push(mixture_summary_row(&req.name, &mix)?);
        }
        Ok(SummaryTable {
            level: self.summary.level,
            rows,
        })
    }
}

/// Load a fit JSON file.
pub fn load_fit_json(path: impl AsRef<Path>) -> Result<LoadedFit> {
    let text = std::fs::read_to_string(path.as_ref())?;
    let json: FitJson = serde_json::from_str(&text)?;

    let k = json.problem.labels.len();
    let dataset = StudyDataset::new(
        json.problem.labels.clone(),
        json.problem.y.clone(),
        json.problem.sigma.clone(),
    )?;
    let d = json.problem.design.column_names.len();
    if json.problem.design.rows.len() != k {
        return Err(Error::Parse(
            "design row count does not match study count".into(),
        ));
    }
    let entries = DMatrix::from_fn(k, d, |i, j| json.problem.design.rows[i][j]);
    let design = DesignMatrix::new(entries, json.problem.design.column_names.clone())?;
    let beta_prior = match &json.problem.beta_prior {
        BetaPriorJson::ImproperUniform => BetaPrior::ImproperUniform,
        BetaPriorJson::Normal {
            mean,
            covariance_lower,
        } => {
            let cov = from_lower_triangle(covariance_lower, mean.len())?;
            BetaPrior::normal(mean.clone(), cov)?
        }
    };
    let problem = RegressionProblem::new(
        dataset,
        Some(design),
        tau_prior_from_json(&json.problem.tau_prior)?,
        beta_prior,
    )?;

    let mut nodes = Vec::with_capacity(json.grid.nodes.len());
    for n in &json.grid.nodes {
        let cov = from_lower_triangle(&n.covariance_lower, n.mean.len())?;
        nodes.push(GridNode {
            tau: n.tau,
            weight: n.weight,
            moments: MvnMoments::new(DVector::from_vec(n.mean.clone()), cov),
        });
    }
    if nodes.is_empty() {
        return Err(Error::Parse("fit JSON contains no grid nodes".into()));
    }
    let grid = PosteriorGrid {
        nodes,
        delta: json.delta,
        epsilon: json.epsilon,
    };

    Ok(LoadedFit {
        problem,
        grid,
        summary: summary_from_json(&json.summary),
        log_marginal_likelihood: json.log_marginal_likelihood,
        delta: json.delta,
        epsilon: json.epsilon,
        seed: json.seed,
    })
}
