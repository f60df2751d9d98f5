//! Model assembly: study data, regressor matrix, priors, and the validated
//! regression problem, plus parametrization transforms.

use nalgebra::{DMatrix, DVector};

use crate::effect_sizes::EffectEstimate;
use crate::error::{Error, Result};
use crate::numeric::{adaptive_simpson, MonotoneCubic};

/// Per-study estimates and standard errors, the meta-analytic input.
#[derive(Debug, Clone)]
pub struct StudyDataset {
    pub labels: Vec<String>,
    pub y: DVector<f64>,
    pub sigma: DVector<f64>,
}

impl StudyDataset {
    pub fn new(labels: Vec<String>, y: Vec<f64>, sigma: Vec<f64>) -> Result<Self> {
        let k = labels.len();
        if k == 0 {
            return Err(Error::invalid("dataset must contain at least one study"));
        }
        if y.len() != k || sigma.len() != k {
            return Err(Error::invalid(format!(
                "length mismatch: {} labels, {} estimates, {} standard errors",
                k,
                y.len(),
                sigma.len()
            )));
        }
        for (i, s) in sigma.iter().enumerate() {
            if !s.is_finite() || *s <= 0.0 {
                return Err(Error::invalid(format!(
                    "standard error of study {} ({:?}) must be positive and finite, got {}",
                    i + 1,
                    labels[i],
                    s
                )));
            }
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("estimates must be finite"));
        }
        for i in 0..k {
            for j in 0..i {
                if labels[i] == labels[j] {
                    return Err(Error::invalid(format!(
                        "duplicate study label {:?}",
                        labels[i]
                    )));
                }
            }
        }
        Ok(StudyDataset {
            labels,
            y: DVector::from_vec(y),
            sigma: DVector::from_vec(sigma),
        })
    }

    pub fn from_estimates(estimates: &[EffectEstimate]) -> Result<Self> {
        StudyDataset::new(
            estimates.iter().map(|e| e.label.clone()).collect(),
            estimates.iter().map(|e| e.y).collect(),
            estimates.iter().map(|e| e.sigma()).collect(),
        )
    }

    /// Number of studies.
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        false // k >= 1 by construction
    }

    /// Subset of the studies, in the given index order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        StudyDataset::new(
            indices.iter().map(|&i| self.labels[i].clone()).collect(),
            indices.iter().map(|&i| self.y[i]).collect(),
            indices.iter().map(|&i| self.sigma[i]).collect(),
        )
    }
}

/// The k×d regressor matrix with named columns.
#[derive(Debug, Clone)]
pub struct DesignMatrix {
    pub entries: DMatrix<f64>,
    pub column_names: Vec<String>,
}

impl DesignMatrix {
    pub fn new(entries: DMatrix<f64>, column_names: Vec<String>) -> Result<Self> {
        if entries.ncols() == 0 {
            return Err(Error::invalid("design matrix needs at least one column"));
        }
        if column_names.len() != entries.ncols() {
            return Err(Error::invalid(format!(
                "{} column names for {} columns",
                column_names.len(),
                entries.ncols()
            )));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("design matrix entries must be finite"));
        }
        Ok(DesignMatrix {
            entries,
            column_names,
        })
    }

    /// Column-major construction from equal-length named columns.
    pub fn from_columns(columns: Vec<(String, Vec<f64>)>) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::invalid("design matrix needs at least one column"));
        }
        let k = columns[0].1.len();
        if columns.iter().any(|(_, c)| c.len() != k) {
            return Err(Error::invalid("design columns differ in length"));
        }
        let names = columns.iter().map(|(n, _)| n.clone()).collect();
        let entries = DMatrix::from_fn(k, columns.len(), |i, j| columns[j].1[i]);
        DesignMatrix::new(entries, names)
    }

    /// All-ones single column, the default when no covariables are given.
    pub fn intercept_only(k: usize) -> Self {
        DesignMatrix {
            entries: DMatrix::from_element(k, 1, 1.0),
            column_names: vec!["intercept".to_string()],
        }
    }

    pub fn nrows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.entries.ncols()
    }

    /// Row i as a covariable vector.
    pub fn row(&self, i: usize) -> DVector<f64> {
        self.entries.row(i).transpose()
    }

    /// Numerical rank via SVD with tolerance max(k,d)·eps·s_max.
    pub fn rank(&self) -> usize {
        let svd = self.entries.clone().svd(false, false);
        let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
        let tol = self.nrows().max(self.ncols()) as f64 * f64::EPSILON * smax;
        svd.singular_values.iter().filter(|&&s| s > tol).count()
    }

    pub fn subset_rows(&self, indices: &[usize]) -> Result<Self> {
        let entries = DMatrix::from_fn(indices.len(), self.ncols(), |i, j| {
            self.entries[(indices[i], j)]
        });
        DesignMatrix::new(entries, self.column_names.clone())
    }
}

/// Indicator codings for a categorical covariable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndicatorCoding {
    /// One 0/1 column per group; coefficients are the group means.
    GroupMeans,
    /// All-ones first column plus one 0/1 column per non-reference group;
    /// the reference is the first group in order of appearance.
    InterceptOffset,
}

/// Build an indicator design from per-study group labels.
pub fn build_indicator_design(
    group_labels: &[&str],
    coding: IndicatorCoding,
) -> Result<DesignMatrix> {
    if group_labels.is_empty() {
        return Err(Error::invalid("no studies given"));
    }
    let mut groups: Vec<&str> = Vec::new();
    for g in group_labels {
        if !groups.contains(g) {
            groups.push(g);
        }
    }
    let k = group_labels.len();
    match coding {
        IndicatorCoding::GroupMeans => {
            let entries = DMatrix::from_fn(k, groups.len(), |i, j| {
                if group_labels[i] == groups[j] {
                    1.0
                } else {
                    0.0
                }
            });
            DesignMatrix::new(entries, groups.iter().map(|g| g.to_string()).collect())
        }
        IndicatorCoding::InterceptOffset => {
            let d = groups.len(); // intercept + (d-1) offsets
            let entries = DMatrix::from_fn(k, d, |i, j| {
                if j == 0 || group_labels[i] == groups[j] {
                    1.0
                } else {
                    0.0
                }
            });
            let mut names = vec!["intercept".to_string()];
            names.extend(groups.iter().skip(1).map(|g| g.to_string()));
            DesignMatrix::new(entries, names)
        }
    }
}

/// Subtract a fixed center from a covariable column.
pub fn center_covariable(values: &[f64], center: f64) -> Vec<f64> {
    values.iter().map(|v| v - center).collect()
}

/// Prior on the coefficient vector: improper uniform or multivariate normal.
#[derive(Debug, Clone)]
pub enum BetaPrior {
    ImproperUniform,
    Normal {
        mean: DVector<f64>,
        covariance: DMatrix<f64>,
    },
}

impl BetaPrior {
    /// Proper normal prior from a mean vector and a covariance matrix.
    pub fn normal(mean: Vec<f64>, covariance: DMatrix<f64>) -> Result<Self> {
        let d = mean.len();
        if covariance.nrows() != d || covariance.ncols() != d {
            return Err(Error::invalid(format!(
                "prior covariance is {}x{} for a mean of dimension {}",
                covariance.nrows(),
                covariance.ncols(),
                d
            )));
        }
        if covariance.iter().any(|v| !v.is_finite()) || mean.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("prior moments must be finite"));
        }
        let max_abs = covariance.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for i in 0..d {
            for j in 0..i {
                if (covariance[(i, j)] - covariance[(j, i)]).abs() > 1e-10 * max_abs.max(1.0) {
                    return Err(Error::invalid("prior covariance is not symmetric"));
                }
            }
        }
        if nalgebra::Cholesky::new(covariance.clone()).is_none() {
            return Err(Error::invalid("prior covariance is not positive definite"));
        }
        Ok(BetaPrior::Normal {
            mean: DVector::from_vec(mean),
            covariance,
        })
    }

    /// Independent normal prior from per-coefficient standard deviations.
    pub fn normal_diag(mean: Vec<f64>, sds: Vec<f64>) -> Result<Self> {
        if mean.len() != sds.len() {
            return Err(Error::invalid("prior mean and sd vectors differ in length"));
        }
        if sds.iter().any(|s| !s.is_finite() || *s <= 0.0) {
            return Err(Error::invalid("prior standard deviations must be positive"));
        }
        let d = sds.len();
        let cov = DMatrix::from_fn(d, d, |i, j| if i == j { sds[i] * sds[i] } else { 0.0 });
        BetaPrior::normal(mean, cov)
    }

    pub fn is_proper(&self) -> bool {
        matches!(self, BetaPrior::Normal { .. })
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            BetaPrior::ImproperUniform => None,
            BetaPrior::Normal { mean, .. } => Some(mean.len()),
        }
    }
}

/// Translate a normal coefficient prior through the reparametrization
/// `beta* = A beta`: mean becomes `A mu`, covariance `A Sigma A'`
/// (symmetrized against round-off).
pub fn transform_normal_prior(a: &DMatrix<f64>, prior: &BetaPrior) -> Result<BetaPrior> {
    let BetaPrior::Normal { mean, covariance } = prior else {
        return Err(Error::invalid("only a normal prior can be transformed"));
    };
    let d = mean.len();
    if a.nrows() != d || a.ncols() != d {
        return Err(Error::invalid("transformation matrix has the wrong shape"));
    }
    if a.clone().lu().try_inverse().is_none() {
        return Err(Error::invalid("transformation matrix is singular"));
    }
    let new_mean = a * mean;
    let mut new_cov = a * covariance * a.transpose();
    let sym = (new_cov.clone() + new_cov.transpose()) * 0.5;
    new_cov = sym;
    BetaPrior::normal(new_mean.iter().cloned().collect(), new_cov)
}

/// Prior on the heterogeneity standard deviation tau.
#[derive(Debug, Clone)]
pub enum TauPrior {
    HalfNormal {
        scale: f64,
    },
    HalfCauchy {
        scale: f64,
    },
    Exponential {
        rate: f64,
    },
    ImproperUniform,
    /// Density tabulated on a grid, interpolated monotonically and
    /// renormalized to integrate to one; zero beyond the last grid point.
    Tabulated {
        taus: Vec<f64>,
        densities: Vec<f64>,
        interp: MonotoneCubic,
    },
}

impl TauPrior {
    pub fn half_normal(scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::invalid("half-normal scale must be positive"));
        }
        Ok(TauPrior::HalfNormal { scale })
    }

    pub fn half_cauchy(scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::invalid("half-Cauchy scale must be positive"));
        }
        Ok(TauPrior::HalfCauchy { scale })
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::invalid("exponential rate must be positive"));
        }
        Ok(TauPrior::Exponential { rate })
    }

    /// Build a tabulated prior from density values on a strictly increasing
    /// grid starting at 0. The table is renormalized so the interpolated
    /// density integrates to one over the tabulated range.
    pub fn tabulated(taus: Vec<f64>, densities: Vec<f64>) -> Result<Self> {
        if taus.len() < 2 || taus.len() != densities.len() {
            return Err(Error::invalid(
                "tabulated prior needs matching tau/density vectors (>= 2 points)",
            ));
        }
        if taus[0] != 0.0 {
            return Err(Error::invalid("tabulated prior grid must start at tau = 0"));
        }
        if densities.iter().any(|d| !d.is_finite() || *d < 0.0) {
            return Err(Error::invalid(
                "tabulated densities must be finite and nonnegative",
            ));
        }
        let interp = MonotoneCubic::new(taus.clone(), densities.clone())
            .ok_or_else(|| Error::invalid("tabulated prior grid must be strictly increasing"))?;
        let upper = *taus.last().unwrap();
        let total = adaptive_simpson(&|t| interp.eval(t).unwrap_or(0.0), 0.0, upper, 1e-12);
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::invalid(
                "tabulated prior has zero or non-finite mass",
            ));
        }
        let densities: Vec<f64> = densities.iter().map(|d| d / total).collect();
        let interp = MonotoneCubic::new(taus.clone(), densities.clone()).unwrap();
        Ok(TauPrior::Tabulated {
            taus,
            densities,
            interp,
        })
    }

    /// Whether the prior is a proper (normalized) density.
    pub fn is_proper(&self) -> bool {
        !matches!(self, TauPrior::ImproperUniform)
    }

    /// Prior density at tau >= 0.
    pub fn density(&self, tau: f64) -> f64 {
        if tau < 0.0 {
            return 0.0;
        }
        match self {
            TauPrior::HalfNormal { scale } => {
                (2.0 / std::f64::consts::PI).sqrt() / scale * (-0.5 * (tau / scale).powi(2)).exp()
            }
            TauPrior::HalfCauchy { scale } => {
                2.0 / (std::f64::consts::PI * scale * (1.0 + (tau / scale).powi(2)))
            }
            TauPrior::Exponential { rate } => rate * (-rate * tau).exp(),
            TauPrior::ImproperUniform => 1.0,
            TauPrior::Tabulated { interp, .. } => interp.eval(tau).unwrap_or(0.0).max(0.0),
        }
    }

    /// Natural log of the prior density (may be -inf where the density is 0).
    pub fn log_density(&self, tau: f64) -> f64 {
        match self {
            TauPrior::HalfNormal { scale } => {
                0.5 * (2.0 / std::f64::consts::PI).ln() - scale.ln() - 0.5 * (tau / scale).powi(2)
            }
            TauPrior::Exponential { rate } => rate.ln() - rate * tau,
            _ => self.density(tau).ln(),
        }
    }
}

/// The assembled regression problem: data, design and priors.
///
/// `RegressionProblem::new` runs the full validation, so a constructed
/// problem always satisfies the dimensional and propriety requirements.
#[derive(Debug, Clone)]
pub struct RegressionProblem {
    pub dataset: StudyDataset,
    pub design: DesignMatrix,
    pub tau_prior: TauPrior,
    pub beta_prior: BetaPrior,
}

impl RegressionProblem {
    /// Assemble and validate. Passing `None` for the design uses a single
    /// all-ones "intercept" column (plain meta-analysis).
    pub fn new(
        dataset: StudyDataset,
        design: Option<DesignMatrix>,
        tau_prior: TauPrior,
        beta_prior: BetaPrior,
    ) -> Result<Self> {
        let design = design.unwrap_or_else(|| DesignMatrix::intercept_only(dataset.len()));
        let problem = RegressionProblem {
            dataset,
            design,
            tau_prior,
            beta_prior,
        };
        problem.validate()?;
        Ok(problem)
    }

    pub fn k(&self) -> usize {
        self.dataset.len()
    }

    pub fn d(&self) -> usize {
        self.design.ncols()
    }

    /// Re-check every structural requirement, with a distinct diagnostic
    /// per failure mode.
    pub fn validate(&self) -> Result<()> {
        let k = self.dataset.len();
        let d = self.design.ncols();
        if self.design.nrows() != k {
            return Err(Error::invalid(format!(
                "design matrix has {} rows for {} studies",
                self.design.nrows(),
                k
            )));
        }
        if let Some(pd) = self.beta_prior.dim() {
            if pd != d {
                return Err(Error::invalid(format!(
                    "coefficient prior has dimension {pd} for {d} design columns"
                )));
            }
        }
        if self.design.entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("design matrix entries must be finite"));
        }
        if !self.beta_prior.is_proper() {
            let rank = self.design.rank();
            if rank < d {
                return Err(Error::invalid(format!(
                    "rank-deficient design (rank {rank} < {d} columns) with an improper coefficient prior"
                )));
            }
            if self.tau_prior.is_proper() {
                if k < d {
                    return Err(Error::invalid(format!(
                        "{k} studies cannot identify {d} coefficients under an improper coefficient prior"
                    )));
                }
            } else if k <= d {
                return Err(Error::invalid(format!(
                    "improper priors on both tau and coefficients need more studies ({k}) than coefficients ({d})"
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn crins_dataset() -> StudyDataset {
        StudyDataset::new(
            vec![
                "Heffron (2003)".into(),
                "Gibelli (2004)".into(),
                "Schuller (2005)".into(),
                "Ganschow (2005)".into(),
                "Spada (2006)".into(),
                "Gras (2008)".into(),
            ],
            vec![-2.31, -0.46, -2.30, -1.76, -1.26, -2.42],
            vec![0.60, 0.56, 0.88, 0.46, 0.64, 1.53],
        )
        .unwrap()
    }

    fn crins_two_group_design() -> DesignMatrix {
        // columns: basiliximab, daclizumab
        DesignMatrix::from_columns(vec![
            ("basiliximab".into(), vec![0.0, 1.0, 0.0, 1.0, 1.0, 1.0]),
            ("daclizumab".into(), vec![1.0, 0.0, 1.0, 0.0, 0.0, 0.0]),
        ])
        .unwrap()
    }

    #[test]
    fn indicator_group_means_coding() {
        let labels = ["A", "A", "B", "B", "B", "C", "C"];
        let x = build_indicator_design(&labels, IndicatorCoding::GroupMeans).unwrap();
        assert_eq!(x.column_names, vec!["A", "B", "C"]);
        let expect = [
            [1.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.0, 0.0, 1.0],
        ];
        for (i, row) in expect.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                assert_eq!(x.entries[(i, j)], *v);
            }
        }
    }

    #[test]
    fn indicator_intercept_offset_coding() {
        let labels = ["A", "A", "B", "B", "B", "C", "C"];
        let x = build_indicator_design(&labels, IndicatorCoding::InterceptOffset).unwrap();
        assert_eq!(x.column_names, vec!["intercept", "B", "C"]);
        let expect = [
            [1.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [1.0, 1.0, 0.0],
            [1.0, 1.0, 0.0],
            [1.0, 1.0, 0.0],
            [1.0, 0.0, 1.0],
            [1.0, 0.0, 1.0],
        ];
        for (i, row) in expect.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                assert_eq!(x.entries[(i, j)], *v);
            }
        }
    }

    #[test]
    fn indicator_single_group() {
        for coding in [
            IndicatorCoding::GroupMeans,
            IndicatorCoding::InterceptOffset,
        ] {
            let x = build_indicator_design(&["G", "G", "G"], coding).unwrap();
            assert_eq!(x.ncols(), 1);
            assert!(x.entries.iter().all(|&v| v == 1.0));
        }
        assert!(build_indicator_design(&[], IndicatorCoding::GroupMeans).is_err());
    }

    #[test]
    fn centering() {
        assert_eq!(
            center_covariable(&[1990.0, 1990.0, 1991.0], 2000.0),
            vec![-10.0, -10.0, -9.0]
        );
        assert_eq!(center_covariable(&[1.5, 2.5], 0.0), vec![1.5, 2.5]);
        let vals = [3.0, 5.0, 10.0];
        let mean = vals.iter().sum::<f64>() / 3.0;
        let centered = center_covariable(&vals, mean);
        assert_relative_eq!(centered.iter().sum::<f64>(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn prior_transform_matches_hand_product() {
        // A = [[1,-0.5],[1,0.5]], Sigma = diag(100, 1)
        let a = DMatrix::from_row_slice(2, 2, &[1.0, -0.5, 1.0, 0.5]);
        let prior = BetaPrior::normal_diag(vec![0.0, 0.0], vec![10.0, 1.0]).unwrap();
        let BetaPrior::Normal { mean, covariance } = transform_normal_prior(&a, &prior).unwrap()
        else {
            panic!("expected normal prior");
        };
        assert_relative_eq!(mean[0], 0.0);
        assert_relative_eq!(covariance[(0, 0)], 100.25, epsilon = 1e-12);
        assert_relative_eq!(covariance[(0, 1)], 99.75, epsilon = 1e-12);
        assert_relative_eq!(covariance[(1, 0)], 99.75, epsilon = 1e-12);
        assert_relative_eq!(covariance[(1, 1)], 100.25, epsilon = 1e-12);
    }

    #[test]
    fn prior_transform_identity_and_inverse() {
        let a = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, -1.0, 1.0, 0.0, -1.0, 0.0, 1.0]);
        let prior = BetaPrior::normal_diag(vec![0.2, -0.3, 0.0], vec![1.0, 1.0, 1.0]).unwrap();

        // identity leaves the prior unchanged
        let id = DMatrix::identity(3, 3);
        let BetaPrior::Normal { covariance, .. } = transform_normal_prior(&id, &prior).unwrap()
        else {
            unreachable!()
        };
        assert_relative_eq!(covariance[(0, 0)], 1.0, epsilon = 1e-14);

        // A with identity Sigma gives A A'
        let BetaPrior::Normal { covariance, .. } = transform_normal_prior(&a, &prior).unwrap()
        else {
            unreachable!()
        };
        let expect = [[1.0, -1.0, -1.0], [-1.0, 2.0, 1.0], [-1.0, 1.0, 2.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert_relative_eq!(covariance[(i, j)], expect[i][j], epsilon = 1e-12);
            }
        }

        // round trip through A then A^-1
        let a_inv = a.clone().lu().try_inverse().unwrap();
        let fwd = transform_normal_prior(&a, &prior).unwrap();
        let BetaPrior::Normal { mean, covariance } = transform_normal_prior(&a_inv, &fwd).unwrap()
        else {
            unreachable!()
        };
        assert_relative_eq!(mean[0], 0.2, epsilon = 1e-10);
        assert_relative_eq!(covariance[(1, 1)], 1.0, epsilon = 1e-10);
        assert_relative_eq!(covariance[(0, 1)], 0.0, epsilon = 1e-10);
    }

    #[test]
    fn prior_transform_rejects_singular() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 2.0, 2.0]);
        let prior = BetaPrior::normal_diag(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        assert!(transform_normal_prior(&a, &prior).is_err());
    }

    #[test]
    fn validate_accepts_crins() {
        let p = RegressionProblem::new(
            crins_dataset(),
            Some(crins_two_group_design()),
            TauPrior::half_normal(0.5).unwrap(),
            BetaPrior::ImproperUniform,
        );
        assert!(p.is_ok());
    }

    #[test]
    fn validate_rejects_underdetermined() {
        let ds = StudyDataset::new(vec!["a".into(), "b".into()], vec![0.1, 0.2], vec![1.0, 1.0])
            .unwrap();
        let x = DesignMatrix::new(
            DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]),
            vec!["a".into(), "b".into(), "c".into()],
        )
        .unwrap();
        let r = RegressionProblem::new(
            ds,
            Some(x),
            TauPrior::half_normal(0.5).unwrap(),
            BetaPrior::ImproperUniform,
        );
        assert!(matches!(r, Err(Error::Invalid(_))));
    }

    #[test]
    fn validate_rejects_rank_deficient_with_uniform_prior() {
        let ds = StudyDataset::new(
            vec!["a".into(), "b".into(), "c".into(), "d".into()],
            vec![0.1, 0.2, 0.3, 0.4],
            vec![1.0, 1.0, 1.0, 1.0],
        )
        .unwrap();
        // duplicated column
        let x = DesignMatrix::from_columns(vec![
            ("one".into(), vec![1.0; 4]),
            ("dup".into(), vec![1.0; 4]),
        ])
        .unwrap();
        let r = RegressionProblem::new(
            ds.clone(),
            Some(x.clone()),
            TauPrior::half_normal(0.5).unwrap(),
            BetaPrior::ImproperUniform,
        );
        assert!(r.is_err());
        // a proper coefficient prior tolerates the deficiency
        let r = RegressionProblem::new(
            ds,
            Some(x),
            TauPrior::half_normal(0.5).unwrap(),
            BetaPrior::normal_diag(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap(),
        );
        assert!(r.is_ok());
    }

    #[test]
    fn dataset_rejects_zero_sigma() {
        let r = StudyDataset::new(vec!["a".into()], vec![0.0], vec![0.0]);
        assert!(r.is_err());
    }

    #[test]
    fn codings_span_same_column_space() {
        // group-means vs intercept/offset vs mean/difference codings
        let gm = crins_two_group_design();
        let io = DesignMatrix::from_columns(vec![
            ("intercept".into(), vec![1.0; 6]),
            ("daclizumab".into(), vec![1.0, 0.0, 1.0, 0.0, 0.0, 0.0]),
        ])
        .unwrap();
        let md = DesignMatrix::from_columns(vec![
            ("mean".into(), vec![1.0; 6]),
            ("difference".into(), vec![0.5, -0.5, 0.5, -0.5, -0.5, -0.5]),
        ])
        .unwrap();
        for (a, b) in [(&gm, &io), (&gm, &md), (&io, &md)] {
            // project each column of b onto col(a); residual must vanish
            let qa = a.entries.clone().qr();
            let q = qa.q();
            for j in 0..b.ncols() {
                let col = b.entries.column(j);
                let proj = &q * (q.transpose() * col);
                let resid = (col - proj).norm();
                assert!(resid < 1e-10, "residual {resid} for column {j}");
            }
        }
    }

    #[test]
    fn tabulated_prior_normalizes() {
        // table proportional to a half-normal; renormalization makes it proper
        let taus: Vec<f64> = (0..=200).map(|i| i as f64 * 0.02).collect();
        let dens: Vec<f64> = taus
            .iter()
            .map(|t| 7.3 * (-0.5 * (t / 0.5f64).powi(2)).exp())
            .collect();
        let prior = TauPrior::tabulated(taus, dens).unwrap();
        let total = adaptive_simpson(&|t| prior.density(t), 0.0, 4.0, 1e-12);
        assert_relative_eq!(total, 1.0, epsilon = 1e-8);
        assert!(prior.is_proper());
        assert_eq!(prior.density(5.0), 0.0);
    }

    #[test]
    fn named_priors_integrate_to_one() {
        for prior in [
            TauPrior::half_normal(0.5).unwrap(),
            TauPrior::exponential(2.0).unwrap(),
        ] {
            let total = adaptive_simpson(&|t| prior.density(t), 0.0, 400.0, 1e-10);
            assert_relative_eq!(total, 1.0, epsilon = 1e-6);
        }
        // the half-Cauchy tail decays like 1/t^2 and needs a huge bound;
        // check the mass against its analytic CDF instead
        let hc = TauPrior::half_cauchy(1.0).unwrap();
        let upper = 500.0;
        let total = adaptive_simpson(&|t| hc.density(t), 0.0, upper, 1e-10);
        let analytic = 2.0 / std::f64::consts::PI * upper.atan();
        assert_relative_eq!(total, analytic, epsilon = 1e-8);
        assert!(hc.verify_proper().is_ok());
        assert!(TauPrior::ImproperUniform.verify_proper().is_err());
    }
}
