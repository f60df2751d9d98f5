//! Finite normal mixtures over a scalar quantity of interest: coefficient
//! marginals, linear combinations, predictions and shrinkage estimates all
//! take this form once the heterogeneity has been discretized.

use crate::error::{Error, Result};
use crate::numeric::{golden_max, shortest_interval, std_normal_cdf, std_normal_pdf};

/// Which posterior quantity a mixture describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MixtureKind {
    Coefficient,
    CombinationMean,
    Prediction,
    Shrinkage,
}

/// Credible-interval conventions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntervalMethod {
    /// Minimum-length interval with the requested coverage.
    Shortest,
    /// Equal-tail interval.
    Central,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureComponent {
    pub weight: f64,
    pub mean: f64,
    pub sd: f64,
}

/// A weighted mixture of normal components (point masses allowed as
/// zero-sd components for degenerate shrinkage/prediction nodes).
#[derive(Debug, Clone)]
pub struct ScalarMixture {
    components: Vec<MixtureComponent>,
    kind: MixtureKind,
}

impl ScalarMixture {
    pub fn new(kind: MixtureKind, components: Vec<MixtureComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::invalid("mixture needs at least one component"));
        }
        let mut total = 0.0;
        for c in &components {
            if !(c.weight.is_finite() && c.weight >= 0.0) {
                return Err(Error::invalid("mixture weights must be nonnegative"));
            }
            if !c.mean.is_finite() || !c.sd.is_finite() || c.sd < 0.0 {
                return Err(Error::invalid(
                    "mixture moments must be finite, sd nonnegative",
                ));
            }
            total += c.weight;
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!(
                "mixture weights sum to {total}, not 1"
            )));
        }
        Ok(ScalarMixture { components, kind })
    }

    pub fn kind(&self) -> MixtureKind {
        self.kind
    }

    pub fn components(&self) -> &[MixtureComponent] {
        &self.components
    }

    /// Mixture density. Zero-sd components contribute nothing except at
    /// their atom, where the density is undefined; they are skipped.
    pub fn density(&self, x: f64) -> f64 {
        self.components
            .iter()
            .filter(|c| c.sd > 0.0)
            .map(|c| c.weight * std_normal_pdf((x - c.mean) / c.sd) / c.sd)
            .sum()
    }

    /// Mixture CDF; zero-sd components contribute a step at their mean.
    pub fn cdf(&self, x: f64) -> f64 {
        self.components
            .iter()
            .map(|c| {
                if c.sd > 0.0 {
                    c.weight * std_normal_cdf((x - c.mean) / c.sd)
                } else if x >= c.mean {
                    c.weight
                } else {
                    0.0
                }
            })
            .sum()
    }

    /// Quantile by bisection on the mixture CDF (1e-8 in CDF units).
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::invalid(format!(
                "quantile level must be in (0,1), got {p}"
            )));
        }
        let (mut lo, mut hi) = self.support_bracket();
        // expand until the bracket straddles p
        for _ in 0..200 {
            if self.cdf(lo) < p {
                break;
            }
            lo -= (hi - lo).max(1.0);
        }
        for _ in 0..200 {
            if self.cdf(hi) > p {
                break;
            }
            hi += (hi - lo).max(1.0);
        }
        for _ in 0..300 {
            let mid = 0.5 * (lo + hi);
            let c = self.cdf(mid);
            if (c - p).abs() <= 1e-8 && (hi - lo) <= 1e-9 * (1.0 + mid.abs()) {
                return Ok(mid);
            }
            if c < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    fn support_bracket(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for c in &self.components {
            lo = lo.min(c.mean - 12.0 * c.sd - 1e-12);
            hi = hi.max(c.mean + 12.0 * c.sd + 1e-12);
        }
        (lo, hi)
    }

    /// Exact mixture mean.
    pub fn mean(&self) -> f64 {
        self.components.iter().map(|c| c.weight * c.mean).sum()
    }

    /// Exact mixture variance.
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        let m2: f64 = self
            .components
            .iter()
            .map(|c| c.weight * (c.sd * c.sd + c.mean * c.mean))
            .sum();
        (m2 - m * m).max(0.0)
    }

    pub fn sd(&self) -> f64 {
        self.variance().sqrt()
    }

    /// Mixture mode by multi-start golden-section search from every
    /// component mean and the mixture mean.
    pub fn mode(&self) -> f64 {
        let f = |x: f64| self.density(x);
        let spread = self.sd().max(1e-12);
        let mut starts: Vec<f64> = self
            .components
            .iter()
            .filter(|c| c.sd > 0.0)
            .map(|c| c.mean)
            .collect();
        starts.push(self.mean());
        let mut best = (starts[0], f(starts[0]));
        for s in starts {
            let (x, fx) = golden_max(
                &f,
                s - 3.0 * spread,
                s + 3.0 * spread,
                1e-10 * (1.0 + spread),
            );
            if fx > best.1 {
                best = (x, fx);
            }
        }
        best.0
    }

    /// Credible interval at the given level.
    pub fn credible_interval(&self, level: f64, method: IntervalMethod) -> Result<(f64, f64)> {
        if !(level > 0.0 && level < 1.0) {
            return Err(Error::invalid(format!(
                "level must be in (0,1), got {level}"
            )));
        }
        match method {
            IntervalMethod::Central => Ok((
                self.quantile((1.0 - level) / 2.0)?,
                self.quantile((1.0 + level) / 2.0)?,
            )),
            IntervalMethod::Shortest => {
                let hi = self.support_bracket().1;
                shortest_interval(&|p| self.quantile(p).unwrap_or(hi), level)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn mix(parts: &[(f64, f64, f64)]) -> ScalarMixture {
        ScalarMixture::new(
            MixtureKind::Coefficient,
            parts
                .iter()
                .map(|&(weight, mean, sd)| MixtureComponent { weight, mean, sd })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn single_normal_matches_closed_form() {
        let m = mix(&[(1.0, 2.0, 3.0)]);
        assert_relative_eq!(m.mean(), 2.0);
        assert_relative_eq!(m.sd(), 3.0);
        assert_relative_eq!(
            m.quantile(0.975).unwrap(),
            2.0 + 1.959964 * 3.0,
            epsilon = 1e-4
        );
        assert_relative_eq!(m.mode(), 2.0, epsilon = 1e-6);
        let (lo, hi) = m.credible_interval(0.95, IntervalMethod::Central).unwrap();
        let (slo, shi) = m.credible_interval(0.95, IntervalMethod::Shortest).unwrap();
        // symmetric unimodal: shortest equals central
        assert_relative_eq!(lo, slo, epsilon = 1e-4);
        assert_relative_eq!(hi, shi, epsilon = 1e-4);
    }

    #[test]
    fn moments_are_exact_weighted_sums() {
        let (w1, m1, s1) = (0.3, -1.0, 0.5);
        let (w2, m2c, s2) = (0.7, 2.0, 1.5);
        let m = mix(&[(w1, m1, s1), (w2, m2c, s2)]);
        let mean = w1 * m1 + w2 * m2c;
        let second = w1 * (s1 * s1 + m1 * m1) + w2 * (s2 * s2 + m2c * m2c);
        assert_relative_eq!(m.mean(), mean, epsilon = 1e-14);
        assert_relative_eq!(m.variance(), second - mean * mean, epsilon = 1e-14);
    }

    #[test]
    fn quantile_cdf_inverse() {
        let m = mix(&[(0.5, 0.0, 1.0), (0.3, 3.0, 0.5), (0.2, -2.0, 2.0)]);
        for p in [0.01, 0.2, 0.5, 0.8, 0.99] {
            let x = m.quantile(p).unwrap();
            assert_relative_eq!(m.cdf(x), p, epsilon = 1e-6);
        }
    }

    #[test]
    fn density_integrates_to_one() {
        let m = mix(&[(0.4, 0.0, 1.0), (0.6, 4.0, 0.3)]);
        let total = crate::numeric::adaptive_simpson(&|x| m.density(x), -10.0, 10.0, 1e-10);
        assert_relative_eq!(total, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn bimodal_mode_found_globally() {
        // taller, narrower component on the right
        let m = mix(&[(0.45, -2.0, 1.0), (0.55, 2.0, 0.4)]);
        assert_relative_eq!(m.mode(), 2.0, epsilon = 1e-2);
    }

    #[test]
    fn shortest_interval_shorter_than_central_for_skewed() {
        let m = mix(&[(0.8, 0.0, 1.0), (0.2, 5.0, 3.0)]);
        let (clo, chi) = m.credible_interval(0.95, IntervalMethod::Central).unwrap();
        let (slo, shi) = m.credible_interval(0.95, IntervalMethod::Shortest).unwrap();
        assert!(shi - slo <= chi - clo + 1e-6);
    }

    #[test]
    fn interval_widens_with_level() {
        let m = mix(&[(0.5, 0.0, 1.0), (0.5, 1.0, 2.0)]);
        let (a, b) = m.credible_interval(0.5, IntervalMethod::Shortest).unwrap();
        let (c, d) = m.credible_interval(0.99, IntervalMethod::Shortest).unwrap();
        assert!(d - c > b - a);
    }

    #[test]
    fn point_mass_component_steps_cdf() {
        let m = mix(&[(0.5, 1.0, 0.0), (0.5, 0.0, 1.0)]);
        assert!(m.cdf(0.999) < 0.5 + 0.35);
        assert!(m.cdf(1.001) > 0.5 + 0.34);
        // median sits at the atom
        assert_relative_eq!(m.quantile(0.6).unwrap(), 1.0, epsilon = 1e-5);
    }

    #[test]
    fn rejects_bad_weights() {
        assert!(ScalarMixture::new(
            MixtureKind::Coefficient,
            vec![MixtureComponent {
                weight: 0.5,
                mean: 0.0,
                sd: 1.0
            }],
        )
        .is_err());
        assert!(ScalarMixture::new(MixtureKind::Coefficient, vec![]).is_err());
    }
}
