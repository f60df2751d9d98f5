//! Effect-size derivation: convert raw study summaries (2×2 tables, event
//! proportions, group means) into estimate/standard-error pairs on an
//! analysis scale suitable for normal modeling.

use crate::error::{Error, Result};

/// A 2×2 contingency table summarizing binary outcomes in two study arms.
///
/// Counts may be fractional (e.g. derived from reported percentages).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoByTwoTable {
    pub events_trt: f64,
    pub total_trt: f64,
    pub events_ctl: f64,
    pub total_ctl: f64,
}

impl TwoByTwoTable {
    pub fn new(events_trt: f64, total_trt: f64, events_ctl: f64, total_ctl: f64) -> Result<Self> {
        let t = TwoByTwoTable {
            events_trt,
            total_trt,
            events_ctl,
            total_ctl,
        };
        for (name, v) in [
            ("events_trt", events_trt),
            ("total_trt", total_trt),
            ("events_ctl", events_ctl),
            ("total_ctl", total_ctl),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::invalid(format!(
                    "{name} must be finite and nonnegative, got {v}"
                )));
            }
        }
        if total_trt <= 0.0 || total_ctl <= 0.0 {
            return Err(Error::invalid("arm totals must be positive"));
        }
        if events_trt > total_trt || events_ctl > total_ctl {
            return Err(Error::invalid("events exceed arm total"));
        }
        Ok(t)
    }
}

/// An estimate with its sampling variance on the analysis scale.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectEstimate {
    /// Effect on the analysis scale (log-OR, log-odds, log ratio of means, ...).
    pub y: f64,
    /// Squared standard error.
    pub variance: f64,
    pub label: String,
}

impl EffectEstimate {
    pub fn new(y: f64, variance: f64, label: impl Into<String>) -> Result<Self> {
        if !y.is_finite() {
            return Err(Error::invalid(format!("estimate must be finite, got {y}")));
        }
        if !variance.is_finite() || variance <= 0.0 {
            return Err(Error::invalid(format!(
                "variance must be positive and finite, got {variance}"
            )));
        }
        Ok(EffectEstimate {
            y,
            variance,
            label: label.into(),
        })
    }

    /// Standard error, derived from the stored variance.
    pub fn sigma(&self) -> f64 {
        self.variance.sqrt()
    }
}

/// Log odds ratio with the Woolf variance `1/a + 1/b + 1/c + 1/d`.
///
/// If any cell of the table is exactly zero, 0.5 is added to all four
/// cells of that table before computing (continuity correction).
pub fn log_odds_ratio(table: &TwoByTwoTable, label: impl Into<String>) -> Result<EffectEstimate> {
    let mut a = table.events_trt;
    let mut b = table.total_trt - table.events_trt;
    let mut c = table.events_ctl;
    let mut d = table.total_ctl - table.events_ctl;
    if a == 0.0 || b == 0.0 || c == 0.0 || d == 0.0 {
        a += 0.5;
        b += 0.5;
        c += 0.5;
        d += 0.5;
    }
    let y = (a * d / (b * c)).ln();
    let variance = 1.0 / a + 1.0 / b + 1.0 / c + 1.0 / d;
    if !y.is_finite() || !variance.is_finite() {
        return Err(Error::invalid(
            "log odds ratio undefined for this table even after continuity correction",
        ));
    }
    EffectEstimate::new(y, variance, label)
}

/// Log odds of an event proportion, `ln(events / (n - events))`, with
/// variance `1/events + 1/(n - events)`.
///
/// Fractional event counts are accepted (e.g. counts derived from
/// percentages). Boundary counts (0 or n) are rejected: no correction
/// convention is applied here.
pub fn logit_proportion(events: f64, n: f64, label: impl Into<String>) -> Result<EffectEstimate> {
    if !events.is_finite() || !n.is_finite() || n <= 0.0 {
        return Err(Error::invalid(
            "logit proportion requires finite events and positive n",
        ));
    }
    if events <= 0.0 || events >= n {
        return Err(Error::invalid(format!(
            "logit proportion requires 0 < events < n, got events={events}, n={n}"
        )));
    }
    let y = (events / (n - events)).ln();
    let variance = 1.0 / events + 1.0 / (n - events);
    EffectEstimate::new(y, variance, label)
}

/// Log ratio of means `ln(m1/m2)` with delta-method variance
/// `sd1²/(n1·m1²) + sd2²/(n2·m2²)`.
#[allow(clippy::too_many_arguments)]
pub fn log_ratio_of_means(
    m1: f64,
    sd1: f64,
    n1: f64,
    m2: f64,
    sd2: f64,
    n2: f64,
    label: impl Into<String>,
) -> Result<EffectEstimate> {
    if m1 <= 0.0 || m2 <= 0.0 {
        return Err(Error::invalid("ratio of means requires positive means"));
    }
    if n1 < 1.0 || n2 < 1.0 || sd1 < 0.0 || sd2 < 0.0 {
        return Err(Error::invalid("ratio of means requires n >= 1 and sd >= 0"));
    }
    let y = (m1 / m2).ln();
    let variance = sd1 * sd1 / (n1 * m1 * m1) + sd2 * sd2 / (n2 * m2 * m2);
    EffectEstimate::new(y, variance, label)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn table(a: f64, n1: f64, c: f64, n2: f64) -> TwoByTwoTable {
        TwoByTwoTable::new(a, n1, c, n2).unwrap()
    }

    #[test]
    fn log_or_symmetric_table() {
        let e = log_odds_ratio(&table(10.0, 20.0, 10.0, 20.0), "s").unwrap();
        assert_relative_eq!(e.y, 0.0, epsilon = 1e-14);
        assert_relative_eq!(e.variance, 0.4, epsilon = 1e-14);
    }

    #[test]
    fn log_or_hand_computed() {
        // cells (10, 90, 20, 80)
        let e = log_odds_ratio(&table(10.0, 100.0, 20.0, 100.0), "s").unwrap();
        assert_relative_eq!(e.y, (10.0f64 * 80.0 / (90.0 * 20.0)).ln(), epsilon = 1e-14);
        assert_relative_eq!(e.y, -0.8109, epsilon = 5e-5);
        assert_relative_eq!(e.variance, 0.1736, epsilon = 5e-5);
    }

    #[test]
    fn log_or_continuity_correction() {
        // cells (0, 10, 5, 5) -> corrected (0.5, 10.5, 5.5, 5.5)
        let e = log_odds_ratio(&table(0.0, 10.0, 5.0, 10.0), "s").unwrap();
        assert_relative_eq!(e.y, (0.5f64 / 10.5).ln(), epsilon = 1e-14);
        assert_relative_eq!(e.y, -3.0445, epsilon = 5e-5);
        assert_relative_eq!(e.variance, 2.4589, epsilon = 5e-5);
    }

    #[test]
    fn log_or_degenerate_rejected() {
        // all events in both arms: after correction b = c ... still finite?
        // a=n1, c=n2 gives zero cells b and d -> corrected, finite. The
        // genuinely non-finite case is a zero total, caught at construction.
        assert!(TwoByTwoTable::new(5.0, 0.0, 1.0, 10.0).is_err());
        assert!(TwoByTwoTable::new(11.0, 10.0, 1.0, 10.0).is_err());
    }

    #[test]
    fn logit_paper_rows() {
        let e = logit_proportion(50.0 * 0.460, 50.0, "s").unwrap();
        assert_relative_eq!(e.y, -0.1603, epsilon = 5e-5);
        assert_relative_eq!(e.variance, 0.0805, epsilon = 5e-5);

        let e = logit_proportion(274.0 * 0.725, 274.0, "s").unwrap();
        assert_relative_eq!(e.y, 0.9694, epsilon = 5e-5);
        assert_relative_eq!(e.variance, 0.0183, epsilon = 5e-5);
    }

    #[test]
    fn logit_half_events() {
        let e = logit_proportion(25.0, 50.0, "s").unwrap();
        assert_relative_eq!(e.y, 0.0, epsilon = 1e-14);
        assert_relative_eq!(e.variance, 4.0 / 50.0, epsilon = 1e-14);
    }

    #[test]
    fn logit_boundary_rejected() {
        assert!(logit_proportion(0.0, 50.0, "s").is_err());
        assert!(logit_proportion(50.0, 50.0, "s").is_err());
    }

    #[test]
    #[allow(clippy::approx_constant)] // 0.6931 is the frozen 4-decimal value
    fn rom_hand_computed() {
        let e = log_ratio_of_means(2.0, 1.0, 100.0, 1.0, 1.0, 100.0, "s").unwrap();
        assert_relative_eq!(e.y, 0.6931, epsilon = 5e-5);
        assert_relative_eq!(e.variance, 0.0125, epsilon = 1e-14);
    }

    #[test]
    fn rom_equal_means_zero() {
        let e = log_ratio_of_means(3.7, 1.0, 10.0, 3.7, 2.0, 12.0, "s").unwrap();
        assert_relative_eq!(e.y, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn rom_zero_variance_rejected() {
        // deterministic ratio: y would be exactly 1, but variance 0 is not a
        // valid EffectEstimate
        let r = log_ratio_of_means(std::f64::consts::E, 0.0, 10.0, 1.0, 0.0, 10.0, "s");
        assert!(r.is_err());
    }

    #[test]
    fn rom_nonpositive_mean_rejected() {
        assert!(log_ratio_of_means(0.0, 1.0, 10.0, 1.0, 1.0, 10.0, "s").is_err());
        assert!(log_ratio_of_means(1.0, 1.0, 10.0, -2.0, 1.0, 10.0, "s").is_err());
    }

    proptest! {
        #[test]
        fn log_or_arm_swap_negates(a in 1.0f64..50.0, b in 1.0f64..50.0,
                                   c in 1.0f64..50.0, d in 1.0f64..50.0) {
            let t1 = table(a, a + b, c, c + d);
            let t2 = table(c, c + d, a, a + b);
            let e1 = log_odds_ratio(&t1, "x").unwrap();
            let e2 = log_odds_ratio(&t2, "x").unwrap();
            prop_assert!((e1.y + e2.y).abs() < 1e-12);
            prop_assert!((e1.variance - e2.variance).abs() < 1e-12);
        }

        #[test]
        fn logit_complement_negates(events in 0.5f64..99.5, n in 100.0f64..200.0) {
            let e1 = logit_proportion(events, n, "x").unwrap();
            let e2 = logit_proportion(n - events, n, "x").unwrap();
            prop_assert!((e1.y + e2.y).abs() < 1e-12);
            prop_assert!((e1.variance - e2.variance).abs() < 1e-12);
        }

        #[test]
        fn variances_strictly_positive(a in 0.0f64..20.0, b in 1.0f64..20.0,
                                       c in 0.0f64..20.0, d in 1.0f64..20.0) {
            let t = table(a, a + b, c, c + d);
            let e = log_odds_ratio(&t, "x").unwrap();
            prop_assert!(e.variance > 0.0);
        }
    }
}
