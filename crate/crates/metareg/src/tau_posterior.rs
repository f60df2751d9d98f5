//! The continuous, normalized posterior of the heterogeneity parameter,
//! with a cached CDF for quantile root finding.
//!
//! Built from an unnormalized log-density on `[0, inf)`. The upper
//! integration limit is found by doubling until the integrand falls below
//! 1e-12 of its maximum; the interval is then subdivided adaptively and
//! per-segment Simpson integrals are cached for CDF/quantile queries.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numeric::{adaptive_simpson, golden_max, panel_max};

/// Relative integrand threshold defining the effective upper support bound.
const TAIL_CUTOFF: f64 = 1e-12;

type LogDensity = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Normalized 1-D posterior density on `[0, inf)` with cached CDF.
pub struct TauPosterior {
    lp: LogDensity,
    /// log of the normalizing constant: ln integral of exp(lp).
    log_norm: f64,
    /// lp value at the density maximum (used for scaling).
    lp_max: f64,
    /// Effective upper support bound.
    upper: f64,
    /// Segment boundaries covering [0, upper], strictly increasing.
    knots: Vec<f64>,
    /// Cumulative unnormalized mass up to each knot (same scale as `total`).
    cum: Vec<f64>,
    /// Total unnormalized mass of exp(lp - lp_max) over [0, upper].
    total: f64,
}

impl std::fmt::Debug for TauPosterior {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TauPosterior")
            .field("log_norm", &self.log_norm)
            .field("upper", &self.upper)
            .field("segments", &(self.knots.len() - 1))
            .finish()
    }
}

impl TauPosterior {
    /// Build from an unnormalized log-density. `scale_hint` sets the initial
    /// search scale (a typical standard error works well).
    pub fn build(lp: LogDensity, scale_hint: f64) -> Result<Self> {
        let hint = if scale_hint.is_finite() && scale_hint > 0.0 {
            scale_hint
        } else {
            1.0
        };

        // locate the maximum on a geometric ladder, then refine
        let mut ladder = vec![0.0];
        for i in -20..=50 {
            ladder.push(hint * 2f64.powi(i));
        }
        let vals: Vec<f64> = ladder.iter().map(|&t| lp(t)).collect();
        let (mut arg, mut best) = (0usize, f64::NEG_INFINITY);
        for (i, v) in vals.iter().enumerate() {
            if *v > best {
                best = *v;
                arg = i;
            }
        }
        if !best.is_finite() {
            return Err(Error::numeric(
                "tau posterior log-density is nowhere finite",
            ));
        }
        if arg + 1 >= ladder.len() {
            return Err(Error::numeric(
                "tau posterior appears non-normalizable: density still rising at the search cap",
            ));
        }
        let lo = if arg == 0 { 0.0 } else { ladder[arg - 1] };
        let hi = ladder[arg + 1];
        let (mode_guess, lp_refined) = golden_max(&|t| lp(t), lo, hi, 1e-10 * (1.0 + hi));
        let lp_max = lp_refined.max(lp(0.0));
        let mode_guess = if lp(0.0) >= lp_refined {
            0.0
        } else {
            mode_guess
        };

        // upper limit: double until the integrand decays below the cutoff
        let mut upper = (2.0 * mode_guess).max(hint);
        let cap = hint * 2f64.powi(70);
        while lp(upper) - lp_max > TAIL_CUTOFF.ln() {
            upper *= 2.0;
            if upper > cap {
                return Err(Error::numeric(
                    "tau posterior appears non-normalizable: no upper tail decay",
                ));
            }
        }

        // adaptive segment refinement of exp(lp - lp_max) over [0, upper]
        let g = |t: f64| (lp(t) - lp_max).exp();
        let n0 = 128usize;
        let h = upper / n0 as f64;
        let coarse: f64 = (0..n0)
            .map(|i| {
                let a = i as f64 * h;
                simpson_value(&g, a, a + h)
            })
            .sum();
        if !(coarse.is_finite() && coarse > 0.0) {
            return Err(Error::numeric("tau posterior has zero or non-finite mass"));
        }
        let mut segments: Vec<(f64, f64, f64)> = Vec::new();
        for i in 0..n0 {
            let a = i as f64 * h;
            let b = a + h;
            let budget = 1e-10 * coarse / n0 as f64;
            refine_segment(&g, a, b, budget, 44, &mut segments);
        }
        let mut knots = Vec::with_capacity(segments.len() + 1);
        let mut cum = Vec::with_capacity(segments.len() + 1);
        knots.push(0.0);
        cum.push(0.0);
        let mut acc = 0.0;
        for (_, b, s) in &segments {
            acc += s;
            knots.push(*b);
            cum.push(acc);
        }
        let total = acc;
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::numeric("tau posterior normalization failed"));
        }
        let log_norm = lp_max + total.ln();

        Ok(TauPosterior {
            lp,
            log_norm,
            lp_max,
            upper,
            knots,
            cum,
            total,
        })
    }

    /// ln of the normalizing constant of the unnormalized log-density.
    pub fn log_norm_const(&self) -> f64 {
        self.log_norm
    }

    /// Effective upper support bound used for integration.
    pub fn upper(&self) -> f64 {
        self.upper
    }

    /// Normalized posterior density at `tau`.
    pub fn density(&self, tau: f64) -> f64 {
        if tau < 0.0 {
            return 0.0;
        }
        ((self.lp)(tau) - self.log_norm).exp()
    }

    /// Normalized log-density at `tau`.
    pub fn log_density(&self, tau: f64) -> f64 {
        (self.lp)(tau) - self.log_norm
    }

    /// Posterior CDF at `tau`.
    pub fn cdf(&self, tau: f64) -> f64 {
        if tau <= 0.0 {
            return 0.0;
        }
        if tau >= self.upper {
            return 1.0;
        }
        let i = match self
            .knots
            .binary_search_by(|v| v.partial_cmp(&tau).unwrap())
        {
            Ok(i) => return self.cum[i] / self.total,
            Err(i) => i - 1,
        };
        let g = |t: f64| ((self.lp)(t) - self.lp_max).exp();
        let part = composite_simpson(&g, self.knots[i], tau, 8);
        ((self.cum[i] + part) / self.total).clamp(0.0, 1.0)
    }

    /// Posterior quantile for `p` in (0,1), solved to 1e-8 in CDF units.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::invalid(format!(
                "quantile level must be in (0,1), got {p}"
            )));
        }
        // bracket by cached knots, then bisect inside one segment
        let target = p * self.total;
        let i = match self
            .cum
            .binary_search_by(|v| v.partial_cmp(&target).unwrap())
        {
            Ok(i) => return Ok(self.knots[i]),
            Err(i) => i.saturating_sub(1).min(self.knots.len() - 2),
        };
        let (mut lo, mut hi) = (self.knots[i], self.knots[i + 1]);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            let c = self.cdf(mid);
            if (c - p).abs() <= 1e-8 {
                return Ok(mid);
            }
            if c < p {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= f64::EPSILON * hi.abs().max(1e-300) {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Posterior mean, by quadrature.
    pub fn mean(&self) -> f64 {
        let g = |t: f64| t * ((self.lp)(t) - self.lp_max).exp();
        adaptive_simpson(&g, 0.0, self.upper, 1e-12 * self.total * (1.0 + self.upper)) / self.total
    }

    /// Posterior standard deviation, by quadrature.
    pub fn sd(&self) -> f64 {
        let m = self.mean();
        let g = |t: f64| (t - m) * (t - m) * ((self.lp)(t) - self.lp_max).exp();
        let v = adaptive_simpson(&g, 0.0, self.upper, 1e-12 * self.total * (1.0 + self.upper))
            / self.total;
        v.max(0.0).sqrt()
    }

    /// Posterior mode (global over the effective support, boundary included).
    pub fn mode(&self) -> f64 {
        let f = |t: f64| (self.lp)(t);
        let (x, _) = panel_max(&f, 0.0, self.upper, 64, 1e-10 * (1.0 + self.upper));
        x
    }

    /// Shortest or central credible interval at the given level.
    pub fn credible_interval(
        &self,
        level: f64,
        method: crate::mixture::IntervalMethod,
    ) -> Result<(f64, f64)> {
        if !(level > 0.0 && level < 1.0) {
            return Err(Error::invalid(format!(
                "level must be in (0,1), got {level}"
            )));
        }
        match method {
            crate::mixture::IntervalMethod::Central => Ok((
                self.quantile((1.0 - level) / 2.0)?,
                self.quantile((1.0 + level) / 2.0)?,
            )),
            crate::mixture::IntervalMethod::Shortest => crate::numeric::shortest_interval(
                &|p| self.quantile(p).unwrap_or(self.upper),
                level,
            ),
        }
    }

    /// Tabulate the density on `n` points over [0, quantile(1 - 1e-6)],
    /// e.g. for reuse as a heterogeneity prior in a follow-up analysis.
    pub fn tabulate(&self, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        if n < 2 {
            return Err(Error::invalid("tabulation needs at least 2 points"));
        }
        let hi = self.quantile(1.0 - 1e-6)?;
        let taus: Vec<f64> = (0..n).map(|i| hi * i as f64 / (n - 1) as f64).collect();
        let dens: Vec<f64> = taus.iter().map(|&t| self.density(t)).collect();
        Ok((taus, dens))
    }
}

fn simpson_value(g: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let m = 0.5 * (a + b);
    (b - a) / 6.0 * (g(a) + 4.0 * g(m) + g(b))
}

fn composite_simpson(g: &dyn Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| simpson_value(g, a + i as f64 * h, a + (i + 1) as f64 * h))
        .sum()
}

/// Recursively split [a,b] until the Simpson error estimate meets the
/// budget, pushing resolved sub-segments with their integral estimates.
fn refine_segment(
    g: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    budget: f64,
    depth: u32,
    out: &mut Vec<(f64, f64, f64)>,
) {
    let m = 0.5 * (a + b);
    let whole = simpson_value(g, a, b);
    let left = simpson_value(g, a, m);
    let right = simpson_value(g, m, b);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * budget {
        out.push((a, m, left + delta / 30.0));
        out.push((m, b, right + delta / 30.0));
    } else {
        refine_segment(g, a, m, 0.5 * budget, depth - 1, out);
        refine_segment(g, m, b, 0.5 * budget, depth - 1, out);
    }
}
