//! Shared numerical routines: adaptive quadrature, 1-D optimization,
//! root finding, normal-distribution helpers and monotone interpolation.

use statrs::distribution::{Continuous, ContinuousCDF, Normal};

/// Standard normal density.
pub fn std_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Standard normal CDF.
pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-z / std::f64::consts::SQRT_2)
}

/// Standard normal quantile.
pub fn std_normal_quantile(p: f64) -> f64 {
    Normal::standard().inverse_cdf(p)
}

/// Density of Normal(mean, sd) at x.
pub fn normal_pdf(x: f64, mean: f64, sd: f64) -> f64 {
    Normal::new(mean, sd).expect("sd must be positive").pdf(x)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
///
/// Recursion stops when the local Simpson error estimate is below the
/// per-interval tolerance (classic |S2 - S1| <= 15 tol rule) or when the
/// depth cap is reached. `tol` is an absolute tolerance on the integral.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(a, b, fa, fm, fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol.max(f64::MIN_POSITIVE), 50)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// Golden-section search for the maximum of `f` on `[a, b]`.
///
/// Returns `(x, f(x))`. Assumes `f` is unimodal on the bracket; callers
/// needing a global maximum should multi-start over sub-brackets.
pub fn golden_max(f: &dyn Fn(f64) -> f64, a: f64, b: f64, xtol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (a, b);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > xtol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Maximize `f` over `[a, b]` by golden-section search in `n_panels`
/// sub-brackets, also checking both endpoints. Robust to multimodality
/// at panel resolution.
pub fn panel_max(f: &dyn Fn(f64) -> f64, a: f64, b: f64, n_panels: usize, xtol: f64) -> (f64, f64) {
    let mut best = (a, f(a));
    let fb = f(b);
    if fb > best.1 {
        best = (b, fb);
    }
    let h = (b - a) / n_panels as f64;
    for i in 0..n_panels {
        let lo = a + i as f64 * h;
        let cand = golden_max(f, lo, lo + h, xtol);
        if cand.1 > best.1 {
            best = cand;
        }
    }
    best
}

/// Bisection root finding for `f(x) = 0` on `[lo, hi]`, assuming
/// `f(lo) <= 0 <= f(hi)`. Iterates until the bracket width or the
/// residual falls below `tol`.
pub fn bisect(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> f64 {
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm.abs() <= tol || (hi - lo) <= tol * mid.abs().max(1.0) * 1e-4 {
            return mid;
        }
        if fm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Shortest credible interval from a quantile function: minimizes
/// `q(p + level) - q(p)` over `p` by golden-section search (tolerance
/// 1e-6 in `p`), probing arbitrarily close to the boundaries.
pub fn shortest_interval(q: &dyn Fn(f64) -> f64, level: f64) -> crate::error::Result<(f64, f64)> {
    if !(level > 0.0 && level < 1.0) {
        return Err(crate::error::Error::invalid(format!(
            "interval level must be in (0,1), got {level}"
        )));
    }
    let eps = 1e-12;
    let width = |p: f64| q(p + level) - q(p);
    let neg_width = |p: f64| -width(p);
    let (p_star, _) = golden_max(&neg_width, eps, 1.0 - level - eps, 1e-6);
    // keep the better of the interior optimum and the near-boundary probes
    let mut best_p = p_star;
    let mut best_w = width(p_star);
    for p in [eps, 1.0 - level - eps] {
        let w = width(p);
        if w < best_w {
            best_w = w;
            best_p = p;
        }
    }
    Ok((q(best_p), q(best_p + level)))
}

/// Monotone piecewise-cubic (Fritsch–Carlson) interpolant.
///
/// Interpolates tabulated `(x, y)` data without overshooting: within each
/// interval the interpolant stays inside the range of the two endpoint
/// values, so nonnegative data yield a nonnegative interpolant.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    /// Build from strictly increasing `xs` and matching `ys`.
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Option<Self> {
        let n = xs.len();
        if n < 2 || ys.len() != n {
            return None;
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return None;
        }
        let mut d = vec![0.0; n - 1];
        for i in 0..n - 1 {
            d[i] = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
        }
        let mut m = vec![0.0; n];
        m[0] = d[0];
        m[n - 1] = d[n - 2];
        for i in 1..n - 1 {
            m[i] = if d[i - 1] * d[i] <= 0.0 {
                0.0
            } else {
                // harmonic mean keeps the interpolant monotone on the interval
                let w1 = 2.0 * (xs[i + 1] - xs[i]) + (xs[i] - xs[i - 1]);
                let w2 = (xs[i + 1] - xs[i]) + 2.0 * (xs[i] - xs[i - 1]);
                (w1 + w2) / (w1 / d[i - 1] + w2 / d[i])
            };
        }
        // Fritsch-Carlson limiter
        for i in 0..n - 1 {
            if d[i] == 0.0 {
                m[i] = 0.0;
                m[i + 1] = 0.0;
            } else {
                let alpha = m[i] / d[i];
                let beta = m[i + 1] / d[i];
                let s = alpha * alpha + beta * beta;
                if s > 9.0 {
                    let t = 3.0 / s.sqrt();
                    m[i] = t * alpha * d[i];
                    m[i + 1] = t * beta * d[i];
                }
            }
        }
        Some(MonotoneCubic { xs, ys, slopes: m })
    }

    /// Evaluate at `x`; returns `None` outside the tabulated range.
    pub fn eval(&self, x: f64) -> Option<f64> {
        let n = self.xs.len();
        if x < self.xs[0] || x > self.xs[n - 1] {
            return None;
        }
        let i = match self.xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(i) => i.min(n - 2),
            Err(i) => i - 1,
        };
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
        let h10 = t * (1.0 - t) * (1.0 - t);
        let h01 = t * t * (3.0 - 2.0 * t);
        let h11 = t * t * (t - 1.0);
        Some(
            h00 * self.ys[i]
                + h10 * h * self.slopes[i]
                + h01 * self.ys[i + 1]
                + h11 * h * self.slopes[i + 1],
        )
    }

    pub fn x_max(&self) -> f64 {
        *self.xs.last().unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn simpson_polynomial_exact() {
        // cubic integrated exactly by Simpson's rule
        let f = |x: f64| 3.0 * x * x + 2.0 * x + 1.0;
        let got = adaptive_simpson(&f, 0.0, 2.0, 1e-12);
        assert_relative_eq!(got, 14.0, max_relative = 1e-12);
    }

    #[test]
    fn simpson_gaussian() {
        let f = |x: f64| std_normal_pdf(x);
        let got = adaptive_simpson(&f, -8.0, 8.0, 1e-12);
        assert_relative_eq!(got, 1.0, max_relative = 1e-10);
    }

    #[test]
    fn golden_finds_parabola_peak() {
        let f = |x: f64| -(x - 1.3).powi(2);
        let (x, _) = golden_max(&f, -5.0, 5.0, 1e-10);
        assert_relative_eq!(x, 1.3, epsilon = 1e-8);
    }

    #[test]
    fn bisect_finds_root() {
        let f = |x: f64| x * x - 2.0;
        let r = bisect(&f, 0.0, 2.0, 1e-12);
        assert_relative_eq!(r, std::f64::consts::SQRT_2, epsilon = 1e-9);
    }

    #[test]
    fn normal_helpers_agree() {
        assert_relative_eq!(std_normal_cdf(0.0), 0.5, epsilon = 1e-15);
        assert_relative_eq!(std_normal_quantile(0.975), 1.959964, epsilon = 1e-5);
        assert_relative_eq!(
            normal_pdf(0.0, 0.0, 1.0),
            std_normal_pdf(0.0),
            epsilon = 1e-15
        );
    }

    #[test]
    fn monotone_cubic_no_overshoot() {
        let xs = vec![0.0, 1.0, 2.0, 3.0, 4.0];
        let ys = vec![0.0, 0.1, 0.9, 1.0, 1.0];
        let interp = MonotoneCubic::new(xs, ys).unwrap();
        let mut prev = -1.0;
        for i in 0..=400 {
            let x = i as f64 * 0.01;
            let y = interp.eval(x).unwrap();
            assert!(y >= prev - 1e-12, "not monotone at {x}");
            assert!((0.0..=1.0 + 1e-12).contains(&y));
            prev = y;
        }
        assert_relative_eq!(interp.eval(2.0).unwrap(), 0.9);
        assert!(interp.eval(4.5).is_none());
    }
}
