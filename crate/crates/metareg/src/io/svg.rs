//! SVG renderers: forest plots (per-study estimates, shrinkage intervals,
//! regressor table, coefficient/combination/prediction rows, heterogeneity
//! footer) and trend/bubble plots for continuous covariables.
//!
//! Output is plain text built deterministically: identical inputs yield
//! byte-identical files. Plot areas carry `data-*` attributes describing
//! the value-to-pixel mapping so renderings can be checked mechanically.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::PosteriorGrid;
use crate::inference::{
    coefficient_mixture, combination_mixture, shrinkage_mixture, SummaryRequest, SummaryRow,
};
use crate::mixture::IntervalMethod;
use crate::model_spec::RegressionProblem;

const WIDTH: f64 = 860.0;
const ROW_H: f64 = 26.0;

fn px(v: f64) -> String {
    format!("{v:.2}")
}

fn val(v: f64) -> String {
    format!("{v:.3}")
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

struct Scale {
    x0: f64,
    x1: f64,
    v0: f64,
    v1: f64,
}

impl Scale {
    fn map(&self, v: f64) -> f64 {
        self.x0 + (v - self.v0) * (self.x1 - self.x0) / (self.v1 - self.v0)
    }
}

/// Extra content of a forest plot beyond the coefficient rows.
#[derive(Debug, Clone, Default)]
pub struct ForestSpec {
    pub xlabel: String,
    /// Additional combination (mean) and prediction rows.
    pub extra: Vec<SummaryRequest>,
}

struct PlotRow {
    class: &'static str,
    label: String,
    point: f64,
    lo: f64,
    hi: f64,
    shrink: Option<(f64, f64)>,
    xvals: Option<Vec<f64>>,
}

/// Render a forest plot for a fitted (or reloaded) model.
pub fn render_forest(
    problem: &RegressionProblem,
    grid: &PosteriorGrid,
    tau_row: &SummaryRow,
    spec: &ForestSpec,
    level: f64,
) -> Result<String> {
    let k = problem.k();
    let d = problem.d();
    let z = crate::numeric::std_normal_quantile(0.5 + level / 2.0);

    let mut rows: Vec<PlotRow> = Vec::with_capacity(k + d + spec.extra.len());
    for i in 0..k {
        let y = problem.dataset.y[i];
        let s = problem.dataset.sigma[i];
        let shrink = shrinkage_mixture(problem, grid, i)?
            .credible_interval(level, IntervalMethod::Shortest)?;
        rows.push(PlotRow {
            class: "study",
            label: problem.dataset.labels[i].clone(),
            point: y,
            lo: y - z * s,
            hi: y + z * s,
            shrink: Some(shrink),
            xvals: Some(problem.design.row(i).iter().cloned().collect()),
        });
    }
    for j in 0..d {
        let mix = coefficient_mixture(grid, j)?;
        let (lo, hi) = mix.credible_interval(level, IntervalMethod::Shortest)?;
        rows.push(PlotRow {
            class: "summary",
            label: problem.design.column_names[j].clone(),
            point: mix.quantile(0.5)?,
            lo,
            hi,
            shrink: None,
            xvals: None,
        });
    }
    for req in &spec.extra {
        let mix = combination_mixture(grid, &req.x, req.mean)?;
        let (lo, hi) = mix.credible_interval(level, IntervalMethod::Shortest)?;
        rows.push(PlotRow {
            class: if req.mean { "summary" } else { "prediction" },
            label: req.name.clone(),
            point: mix.quantile(0.5)?,
            lo,
            hi,
            shrink: None,
            xvals: None,
        });
    }

    let plot_x0 = 250.0 + 40.0 * d as f64;
    let plot_x1 = WIDTH - 15.0;
    let mut v0 = f64::INFINITY;
    let mut v1 = f64::NEG_INFINITY;
    for r in &rows {
        v0 = v0.min(r.lo).min(r.shrink.map_or(r.lo, |s| s.0));
        v1 = v1.max(r.hi).max(r.shrink.map_or(r.hi, |s| s.1));
    }
    v0 = v0.min(0.0);
    v1 = v1.max(0.0);
    let pad = 0.05 * (v1 - v0).max(1e-9);
    let scale = Scale {
        x0: plot_x0,
        x1: plot_x1,
        v0: v0 - pad,
        v1: v1 + pad,
    };

    let height = 70.0 + ROW_H * rows.len() as f64 + 40.0;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">",
        px(WIDTH),
        px(height),
        px(WIDTH),
        px(height)
    );
    let _ = writeln!(
        svg,
        "<rect width=\"{}\" height=\"{}\" fill=\"white\"/>",
        px(WIDTH),
        px(height)
    );
    let _ = writeln!(
        svg,
        "<g class=\"plot-area\" data-x0=\"{}\" data-x1=\"{}\" data-v0=\"{}\" data-v1=\"{}\">",
        px(scale.x0),
        px(scale.x1),
        scale.v0,
        scale.v1
    );

    // header: regressor column names
    let mut y = 30.0;
    let _ = writeln!(
        svg,
        "<text x=\"10\" y=\"{}\" font-size=\"12\" font-weight=\"bold\">study</text>",
        px(y)
    );
    for (j, name) in problem.design.column_names.iter().enumerate() {
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" font-weight=\"bold\" text-anchor=\"end\">{}</text>",
            px(250.0 + 40.0 * j as f64 - 6.0),
            px(y),
            esc(name)
        );
    }
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\" font-size=\"12\" font-weight=\"bold\" text-anchor=\"middle\">{}</text>",
        px(0.5 * (plot_x0 + plot_x1)),
        px(y),
        esc(&spec.xlabel)
    );

    // zero reference line
    if scale.v0 < 0.0 && scale.v1 > 0.0 {
        let zx = scale.map(0.0);
        let _ = writeln!(
            svg,
            "<line class=\"zero-line\" x1=\"{}\" y1=\"40\" x2=\"{}\" y2=\"{}\" stroke=\"#999999\" stroke-dasharray=\"3,3\"/>",
            px(zx),
            px(zx),
            px(50.0 + ROW_H * rows.len() as f64)
        );
    }

    y = 50.0;
    for r in &rows {
        let cy = y + 0.5 * ROW_H;
        let _ = writeln!(
            svg,
            "<g class=\"row {}\" data-row=\"{}\">",
            r.class,
            esc(&r.label)
        );
        let _ = writeln!(
            svg,
            "<text x=\"10\" y=\"{}\" font-size=\"11\">{}</text>",
            px(cy + 4.0),
            esc(&r.label)
        );
        if let Some(xvals) = &r.xvals {
            for (j, v) in xvals.iter().enumerate() {
                let _ = writeln!(
                    svg,
                    "<text class=\"xcell\" x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">{}</text>",
                    px(250.0 + 40.0 * j as f64 - 6.0),
                    px(cy + 4.0),
                    format_xval(*v)
                );
            }
        }
        if let Some((slo, shi)) = r.shrink {
            let _ = writeln!(
                svg,
                "<line class=\"shrink-ci\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#9ecae1\" stroke-width=\"7\" stroke-opacity=\"0.8\"/>",
                px(scale.map(slo)),
                px(cy),
                px(scale.map(shi)),
                px(cy)
            );
        }
        match r.class {
            "study" => {
                let _ = writeln!(
                    svg,
                    "<line class=\"study-ci\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\" stroke-width=\"1.5\"/>",
                    px(scale.map(r.lo)),
                    px(cy),
                    px(scale.map(r.hi)),
                    px(cy)
                );
                let _ = writeln!(
                    svg,
                    "<circle class=\"study-point\" data-row=\"{}\" cx=\"{}\" cy=\"{}\" r=\"3.5\" fill=\"black\"/>",
                    esc(&r.label),
                    px(scale.map(r.point)),
                    px(cy)
                );
            }
            _ => {
                let color = if r.class == "prediction" {
                    "#d62728"
                } else {
                    "#1f3d7a"
                };
                let _ = writeln!(
                    svg,
                    "<line class=\"summary-ci\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{color}\" stroke-width=\"2\"/>",
                    px(scale.map(r.lo)),
                    px(cy),
                    px(scale.map(r.hi)),
                    px(cy)
                );
                let _ = writeln!(
                    svg,
                    "<circle class=\"summary-median\" data-row=\"{}\" cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"{color}\"/>",
                    esc(&r.label),
                    px(scale.map(r.point)),
                    px(cy)
                );
            }
        }
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"start\" fill=\"#555555\">{} [{}, {}]</text>",
            px(plot_x1 - 160.0),
            px(cy - 6.0),
            val(r.point),
            val(r.lo),
            val(r.hi)
        );
        let _ = writeln!(svg, "</g>");
        y += ROW_H;
    }

    // heterogeneity footer
    let _ = writeln!(
        svg,
        "<text class=\"tau-footer\" x=\"10\" y=\"{}\" font-size=\"11\">tau: median {}, {}% CI [{}, {}]</text>",
        px(y + 24.0),
        val(tau_row.median),
        (level * 100.0).round(),
        val(tau_row.ci_lower),
        val(tau_row.ci_upper)
    );
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(svg, "</svg>");
    Ok(svg)
}

fn format_xval(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e6 {
        format!("{}", v as i64)
    } else {
        format!("{v:.2}")
    }
}

/// Render a forest plot straight to a file.
pub fn render_forest_svg(
    problem: &RegressionProblem,
    grid: &PosteriorGrid,
    tau_row: &SummaryRow,
    spec: &ForestSpec,
    level: f64,
    path: impl AsRef<Path>,
) -> Result<()> {
    let svg = render_forest(problem, grid, tau_row, spec, level)?;
    std::fs::write(path.as_ref(), svg)?;
    Ok(())
}

/// One slot of a trend-plot covariable template.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrendEntry {
    Fixed(f64),
    Varying,
}

/// Specification of a trend (or bubble) plot: studies scattered against
/// one design column, with posterior mean and prediction bands along a
/// grid of covariable values.
#[derive(Debug, Clone)]
pub struct TrendSpec {
    /// Design column providing the scatter x-coordinates.
    pub covariable: usize,
    /// Covariable vector template with exactly one varying slot.
    pub template: Vec<TrendEntry>,
    /// Grid of values for the varying slot.
    pub x_values: Vec<f64>,
    /// Scale point sizes inversely to standard errors instead of whiskers.
    pub bubble: bool,
    /// Optional design column splitting studies into two color groups
    /// (zero vs nonzero).
    pub group_by: Option<usize>,
    pub xlabel: String,
    pub ylabel: String,
}

/// Render a trend plot.
pub fn render_trend(
    problem: &RegressionProblem,
    grid: &PosteriorGrid,
    spec: &TrendSpec,
    level: f64,
) -> Result<String> {
    let d = problem.d();
    if d < 2 {
        return Err(Error::invalid(
            "trend plots need at least two design columns (intercept and a covariable)",
        ));
    }
    if spec.covariable >= d {
        return Err(Error::invalid(format!(
            "covariable index {} out of range for {d} columns",
            spec.covariable
        )));
    }
    if spec.template.len() != d {
        return Err(Error::invalid(format!(
            "template has {} entries for {d} design columns",
            spec.template.len()
        )));
    }
    let varying = spec
        .template
        .iter()
        .filter(|e| matches!(e, TrendEntry::Varying))
        .count();
    if varying != 1 {
        return Err(Error::invalid(
            "template must contain exactly one varying slot",
        ));
    }
    if spec.x_values.is_empty() {
        return Err(Error::invalid("no covariable grid values given"));
    }
    if let Some(g) = spec.group_by {
        if g >= d {
            return Err(Error::invalid(format!(
                "group column {g} out of range for {d} columns"
            )));
        }
    }

    // bands along the covariable grid
    let mut mean_band = Vec::with_capacity(spec.x_values.len());
    let mut pred_band = Vec::with_capacity(spec.x_values.len());
    for &t in &spec.x_values {
        let x: Vec<f64> = spec
            .template
            .iter()
            .map(|e| match e {
                TrendEntry::Fixed(v) => *v,
                TrendEntry::Varying => t,
            })
            .collect();
        let mean = combination_mixture(grid, &x, true)?;
        let (mlo, mhi) = mean.credible_interval(level, IntervalMethod::Shortest)?;
        mean_band.push((t, mean.quantile(0.5)?, mlo, mhi));
        let pred = combination_mixture(grid, &x, false)?;
        let (plo, phi) = pred.credible_interval(level, IntervalMethod::Shortest)?;
        pred_band.push((t, pred.quantile(0.5)?, plo, phi));
    }

    let k = problem.k();
    let z = crate::numeric::std_normal_quantile(0.5 + level / 2.0);
    let xs: Vec<f64> = (0..k)
        .map(|i| problem.design.entries[(i, spec.covariable)])
        .collect();
    let ys: Vec<f64> = problem.dataset.y.iter().cloned().collect();

    let mut vx0 = f64::INFINITY;
    let mut vx1 = f64::NEG_INFINITY;
    for &t in spec.x_values.iter().chain(xs.iter()) {
        vx0 = vx0.min(t);
        vx1 = vx1.max(t);
    }
    if vx1 <= vx0 {
        vx1 = vx0 + 1.0;
    }
    let mut vy0 = f64::INFINITY;
    let mut vy1 = f64::NEG_INFINITY;
    for (yi, si) in ys.iter().zip(problem.dataset.sigma.iter()) {
        vy0 = vy0.min(yi - z * si);
        vy1 = vy1.max(yi + z * si);
    }
    for b in mean_band.iter().chain(pred_band.iter()) {
        vy0 = vy0.min(b.2);
        vy1 = vy1.max(b.3);
    }
    let padx = 0.05 * (vx1 - vx0);
    let pady = 0.05 * (vy1 - vy0).max(1e-9);

    let height = 520.0;
    let sx = Scale {
        x0: 70.0,
        x1: WIDTH - 20.0,
        v0: vx0 - padx,
        v1: vx1 + padx,
    };
    // y grows downward in SVG: map the top of the range to the top margin
    let sy = Scale {
        x0: height - 50.0,
        x1: 30.0,
        v0: vy0 - pady,
        v1: vy1 + pady,
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">",
        px(WIDTH),
        px(height),
        px(WIDTH),
        px(height)
    );
    let _ = writeln!(
        svg,
        "<rect width=\"{}\" height=\"{}\" fill=\"white\"/>",
        px(WIDTH),
        px(height)
    );
    let _ = writeln!(
        svg,
        "<g class=\"plot-area\" data-x0=\"{}\" data-x1=\"{}\" data-vx0=\"{}\" data-vx1=\"{}\" data-y0=\"{}\" data-y1=\"{}\" data-vy0=\"{}\" data-vy1=\"{}\">",
        px(sx.x0),
        px(sx.x1),
        sx.v0,
        sx.v1,
        px(sy.x0),
        px(sy.x1),
        sy.v0,
        sy.v1
    );
    // axes
    let _ = writeln!(
        svg,
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>",
        px(sx.x0),
        px(sy.x0),
        px(sx.x1),
        px(sy.x0)
    );
    let _ = writeln!(
        svg,
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>",
        px(sx.x0),
        px(sy.x0),
        px(sx.x0),
        px(sy.x1)
    );
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">{}</text>",
        px(0.5 * (sx.x0 + sx.x1)),
        px(height - 12.0),
        esc(&spec.xlabel)
    );
    let _ = writeln!(
        svg,
        "<text x=\"16\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{}</text>",
        px(0.5 * (sy.x0 + sy.x1)),
        px(0.5 * (sy.x0 + sy.x1)),
        esc(&spec.ylabel)
    );

    // bands (prediction behind mean)
    for (band, stem, color) in [
        (&pred_band, "pred", "#d62728"),
        (&mean_band, "mean", "#1f77b4"),
    ] {
        if band.len() == 1 {
            let (t, med, lo, hi) = band[0];
            let _ = writeln!(
                svg,
                "<line class=\"{stem}-band-degenerate\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{color}\" stroke-width=\"2\"/>",
                px(sx.map(t)),
                px(sy.map(lo)),
                px(sx.map(t)),
                px(sy.map(hi))
            );
            let _ = writeln!(
                svg,
                "<circle class=\"{stem}-median\" cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"{color}\"/>",
                px(sx.map(t)),
                px(sy.map(med))
            );
            continue;
        }
        for (idx, class) in [(1usize, "median"), (2, "lo"), (3, "hi")] {
            let pts: Vec<String> = band
                .iter()
                .map(|row| {
                    let v = [row.0, row.1, row.2, row.3][idx];
                    format!("{},{}", px(sx.map(row.0)), px(sy.map(v)))
                })
                .collect();
            let dash = if class == "median" {
                ""
            } else {
                " stroke-dasharray=\"5,4\""
            };
            let _ = writeln!(
                svg,
                "<polyline class=\"{stem}-{class}\" points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"{dash}/>",
                pts.join(" ")
            );
        }
    }

    // studies
    for (i, &xi) in xs.iter().enumerate() {
        let cx = sx.map(xi);
        let color = match spec.group_by {
            Some(g) if problem.design.entries[(i, g)] != 0.0 => "#d62728",
            Some(_) => "#1f77b4",
            None => "black",
        };
        if spec.bubble {
            let r = (3.0 / problem.dataset.sigma[i]).clamp(1.5, 14.0);
            let _ = writeln!(
                svg,
                "<circle class=\"study-bubble\" data-row=\"{}\" cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
                esc(&problem.dataset.labels[i]),
                px(cx),
                px(sy.map(ys[i])),
                px(r)
            );
        } else {
            let s = problem.dataset.sigma[i];
            let _ = writeln!(
                svg,
                "<line class=\"study-whisker\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{color}\"/>",
                px(cx),
                px(sy.map(ys[i] - z * s)),
                px(cx),
                px(sy.map(ys[i] + z * s))
            );
            let _ = writeln!(
                svg,
                "<circle class=\"study-point\" data-row=\"{}\" cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"{color}\"/>",
                esc(&problem.dataset.labels[i]),
                px(cx),
                px(sy.map(ys[i]))
            );
        }
    }
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(svg, "</svg>");
    Ok(svg)
}

/// Render a trend plot straight to a file.
pub fn render_trend_svg(
    problem: &RegressionProblem,
    grid: &PosteriorGrid,
    spec: &TrendSpec,
    level: f64,
    path: impl AsRef<Path>,
) -> Result<()> {
    let svg = render_trend(problem, grid, spec, level)?;
    std::fs::write(path.as_ref(), svg)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inference::{fit, FitOptions};
    use crate::model_spec::{BetaPrior, DesignMatrix, StudyDataset, TauPrior};

    fn crins_fit() -> crate::inference::FitResult {
        let ds = StudyDataset::new(
            vec![
                "Heffron".into(),
                "Gibelli".into(),
                "Schuller".into(),
                "Ganschow".into(),
                "Spada".into(),
                "Gras".into(),
            ],
            vec![-2.31, -0.46, -2.30, -1.76, -1.26, -2.42],
            vec![0.60, 0.56, 0.88, 0.46, 0.64, 1.53],
        )
        .unwrap();
        let x = DesignMatrix::from_columns(vec![
            ("basiliximab".into(), vec![0.0, 1.0, 0.0, 1.0, 1.0, 1.0]),
            ("daclizumab".into(), vec![1.0, 0.0, 1.0, 0.0, 0.0, 0.0]),
        ])
        .unwrap();
        let p = RegressionProblem::new(
            ds,
            Some(x),
            TauPrior::half_normal(0.5).unwrap(),
            BetaPrior::ImproperUniform,
        )
        .unwrap();
        fit(p, &FitOptions::default()).unwrap()
    }

    fn count_matches(hay: &str, needle: &str) -> usize {
        hay.matches(needle).count()
    }

    #[test]
    fn forest_row_structure() {
        let f = crins_fit();
        let spec = ForestSpec {
            xlabel: "log-OR".into(),
            extra: vec![
                SummaryRequest {
                    name: "basiliximab mean".into(),
                    x: vec![1.0, 0.0],
                    mean: true,
                },
                SummaryRequest {
                    name: "daclizumab mean".into(),
                    x: vec![0.0, 1.0],
                    mean: true,
                },
                SummaryRequest {
                    name: "group difference".into(),
                    x: vec![-1.0, 1.0],
                    mean: true,
                },
            ],
        };
        let svg = render_forest(
            f.problem(),
            f.grid(),
            f.summary().row("tau").unwrap(),
            &spec,
            0.95,
        )
        .unwrap();
        // 6 study rows + 2 coefficient rows + 3 combination rows + tau footer
        assert_eq!(count_matches(&svg, "class=\"row study\""), 6);
        assert_eq!(count_matches(&svg, "class=\"row summary\""), 5);
        assert_eq!(count_matches(&svg, "class=\"tau-footer\""), 1);
        assert_eq!(count_matches(&svg, "class=\"shrink-ci\""), 6);
        // regressor table shows k x d cells
        assert_eq!(count_matches(&svg, "class=\"xcell\""), 12);
    }

    #[test]
    fn forest_zero_extra_rows() {
        let f = crins_fit();
        let svg = render_forest(
            f.problem(),
            f.grid(),
            f.summary().row("tau").unwrap(),
            &ForestSpec {
                xlabel: "log-OR".into(),
                extra: vec![],
            },
            0.95,
        )
        .unwrap();
        assert_eq!(count_matches(&svg, "class=\"row summary\""), 2);
    }

    #[test]
    fn forest_medians_match_summary_within_half_pixel() {
        let f = crins_fit();
        let svg = render_forest(
            f.problem(),
            f.grid(),
            f.summary().row("tau").unwrap(),
            &ForestSpec {
                xlabel: "log-OR".into(),
                extra: vec![],
            },
            0.95,
        )
        .unwrap();
        // recover the value-to-pixel map from the plot-area attributes
        let attr = |name: &str| -> f64 {
            let tag = format!("data-{name}=\"");
            let start = svg.find(&tag).unwrap() + tag.len();
            let end = svg[start..].find('"').unwrap() + start;
            svg[start..end].parse().unwrap()
        };
        let (x0, x1, v0, v1) = (attr("x0"), attr("x1"), attr("v0"), attr("v1"));
        for name in ["basiliximab", "daclizumab"] {
            let tag = format!("class=\"summary-median\" data-row=\"{name}\" cx=\"");
            let start = svg.find(&tag).unwrap() + tag.len();
            let end = svg[start..].find('"').unwrap() + start;
            let cx: f64 = svg[start..end].parse().unwrap();
            let value = v0 + (cx - x0) * (v1 - v0) / (x1 - x0);
            let expect = f.summary().row(name).unwrap().median;
            let px_per_unit = (x1 - x0) / (v1 - v0);
            assert!(
                (value - expect).abs() * px_per_unit <= 0.5,
                "{name}: {value} vs {expect}"
            );
        }
    }

    #[test]
    fn forest_is_deterministic() {
        let f = crins_fit();
        let spec = ForestSpec {
            xlabel: "log-OR".into(),
            extra: vec![],
        };
        let a = render_forest(
            f.problem(),
            f.grid(),
            f.summary().row("tau").unwrap(),
            &spec,
            0.95,
        )
        .unwrap();
        let b = render_forest(
            f.problem(),
            f.grid(),
            f.summary().row("tau").unwrap(),
            &spec,
            0.95,
        )
        .unwrap();
        assert_eq!(a, b);
    }

    fn trend_fit() -> crate::inference::FitResult {
        // printed head rows of the progression data, year centered at 2000
        let ds = StudyDataset::new(
            vec![
                "Kastrukoff (1990)".into(),
                "Wolinsky (1990)".into(),
                "Bornstein (1991)".into(),
                "Likosky (1991)".into(),
                "Noseworthy (1991)".into(),
                "Milanese (1992)".into(),
            ],
            vec![-0.1603, 0.9694, -0.8712, 1.3863, -1.2657, 0.2007],
            vec![
                0.0805f64.sqrt(),
                0.0183f64.sqrt(),
                0.0874f64.sqrt(),
                0.3125f64.sqrt(),
                0.1041f64.sqrt(),
                0.1924f64.sqrt(),
            ],
        )
        .unwrap();
        let x = DesignMatrix::from_columns(vec![
            ("intercept2000".into(), vec![1.0; 6]),
            ("year".into(), vec![-10.0, -10.0, -9.0, -9.0, -9.0, -8.0]),
        ])
        .unwrap();
        let p = RegressionProblem::new(
            ds,
            Some(x),
            TauPrior::half_normal(0.5).unwrap(),
            BetaPrior::ImproperUniform,
        )
        .unwrap();
        fit(p, &FitOptions::default()).unwrap()
    }

    #[test]
    fn trend_bands_nest_and_render() {
        let f = trend_fit();
        let spec = TrendSpec {
            covariable: 1,
            template: vec![TrendEntry::Fixed(1.0), TrendEntry::Varying],
            x_values: (-11..=-7).map(|v| v as f64).collect(),
            bubble: false,
            group_by: None,
            xlabel: "year - 2000".into(),
            ylabel: "log-odds".into(),
        };
        let svg = render_trend(f.problem(), f.grid(), &spec, 0.95).unwrap();
        for class in [
            "mean-median",
            "mean-lo",
            "mean-hi",
            "pred-median",
            "pred-lo",
            "pred-hi",
        ] {
            assert!(
                svg.contains(&format!("class=\"{class}\"")),
                "missing {class}"
            );
        }
        assert_eq!(count_matches(&svg, "class=\"study-point\""), 6);

        // prediction band contains the mean band at every grid value
        for &t in &spec.x_values {
            let x = [1.0, t];
            let mean = combination_mixture(f.grid(), &x, true).unwrap();
            let pred = combination_mixture(f.grid(), &x, false).unwrap();
            let (mlo, mhi) = mean
                .credible_interval(0.95, IntervalMethod::Shortest)
                .unwrap();
            let (plo, phi) = pred
                .credible_interval(0.95, IntervalMethod::Shortest)
                .unwrap();
            assert!(
                plo <= mlo + 1e-9 && phi >= mhi - 1e-9,
                "bands crossed at {t}"
            );
        }
    }

    #[test]
    fn trend_bubble_and_groups() {
        let f = trend_fit();
        let spec = TrendSpec {
            covariable: 1,
            template: vec![TrendEntry::Fixed(1.0), TrendEntry::Varying],
            x_values: vec![-10.0, -8.0],
            bubble: true,
            group_by: Some(0),
            xlabel: "year".into(),
            ylabel: "log-odds".into(),
        };
        let svg = render_trend(f.problem(), f.grid(), &spec, 0.95).unwrap();
        assert_eq!(count_matches(&svg, "class=\"study-bubble\""), 6);
        assert_eq!(count_matches(&svg, "class=\"study-whisker\""), 0);
    }

    #[test]
    fn trend_single_grid_point_degenerates() {
        let f = trend_fit();
        let spec = TrendSpec {
            covariable: 1,
            template: vec![TrendEntry::Fixed(1.0), TrendEntry::Varying],
            x_values: vec![-9.0],
            bubble: false,
            group_by: None,
            xlabel: "year".into(),
            ylabel: "log-odds".into(),
        };
        let svg = render_trend(f.problem(), f.grid(), &spec, 0.95).unwrap();
        assert!(svg.contains("mean-band-degenerate"));
        assert!(svg.contains("pred-band-degenerate"));
    }

    #[test]
    fn trend_requires_covariable() {
        let ds = StudyDataset::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![0.1, 0.2, 0.3],
            vec![0.5, 0.5, 0.5],
        )
        .unwrap();
        let p = RegressionProblem::new(
            ds,
            None,
            TauPrior::half_normal(0.5).unwrap(),
            BetaPrior::ImproperUniform,
        )
        .unwrap();
        let f = fit(p, &FitOptions::default()).unwrap();
        let spec = TrendSpec {
            covariable: 0,
            template: vec![TrendEntry::Varying],
            x_values: vec![0.0, 1.0],
            bubble: false,
            group_by: None,
            xlabel: "x".into(),
            ylabel: "y".into(),
        };
        assert!(render_trend(f.problem(), f.grid(), &spec, 0.95).is_err());
    }
}
