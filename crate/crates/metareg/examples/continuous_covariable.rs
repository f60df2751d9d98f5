//! A continuous covariable: disease-progression odds in trial placebo
//! groups regressed on publication year (centered at 2000), with a trend
//! plot showing the mean and prediction bands.
//!
//! Run with: cargo run -p metareg --example continuous_covariable

use metareg::inference::{fit, FitOptions, SummaryRequest};
use metareg::io::csv::{read_study_csv, Measure};
use metareg::io::svg::{render_trend_svg, TrendEntry, TrendSpec};
use metareg::model_spec::{
    center_covariable, BetaPrior, DesignMatrix, RegressionProblem, TauPrior,
};

fn main() -> metareg::Result<()> {
    let path = format!("{}/fixtures/nicholas_head.csv", env!("CARGO_MANIFEST_DIR"));
    // raw columns carry patient counts and progression percentages; the
    // plo measure turns them into log-odds with sampling variances
    let table = read_study_csv(path, Measure::Plo)?;
    println!("derived log-odds (yi) and variances (vi):");
    for i in 0..table.dataset.len() {
        println!(
            "  {:<20} yi {:>8.4}  vi {:>7.4}",
            table.dataset.labels[i],
            table.dataset.y[i],
            table.dataset.sigma[i].powi(2)
        );
    }

    let years = table.numeric_column("year")?;
    let design = DesignMatrix::from_columns(vec![
        ("intercept2000".into(), vec![1.0; years.len()]),
        ("year".into(), center_covariable(&years, 2000.0)),
    ])?;

    let fitted = fit(
        RegressionProblem::new(
            table.dataset.clone(),
            Some(design),
            TauPrior::half_normal(0.5)?,
            BetaPrior::ImproperUniform,
        )?,
        &FitOptions::default(),
    )?;

    let rows = fitted.summarize(&[
        SummaryRequest {
            name: "intercept (2000)".into(),
            x: vec![1.0, 0.0],
            mean: true,
        },
        SummaryRequest {
            name: "annual change".into(),
            x: vec![0.0, 1.0],
            mean: true,
        },
        SummaryRequest {
            name: "change per decade".into(),
            x: vec![0.0, 10.0],
            mean: true,
        },
        SummaryRequest {
            name: "mean 1990".into(),
            x: vec![1.0, -10.0],
            mean: true,
        },
        SummaryRequest {
            name: "prediction 1995".into(),
            x: vec![1.0, -5.0],
            mean: false,
        },
    ])?;
    println!();
    println!("trend summaries (median, 95% shortest CI):");
    for row in &rows.rows {
        println!(
            "  {:<18} {:>8.4} [{:>8.4}, {:>8.4}]",
            row.name, row.median, row.ci_lower, row.ci_upper
        );
    }

    let spec = TrendSpec {
        covariable: 1,
        template: vec![TrendEntry::Fixed(1.0), TrendEntry::Varying],
        x_values: (-11..=-7).map(|v| v as f64).collect(),
        bubble: false,
        group_by: None,
        xlabel: "publication year - 2000".into(),
        ylabel: "log-odds".into(),
    };
    let out = std::env::temp_dir().join("metareg_trend_example.svg");
    render_trend_svg(fitted.problem(), fitted.grid(), &spec, 0.95, &out)?;
    println!();
    println!("trend plot written to {}", out.display());
    Ok(())
}
