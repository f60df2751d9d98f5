//! Forest plot rendering: per-study estimates with shrinkage intervals,
//! the regressor matrix as table columns, coefficient and combination
//! rows, and a heterogeneity footer, written as deterministic SVG.
//!
//! Run with: cargo run -p metareg --example forest_plot

use metareg::inference::{fit, FitOptions, SummaryRequest};
use metareg::io::csv::{read_study_csv, Measure};
use metareg::io::svg::{render_forest, ForestSpec};
use metareg::model_spec::{
    build_indicator_design, BetaPrior, IndicatorCoding, RegressionProblem, TauPrior,
};

fn main() -> metareg::Result<()> {
    let path = format!("{}/fixtures/crins.csv", env!("CARGO_MANIFEST_DIR"));
    let table = read_study_csv(path, Measure::Precomputed)?;
    let groups = table.column("IL2RA")?;
    let refs: Vec<&str> = groups.iter().map(String::as_str).collect();
    let design = build_indicator_design(&refs, IndicatorCoding::GroupMeans)?;

    let fitted = fit(
        RegressionProblem::new(
            table.dataset.clone(),
            Some(design),
            TauPrior::half_normal(0.5)?,
            BetaPrior::ImproperUniform,
        )?,
        &FitOptions::default(),
    )?;

    let spec = ForestSpec {
        xlabel: "log-OR".into(),
        extra: vec![
            SummaryRequest {
                name: "daclizumab mean".into(),
                x: vec![1.0, 0.0],
                mean: true,
            },
            SummaryRequest {
                name: "basiliximab mean".into(),
                x: vec![0.0, 1.0],
                mean: true,
            },
            SummaryRequest {
                name: "group difference".into(),
                x: vec![1.0, -1.0],
                mean: true,
            },
            SummaryRequest {
                name: "new basiliximab study".into(),
                x: vec![0.0, 1.0],
                mean: false,
            },
        ],
    };
    let svg = render_forest(
        fitted.problem(),
        fitted.grid(),
        fitted.summary().row("tau").unwrap(),
        &spec,
        0.95,
    )?;

    let out = std::env::temp_dir().join("metareg_forest_example.svg");
    std::fs::write(&out, &svg)?;
    println!("forest plot written to {}", out.display());
    println!(
        "rows: {} studies, {} summary rows, 1 heterogeneity footer",
        svg.matches("class=\"row study\"").count(),
        svg.matches("class=\"row summary\"").count()
            + svg.matches("class=\"row prediction\"").count(),
    );
    println!("rendering is deterministic: identical inputs give identical bytes");
    Ok(())
}
