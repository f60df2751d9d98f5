//! Linear combinations of coefficients and predictions for new studies:
//! the difference between two group means, and the plausible range for a
//! future study's underlying effect (which adds heterogeneity variance).
//!
//! Run with: cargo run -p metareg --example linear_combinations

use metareg::inference::{fit, FitOptions, SummaryRequest};
use metareg::io::csv::{read_study_csv, Measure};
use metareg::mixture::IntervalMethod;
use metareg::model_spec::{
    build_indicator_design, BetaPrior, IndicatorCoding, RegressionProblem, TauPrior,
};

fn main() -> metareg::Result<()> {
    let path = format!("{}/fixtures/crins.csv", env!("CARGO_MANIFEST_DIR"));
    let table = read_study_csv(path, Measure::Precomputed)?;
    let groups = table.column("IL2RA")?;
    let refs: Vec<&str> = groups.iter().map(String::as_str).collect();
    let design = build_indicator_design(&refs, IndicatorCoding::GroupMeans)?;
    // columns in order of appearance: daclizumab, basiliximab
    println!("design columns: {:?}", design.column_names);

    let fitted = fit(
        RegressionProblem::new(
            table.dataset.clone(),
            Some(design),
            TauPrior::half_normal(0.5)?,
            BetaPrior::ImproperUniform,
        )?,
        &FitOptions::default(),
    )?;

    // group difference daclizumab - basiliximab as a linear combination
    let diff = fitted.linear_combination(&[1.0, -1.0], true)?;
    let (lo, hi) = diff.credible_interval(0.95, IntervalMethod::Shortest)?;
    println!(
        "group difference: median {:.4}, 95% shortest CI [{:.4}, {:.4}]",
        diff.quantile(0.5)?,
        lo,
        hi
    );
    if lo < 0.0 && hi > 0.0 {
        println!("  (the interval includes zero: similar efficacy is plausible)");
    }

    // prediction for a new basiliximab study: mean = false adds tau^2
    let pred = fitted.linear_combination(&[0.0, 1.0], false)?;
    println!(
        "new basiliximab study, 2.5/50/97.5% quantiles: {:.4} {:.4} {:.4}",
        pred.quantile(0.025)?,
        pred.quantile(0.5)?,
        pred.quantile(0.975)?
    );

    // several rows at once through the summary extension
    let extra = fitted.summarize(&[
        SummaryRequest {
            name: "daclizumab".into(),
            x: vec![1.0, 0.0],
            mean: true,
        },
        SummaryRequest {
            name: "basiliximab".into(),
            x: vec![0.0, 1.0],
            mean: true,
        },
        SummaryRequest {
            name: "difference".into(),
            x: vec![1.0, -1.0],
            mean: true,
        },
        SummaryRequest {
            name: "new basiliximab study".into(),
            x: vec![0.0, 1.0],
            mean: false,
        },
    ])?;
    println!();
    println!("summary rows for combinations and a prediction:");
    for row in &extra.rows {
        println!(
            "  {:<22} median {:>8.4}  [{:>8.4}, {:>8.4}]",
            row.name, row.median, row.ci_lower, row.ci_upper
        );
    }
    Ok(())
}
