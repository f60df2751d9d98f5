//! Alternative regressor codings describe the same model with different
//! parameter meanings. With informative priors, translating the prior
//! through the reparametrization keeps the analyses exactly equivalent.
//!
//! Run with: cargo run -p metareg --example alternative_codings

use nalgebra::DMatrix;

use metareg::inference::{fit, FitOptions, SummaryRequest};
use metareg::io::csv::{read_study_csv, Measure};
use metareg::model_spec::{
    build_indicator_design, transform_normal_prior, BetaPrior, DesignMatrix, IndicatorCoding,
    RegressionProblem, TauPrior,
};

fn main() -> metareg::Result<()> {
    let path = format!("{}/fixtures/crins.csv", env!("CARGO_MANIFEST_DIR"));
    let table = read_study_csv(path, Measure::Precomputed)?;
    let groups = table.column("IL2RA")?;

    // three codings of the same two-group structure
    let refs: Vec<&str> = groups.iter().map(String::as_str).collect();
    let group_means = build_indicator_design(&refs, IndicatorCoding::GroupMeans)?;
    let intercept_offset = build_indicator_design(&refs, IndicatorCoding::InterceptOffset)?;
    let half = |g: &str| if g == "daclizumab" { 0.5 } else { -0.5 };
    let mean_difference = DesignMatrix::from_columns(vec![
        ("mean".into(), vec![1.0; 6]),
        (
            "difference".into(),
            groups.iter().map(|g| half(g)).collect(),
        ),
    ])?;
    println!("group-means coding:      {:?}", group_means.column_names);
    println!(
        "intercept/offset coding: {:?}",
        intercept_offset.column_names
    );
    println!(
        "mean/difference coding:  {:?}",
        mean_difference.column_names
    );

    // a prior on (overall mean, group difference): vague mean, tight difference
    let md_prior = BetaPrior::normal_diag(vec![0.0, 0.0], vec![10.0, 1.0])?;

    // the equivalent prior in the two-group-means parametrization follows
    // from beta* = A beta with A = [[1, -0.5], [1, 0.5]]
    let a = DMatrix::from_row_slice(2, 2, &[1.0, -0.5, 1.0, 0.5]);
    let tg_prior = transform_normal_prior(&a, &md_prior)?;
    if let BetaPrior::Normal { covariance, .. } = &tg_prior {
        println!();
        println!("transformed prior covariance (strong positive correlation):");
        println!("  [{:.2}, {:.2}]", covariance[(0, 0)], covariance[(0, 1)]);
        println!("  [{:.2}, {:.2}]", covariance[(1, 0)], covariance[(1, 1)]);
    }

    let tau = TauPrior::half_normal(0.5)?;
    let fit_md = fit(
        RegressionProblem::new(
            table.dataset.clone(),
            Some(mean_difference),
            tau.clone(),
            md_prior,
        )?,
        &FitOptions::default(),
    )?;
    // group-means design with basiliximab first to match the transform above
    let tg = DesignMatrix::from_columns(vec![
        (
            "basiliximab".into(),
            groups
                .iter()
                .map(|g| if g == "basiliximab" { 1.0 } else { 0.0 })
                .collect(),
        ),
        (
            "daclizumab".into(),
            groups
                .iter()
                .map(|g| if g == "daclizumab" { 1.0 } else { 0.0 })
                .collect(),
        ),
    ])?;
    let fit_tg = fit(
        RegressionProblem::new(table.dataset.clone(), Some(tg), tau, tg_prior)?,
        &FitOptions::default(),
    )?;

    // the same quantities, expressed in each parametrization
    let rows_md = fit_md.summarize(&[
        SummaryRequest {
            name: "basiliximab".into(),
            x: vec![1.0, -0.5],
            mean: true,
        },
        SummaryRequest {
            name: "daclizumab".into(),
            x: vec![1.0, 0.5],
            mean: true,
        },
        SummaryRequest {
            name: "average".into(),
            x: vec![1.0, 0.0],
            mean: true,
        },
        SummaryRequest {
            name: "difference".into(),
            x: vec![0.0, 1.0],
            mean: true,
        },
    ])?;
    let rows_tg = fit_tg.summarize(&[
        SummaryRequest {
            name: "basiliximab".into(),
            x: vec![1.0, 0.0],
            mean: true,
        },
        SummaryRequest {
            name: "daclizumab".into(),
            x: vec![0.0, 1.0],
            mean: true,
        },
        SummaryRequest {
            name: "average".into(),
            x: vec![0.5, 0.5],
            mean: true,
        },
        SummaryRequest {
            name: "difference".into(),
            x: vec![-1.0, 1.0],
            mean: true,
        },
    ])?;

    println!();
    println!(
        "{:<14} {:>24} {:>24}",
        "", "mean/difference fit", "two-group fit"
    );
    for (a, b) in rows_md.rows.iter().zip(&rows_tg.rows) {
        println!(
            "{:<14} {:>14.4} median {:>17.4} median   (|diff| = {:.2e})",
            a.name,
            a.median,
            b.median,
            (a.median - b.median).abs()
        );
    }
    Ok(())
}
