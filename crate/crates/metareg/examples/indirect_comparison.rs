//! Indirect comparisons in a triangular treatment network via contrast
//! coding: two coefficients capture the two non-redundant pairwise
//! effects; the third comparison is their linear combination.
//!
//! The data here are synthetic two-arm log-OR contrasts: eight head-to-head
//! A-vs-B trials, plus trials comparing each of A and B against a common
//! comparator C, which contribute indirect evidence on A vs B.
//!
//! Run with: cargo run -p metareg --example indirect_comparison

use metareg::inference::{fit, FitOptions};
use metareg::mixture::IntervalMethod;
use metareg::model_spec::{BetaPrior, DesignMatrix, RegressionProblem, StudyDataset, TauPrior};

fn main() -> metareg::Result<()> {
    // (comparison, estimate, standard error)
    let studies: Vec<(&str, f64, f64)> = vec![
        ("A.B", -0.91, 0.45),
        ("A.B", -0.34, 0.52),
        ("A.B", -0.62, 0.38),
        ("A.B", -1.10, 0.61),
        ("A.B", -0.44, 0.40),
        ("A.B", -0.85, 0.55),
        ("A.B", -0.51, 0.47),
        ("A.B", -0.73, 0.43),
        ("B.C", 0.12, 0.35),
        ("B.C", 0.31, 0.42),
        ("B.C", -0.05, 0.39),
        ("B.C", 0.22, 0.48),
        ("B.C", 0.08, 0.36),
        ("A.C", -0.55, 0.41),
        ("A.C", -0.78, 0.50),
        ("A.C", -0.39, 0.37),
        ("A.C", -0.66, 0.44),
        ("A.C", -0.49, 0.46),
        ("A.C", -0.91, 0.58),
        ("A.C", -0.35, 0.40),
        ("A.C", -0.60, 0.42),
        ("A.C", -0.72, 0.53),
    ];

    let dataset = StudyDataset::new(
        (0..studies.len())
            .map(|i| format!("trial {:02}", i + 1))
            .collect(),
        studies.iter().map(|s| s.1).collect(),
        studies.iter().map(|s| s.2).collect(),
    )?;

    // contrast coding: beta_1 = A vs B, beta_2 = C vs B; then A vs C is
    // beta_1 - beta_2
    let design = DesignMatrix::from_columns(vec![
        (
            "A.B".into(),
            studies
                .iter()
                .map(|s| if s.0 == "B.C" { 0.0 } else { 1.0 })
                .collect(),
        ),
        (
            "C.B".into(),
            studies
                .iter()
                .map(|s| match s.0 {
                    "B.C" => 1.0,
                    "A.C" => -1.0,
                    _ => 0.0,
                })
                .collect(),
        ),
    ])?;

    // with 22 trials, improper uniform priors are a reasonable default
    let fitted = fit(
        RegressionProblem::new(
            dataset,
            Some(design),
            TauPrior::ImproperUniform,
            BetaPrior::ImproperUniform,
        )?,
        &FitOptions::default(),
    )?;

    let report = |name: &str, x: &[f64]| -> metareg::Result<()> {
        let mix = fitted.linear_combination(x, true)?;
        let (lo, hi) = mix.credible_interval(0.95, IntervalMethod::Shortest)?;
        println!(
            "  {name:<8} {:>8.3} [{:>7.3}, {:>7.3}]",
            mix.quantile(0.5)?,
            lo,
            hi
        );
        Ok(())
    };
    println!("pairwise comparisons (median log-OR, 95% shortest CI):");
    report("A vs B", &[1.0, 0.0])?;
    report("C vs B", &[0.0, 1.0])?;
    report("A vs C", &[1.0, -1.0])?;

    // contrast the full network against direct evidence only
    let direct_idx: Vec<usize> = studies
        .iter()
        .enumerate()
        .filter_map(|(i, s)| (s.0 == "A.B").then_some(i))
        .collect();
    let direct = fit(
        RegressionProblem::new(
            fitted.problem().dataset.subset(&direct_idx)?,
            None,
            TauPrior::ImproperUniform,
            BetaPrior::ImproperUniform,
        )?,
        &FitOptions::default(),
    )?;
    let d = direct.summary().row("intercept").unwrap();
    let full = fitted.coefficient_marginal(0)?;
    let (flo, fhi) = full.credible_interval(0.95, IntervalMethod::Shortest)?;
    println!();
    println!(
        "A vs B, direct trials only: {:.3} [{:.3}, {:.3}]",
        d.median, d.ci_lower, d.ci_upper
    );
    println!(
        "A vs B, whole network:      {:.3} [{:.3}, {:.3}]",
        full.quantile(0.5)?,
        flo,
        fhi
    );
    println!("the indirect evidence narrows the interval");
    Ok(())
}
