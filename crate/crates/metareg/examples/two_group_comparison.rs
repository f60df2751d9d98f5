//! Two-group meta-regression: six transplantation studies compared two
//! immunosuppressants, coded as one indicator column per treatment group,
//! with a weakly informative half-normal prior on the heterogeneity.
//!
//! Run with: cargo run -p metareg --example two_group_comparison

use metareg::inference::{fit, FitOptions};
use metareg::io::csv::{read_study_csv, Measure};
use metareg::model_spec::{
    build_indicator_design, BetaPrior, IndicatorCoding, RegressionProblem, TauPrior,
};

fn main() -> metareg::Result<()> {
    let path = format!("{}/fixtures/crins.csv", env!("CARGO_MANIFEST_DIR"));
    let table = read_study_csv(path, Measure::Precomputed)?;

    // one 0/1 indicator column per treatment group, in order of appearance
    let groups = table.column("IL2RA")?;
    let refs: Vec<&str> = groups.iter().map(String::as_str).collect();
    let design = build_indicator_design(&refs, IndicatorCoding::GroupMeans)?;

    let problem = RegressionProblem::new(
        table.dataset.clone(),
        Some(design),
        TauPrior::half_normal(0.5)?,
        BetaPrior::ImproperUniform,
    )?;
    let fitted = fit(problem, &FitOptions::default())?;

    println!("marginal posterior summary (95% shortest intervals):");
    for row in &fitted.summary().rows {
        println!(
            "  {:<12} median {:>8.4}  mean {:>8.4}  sd {:>7.4}  [{:>8.4}, {:>8.4}]",
            row.name, row.median, row.mean, row.sd, row.ci_lower, row.ci_upper
        );
    }

    // posterior accessors: quantiles of tau and of a coefficient
    println!();
    println!(
        "tau 99% quantile:          {:.4}",
        fitted.tau_quantile(0.99)?
    );
    let dac = fitted.coefficient_marginal(0)?;
    println!("daclizumab 99% quantile:   {:.4}", dac.quantile(0.99)?);

    // shrinkage: each study's own mean is pulled toward its group mean
    println!();
    println!("shrinkage estimates (median and 95% shortest interval):");
    for i in 0..fitted.problem().k() {
        let s = fitted.shrinkage(i)?;
        let (lo, hi) = s.credible_interval(0.95, metareg::mixture::IntervalMethod::Shortest)?;
        println!(
            "  {:<16} y = {:>6.2}  ->  {:>7.4} [{:>7.4}, {:>7.4}]",
            fitted.problem().dataset.labels[i],
            fitted.problem().dataset.y[i],
            s.quantile(0.5)?,
            lo,
            hi
        );
    }

    // posterior sampling is reproducible for a fixed seed
    let draws = fitted.sample_posterior(5, 1)?;
    println!();
    println!("five posterior draws (tau, beta):");
    for (tau, beta) in &draws {
        println!("  tau = {tau:.4}, beta = ({:.4}, {:.4})", beta[0], beta[1]);
    }
    Ok(())
}
