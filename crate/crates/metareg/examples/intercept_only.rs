//! Without covariables the regression collapses to a plain random-effects
//! meta-analysis: a single all-ones "intercept" column is used.
//!
//! Run with: cargo run -p metareg --example intercept_only

use metareg::inference::{fit, FitOptions};
use metareg::io::csv::{read_study_csv, Measure};
use metareg::model_spec::{BetaPrior, RegressionProblem, TauPrior};

fn main() -> metareg::Result<()> {
    let path = format!("{}/fixtures/crins.csv", env!("CARGO_MANIFEST_DIR"));
    let table = read_study_csv(path, Measure::Precomputed)?;

    // passing None for the design uses the default intercept-only column
    let problem = RegressionProblem::new(
        table.dataset.clone(),
        None,
        TauPrior::half_normal(0.5)?,
        BetaPrior::ImproperUniform,
    )?;
    println!("default design columns: {:?}", problem.design.column_names);

    let fitted = fit(problem, &FitOptions::default())?;
    let row = fitted.summary().row("intercept").unwrap();
    println!();
    println!("pooled effect (overall mean):");
    println!("  mode      {:>8.4}", row.mode);
    println!("  median    {:>8.4}", row.median);
    println!("  mean      {:>8.4}", row.mean);
    println!("  sd        {:>8.4}", row.sd);
    println!("  95% lower {:>8.4}", row.ci_lower);
    println!("  95% upper {:>8.4}", row.ci_upper);

    let tau = fitted.summary().row("tau").unwrap();
    println!();
    println!(
        "heterogeneity: median {:.4}, 95% [{:.4}, {:.4}]",
        tau.median, tau.ci_lower, tau.ci_upper
    );
    println!("support points used: {}", fitted.grid().len());
    Ok(())
}
