//! Effect-size derivation: 2x2 tables to log odds ratios (with the 0.5
//! continuity correction for zero cells), percentages to log-odds, and
//! group means to log ratios of means.
//!
//! Run with: cargo run -p metareg --example effect_sizes

use metareg::effect_sizes::{log_odds_ratio, log_ratio_of_means, logit_proportion, TwoByTwoTable};
use metareg::io::csv::{read_study_csv, Measure};

fn main() -> metareg::Result<()> {
    // a 2x2 table: 14/61 events under treatment, 15/20 under control
    let table = TwoByTwoTable::new(14.0, 61.0, 15.0, 20.0)?;
    let e = log_odds_ratio(&table, "head-to-head trial")?;
    println!("log-OR {:.4}, standard error {:.4}", e.y, e.sigma());

    // zero cells trigger the continuity correction on all four cells
    let sparse = TwoByTwoTable::new(0.0, 50.0, 3.0, 34.0)?;
    let e = log_odds_ratio(&sparse, "sparse trial")?;
    println!(
        "zero-cell table: log-OR {:.4}, standard error {:.4}",
        e.y,
        e.sigma()
    );

    // log-odds from a percentage (fractional event counts are fine)
    let e = logit_proportion(50.0 * 0.46, 50.0, "placebo group")?;
    println!("logit(46% of 50): {:.4}, variance {:.4}", e.y, e.variance);

    // ratio of means on the log scale
    let e = log_ratio_of_means(2.4, 0.8, 40.0, 2.0, 0.7, 38.0, "biomass")?;
    println!("log ratio of means: {:.4}, variance {:.4}", e.y, e.variance);

    // the same derivations drive CSV ingestion
    let path = format!("{}/fixtures/crins_counts.csv", env!("CARGO_MANIFEST_DIR"));
    let parsed = read_study_csv(path, Measure::Or)?;
    println!();
    println!("per-study log-ORs from raw counts:");
    for i in 0..parsed.dataset.len() {
        println!(
            "  {:<16} {:>6.2} (se {:.2})",
            parsed.dataset.labels[i], parsed.dataset.y[i], parsed.dataset.sigma[i]
        );
    }
    Ok(())
}
