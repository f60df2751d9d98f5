//! Exhaustive model selection over binary covariables: every subset is
//! scored by its marginal likelihood under proper priors, giving posterior
//! model probabilities, inclusion probabilities, the median probability
//! model, and model-averaged predictions.
//!
//! Run with: cargo run -p metareg --example model_selection

use metareg::inference::FitOptions;
use metareg::mixture::IntervalMethod;
use metareg::model_selection::{
    enumerate_models, inclusion_probabilities, median_probability_model,
    model_averaged_combination, model_prior, posterior_model_probs, ranked_models, score_models,
    ModelPrior, SelectionPriors,
};
use metareg::model_spec::{DesignMatrix, StudyDataset};

fn main() -> metareg::Result<()> {
    // synthetic trials: a treatment effect that depends on dose group (hi)
    // but not on the co-administered supplement (sup)
    let hi__ = [0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 1.0, 0.0];
    let sup_ = [0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0];
    let y___ = [
        0.21, 0.05, -0.12, 0.18, 1.42, 1.10, 1.35, 1.58, 1.22, 0.02, 1.49, 0.15,
    ];
    let dataset = StudyDataset::new(
        (0..12).map(|i| format!("trial {:02}", i + 1)).collect(),
        y___.to_vec(),
        vec![0.35; 12],
    )?;
    let covariates = DesignMatrix::from_columns(vec![
        ("hi".into(), hi__.to_vec()),
        ("sup".into(), sup_.to_vec()),
    ])?;

    let mut space = enumerate_models(&["hi", "sup"])?;
    model_prior(&mut space, ModelPrior::Uniform)?;
    println!(
        "{} candidate models over {:?}",
        space.n_models(),
        space.variables
    );

    // proper priors are mandatory for marginal likelihoods
    let priors = SelectionPriors::default();
    let fits = score_models(
        &mut space,
        &dataset,
        &covariates,
        &priors,
        &FitOptions::default(),
    )?;
    posterior_model_probs(&mut space)?;

    let probs = space.posterior_probs.clone().unwrap();
    let log_mls = space.log_mls.clone().unwrap();
    println!();
    println!("models ranked by posterior probability:");
    for &m in &ranked_models(&space)? {
        println!(
            "  {:<12} prob {:.4}   log-ml {:>9.4}",
            space.describe(m),
            probs[m],
            log_mls[m]
        );
    }

    let incl = inclusion_probabilities(&space)?;
    println!();
    println!("inclusion probabilities:");
    for (v, p) in space.variables.iter().zip(&incl) {
        println!("  {v:<4} {p:.4}");
    }
    println!(
        "median probability model: {{{}}}",
        median_probability_model(&space)?.join(", ")
    );

    // model-averaged prediction for a new high-dose trial without the
    // supplement: each model needs the covariable vector in its own layout
    let x_by_model: Vec<Vec<f64>> = (0..space.n_models())
        .map(|m| {
            let mut x = vec![1.0]; // intercept
            if space.models[m][0] {
                x.push(1.0); // hi = 1
            }
            if space.models[m][1] {
                x.push(0.0); // sup = 0
            }
            x
        })
        .collect();
    let pooled = model_averaged_combination(&space, &fits, &x_by_model, false)?;
    let (lo, hi) = pooled.credible_interval(0.95, IntervalMethod::Shortest)?;
    println!();
    println!(
        "model-averaged prediction, new high-dose trial: {:.3} [{:.3}, {:.3}]",
        pooled.quantile(0.5)?,
        lo,
        hi
    );
    Ok(())
}
