//! Command-line interface: `escalc`, `fit`, `summary`, `predict`,
//! `forest`, `trend` and `select` subcommands over the library.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on data or validation
//! errors. Setting `METAREG_NO_COLOR` disables ANSI styling in summary
//! text.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::inference::{fit, FitOptions, FitResult, SummaryRequest, SummaryTable};
use crate::io::csv::{
    read_design_csv, read_study_csv, read_tabulated_csv, write_escalc_csv, write_tabulated_csv,
    Measure, StudyTable,
};
use crate::io::json::{load_fit_json, LoadedFit};
use crate::io::svg::{render_forest_svg, render_trend_svg, ForestSpec, TrendEntry, TrendSpec};
use crate::mixture::IntervalMethod;
use crate::model_selection::{
    enumerate_models, inclusion_probabilities, median_probability_model, model_prior,
    posterior_model_probs, ranked_models, score_models, ModelPrior, SelectionPriors,
};
use crate::model_spec::{
    build_indicator_design, center_covariable, BetaPrior, DesignMatrix, IndicatorCoding,
    RegressionProblem, TauPrior,
};

#[derive(Parser)]
#[command(
    name = "metareg",
    version,
    about = "Bayesian random-effects meta-regression with study-level covariables",
    subcommand_required = true,
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Derive effect sizes (yi/vi) from raw study summaries.
    Escalc(EscalcArgs),
    /// Fit the meta-regression model and write a fit JSON.
    Fit(FitArgs),
    /// Print summaries (optionally extra combinations) from a fit JSON.
    Summary(SummaryArgs),
    /// Quantiles or an interval for a coefficient combination/prediction.
    Predict(PredictArgs),
    /// Render a forest plot from a fit JSON.
    Forest(ForestArgs),
    /// Render a trend or bubble plot from a fit JSON.
    Trend(TrendArgs),
    /// Enumerate and score covariable subsets; write a model table JSON.
    Select(SelectArgs),
}

#[derive(Args)]
struct EscalcArgs {
    /// Study CSV file.
    input: PathBuf,
    /// Effect measure: or, plo, rom or precomputed.
    #[arg(long)]
    measure: String,
    /// Output CSV (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    /// Study CSV file.
    input: PathBuf,
    /// Effect measure: or, plo, rom or precomputed.
    #[arg(long, default_value = "precomputed")]
    measure: String,
    /// Design specification: `group_means:COL`, `intercept_offset:COL`,
    /// `file:PATH`, or a comma list of `1` (intercept), `COL`, `COL@CENTER`.
    #[arg(long)]
    design: Option<String>,
    /// Heterogeneity prior: `halfnormal:S`, `halfcauchy:S`,
    /// `exponential:RATE`, `uniform`, or `tabulated:PATH`.
    #[arg(long, default_value = "uniform")]
    tau_prior: String,
    /// Coefficient prior means (comma list; with --beta-prior-sd).
    #[arg(long, allow_hyphen_values = true)]
    beta_prior_mean: Option<String>,
    /// Coefficient prior standard deviations (comma list).
    #[arg(long)]
    beta_prior_sd: Option<String>,
    /// JSON config file; may carry a full coefficient prior covariance.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Divergence bound between adjacent support points.
    #[arg(long, default_value_t = crate::grid::DEFAULT_DELTA)]
    delta: f64,
    /// Omitted tail mass of the heterogeneity posterior.
    #[arg(long, default_value_t = crate::grid::DEFAULT_EPSILON)]
    epsilon: f64,
    /// Random seed recorded with the fit.
    #[arg(long)]
    seed: Option<u64>,
    /// Output fit JSON path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also export the heterogeneity posterior as a tau/density CSV.
    #[arg(long)]
    export_tau_posterior: Option<PathBuf>,
}

#[derive(Args)]
struct SummaryArgs {
    /// Fit JSON file.
    fit: PathBuf,
    /// Extra combination row `NAME=c1,c2,...` (repeatable).
    #[arg(long = "mean")]
    mean_rows: Vec<String>,
    /// Extra prediction row `NAME=c1,c2,...` (repeatable).
    #[arg(long = "predict")]
    predict_rows: Vec<String>,
}

#[derive(Args)]
struct PredictArgs {
    /// Fit JSON file.
    fit: PathBuf,
    /// Combination coefficients, e.g. `-1,1`.
    #[arg(long, allow_hyphen_values = true)]
    x: String,
    /// Interval coverage.
    #[arg(long, default_value_t = 0.95)]
    level: f64,
    /// Treat the combination as a new-study prediction (adds tau^2).
    #[arg(long)]
    prediction: bool,
    /// Print these quantiles instead of median and interval.
    #[arg(long)]
    quantiles: Option<String>,
}

#[derive(Args)]
struct ForestArgs {
    /// Fit JSON file.
    fit: PathBuf,
    /// Output SVG path.
    #[arg(long)]
    out: PathBuf,
    /// Axis label.
    #[arg(long, default_value = "effect")]
    xlabel: String,
    /// Extra combination row `NAME=c1,c2,...` (repeatable).
    #[arg(long = "mean")]
    mean_rows: Vec<String>,
    /// Extra prediction row `NAME=c1,c2,...` (repeatable).
    #[arg(long = "predict")]
    predict_rows: Vec<String>,
}

#[derive(Args)]
struct TrendArgs {
    /// Fit JSON file.
    fit: PathBuf,
    /// Output SVG path.
    #[arg(long)]
    out: PathBuf,
    /// Design column (name or index) for the x axis.
    #[arg(long)]
    covariable: String,
    /// Covariable template with one `*` slot, e.g. `1,*` or `1,0,*,0`.
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    at: String,
    /// Grid `FROM:TO:STEP` for the varying slot (data range when omitted).
    #[arg(long, allow_hyphen_values = true)]
    range: Option<String>,
    /// Bubble plot: point sizes inversely proportional to standard errors.
    #[arg(long)]
    bubble: bool,
    /// Design column (name or index) splitting studies into two colors.
    #[arg(long)]
    group_by: Option<String>,
    #[arg(long, default_value = "covariable")]
    xlabel: String,
    #[arg(long, default_value = "effect")]
    ylabel: String,
    /// Interval coverage for the bands.
    #[arg(long, default_value_t = 0.95)]
    level: f64,
}

#[derive(Args)]
struct SelectArgs {
    /// Study CSV file carrying the candidate variable columns.
    input: PathBuf,
    /// Effect measure: or, plo, rom or precomputed.
    #[arg(long, default_value = "precomputed")]
    measure: String,
    /// Comma list of candidate variable columns.
    #[arg(long)]
    variables: String,
    /// Heterogeneity prior (must be proper).
    #[arg(long, default_value = "halfnormal:0.5")]
    tau_prior: String,
    /// Prior sd of the intercept within each model.
    #[arg(long, default_value_t = 10.0)]
    intercept_sd: f64,
    /// Prior sd of each covariable effect within each model.
    #[arg(long, default_value_t = 2.82)]
    effect_sd: f64,
    /// Model prior: `uniform` or `bernoulli:PI`.
    #[arg(long, default_value = "uniform")]
    model_prior: String,
    #[arg(long, default_value_t = crate::grid::DEFAULT_DELTA)]
    delta: f64,
    #[arg(long, default_value_t = crate::grid::DEFAULT_EPSILON)]
    epsilon: f64,
    /// Output model-table JSON path.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Entry point used by the binary: parses `argv`, runs the subcommand and
/// maps failures to exit codes.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Escalc(args) => run_escalc(args),
        Command::Fit(args) => run_fit(args),
        Command::Summary(args) => run_summary(args),
        Command::Predict(args) => run_predict(args),
        Command::Forest(args) => run_forest(args),
        Command::Trend(args) => run_trend(args),
        Command::Select(args) => run_select(args),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn parse_measure(s: &str) -> Result<Measure> {
    s.parse()
}

fn parse_number_list(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::invalid(format!("cannot parse {p:?} in {what} as a number")))
        })
        .collect()
}

fn parse_tau_prior(spec: &str) -> Result<TauPrior> {
    let (family, arg) = match spec.split_once(':') {
        Some((f, a)) => (f, Some(a)),
        None => (spec, None),
    };
    let need = |name: &str| {
        arg.ok_or_else(|| {
            Error::invalid(format!("prior {name} needs a parameter, e.g. {name}:0.5"))
        })
    };
    match family {
        "uniform" => Ok(TauPrior::ImproperUniform),
        "halfnormal" => TauPrior::half_normal(parse_scalar(need("halfnormal")?)?),
        "halfcauchy" => TauPrior::half_cauchy(parse_scalar(need("halfcauchy")?)?),
        "exponential" => TauPrior::exponential(parse_scalar(need("exponential")?)?),
        "tabulated" => {
            let (taus, dens) = read_tabulated_csv(need("tabulated")?)?;
            TauPrior::tabulated(taus, dens)
        }
        other => Err(Error::invalid(format!(
            "unknown heterogeneity prior {other:?} (expected uniform, halfnormal, halfcauchy, exponential or tabulated)"
        ))),
    }
}

fn parse_scalar(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::invalid(format!("cannot parse {s:?} as a number")))
}

fn build_design(spec: Option<&str>, table: &StudyTable) -> Result<Option<DesignMatrix>> {
    let Some(spec) = spec else {
        return Ok(None);
    };
    if let Some(col) = spec.strip_prefix("group_means:") {
        let labels = table.column(col)?;
        let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
        return Ok(Some(build_indicator_design(
            &refs,
            IndicatorCoding::GroupMeans,
        )?));
    }
    if let Some(col) = spec.strip_prefix("intercept_offset:") {
        let labels = table.column(col)?;
        let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
        return Ok(Some(build_indicator_design(
            &refs,
            IndicatorCoding::InterceptOffset,
        )?));
    }
    if let Some(path) = spec.strip_prefix("file:") {
        return Ok(Some(read_design_csv(path)?));
    }
    // comma list of columns: `1`, `COL`, or `COL@CENTER`
    let k = table.dataset.len();
    let mut columns = Vec::new();
    for item in spec.split(',') {
        let item = item.trim();
        if item == "1" {
            columns.push(("intercept".to_string(), vec![1.0; k]));
        } else if let Some((col, center)) = item.split_once('@') {
            let values = table.numeric_column(col)?;
            columns.push((
                col.to_string(),
                center_covariable(&values, parse_scalar(center)?),
            ));
        } else {
            columns.push((item.to_string(), table.numeric_column(item)?));
        }
    }
    Ok(Some(DesignMatrix::from_columns(columns)?))
}

#[derive(serde::Deserialize)]
struct ConfigFile {
    beta_prior: Option<ConfigBetaPrior>,
}

#[derive(serde::Deserialize)]
struct ConfigBetaPrior {
    mean: Vec<f64>,
    covariance: Vec<Vec<f64>>,
}

fn build_beta_prior(args: &FitArgs) -> Result<BetaPrior> {
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)?;
        let config: ConfigFile = serde_json::from_str(&text)?;
        if let Some(bp) = config.beta_prior {
            let d = bp.mean.len();
            if bp.covariance.len() != d || bp.covariance.iter().any(|r| r.len() != d) {
                return Err(Error::invalid("config covariance must be a d x d matrix"));
            }
            let cov = nalgebra::DMatrix::from_fn(d, d, |i, j| bp.covariance[i][j]);
            return BetaPrior::normal(bp.mean, cov);
        }
    }
    match (&args.beta_prior_mean, &args.beta_prior_sd) {
        (None, None) => Ok(BetaPrior::ImproperUniform),
        (mean, Some(sd)) => {
            let sds = parse_number_list(sd, "--beta-prior-sd")?;
            let means = match mean {
                Some(m) => parse_number_list(m, "--beta-prior-mean")?,
                None => vec![0.0; sds.len()],
            };
            BetaPrior::normal_diag(means, sds)
        }
        (Some(_), None) => Err(Error::invalid(
            "--beta-prior-mean needs --beta-prior-sd (or use --config)",
        )),
    }
}

fn parse_row_specs(specs: &[String], mean: bool) -> Result<Vec<SummaryRequest>> {
    specs
        .iter()
        .map(|s| {
            let (name, coeffs) = s.split_once('=').ok_or_else(|| {
                Error::invalid(format!("row spec {s:?} must look like NAME=c1,c2"))
            })?;
            Ok(SummaryRequest {
                name: name.trim().to_string(),
                x: parse_number_list(coeffs, "row coefficients")?,
                mean,
            })
        })
        .collect()
}

fn style(text: &str) -> String {
    if std::env::var_os("METAREG_NO_COLOR").is_some() {
        text.to_string()
    } else {
        format!("\x1b[1m{text}\x1b[0m")
    }
}

fn print_table(header: &str, names: &[String], rows: &[(&str, Vec<f64>)]) {
    println!("{}", style(header));
    let name_w = 11usize;
    let col_w = names
        .iter()
        .map(|n| n.len().max(10) + 2)
        .collect::<Vec<_>>();
    let mut line = format!("{:name_w$}", "");
    for (n, w) in names.iter().zip(&col_w) {
        line.push_str(&format!("{n:>w$}"));
    }
    println!("{line}");
    for (label, values) in rows {
        let mut line = format!("{label:<name_w$}");
        for (v, w) in values.iter().zip(&col_w) {
            line.push_str(&format!("{:>w$.4}", v));
        }
        println!("{line}");
    }
}

fn describe_tau_prior(prior: &TauPrior) -> String {
    match prior {
        TauPrior::HalfNormal { scale } => format!("half-normal(scale={scale}) [proper]"),
        TauPrior::HalfCauchy { scale } => format!("half-Cauchy(scale={scale}) [proper]"),
        TauPrior::Exponential { rate } => format!("exponential(rate={rate}) [proper]"),
        TauPrior::ImproperUniform => "uniform [improper]".to_string(),
        TauPrior::Tabulated { taus, .. } => {
            format!("tabulated on {} points [proper]", taus.len())
        }
    }
}

fn describe_beta_prior(prior: &BetaPrior) -> String {
    match prior {
        BetaPrior::ImproperUniform => "improper uniform".to_string(),
        BetaPrior::Normal { mean, .. } => format!("multivariate normal (dimension {})", mean.len()),
    }
}

fn print_summary_table(summary: &SummaryTable) {
    let names: Vec<String> = summary.rows.iter().map(|r| r.name.clone()).collect();
    let stat = |f: fn(&crate::inference::SummaryRow) -> f64| -> Vec<f64> {
        summary.rows.iter().map(f).collect()
    };
    let pct = (summary.level * 100.0).round() as i64;
    let lower = format!("{pct}% lower");
    let upper = format!("{pct}% upper");
    let rows: Vec<(&str, Vec<f64>)> = vec![
        ("mode", stat(|r| r.mode)),
        ("median", stat(|r| r.median)),
        ("mean", stat(|r| r.mean)),
        ("sd", stat(|r| r.sd)),
        (lower.as_str(), stat(|r| r.ci_lower)),
        (upper.as_str(), stat(|r| r.ci_upper)),
    ];
    print_table("marginal posterior summary:", &names, &rows);
    println!("(quoted intervals are shortest credible intervals)");
}

fn run_escalc(args: EscalcArgs) -> Result<()> {
    let measure = parse_measure(&args.measure)?;
    let table = read_study_csv(&args.input, measure)?;
    match args.out {
        Some(path) => write_escalc_csv(&table.dataset, path)?,
        None => {
            println!("study,yi,vi");
            for i in 0..table.dataset.len() {
                let v = table.dataset.sigma[i] * table.dataset.sigma[i];
                println!(
                    "{},{},{}",
                    table.dataset.labels[i],
                    crate::io::csv::format_float(table.dataset.y[i]),
                    crate::io::csv::format_float(v)
                );
            }
        }
    }
    Ok(())
}

fn run_fit(args: FitArgs) -> Result<()> {
    let measure = parse_measure(&args.measure)?;
    let table = read_study_csv(&args.input, measure)?;
    let design = build_design(args.design.as_deref(), &table)?;
    let tau_prior = parse_tau_prior(&args.tau_prior)?;
    let beta_prior = build_beta_prior(&args)?;
    let problem = RegressionProblem::new(table.dataset.clone(), design, tau_prior, beta_prior)?;
    let options = FitOptions {
        delta: args.delta,
        epsilon: args.epsilon,
    };
    let fitted = fit(problem, &options)?;

    print_fit_report(&fitted)?;

    if let Some(path) = &args.out {
        crate::io::json::write_fit_json(&fitted, args.seed, path)?;
        println!("fit written to {}", path.display());
    }
    if let Some(path) = &args.export_tau_posterior {
        let (taus, dens) = fitted.tau_posterior().tabulate(2001)?;
        write_tabulated_csv(&taus, &dens, path)?;
        println!("tau posterior written to {}", path.display());
    }
    Ok(())
}

fn print_fit_report(fitted: &FitResult) -> Result<()> {
    let problem = fitted.problem();
    println!(
        "{} estimates: {}",
        problem.k(),
        problem.dataset.labels.join(", ")
    );
    println!(
        "{} regression parameters: {}",
        problem.d(),
        problem.design.column_names.join(", ")
    );
    println!("tau prior: {}", describe_tau_prior(&problem.tau_prior));
    println!("beta prior: {}", describe_beta_prior(&problem.beta_prior));
    println!();

    let map = fitted.map_estimates()?;
    let names: Vec<String> = fitted
        .summary()
        .rows
        .iter()
        .map(|r| r.name.clone())
        .collect();
    let mut joint = vec![map.joint_tau];
    joint.extend(map.joint_beta.iter().cloned());
    let mut marginal = vec![map.marginal_tau];
    marginal.extend(map.marginal_beta.iter().cloned());
    print_table(
        "MAP estimates:",
        &names,
        &[("joint", joint), ("marginal", marginal)],
    );
    println!();
    print_summary_table(fitted.summary());
    match fitted.log_marginal_likelihood() {
        Some(lml) => println!("log marginal likelihood: {lml:.6}"),
        None => println!("log marginal likelihood: n/a (improper prior)"),
    }
    Ok(())
}

fn run_summary(args: SummaryArgs) -> Result<()> {
    let loaded = load_fit_json(&args.fit)?;
    print_summary_table(&loaded.summary);
    let mut extra = parse_row_specs(&args.mean_rows, true)?;
    extra.extend(parse_row_specs(&args.predict_rows, false)?);
    if !extra.is_empty() {
        println!();
        let table = loaded.summarize(&extra)?;
        print_summary_table(&table);
    }
    match loaded.log_marginal_likelihood {
        Some(lml) => println!("log marginal likelihood: {lml:.6}"),
        None => println!("log marginal likelihood: n/a (improper prior)"),
    }
    Ok(())
}

fn run_predict(args: PredictArgs) -> Result<()> {
    let loaded = load_fit_json(&args.fit)?;
    let x = parse_number_list(&args.x, "--x")?;
    let mix = loaded.linear_combination(&x, !args.prediction)?;
    if let Some(spec) = &args.quantiles {
        let ps = parse_number_list(spec, "--quantiles")?;
        let values: Vec<String> = ps
            .iter()
            .map(|&p| mix.quantile(p).map(|q| format!("{q:.4}")))
            .collect::<Result<_>>()?;
        println!("{}", values.join(" "));
    } else {
        let median = mix.quantile(0.5)?;
        let (lo, hi) = mix.credible_interval(args.level, IntervalMethod::Shortest)?;
        println!("{median:.3} [{lo:.3}, {hi:.3}]");
    }
    Ok(())
}

fn run_forest(args: ForestArgs) -> Result<()> {
    let loaded = load_fit_json(&args.fit)?;
    let mut extra = parse_row_specs(&args.mean_rows, true)?;
    extra.extend(parse_row_specs(&args.predict_rows, false)?);
    let tau_row = loaded
        .summary
        .row("tau")
        .ok_or_else(|| Error::Parse("fit JSON summary lacks a tau row".into()))?;
    let spec = ForestSpec {
        xlabel: args.xlabel.clone(),
        extra,
    };
    render_forest_svg(
        &loaded.problem,
        &loaded.grid,
        tau_row,
        &spec,
        loaded.summary.level,
        &args.out,
    )?;
    println!("forest plot written to {}", args.out.display());
    Ok(())
}

fn resolve_column(loaded: &LoadedFit, name_or_index: &str) -> Result<usize> {
    if let Ok(idx) = name_or_index.parse::<usize>() {
        return Ok(idx);
    }
    loaded
        .problem
        .design
        .column_names
        .iter()
        .position(|n| n == name_or_index)
        .ok_or_else(|| Error::invalid(format!("no design column named {name_or_index:?}")))
}

fn run_trend(args: TrendArgs) -> Result<()> {
    let loaded = load_fit_json(&args.fit)?;
    let covariable = resolve_column(&loaded, &args.covariable)?;
    let d = loaded.problem.d();

    let template: Vec<TrendEntry> = if args.at.is_empty() {
        // default: intercept-style columns fixed at their first-row values,
        // the chosen covariable varying
        (0..d)
            .map(|j| {
                if j == covariable {
                    TrendEntry::Varying
                } else {
                    TrendEntry::Fixed(loaded.problem.design.entries[(0, j)])
                }
            })
            .collect()
    } else {
        args.at
            .split(',')
            .map(|item| {
                let item = item.trim();
                if item == "*" {
                    Ok(TrendEntry::Varying)
                } else {
                    Ok(TrendEntry::Fixed(parse_scalar(item)?))
                }
            })
            .collect::<Result<_>>()?
    };

    let x_values: Vec<f64> = match &args.range {
        Some(spec) => {
            let parts: Vec<&str> = spec.split(':').collect();
            if parts.len() != 3 {
                return Err(Error::invalid("--range must look like FROM:TO:STEP"));
            }
            let (from, to, step) = (
                parse_scalar(parts[0])?,
                parse_scalar(parts[1])?,
                parse_scalar(parts[2])?,
            );
            if step <= 0.0 || to < from {
                return Err(Error::invalid("--range needs FROM <= TO and STEP > 0"));
            }
            let n = ((to - from) / step).round() as usize;
            (0..=n).map(|i| from + i as f64 * step).collect()
        }
        None => {
            let col = loaded.problem.design.entries.column(covariable);
            let lo = col.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = col.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            (0..=50).map(|i| lo + (hi - lo) * i as f64 / 50.0).collect()
        }
    };

    let group_by = match &args.group_by {
        Some(g) => Some(resolve_column(&loaded, g)?),
        None => None,
    };
    let spec = TrendSpec {
        covariable,
        template,
        x_values,
        bubble: args.bubble,
        group_by,
        xlabel: args.xlabel.clone(),
        ylabel: args.ylabel.clone(),
    };
    render_trend_svg(&loaded.problem, &loaded.grid, &spec, args.level, &args.out)?;
    println!("trend plot written to {}", args.out.display());
    Ok(())
}

#[derive(serde::Serialize)]
struct ModelTableJson {
    variables: Vec<String>,
    models: Vec<ModelRowJson>,
    inclusion_probabilities: Vec<f64>,
    median_probability_model: Vec<String>,
}

#[derive(serde::Serialize)]
struct ModelRowJson {
    included: Vec<String>,
    mask: Vec<bool>,
    prior_probability: f64,
    log_marginal_likelihood: f64,
    posterior_probability: f64,
}

fn run_select(args: SelectArgs) -> Result<()> {
    let measure = parse_measure(&args.measure)?;
    let table = read_study_csv(&args.input, measure)?;
    let variables: Vec<String> = args
        .variables
        .split(',')
        .map(|v| v.trim().to_string())
        .collect();
    let refs: Vec<&str> = variables.iter().map(String::as_str).collect();
    let mut space = enumerate_models(&refs)?;

    let prior_kind = match args.model_prior.split_once(':') {
        None if args.model_prior == "uniform" => ModelPrior::Uniform,
        Some(("bernoulli", pi)) => ModelPrior::Bernoulli(parse_scalar(pi)?),
        _ => {
            return Err(Error::invalid(format!(
                "unknown model prior {:?} (expected uniform or bernoulli:PI)",
                args.model_prior
            )))
        }
    };
    model_prior(&mut space, prior_kind)?;

    let mut columns = Vec::with_capacity(variables.len());
    for v in &variables {
        columns.push((v.clone(), table.numeric_column(v)?));
    }
    let covariates = DesignMatrix::from_columns(columns)?;
    let priors = SelectionPriors {
        intercept_sd: args.intercept_sd,
        effect_sd: args.effect_sd,
        tau_prior: parse_tau_prior(&args.tau_prior)?,
    };
    let options = FitOptions {
        delta: args.delta,
        epsilon: args.epsilon,
    };
    score_models(&mut space, &table.dataset, &covariates, &priors, &options)?;
    posterior_model_probs(&mut space)?;
    let ranked = ranked_models(&space)?;
    let incl = inclusion_probabilities(&space)?;
    let mpm = median_probability_model(&space)?;
    let probs = space.posterior_probs.clone().unwrap();
    let log_mls = space.log_mls.clone().unwrap();

    println!(
        "{}",
        style("model table (posterior probability, descending):")
    );
    for (rank, &m) in ranked.iter().enumerate() {
        println!(
            "{:>3}  {:<40} prob {:.4}  log-ml {:>12.4}",
            rank + 1,
            space.describe(m),
            probs[m],
            log_mls[m]
        );
    }
    println!();
    println!("{}", style("inclusion probabilities:"));
    for (v, p) in variables.iter().zip(&incl) {
        println!("  {v:<12} {p:.4}");
    }
    println!("median probability model: {{{}}}", mpm.join(", "));

    if let Some(path) = &args.out {
        let json = ModelTableJson {
            variables: variables.clone(),
            models: ranked
                .iter()
                .map(|&m| ModelRowJson {
                    included: space
                        .variables
                        .iter()
                        .zip(&space.models[m])
                        .filter(|(_, &inc)| inc)
                        .map(|(v, _)| v.clone())
                        .collect(),
                    mask: space.models[m].clone(),
                    prior_probability: space.prior_probs[m],
                    log_marginal_likelihood: log_mls[m],
                    posterior_probability: probs[m],
                })
                .collect(),
            inclusion_probabilities: incl,
            median_probability_model: mpm,
        };
        std::fs::write(path, serde_json::to_string_pretty(&json)? + "\n")?;
        println!("model table written to {}", path.display());
    }
    Ok(())
}
