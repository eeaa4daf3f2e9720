//! `countcomp`: evaluate, sample, transform and verify count and composition
//! distributions from the command line.

mod params;
mod transform;

use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

use countcomp::dist::{
    alr_dirichlet_log_pdf, beta_binomial_log_pmf, beta_binomial_sample, dirichlet_log_pdf,
    dirichlet_multinomial_log_pmf, dirichlet_multinomial_sample, dirichlet_sample, gamma_log_pdf,
    gamma_sample, inverted_dirichlet_log_pdf, multinomial_log_pmf, multinomial_sample,
    negative_binomial_log_pmf, negative_binomial_sample_via_mixture, normalized_nb_log_pmf,
    normalized_nb_sample, poisson_log_pmf, poisson_sample, CountVector,
};
use countcomp::simplex::{log_ratio_forward, ratio_forward, Composition, LogRatioVector, RatioVector};
use countcomp::verify::{run_all_with, Level, VerifyConfig};
use countcomp::RngStream;

use params::{parse_model, DistName, Model};
use transform::{ChartArg, Direction};

#[derive(Debug)]
pub enum CliError {
    /// Malformed input or arguments; exit 2.
    Usage(String),
    /// Domain error or failed verification; exit 1.
    Failure(String),
}

impl CliError {
    fn io(e: impl std::fmt::Display) -> Self {
        CliError::Failure(format!("write failed: {e}"))
    }
}

impl From<countcomp::Error> for CliError {
    fn from(e: countcomp::Error) -> Self {
        match e {
            countcomp::Error::Domain(_) => CliError::Failure(e.to_string()),
            countcomp::Error::Contract(_) => CliError::Usage(e.to_string()),
        }
    }
}

/// Shortest decimal that parses back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

#[derive(Parser)]
#[command(name = "countcomp", version, about = "Count and composition distributions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long)]
    dist: DistName,
    /// Parameters as inline JSON, e.g. '{"alpha":[1,1,1]}'.
    #[arg(long, required_unless_present = "params_file", conflicts_with = "params_file")]
    params: Option<String>,
    /// File holding the parameter JSON.
    #[arg(long)]
    params_file: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the log density or log mass at one point as JSON.
    Eval {
        #[command(flatten)]
        model: ModelArgs,
        /// JSON number or array, e.g. '[0.2,0.3,0.5]'.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        /// Print only the log value.
        #[arg(long)]
        log: bool,
    },
    /// Draw variates as CSV.
    Sample {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Map CSV rows from stdin through a simplex chart.
    Transform {
        chart: ChartArg,
        direction: Direction,
        /// Append the log-|det| of the Jacobian of the map applied.
        #[arg(long)]
        jacobian: bool,
    },
    /// Run the oracle suite and print one JSON report per check.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "quick")]
        level: Level,
        #[arg(long, hide = true, default_value_t = 1.0)]
        tolerance_scale: f64,
    },
}

fn load_model(args: &ModelArgs) -> Result<(Model, Value), CliError> {
    let text = match (&args.params, &args.params_file) {
        (Some(text), _) => text.clone(),
        (None, Some(path)) => std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?,
        (None, None) => return Err(CliError::Usage("--params or --params-file is required".into())),
    };
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("malformed parameter JSON: {e}")))?;
    Ok((parse_model(args.dist, &value)?, value))
}

fn parse_point(text: &str) -> Result<(Vec<f64>, Vec<Value>), CliError> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| CliError::Usage(format!("malformed point JSON: {e}")))?;
    let items = match value {
        Value::Array(items) => items,
        Value::Number(_) => vec![value],
        _ => return Err(CliError::Usage("point must be a JSON number or array".into())),
    };
    let numbers = items
        .iter()
        .map(|v| v.as_f64().ok_or_else(|| CliError::Usage(format!("point entry {v} is not a number"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((numbers, items))
}

fn counts(point: &[f64]) -> Result<Vec<u64>, CliError> {
    point
        .iter()
        .map(|&v| {
            if v >= 0.0 && v.fract() == 0.0 && v <= u64::MAX as f64 {
                Ok(v as u64)
            } else {
                Err(CliError::Usage(format!("count {v} is not a non-negative integer")))
            }
        })
        .collect()
}

fn scalar<T: Copy>(values: &[T]) -> Result<T, CliError> {
    match values {
        [v] => Ok(*v),
        _ => Err(CliError::Usage(format!("expected one point entry, got {}", values.len()))),
    }
}

fn dimension(expected: usize, got: usize) -> Result<(), CliError> {
    if expected == got {
        Ok(())
    } else {
        Err(CliError::Usage(format!("point has {got} entries, expected {expected}")))
    }
}

fn eval_log(model: &Model, point: &[f64]) -> Result<f64, CliError> {
    let v = match model {
        Model::Dirichlet(a) => {
            dimension(a.len(), point.len())?;
            dirichlet_log_pdf(a, &Composition::new(point.to_vec()).map_err(as_failure)?)?
        }
        Model::InvertedDirichlet(a) => {
            dimension(a.len() - 1, point.len())?;
            inverted_dirichlet_log_pdf(a, &RatioVector::new(point.to_vec()).map_err(as_failure)?)?
        }
        Model::AlrDirichlet(a) => {
            dimension(a.len() - 1, point.len())?;
            alr_dirichlet_log_pdf(a, &LogRatioVector::new(point.to_vec()).map_err(as_failure)?)?
        }
        Model::Gamma { shape, scale } => gamma_log_pdf(*shape, *scale, scalar(point)?)?,
        Model::Poisson { rate } => poisson_log_pmf(*rate, scalar(&counts(point)?)?)?,
        Model::NegativeBinomial { total_shape, p } => {
            negative_binomial_log_pmf(*total_shape, *p, scalar(&counts(point)?)?)?
        }
        Model::Multinomial { m, probs } => {
            dimension(probs.len(), point.len())?;
            multinomial_log_pmf(*m, probs, &CountVector::new(counts(point)?))?
        }
        Model::DirichletMultinomial { m, shapes } => {
            dimension(shapes.len(), point.len())?;
            dirichlet_multinomial_log_pmf(shapes, *m, &CountVector::new(counts(point)?))?
        }
        Model::BetaBinomial(p) => beta_binomial_log_pmf(p, scalar(&counts(point)?)?)?,
        Model::NormalizedNb { params, component } => {
            dimension(2, point.len())?;
            let km = counts(point)?;
            normalized_nb_log_pmf(params, *component, km[0], km[1])?
        }
    };
    Ok(v)
}

/// Invalid points are values outside the support, not malformed input.
fn as_failure(e: countcomp::Error) -> CliError {
    CliError::Failure(e.to_string())
}

#[derive(Serialize)]
struct EvalOutput<'a> {
    dist: &'a str,
    params: &'a Value,
    point: &'a [Value],
    #[serde(rename = "logValue")]
    log_value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<f64>,
}

fn cmd_eval(model: &ModelArgs, point: &str, log: bool, out: &mut impl Write) -> Result<(), CliError> {
    let (parsed, params) = load_model(model)?;
    let (numbers, raw) = parse_point(point)?;
    let log_value = eval_log(&parsed, &numbers)?;
    if log {
        writeln!(out, "{}", fmt_f64(log_value)).map_err(CliError::io)?;
        return Ok(());
    }
    let linear = log_value.exp();
    let report = EvalOutput {
        dist: model.dist.as_str(),
        params: &params,
        point: &raw,
        log_value,
        value: (linear.is_normal()).then_some(linear),
    };
    let line = serde_json::to_string(&report).map_err(CliError::io)?;
    writeln!(out, "{line}").map_err(CliError::io)
}

fn sample_header(model: &Model) -> Vec<String> {
    let numbered = |prefix: &str, n: usize| (1..=n).map(|j| format!("{prefix}{j}")).collect();
    match model {
        Model::Dirichlet(a) => numbered("x", a.len()),
        Model::InvertedDirichlet(a) | Model::AlrDirichlet(a) => numbered("y", a.len() - 1),
        Model::Gamma { .. } => vec!["x".into()],
        Model::Poisson { .. } | Model::BetaBinomial(_) => vec!["k".into()],
        Model::NegativeBinomial { .. } => vec!["m".into()],
        Model::Multinomial { probs, .. } => numbered("x", probs.len()),
        Model::DirichletMultinomial { shapes, .. } => numbered("x", shapes.len()),
        Model::NormalizedNb { .. } => vec!["k".into(), "m".into()],
    }
}

fn sample_row(model: &Model, rng: &mut RngStream) -> Result<Vec<String>, CliError> {
    let floats = |v: &[f64]| v.iter().map(|&x| fmt_f64(x)).collect::<Vec<_>>();
    let ints = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>();
    Ok(match model {
        Model::Dirichlet(a) => floats(dirichlet_sample(a, rng)?.as_slice()),
        Model::InvertedDirichlet(a) => floats(ratio_forward(&dirichlet_sample(a, rng)?).entries()),
        Model::AlrDirichlet(a) => floats(log_ratio_forward(&dirichlet_sample(a, rng)?).entries()),
        Model::Gamma { shape, scale } => floats(&[gamma_sample(*shape, *scale, rng)?]),
        Model::Poisson { rate } => ints(&[poisson_sample(*rate, rng)?]),
        Model::NegativeBinomial { total_shape, p } => {
            let theta = p / (1.0 - p);
            ints(&[negative_binomial_sample_via_mixture(*total_shape, theta, rng)?])
        }
        Model::Multinomial { m, probs } => ints(multinomial_sample(*m, probs, rng).counts()),
        Model::DirichletMultinomial { m, shapes } => {
            ints(dirichlet_multinomial_sample(shapes, *m, rng)?.counts())
        }
        Model::BetaBinomial(p) => ints(&[beta_binomial_sample(p, rng)]),
        Model::NormalizedNb { params, component } => {
            let (k, m) = normalized_nb_sample(params, *component, rng)?;
            ints(&[k, m])
        }
    })
}

fn cmd_sample(model: &ModelArgs, count: u64, seed: u64, out: impl Write) -> Result<(), CliError> {
    let (parsed, _) = load_model(model)?;
    let mut rng = RngStream::new(seed);
    // Draw everything first so a domain error leaves stdout empty.
    let rows = (0..count)
        .map(|_| sample_row(&parsed, &mut rng))
        .collect::<Result<Vec<_>, _>>()?;
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(sample_header(&parsed)).map_err(CliError::io)?;
    for row in rows {
        writer.write_record(&row).map_err(CliError::io)?;
    }
    writer.flush().map_err(CliError::io)
}

fn cmd_verify(config: VerifyConfig, out: &mut impl Write) -> Result<(), CliError> {
    let reports = run_all_with(config);
    for r in &reports {
        writeln!(out, "{}", r.to_json()).map_err(CliError::io)?;
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    if failed > 0 {
        return Err(CliError::Failure(format!("{failed} of {} checks did not pass", reports.len())));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    match cli.command {
        Command::Eval { model, point, log } => cmd_eval(&model, &point, log, &mut out)?,
        Command::Sample { model, count, seed } => cmd_sample(&model, count, seed, &mut out)?,
        Command::Transform { chart, direction, jacobian } => {
            // Buffered so a bad row leaves stdout empty.
            let mut buffer = Vec::new();
            transform::run(chart, direction, jacobian, io::stdin().lock(), &mut buffer)?;
            out.write_all(&buffer).map_err(CliError::io)?
        }
        Command::Verify { seed, level, tolerance_scale } => {
            let config = VerifyConfig { seed, level, tolerance_scale };
            // Reports go out even when the suite fails.
            let result = cmd_verify(config, &mut out);
            out.flush().map_err(CliError::io)?;
            result?
        }
    }
    out.flush().map_err(CliError::io)
}

fn one_line(msg: &str) -> String {
    msg.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if !e.use_stderr() {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let text = e.to_string();
            eprintln!("{}", one_line(text.lines().next().unwrap_or("usage error")));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {}", one_line(&msg));
            ExitCode::from(2)
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {}", one_line(&msg));
            ExitCode::from(1)
        }
    }
}
