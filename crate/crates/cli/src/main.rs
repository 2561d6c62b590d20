mod input;

use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mochis_core::moments::{moments, statistic_scale};
use mochis_core::numeric::{format_rational, parse_rational, rational_to_f64};
use mochis_core::power::{
    default_alpha_grid, heteroskedastic_objective, heteroskedastic_search, roc_from_p_values, simulate_p_values,
    AlternativeSpec, Baseline, Design, PowerEstimate, PowerTest, WeightSearchConfig, WeightTemplate,
};
use mochis_core::reconstruct::{reconstruct_cdf, QuantileSide};
use mochis_core::stattest::{
    MethodChoice, NullCdfSpec, OneSampleConfig, OneSampleTest, Side, TwoSampleConfig, TwoSampleTest,
    DEFAULT_CONTINUOUS_MOMENTS, DEFAULT_DISCRETE_MOMENTS,
};
use mochis_core::{MomentSequence, StatisticSpec, WeightVector};
use serde::Serialize;
use serde_json::{json, Value};

use input::{read_moments, read_null_table, read_sample};

#[derive(Parser)]
#[command(name = "mochis", version, about = "Exact moments, CDF reconstruction and spacing tests")]
struct Cli {
    /// Add wall-clock timing to the output envelope.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact moments of the statistic.
    Moments(MomentsArgs),
    /// Reconstructed CDF value or quantile on the normalized scale.
    Cdf(CdfArgs),
    /// Two-sample spacing test.
    Test2(Test2Args),
    /// One-sample spacing test against a fully specified null.
    Test1(Test1Args),
    /// Monte-Carlo power at one level, with baselines on shared data.
    Power(StudyArgs),
    /// Power over a grid of levels.
    Roc(RocArgs),
    /// Heteroskedasticity objective for one configuration.
    Objective(ObjectiveArgs),
    /// Search (p, w) minimizing the heteroskedasticity objective.
    Search(SearchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Discrete,
    Continuous,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum DesignArg {
    TwoSample,
    OneSample,
}

#[derive(Clone, Copy, ValueEnum)]
enum TemplateArg {
    Symmetric,
    Monotone,
    Free,
}

#[derive(Args)]
struct SpecArgs {
    #[arg(long, value_enum, default_value = "discrete")]
    mode: ModeArg,
    /// Second-sample size (discrete mode).
    #[arg(long)]
    n: Option<u64>,
    /// Number of bins; defaults to the number of weights.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 2)]
    p: u32,
    /// Comma-separated rationals, e.g. 1,1/5,0; defaults to all ones.
    #[arg(long)]
    weights: Option<String>,
}

impl SpecArgs {
    fn build(&self) -> Result<StatisticSpec, CliError> {
        let weights = weights_for(self.weights.as_deref(), self.k)?;
        Ok(match self.mode {
            ModeArg::Discrete => {
                let n = self.n.ok_or_else(|| usage("discrete mode needs --n"))?;
                StatisticSpec::discrete(n, self.p, weights)?
            }
            ModeArg::Continuous => StatisticSpec::continuous(self.p, weights)?,
        })
    }
}

#[derive(Args)]
struct MomentsArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long = "num-moments", short = 'M', default_value_t = 4)]
    num_moments: usize,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct CdfArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Normalized moments mu_0..mu_M, one rational per line, instead of a statistic.
    #[arg(long)]
    moments_file: Option<String>,
    #[arg(long = "num-moments", short = 'M', default_value_t = DEFAULT_DISCRETE_MOMENTS)]
    num_moments: usize,
    /// Point on the normalized scale [0, 1].
    #[arg(long, conflicts_with = "quantile", required_unless_present = "quantile")]
    at: Option<f64>,
    #[arg(long)]
    quantile: Option<f64>,
}

#[derive(Args)]
struct TestArgs {
    #[arg(long, default_value_t = 2)]
    p: u32,
    #[arg(long)]
    weights: Option<String>,
    #[arg(long, default_value = "two-sided")]
    side: Side,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long = "num-moments", short = 'M')]
    num_moments: Option<usize>,
}

#[derive(Args)]
struct Test2Args {
    /// Reference sample (k - 1 values).
    #[arg(long)]
    x: String,
    /// Second sample (n values).
    #[arg(long)]
    y: String,
    #[command(flatten)]
    test: TestArgs,
    #[arg(long, default_value = "auto")]
    method: MethodChoice,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct Test1Args {
    #[arg(long)]
    sample: String,
    /// uniform, normal:mu,sigma or exp:lambda.
    #[arg(long, default_value = "uniform", conflicts_with = "null_table")]
    null: NullCdfSpec,
    /// Piecewise-linear null CDF: lines of "x F(x)".
    #[arg(long)]
    null_table: Option<String>,
    #[command(flatten)]
    test: TestArgs,
}

#[derive(Args)]
struct StudyArgs {
    #[arg(long, value_enum, default_value = "two-sample")]
    design: DesignArg,
    #[arg(long)]
    k: usize,
    /// Second-sample size (two-sample design).
    #[arg(long, default_value_t = 0)]
    n: usize,
    #[arg(long, default_value = "null")]
    alt: AlternativeSpec,
    #[command(flatten)]
    test: TestArgs,
    #[arg(long, default_value = "auto")]
    method: MethodChoice,
    #[arg(long, default_value_t = 1000)]
    replicates: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated: ks, cvm, mw (two-sample), chi2[:bins] (one-sample).
    #[arg(long, value_delimiter = ',')]
    baselines: Vec<Baseline>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct RocArgs {
    #[command(flatten)]
    study: StudyArgs,
    /// Comma-separated levels; defaults to 0.01, 0.02, ..., 1.
    #[arg(long, value_delimiter = ',')]
    alphas: Vec<f64>,
}

#[derive(Args)]
struct ObjectiveArgs {
    #[arg(long)]
    n: u64,
    #[arg(long, default_value_t = 1)]
    p: u32,
    #[arg(long)]
    weights: String,
    /// F(0) as a rational or decimal in (0, 1).
    #[arg(long, default_value = "1/2")]
    f0: String,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    n: u64,
    #[arg(long, default_value = "1/2")]
    f0: String,
    #[arg(long, value_delimiter = ',', default_value = "1,2")]
    p_grid: Vec<u32>,
    #[arg(long, value_enum, default_value = "symmetric")]
    template: TemplateArg,
    /// Grid {0, 1/steps, ..., 1} per free coordinate.
    #[arg(long, default_value_t = 10)]
    steps: u32,
    #[arg(long, default_value_t = 2)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

enum CliError {
    Usage(String),
    Core(mochis_core::Error),
}

impl From<mochis_core::Error> for CliError {
    fn from(e: mochis_core::Error) -> Self {
        CliError::Core(e)
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// What a command prints: a JSON payload or finished CSV text.
enum Output {
    Json { seed: Option<u64>, result: Value },
    Csv(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(threads) = std::env::var("MOCHIS_THREADS") {
        match threads.trim().parse::<usize>() {
            Ok(t) if t > 0 => {
                if let Err(e) = mochis_core::power::configure_threads(t) {
                    eprintln!("warning: {e}");
                }
            }
            _ => {
                eprintln!("error: MOCHIS_THREADS must be a positive integer, got {threads:?}");
                return ExitCode::from(2);
            }
        }
    }
    let start = Instant::now();
    let name = command_name(&cli.command);
    let outcome = match &cli.command {
        Command::Moments(a) => cmd_moments(a),
        Command::Cdf(a) => cmd_cdf(a),
        Command::Test2(a) => cmd_test2(a),
        Command::Test1(a) => cmd_test1(a),
        Command::Power(a) => cmd_power(a),
        Command::Roc(a) => cmd_roc(a),
        Command::Objective(a) => cmd_objective(a),
        Command::Search(a) => cmd_search(a),
    };
    match outcome {
        Ok(Output::Csv(text)) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Ok(Output::Json { seed, result }) => {
            let mut envelope = json!({
                "command": name,
                "version": env!("CARGO_PKG_VERSION"),
                "seed": seed,
                "result": result,
            });
            if cli.timing {
                envelope["timing"] = json!({ "seconds": start.elapsed().as_secs_f64() });
            }
            println!("{}", serde_json::to_string_pretty(&envelope).expect("serializable"));
            ExitCode::SUCCESS
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_internal() { 3 } else { 2 })
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Moments(_) => "moments",
        Command::Cdf(_) => "cdf",
        Command::Test2(_) => "test2",
        Command::Test1(_) => "test1",
        Command::Power(_) => "power",
        Command::Roc(_) => "roc",
        Command::Objective(_) => "objective",
        Command::Search(_) => "search",
    }
}

fn weights_for(text: Option<&str>, k: Option<usize>) -> Result<WeightVector, CliError> {
    let weights = match (text, k) {
        (Some(t), _) => WeightVector::parse(t)?,
        (None, Some(k)) => WeightVector::ones(k)?,
        (None, None) => return Err(usage("give --weights or --k")),
    };
    if let Some(k) = k {
        if k != weights.len() {
            return Err(usage(format!("--k {k} does not match {} weights", weights.len())));
        }
    }
    Ok(weights)
}

fn json_value<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("serializable")
}

fn cmd_moments(a: &MomentsArgs) -> Result<Output, CliError> {
    let spec = a.spec.build()?;
    let seq = moments(&spec, a.num_moments)?;
    let rows: Vec<(usize, String, String)> = (0..=a.num_moments)
        .map(|m| (m, format_rational(&seq.raw_moment(m)), format_rational(&seq.moment(m))))
        .collect();
    if a.format == Format::Csv {
        let mut out = String::from("order,raw,raw_approx,normalized,normalized_approx\n");
        for (m, raw, norm) in &rows {
            out.push_str(&format!(
                "{m},{raw},{},{norm},{}\n",
                rational_to_f64(&seq.raw_moment(*m)),
                seq.moment_f64(*m)
            ));
        }
        return Ok(Output::Csv(out));
    }
    let listing: Vec<Value> = rows
        .iter()
        .map(|(m, raw, norm)| {
            json!({
                "order": m,
                "raw": raw,
                "raw_approx": rational_to_f64(&seq.raw_moment(*m)),
                "normalized": norm,
                "normalized_approx": seq.moment_f64(*m),
            })
        })
        .collect();
    Ok(Output::Json {
        seed: None,
        result: json!({
            "spec": spec_json(&spec),
            "scale": format_rational(&statistic_scale(&spec)?),
            "moments": listing,
        }),
    })
}

fn spec_json(spec: &StatisticSpec) -> Value {
    json!({
        "mode": if spec.is_discrete() { "discrete" } else { "continuous" },
        "n": spec.n(),
        "k": spec.k(),
        "p": spec.p,
        "weights": spec.weights.to_string(),
    })
}

fn cmd_cdf(a: &CdfArgs) -> Result<Output, CliError> {
    let seq = match &a.moments_file {
        Some(path) => {
            let values = read_moments(path)?;
            let order = values.len() - 1;
            let fixture = StatisticSpec::continuous(1, WeightVector::ones(1)?)?;
            let one = mochis_core::numeric::BigRational::from_integer(1.into());
            let seq = MomentSequence::from_rationals(fixture, one, &values)?;
            if a.num_moments > order {
                seq
            } else {
                seq.truncated(a.num_moments)?
            }
        }
        None => moments(&a.spec.build()?, a.num_moments)?,
    };
    let m = seq.max_order();
    let est = reconstruct_cdf(&seq, m)?;
    let mut result = json!({
        "moments_used": m,
        "kind": json_value(&est.kind()),
        "error_bound": est.error_bound(),
    });
    if let Some(x) = a.at {
        if !x.is_finite() {
            return Err(usage("--at must be finite"));
        }
        result["at"] = json!(x);
        result["value"] = json!(est.cdf(x));
    } else if let Some(q) = a.quantile {
        result["quantile"] = json!(q);
        result["value"] = json!(est.quantile(q, QuantileSide::Lower)?);
    }
    Ok(Output::Json { seed: None, result })
}

fn cmd_test2(a: &Test2Args) -> Result<Output, CliError> {
    let x = read_sample(&a.x)?;
    let y = read_sample(&a.y)?;
    let weights = weights_for(a.test.weights.as_deref(), Some(x.len() + 1))?;
    let config = TwoSampleConfig::new(a.test.p, weights)
        .side(a.test.side)
        .method(a.method)
        .moments(a.test.num_moments.unwrap_or(DEFAULT_DISCRETE_MOMENTS))
        .alpha(a.test.alpha);
    let result = mochis_core::stattest::two_sample_test(&x, &y, &config, a.seed)?;
    Ok(Output::Json {
        seed: Some(a.seed),
        result: json_value(&result),
    })
}

fn cmd_test1(a: &Test1Args) -> Result<Output, CliError> {
    let z = read_sample(&a.sample)?;
    let null = match &a.null_table {
        Some(path) => read_null_table(path)?,
        None => a.null.clone(),
    };
    let weights = weights_for(a.test.weights.as_deref(), Some(z.len() + 1))?;
    let config = OneSampleConfig::new(a.test.p, weights)
        .side(a.test.side)
        .moments(a.test.num_moments.unwrap_or(DEFAULT_CONTINUOUS_MOMENTS))
        .alpha(a.test.alpha);
    let result = mochis_core::stattest::one_sample_test(&z, &null, &config)?;
    Ok(Output::Json {
        seed: Some(0),
        result: json_value(&result),
    })
}

/// The spacing test, its baselines, and the design they share.
struct Study {
    design: Design,
    spacing: Box<dyn PowerTest>,
    baselines: Vec<Baseline>,
}

impl Study {
    fn prepare(a: &StudyArgs) -> Result<Self, CliError> {
        let weights = weights_for(a.test.weights.as_deref(), Some(a.k))?;
        let (design, spacing): (Design, Box<dyn PowerTest>) = match a.design {
            DesignArg::TwoSample => {
                let config = TwoSampleConfig::new(a.test.p, weights)
                    .side(a.test.side)
                    .method(a.method)
                    .moments(a.test.num_moments.unwrap_or(DEFAULT_DISCRETE_MOMENTS))
                    .alpha(a.test.alpha);
                let test = TwoSampleTest::prepare(&config, a.n as u64)?;
                (Design::TwoSample { k: a.k, n: a.n }, Box::new(test))
            }
            DesignArg::OneSample => {
                let config = OneSampleConfig::new(a.test.p, weights)
                    .side(a.test.side)
                    .moments(a.test.num_moments.unwrap_or(DEFAULT_CONTINUOUS_MOMENTS))
                    .alpha(a.test.alpha);
                (Design::OneSample { k: a.k }, Box::new(OneSampleTest::prepare(&config)?))
            }
        };
        a.alt.validate(&design)?;
        for b in &a.baselines {
            let fits = match design {
                Design::TwoSample { .. } => !matches!(b, Baseline::ChiSquared { .. }),
                Design::OneSample { .. } => !matches!(b, Baseline::MannWhitney),
            };
            if !fits {
                return Err(usage(format!("baseline {b} does not apply to this design")));
            }
        }
        if a.replicates == 0 {
            return Err(usage("--replicates must be >= 1"));
        }
        Ok(Self {
            design,
            spacing,
            baselines: a.baselines.clone(),
        })
    }

    /// Names and p-values per test, on one shared seed schedule.
    fn run(&self, a: &StudyArgs) -> Result<Vec<(String, Vec<f64>)>, CliError> {
        let mut tests: Vec<&dyn PowerTest> = vec![self.spacing.as_ref()];
        tests.extend(self.baselines.iter().map(|b| b as &dyn PowerTest));
        let p = simulate_p_values(&tests, &self.design, &a.alt, a.replicates, a.seed)?;
        let names = std::iter::once("spacing".to_string()).chain(self.baselines.iter().map(|b| b.to_string()));
        Ok(names.zip(p).collect())
    }
}

fn study_json(a: &StudyArgs, design: &Design) -> Value {
    json!({
        "design": json_value(design),
        "alternative": a.alt.to_string(),
        "p": a.test.p,
        "weights": weights_for(a.test.weights.as_deref(), Some(a.k)).map(|w| w.to_string()).unwrap_or_default(),
        "side": a.test.side.to_string(),
        "replicates": a.replicates,
    })
}

fn estimates_csv(rows: &[(String, Vec<PowerEstimate>)]) -> String {
    let mut out = String::from("test,alpha,power,se\n");
    for (name, curve) in rows {
        for e in curve {
            out.push_str(&format!("{name},{},{},{}\n", e.alpha, e.power, e.standard_error));
        }
    }
    out
}

fn cmd_power(a: &StudyArgs) -> Result<Output, CliError> {
    if !(0.0..=1.0).contains(&a.test.alpha) {
        return Err(usage("--alpha must lie in [0, 1]"));
    }
    let study = Study::prepare(a)?;
    let rows: Vec<(String, Vec<PowerEstimate>)> = study
        .run(a)?
        .into_iter()
        .map(|(name, p)| (name, vec![PowerEstimate::from_p_values(&p, a.test.alpha, a.seed)]))
        .collect();
    if a.format == Format::Csv {
        return Ok(Output::Csv(estimates_csv(&rows)));
    }
    let mut result = study_json(a, &study.design);
    result["alpha"] = json!(a.test.alpha);
    result["tests"] = rows
        .iter()
        .map(|(name, e)| json!({ "test": name, "power": e[0].power, "standard_error": e[0].standard_error }))
        .collect();
    Ok(Output::Json {
        seed: Some(a.seed),
        result,
    })
}

fn cmd_roc(a: &RocArgs) -> Result<Output, CliError> {
    let alphas = if a.alphas.is_empty() { default_alpha_grid() } else { a.alphas.clone() };
    if alphas.iter().any(|x| !(0.0..=1.0).contains(x)) {
        return Err(usage("--alphas must lie in [0, 1]"));
    }
    let study = Study::prepare(&a.study)?;
    let rows: Vec<(String, Vec<PowerEstimate>)> = study
        .run(&a.study)?
        .into_iter()
        .map(|(name, p)| (name, roc_from_p_values(&p, &alphas, a.study.seed)))
        .collect();
    if a.study.format == Format::Csv {
        return Ok(Output::Csv(estimates_csv(&rows)));
    }
    let mut result = study_json(&a.study, &study.design);
    result["curves"] = rows
        .iter()
        .map(|(name, curve)| {
            let points: Vec<Value> = curve
                .iter()
                .map(|e| json!({ "alpha": e.alpha, "power": e.power, "standard_error": e.standard_error }))
                .collect();
            json!({ "test": name, "points": points })
        })
        .collect();
    Ok(Output::Json {
        seed: Some(a.study.seed),
        result,
    })
}

fn parse_f0(text: &str) -> Result<mochis_core::numeric::BigRational, CliError> {
    parse_rational(text).ok_or_else(|| usage(format!("cannot parse F0 {text:?}")))
}

fn cmd_objective(a: &ObjectiveArgs) -> Result<Output, CliError> {
    let weights = WeightVector::parse(&a.weights)?;
    let value = heteroskedastic_objective(a.p, &weights, a.n, &parse_f0(&a.f0)?)?;
    Ok(Output::Json {
        seed: None,
        result: json!({
            "n": a.n,
            "k": weights.len(),
            "p": a.p,
            "weights": weights.to_string(),
            "f0": a.f0,
            "objective": format_rational(&value),
            "objective_approx": rational_to_f64(&value),
        }),
    })
}

fn cmd_search(a: &SearchArgs) -> Result<Output, CliError> {
    let template = match a.template {
        TemplateArg::Symmetric => WeightTemplate::Symmetric,
        TemplateArg::Monotone => WeightTemplate::Monotone,
        TemplateArg::Free => WeightTemplate::Free,
    };
    if a.steps == 0 {
        return Err(usage("--steps must be >= 1"));
    }
    let mut config = WeightSearchConfig::new(a.k, template, a.steps);
    config.restarts = a.restarts;
    let out = heteroskedastic_search(a.n, &parse_f0(&a.f0)?, &a.p_grid, &config, a.seed)?;
    Ok(Output::Json {
        seed: Some(a.seed),
        result: json!({
            "n": a.n,
            "k": a.k,
            "f0": a.f0,
            "p": out.p,
            "weights": out.weights.to_string(),
            "objective": out.objective,
            "evaluations": out.evaluations,
        }),
    })
}
