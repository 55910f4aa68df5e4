//! Command-line front end: dataset ingestion, synthetic data generation,
//! single-grouping structure tests, full greedy searches and the
//! interaction permutation test.
//!
//! Exit codes: 0 success (or VALID verdict), 1 runtime failure, 2 bad
//! input (flags, files, groupings, validation), 3 INVALID verdict from
//! `test-grouping`.

mod report;

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};

use astrid::classifiers::{ClassifierKind, ClassifierSpec, ForestParams, KnnParams};
use astrid::evaluation::{accuracy, confidence_interval, ojala_test2, structure_test};
use astrid::ingest::{generate_synthetic, parse_arff, parse_csv, to_dataset, write_csv, ClassColumn};
use astrid::search::run_astrid;
use astrid::{DataSplit, Dataset, Grouping, TrialConfig};

use report::{ClassifierSummary, RunReport};

#[derive(Parser)]
#[command(name = "astrid", version, about = "Identify the attribute groups a classifier exploits jointly")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full greedy search: one grouping per cardinality, then select the
    /// finest valid one.
    Run(RunArgs),
    /// Structure-test a single grouping (exit 0 = VALID, 3 = INVALID).
    TestGrouping(TestGroupingArgs),
    /// Generate the synthetic benchmark dataset as CSV.
    Synth(SynthArgs),
    /// Permutation test of "the classifier uses no interactions at all".
    OgTest(OgTestArgs),
}

#[derive(Args)]
struct DataArgs {
    /// Input dataset; format chosen by extension (.csv or .arff).
    #[arg(long)]
    data: PathBuf,
    /// Class attribute name (for CSV, a 0-based column index also works).
    #[arg(long)]
    class: String,
}

#[derive(Args)]
struct EvalArgs {
    /// Classifier: nb, tree, rf or knn.
    #[arg(long, default_value = "rf")]
    classifier: String,
    /// Trials per confidence interval.
    #[arg(long = "R", default_value_t = 250)]
    r: usize,
    /// Trials per expected-accuracy estimate.
    #[arg(long = "N", default_value_t = 100)]
    n: usize,
    /// Master seed: drives the split, every permutation stream and the
    /// classifier's internal randomness.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (0 = all cores). Never changes results.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Trees in the random forest.
    #[arg(long, default_value_t = 100)]
    trees: usize,
    /// Neighbors for knn.
    #[arg(long, default_value_t = 5)]
    knn_k: usize,
    /// Train each forest tree on the full sample instead of a bootstrap.
    #[arg(long)]
    no_bootstrap: bool,
    /// Consider every attribute at every forest split.
    #[arg(long)]
    no_feature_subsample: bool,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    eval: EvalArgs,
    /// Write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Compute confidence intervals for every cardinality instead of
    /// stopping at the first valid one.
    #[arg(long)]
    full_ci: bool,
}

#[derive(Args)]
struct TestGroupingArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    eval: EvalArgs,
    /// Grouping to test, e.g. "1,2|3|4" (1-based attribute indices).
    #[arg(long)]
    grouping: String,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 500)]
    n_per_class: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct OgTestArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    eval: EvalArgs,
}

/// Failures split by exit code: bad input (2) vs runtime trouble (1).
enum Failure {
    Input(anyhow::Error),
    Runtime(anyhow::Error),
}

impl Failure {
    fn report(self) -> ExitCode {
        match self {
            Failure::Input(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(2)
            }
            Failure::Runtime(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(1)
            }
        }
    }
}

fn input_err(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Input(e.into())
}

fn runtime_err(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Runtime(e.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::TestGrouping(args) => cmd_test_grouping(args),
        Command::Synth(args) => cmd_synth(args),
        Command::OgTest(args) => cmd_og_test(args),
    };
    match outcome {
        Ok(code) => code,
        Err(failure) => failure.report(),
    }
}

fn cmd_run(args: RunArgs) -> Result<ExitCode, Failure> {
    let started = Instant::now();
    let spec = classifier_spec(&args.eval)?;
    let config = trial_config(&args.eval);
    let data = load_dataset(&args.data)?;
    let split = split_dataset(&data, config.master_seed)?;

    let result = with_threads(args.eval.threads, || {
        run_astrid(&spec, &split, &config, args.full_ci)
    })
    .map_err(runtime_err)?;

    let report = RunReport::new(&data, classifier_summary(&spec), &config, &result);
    if let Some(path) = &args.out {
        fs::write(path, report.to_json())
            .with_context(|| format!("writing report to {}", path.display()))
            .map_err(runtime_err)?;
    }
    print!("{}", report.render_text(data.attribute_names()));
    println!("elapsed: {:.2}s", started.elapsed().as_secs_f64());
    Ok(ExitCode::SUCCESS)
}

fn cmd_test_grouping(args: TestGroupingArgs) -> Result<ExitCode, Failure> {
    let spec = classifier_spec(&args.eval)?;
    let config = trial_config(&args.eval);
    let data = load_dataset(&args.data)?;
    let grouping = Grouping::parse(&args.grouping, data.n_attributes()).map_err(input_err)?;
    let split = split_dataset(&data, config.master_seed)?;

    let (a0, ci) = with_threads(args.eval.threads, || {
        let model = astrid::classifiers::train(&spec, &split.train)?;
        let a0 = accuracy(&model, &split.test_ci)?;
        let ci = confidence_interval(&spec, &split.train, &grouping, &split.test_ci, &config)?;
        Ok::<_, astrid::evaluation::EvalError>((a0, ci))
    })
    .map_err(runtime_err)?;

    let valid = structure_test(a0, &ci);
    println!("grouping: {grouping}");
    println!("a0 = {a0:.3}");
    println!("CI = [{:.3}, {:.3}]", ci.lower, ci.upper);
    println!("{}", if valid { "VALID" } else { "INVALID" });
    Ok(if valid {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    })
}

fn cmd_synth(args: SynthArgs) -> Result<ExitCode, Failure> {
    if args.n_per_class == 0 {
        return Err(Failure::Input(anyhow!("--n-per-class must be at least 1")));
    }
    let data = generate_synthetic(args.n_per_class, args.seed);
    let file = fs::File::create(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))
        .map_err(runtime_err)?;
    write_csv(&data, "class", file).map_err(runtime_err)?;
    println!(
        "wrote {} rows x {} attributes to {}",
        data.n_rows(),
        data.n_attributes(),
        args.out.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_og_test(args: OgTestArgs) -> Result<ExitCode, Failure> {
    let spec = classifier_spec(&args.eval)?;
    let config = trial_config(&args.eval);
    let data = load_dataset(&args.data)?;
    let split = split_dataset(&data, config.master_seed)?;

    let p = with_threads(args.eval.threads, || {
        ojala_test2(&spec, &split.train, &split.test_ci, &config)
    })
    .map_err(runtime_err)?;
    println!("p_OG = {p:.4}");
    Ok(ExitCode::SUCCESS)
}

fn classifier_spec(args: &EvalArgs) -> Result<ClassifierSpec, Failure> {
    let kind = match args.classifier.parse::<ClassifierKind>().map_err(input_err)? {
        ClassifierKind::RandomForest(_) => ClassifierKind::RandomForest(ForestParams {
            trees: args.trees,
            bootstrap: !args.no_bootstrap,
            feature_subsample: !args.no_feature_subsample,
        }),
        ClassifierKind::Knn(_) => ClassifierKind::Knn(KnnParams { k: args.knn_k }),
        other => other,
    };
    Ok(ClassifierSpec::new(kind, args.seed))
}

fn classifier_summary(spec: &ClassifierSpec) -> ClassifierSummary {
    let mut summary = ClassifierSummary {
        kind: spec.kind.name().to_string(),
        trees: None,
        bootstrap: None,
        feature_subsample: None,
        k: None,
        train_seed: spec.train_seed,
    };
    match &spec.kind {
        ClassifierKind::RandomForest(p) => {
            summary.trees = Some(p.trees);
            summary.bootstrap = Some(p.bootstrap);
            summary.feature_subsample = Some(p.feature_subsample);
        }
        ClassifierKind::Knn(p) => summary.k = Some(p.k),
        _ => {}
    }
    summary
}

fn trial_config(args: &EvalArgs) -> TrialConfig {
    TrialConfig::new(args.r, args.n, args.seed)
}

/// Load and preprocess a dataset, refusing anything that fails validation.
fn load_dataset(args: &DataArgs) -> Result<Dataset, Failure> {
    let extension = args
        .data
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .unwrap_or_default();
    let bytes = fs::read(&args.data)
        .with_context(|| format!("reading {}", args.data.display()))
        .map_err(input_err)?;

    let raw = match extension.as_str() {
        "arff" => {
            let doc = parse_arff(bytes.as_slice())
                .map_err(|e| annotate_input(e, &args.data))?;
            to_dataset(&doc, &args.class).map_err(|e| annotate_input(e, &args.data))?
        }
        "csv" => {
            let attempt = parse_csv(
                bytes.as_slice(),
                &ClassColumn::Name(args.class.clone()),
                &HashMap::new(),
            );
            match attempt {
                Ok(raw) => raw,
                Err(astrid::ingest::IngestError::UnknownClassColumn(_)) => {
                    let index: usize = args.class.parse().map_err(|_| {
                        Failure::Input(anyhow!(
                            "{}: no column named `{}` in the header",
                            args.data.display(),
                            args.class
                        ))
                    })?;
                    parse_csv(
                        bytes.as_slice(),
                        &ClassColumn::Index(index),
                        &HashMap::new(),
                    )
                    .map_err(|e| annotate_input(e, &args.data))?
                }
                Err(e) => return Err(annotate_input(e, &args.data)),
            }
        }
        other => {
            return Err(Failure::Input(anyhow!(
                "{}: unsupported extension `{other}` (expected .csv or .arff)",
                args.data.display()
            )))
        }
    };

    let data = raw
        .preprocess()
        .with_context(|| format!("preprocessing {}", args.data.display()))
        .map_err(input_err)?;
    let violations = data.validate();
    if !violations.is_empty() {
        let listed: Vec<String> = violations.iter().map(|v| format!("  - {v}")).collect();
        return Err(Failure::Input(anyhow!(
            "{} failed validation:\n{}",
            args.data.display(),
            listed.join("\n")
        )));
    }
    Ok(data)
}

fn annotate_input(e: astrid::ingest::IngestError, path: &Path) -> Failure {
    Failure::Input(anyhow!("{}: {e}", path.display()))
}

fn split_dataset(data: &Dataset, seed: u64) -> Result<DataSplit, Failure> {
    data.stratified_split((0.5, 0.25, 0.25), seed)
        .map_err(input_err)
}

/// Run inside a thread pool of the requested size (0 = rayon default).
fn with_threads<T, E>(
    threads: usize,
    body: impl FnOnce() -> Result<T, E> + Send,
) -> Result<T, E>
where
    T: Send,
    E: Send,
{
    if threads == 0 {
        return body();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool");
    pool.install(body)
}
