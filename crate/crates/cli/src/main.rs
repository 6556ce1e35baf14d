//! `qrbm` command-line workbench.
//!
//! Trains and samples binary RBMs, evaluates them as classifiers and runs
//! the two balancing experiments on labelled binary tables.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qrbm::balance::{
    generate_synthetic, run_scheme1, run_scheme2, GenerationMethod, GenerationVariant, Scheme1Settings,
    Scheme2Settings, DEFAULT_GIBBS_CYCLES,
};
use qrbm::classify::{rbm_classify, rbm_classify_reconstruction, ClassifierKind, RbmTrainer};
use qrbm::data::{dedupe, load_binary_table, split_train_test, Dataset};
use qrbm::fixture::{imbalanced_fixture, FixtureConfig};
use qrbm::metrics::{confusion, format_metric};
use qrbm::rbm::{load_model, save_model, EarlyStop};
use qrbm::sampler::{EmulatorSettings, DEFAULT_SWEEPS};
use qrbm::{rng, ClassLabel, Error, ModelTermSampler, TrainConfig};

#[derive(Parser, Debug)]
#[command(name = "qrbm", version, about = "Binary RBM training, sampling and class balancing")]
struct Cli {
    /// Worker threads; defaults to one per core.
    #[arg(long, global = true, value_parser = positive_usize)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the synthetic imbalanced dataset.
    Fixture(FixtureArgs),
    /// Train an RBM on a binary table and save the model.
    Train(TrainArgs),
    /// Sample synthetic records from a saved model.
    Generate(GenerateArgs),
    /// Classify a labelled table with a saved model.
    Evaluate(EvaluateArgs),
    /// Partition-and-vote balancing experiment.
    Scheme1(Scheme1Args),
    /// Synthetic-minority balancing experiment.
    Scheme2(Scheme2Args),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum SamplerKind {
    Cd,
    Exact,
    Annealer,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum MethodKind {
    Gibbs,
    Annealer,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum ClassifierArg {
    Rbm,
    Knn,
    Nb,
}

impl From<ClassifierArg> for ClassifierKind {
    fn from(c: ClassifierArg) -> Self {
        match c {
            ClassifierArg::Rbm => ClassifierKind::Rbm,
            ClassifierArg::Knn => ClassifierKind::Knn,
            ClassifierArg::Nb => ClassifierKind::NaiveBayes,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum VariantArg {
    Cd,
    Qa,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum InferenceMode {
    FreeEnergy,
    Reconstruction,
}

#[derive(Args, Debug)]
struct FixtureArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 3000, value_parser = positive_usize)]
    records: usize,
    /// Share of attack records.
    #[arg(long, default_value_t = 0.141)]
    minority: f64,
    #[arg(long, default_value_t = 0.25)]
    overlap: f64,
    #[arg(long, default_value_t = 0.05)]
    noise: f64,
    #[arg(long, default_value_t = 2012)]
    seed: u64,
}

/// Optimiser and sampler settings shared by every command that fits an RBM.
#[derive(Args, Debug, Clone)]
struct RbmArgs {
    #[arg(long, default_value_t = 32, value_parser = positive_usize)]
    hidden: usize,
    /// Defaults to 50 for `train` and 100 for the experiments.
    #[arg(long, value_parser = positive_usize)]
    epochs: Option<usize>,
    #[arg(long, default_value_t = 0.05, value_parser = positive_f64)]
    lr: f64,
    #[arg(long, default_value_t = 20, value_parser = positive_usize)]
    batch: usize,
    /// Standard deviation of the initial weights.
    #[arg(long, default_value_t = 0.01, value_parser = non_negative_f64)]
    init_std: f64,
    #[arg(long, default_value_t = 1, value_parser = positive_usize)]
    cd_k: usize,
    #[arg(long, default_value_t = 1.0, value_parser = positive_f64)]
    scale_s: f64,
    /// Annealer reads per training step; defaults to the batch size.
    #[arg(long, value_parser = positive_usize)]
    reads: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SWEEPS, value_parser = positive_usize)]
    sweeps: usize,
    /// Stop after this many epochs without a reconstruction-error improvement.
    #[arg(long, value_parser = positive_usize)]
    patience: Option<usize>,
    #[arg(long, default_value_t = 0.0, value_parser = non_negative_f64)]
    min_delta: f64,
}

impl RbmArgs {
    fn trainer(&self, sampler: SamplerKind, default_epochs: usize) -> RbmTrainer {
        let sampler = match sampler {
            SamplerKind::Cd => ModelTermSampler::Cd { k: self.cd_k },
            SamplerKind::Exact => ModelTermSampler::Exact,
            SamplerKind::Annealer => ModelTermSampler::AnnealerEmulator(EmulatorSettings {
                scale_s: self.scale_s,
                num_reads: self.reads,
                sweeps: self.sweeps,
            }),
        };
        RbmTrainer {
            n_hidden: self.hidden,
            init_std: self.init_std,
            config: TrainConfig {
                learning_rate: self.lr,
                epochs: self.epochs.unwrap_or(default_epochs),
                batch_size: self.batch,
                rng_seed: 0,
                early_stop: self.patience.map(|patience| EarlyStop {
                    patience,
                    min_delta: self.min_delta,
                }),
            },
            sampler,
        }
    }
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    skip_header: bool,
    #[arg(long, value_enum, default_value_t = SamplerKind::Cd)]
    sampler: SamplerKind,
    #[command(flatten)]
    rbm: RbmArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, value_parser = positive_usize)]
    count: usize,
    #[arg(long, value_enum, default_value_t = MethodKind::Gibbs)]
    method: MethodKind,
    /// Gibbs cycles per chain.
    #[arg(long, default_value_t = DEFAULT_GIBBS_CYCLES, value_parser = positive_usize)]
    cycles: usize,
    #[arg(long, default_value_t = 1.0, value_parser = positive_f64)]
    scale_s: f64,
    #[arg(long, default_value_t = DEFAULT_SWEEPS, value_parser = positive_usize)]
    sweeps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; records go to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    skip_header: bool,
    #[arg(long, value_enum, default_value_t = InferenceMode::FreeEnergy)]
    mode: InferenceMode,
}

/// Where the experiment data comes from and how it is split.
#[derive(Args, Debug, Clone)]
struct SourceArgs {
    /// Labelled table; the bundled fixture is used when omitted.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Separate test table; otherwise a stratified test set is drawn.
    #[arg(long)]
    test: Option<PathBuf>,
    #[arg(long)]
    skip_header: bool,
    /// Test records drawn per class when no test table is given.
    #[arg(long, default_value_t = 150, value_parser = positive_usize)]
    test_per_class: usize,
    /// Drop repeated records before splitting.
    #[arg(long)]
    dedupe: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct Scheme1Args {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, default_value_t = 5, value_parser = positive_usize)]
    parts: usize,
    #[arg(long, value_enum, default_value_t = ClassifierArg::Rbm)]
    classifier: ClassifierArg,
    /// Model-term source for RBM training.
    #[arg(long, value_enum, default_value_t = SamplerKind::Cd)]
    sampler: SamplerKind,
    #[command(flatten)]
    rbm: RbmArgs,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Scheme2Args {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "rbm,knn,nb")]
    classifiers: Vec<ClassifierArg>,
    /// Generators: `cd` trains by CD and samples by Gibbs, `qa` trains and
    /// samples with the annealer.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "cd,qa")]
    variants: Vec<VariantArg>,
    #[command(flatten)]
    rbm: RbmArgs,
    #[arg(long, default_value_t = DEFAULT_GIBBS_CYCLES, value_parser = positive_usize)]
    cycles: usize,
    /// Records sampled per generation round.
    #[arg(long, default_value_t = 2000, value_parser = positive_usize)]
    gen_batch: usize,
    #[arg(long, default_value_t = 20, value_parser = positive_usize)]
    max_rounds: usize,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    generation_csv: Option<PathBuf>,
}

fn positive_usize(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

fn positive_f64(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e: std::num::ParseFloatError| e.to_string())?;
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err("must be a positive finite number".into())
    }
}

fn non_negative_f64(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e: std::num::ParseFloatError| e.to_string())?;
    if x >= 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err("must be a non-negative finite number".into())
    }
}

/// An error with the exit status it maps to.
struct Failure {
    code: u8,
    error: Error,
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        let code = if error.is_divergence() {
            4
        } else if matches!(error, Error::Config(_)) {
            2
        } else if error.is_data_error() {
            3
        } else {
            1
        };
        Failure { code, error }
    }
}

/// Failures while reading inputs are data errors whatever their kind.
fn input(error: Error) -> Failure {
    Failure { code: 3, error }
}

type CliResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: could not start {n} worker threads: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match cli.command {
        Command::Fixture(a) => fixture(a),
        Command::Train(a) => train(a),
        Command::Generate(a) => generate(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Scheme1(a) => scheme1(a),
        Command::Scheme2(a) => scheme2(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn write_text(path: &Path, text: &str) -> qrbm::Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn describe(ds: &Dataset) -> String {
    let counts = ds.counts();
    format!(
        "{} records (benign {}, attack {}, indeterminate {})",
        ds.len(),
        counts.get(ClassLabel::Benign),
        counts.get(ClassLabel::Attack),
        counts.get(ClassLabel::Indeterminate)
    )
}

fn fixture(a: FixtureArgs) -> CliResult {
    let ds = imbalanced_fixture(&FixtureConfig {
        records: a.records,
        minority_fraction: a.minority,
        overlap: a.overlap,
        noise: a.noise,
        seed: a.seed,
    })?;
    ds.write(&a.out)?;
    println!("wrote {} to {}", describe(&ds), a.out.display());
    Ok(())
}

fn train(a: TrainArgs) -> CliResult {
    let ds = load_binary_table(&a.data, a.skip_header).map_err(input)?;
    println!("data: {}", describe(&ds));
    let trainer = a.rbm.trainer(a.sampler, 50);
    let outcome = trainer.fit(ds.records(), a.seed)?;
    if let Some(ll) = outcome.initial_log_likelihood {
        println!("initial log-likelihood {ll:.6}");
    }
    for e in &outcome.log {
        let ll = e.log_likelihood.map_or("n/a".to_string(), |ll| format!("{ll:.6}"));
        println!(
            "epoch {:>4}  recon {:.6}  log-likelihood {}  time {:.3}s",
            e.epoch,
            e.reconstruction_error,
            ll,
            e.elapsed.as_secs_f64()
        );
    }
    if outcome.stopped_early {
        println!("stopped early after {} epochs", outcome.log.len());
    }
    save_model(&outcome.params, &a.out)?;
    println!("wrote model to {}", a.out.display());
    Ok(())
}

fn generate(a: GenerateArgs) -> CliResult {
    let params = load_model(&a.model).map_err(input)?;
    let method = match a.method {
        MethodKind::Gibbs => GenerationMethod::Gibbs { cycles: a.cycles },
        MethodKind::Annealer => GenerationMethod::Annealer {
            scale_s: a.scale_s,
            sweeps: a.sweeps,
        },
    };
    let records = generate_synthetic(&params, method, a.count, &mut rng::seeded(a.seed))?;
    let ds = Dataset::new(params.n_visible(), records)?;
    match &a.out {
        Some(path) => {
            ds.write(path)?;
            println!("wrote {} to {}", describe(&ds), path.display());
        }
        None => print!("{}", ds.to_text()),
    }
    Ok(())
}

fn evaluate(a: EvaluateArgs) -> CliResult {
    let params = load_model(&a.model).map_err(input)?;
    let ds = load_binary_table(&a.data, a.skip_header).map_err(input)?;
    if ds.width() != params.n_visible() {
        return Err(input(Error::Dimension {
            what: "record width",
            expected: params.n_visible(),
            found: ds.width(),
        }));
    }
    let preds = (0..ds.len())
        .map(|i| match a.mode {
            InferenceMode::FreeEnergy => rbm_classify(&params, ds.features(i)).map(|d| d.label),
            InferenceMode::Reconstruction => rbm_classify_reconstruction(&params, ds.features(i)),
        })
        .collect::<qrbm::Result<Vec<_>>>()?;
    let truth = ds.labels();
    println!("data: {}", describe(&ds));
    let attack = confusion(&preds, &truth, ClassLabel::Attack)?;
    let benign = attack.swapped();
    println!("accuracy {}%", format_metric(&attack.accuracy(), 2));
    println!("{:<8} {:>9} {:>9} {:>9}", "class", "precision", "recall", "f1");
    for (name, m) in [("attack", &attack), ("benign", &benign)] {
        println!(
            "{:<8} {:>9} {:>9} {:>9}",
            name,
            format_metric(&m.precision(), 4),
            format_metric(&m.recall(), 4),
            format_metric(&m.f1(), 4)
        );
    }
    println!("confusion (attack positive): {attack}");
    let unlabelled = preds.iter().filter(|&&p| p == ClassLabel::Indeterminate).count();
    if unlabelled > 0 {
        println!("indeterminate predictions {unlabelled}");
    }
    Ok(())
}

/// Stream of `--seed` reserved for the test split; the experiments derive
/// their own sub-seeds from the low stream numbers.
const SPLIT_STREAM: u64 = u64::MAX;

/// Loads, optionally dedupes and splits the experiment data.
fn prepare(s: &SourceArgs) -> Result<(Dataset, Dataset), Failure> {
    let ds = match &s.data {
        Some(path) => {
            let ds = load_binary_table(path, s.skip_header).map_err(input)?;
            println!("data: {} from {}", describe(&ds), path.display());
            ds
        }
        None => {
            let ds = imbalanced_fixture(&FixtureConfig::default())?;
            println!("data: bundled fixture, {}", describe(&ds));
            ds
        }
    };
    let ds = if s.dedupe {
        let (unique, removed) = dedupe(&ds);
        println!("dedupe: removed {removed} repeated records");
        unique
    } else {
        ds
    };
    let (train, test) = match &s.test {
        Some(path) => {
            let test = load_binary_table(path, s.skip_header).map_err(input)?;
            if test.width() != ds.width() {
                return Err(input(Error::Dimension {
                    what: "test record width",
                    expected: ds.width(),
                    found: test.width(),
                }));
            }
            (ds, test)
        }
        None => {
            let split = split_train_test(
                &ds,
                s.test_per_class,
                s.test_per_class,
                &mut rng::derive(s.seed, SPLIT_STREAM),
            )
            .map_err(input)?;
            (split.train, split.test)
        }
    };
    println!("train: {}", describe(&train));
    println!("test: {}", describe(&test));
    Ok((train, test))
}

fn scheme1(a: Scheme1Args) -> CliResult {
    let (train, test) = prepare(&a.source)?;
    let settings = Scheme1Settings {
        n_parts: a.parts,
        classifier: a.classifier.into(),
        trainer: a.rbm.trainer(a.sampler, 100),
        seed: a.source.seed,
    };
    let report = run_scheme1(&train, &test, &settings)?;
    println!();
    print!("{}", report.to_text());
    if let Some(path) = &a.csv {
        write_text(path, &report.to_csv())?;
    }
    Ok(())
}

/// Drops repeats, keeping first occurrences in order.
fn unique<T: Copy + PartialEq>(items: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(items.len());
    for &x in items {
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

fn scheme2(a: Scheme2Args) -> CliResult {
    let (train, test) = prepare(&a.source)?;
    let classifiers: Vec<ClassifierKind> = unique(&a.classifiers).into_iter().map(Into::into).collect();
    let variants = unique(&a.variants)
        .into_iter()
        .map(|v| match v {
            VariantArg::Cd => GenerationVariant {
                label: "CD-bal".into(),
                trainer: a.rbm.trainer(SamplerKind::Cd, 100),
                method: GenerationMethod::Gibbs { cycles: a.cycles },
            },
            VariantArg::Qa => GenerationVariant {
                label: "QA-bal".into(),
                trainer: a.rbm.trainer(SamplerKind::Annealer, 100),
                method: GenerationMethod::Annealer {
                    scale_s: a.rbm.scale_s,
                    sweeps: a.rbm.sweeps,
                },
            },
        })
        .collect();
    let settings = Scheme2Settings {
        variants,
        classifiers,
        classifier_trainer: a.rbm.trainer(SamplerKind::Cd, 100),
        generation_batch: a.gen_batch,
        max_generation_rounds: a.max_rounds,
        seed: a.source.seed,
    };
    let report = run_scheme2(&train, &test, &settings)?;
    println!();
    print!("{}", report.to_text());
    if let Some(path) = &a.csv {
        write_text(path, &report.to_csv())?;
    }
    if let Some(path) = &a.generation_csv {
        write_text(path, &report.generation_csv())?;
    }
    Ok(())
}
