//! The `gesture` command line.
//!
//! Every command writes a `run.json` provenance record holding the fully
//! resolved command. `gesture replay run.json` re-executes it.
//!
//! | exit code | meaning                                             |
//! |-----------|-----------------------------------------------------|
//! | 0         | success                                             |
//! | 2         | usage error (bad flags or flag combinations)        |
//! | 3         | data error (I/O, parse, dataset or model files)     |
//! | 4         | numeric error (singular system, length mismatch)    |

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::classifiers::{load_model, save_model, ClassifierKind, ClassifierSpec, Predictor};
use crate::data::{load_manifest, load_tree, load_uwave_tree, write_manifest, AdapterConfig, Dataset, DatasetMeta};
use crate::error::{Error, ErrorKind, Result};
use crate::evaluation::{
    measure_classify_times, render_summary, run_mode, write_artifacts, Mode, ModeSummary, TimingConfig, DEFAULT_RATIO,
};
use crate::features::{extract_all, FeatureMatrix};
use crate::synth::{generate_to_dir, SynthSpec};

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_DATA: u8 = 3;
pub const EXIT_NUMERIC: u8 = 4;

#[derive(Parser, Debug, Clone, Serialize, Deserialize)]
#[command(name = "gesture", version, about = "Accelerometer gesture recognition: ingest, features, train, eval, bench, synth")]
pub struct Cli {
    /// Worker threads (1 = fully serial).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    #[serde(skip)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Convert a raw corpus tree (or a canonical manifest) into the canonical layout.
    Ingest(IngestArgs),
    /// Extract the 33-value feature CSV from a manifest.
    Features(FeaturesArgs),
    /// Fit one classifier on every row and save the model.
    Train(TrainArgs),
    /// Evaluate classifiers under the end-user modes.
    Eval(EvalArgs),
    /// Time per-sample classification of saved models.
    Bench(BenchArgs),
    /// Generate a synthetic corpus.
    Synth(SynthArgs),
    /// Re-run the command recorded in a run.json.
    Replay(ReplayArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdapterName {
    Uwave,
    Sony,
    Canonical,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct IngestArgs {
    #[arg(long, value_enum, required_unless_present = "adapter_config")]
    pub adapter: Option<AdapterName>,
    /// TOML adapter description; replaces the built-in uwave/sony adapters.
    #[arg(long, conflicts_with = "adapter")]
    pub adapter_config: Option<PathBuf>,
    /// Corpus root, or a manifest (or its directory) for `canonical`.
    #[arg(long)]
    pub input: PathBuf,
    /// Output directory for manifest.csv and samples/.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct FeaturesArgs {
    /// Canonical manifest (file or directory).
    #[arg(long)]
    pub input: PathBuf,
    /// Output CSV path.
    #[arg(long)]
    pub out: PathBuf,
}

/// Classifier hyperparameter overrides; a flag the chosen classifier does not
/// have is a usage error.
#[derive(Args, Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct HyperArgs {
    /// ET: number of trees.
    #[arg(long)]
    pub n_trees: Option<usize>,
    /// ET: candidate features per split.
    #[arg(long)]
    pub k_features: Option<usize>,
    /// ET, GB: smallest node that may be split.
    #[arg(long)]
    pub min_samples_split: Option<usize>,
    /// GB: boosting stages.
    #[arg(long)]
    pub n_stages: Option<usize>,
    /// GB: shrinkage.
    #[arg(long)]
    pub learning_rate: Option<f64>,
    /// GB: regression tree depth.
    #[arg(long)]
    pub max_depth: Option<usize>,
    /// RC: L2 penalty.
    #[arg(long)]
    pub alpha: Option<f64>,
}

impl HyperArgs {
    fn flags(&self) -> Vec<(&'static str, bool, [bool; 3])> {
        // (flag, given, applies to [ET, GB, RC])
        vec![
            ("--n-trees", self.n_trees.is_some(), [true, false, false]),
            ("--k-features", self.k_features.is_some(), [true, false, false]),
            ("--min-samples-split", self.min_samples_split.is_some(), [true, true, false]),
            ("--n-stages", self.n_stages.is_some(), [false, true, false]),
            ("--learning-rate", self.learning_rate.is_some(), [false, true, false]),
            ("--max-depth", self.max_depth.is_some(), [false, true, false]),
            ("--alpha", self.alpha.is_some(), [false, false, true]),
        ]
    }

    /// Defaults for `kind` with the overrides applied. With `strict`, flags that
    /// do not belong to `kind` are rejected.
    pub fn resolve(&self, kind: ClassifierKind, seed: u64, strict: bool) -> Result<ClassifierSpec> {
        let slot = ClassifierKind::ALL.iter().position(|&k| k == kind).expect("known kind");
        if strict {
            if let Some((flag, ..)) = self.flags().into_iter().find(|(_, given, applies)| *given && !applies[slot]) {
                return Err(Error::InvalidInput(format!("{flag} does not apply to classifier {}", kind.short_name())));
            }
        }
        let mut spec = ClassifierSpec::default_for(kind, seed);
        match &mut spec {
            ClassifierSpec::ExtraTrees(p) => {
                p.n_trees = self.n_trees.unwrap_or(p.n_trees);
                p.k_features = self.k_features.unwrap_or(p.k_features);
                p.min_samples_split = self.min_samples_split.unwrap_or(p.min_samples_split);
            }
            ClassifierSpec::GradientBoosting(p) => {
                p.n_stages = self.n_stages.unwrap_or(p.n_stages);
                p.learning_rate = self.learning_rate.unwrap_or(p.learning_rate);
                p.max_depth = self.max_depth.unwrap_or(p.max_depth);
                p.min_samples_split = self.min_samples_split.unwrap_or(p.min_samples_split);
            }
            ClassifierSpec::Ridge(p) => {
                p.alpha = self.alpha.unwrap_or(p.alpha);
            }
        }
        Ok(spec)
    }
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct TrainArgs {
    /// Manifest or feature CSV.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub classifier: ClassifierKind,
    #[command(flatten)]
    pub hyper: HyperArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output model path (JSON).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct EvalArgs {
    /// Manifest or feature CSV.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, required_unless_present = "all", conflicts_with = "all")]
    pub mode: Option<Mode>,
    #[arg(long, required_unless_present = "all", conflicts_with = "all")]
    pub classifier: Option<ClassifierKind>,
    /// Run every mode × classifier cell.
    #[arg(long)]
    pub all: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Train fraction for user-dependent and mixed-user splits (default 0.75).
    #[arg(long)]
    pub ratio: Option<f64>,
    #[command(flatten)]
    pub hyper: HyperArgs,
    /// Timed single-sample predictions per model (at least 100).
    #[arg(long, default_value_t = 200)]
    pub reps: usize,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct BenchArgs {
    /// Saved model; repeat for several.
    #[arg(long = "model", required = true)]
    pub models: Vec<PathBuf>,
    /// Feature CSV (or manifest) whose rows are classified.
    #[arg(long)]
    pub features: PathBuf,
    #[arg(long, default_value_t = 1000)]
    pub reps: usize,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct SynthArgs {
    #[arg(long)]
    pub users: Option<u32>,
    #[arg(long)]
    pub gestures: Option<u32>,
    /// Samples per gesture per user.
    #[arg(long)]
    pub samples: Option<u32>,
    #[arg(long)]
    pub min_len: Option<usize>,
    #[arg(long)]
    pub max_len: Option<usize>,
    #[arg(long)]
    pub jitter: Option<f64>,
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long)]
    pub style: Option<f64>,
    /// Defaults to the easy preset's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

impl SynthArgs {
    /// The easy preset with the given overrides.
    pub fn spec(&self) -> SynthSpec {
        let e = SynthSpec::easy();
        SynthSpec {
            users: self.users.unwrap_or(e.users),
            gestures: self.gestures.unwrap_or(e.gestures),
            samples_per_gesture_per_user: self.samples.unwrap_or(e.samples_per_gesture_per_user),
            length_range: (self.min_len.unwrap_or(e.length_range.0), self.max_len.unwrap_or(e.length_range.1)),
            user_speed_jitter: self.jitter.unwrap_or(e.user_speed_jitter),
            noise_sigma: self.noise.unwrap_or(e.noise_sigma),
            user_style_offset: self.style.unwrap_or(e.user_style_offset),
            seed: self.seed.unwrap_or(e.seed),
        }
    }
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ReplayArgs {
    pub run: PathBuf,
    /// Write to this location instead of the recorded one.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// What `run.json` holds.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub tool: String,
    pub version: String,
    pub jobs: Option<usize>,
    pub command: Command,
}

/// Parses `args`, runs the command and maps the outcome to an exit code.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

pub fn exit_code(e: &Error) -> u8 {
    match e.kind() {
        ErrorKind::Usage => EXIT_USAGE,
        ErrorKind::Data => EXIT_DATA,
        ErrorKind::Numeric => EXIT_NUMERIC,
    }
}

/// Runs a parsed command inside a pool of `--jobs` workers.
pub fn run(cli: &Cli) -> Result<()> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(Error::InvalidInput("--jobs must be at least 1".into()));
        }
        builder = builder.num_threads(jobs);
    }
    let pool = builder.build().map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| execute(&cli.command, cli.jobs))
}

fn execute(command: &Command, jobs: Option<usize>) -> Result<()> {
    match command {
        Command::Ingest(a) => ingest(a, jobs),
        Command::Features(a) => features(a, jobs),
        Command::Train(a) => train(a, jobs),
        Command::Eval(a) => eval(a, jobs),
        Command::Bench(a) => bench(a, jobs),
        Command::Synth(a) => synth(a, jobs),
        Command::Replay(a) => replay(a),
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn record(command: &Command, jobs: Option<usize>, path: &Path) -> Result<()> {
    let rec = RunRecord {
        tool: "gesture".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        jobs,
        command: command.clone(),
    };
    write_text(path, &serde_json::to_string_pretty(&rec).expect("run record serializes"))
}

/// `dir/run.json` for directory outputs, `file.run.json` beside file outputs.
fn record_path_for_file(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".run.json");
    out.with_file_name(name)
}

fn manifest_path(input: &Path) -> PathBuf {
    if input.is_dir() {
        input.join("manifest.csv")
    } else {
        input.to_path_buf()
    }
}

/// Loads a manifest or a feature CSV, telling them apart by the header.
pub fn load_matrix(input: &Path) -> Result<FeatureMatrix> {
    let path = manifest_path(input);
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let header = text.lines().next().unwrap_or("").trim();
    if header.starts_with("user,gesture,trial") {
        let dataset = load_manifest(&path)?;
        log::info!("{}: {}", path.display(), dataset.meta());
        extract_all(&dataset)
    } else if header.starts_with("user,gesture,f01") {
        FeatureMatrix::parse_csv(&text, &path)
    } else {
        Err(Error::parse(&path, 1, "neither a manifest nor a feature CSV header"))
    }
}

fn ingest(a: &IngestArgs, jobs: Option<usize>) -> Result<()> {
    let dataset: Dataset = match (&a.adapter_config, a.adapter) {
        (Some(cfg), _) => load_tree(&a.input, &AdapterConfig::load(cfg)?)?,
        (None, Some(AdapterName::Uwave)) => load_uwave_tree(&a.input)?,
        (None, Some(AdapterName::Sony)) => {
            let d = load_tree(&a.input, &AdapterConfig::sony())?;
            if d.meta().users == DatasetMeta::SONY.users {
                d.cross_check(&DatasetMeta::SONY);
            }
            d
        }
        (None, Some(AdapterName::Canonical)) => load_manifest(manifest_path(&a.input))?,
        (None, None) => return Err(Error::InvalidInput("--adapter or --adapter-config is required".into())),
    };
    let manifest = write_manifest(&dataset, &a.out)?;
    record(&Command::Ingest(a.clone()), jobs, &a.out.join("run.json"))?;
    println!("{}", dataset.meta());
    log::info!("wrote {}", manifest.display());
    Ok(())
}

fn features(a: &FeaturesArgs, jobs: Option<usize>) -> Result<()> {
    let dataset = load_manifest(manifest_path(&a.input))?;
    let matrix = extract_all(&dataset)?;
    write_text(&a.out, &matrix.to_csv_string())?;
    record(&Command::Features(a.clone()), jobs, &record_path_for_file(&a.out))?;
    println!("{} rows written to {}", matrix.len(), a.out.display());
    Ok(())
}

fn train(a: &TrainArgs, jobs: Option<usize>) -> Result<()> {
    let spec = a.hyper.resolve(a.classifier, a.seed, true)?;
    let matrix = load_matrix(&a.input)?;
    let model = spec.fit(&matrix.rows, &matrix.labels)?;
    let predicted = model.predict_batch(&matrix.rows)?;
    let correct = predicted.iter().zip(&matrix.labels).filter(|(p, y)| p == y).count();
    if let Some(parent) = a.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    save_model(&model, &a.out)?;
    record(&Command::Train(a.clone()), jobs, &record_path_for_file(&a.out))?;
    println!(
        "{} trained on {} rows; training accuracy {:.2} %",
        spec.kind().short_name(),
        matrix.len(),
        100.0 * correct as f64 / matrix.len().max(1) as f64
    );
    Ok(())
}

fn mode_dir_name(kind: ClassifierKind, mode: Mode) -> String {
    let mode = mode.to_possible_value().expect("no skipped variants").get_name().to_string();
    format!("{}_{mode}", kind.short_name().to_ascii_lowercase())
}

fn eval(a: &EvalArgs, jobs: Option<usize>) -> Result<()> {
    if a.ratio.is_some() && a.mode == Some(Mode::UserIndependent) {
        return Err(Error::InvalidInput("--ratio does not apply to --mode user-independent".into()));
    }
    if a.reps < 100 {
        return Err(Error::InvalidInput(format!("--reps must be at least 100, got {}", a.reps)));
    }
    let ratio = a.ratio.unwrap_or(DEFAULT_RATIO);
    let cells: Vec<(ClassifierKind, Mode)> = if a.all {
        ClassifierKind::ALL.iter().flat_map(|&k| Mode::ALL.iter().map(move |&m| (k, m))).collect()
    } else {
        vec![(a.classifier.expect("clap requires it"), a.mode.expect("clap requires it"))]
    };
    // validate every spec before any work starts
    let specs: Vec<ClassifierSpec> =
        cells.iter().map(|&(k, _)| a.hyper.resolve(k, a.seed, !a.all)).collect::<Result<_>>()?;
    let matrix = load_matrix(&a.input)?;
    let timing = TimingConfig { reps: a.reps, ..TimingConfig::default() };

    let mut summaries = Vec::with_capacity(cells.len());
    for (&(kind, mode), spec) in cells.iter().zip(&specs) {
        log::info!("evaluating {} {:?}", kind.short_name(), mode);
        let summary = run_mode(&matrix, mode, ratio, a.seed, spec, &timing)?;
        let dir = if a.all { a.out.join(mode_dir_name(kind, mode)) } else { a.out.clone() };
        write_artifacts(&summary, &dir)?;
        write_text(&dir.join("summary.txt"), &render_summary(&summary))?;
        summaries.push(summary);
    }
    record(&Command::Eval(a.clone()), jobs, &a.out.join("run.json"))?;
    if a.all {
        let (csv, table) = grid_tables(&summaries);
        write_text(&a.out.join("grid.csv"), &csv)?;
        write_text(&a.out.join("summary.txt"), &table)?;
        print!("{table}");
    } else {
        print!("{}", render_summary(&summaries[0]));
    }
    Ok(())
}

/// Accuracy and time per classifier × mode, as CSV and as an aligned table.
pub fn grid_tables(summaries: &[ModeSummary]) -> (String, String) {
    let mut csv = String::from("classifier,mode,accuracy,mean_classify_time_s\n");
    for s in summaries {
        let _ = writeln!(csv, "{},{},{:.2},{:e}", s.classifier, s.mode.short_name(), s.average_accuracy, s.mean_classify_time_s);
    }
    let mut table = format!("{:<6}", "");
    for m in Mode::ALL {
        let _ = write!(table, "{:>10}{:>13}", format!("{} Acc", m.short_name()), "Time (s)");
    }
    table.push('\n');
    let mut names: Vec<&str> = summaries.iter().map(|s| s.classifier.as_str()).collect();
    names.dedup();
    for name in names {
        let _ = write!(table, "{name:<6}");
        for m in Mode::ALL {
            match summaries.iter().find(|s| s.classifier == name && s.mode == m) {
                Some(s) => {
                    let _ = write!(table, "{:>10.2}{:>13.3e}", s.average_accuracy, s.mean_classify_time_s);
                }
                None => {
                    let _ = write!(table, "{:>10}{:>13}", "-", "-");
                }
            }
        }
        table.push('\n');
    }
    (csv, table)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchEntry {
    pub model: PathBuf,
    pub classifier: String,
    pub mean_classify_time_s: f64,
    pub accuracy: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchReport {
    pub reps: usize,
    pub rows: usize,
    pub entries: Vec<BenchEntry>,
    /// Whether RC < GB < ET held; present when all three kinds were timed.
    pub ordering_rc_gb_et: Option<bool>,
}

/// `Some(true)` when the Ridge, Boosting and Extra Trees times are strictly increasing.
pub fn ordering_holds(entries: &[(ClassifierKind, f64)]) -> Option<bool> {
    let time = |k: ClassifierKind| {
        entries.iter().filter(|e| e.0 == k).map(|e| e.1).fold(None, |acc: Option<f64>, t| Some(acc.map_or(t, |a| a.min(t))))
    };
    let (rc, gb, et) =
        (time(ClassifierKind::Ridge)?, time(ClassifierKind::GradientBoosting)?, time(ClassifierKind::ExtraTrees)?);
    Some(rc < gb && gb < et)
}

fn bench(a: &BenchArgs, jobs: Option<usize>) -> Result<()> {
    let matrix = load_matrix(&a.features)?;
    if matrix.is_empty() {
        return Err(Error::InvalidInput(format!("{} has no rows to classify", a.features.display())));
    }
    let models = a.models.iter().map(load_model).collect::<Result<Vec<_>>>()?;
    let timing = TimingConfig { reps: a.reps.max(100), ..TimingConfig::default() };
    let refs: Vec<&dyn Predictor> = models.iter().map(|m| m as &dyn Predictor).collect();
    let times = measure_classify_times(&refs, &matrix.rows, &timing)?;
    let mut entries = Vec::with_capacity(models.len());
    for ((path, model), time) in a.models.iter().zip(&models).zip(times) {
        let predicted = model.predict_batch(&matrix.rows)?;
        let correct = predicted.iter().zip(&matrix.labels).filter(|(p, y)| p == y).count();
        entries.push(BenchEntry {
            model: path.clone(),
            classifier: model.kind().short_name().into(),
            mean_classify_time_s: time,
            accuracy: 100.0 * correct as f64 / matrix.len() as f64,
        });
    }
    let kinds: Vec<(ClassifierKind, f64)> =
        models.iter().zip(&entries).map(|(m, e)| (m.kind(), e.mean_classify_time_s)).collect();
    let report = BenchReport { reps: timing.reps, rows: matrix.len(), entries, ordering_rc_gb_et: ordering_holds(&kinds) };

    let mut text = format!("{:<4} {:>14} {:>9}  model\n", "clf", "time (s)", "acc %");
    for e in &report.entries {
        let _ = writeln!(text, "{:<4} {:>14.4e} {:>9.2}  {}", e.classifier, e.mean_classify_time_s, e.accuracy, e.model.display());
    }
    if let Some(holds) = report.ordering_rc_gb_et {
        let _ = writeln!(text, "RC < GB < ET: {}", if holds { "holds" } else { "violated" });
    }
    write_text(&a.out.join("bench.json"), &serde_json::to_string_pretty(&report).expect("report serializes"))?;
    write_text(&a.out.join("summary.txt"), &text)?;
    record(&Command::Bench(a.clone()), jobs, &a.out.join("run.json"))?;
    print!("{text}");
    Ok(())
}

fn synth(a: &SynthArgs, jobs: Option<usize>) -> Result<()> {
    let spec = a.spec();
    generate_to_dir(&spec, &a.out)?;
    write_text(&a.out.join("synth_spec.json"), &serde_json::to_string_pretty(&spec).expect("spec serializes"))?;
    record(&Command::Synth(a.clone()), jobs, &a.out.join("run.json"))?;
    println!("{} samples written to {}", spec.total_samples(), a.out.display());
    Ok(())
}

fn replay(a: &ReplayArgs) -> Result<()> {
    let text = std::fs::read_to_string(&a.run).map_err(|e| Error::io(&a.run, e))?;
    let rec: RunRecord =
        serde_json::from_str(&text).map_err(|e| Error::parse(&a.run, e.line(), e.to_string()))?;
    let mut command = rec.command;
    if let Some(out) = &a.out {
        match &mut command {
            Command::Ingest(c) => c.out = out.clone(),
            Command::Features(c) => c.out = out.clone(),
            Command::Train(c) => c.out = out.clone(),
            Command::Eval(c) => c.out = out.clone(),
            Command::Bench(c) => c.out = out.clone(),
            Command::Synth(c) => c.out = out.clone(),
            Command::Replay(_) => {}
        }
    }
    if matches!(command, Command::Replay(_)) {
        return Err(Error::InvalidInput("a run record cannot hold another replay".into()));
    }
    run(&Cli { jobs: rec.jobs, verbose: 0, command })
}
