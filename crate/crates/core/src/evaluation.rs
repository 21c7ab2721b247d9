//! End-user modes, accuracy, confusion matrices and classification timing.
//!
//! * **User-dependent**: each user's rows are split into train and test on their own.
//! * **Mixed-user**: all rows are pooled and split once.
//! * **User-independent**: leave-one-user-out, one fold per user.
//!
//! Splits are stratified per gesture. Each gesture contributes
//! `⌊ratio·count⌋` or `⌈ratio·count⌉` training rows. The total is
//! `⌈ratio·N⌉`, with the extra rows going to the lowest gesture labels
//! that have a fractional share.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::hint::black_box;
use std::path::Path;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifiers::{ClassifierSpec, Predictor};
use crate::error::{Error, Result};
use crate::features::{FeatureMatrix, FeatureVector};

pub const DEFAULT_RATIO: f64 = 0.75;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    UserDependent,
    #[value(alias = "mixed-user")]
    Mixed,
    UserIndependent,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::UserDependent, Mode::Mixed, Mode::UserIndependent];

    pub fn short_name(&self) -> &'static str {
        match self {
            Mode::UserDependent => "U_D",
            Mode::Mixed => "U_M",
            Mode::UserIndependent => "U_I",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub mode: Mode,
    /// Scope user (user-dependent) or held-out user (user-independent).
    pub user: Option<u32>,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub seed: u64,
    pub ratio: Option<f64>,
}

fn check_ratio(ratio: f64) -> Result<()> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::InvalidInput(format!("train ratio must be strictly between 0 and 1, got {ratio}")));
    }
    Ok(())
}

/// Stratified split of `scope` (row indices) by gesture label.
fn stratified_split(matrix: &FeatureMatrix, scope: &[usize], ratio: f64, rng: &mut ChaCha8Rng) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut by_label: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for &i in scope {
        by_label.entry(matrix.labels[i]).or_default().push(i);
    }
    for (label, rows) in &by_label {
        if rows.len() < 2 {
            return Err(Error::InvalidInput(format!("gesture {label} has {} sample(s) in scope, need at least 2", rows.len())));
        }
    }
    let shares: Vec<(usize, bool)> = by_label
        .values()
        .map(|rows| {
            let exact = ratio * rows.len() as f64;
            let floor = (exact + 1e-9).floor();
            (floor as usize, exact - floor > 1e-9)
        })
        .collect();
    let target = (ratio * scope.len() as f64 - 1e-9).ceil() as usize;
    let mut extra = target.saturating_sub(shares.iter().map(|s| s.0).sum());

    let (mut train, mut test) = (Vec::new(), Vec::new());
    for ((_, rows), (floor, fractional)) in by_label.iter().zip(shares) {
        let mut n_train = floor;
        if fractional && extra > 0 {
            n_train += 1;
            extra -= 1;
        }
        let mut rows = rows.clone();
        rows.shuffle(rng);
        train.extend_from_slice(&rows[..n_train]);
        test.extend_from_slice(&rows[n_train..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    if test.is_empty() || train.is_empty() {
        return Err(Error::InvalidInput(format!("ratio {ratio} leaves an empty train or test set")));
    }
    Ok((train, test))
}

fn split_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Train/test split inside one user's rows.
pub fn plan_user_dependent(matrix: &FeatureMatrix, user: u32, ratio: f64, seed: u64) -> Result<SplitPlan> {
    check_ratio(ratio)?;
    let scope: Vec<usize> = (0..matrix.len()).filter(|&i| matrix.users[i] == user).collect();
    if scope.is_empty() {
        return Err(Error::InvalidInput(format!("unknown user {user}")));
    }
    let (train, test) = stratified_split(matrix, &scope, ratio, &mut split_rng(seed, user as u64))?;
    Ok(SplitPlan { mode: Mode::UserDependent, user: Some(user), train, test, seed, ratio: Some(ratio) })
}

/// Pooled train/test split across all users.
pub fn plan_mixed(matrix: &FeatureMatrix, ratio: f64, seed: u64) -> Result<SplitPlan> {
    check_ratio(ratio)?;
    let scope: Vec<usize> = (0..matrix.len()).collect();
    let (train, test) = stratified_split(matrix, &scope, ratio, &mut split_rng(seed, 0))?;
    Ok(SplitPlan { mode: Mode::Mixed, user: None, train, test, seed, ratio: Some(ratio) })
}

/// Leave-one-user-out folds in ascending user order.
pub fn plan_user_independent(matrix: &FeatureMatrix) -> Result<Vec<SplitPlan>> {
    let users = matrix.user_ids();
    if users.len() < 2 {
        return Err(Error::InvalidInput(format!("leave-one-user-out needs at least 2 users, got {}", users.len())));
    }
    Ok(users
        .iter()
        .map(|&u| {
            let (test, train): (Vec<usize>, Vec<usize>) = (0..matrix.len()).partition(|&i| matrix.users[i] == u);
            SplitPlan { mode: Mode::UserIndependent, user: Some(u), train, test, seed: 0, ratio: None }
        })
        .collect())
}

/// Rows are the gesture signed, columns the gesture classified.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub classes: Vec<u32>,
    pub counts: Vec<Vec<u64>>,
    /// Row-normalized to 100; rows without support are all zero.
    pub percents: Vec<Vec<f64>>,
    /// Classes with no test rows.
    pub empty_rows: Vec<u32>,
}

impl ConfusionMatrix {
    pub fn from_predictions(classes: &[u32], truth: &[u32], predicted: &[u32]) -> Result<Self> {
        if truth.len() != predicted.len() {
            return Err(Error::LengthMismatch { left: truth.len(), right: predicted.len() });
        }
        let mut classes = classes.to_vec();
        classes.extend(truth.iter().chain(predicted));
        classes.sort_unstable();
        classes.dedup();
        let k = classes.len();
        let index = |l: u32| classes.binary_search(&l).expect("label collected above");
        let mut counts = vec![vec![0u64; k]; k];
        for (&t, &p) in truth.iter().zip(predicted) {
            counts[index(t)][index(p)] += 1;
        }
        let mut empty_rows = Vec::new();
        let percents = counts
            .iter()
            .zip(&classes)
            .map(|(row, &label)| {
                let total: u64 = row.iter().sum();
                if total == 0 {
                    empty_rows.push(label);
                    vec![0.0; k]
                } else {
                    row.iter().map(|&c| 100.0 * c as f64 / total as f64).collect()
                }
            })
            .collect();
        Ok(ConfusionMatrix { classes, counts, percents, empty_rows })
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.classes.len()).map(|i| self.counts[i][i]).sum()
    }

    /// Percent correct over all rows.
    pub fn accuracy(&self) -> f64 {
        let total = self.total();
        if total == 0 {
            0.0
        } else {
            100.0 * self.trace() as f64 / total as f64
        }
    }

    /// Element-wise sum of count tables over the same or different label sets.
    pub fn pooled(parts: &[ConfusionMatrix]) -> Self {
        let mut classes: Vec<u32> = parts.iter().flat_map(|c| c.classes.iter().copied()).collect();
        classes.sort_unstable();
        classes.dedup();
        let mut truth = Vec::new();
        let mut predicted = Vec::new();
        for part in parts {
            for (i, row) in part.counts.iter().enumerate() {
                for (j, &c) in row.iter().enumerate() {
                    for _ in 0..c {
                        truth.push(part.classes[i]);
                        predicted.push(part.classes[j]);
                    }
                }
            }
        }
        Self::from_predictions(&classes, &truth, &predicted).expect("equal lengths")
    }

    /// Percent table with header row and column of class labels, 2 decimals.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("signed\\classified");
        for c in &self.classes {
            let _ = write!(out, ",{c}");
        }
        out.push('\n');
        for (label, row) in self.classes.iter().zip(&self.percents) {
            let _ = write!(out, "{label}");
            for v in row {
                let _ = write!(out, ",{v:.2}");
            }
            out.push('\n');
        }
        out
    }

    /// Aligned percent table for terminals.
    pub fn render(&self) -> String {
        let mut out = format!("{:>6}", "");
        for c in &self.classes {
            let _ = write!(out, "{c:>8}");
        }
        out.push('\n');
        for (label, row) in self.classes.iter().zip(&self.percents) {
            let _ = write!(out, "{label:>6}");
            for v in row {
                let _ = write!(out, "{v:>8.2}");
            }
            out.push('\n');
        }
        out
    }
}

/// Something that can be trained into a [`Predictor`].
pub trait Learner: Sync {
    fn name(&self) -> String;

    fn hyperparameters(&self) -> serde_json::Value;

    fn fit(&self, x: &[FeatureVector], y: &[u32]) -> Result<Box<dyn Predictor>>;
}

impl Learner for ClassifierSpec {
    fn name(&self) -> String {
        self.kind().short_name().to_string()
    }

    fn hyperparameters(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("spec serializes")
    }

    fn fit(&self, x: &[FeatureVector], y: &[u32]) -> Result<Box<dyn Predictor>> {
        Ok(Box::new(ClassifierSpec::fit(self, x, y)?))
    }
}

/// Median over `groups` of the mean wall-clock time of single-row predictions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimingConfig {
    /// Total timed predictions (at least 100).
    pub reps: usize,
    pub groups: usize,
}

impl Default for TimingConfig {
    fn default() -> Self {
        TimingConfig { reps: 200, groups: 5 }
    }
}

/// Mean seconds per single-sample prediction, as a median of group means.
/// Rows are cycled through in order. Feature extraction is not included.
pub fn measure_classify_time(model: &dyn Predictor, rows: &[FeatureVector], timing: &TimingConfig) -> Result<f64> {
    Ok(measure_classify_times(&[model], rows, timing)?[0])
}

/// Like [`measure_classify_time`] for several models at once. Their groups are
/// interleaved, so a slow spell on the machine hits every model alike and the
/// comparison between them stays fair.
pub fn measure_classify_times(models: &[&dyn Predictor], rows: &[FeatureVector], timing: &TimingConfig) -> Result<Vec<f64>> {
    if rows.is_empty() {
        return Err(Error::InvalidInput("no rows to time".into()));
    }
    let groups = timing.groups.max(1);
    let per_group = (timing.reps.max(100)).div_ceil(groups);
    // one untimed pass to warm caches
    for model in models {
        for r in rows.iter().take(per_group) {
            black_box(model.predict(black_box(r.as_ref()))?);
        }
    }
    let mut means = vec![Vec::with_capacity(groups); models.len()];
    let mut cursor = 0;
    for _ in 0..groups {
        for (model, out) in models.iter().zip(means.iter_mut()) {
            let mut c = cursor;
            let start = Instant::now();
            for _ in 0..per_group {
                black_box(model.predict(black_box(rows[c].as_ref()))?);
                c = (c + 1) % rows.len();
            }
            out.push(start.elapsed().as_secs_f64() / per_group as f64);
        }
        cursor = (cursor + per_group) % rows.len();
    }
    Ok(means
        .into_iter()
        .map(|mut m| {
            m.sort_by(f64::total_cmp);
            let mid = m.len() / 2;
            let median = if m.len() % 2 == 1 { m[mid] } else { 0.5 * (m[mid - 1] + m[mid]) };
            // clock granularity can round a very fast batch to zero
            median.max(f64::MIN_POSITIVE)
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub mode: Mode,
    pub classifier: String,
    pub hyperparameters: serde_json::Value,
    pub seed: u64,
    pub user: Option<u32>,
    pub accuracy: f64,
    pub per_user_accuracy: Option<BTreeMap<u32, f64>>,
    pub confusion: ConfusionMatrix,
    pub mean_classify_time_s: f64,
    pub n_train: usize,
    pub n_test: usize,
}

impl EvaluationReport {
    /// Equality ignoring the timing field.
    pub fn same_outcome(&self, other: &EvaluationReport) -> bool {
        let mut a = self.clone();
        a.mean_classify_time_s = other.mean_classify_time_s;
        &a == other
    }
}

fn check_plan(matrix: &FeatureMatrix, plan: &SplitPlan) -> Result<()> {
    let n = matrix.len();
    if plan.train.is_empty() || plan.test.is_empty() {
        return Err(Error::InvalidInput("plan has an empty train or test set".into()));
    }
    if plan.train.iter().chain(&plan.test).any(|&i| i >= n) {
        return Err(Error::InvalidInput("plan references rows outside the matrix".into()));
    }
    let train: BTreeSet<usize> = plan.train.iter().copied().collect();
    if plan.test.iter().any(|i| train.contains(i)) {
        return Err(Error::InvalidInput("train and test sets overlap".into()));
    }
    if plan.mode == Mode::UserIndependent {
        let train_users: BTreeSet<u32> = plan.train.iter().map(|&i| matrix.users[i]).collect();
        if plan.test.iter().any(|&i| train_users.contains(&matrix.users[i])) {
            return Err(Error::InvalidInput("user appears on both sides of a leave-one-user-out fold".into()));
        }
    }
    Ok(())
}

/// Fits and scores every plan (fits run on the rayon pool), then times each
/// model one after another on the calling thread.
pub fn evaluate_many(
    matrix: &FeatureMatrix,
    plans: &[SplitPlan],
    learner: &dyn Learner,
    timing: &TimingConfig,
) -> Result<Vec<EvaluationReport>> {
    for plan in plans {
        check_plan(matrix, plan)?;
    }
    let fitted: Vec<(Box<dyn Predictor>, Vec<u32>)> = plans
        .par_iter()
        .map(|plan| {
            let model = learner.fit(&matrix.select_rows(&plan.train), &matrix.select_labels(&plan.train))?;
            let predicted = model.predict_batch(&matrix.select_rows(&plan.test))?;
            Ok((model, predicted))
        })
        .collect::<Result<_>>()?;

    let mut reports = Vec::with_capacity(plans.len());
    for (plan, (model, predicted)) in plans.iter().zip(fitted) {
        let truth = matrix.select_labels(&plan.test);
        let scope_labels: BTreeSet<u32> = plan.train.iter().chain(&plan.test).map(|&i| matrix.labels[i]).collect();
        let confusion =
            ConfusionMatrix::from_predictions(&scope_labels.into_iter().collect::<Vec<_>>(), &truth, &predicted)?;
        let time = measure_classify_time(model.as_ref(), &matrix.select_rows(&plan.test), timing)?;
        reports.push(EvaluationReport {
            mode: plan.mode,
            classifier: learner.name(),
            hyperparameters: learner.hyperparameters(),
            seed: plan.seed,
            user: plan.user,
            accuracy: confusion.accuracy(),
            per_user_accuracy: None,
            confusion,
            mean_classify_time_s: time,
            n_train: plan.train.len(),
            n_test: plan.test.len(),
        });
    }
    Ok(reports)
}

pub fn evaluate(matrix: &FeatureMatrix, plan: &SplitPlan, learner: &dyn Learner, timing: &TimingConfig) -> Result<EvaluationReport> {
    Ok(evaluate_many(matrix, std::slice::from_ref(plan), learner, timing)?.remove(0))
}

/// All reports of one mode plus the per-user view and averages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSummary {
    pub mode: Mode,
    pub classifier: String,
    pub hyperparameters: serde_json::Value,
    pub seed: u64,
    pub ratio: Option<f64>,
    pub reports: Vec<EvaluationReport>,
    /// Mean of the per-report accuracies (the per-user average for user-dependent
    /// and leave-one-user-out runs).
    pub average_accuracy: f64,
    pub per_user_accuracy: Option<BTreeMap<u32, f64>>,
    pub pooled_confusion: ConfusionMatrix,
    pub mean_classify_time_s: f64,
}

/// Runs one mode end to end on `matrix`.
pub fn run_mode(
    matrix: &FeatureMatrix,
    mode: Mode,
    ratio: f64,
    seed: u64,
    learner: &dyn Learner,
    timing: &TimingConfig,
) -> Result<ModeSummary> {
    let plans = match mode {
        Mode::UserDependent => matrix
            .user_ids()
            .into_iter()
            .map(|u| plan_user_dependent(matrix, u, ratio, seed))
            .collect::<Result<Vec<_>>>()?,
        Mode::Mixed => vec![plan_mixed(matrix, ratio, seed)?],
        Mode::UserIndependent => plan_user_independent(matrix)?,
    };
    let reports = evaluate_many(matrix, &plans, learner, timing)?;
    summarize(mode, if mode == Mode::UserIndependent { None } else { Some(ratio) }, seed, reports)
}

fn summarize(mode: Mode, ratio: Option<f64>, seed: u64, reports: Vec<EvaluationReport>) -> Result<ModeSummary> {
    let first = reports.first().ok_or_else(|| Error::InvalidInput("no reports to summarize".into()))?;
    let per_user_accuracy = if mode == Mode::Mixed {
        None
    } else {
        Some(reports.iter().filter_map(|r| r.user.map(|u| (u, r.accuracy))).collect())
    };
    let n = reports.len() as f64;
    Ok(ModeSummary {
        mode,
        classifier: first.classifier.clone(),
        hyperparameters: first.hyperparameters.clone(),
        seed,
        ratio,
        average_accuracy: reports.iter().map(|r| r.accuracy).sum::<f64>() / n,
        per_user_accuracy,
        pooled_confusion: ConfusionMatrix::pooled(&reports.iter().map(|r| r.confusion.clone()).collect::<Vec<_>>()),
        mean_classify_time_s: reports.iter().map(|r| r.mean_classify_time_s).sum::<f64>() / n,
        reports,
    })
}

/// Per-user accuracy rows and their average.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerUserTable {
    pub rows: Vec<(u32, f64)>,
    pub average: f64,
}

impl PerUserTable {
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("user,accuracy\n");
        for (u, a) in &self.rows {
            let _ = writeln!(out, "{u},{a:.2}");
        }
        let _ = writeln!(out, "avg,{:.2}", self.average);
        out
    }
}

/// Builds the per-user table from user-dependent reports covering users `1..=U`.
pub fn per_user_table(reports: &[EvaluationReport]) -> Result<PerUserTable> {
    if reports.is_empty() {
        return Err(Error::InvalidInput("no user-dependent reports".into()));
    }
    let mut rows = Vec::with_capacity(reports.len());
    for r in reports {
        if r.mode != Mode::UserDependent {
            return Err(Error::InvalidInput(format!("expected user-dependent reports, got {:?}", r.mode)));
        }
        let u = r.user.ok_or_else(|| Error::InvalidInput("report without a user".into()))?;
        rows.push((u, r.accuracy));
    }
    rows.sort_by_key(|r| r.0);
    let max_user = rows.last().map(|r| r.0).unwrap_or(0);
    for u in 1..=max_user {
        if rows.binary_search_by_key(&u, |r| r.0).is_err() {
            return Err(Error::InvalidInput(format!("missing report for user {u}")));
        }
    }
    let average = rows.iter().map(|r| r.1).sum::<f64>() / rows.len() as f64;
    Ok(PerUserTable { rows, average })
}

/// `(held-out user, accuracy)` pairs of leave-one-user-out folds, ordered by user.
pub fn crossval_chart_data(fold_reports: &[EvaluationReport]) -> Vec<(u32, f64)> {
    let mut out: Vec<(u32, f64)> =
        fold_reports.iter().filter_map(|r| r.user.map(|u| (u, r.accuracy))).collect();
    out.sort_by_key(|p| p.0);
    out
}

pub fn crossval_csv(points: &[(u32, f64)]) -> String {
    let mut out = String::from("user,accuracy\n");
    for (u, a) in points {
        let _ = writeln!(out, "{u},{a:.2}");
    }
    out
}

/// Writes `report.json`, `confusion.csv` and, where they apply,
/// `per_user.csv` / `crossval.csv` into `dir`.
pub fn write_artifacts(summary: &ModeSummary, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let write = |name: &str, text: String| {
        let p = dir.join(name);
        std::fs::write(&p, text).map_err(|e| Error::io(&p, e))
    };
    write("report.json", serde_json::to_string_pretty(summary).expect("summary serializes"))?;
    write("confusion.csv", summary.pooled_confusion.to_csv_string())?;
    match summary.mode {
        Mode::UserDependent => write("per_user.csv", per_user_table(&summary.reports)?.to_csv_string())?,
        Mode::UserIndependent => write("crossval.csv", crossval_csv(&crossval_chart_data(&summary.reports)))?,
        Mode::Mixed => {}
    }
    Ok(())
}

/// Human-readable summary: accuracy, time and the percent confusion matrix.
pub fn render_summary(summary: &ModeSummary) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "mode {} ({:?})  classifier {}  seed {}",
        summary.mode.short_name(),
        summary.mode,
        summary.classifier,
        summary.seed
    );
    if let Some(per_user) = &summary.per_user_accuracy {
        let _ = writeln!(out, "{:>6} {:>9}", "user", "acc %");
        for (u, a) in per_user {
            let _ = writeln!(out, "{u:>6} {a:>9.2}");
        }
    }
    let _ = writeln!(out, "average accuracy   {:.2} %", summary.average_accuracy);
    let _ = writeln!(out, "classify time      {:.3e} s/sample", summary.mean_classify_time_s);
    let _ = writeln!(out, "confusion (rows signed, columns classified, %):");
    out.push_str(&summary.pooled_confusion.render());
    out
}
