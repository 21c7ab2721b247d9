//! Acceptance suite: one PASS/FAIL/SKIP line per criterion (and per sub-check
//! where a criterion has several). Exits nonzero if anything fails.
//!
//! Criteria 6 and 7 need the real corpora; point `GESTURE_UWAVE_ROOT` and
//! `GESTURE_SONY_ROOT` at the raw trees to enable them.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use common::*;
use gesture_core::classifiers::*;
use gesture_core::data::{load_tree, load_uwave_tree, AdapterConfig, Dataset};
use gesture_core::dsp::{analytic_signal, dft, dft_complex, spectral_energy};
use gesture_core::evaluation::*;
use gesture_core::features::{extract_all, FeatureMatrix, FeatureVector};
use gesture_core::synth::{generate, SynthSpec};
use rand::Rng;

enum Status {
    Pass,
    Fail,
    Skip,
}

struct Line {
    id: String,
    status: Status,
    detail: String,
}

fn check(id: impl Into<String>, ok: bool, detail: impl Into<String>) -> Line {
    Line { id: id.into(), status: if ok { Status::Pass } else { Status::Fail }, detail: detail.into() }
}

fn skip(id: impl Into<String>, detail: impl Into<String>) -> Line {
    Line { id: id.into(), status: Status::Skip, detail: detail.into() }
}

fn within_budget(id: &str, elapsed: Duration, budget: Duration) -> Line {
    check(format!("{id} runtime"), elapsed < budget, format!("{:.2} s (limit {} s)", elapsed.as_secs_f64(), budget.as_secs()))
}

// ---------------------------------------------------------------------------

fn dsp_suite() -> Vec<Line> {
    let start = Instant::now();
    let mut r = rng(1);
    // every prime in range first, then random lengths
    let primes: Vec<usize> = (4..=512).filter(|&n: &usize| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)).collect();
    let mut lengths = primes.clone();
    lengths.extend([4, 5, 511, 512]);
    while lengths.len() < 1000 {
        lengths.push(r.random_range(4..=512));
    }
    let (mut parseval, mut dft_abs, mut dft_scaled, mut neg, mut re) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for &n in &lengths {
        let x = random_series(&mut r, n);
        let energy = o_energy(&x);
        parseval = parseval.max((spectral_energy(&x) - energy).abs() / energy.max(f64::MIN_POSITIVE));
        let scale = x.iter().map(|v| v.abs()).sum::<f64>().max(1.0);
        for (a, b) in dft(&x).iter().zip(naive_dft(&real(&x))) {
            let d = (a.re - b.0).abs().max((a.im - b.1).abs());
            dft_abs = dft_abs.max(d);
            dft_scaled = dft_scaled.max(d / scale);
        }
        let xa = analytic_signal(&x).unwrap();
        re = re.max(xa.iter().zip(&x).map(|(c, v)| (c.re - v).abs()).fold(0.0, f64::max));
        neg = neg.max(dft_complex(&xa)[n / 2 + 1..].iter().map(|c| c.norm()).fold(0.0, f64::max));
    }
    let odd = lengths.iter().filter(|n| *n % 2 == 1).count();
    vec![
        check("1 Parseval", parseval <= 1e-9, format!("max relative error {parseval:.2e} (≤ 1e-9), {} series, {} prime and {odd} odd lengths", lengths.len(), primes.len())),
        check("1 DFT vs naive sum", dft_abs <= 1e-12, format!("max |Δ| {dft_abs:.2e} (≤ 1e-12); relative to Σ|x| {dft_scaled:.2e}")),
        check("1 analytic negative spectrum", neg <= 1e-9, format!("max |X_a[k]|, k > n/2: {neg:.2e} (≤ 1e-9)")),
        check("1 analytic real part", re <= 1e-9, format!("max |re(x_a) - x| {re:.2e} (≤ 1e-9)")),
        within_budget("1", start.elapsed(), Duration::from_secs(30)),
    ]
}

// ---------------------------------------------------------------------------

fn classifier_suite() -> Vec<Line> {
    let start = Instant::now();
    let mut out = Vec::new();

    let mut ridge_err = 0.0f64;
    for seed in 0..10 {
        let (x, y) = random_problem(seed, 40 + 16 * seed as usize, 33, 2 + (seed % 6) as u32);
        let m = RidgeModel::fit(&x, &y, &RidgeParams { alpha: 1.0 }).unwrap();
        for (w, o) in m.weights.iter().zip(ridge_oracle(&x, &y, 1.0)) {
            ridge_err = ridge_err.max(max_abs_diff(w, &o));
        }
    }
    out.push(check("2 ridge vs normal equations", ridge_err <= 1e-8, format!("max |Δw| {ridge_err:.2e} over 10 problems (≤ 1e-8)")));

    let x = vec![
        vec![0.1, 2.0],
        vec![0.4, 1.1],
        vec![0.9, 3.5],
        vec![1.3, 0.2],
        vec![2.2, 2.9],
        vec![2.8, 0.7],
        vec![3.1, 1.6],
        vec![3.9, 3.3],
    ];
    let y = [1u32, 1, 2, 1, 2, 2, 1, 2];
    let params = GbParams { n_stages: 2, learning_rate: 0.1, max_depth: 1, min_samples_split: 2, seed: 0 };
    let gb = GradientBoostingModel::fit(&x, &y, &params).unwrap();
    let encoded: Vec<usize> = y.iter().map(|&l| l as usize - 1).collect();
    let oracle = gb_oracle(&x, &encoded, 2, 2, 0.1, &x);
    let mut gb_err = 0.0f64;
    for (row, expect) in x.iter().zip(&oracle) {
        for (s, o) in gb.staged_scores(row).unwrap().iter().zip(expect) {
            gb_err = gb_err.max(max_abs_diff(s, o));
        }
    }
    out.push(check("2 GB staged scores vs hand-stepped oracle", gb_err <= 1e-10, format!("max |Δ| {gb_err:.2e} (≤ 1e-10)")));

    let (cx, cy) = two_clusters(60);
    let noiseless = extract_all(&generate(&SynthSpec { noise_sigma: 0.0, ..SynthSpec::easy() }).unwrap()).unwrap();
    let nx: Vec<Vec<f64>> = noiseless.rows.iter().map(|r| r.0.to_vec()).collect();
    let mut accs = Vec::new();
    for (name, spec) in [
        ("ET", ClassifierSpec::ExtraTrees(EtParams { n_trees: 25, k_features: 2, ..Default::default() })),
        ("GB", ClassifierSpec::GradientBoosting(GbParams { n_stages: 20, ..Default::default() })),
    ] {
        let m = spec.fit(&cx, &cy).unwrap();
        accs.push((format!("{name} clusters"), training_accuracy(&m, &cx, &cy)));
    }
    for kind in [ClassifierKind::ExtraTrees, ClassifierKind::GradientBoosting] {
        let m = ClassifierSpec::default_for(kind, 0).fit(&nx, &noiseless.labels).unwrap();
        accs.push((format!("{} noiseless synth", kind.short_name()), training_accuracy(&m, &nx, &noiseless.labels)));
    }
    let all_perfect = accs.iter().all(|a| a.1 == 100.0);
    let desc: Vec<String> = accs.iter().map(|(n, a)| format!("{n} {a:.2}%")).collect();
    out.push(check("2 ET/GB separable training accuracy", all_perfect, desc.join(", ")));

    let easy = extract_all(&generate(&SynthSpec::easy()).unwrap()).unwrap();
    let ex: Vec<Vec<f64>> = easy.rows.iter().map(|r| r.0.to_vec()).collect();
    let mut worst_rise = f64::NEG_INFINITY;
    for (rows, labels) in [(&ex, &easy.labels), (&nx, &noiseless.labels)] {
        let m = GradientBoostingModel::fit(rows, labels, &GbParams::default()).unwrap();
        for w in m.train_loss.windows(2) {
            worst_rise = worst_rise.max(w[1] - w[0]);
        }
    }
    out.push(check("2 GB log-loss non-increasing", worst_rise <= 0.0, format!("largest stage-to-stage change {worst_rise:.2e}")));
    out.push(within_budget("2", start.elapsed(), Duration::from_secs(60)));
    out
}

// ---------------------------------------------------------------------------

fn grid_matrix(r: &mut impl Rng) -> FeatureMatrix {
    let users = r.random_range(2..6);
    let gestures = r.random_range(2..7);
    let (mut rows, mut labels, mut us) = (Vec::new(), Vec::new(), Vec::new());
    for u in 1..=users {
        for g in 1..=gestures {
            for _ in 0..r.random_range(2..14) {
                let mut v = [0.0; 33];
                for x in v.iter_mut() {
                    *x = r.random_range(-1.0..1.0) + g as f64 * 0.3;
                }
                rows.push(FeatureVector(v));
                labels.push(g);
                us.push(u);
            }
        }
    }
    FeatureMatrix::new(rows, labels, us).unwrap()
}

fn stratification_ok(m: &FeatureMatrix, scope: &[usize], plan: &SplitPlan, ratio: f64) -> (bool, bool) {
    let train: BTreeSet<usize> = plan.train.iter().copied().collect();
    let test: BTreeSet<usize> = plan.test.iter().copied().collect();
    let partition = train.is_disjoint(&test) && train.union(&test).copied().eq(scope.iter().copied());
    let labels: BTreeSet<u32> = scope.iter().map(|&i| m.labels[i]).collect();
    let strat = labels.iter().all(|&g| {
        let count = scope.iter().filter(|&&i| m.labels[i] == g).count();
        let in_train = plan.train.iter().filter(|&&i| m.labels[i] == g).count();
        let floor = (ratio * count as f64 + 1e-9).floor() as usize;
        in_train == floor || in_train == floor + 1
    });
    (partition, strat)
}

fn evaluation_suite() -> Vec<Line> {
    let start = Instant::now();
    let mut r = rng(3);
    let (mut partition, mut strat, mut leak, mut rows100, mut trace) = (true, true, 0usize, 0.0f64, true);
    let mut determinism = true;
    let timing = TimingConfig { reps: 100, groups: 1 };
    let spec = ClassifierSpec::ExtraTrees(EtParams { n_trees: 10, k_features: 6, min_samples_split: 2, seed: 1 });
    for case in 0..200 {
        let m = grid_matrix(&mut r);
        let ratio = r.random_range(0.2..0.8);
        let seed: u64 = r.random();
        for u in m.user_ids() {
            let scope: Vec<usize> = (0..m.len()).filter(|&i| m.users[i] == u).collect();
            let (p, s) = stratification_ok(&m, &scope, &plan_user_dependent(&m, u, ratio, seed).unwrap(), ratio);
            partition &= p;
            strat &= s;
        }
        let all: Vec<usize> = (0..m.len()).collect();
        let (p, s) = stratification_ok(&m, &all, &plan_mixed(&m, ratio, seed).unwrap(), ratio);
        partition &= p;
        strat &= s;
        for fold in plan_user_independent(&m).unwrap() {
            let held = fold.user.unwrap();
            leak += fold.train.iter().filter(|&&i| m.users[i] == held).count();
            leak += fold.test.iter().filter(|&&i| m.users[i] != held).count();
            partition &= fold.train.len() + fold.test.len() == m.len();
        }
        if case % 10 == 0 {
            for mode in Mode::ALL {
                let a = run_mode(&m, mode, ratio, seed, &spec, &timing).unwrap();
                let b = run_mode(&m, mode, ratio, seed, &spec, &timing).unwrap();
                determinism &= a.reports.len() == b.reports.len() && a.reports.iter().zip(&b.reports).all(|(x, y)| x.same_outcome(y));
                for rep in &a.reports {
                    let cm = &rep.confusion;
                    for (row, counts) in cm.percents.iter().zip(&cm.counts) {
                        if counts.iter().sum::<u64>() > 0 {
                            rows100 = rows100.max((row.iter().sum::<f64>() - 100.0).abs());
                        }
                    }
                    trace &= rep.accuracy == 100.0 * cm.trace() as f64 / cm.total() as f64;
                }
            }
        }
    }
    vec![
        check("3 split disjointness/coverage", partition, "200 random matrices, all three modes"),
        check("3 per-gesture stratification bounds", strat, "train count ∈ {⌊rc⌋, ⌊rc⌋+1} for every gesture"),
        check("3 leave-one-user-out leakage", leak == 0, format!("{leak} leaked rows")),
        check("3 confusion rows sum to 100", rows100 <= 1e-9, format!("max |Σrow - 100| {rows100:.2e} (≤ 1e-9)")),
        check("3 accuracy = trace / total", trace, "every report"),
        check("3 seed determinism", determinism, "repeated runs give identical reports"),
        within_budget("3", start.elapsed(), Duration::from_secs(30)),
    ]
}

// ---------------------------------------------------------------------------

struct Grid {
    cells: Vec<(ClassifierKind, ModeSummary)>,
}

impl Grid {
    fn run(matrix: &FeatureMatrix, kinds: &[ClassifierKind], modes: &[Mode]) -> Grid {
        let mut cells = Vec::new();
        for &kind in kinds {
            for &mode in modes {
                let spec = ClassifierSpec::default_for(kind, 0);
                cells.push((kind, run_mode(matrix, mode, DEFAULT_RATIO, 0, &spec, &TimingConfig::default()).unwrap()));
            }
        }
        Grid { cells }
    }

    fn get(&self, kind: ClassifierKind, mode: Mode) -> &ModeSummary {
        &self.cells.iter().find(|c| c.0 == kind && c.1.mode == mode).unwrap().1
    }
}

// ten times the report default: an ordering needs tighter estimates than a report does
const ORDERING_TIMING: TimingConfig = TimingConfig { reps: 2000, groups: 5 };

/// Mean per-sample time of RC, GB and ET with default hyperparameters, over
/// every split of `mode`. The three models of a split are timed together on
/// its test rows (interleaved groups) so machine noise cannot favour one.
fn paired_times(matrix: &FeatureMatrix, mode: Mode) -> [f64; 3] {
    let plans = match mode {
        Mode::UserDependent => matrix.user_ids().into_iter().map(|u| plan_user_dependent(matrix, u, DEFAULT_RATIO, 0).unwrap()).collect(),
        Mode::Mixed => vec![plan_mixed(matrix, DEFAULT_RATIO, 0).unwrap()],
        Mode::UserIndependent => plan_user_independent(matrix).unwrap(),
    };
    let kinds = [ClassifierKind::Ridge, ClassifierKind::GradientBoosting, ClassifierKind::ExtraTrees];
    let mut total = [0.0; 3];
    for plan in &plans {
        let (x, y) = (matrix.select_rows(&plan.train), matrix.select_labels(&plan.train));
        let models: Vec<TrainedModel> = kinds.iter().map(|&k| ClassifierSpec::default_for(k, 0).fit(&x, &y).unwrap()).collect();
        let refs: Vec<&dyn Predictor> = models.iter().map(|m| m as &dyn Predictor).collect();
        let times = measure_classify_times(&refs, &matrix.select_rows(&plan.test), &ORDERING_TIMING).unwrap();
        for (t, v) in total.iter_mut().zip(times) {
            *t += v / plans.len() as f64;
        }
    }
    total
}

fn timing_lines(tag: &str, matrix: &FeatureMatrix) -> Vec<Line> {
    Mode::ALL
        .iter()
        .map(|&mode| {
            let [rc, gb, et] = paired_times(matrix, mode);
            check(
                format!("5 RC < GB < ET, {tag} {}", mode.short_name()),
                rc < gb && gb < et,
                format!("RC {:.3} µs, GB {:.3} µs, ET {:.3} µs", rc * 1e6, gb * 1e6, et * 1e6),
            )
        })
        .collect()
}

fn synthetic_suite() -> Vec<Line> {
    let start = Instant::now();
    let matrix = extract_all(&generate(&SynthSpec::easy()).unwrap()).unwrap();
    let grid = Grid::run(&matrix, &ClassifierKind::ALL, &Mode::ALL);
    let et = |m| grid.get(ClassifierKind::ExtraTrees, m).average_accuracy;
    let mut out = vec![check("4 ET mixed-user accuracy ≥ 90", et(Mode::Mixed) >= 90.0, format!("{:.2} %", et(Mode::Mixed)))];
    let trend: Vec<String> = ClassifierKind::ALL
        .iter()
        .map(|&k| format!("{} {:.2} vs {:.2}", k.short_name(), grid.get(k, Mode::Mixed).average_accuracy, grid.get(k, Mode::UserIndependent).average_accuracy))
        .collect();
    let holds = ClassifierKind::ALL
        .iter()
        .all(|&k| grid.get(k, Mode::Mixed).average_accuracy >= grid.get(k, Mode::UserIndependent).average_accuracy);
    out.push(check("4 mixed-user ≥ user-independent", holds, format!("U_M vs U_I: {}", trend.join("; "))));
    out.push(within_budget("4", start.elapsed(), Duration::from_secs(300)));
    out.extend(timing_lines("synthetic", &matrix));
    out
}

// ---------------------------------------------------------------------------

struct Reference {
    name: &'static str,
    et: [f64; 3],
}

const UWAVE: Reference = Reference { name: "uWave", et: [97.76, 97.85, 82.49] };
const SONY: Reference = Reference { name: "Sony", et: [95.88, 98.63, 75.1] };
const TOLERANCE: [f64; 3] = [3.0, 3.0, 5.0];

fn corpus(var: &str, load: impl Fn(&str) -> gesture_core::Result<Dataset>) -> Option<std::result::Result<FeatureMatrix, String>> {
    let root = std::env::var(var).ok()?;
    Some(load(&root).and_then(|d| extract_all(&d)).map_err(|e| format!("{var}={root}: {e}")))
}

fn reference_lines(reference: &Reference, grid: &Grid) -> Vec<Line> {
    Mode::ALL
        .iter()
        .zip(reference.et.iter().zip(TOLERANCE))
        .map(|(&mode, (&target, tol))| {
            let got = grid.get(ClassifierKind::ExtraTrees, mode).average_accuracy;
            check(
                format!("6 {} ET {}", reference.name, mode.short_name()),
                (got - target).abs() <= tol,
                format!("{got:.2} vs {target} ± {tol:.1}"),
            )
        })
        .collect()
}

fn real_data_suite() -> Vec<Line> {
    let mut out = Vec::new();
    match corpus("GESTURE_UWAVE_ROOT", |root| load_uwave_tree(root)) {
        None => {
            out.push(skip("6 uWave", "GESTURE_UWAVE_ROOT not set"));
            out.push(skip("7 uWave per-user shape", "GESTURE_UWAVE_ROOT not set"));
        }
        Some(Err(e)) => out.push(check("6 uWave load", false, e)),
        Some(Ok(m)) => {
            let start = Instant::now();
            let grid = Grid::run(&m, &ClassifierKind::ALL, &Mode::ALL);
            let elapsed = start.elapsed();
            out.extend(reference_lines(&UWAVE, &grid));
            let rc = grid.get(ClassifierKind::Ridge, Mode::UserDependent).average_accuracy;
            out.push(check("6 uWave RC U_D", (rc - 97.5).abs() <= 3.0, format!("{rc:.2} vs 97.5 ± 3.0")));
            let ui = grid.get(ClassifierKind::ExtraTrees, Mode::UserIndependent).average_accuracy;
            out.push(check("6 uWave ET U_I above 75.4 baseline", ui > 75.4, format!("{ui:.2}")));
            out.push(within_budget("6 uWave full grid", elapsed, Duration::from_secs(900)));
            out.extend(timing_lines("uWave", &m));

            let ud = grid.get(ClassifierKind::ExtraTrees, Mode::UserDependent);
            let per_user = ud.per_user_accuracy.clone().unwrap_or_default();
            let floor = per_user.values().copied().fold(f64::INFINITY, f64::min);
            out.push(check("7 uWave ET U_D per-user ≥ 90", floor >= 90.0, format!("lowest user {floor:.2}: {per_user:?}")));
            let fold8 = grid
                .get(ClassifierKind::ExtraTrees, Mode::UserIndependent)
                .reports
                .iter()
                .find(|r| r.user == Some(8))
                .map(|r| r.accuracy);
            match fold8 {
                Some(a) => out.push(check("7 uWave U_I user-8 fold", (a - 92.14).abs() <= 5.0, format!("{a:.2} vs 92.14 ± 5.0"))),
                None => out.push(check("7 uWave U_I user-8 fold", false, "no user 8 in corpus")),
            }
        }
    }
    match corpus("GESTURE_SONY_ROOT", |root| load_tree(root, &AdapterConfig::sony())) {
        None => out.push(skip("6 Sony", "GESTURE_SONY_ROOT not set")),
        Some(Err(e)) => out.push(check("6 Sony load", false, e)),
        Some(Ok(m)) => {
            let grid = Grid::run(&m, &ClassifierKind::ALL, &Mode::ALL);
            out.extend(reference_lines(&SONY, &grid));
            out.extend(timing_lines("Sony", &m));
        }
    }
    out
}

fn main() {
    // `cargo test -- --list` and name filters probe every test target
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.iter().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    if let Some(filter) = args.iter().find(|a| !a.starts_with('-')) {
        if !"acceptance".contains(filter.as_str()) {
            return;
        }
    }

    let suites: [(&str, fn() -> Vec<Line>); 5] = [
        ("DSP oracles", dsp_suite),
        ("classifier oracles", classifier_suite),
        ("evaluation properties", evaluation_suite),
        ("synthetic end-to-end and timing", synthetic_suite),
        ("real corpora", real_data_suite),
    ];
    let (mut pass, mut fail, mut skipped) = (0, 0, 0);
    for (name, suite) in suites {
        println!("== {name}");
        for line in suite() {
            let tag = match line.status {
                Status::Pass => {
                    pass += 1;
                    "PASS"
                }
                Status::Fail => {
                    fail += 1;
                    "FAIL"
                }
                Status::Skip => {
                    skipped += 1;
                    "SKIP"
                }
            };
            println!("{tag}  criterion {}: {}", line.id, line.detail);
        }
    }
    println!("acceptance: {pass} passed, {fail} failed, {skipped} skipped");
    if fail > 0 {
        std::process::exit(1);
    }
}
