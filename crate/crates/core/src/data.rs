//! Gesture samples, datasets and the loaders that bring raw corpora into
//! canonical form.
//!
//! The canonical layout is a `manifest.csv` (`user,gesture,trial,day,file`)
//! next to one CSV per sample (`gx,gy,gz`). Raw corpora (uWave, Sony or
//! anything else with one file per sample) are translated by an
//! [`AdapterConfig`] that maps relative file paths onto sample identities
//! and picks the three g-value columns out of each row.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shortest sequence accepted at ingestion.
pub const MIN_READINGS: usize = 4;

pub const MANIFEST_HEADER: [&str; 5] = ["user", "gesture", "trial", "day", "file"];
pub const SAMPLE_HEADER: [&str; 3] = ["gx", "gy", "gz"];

/// One accelerometer reading in g-units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisTriple {
    pub gx: f64,
    pub gy: f64,
    pub gz: f64,
}

impl AxisTriple {
    pub fn new(gx: f64, gy: f64, gz: f64) -> Self {
        AxisTriple { gx, gy, gz }
    }

    pub fn is_finite(&self) -> bool {
        self.gx.is_finite() && self.gy.is_finite() && self.gz.is_finite()
    }
}

/// `(user, gesture, trial, day)`; the key that must be unique in a dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SampleId {
    pub user: u32,
    pub gesture: u32,
    pub trial: u32,
    pub day: Option<u32>,
}

impl fmt::Display for SampleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "user={} gesture={} trial={}", self.user, self.gesture, self.trial)?;
        if let Some(day) = self.day {
            write!(f, " day={day}")?;
        }
        Ok(())
    }
}

/// A single recorded gesture: an unpadded, unresampled sequence of readings.
#[derive(Debug, Clone, PartialEq)]
pub struct GestureSample {
    pub id: SampleId,
    readings: Vec<AxisTriple>,
}

impl GestureSample {
    pub fn new(id: SampleId, readings: Vec<AxisTriple>) -> Result<Self> {
        let label = id.to_string();
        if readings.len() < MIN_READINGS {
            return Err(Error::TooShort { file: PathBuf::from(label), len: readings.len(), min: MIN_READINGS });
        }
        if let Some(i) = readings.iter().position(|r| !r.is_finite()) {
            return Err(Error::Dataset(format!("{label}: non-finite value at reading {i}")));
        }
        Ok(GestureSample { id, readings })
    }

    pub fn readings(&self) -> &[AxisTriple] {
        &self.readings
    }

    pub fn len(&self) -> usize {
        self.readings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.readings.is_empty()
    }

    pub fn axis_x(&self) -> Vec<f64> {
        self.readings.iter().map(|r| r.gx).collect()
    }

    pub fn axis_y(&self) -> Vec<f64> {
        self.readings.iter().map(|r| r.gy).collect()
    }

    pub fn axis_z(&self) -> Vec<f64> {
        self.readings.iter().map(|r| r.gz).collect()
    }
}

/// Corpus shape: users, gesture vocabulary, repetitions, days and total count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub users: usize,
    pub gestures: usize,
    /// Largest number of trials seen in any (user, gesture, day) cell.
    pub samples_per_gesture: usize,
    pub days: Option<usize>,
    pub total_samples: usize,
}

impl DatasetMeta {
    pub const UWAVE: DatasetMeta =
        DatasetMeta { users: 8, gestures: 8, samples_per_gesture: 10, days: Some(7), total_samples: 4480 };
    pub const SONY: DatasetMeta =
        DatasetMeta { users: 8, gestures: 20, samples_per_gesture: 20, days: None, total_samples: 3200 };

    /// `U × N_G × S_G × N_D`, the total a perfectly balanced corpus would have.
    pub fn balanced_total(&self) -> usize {
        self.users * self.gestures * self.samples_per_gesture * self.days.unwrap_or(1)
    }

    /// Field-by-field differences against a reference shape.
    pub fn mismatches(&self, expected: &DatasetMeta) -> Vec<String> {
        let mut out = Vec::new();
        let mut check = |name: &str, got: String, want: String| {
            if got != want {
                out.push(format!("{name}: got {got}, expected {want}"));
            }
        };
        check("U", self.users.to_string(), expected.users.to_string());
        check("N_G", self.gestures.to_string(), expected.gestures.to_string());
        check("S_G", self.samples_per_gesture.to_string(), expected.samples_per_gesture.to_string());
        check("N_D", format!("{:?}", self.days), format!("{:?}", expected.days));
        check("N_GS", self.total_samples.to_string(), expected.total_samples.to_string());
        out
    }
}

impl fmt::Display for DatasetMeta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "U={} N_G={} S_G={} ", self.users, self.gestures, self.samples_per_gesture)?;
        match self.days {
            Some(d) => write!(f, "N_D={d} ")?,
            None => write!(f, "N_D=- ")?,
        }
        write!(f, "N_GS={}", self.total_samples)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    meta: DatasetMeta,
    samples: Vec<GestureSample>,
}

impl Dataset {
    /// Validates identity uniqueness and id density, then derives the meta counts.
    pub fn new(samples: Vec<GestureSample>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(samples.len());
        for (i, s) in samples.iter().enumerate() {
            if !seen.insert(s.id) {
                return Err(Error::Duplicate { file: PathBuf::from("<dataset>"), line: i + 1, identity: s.id.to_string() });
            }
        }
        let with_day = samples.iter().filter(|s| s.id.day.is_some()).count();
        if with_day != 0 && with_day != samples.len() {
            return Err(Error::Dataset("day must be present on every sample or on none".into()));
        }

        let users: BTreeSet<u32> = samples.iter().map(|s| s.id.user).collect();
        let gestures: BTreeSet<u32> = samples.iter().map(|s| s.id.gesture).collect();
        check_dense("user", &users)?;
        check_dense("gesture", &gestures)?;
        let days: BTreeSet<u32> = samples.iter().filter_map(|s| s.id.day).collect();

        let mut cells: BTreeMap<(u32, u32, Option<u32>), usize> = BTreeMap::new();
        for s in &samples {
            *cells.entry((s.id.user, s.id.gesture, s.id.day)).or_default() += 1;
        }

        let meta = DatasetMeta {
            users: users.len(),
            gestures: gestures.len(),
            samples_per_gesture: cells.values().copied().max().unwrap_or(0),
            days: if with_day > 0 { Some(days.len()) } else { None },
            total_samples: samples.len(),
        };
        Ok(Dataset { meta, samples })
    }

    pub fn empty() -> Self {
        Dataset {
            meta: DatasetMeta { users: 0, gestures: 0, samples_per_gesture: 0, days: None, total_samples: 0 },
            samples: Vec::new(),
        }
    }

    pub fn meta(&self) -> &DatasetMeta {
        &self.meta
    }

    pub fn samples(&self) -> &[GestureSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Sample count per (user, gesture) pair. Corpora are not assumed to be balanced.
    pub fn cell_counts(&self) -> BTreeMap<(u32, u32), usize> {
        let mut cells = BTreeMap::new();
        for s in &self.samples {
            *cells.entry((s.id.user, s.id.gesture)).or_default() += 1;
        }
        cells
    }

    /// Warns (via `log`) on every field where the loaded shape differs from a reference.
    pub fn cross_check(&self, expected: &DatasetMeta) -> Vec<String> {
        let diffs = self.meta.mismatches(expected);
        for d in &diffs {
            log::warn!("dataset shape differs from reference: {d}");
        }
        diffs
    }
}

fn check_dense(what: &str, ids: &BTreeSet<u32>) -> Result<()> {
    for (expected, &id) in (1u32..).zip(ids.iter()) {
        if id != expected {
            return Err(Error::Dataset(format!("{what} ids must be dense in 1..={}, found {id}", ids.len())));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Timestamp stripping
// ---------------------------------------------------------------------------

/// A raw row as it appears in a corpus file: any number of clock columns
/// followed (logically) by the three g-values.
#[derive(Debug, Clone, PartialEq)]
pub struct RawRow {
    pub timestamps: Vec<f64>,
    pub values: AxisTriple,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Stripped {
    pub readings: Vec<AxisTriple>,
    pub warnings: Vec<String>,
}

/// Drops every timestamp column, keeping g-values untouched and in the order given.
///
/// A timestamp column that goes backwards produces a warning; rows are never
/// reordered.
pub fn strip_timestamps(rows: &[RawRow]) -> Stripped {
    let mut warnings = Vec::new();
    for (i, pair) in rows.windows(2).enumerate() {
        for (col, (a, b)) in pair[0].timestamps.iter().zip(&pair[1].timestamps).enumerate() {
            if b < a {
                let msg = format!("timestamp column {col} decreases at row {}", i + 2);
                log::warn!("{msg}");
                warnings.push(msg);
            }
        }
    }
    Stripped { readings: rows.iter().map(|r| r.values).collect(), warnings }
}

// ---------------------------------------------------------------------------
// Canonical manifest
// ---------------------------------------------------------------------------

pub fn load_manifest(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let headers = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    if headers.iter().collect::<Vec<_>>() != MANIFEST_HEADER {
        return Err(Error::parse(path, 1, format!("expected header {}", MANIFEST_HEADER.join(","))));
    }

    let mut samples = Vec::new();
    let mut seen = HashSet::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.len() != 5 {
            return Err(Error::parse(path, line, format!("expected 5 fields, got {}", record.len())));
        }
        let num = |i: usize| -> Result<u32> {
            record[i]
                .trim()
                .parse::<u32>()
                .map_err(|_| Error::parse(path, line, format!("bad {} value {:?}", MANIFEST_HEADER[i], &record[i])))
        };
        let day = if record[3].trim().is_empty() { None } else { Some(num(3)?) };
        let id = SampleId { user: num(0)?, gesture: num(1)?, trial: num(2)?, day };
        if !seen.insert(id) {
            return Err(Error::Duplicate { file: path.to_path_buf(), line, identity: id.to_string() });
        }
        let sample_path = base.join(record[4].trim());
        let readings = read_sample_csv(&sample_path)?;
        samples.push(wrap_sample(id, readings, &sample_path)?);
    }
    Dataset::new(samples)
}

fn wrap_sample(id: SampleId, readings: Vec<AxisTriple>, file: &Path) -> Result<GestureSample> {
    if readings.len() < MIN_READINGS {
        return Err(Error::TooShort { file: file.to_path_buf(), len: readings.len(), min: MIN_READINGS });
    }
    GestureSample::new(id, readings)
}

/// Reads a per-sample `gx,gy,gz` file.
pub fn read_sample_csv(path: &Path) -> Result<Vec<AxisTriple>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let headers = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    if headers.iter().collect::<Vec<_>>() != SAMPLE_HEADER {
        return Err(Error::parse(path, 1, format!("expected header {}", SAMPLE_HEADER.join(","))));
    }
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.len() != 3 {
            return Err(Error::parse(path, line, format!("expected 3 fields, got {}", record.len())));
        }
        let mut v = [0.0; 3];
        for (slot, field) in v.iter_mut().zip(record.iter()) {
            *slot = parse_finite(field, path, line)?;
        }
        out.push(AxisTriple::new(v[0], v[1], v[2]));
    }
    Ok(out)
}

fn parse_finite(field: &str, path: &Path, line: usize) -> Result<f64> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| Error::parse(path, line, format!("malformed number {field:?}")))?;
    if !v.is_finite() {
        return Err(Error::parse(path, line, format!("non-finite value {field:?}")));
    }
    Ok(v)
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::parse(path, line, format!("{other:?}")),
    }
}

/// Relative path used for a sample when exporting to the canonical layout.
pub fn sample_file_name(id: &SampleId) -> String {
    match id.day {
        Some(d) => format!("samples/u{}_d{}_g{}_t{}.csv", id.user, d, id.gesture, id.trial),
        None => format!("samples/u{}_g{}_t{}.csv", id.user, id.gesture, id.trial),
    }
}

/// Writes `manifest.csv` plus `samples/*.csv` under `dir` and returns the manifest path.
///
/// Values are written in shortest round-trip form, so reloading reproduces
/// every g-value bit for bit.
pub fn write_manifest(dataset: &Dataset, dir: impl AsRef<Path>) -> Result<PathBuf> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir.join("samples")).map_err(|e| Error::io(dir, e))?;
    let manifest = dir.join("manifest.csv");
    let mut w = csv::Writer::from_path(&manifest).map_err(|e| csv_error(&manifest, e))?;
    w.write_record(MANIFEST_HEADER).map_err(|e| csv_error(&manifest, e))?;
    for s in dataset.samples() {
        let rel = sample_file_name(&s.id);
        let day = s.id.day.map(|d| d.to_string()).unwrap_or_default();
        w.write_record([s.id.user.to_string(), s.id.gesture.to_string(), s.id.trial.to_string(), day, rel.clone()])
            .map_err(|e| csv_error(&manifest, e))?;

        let sample_path = dir.join(&rel);
        let mut sw = csv::Writer::from_path(&sample_path).map_err(|e| csv_error(&sample_path, e))?;
        sw.write_record(SAMPLE_HEADER).map_err(|e| csv_error(&sample_path, e))?;
        for r in s.readings() {
            sw.write_record([r.gx.to_string(), r.gy.to_string(), r.gz.to_string()])
                .map_err(|e| csv_error(&sample_path, e))?;
        }
        sw.flush().map_err(|e| Error::io(&sample_path, e))?;
    }
    w.flush().map_err(|e| Error::io(&manifest, e))?;
    Ok(manifest)
}

// ---------------------------------------------------------------------------
// Raw-tree adapters
// ---------------------------------------------------------------------------

/// How a raw corpus tree maps onto sample identities and g-value columns.
///
/// Stored as TOML, for example:
///
/// ```toml
/// name = "uwave"
/// extension = "txt"
/// path_regex = '''U(?P<user>\d+)\s*\((?P<day>\d+)\)/[^/]*Acceleration(?P<gesture>\d+)-(?P<trial>\d+)\.txt$'''
/// delimiter = "whitespace"
/// value_columns = [0, 1, 2]
/// timestamp_columns = []
/// header_lines = 0
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdapterConfig {
    pub name: String,
    /// Files with this extension must match `path_regex`; everything else is ignored.
    pub extension: String,
    /// Matched against the `/`-separated path relative to the tree root.
    /// Named captures `user`, `gesture`, `trial` are required, `day` is optional.
    pub path_regex: String,
    /// `"whitespace"` or a single delimiter character such as `","`.
    pub delimiter: String,
    pub value_columns: [usize; 3],
    #[serde(default)]
    pub timestamp_columns: Vec<usize>,
    #[serde(default)]
    pub header_lines: usize,
}

impl AdapterConfig {
    /// uWave: per-user/per-day directories of whitespace-separated `x y z` files.
    pub fn uwave() -> Self {
        AdapterConfig {
            name: "uwave".into(),
            extension: "txt".into(),
            path_regex: r"U(?P<user>\d+)\s*\((?P<day>\d+)\)/[^/]*Acceleration(?P<gesture>\d+)-(?P<trial>\d+)\.txt$"
                .into(),
            delimiter: "whitespace".into(),
            value_columns: [0, 1, 2],
            timestamp_columns: Vec::new(),
            header_lines: 0,
        }
    }

    /// Sony smartwatch: per-user/per-gesture directories of CSV rows carrying
    /// two clock columns ahead of the g-values.
    pub fn sony() -> Self {
        AdapterConfig {
            name: "sony".into(),
            extension: "csv".into(),
            path_regex: r"(?i)user(?P<user>\d+)/gesture(?P<gesture>\d+)/(?:trial|sample)?(?P<trial>\d+)\.csv$".into(),
            delimiter: ",".into(),
            value_columns: [2, 3, 4],
            timestamp_columns: vec![0, 1],
            header_lines: 0,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: AdapterConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.compile()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("adapter config serializes")
    }

    fn compile(&self) -> Result<Regex> {
        let re = Regex::new(&self.path_regex).map_err(|e| Error::Config(format!("path_regex: {e}")))?;
        let names: HashSet<&str> = re.capture_names().flatten().collect();
        for required in ["user", "gesture", "trial"] {
            if !names.contains(required) {
                return Err(Error::Config(format!("path_regex lacks named capture `{required}`")));
            }
        }
        Ok(re)
    }

    /// Splits one text row into fields according to the delimiter setting.
    fn split<'a>(&self, line: &'a str) -> Vec<&'a str> {
        if self.delimiter == "whitespace" {
            line.split_whitespace().collect()
        } else {
            line.split(self.delimiter.as_str()).map(str::trim).collect()
        }
    }

    /// Parses a raw sample file body into rows.
    pub fn parse_rows(&self, text: &str, file: &Path) -> Result<Vec<RawRow>> {
        let mut rows = Vec::new();
        for (i, line) in text.lines().enumerate().skip(self.header_lines) {
            let lineno = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            let fields = self.split(line);
            let get = |col: usize| -> Result<f64> {
                let field = fields
                    .get(col)
                    .ok_or_else(|| Error::parse(file, lineno, format!("row has {} fields, column {col} missing", fields.len())))?;
                parse_finite(field, file, lineno)
            };
            let timestamps = self.timestamp_columns.iter().map(|&c| get(c)).collect::<Result<Vec<_>>>()?;
            let [cx, cy, cz] = self.value_columns;
            rows.push(RawRow { timestamps, values: AxisTriple::new(get(cx)?, get(cy)?, get(cz)?) });
        }
        Ok(rows)
    }
}

/// Loads a raw corpus tree through an adapter. Samples come back sorted by
/// `(user, gesture, trial, day)` so repeated loads give identical orderings.
pub fn load_tree(root: impl AsRef<Path>, config: &AdapterConfig) -> Result<Dataset> {
    let root = root.as_ref();
    let re = config.compile()?;
    let mut samples = Vec::new();
    for entry in walkdir::WalkDir::new(root).sort_by_file_name() {
        let entry = entry.map_err(|e| {
            let path = e.path().unwrap_or(root).to_path_buf();
            Error::io(path, e.into())
        })?;
        if !entry.file_type().is_file() {
            continue;
        }
        let path = entry.path();
        if path.extension().and_then(|e| e.to_str()) != Some(config.extension.as_str()) {
            continue;
        }
        let rel = path
            .strip_prefix(root)
            .unwrap_or(path)
            .components()
            .map(|c| c.as_os_str().to_string_lossy())
            .collect::<Vec<_>>()
            .join("/");
        let caps = re
            .captures(&rel)
            .ok_or_else(|| Error::parse(path, 0, format!("file name {rel:?} does not match {}", config.path_regex)))?;
        let cap = |name: &str| -> Result<Option<u32>> {
            caps.name(name)
                .map(|m| m.as_str().parse::<u32>().map_err(|_| Error::parse(path, 0, format!("bad {name} in {rel:?}"))))
                .transpose()
        };
        let id = SampleId {
            user: cap("user")?.expect("required capture"),
            gesture: cap("gesture")?.expect("required capture"),
            trial: cap("trial")?.expect("required capture"),
            day: cap("day")?,
        };

        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let rows = config.parse_rows(&text, path)?;
        if rows.is_empty() {
            return Err(Error::parse(path, 0, "empty sample file"));
        }
        let stripped = strip_timestamps(&rows);
        for w in &stripped.warnings {
            log::warn!("{}: {w}", path.display());
        }
        samples.push(wrap_sample(id, stripped.readings, path)?);
    }
    samples.sort_by_key(|s| (s.id.user, s.id.gesture, s.id.trial, s.id.day));
    let dataset = Dataset::new(samples)?;
    Ok(dataset)
}

/// uWave tree with the built-in adapter; the shape is cross-checked against the
/// full-corpus reference when every user is present.
pub fn load_uwave_tree(root: impl AsRef<Path>) -> Result<Dataset> {
    let dataset = load_tree(root, &AdapterConfig::uwave())?;
    if dataset.meta().users == DatasetMeta::UWAVE.users {
        dataset.cross_check(&DatasetMeta::UWAVE);
    }
    Ok(dataset)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reading(v: f64) -> AxisTriple {
        AxisTriple::new(v, -v, 2.0 * v)
    }

    fn sample(user: u32, gesture: u32, trial: u32) -> GestureSample {
        let id = SampleId { user, gesture, trial, day: None };
        GestureSample::new(id, (0..6).map(|i| reading(i as f64 * 0.1)).collect()).unwrap()
    }

    #[test]
    fn strip_keeps_values_and_order() {
        let rows = vec![
            RawRow { timestamps: vec![0.00], values: AxisTriple::new(0.1, -0.2, 0.98) },
            RawRow { timestamps: vec![0.02], values: AxisTriple::new(0.1, -0.2, 0.98) },
        ];
        let out = strip_timestamps(&rows);
        assert_eq!(out.readings, vec![AxisTriple::new(0.1, -0.2, 0.98); 2]);
        assert!(out.warnings.is_empty());
        assert!(strip_timestamps(&[]).readings.is_empty());
    }

    #[test]
    fn non_monotone_timestamps_warn_only() {
        let rows = vec![
            RawRow { timestamps: vec![5.0, 1.0], values: reading(1.0) },
            RawRow { timestamps: vec![4.0, 2.0], values: reading(2.0) },
        ];
        let out = strip_timestamps(&rows);
        assert_eq!(out.readings, vec![reading(1.0), reading(2.0)]);
        assert_eq!(out.warnings.len(), 1);
        assert!(out.warnings[0].contains("column 0"));
    }

    #[test]
    fn short_sample_rejected() {
        let id = SampleId { user: 1, gesture: 1, trial: 1, day: None };
        let err = GestureSample::new(id, vec![reading(0.0); 3]).unwrap_err();
        assert!(matches!(err, Error::TooShort { len: 3, .. }));
        assert!(GestureSample::new(id, vec![reading(0.0); 4]).is_ok());
    }

    #[test]
    fn non_finite_rejected() {
        let id = SampleId { user: 1, gesture: 1, trial: 1, day: None };
        let mut r = vec![reading(0.0); 5];
        r[2].gy = f64::NAN;
        assert!(GestureSample::new(id, r).is_err());
    }

    #[test]
    fn duplicate_identity_rejected() {
        let err = Dataset::new(vec![sample(1, 1, 1), sample(1, 1, 1)]).unwrap_err();
        assert!(matches!(err, Error::Duplicate { .. }));
    }

    #[test]
    fn sparse_ids_rejected() {
        assert!(Dataset::new(vec![sample(1, 1, 1), sample(3, 1, 1)]).is_err());
        assert!(Dataset::new(vec![sample(1, 2, 1)]).is_err());
    }

    #[test]
    fn meta_counts() {
        let ds = Dataset::new(vec![sample(1, 1, 1), sample(1, 2, 1), sample(2, 1, 1), sample(2, 1, 2)]).unwrap();
        let m = ds.meta();
        assert_eq!((m.users, m.gestures, m.samples_per_gesture, m.days, m.total_samples), (2, 2, 2, None, 4));
        assert_eq!(ds.cell_counts()[&(2, 1)], 2);
        assert_eq!(ds.cell_counts()[&(1, 2)], 1);
    }

    #[test]
    fn reference_shapes() {
        assert_eq!(DatasetMeta::UWAVE.balanced_total(), 4480);
        assert_eq!(DatasetMeta::SONY.balanced_total(), 3200);
        assert_eq!(DatasetMeta::UWAVE.to_string(), "U=8 N_G=8 S_G=10 N_D=7 N_GS=4480");
        assert_eq!(DatasetMeta::UWAVE.mismatches(&DatasetMeta::SONY).len(), 4);
    }

    #[test]
    fn adapter_config_round_trips_through_toml() {
        let cfg = AdapterConfig::sony();
        assert_eq!(AdapterConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn adapter_requires_named_captures() {
        let mut cfg = AdapterConfig::uwave();
        cfg.path_regex = r"(?P<user>\d+)/(?P<gesture>\d+)".into();
        assert!(matches!(AdapterConfig::from_toml(&cfg.to_toml()), Err(Error::Config(_))));
    }

    #[test]
    fn sony_rows_drop_clock_columns() {
        let text = "100,7,0.5,-0.25,1.0\n120,9,0.125,0.0,0.75\n";
        let rows = AdapterConfig::sony().parse_rows(text, Path::new("x.csv")).unwrap();
        assert_eq!(rows[0].timestamps, vec![100.0, 7.0]);
        let out = strip_timestamps(&rows);
        assert_eq!(out.readings, vec![AxisTriple::new(0.5, -0.25, 1.0), AxisTriple::new(0.125, 0.0, 0.75)]);
    }

    #[test]
    fn malformed_row_names_the_line() {
        let text = "1 2 3\n4 x 6\n";
        let err = AdapterConfig::uwave().parse_rows(text, Path::new("a.txt")).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }
}
