//! Dataset ingestion: CSV tables, MNIST IDX files, standardization and
//! seeded splits.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use log::warn;
use multirobust_core::{Dataset, LabelKind, Matrix};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

fn default_true() -> bool {
    true
}

/// How to turn a CSV file into a numeric dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TabularSchema {
    /// Label column.
    pub target: String,
    /// Expected header, in order. Checked when present.
    #[serde(default)]
    pub columns: Option<Vec<String>>,
    /// Columns one-hot encoded with the first (sorted) level dropped.
    #[serde(default)]
    pub categorical: Vec<String>,
    /// Columns left out of the feature matrix.
    #[serde(default)]
    pub ignore: Vec<String>,
    /// Present for classification tasks.
    #[serde(default)]
    pub binary: Option<BinaryMapping>,
    #[serde(default = "default_true")]
    pub intercept: bool,
    #[serde(default)]
    pub standardize: bool,
}

/// Raw target values mapped to `+1` and `-1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BinaryMapping {
    pub positive: Vec<String>,
    pub negative: Vec<String>,
}

impl TabularSchema {
    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        toml::from_str(&text).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))
    }

    pub fn regression(target: &str) -> Self {
        TabularSchema {
            target: target.to_string(),
            columns: None,
            categorical: Vec::new(),
            ignore: Vec::new(),
            binary: None,
            intercept: true,
            standardize: false,
        }
    }
}

/// A dataset with its column names.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub dataset: Dataset,
    pub feature_names: Vec<String>,
}

fn parse_error(path: &Path, row: usize, column: &str, message: impl Into<String>) -> HarnessError {
    HarnessError::Parse {
        path: path.to_path_buf(),
        row,
        column: column.to_string(),
        message: message.into(),
    }
}

/// Reads a headered CSV. Row numbers in errors are 1-based file lines.
pub fn load_csv(path: &Path, schema: &TabularSchema) -> Result<Table> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(path, e))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    if let Some(expected) = &schema.columns {
        if expected != &header {
            return Err(HarnessError::SchemaMismatch(format!(
                "header {header:?} does not match schema columns {expected:?}"
            )));
        }
    }
    let col_of = |name: &str| -> Result<usize> {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| HarnessError::SchemaMismatch(format!("column {name:?} not in header")))
    };
    let target = col_of(&schema.target)?;
    for c in schema.categorical.iter().chain(&schema.ignore) {
        col_of(c)?;
    }

    let mut records = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() != header.len() {
            return Err(parse_error(
                path,
                line,
                "*",
                format!("expected {} fields, found {}", header.len(), rec.len()),
            ));
        }
        records.push((line, rec));
    }
    if records.is_empty() {
        return Err(HarnessError::EmptyDataset(path.display().to_string()));
    }

    let mut levels: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for c in &schema.categorical {
        let j = col_of(c)?;
        let set: BTreeSet<String> = records.iter().map(|(_, r)| r[j].trim().to_string()).collect();
        levels.insert(j, set.into_iter().collect());
    }

    let mut feature_names = Vec::new();
    let mut layout = Vec::new();
    for (j, name) in header.iter().enumerate() {
        if j == target || schema.ignore.contains(name) {
            continue;
        }
        match levels.get(&j) {
            Some(lv) => {
                for l in lv.iter().skip(1) {
                    feature_names.push(format!("{name}={l}"));
                }
                layout.push((j, true));
            }
            None => {
                feature_names.push(name.clone());
                layout.push((j, false));
            }
        }
    }
    if feature_names.is_empty() {
        return Err(HarnessError::SchemaMismatch("no feature columns".into()));
    }

    let d = feature_names.len();
    let mut data = Vec::with_capacity(records.len() * d);
    let mut labels = Vec::with_capacity(records.len());
    for (line, rec) in &records {
        for &(j, categorical) in &layout {
            let raw = rec[j].trim();
            if categorical {
                let lv = &levels[&j];
                data.extend(lv.iter().skip(1).map(|l| if l == raw { 1.0 } else { 0.0 }));
            } else {
                let v: f64 = raw
                    .parse()
                    .map_err(|_| parse_error(path, *line, &header[j], format!("not a number: {raw:?}")))?;
                data.push(v);
            }
        }
        let raw = rec[target].trim();
        let label = match &schema.binary {
            Some(m) if m.positive.iter().any(|p| p == raw) => 1.0,
            Some(m) if m.negative.iter().any(|p| p == raw) => -1.0,
            Some(_) => {
                return Err(HarnessError::SchemaMismatch(format!(
                    "line {line}: target value {raw:?} is not in the binary mapping"
                )))
            }
            None => raw.parse().map_err(|_| {
                parse_error(path, *line, &schema.target, format!("not a number: {raw:?}"))
            })?,
        };
        labels.push(label);
    }
    let kind = if schema.binary.is_some() {
        LabelKind::Binary
    } else {
        LabelKind::Regression
    };
    let dataset = Dataset::new(Matrix::from_vec(records.len(), d, data)?, labels, kind)?;
    Ok(Table {
        dataset,
        feature_names,
    })
}

fn csv_error(path: &Path, e: csv::Error) -> HarnessError {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => HarnessError::io(path, io),
        other => parse_error(path, line, "*", format!("{other:?}")),
    }
}

/// Writes features and labels as CSV with the given target column name.
pub fn write_csv(path: &Path, table: &Table, target: &str) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    let mut header = table.feature_names.clone();
    header.push(target.to_string());
    w.write_record(&header).map_err(|e| csv_error(path, e))?;
    let ds = &table.dataset;
    for (row, y) in ds.features().iter_rows().zip(ds.labels()) {
        let rec: Vec<String> = row.iter().chain(std::iter::once(y)).map(|v| v.to_string()).collect();
        w.write_record(&rec).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

const IDX_IMAGES: u32 = 0x0000_0803;
const IDX_LABELS: u32 = 0x0000_0801;

fn read_be_u32(bytes: &[u8], at: usize, path: &Path) -> Result<u32> {
    bytes
        .get(at..at + 4)
        .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or_else(|| HarnessError::TruncatedFile {
            path: path.to_path_buf(),
            needed: at + 4,
            found: bytes.len(),
        })
}

fn check_magic(bytes: &[u8], expected: u32, path: &Path) -> Result<()> {
    let found = read_be_u32(bytes, 0, path)?;
    if found != expected {
        return Err(HarnessError::BadMagic {
            path: path.to_path_buf(),
            expected,
            found,
        });
    }
    Ok(())
}

fn check_size(bytes: &[u8], needed: usize, path: &Path) -> Result<()> {
    if bytes.len() < needed {
        return Err(HarnessError::TruncatedFile {
            path: path.to_path_buf(),
            needed,
            found: bytes.len(),
        });
    }
    Ok(())
}

/// Loads MNIST IDX image and label files, keeping only `classes`. The first
/// class is labelled `+1`, every other listed class `-1`; pixels are scaled to
/// `[0, 1]`.
pub fn load_mnist_idx(images: &Path, labels: &Path, classes: &[u8]) -> Result<Dataset> {
    if classes.is_empty() {
        return Err(HarnessError::EmptyDataset("no MNIST classes requested".into()));
    }
    let img = fs::read(images).map_err(|e| HarnessError::io(images, e))?;
    let lab = fs::read(labels).map_err(|e| HarnessError::io(labels, e))?;
    check_magic(&img, IDX_IMAGES, images)?;
    check_magic(&lab, IDX_LABELS, labels)?;
    let count = read_be_u32(&img, 4, images)? as usize;
    let rows = read_be_u32(&img, 8, images)? as usize;
    let cols = read_be_u32(&img, 12, images)? as usize;
    let label_count = read_be_u32(&lab, 4, labels)? as usize;
    if count != label_count {
        return Err(HarnessError::SchemaMismatch(format!(
            "{count} images but {label_count} labels"
        )));
    }
    let pixels = rows * cols;
    check_size(&img, 16 + count * pixels, images)?;
    check_size(&lab, 8 + count, labels)?;

    let mut data = Vec::new();
    let mut y = Vec::new();
    for i in 0..count {
        let l = lab[8 + i];
        let Some(pos) = classes.iter().position(|&c| c == l) else {
            continue;
        };
        y.push(if pos == 0 { 1.0 } else { -1.0 });
        let start = 16 + i * pixels;
        data.extend(img[start..start + pixels].iter().map(|&p| f64::from(p) / 255.0));
    }
    if y.is_empty() {
        return Err(HarnessError::EmptyDataset(format!(
            "no samples of classes {classes:?} in {}",
            labels.display()
        )));
    }
    let n = y.len();
    Ok(Dataset::new(Matrix::from_vec(n, pixels, data)?, y, LabelKind::Binary)?)
}

/// Per-column affine map estimated on a training set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StandardizationParams {
    /// Original column indices that survive (non-constant on the train set).
    pub kept: Vec<usize>,
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl StandardizationParams {
    pub fn fit(train: &Dataset) -> Self {
        let (n, d) = (train.n() as f64, train.d());
        let x = train.features();
        let mut mean = vec![0.0; d];
        for r in x.iter_rows() {
            for (m, v) in mean.iter_mut().zip(r) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; d];
        for r in x.iter_rows() {
            for j in 0..d {
                let c = r[j] - mean[j];
                var[j] += c * c;
            }
        }
        let mut params = StandardizationParams {
            kept: Vec::new(),
            mean: Vec::new(),
            scale: Vec::new(),
        };
        for j in 0..d {
            let sd = (var[j] / n).sqrt();
            if sd > 1e-12 * (1.0 + mean[j].abs()) {
                params.kept.push(j);
                params.mean.push(mean[j]);
                params.scale.push(sd);
            } else {
                warn!("dropping constant feature column {j}");
            }
        }
        params
    }

    pub fn apply(&self, data: &Dataset) -> Result<Dataset> {
        let x = data.features();
        let d = self.kept.len();
        let mut out = Vec::with_capacity(data.n() * d);
        for r in x.iter_rows() {
            for (k, &j) in self.kept.iter().enumerate() {
                out.push((r[j] - self.mean[k]) / self.scale[k]);
            }
        }
        Ok(Dataset::new(
            Matrix::from_vec(data.n(), d, out)?,
            data.labels().to_vec(),
            data.kind(),
        )?)
    }

    pub fn apply_names(&self, names: &[String]) -> Vec<String> {
        self.kept.iter().map(|&j| names[j].clone()).collect()
    }
}

/// Standardizes `train` to zero mean and unit variance per column, applies the
/// same map to `others`, and drops columns constant on `train`.
pub fn standardize(
    train: &Dataset,
    others: &[Dataset],
) -> Result<(Dataset, Vec<Dataset>, StandardizationParams)> {
    let params = StandardizationParams::fit(train);
    if params.kept.is_empty() {
        return Err(HarnessError::EmptyDataset("every feature column is constant".into()));
    }
    let t = params.apply(train)?;
    let o = others.iter().map(|d| params.apply(d)).collect::<Result<Vec<_>>>()?;
    Ok((t, o, params))
}

/// Appends an all-ones column.
pub fn with_intercept(data: &Dataset) -> Result<Dataset> {
    let d = data.d() + 1;
    let mut out = Vec::with_capacity(data.n() * d);
    for r in data.features().iter_rows() {
        out.extend_from_slice(r);
        out.push(1.0);
    }
    Ok(Dataset::new(
        Matrix::from_vec(data.n(), d, out)?,
        data.labels().to_vec(),
        data.kind(),
    )?)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitKind {
    Fractions {
        train: f64,
        test: f64,
        validation: f64,
    },
    Folds(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub seed: u64,
    pub kind: SplitKind,
}

impl SplitPlan {
    /// 80% train, 10% test, 10% validation.
    pub fn standard(seed: u64) -> Self {
        SplitPlan {
            seed,
            kind: SplitKind::Fractions {
                train: 0.8,
                test: 0.1,
                validation: 0.1,
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            SplitKind::Fractions {
                train,
                test,
                validation,
            } => {
                if [train, test, validation].iter().any(|f| !(0.0..=1.0).contains(f))
                    || (train + test + validation - 1.0).abs() > 1e-9
                {
                    return Err(HarnessError::Config(format!(
                        "split fractions {train}/{test}/{validation} must be in [0,1] and sum to 1"
                    )));
                }
            }
            SplitKind::Folds(k) if k < 2 => {
                return Err(HarnessError::Config(format!("fold count {k} must be at least 2")))
            }
            SplitKind::Folds(_) => {}
        }
        Ok(())
    }
}

/// Partitions `0..n`: `[train, test, validation]` for fractions, or one index
/// set per fold. Deterministic in the plan's seed.
pub fn split(n: usize, plan: &SplitPlan) -> Result<Vec<Vec<usize>>> {
    plan.validate()?;
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(plan.seed));
    Ok(match plan.kind {
        SplitKind::Fractions {
            test, validation, ..
        } => {
            let n_test = (test * n as f64).round() as usize;
            let n_val = ((validation * n as f64).round() as usize).min(n - n_test);
            let val = idx.split_off(n - n_val);
            let tst = idx.split_off(idx.len() - n_test);
            vec![idx, tst, val]
        }
        SplitKind::Folds(k) => {
            let mut folds = vec![Vec::new(); k];
            for (p, i) in idx.into_iter().enumerate() {
                folds[p % k].push(i);
            }
            folds
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
        let p = dir.join(name);
        fs::File::create(&p).unwrap().write_all(body.as_bytes()).unwrap();
        p
    }

    #[test]
    fn loads_fixture_with_one_hot() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            dir.path(),
            "t.csv",
            "age,sex,city,income\n30,F,b,>50K\n45,M,a,<=50K\n22,F,c,<=50K\n",
        );
        let schema = TabularSchema {
            categorical: vec!["sex".into(), "city".into()],
            binary: Some(BinaryMapping {
                positive: vec![">50K".into()],
                negative: vec!["<=50K".into()],
            }),
            ..TabularSchema::regression("income")
        };
        let t = load_csv(&p, &schema).unwrap();
        assert_eq!(t.feature_names, ["age", "sex=M", "city=b", "city=c"]);
        assert_eq!(t.dataset.features().row(0), &[30.0, 0.0, 1.0, 0.0]);
        assert_eq!(t.dataset.features().row(1), &[45.0, 1.0, 0.0, 0.0]);
        assert_eq!(t.dataset.features().row(2), &[22.0, 0.0, 0.0, 1.0]);
        assert_eq!(t.dataset.labels(), &[1.0, -1.0, -1.0]);
        assert_eq!(t.dataset.kind(), LabelKind::Binary);
    }

    #[test]
    fn unmapped_label_is_schema_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "t.csv", "x,y\n1,yes\n2,maybe\n");
        let schema = TabularSchema {
            binary: Some(BinaryMapping {
                positive: vec!["yes".into()],
                negative: vec!["no".into()],
            }),
            ..TabularSchema::regression("y")
        };
        assert!(matches!(load_csv(&p, &schema), Err(HarnessError::SchemaMismatch(_))));
    }

    #[test]
    fn parse_error_is_located() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "t.csv", "x,y\n1,2\nabc,3\n");
        match load_csv(&p, &TabularSchema::regression("y")) {
            Err(HarnessError::Parse { row, column, .. }) => {
                assert_eq!(row, 3);
                assert_eq!(column, "x");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            load_csv(&p, &TabularSchema::regression("nope")),
            Err(HarnessError::SchemaMismatch(_))
        ));
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let x = Matrix::from_rows(&[[0.1, -2.5e-7], [1.0 / 3.0, 12345.678901234]]).unwrap();
        let ds = Dataset::new(x, vec![std::f64::consts::PI, -1e-13], LabelKind::Regression)
            .unwrap();
        let table = Table {
            dataset: ds,
            feature_names: vec!["a".into(), "b".into()],
        };
        let p = dir.path().join("rt.csv");
        write_csv(&p, &table, "y").unwrap();
        let back = load_csv(&p, &TabularSchema::regression("y")).unwrap();
        assert_eq!(back.feature_names, table.feature_names);
        for (a, b) in back
            .dataset
            .features()
            .as_slice()
            .iter()
            .zip(table.dataset.features().as_slice())
        {
            assert!((a - b).abs() <= 1e-12);
        }
        assert_eq!(back.dataset.labels(), table.dataset.labels());
    }

    fn idx_files(dir: &Path, labels: &[u8], magic: u32) -> (std::path::PathBuf, std::path::PathBuf) {
        let mut img = Vec::new();
        img.extend(magic.to_be_bytes());
        img.extend((labels.len() as u32).to_be_bytes());
        img.extend(2u32.to_be_bytes());
        img.extend(2u32.to_be_bytes());
        for (i, _) in labels.iter().enumerate() {
            img.extend([0u8, 255, i as u8, 51]);
        }
        let mut lab = Vec::new();
        lab.extend(IDX_LABELS.to_be_bytes());
        lab.extend((labels.len() as u32).to_be_bytes());
        lab.extend(labels);
        let pi = dir.join("img");
        let pl = dir.join("lab");
        fs::write(&pi, img).unwrap();
        fs::write(&pl, lab).unwrap();
        (pi, pl)
    }

    #[test]
    fn mnist_filters_and_scales() {
        let dir = tempfile::tempdir().unwrap();
        let (pi, pl) = idx_files(dir.path(), &[1, 3, 7, 7, 1], IDX_IMAGES);
        let ds = load_mnist_idx(&pi, &pl, &[1, 7]).unwrap();
        assert_eq!(ds.n(), 4);
        assert_eq!(ds.d(), 4);
        assert_eq!(ds.labels(), &[1.0, -1.0, -1.0, 1.0]);
        assert!(ds.features().as_slice().iter().all(|v| (0.0..=1.0).contains(v)));
        assert_eq!(ds.features().row(0), &[0.0, 1.0, 0.0, 0.2]);
        assert!(matches!(load_mnist_idx(&pi, &pl, &[]), Err(HarnessError::EmptyDataset(_))));
        assert!(matches!(load_mnist_idx(&pi, &pl, &[9]), Err(HarnessError::EmptyDataset(_))));
    }

    #[test]
    fn mnist_rejects_bad_files() {
        let dir = tempfile::tempdir().unwrap();
        let (pi, pl) = idx_files(dir.path(), &[1, 7], 0x0000_0802);
        assert!(matches!(load_mnist_idx(&pi, &pl, &[1, 7]), Err(HarnessError::BadMagic { .. })));
        let (pi, pl) = idx_files(dir.path(), &[1, 7], IDX_IMAGES);
        let mut bytes = fs::read(&pi).unwrap();
        bytes.truncate(bytes.len() - 3);
        fs::write(&pi, bytes).unwrap();
        assert!(matches!(
            load_mnist_idx(&pi, &pl, &[1, 7]),
            Err(HarnessError::TruncatedFile { .. })
        ));
    }

    fn small() -> Dataset {
        let x = Matrix::from_rows(&[[1.0, 5.0, 2.0], [2.0, 5.0, 4.0], [6.0, 5.0, 0.0]]).unwrap();
        Dataset::new(x, vec![1.0, 2.0, 3.0], LabelKind::Regression).unwrap()
    }

    #[test]
    fn standardize_drops_constant_and_centers() {
        let other = small();
        let (t, o, params) = standardize(&small(), &[other]).unwrap();
        assert_eq!(params.kept, vec![0, 2]);
        assert_eq!(t.d(), 2);
        for j in 0..2 {
            let col: Vec<f64> = t.features().iter_rows().map(|r| r[j]).collect();
            let mean = col.iter().sum::<f64>() / 3.0;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 3.0;
            assert!(mean.abs() < 1e-9);
            assert!((var - 1.0).abs() < 1e-9);
        }
        assert_eq!(o[0], t);
        assert_eq!(t.labels(), small().labels());
    }

    #[test]
    fn params_are_recorded_not_reestimated() {
        let x = Matrix::from_rows(&[[1.0, 2.0], [2.0, 4.0], [6.0, 0.0]]).unwrap();
        let train = Dataset::new(x, vec![1.0, 2.0, 3.0], LabelKind::Regression).unwrap();
        let (once, _, params) = standardize(&train, &[]).unwrap();
        let twice = params.apply(&once).unwrap();
        assert_ne!(twice, once);
        // Re-estimating on standardized data would be the identity.
        let refit = StandardizationParams::fit(&once);
        assert!(refit.mean.iter().all(|m| m.abs() < 1e-12));
        assert!(refit.scale.iter().all(|s| (s - 1.0).abs() < 1e-12));
    }

    #[test]
    fn intercept_column() {
        let d = with_intercept(&small()).unwrap();
        assert_eq!(d.d(), 4);
        assert!(d.features().iter_rows().all(|r| r[3] == 1.0));
    }

    #[test]
    fn splits_are_deterministic_and_exhaustive() {
        let plan = SplitPlan::standard(7);
        let a = split(103, &plan).unwrap();
        assert_eq!(a, split(103, &plan).unwrap());
        assert_ne!(a, split(103, &SplitPlan::standard(8)).unwrap());
        assert_eq!(a[1].len(), 10);
        assert_eq!(a[2].len(), 10);
        let mut all: Vec<usize> = a.concat();
        all.sort_unstable();
        assert_eq!(all, (0..103).collect::<Vec<_>>());

        let folds = split(
            23,
            &SplitPlan {
                seed: 1,
                kind: SplitKind::Folds(10),
            },
        )
        .unwrap();
        let sizes: Vec<usize> = folds.iter().map(Vec::len).collect();
        assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        let mut all: Vec<usize> = folds.concat();
        all.sort_unstable();
        assert_eq!(all, (0..23).collect::<Vec<_>>());
    }

    #[test]
    fn split_plan_validation() {
        let bad = SplitPlan {
            seed: 0,
            kind: SplitKind::Fractions {
                train: 0.5,
                test: 0.1,
                validation: 0.1,
            },
        };
        assert!(split(10, &bad).is_err());
        let one_fold = SplitPlan {
            seed: 0,
            kind: SplitKind::Folds(1),
        };
        assert!(split(10, &one_fold).is_err());
    }
}
