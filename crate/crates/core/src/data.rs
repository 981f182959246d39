//! Tabular regression datasets: loading, validation, splitting,
//! standardization, and column projection.
//!
//! Two bundled schema manifests describe the expected body-fat datasets
//! (a 13-feature anthropometric table and a 41-feature laboratory table,
//! both with a `pbf` percent-body-fat target), but any numeric CSV with a
//! header row works.

use std::fs::File;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Feature columns of the anthropometric (13-feature) schema, in order.
pub const JOHNSON_FEATURES: [&str; 13] = [
    "age", "weight", "height", "neck", "chest", "abdomen", "hip", "thigh", "knee", "ankle",
    "biceps", "forearm", "wrist",
];

/// Feature columns of the laboratory (41-feature) schema, in order.
pub const NHANES_FEATURES: [&str; 41] = [
    "segmented_neutrophils",
    "basophils",
    "lymphocyte",
    "monocyte",
    "eosinophils",
    "red_cell_count",
    "haemoglobin",
    "haematocrit",
    "mcv",
    "mch",
    "mchc",
    "rdw",
    "platelet",
    "mpv",
    "sodium",
    "potassium",
    "scl",
    "sca",
    "phosphorus",
    "stb",
    "bic",
    "glu",
    "iron",
    "ldh",
    "protein",
    "sua",
    "sal",
    "tri",
    "bun",
    "crp",
    "scr",
    "cholesterol",
    "ast",
    "alt",
    "ggt",
    "alp",
    "weight_kg",
    "height",
    "waist",
    "age",
    "mec_weight",
];

/// Target column name shared by both bundled schemas.
pub const TARGET_COLUMN: &str = "pbf";

/// An in-memory regression table: feature rows plus a real-valued target.
/// Immutable after construction; all values are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub feature_names: Vec<String>,
    /// Row-major feature matrix, one inner vector per observation.
    pub rows: Vec<Vec<f64>>,
    pub target: Vec<f64>,
    pub target_name: String,
}

impl Dataset {
    /// Construct with full invariant validation: consistent row widths,
    /// matching target length, at least one feature, all values finite.
    pub fn new(
        name: impl Into<String>,
        feature_names: Vec<String>,
        rows: Vec<Vec<f64>>,
        target: Vec<f64>,
        target_name: impl Into<String>,
    ) -> Result<Self> {
        if feature_names.is_empty() {
            return Err(Error::Config("dataset needs at least one feature".into()));
        }
        let width = feature_names.len();
        for row in &rows {
            if row.len() != width {
                return Err(Error::WidthMismatch {
                    expected: width,
                    got: row.len(),
                });
            }
        }
        if rows.len() != target.len() {
            return Err(Error::LengthMismatch {
                targets: target.len(),
                predictions: rows.len(),
            });
        }
        let all_finite = rows.iter().flatten().chain(&target).all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::MalformedCells("non-finite value".into()));
        }
        Ok(Self {
            name: name.into(),
            feature_names,
            rows,
            target,
            target_name: target_name.into(),
        })
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    fn take_rows(&self, indices: &[usize], suffix: &str) -> Dataset {
        Dataset {
            name: format!("{} ({suffix})", self.name),
            feature_names: self.feature_names.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            target: indices.iter().map(|&i| self.target[i]).collect(),
            target_name: self.target_name.clone(),
        }
    }
}

/// A seeded train/test partition of one [`Dataset`].
#[derive(Debug, Clone)]
pub struct SplitDataset {
    pub train: Dataset,
    pub test: Dataset,
    pub ratio: f64,
    pub seed: u64,
}

/// Load a CSV file with a header row; every non-target column becomes a
/// feature in header order. Cells that fail to parse as finite numbers are
/// collected and reported together as `(row, column)` pairs, 1-based data
/// rows.
pub fn load_csv(path: &Path, target: &str) -> Result<Dataset> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(file);

    let headers: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let target_idx = headers
        .iter()
        .position(|h| h == target)
        .ok_or_else(|| Error::MissingTarget(target.to_string()))?;
    let feature_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != target_idx)
        .map(|(_, h)| h.clone())
        .collect();
    if feature_names.is_empty() {
        return Err(Error::Config(
            "csv has a target column but no feature columns".into(),
        ));
    }

    let mut rows = Vec::new();
    let mut targets = Vec::new();
    let mut bad: Vec<String> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let mut row = Vec::with_capacity(feature_names.len());
        let mut target_value = f64::NAN;
        for (j, cell) in record.iter().enumerate() {
            let parsed = if cell.is_empty() {
                None
            } else {
                cell.parse::<f64>().ok().filter(|v| v.is_finite())
            };
            let Some(value) = parsed else {
                if bad.len() < 20 {
                    bad.push(format!("({}, {})", i + 1, headers[j]));
                } else if bad.len() == 20 {
                    bad.push("…".into());
                }
                continue;
            };
            if j == target_idx {
                target_value = value;
            } else {
                row.push(value);
            }
        }
        rows.push(row);
        targets.push(target_value);
    }
    if !bad.is_empty() {
        return Err(Error::MalformedCells(bad.join(", ")));
    }

    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into());
    Dataset::new(name, feature_names, rows, targets, target)
}

/// Write a dataset back to CSV with a header row. Values are printed with
/// the shortest representation that parses back to the identical float, so
/// a load→save→load round trip is exact.
pub fn save_csv(dataset: &Dataset, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut writer = csv::Writer::from_writer(file);
    let mut header: Vec<&str> = dataset.feature_names.iter().map(String::as_str).collect();
    header.push(&dataset.target_name);
    writer.write_record(&header)?;
    for (row, target) in dataset.rows.iter().zip(&dataset.target) {
        let mut record: Vec<String> = row.iter().map(f64::to_string).collect();
        record.push(target.to_string());
        writer.write_record(&record)?;
    }
    writer.flush().map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(())
}

/// Partition rows into train/test by a seeded uniform permutation.
/// Train size is `round(ratio × rows)` clamped so neither side is empty;
/// each side keeps the original row order.
pub fn split(dataset: &Dataset, ratio: f64, seed: u64) -> Result<SplitDataset> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::Config(format!(
            "split ratio must be in (0, 1), got {ratio}"
        )));
    }
    let n = dataset.n_rows();
    if n < 2 {
        return Err(Error::Config(format!(
            "cannot split a dataset with {n} row(s)"
        )));
    }
    let train_size = ((ratio * n as f64).round() as usize).clamp(1, n - 1);

    let mut indices: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    indices.shuffle(&mut rng);
    let (train_idx, test_idx) = indices.split_at_mut(train_size);
    train_idx.sort_unstable();
    test_idx.sort_unstable();

    Ok(SplitDataset {
        train: dataset.take_rows(train_idx, "train"),
        test: dataset.take_rows(test_idx, "test"),
        ratio,
        seed,
    })
}

/// Standardize every feature column to zero mean and unit (population)
/// standard deviation using train statistics only; the same affine map is
/// applied to the test side. Zero-variance columns map to all-zeros. The
/// target is left unscaled.
pub fn normalize(split: &SplitDataset) -> SplitDataset {
    let width = split.train.n_features();
    let n = split.train.n_rows().max(1) as f64;
    let mut mean = vec![0.0; width];
    let mut sd = vec![0.0; width];
    for row in &split.train.rows {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= n;
    }
    for row in &split.train.rows {
        for ((s, v), m) in sd.iter_mut().zip(row).zip(&mean) {
            *s += (v - m) * (v - m);
        }
    }
    for s in &mut sd {
        *s = (*s / n).sqrt();
    }

    let transform = |dataset: &Dataset| Dataset {
        rows: dataset
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&mean)
                    .zip(&sd)
                    .map(|((v, m), s)| if *s > 0.0 { (v - m) / s } else { 0.0 })
                    .collect()
            })
            .collect(),
        ..dataset.clone()
    };

    SplitDataset {
        train: transform(&split.train),
        test: transform(&split.test),
        ratio: split.ratio,
        seed: split.seed,
    }
}

/// Restrict a dataset to the columns where `mask` is set, preserving row
/// order and the target.
pub fn project(dataset: &Dataset, mask: &[bool]) -> Result<Dataset> {
    if mask.len() != dataset.n_features() {
        return Err(Error::MaskLength {
            mask: mask.len(),
            features: dataset.n_features(),
        });
    }
    if !mask.iter().any(|&b| b) {
        return Err(Error::EmptyMask);
    }
    let keep: Vec<usize> = (0..mask.len()).filter(|&i| mask[i]).collect();
    Ok(Dataset {
        name: dataset.name.clone(),
        feature_names: keep
            .iter()
            .map(|&i| dataset.feature_names[i].clone())
            .collect(),
        rows: dataset
            .rows
            .iter()
            .map(|row| keep.iter().map(|&i| row[i]).collect())
            .collect(),
        target: dataset.target.clone(),
        target_name: dataset.target_name.clone(),
    })
}
