//! Tabular datasets: CSV loading, cleaning, label encoding and seeded splits.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs::File;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::XorShift64Star;

/// Cell tokens (after trimming) that count as missing.
pub const MISSING_TOKENS: [&str; 3] = ["", "NA", "?"];

/// Dense numeric dataset with integer-encoded labels.
///
/// Features are stored row-major. Labels lie in `0..n_classes()` and index
/// into `class_names`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    features: Vec<f64>,
    n_samples: usize,
    n_features: usize,
    labels: Vec<usize>,
    feature_names: Vec<String>,
    class_names: Vec<String>,
}

impl Dataset {
    pub fn new(
        rows: Vec<Vec<f64>>,
        labels: Vec<usize>,
        feature_names: Vec<String>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        let n_features = feature_names.len();
        if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != n_features) {
            return Err(Error::data(format!(
                "row {i} has {} values, expected {n_features}",
                row.len()
            )));
        }
        let features = rows.into_iter().flatten().collect();
        Self::from_flat(features, labels, feature_names, class_names)
    }

    /// Builds a dataset from a row-major feature buffer.
    pub fn from_flat(
        features: Vec<f64>,
        labels: Vec<usize>,
        feature_names: Vec<String>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        let n_samples = labels.len();
        let n_features = feature_names.len();
        if n_samples == 0 {
            return Err(Error::data("dataset has no rows"));
        }
        if n_features == 0 {
            return Err(Error::data("dataset has no feature columns"));
        }
        if features.len() != n_samples * n_features {
            return Err(Error::data(format!(
                "feature buffer has {} values, expected {n_samples}x{n_features}",
                features.len()
            )));
        }
        if class_names.len() < 2 {
            return Err(Error::data(format!(
                "need at least 2 classes, found {}",
                class_names.len()
            )));
        }
        let distinct: HashSet<&String> = class_names.iter().collect();
        if distinct.len() != class_names.len() {
            return Err(Error::data("class names must be unique"));
        }
        if let Some(pos) = features.iter().position(|v| !v.is_finite()) {
            return Err(Error::data(format!(
                "non-finite feature value at row {}, column {}",
                pos / n_features,
                pos % n_features
            )));
        }
        if let Some(&bad) = labels.iter().find(|&&y| y >= class_names.len()) {
            return Err(Error::data(format!(
                "label {bad} out of range for {} classes",
                class_names.len()
            )));
        }
        Ok(Self {
            features,
            n_samples,
            n_features,
            labels,
            feature_names,
            class_names,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.features.chunks_exact(self.n_features)
    }

    pub fn value(&self, row: usize, feature: usize) -> f64 {
        self.features[row * self.n_features + feature]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    /// Number of rows per class, indexed by class.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes()];
        for &y in &self.labels {
            counts[y] += 1;
        }
        counts
    }

    /// Rows selected by `indices`, in that order. Names and class list are kept.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::data("subset would be empty"));
        }
        let mut features = Vec::with_capacity(indices.len() * self.n_features);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            if i >= self.n_samples {
                return Err(Error::data(format!("row index {i} out of range")));
            }
            features.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
        }
        Ok(Self {
            features,
            n_samples: labels.len(),
            n_features: self.n_features,
            labels,
            feature_names: self.feature_names.clone(),
            class_names: self.class_names.clone(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LabelColumn {
    Index(usize),
    Name(String),
}

impl Default for LabelColumn {
    fn default() -> Self {
        LabelColumn::Name("Class".to_string())
    }
}

impl std::fmt::Display for LabelColumn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LabelColumn::Index(i) => write!(f, "#{i}"),
            LabelColumn::Name(n) => f.write_str(n),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NumericImpute {
    #[default]
    Mean,
    Median,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CategoricalImpute {
    #[default]
    Mode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PreprocessConfig {
    pub label_column: LabelColumn,
    pub impute_numeric: NumericImpute,
    pub impute_categorical: CategoricalImpute,
    pub drop_duplicates: bool,
    /// Columns removed before anything else happens.
    pub drop_columns: Vec<String>,
    pub delimiter: char,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self {
            label_column: LabelColumn::default(),
            impute_numeric: NumericImpute::Mean,
            impute_categorical: CategoricalImpute::Mode,
            drop_duplicates: true,
            drop_columns: Vec::new(),
            delimiter: ',',
        }
    }
}

impl PreprocessConfig {
    pub fn with_label(label_column: LabelColumn) -> Self {
        Self {
            label_column,
            ..Self::default()
        }
    }
}

fn is_missing(cell: &str) -> bool {
    MISSING_TOKENS.contains(&cell)
}

pub fn load_csv(path: impl AsRef<Path>, config: &PreprocessConfig) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_csv(file, config)
}

/// Parses CSV text from any reader. See [`load_csv`].
pub fn read_csv<R: Read>(reader: R, config: &PreprocessConfig) -> Result<Dataset> {
    if !config.delimiter.is_ascii() {
        return Err(Error::config("delimiter must be an ASCII character"));
    }
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(config.delimiter as u8)
        .has_headers(true)
        .flexible(false)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header.is_empty() || header.iter().all(String::is_empty) {
        return Err(Error::data("missing header row"));
    }

    let label_idx = match &config.label_column {
        LabelColumn::Index(i) if *i < header.len() => *i,
        LabelColumn::Index(i) => {
            return Err(Error::data(format!(
                "label column index {i} out of range ({} columns)",
                header.len()
            )))
        }
        LabelColumn::Name(name) => {
            let hits: Vec<usize> = header
                .iter()
                .enumerate()
                .filter(|(_, h)| *h == name)
                .map(|(i, _)| i)
                .collect();
            match hits.as_slice() {
                [i] => *i,
                [] => return Err(Error::data(format!("label column '{name}' not found"))),
                _ => return Err(Error::data(format!("label column '{name}' is ambiguous"))),
            }
        }
    };

    for name in &config.drop_columns {
        if !header.contains(name) {
            return Err(Error::data(format!("column to drop '{name}' not found")));
        }
        if header[label_idx] == *name {
            return Err(Error::config(format!(
                "cannot drop the label column '{name}'"
            )));
        }
    }
    let feature_cols: Vec<usize> = (0..header.len())
        .filter(|&c| c != label_idx && !config.drop_columns.contains(&header[c]))
        .collect();
    if feature_cols.is_empty() {
        return Err(Error::data("no feature columns left"));
    }

    let mut records: Vec<Vec<String>> = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| match e.kind() {
            csv::ErrorKind::UnequalLengths { .. } => {
                Error::data(format!("malformed row {}: {e}", line + 1))
            }
            _ => Error::Csv(e),
        })?;
        records.push(rec.iter().map(str::to_string).collect());
    }
    if records.is_empty() {
        return Err(Error::data("no data rows"));
    }

    // Duplicates are judged on raw cells, before imputation can create new ones.
    if config.drop_duplicates {
        let mut seen: HashSet<Vec<&str>> = HashSet::with_capacity(records.len());
        let keep: Vec<bool> = records
            .iter()
            .map(|r| {
                let key: Vec<&str> = feature_cols
                    .iter()
                    .chain(std::iter::once(&label_idx))
                    .map(|&c| r[c].as_str())
                    .collect();
                seen.insert(key)
            })
            .collect();
        let mut it = keep.into_iter();
        records.retain(|_| it.next().unwrap_or(true));
    }

    if records.iter().all(|r| is_missing(&r[label_idx])) {
        return Err(Error::data(format!(
            "label column '{}' is entirely missing",
            header[label_idx]
        )));
    }
    records.retain(|r| !is_missing(&r[label_idx]));

    let class_names: Vec<String> = records
        .iter()
        .map(|r| r[label_idx].clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if class_names.len() < 2 {
        return Err(Error::data(format!(
            "need at least 2 classes, found {}",
            class_names.len()
        )));
    }
    let class_index: HashMap<&str, usize> = class_names
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_str(), i))
        .collect();
    let labels: Vec<usize> = records
        .iter()
        .map(|r| class_index[r[label_idx].as_str()])
        .collect();

    let n = records.len();
    let d = feature_cols.len();
    let mut features = vec![0.0; n * d];
    for (j, &c) in feature_cols.iter().enumerate() {
        let column: Vec<&str> = records.iter().map(|r| r[c].as_str()).collect();
        let values = encode_column(&column, config).map_err(|e| match e {
            Error::Data(msg) => Error::data(format!("column '{}': {msg}", header[c])),
            other => other,
        })?;
        for (i, v) in values.into_iter().enumerate() {
            features[i * d + j] = v;
        }
    }

    let feature_names = feature_cols.iter().map(|&c| header[c].clone()).collect();
    Dataset::from_flat(features, labels, feature_names, class_names)
}

/// Numeric columns are parsed and imputed; anything else is treated as
/// categorical and encoded by first appearance.
fn encode_column(cells: &[&str], config: &PreprocessConfig) -> Result<Vec<f64>> {
    let present: Vec<&str> = cells.iter().copied().filter(|c| !is_missing(c)).collect();
    if present.is_empty() {
        return Err(Error::data("every value is missing"));
    }
    let parsed: Option<Vec<f64>> = present
        .iter()
        .map(|c| c.parse::<f64>().ok().filter(|v| v.is_finite()))
        .collect();

    if let Some(values) = parsed {
        let fill = match config.impute_numeric {
            NumericImpute::Mean => values.iter().sum::<f64>() / values.len() as f64,
            NumericImpute::Median => median(values),
        };
        return Ok(cells
            .iter()
            .map(|c| {
                if is_missing(c) {
                    fill
                } else {
                    c.parse().unwrap_or(fill)
                }
            })
            .collect());
    }

    let mut codes: HashMap<&str, usize> = HashMap::new();
    let mut counts: Vec<usize> = Vec::new();
    for &c in &present {
        let next = codes.len();
        let code = *codes.entry(c).or_insert(next);
        if code == counts.len() {
            counts.push(0);
        }
        counts[code] += 1;
    }
    let CategoricalImpute::Mode = config.impute_categorical;
    // Ties go to the category seen first.
    let mode = counts
        .iter()
        .enumerate()
        .fold(0, |best, (k, &n)| if n > counts[best] { k } else { best });
    Ok(cells
        .iter()
        .map(|c| codes.get(c).copied().unwrap_or(mode) as f64)
        .collect())
}

fn median(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitSpec {
    pub test_fraction: f64,
    pub seed: u64,
    pub stratified: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            test_fraction: 0.3,
            seed: 42,
            stratified: false,
        }
    }
}

/// Row indices of the `(train, test)` partition, each sorted ascending.
///
/// The test part has `round(N * test_fraction)` rows. In stratified mode
/// each class contributes `floor(n_c * f)` rows plus one extra for the
/// classes with the largest remainders (ties to the lower class index)
/// until the total is reached.
pub fn split_indices(
    labels: &[usize],
    n_classes: usize,
    spec: &SplitSpec,
) -> Result<(Vec<usize>, Vec<usize>)> {
    let n = labels.len();
    let f = spec.test_fraction;
    if !(f > 0.0 && f < 1.0) {
        return Err(Error::config(format!(
            "test_fraction must lie in (0, 1), got {f}"
        )));
    }
    if n < 2 {
        return Err(Error::data("need at least 2 rows to split"));
    }
    let n_test = (n as f64 * f).round() as usize;
    if n_test == 0 || n_test >= n {
        return Err(Error::config(format!(
            "test_fraction {f} leaves an empty part for {n} rows"
        )));
    }

    let mut rng = XorShift64Star::new(spec.seed);
    let mut test = Vec::with_capacity(n_test);
    let mut train = Vec::with_capacity(n - n_test);

    if spec.stratified {
        let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
        for (i, &y) in labels.iter().enumerate() {
            by_class[y].push(i);
        }
        if let Some(k) = by_class.iter().position(|m| m.len() == 1) {
            return Err(Error::data(format!(
                "class {k} has a single member; stratified split needs at least 2"
            )));
        }
        let exact: Vec<f64> = by_class.iter().map(|m| m.len() as f64 * f).collect();
        let mut quota: Vec<usize> = exact.iter().map(|q| q.floor() as usize).collect();
        let mut order: Vec<usize> = (0..n_classes).collect();
        order.sort_by(|&a, &b| {
            let ra = exact[a] - exact[a].floor();
            let rb = exact[b] - exact[b].floor();
            rb.total_cmp(&ra).then(a.cmp(&b))
        });
        let mut missing = n_test.saturating_sub(quota.iter().sum());
        for &k in order.iter().cycle().take(order.len() * 2) {
            if missing == 0 {
                break;
            }
            if quota[k] < by_class[k].len() {
                quota[k] += 1;
                missing -= 1;
            }
        }
        for (members, q) in by_class.iter_mut().zip(quota) {
            rng.shuffle(members);
            test.extend_from_slice(&members[..q]);
            train.extend_from_slice(&members[q..]);
        }
    } else {
        let mut idx: Vec<usize> = (0..n).collect();
        rng.shuffle(&mut idx);
        test.extend_from_slice(&idx[..n_test]);
        train.extend_from_slice(&idx[n_test..]);
    }

    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

pub fn train_test_split(data: &Dataset, spec: &SplitSpec) -> Result<(Dataset, Dataset)> {
    let (train, test) = split_indices(data.labels(), data.n_classes(), spec)?;
    Ok((data.subset(&train)?, data.subset(&test)?))
}
