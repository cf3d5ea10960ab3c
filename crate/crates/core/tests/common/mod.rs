#![allow(dead_code)]

pub mod oracle;
pub mod synth;

use std::path::PathBuf;

/// Directory holding the real UCI tables, if any: `$BOOSTLAB_DATA_DIR`,
/// else `<workspace>/data`.
pub fn data_dir() -> PathBuf {
    std::env::var_os("BOOSTLAB_DATA_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data"))
}

/// First existing file among `names` inside [`data_dir`].
pub fn find_table(names: &[&str]) -> Option<PathBuf> {
    let dir = data_dir();
    names.iter().map(|n| dir.join(n)).find(|p| p.is_file())
}

pub const RICE_FILES: [&str; 3] = [
    "Rice_Cammeo_Osmancik.csv",
    "rice_cammeo_osmancik.csv",
    "rice.csv",
];
pub const DRY_BEAN_FILES: [&str; 3] = ["Dry_Bean_Dataset.csv", "dry_bean.csv", "drybean.csv"];

use boostlab::Dataset;
use rand::Rng;

/// Small stump-friendly instance: integer grid features, N <= 8, d <= 2,
/// K in {2, 3}, every class present.
pub fn small_instance<R: Rng>(rng: &mut R) -> Dataset {
    loop {
        let n = rng.gen_range(3..=8);
        let d = rng.gen_range(1..=2);
        let k = rng.gen_range(2..=3);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..d).map(|_| rng.gen_range(0..5) as f64).collect())
            .collect();
        let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
        if (0..k).any(|c| !labels.contains(&c)) {
            continue;
        }
        return Dataset::new(
            rows,
            labels,
            (0..d).map(|j| format!("x{j}")).collect(),
            (0..k).map(|c| format!("c{c}")).collect(),
        )
        .unwrap();
    }
}

pub fn rows_of(data: &Dataset) -> Vec<Vec<f64>> {
    data.rows().map(|r| r.to_vec()).collect()
}

/// Writes `data` as a CSV with a trailing `Class` column of class names.
pub fn write_csv(data: &Dataset, path: &std::path::Path) {
    let mut w = csv::Writer::from_path(path).unwrap();
    let mut header: Vec<String> = data.feature_names().to_vec();
    header.push("Class".into());
    w.write_record(&header).unwrap();
    for (row, &y) in data.rows().zip(data.labels()) {
        let mut rec: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        rec.push(data.class_names()[y].clone());
        w.write_record(&rec).unwrap();
    }
    w.flush().unwrap();
}

/// Parses `results.json` and drops every `duration_seconds` field.
pub fn results_without_durations(path: &std::path::Path) -> serde_json::Value {
    fn strip(v: &mut serde_json::Value) {
        match v {
            serde_json::Value::Object(map) => {
                map.remove("duration_seconds");
                map.values_mut().for_each(strip);
            }
            serde_json::Value::Array(items) => items.iter_mut().for_each(strip),
            _ => {}
        }
    }
    let mut v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    strip(&mut v);
    v
}

/// Data rows (header excluded) of `curve.csv` belonging to `model`.
pub fn curve_rows(path: &std::path::Path, model: &str) -> usize {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records()
        .filter(|rec| &rec.as_ref().unwrap()[0] == model)
        .count()
}
