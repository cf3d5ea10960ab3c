mod common;

use std::fs;
use std::path::Path;
use std::process::Command;

use boostlab::harness::{
    evaluate_experiment, run_experiment, DatasetConfig, ExperimentConfig, HarnessError, ModelSpec,
    ModelStatus, CURVE_FILE, RESULTS_FILE,
};
use boostlab::{PreprocessConfig, SplitSpec};

fn experiment(data: &Path, out: &Path, models: &[&str]) -> ExperimentConfig {
    ExperimentConfig {
        dataset: DatasetConfig {
            path: data.to_path_buf(),
            preprocess: PreprocessConfig::default(),
        },
        split: SplitSpec::default(),
        models: models
            .iter()
            .map(|m| ModelSpec::from_name(m, 15).unwrap())
            .collect(),
        output_dir: out.to_path_buf(),
    }
}

fn binary_csv(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("rice.csv");
    common::write_csv(
        &common::synth::rice_like(3)
            .subset(&(0..600).map(|i| i * 6).collect::<Vec<_>>())
            .unwrap(),
        &path,
    );
    path
}

#[test]
fn reports_are_consistent() {
    let dir = tempfile::tempdir().unwrap();
    let data = binary_csv(dir.path());
    let out = dir.path().join("out");
    let bundle =
        run_experiment(&experiment(&data, &out, &["standard", "dwa", "gradboost"])).unwrap();
    assert!(!bundle.partial);
    for m in &bundle.models {
        assert_eq!(m.status, ModelStatus::Ok);
        let cm = m.confusion.as_ref().unwrap();
        assert_eq!(cm.total() as usize, bundle.dataset.n_test);
        assert_eq!(cm.accuracy(), m.test_accuracy);
        assert_eq!(m.curve.len(), m.accepted_rounds);
        assert_eq!(
            common::curve_rows(&out.join(CURVE_FILE), &m.name),
            m.accepted_rounds
        );
        assert_eq!(
            m.curve.last().unwrap().test_accuracy,
            m.test_accuracy.unwrap()
        );
        let confusion = fs::read_to_string(out.join(format!("confusion_{}.csv", m.name))).unwrap();
        assert_eq!(confusion.lines().count(), 3);
        assert!(confusion.starts_with("Cammeo,Osmancik"));
    }
    assert!(out.join(RESULTS_FILE).is_file());
}

#[test]
fn gradboost_failure_on_multiclass_is_partial() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("beans.csv");
    let beans = common::synth::dry_bean_like(1);
    common::write_csv(
        &beans
            .subset(&(0..700).map(|i| i * 19).collect::<Vec<_>>())
            .unwrap(),
        &path,
    );
    let bundle = evaluate_experiment(&experiment(
        &path,
        &dir.path().join("o"),
        &["dwa", "gradboost"],
    ))
    .unwrap();
    assert!(bundle.partial);
    assert_eq!(bundle.model("dwa").unwrap().status, ModelStatus::Ok);
    let gb = bundle.model("gradboost").unwrap();
    assert_eq!(gb.status, ModelStatus::Failed);
    assert!(gb.error.is_some());
}

#[test]
fn missing_data_file_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let err = evaluate_experiment(&experiment(
        &dir.path().join("nope.csv"),
        dir.path(),
        &["dwa"],
    ))
    .unwrap_err();
    assert!(matches!(err, HarnessError::Data(_)));
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn config_file_paths_resolve_next_to_it() {
    let dir = tempfile::tempdir().unwrap();
    binary_csv(dir.path());
    let cfg = dir.path().join("exp.json");
    fs::write(
        &cfg,
        r#"{
  "dataset": {"path": "rice.csv", "label_column": "Class"},
  "split": {"test_fraction": 0.25, "seed": 9, "stratified": true},
  "models": [
    {"name": "plain", "model": {"type": "adaboost", "rounds": 5}},
    {"name": "capped", "model": {"type": "adaboost", "variant": "dwa", "rounds": 5, "soft_margin_cap": {"scale": 5.0}}},
    {"name": "gb", "model": {"type": "gradboost", "stages": 5}}
  ],
  "output_dir": "results"
}"#,
    )
    .unwrap();
    let config = ExperimentConfig::from_json_file(&cfg).unwrap();
    assert_eq!(config.dataset.path, dir.path().join("rice.csv"));
    let bundle = run_experiment(&config).unwrap();
    assert_eq!(bundle.models.len(), 3);
    assert!(dir.path().join("results").join(RESULTS_FILE).is_file());
}

#[test]
fn bad_config_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.json");
    fs::write(&cfg, r#"{"dataset": {"path": "x.csv"}, "models": [{"name": "a", "model": {"type": "adaboost", "roundz": 3}}], "output_dir": "o"}"#).unwrap();
    assert!(matches!(
        ExperimentConfig::from_json_file(&cfg),
        Err(HarnessError::Config(_))
    ));
}

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_boostlab"))
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let data = binary_csv(dir.path());
    let out = dir.path().join("cli");
    let ok = cli()
        .args(["compare", "--data"])
        .arg(&data)
        .args([
            "--models",
            "standard,dwa,gradboost",
            "--estimators",
            "8",
            "--out",
        ])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(
        ok.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&ok.stderr)
    );
    assert!(out.join(RESULTS_FILE).is_file());
    assert!(out.join("confusion_dwa.csv").is_file());

    let bad_flag = cli().args(["compare", "--bogus"]).output().unwrap();
    assert_eq!(bad_flag.status.code(), Some(1));
    let bad_model = cli()
        .args(["compare", "--data"])
        .arg(&data)
        .args(["--models", "forest"])
        .output()
        .unwrap();
    assert_eq!(bad_model.status.code(), Some(1));
    let no_file = cli()
        .args(["compare", "--data"])
        .arg(dir.path().join("missing.csv"))
        .output()
        .unwrap();
    assert_eq!(no_file.status.code(), Some(2));

    let beans = dir.path().join("beans.csv");
    common::write_csv(
        &common::synth::dry_bean_like(2)
            .subset(&(0..300).map(|i| i * 40).collect::<Vec<_>>())
            .unwrap(),
        &beans,
    );
    let partial = cli()
        .args(["compare", "--data"])
        .arg(&beans)
        .args(["--models", "dwa,gradboost", "--estimators", "5", "--out"])
        .arg(dir.path().join("p"))
        .output()
        .unwrap();
    assert_eq!(partial.status.code(), Some(3));

    let curve_dir = dir.path().join("curve");
    let curve = cli()
        .args(["curve", "--data"])
        .arg(&data)
        .args(["--estimators", "4", "--base", "stump", "--out"])
        .arg(&curve_dir)
        .output()
        .unwrap();
    assert_eq!(curve.status.code(), Some(0));
    assert!(curve_dir.join(CURVE_FILE).is_file());
    assert!(!curve_dir.join(RESULTS_FILE).exists());
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for name in ["rice.json", "dry_bean.json"] {
        let config = ExperimentConfig::from_json_file(dir.join(name)).unwrap();
        assert_eq!(config.models.len(), 2);
        assert_eq!(config.split.seed, 42);
    }
}
