//! Experiment runner: load, split, fit every configured model, evaluate, and
//! write `results.json`, `curve.csv` and one `confusion_<model>.csv` per model.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::boosting::{fit_adaboost_traced, BoostConfig, Variant};
use crate::dataset::{load_csv, train_test_split, Dataset, PreprocessConfig, SplitSpec};
use crate::error::Error;
use crate::gradboost::{fit_gradboost, GbConfig};
use crate::metrics::{accuracy, ConfusionMatrix, LearningCurve};

pub const LIBRARY_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const RESULTS_FILE: &str = "results.json";
pub const CURVE_FILE: &str = "curve.csv";
/// Tolerance used for the reported `rounds_to_settle`.
pub const SETTLE_TOLERANCE: f64 = 0.02;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{0}")]
    Data(#[source] Error),
    #[error("model '{model}' failed: {source}")]
    Training {
        model: String,
        #[source]
        source: Error,
    },
    #[error("cannot write {}: {source}", path.display())]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl HarnessError {
    /// Process exit code: 1 config, 2 data, 3 training.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Output { .. } => 1,
            HarnessError::Data(_) => 2,
            HarnessError::Training { .. } => 3,
        }
    }
}

fn output_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Output {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetConfig {
    pub path: PathBuf,
    #[serde(flatten)]
    pub preprocess: PreprocessConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ModelKind {
    Adaboost(BoostConfig),
    Gradboost(GbConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub name: String,
    pub model: ModelKind,
}

impl ModelSpec {
    /// Builds a model from a short name: `standard`/`adaboost`, `dwa`, or
    /// `gradboost`/`gb`. `estimators` sets rounds or stages.
    pub fn from_name(name: &str, estimators: usize) -> Result<Self, HarnessError> {
        let model = match name {
            "standard" | "adaboost" => ModelKind::Adaboost(BoostConfig {
                rounds: estimators,
                ..BoostConfig::standard()
            }),
            "dwa" => ModelKind::Adaboost(BoostConfig {
                rounds: estimators,
                ..BoostConfig::dwa()
            }),
            "gradboost" | "gb" => ModelKind::Gradboost(GbConfig {
                stages: estimators,
                ..GbConfig::default()
            }),
            other => {
                return Err(HarnessError::Config(format!(
                    "unknown model '{other}' (expected standard, dwa or gradboost)"
                )))
            }
        };
        Ok(Self {
            name: name.to_string(),
            model,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dataset: DatasetConfig,
    #[serde(default)]
    pub split: SplitSpec,
    pub models: Vec<ModelSpec>,
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    /// Reads a JSON config. Relative `dataset.path` and `output_dir` are
    /// resolved against the directory holding the config file.
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self, HarnessError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut config: Self = serde_json::from_str(&text)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        if config.dataset.path.is_relative() {
            config.dataset.path = base.join(&config.dataset.path);
        }
        if config.output_dir.is_relative() {
            config.output_dir = base.join(&config.output_dir);
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.models.is_empty() {
            return Err(HarnessError::Config(
                "at least one model is required".into(),
            ));
        }
        let mut seen = HashSet::new();
        for m in &self.models {
            if m.name.is_empty()
                || !m
                    .name
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
            {
                return Err(HarnessError::Config(format!(
                    "model name '{}' must be non-empty and use only [A-Za-z0-9_-]",
                    m.name
                )));
            }
            if !seen.insert(&m.name) {
                return Err(HarnessError::Config(format!(
                    "duplicate model name '{}'",
                    m.name
                )));
            }
            let check = match &m.model {
                ModelKind::Adaboost(c) => c.validate(),
                ModelKind::Gradboost(c) => c.validate(),
            };
            check.map_err(|e| HarnessError::Config(format!("model '{}': {e}", m.name)))?;
        }
        let f = self.split.test_fraction;
        if !(f > 0.0 && f < 1.0) {
            return Err(HarnessError::Config(format!(
                "test_fraction must lie in (0, 1), got {f}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub path: PathBuf,
    pub n_samples: usize,
    pub n_features: usize,
    pub n_classes: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub feature_names: Vec<String>,
    pub class_names: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundSummary {
    pub iteration: usize,
    pub epsilon: f64,
    pub alpha: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageSummary {
    pub stage: usize,
    pub gamma: f64,
    pub train_loss: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelStatus {
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelReport {
    pub name: String,
    pub kind: String,
    pub status: ModelStatus,
    pub error: Option<String>,
    /// Overall accuracy on the test part.
    pub test_accuracy: Option<f64>,
    pub train_accuracy: Option<f64>,
    /// Accepted rounds (AdaBoost) or stages (gradient boosting).
    pub accepted_rounds: usize,
    pub stopped_early: Option<String>,
    /// First round whose test accuracy is within `SETTLE_TOLERANCE` of the final one.
    pub rounds_to_settle: Option<usize>,
    pub rounds: Vec<RoundSummary>,
    pub stages: Vec<StageSummary>,
    pub confusion: Option<ConfusionMatrix>,
    pub curve: LearningCurve,
    pub duration_seconds: f64,
}

impl ModelReport {
    fn failed(name: &str, kind: &str, error: String, duration_seconds: f64) -> Self {
        Self {
            name: name.to_string(),
            kind: kind.to_string(),
            status: ModelStatus::Failed,
            error: Some(error),
            test_accuracy: None,
            train_accuracy: None,
            accepted_rounds: 0,
            stopped_early: None,
            rounds_to_settle: None,
            rounds: Vec::new(),
            stages: Vec::new(),
            confusion: None,
            curve: LearningCurve::default(),
            duration_seconds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub library_version: String,
    pub config: ExperimentConfig,
    pub dataset: DatasetSummary,
    pub models: Vec<ModelReport>,
    /// True when at least one model failed.
    pub partial: bool,
    pub duration_seconds: f64,
}

impl ReportBundle {
    pub fn model(&self, name: &str) -> Option<&ModelReport> {
        self.models.iter().find(|m| m.name == name)
    }
}

fn kind_label(kind: &ModelKind) -> &'static str {
    match kind {
        ModelKind::Adaboost(c) if c.variant == Variant::Dwa => "adaboost_dwa",
        ModelKind::Adaboost(_) => "adaboost",
        ModelKind::Gradboost(_) => "gradboost",
    }
}

/// Fits and scores one model on a fixed split.
pub fn evaluate_model(spec: &ModelSpec, train: &Dataset, test: &Dataset) -> ModelReport {
    let started = Instant::now();
    let kind = kind_label(&spec.model);
    match evaluate_inner(spec, train, test, kind) {
        Ok(mut report) => {
            report.duration_seconds = started.elapsed().as_secs_f64();
            report
        }
        Err(e) => ModelReport::failed(
            &spec.name,
            kind,
            e.to_string(),
            started.elapsed().as_secs_f64(),
        ),
    }
}

fn evaluate_inner(
    spec: &ModelSpec,
    train: &Dataset,
    test: &Dataset,
    kind: &str,
) -> crate::Result<ModelReport> {
    let (test_pred, train_pred, staged_train, staged_test, rounds, stages, stopped_early) =
        match &spec.model {
            ModelKind::Adaboost(config) => {
                let (model, trace) = fit_adaboost_traced(train, config)?;
                let rounds = trace
                    .iterations
                    .iter()
                    .map(|r| RoundSummary {
                        iteration: r.iteration,
                        epsilon: r.epsilon,
                        alpha: r.alpha,
                        accepted: r.accepted,
                    })
                    .collect();
                (
                    model.predict_all(test),
                    model.predict_all(train),
                    model.staged_accuracy(train),
                    model.staged_accuracy(test),
                    rounds,
                    Vec::new(),
                    trace.stopped_early,
                )
            }
            ModelKind::Gradboost(config) => {
                let model = fit_gradboost(train, config)?;
                let stages = model
                    .stages
                    .iter()
                    .zip(&model.stage_losses)
                    .enumerate()
                    .map(|(m, (s, &loss))| StageSummary {
                        stage: m + 1,
                        gamma: s.gamma,
                        train_loss: loss,
                    })
                    .collect();
                (
                    model.predict_all(test),
                    model.predict_all(train),
                    model.staged_accuracy(train),
                    model.staged_accuracy(test),
                    Vec::new(),
                    stages,
                    None,
                )
            }
        };

    let curve = LearningCurve::from_staged(&staged_train, &staged_test)?;
    Ok(ModelReport {
        name: spec.name.clone(),
        kind: kind.to_string(),
        status: ModelStatus::Ok,
        error: None,
        test_accuracy: Some(accuracy(&test_pred, test.labels())?),
        train_accuracy: Some(accuracy(&train_pred, train.labels())?),
        accepted_rounds: curve.len(),
        stopped_early,
        rounds_to_settle: curve.rounds_to_settle(SETTLE_TOLERANCE),
        rounds,
        stages,
        confusion: Some(ConfusionMatrix::new(
            &test_pred,
            test.labels(),
            test.n_classes(),
        )?),
        curve,
        duration_seconds: 0.0,
    })
}

/// Loads, splits and fits every model without touching the filesystem
/// beyond reading the dataset. Models are fitted on separate threads;
/// results come back in configuration order.
pub fn evaluate_experiment(config: &ExperimentConfig) -> Result<ReportBundle, HarnessError> {
    config.validate()?;
    let started = Instant::now();
    let data = load_csv(&config.dataset.path, &config.dataset.preprocess).map_err(|e| match e {
        Error::Config(msg) => HarnessError::Config(msg),
        other => HarnessError::Data(other),
    })?;
    let (train, test) = train_test_split(&data, &config.split).map_err(|e| match e {
        Error::Config(msg) => HarnessError::Config(msg),
        other => HarnessError::Data(other),
    })?;

    let models: Vec<ModelReport> = std::thread::scope(|scope| {
        let handles: Vec<_> = config
            .models
            .iter()
            .map(|spec| {
                let (train, test) = (&train, &test);
                scope.spawn(move || evaluate_model(spec, train, test))
            })
            .collect();
        handles
            .into_iter()
            .zip(&config.models)
            .map(|(h, spec)| {
                h.join().unwrap_or_else(|_| {
                    ModelReport::failed(
                        &spec.name,
                        kind_label(&spec.model),
                        "fit panicked".into(),
                        0.0,
                    )
                })
            })
            .collect()
    });

    let partial = models.iter().any(|m| m.status == ModelStatus::Failed);
    Ok(ReportBundle {
        library_version: LIBRARY_VERSION.to_string(),
        config: config.clone(),
        dataset: DatasetSummary {
            path: config.dataset.path.clone(),
            n_samples: data.n_samples(),
            n_features: data.n_features(),
            n_classes: data.n_classes(),
            n_train: train.n_samples(),
            n_test: test.n_samples(),
            feature_names: data.feature_names().to_vec(),
            class_names: data.class_names().to_vec(),
        },
        models,
        partial,
        duration_seconds: started.elapsed().as_secs_f64(),
    })
}

/// Runs the experiment and writes every report file into `config.output_dir`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ReportBundle, HarnessError> {
    let bundle = evaluate_experiment(config)?;
    emit_reports(&bundle, &config.output_dir)?;
    Ok(bundle)
}

/// Writes `results.json`, `curve.csv` and `confusion_<model>.csv`; returns the paths written.
pub fn emit_reports(bundle: &ReportBundle, dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    fs::create_dir_all(dir).map_err(output_err(dir))?;
    let mut written = Vec::new();

    let results = dir.join(RESULTS_FILE);
    let mut json = serde_json::to_string_pretty(bundle)
        .map_err(|e| HarnessError::Config(format!("cannot serialize report: {e}")))?;
    json.push('\n');
    fs::write(&results, json).map_err(output_err(&results))?;
    written.push(results);

    written.push(write_curve_csv(bundle, dir)?);

    for m in &bundle.models {
        let Some(cm) = &m.confusion else { continue };
        let path = dir.join(format!("confusion_{}.csv", m.name));
        write_confusion_csv(cm, &bundle.dataset.class_names, &path)?;
        written.push(path);
    }
    Ok(written)
}

/// `curve.csv` with columns `model,round,train_accuracy,test_accuracy`.
pub fn write_curve_csv(bundle: &ReportBundle, dir: &Path) -> Result<PathBuf, HarnessError> {
    fs::create_dir_all(dir).map_err(output_err(dir))?;
    let path = dir.join(CURVE_FILE);
    let io = |e: csv::Error| HarnessError::Output {
        path: path.clone(),
        source: e.into(),
    };
    let mut w = csv::Writer::from_path(&path).map_err(io)?;
    w.write_record(["model", "round", "train_accuracy", "test_accuracy"])
        .map_err(io)?;
    for m in &bundle.models {
        for p in m.curve.points() {
            w.write_record([
                m.name.clone(),
                p.round.to_string(),
                p.train_accuracy.to_string(),
                p.test_accuracy.to_string(),
            ])
            .map_err(io)?;
        }
    }
    w.flush().map_err(output_err(&path))?;
    Ok(path)
}

fn write_confusion_csv(
    cm: &ConfusionMatrix,
    class_names: &[String],
    path: &Path,
) -> Result<(), HarnessError> {
    let io = |e: csv::Error| HarnessError::Output {
        path: path.to_path_buf(),
        source: e.into(),
    };
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(class_names).map_err(io)?;
    for row in cm.counts() {
        w.write_record(row.iter().map(u64::to_string)).map_err(io)?;
    }
    w.flush().map_err(output_err(path))?;
    Ok(())
}
