use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use boostlab::boosting::SoftMargin;
use boostlab::dataset::{LabelColumn, NumericImpute, PreprocessConfig, SplitSpec};
use boostlab::harness::{
    emit_reports, evaluate_experiment, write_curve_csv, DatasetConfig, ExperimentConfig,
    HarnessError, ModelKind, ModelSpec, ModelStatus, ReportBundle,
};
use boostlab::weak_learners::WeakLearnerSpec;

#[derive(Parser)]
#[command(
    name = "boostlab",
    version,
    about = "AdaBoost vs dynamic-weight AdaBoost experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a JSON config file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Fit the listed models on one CSV and write every report.
    Compare(CompareArgs),
    /// Same as `compare` but only writes curve.csv.
    Curve(CompareArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Base {
    Gnb,
    Stump,
}

#[derive(Clone, Copy, ValueEnum)]
enum Impute {
    Mean,
    Median,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long = "label-col", default_value = "Class")]
    label_col: String,
    /// Comma-separated: standard, dwa, gradboost.
    #[arg(long, value_delimiter = ',', default_value = "standard,dwa")]
    models: Vec<String>,
    /// Boosting rounds (AdaBoost) or stages (gradient boosting).
    #[arg(long, default_value_t = 50)]
    estimators: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long = "test-fraction", default_value_t = 0.3)]
    test_fraction: f64,
    #[arg(long)]
    stratified: bool,
    #[arg(long, value_enum, default_value_t = Base::Gnb)]
    base: Base,
    /// Cap AdaBoost instance weights at SCALE / N.
    #[arg(long = "soft-margin", value_name = "SCALE")]
    soft_margin: Option<f64>,
    #[arg(long, default_value_t = ',')]
    delimiter: char,
    #[arg(long = "drop-col")]
    drop_col: Vec<String>,
    #[arg(long, value_enum, default_value_t = Impute::Mean)]
    impute: Impute,
    #[arg(long = "keep-duplicates")]
    keep_duplicates: bool,
    #[arg(long, default_value = "boostlab-out")]
    out: PathBuf,
}

impl CompareArgs {
    fn to_config(&self) -> Result<ExperimentConfig, HarnessError> {
        // a bare number selects the column by position
        let label_column = match self.label_col.parse::<usize>() {
            Ok(i) => LabelColumn::Index(i),
            Err(_) => LabelColumn::Name(self.label_col.clone()),
        };
        let models = self
            .models
            .iter()
            .map(|name| {
                let mut spec = ModelSpec::from_name(name.trim(), self.estimators)?;
                if let ModelKind::Adaboost(c) = &mut spec.model {
                    c.base = match self.base {
                        Base::Gnb => WeakLearnerSpec::default(),
                        Base::Stump => WeakLearnerSpec::Stump,
                    };
                    c.soft_margin_cap = self.soft_margin.map(|scale| SoftMargin::Scaled { scale });
                }
                Ok(spec)
            })
            .collect::<Result<Vec<_>, HarnessError>>()?;
        let config = ExperimentConfig {
            dataset: DatasetConfig {
                path: self.data.clone(),
                preprocess: PreprocessConfig {
                    label_column,
                    impute_numeric: match self.impute {
                        Impute::Mean => NumericImpute::Mean,
                        Impute::Median => NumericImpute::Median,
                    },
                    drop_duplicates: !self.keep_duplicates,
                    drop_columns: self.drop_col.clone(),
                    delimiter: self.delimiter,
                    ..PreprocessConfig::default()
                },
            },
            split: SplitSpec {
                test_fraction: self.test_fraction,
                seed: self.seed,
                stratified: self.stratified,
            },
            models,
            output_dir: self.out.clone(),
        };
        config.validate()?;
        Ok(config)
    }
}

fn print_summary(bundle: &ReportBundle) {
    let d = &bundle.dataset;
    println!(
        "{}: {} rows, {} features, {} classes (train {}, test {})",
        d.path.display(),
        d.n_samples,
        d.n_features,
        d.n_classes,
        d.n_train,
        d.n_test
    );
    println!(
        "{:<16} {:>10} {:>10} {:>7}",
        "model", "test_acc", "train_acc", "rounds"
    );
    for m in &bundle.models {
        match m.status {
            ModelStatus::Ok => println!(
                "{:<16} {:>10.4} {:>10.4} {:>7}",
                m.name,
                m.test_accuracy.unwrap_or(f64::NAN),
                m.train_accuracy.unwrap_or(f64::NAN),
                m.accepted_rounds
            ),
            ModelStatus::Failed => println!(
                "{:<16} FAILED: {}",
                m.name,
                m.error.as_deref().unwrap_or("unknown error")
            ),
        }
    }
}

fn finish(bundle: &ReportBundle) -> Result<(), HarnessError> {
    print_summary(bundle);
    match bundle
        .models
        .iter()
        .find(|m| m.status == ModelStatus::Failed)
    {
        Some(m) => Err(HarnessError::Training {
            model: m.name.clone(),
            source: boostlab::Error::Training(m.error.clone().unwrap_or_default()),
        }),
        None => Ok(()),
    }
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Run { config } => {
            let config = ExperimentConfig::from_json_file(config)?;
            let bundle = evaluate_experiment(&config)?;
            emit_reports(&bundle, &config.output_dir)?;
            finish(&bundle)
        }
        Command::Compare(args) => {
            let config = args.to_config()?;
            let bundle = evaluate_experiment(&config)?;
            emit_reports(&bundle, &config.output_dir)?;
            finish(&bundle)
        }
        Command::Curve(args) => {
            let config = args.to_config()?;
            let bundle = evaluate_experiment(&config)?;
            let path = write_curve_csv(&bundle, &config.output_dir)?;
            println!("wrote {}", path.display());
            finish(&bundle)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("boostlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
