//! The demo operations as plain Rust returning serializable reports.

use serde::Serialize;

use boostlab::boosting::{
    alpha_from_error, clip_soft_margin, fit_adaboost_traced, update_weights_dynamic,
    update_weights_indicator, weighted_error, AlphaRule, BoostConfig, SoftMargin, Variant,
    WeightVector, DEFAULT_EPSILON_MIN,
};
use boostlab::gradboost::{fit_gradboost, GbConfig};
use boostlab::{train_test_split, Dataset, SplitSpec, WeakLearnerSpec};

use crate::toy::{generate, Shape};

pub const GRID: usize = 64;

#[derive(Debug, Serialize)]
pub struct Grid {
    pub size: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    /// Predicted class per cell, row-major from `y_min`.
    pub cells: Vec<usize>,
}

#[derive(Debug, Serialize)]
pub struct ModelRun {
    pub name: String,
    pub error: Option<String>,
    pub train_accuracy: Vec<f64>,
    pub test_accuracy: Vec<f64>,
    pub epsilons: Vec<f64>,
    pub alphas: Vec<f64>,
    pub grid: Option<Grid>,
}

#[derive(Debug, Serialize)]
pub struct Comparison {
    pub n_classes: usize,
    /// `[x, y, label, is_test]` per point.
    pub points: Vec<[f64; 4]>,
    pub models: Vec<ModelRun>,
}

pub struct CompareRequest<'a> {
    pub dataset: &'a str,
    pub n: usize,
    pub spread: f64,
    pub flip: f64,
    pub rounds: usize,
    pub base: &'a str,
    /// Soft-margin cap as a multiple of `1/N`; zero or less disables it.
    pub cap_scale: f64,
    pub seed: u64,
}

fn bounds(data: &Dataset) -> (f64, f64, f64, f64) {
    let mut b = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for r in data.rows() {
        b = (b.0.min(r[0]), b.1.max(r[0]), b.2.min(r[1]), b.3.max(r[1]));
    }
    let (px, py) = (0.1 * (b.1 - b.0), 0.1 * (b.3 - b.2));
    (b.0 - px, b.1 + px, b.2 - py, b.3 + py)
}

fn grid(data: &Dataset, predict: impl Fn(&[f64]) -> usize) -> Grid {
    let (x_min, x_max, y_min, y_max) = bounds(data);
    let step = |lo: f64, hi: f64, i: usize| lo + (hi - lo) * (i as f64 + 0.5) / GRID as f64;
    let mut cells = Vec::with_capacity(GRID * GRID);
    for iy in 0..GRID {
        for ix in 0..GRID {
            cells.push(predict(&[step(x_min, x_max, ix), step(y_min, y_max, iy)]));
        }
    }
    Grid {
        size: GRID,
        x_min,
        x_max,
        y_min,
        y_max,
        cells,
    }
}

fn failed(name: &str, e: impl ToString) -> ModelRun {
    ModelRun {
        name: name.into(),
        error: Some(e.to_string()),
        train_accuracy: Vec::new(),
        test_accuracy: Vec::new(),
        epsilons: Vec::new(),
        alphas: Vec::new(),
        grid: None,
    }
}

fn staged(v: Vec<(usize, f64)>) -> Vec<f64> {
    v.into_iter().map(|(_, a)| a).collect()
}

pub fn compare(req: &CompareRequest) -> Result<Comparison, String> {
    let shape = Shape::parse(req.dataset)?;
    let base = match req.base {
        "gnb" => WeakLearnerSpec::default(),
        "stump" => WeakLearnerSpec::Stump,
        other => return Err(format!("unknown base learner '{other}'")),
    };
    if req.rounds == 0 || req.rounds > 500 {
        return Err("rounds must lie in 1..=500".into());
    }
    let data = generate(shape, req.n, req.spread, req.flip, req.seed)?;
    let split = SplitSpec {
        test_fraction: 0.3,
        seed: req.seed,
        stratified: true,
    };
    let (train, test) = train_test_split(&data, &split).map_err(|e| e.to_string())?;

    let mut points: Vec<[f64; 4]> = train
        .rows()
        .zip(train.labels())
        .map(|(r, &y)| [r[0], r[1], y as f64, 0.0])
        .collect();
    points.extend(
        test.rows()
            .zip(test.labels())
            .map(|(r, &y)| [r[0], r[1], y as f64, 1.0]),
    );

    let mut models = Vec::new();
    for (name, variant) in [("standard", Variant::Standard), ("dwa", Variant::Dwa)] {
        let config = BoostConfig {
            rounds: req.rounds,
            variant,
            base,
            soft_margin_cap: (req.cap_scale > 0.0).then_some(SoftMargin::Scaled {
                scale: req.cap_scale.max(1.0),
            }),
            ..BoostConfig::default()
        };
        models.push(match fit_adaboost_traced(&train, &config) {
            Ok((ens, trace)) => {
                let accepted = trace.iterations.iter().filter(|r| r.accepted);
                ModelRun {
                    name: name.into(),
                    error: None,
                    train_accuracy: staged(ens.staged_accuracy(&train)),
                    test_accuracy: staged(ens.staged_accuracy(&test)),
                    epsilons: accepted.clone().map(|r| r.epsilon).collect(),
                    alphas: accepted.map(|r| r.alpha).collect(),
                    grid: Some(grid(&data, |x| ens.predict(x))),
                }
            }
            Err(e) => failed(name, e),
        });
    }
    if shape.n_classes() == 2 {
        let config = GbConfig {
            stages: req.rounds,
            ..GbConfig::default()
        };
        models.push(match fit_gradboost(&train, &config) {
            Ok(gb) => ModelRun {
                name: "gradboost".into(),
                error: None,
                train_accuracy: staged(gb.staged_accuracy(&train)),
                test_accuracy: staged(gb.staged_accuracy(&test)),
                epsilons: Vec::new(),
                alphas: gb.stages.iter().map(|s| s.gamma).collect(),
                grid: Some(grid(&data, |x| gb.predict(x).1)),
            },
            Err(e) => failed("gradboost", e),
        });
    }
    Ok(Comparison {
        n_classes: shape.n_classes(),
        points,
        models,
    })
}

#[derive(Debug, Serialize)]
pub struct WeightStep {
    pub epsilon: f64,
    pub alpha: f64,
    pub before: Vec<f64>,
    pub indicator: Vec<f64>,
    pub dynamic: Vec<f64>,
    pub cap: Option<f64>,
    pub indicator_capped: Option<Vec<f64>>,
    pub dynamic_capped: Option<Vec<f64>>,
}

/// One binary boosting round from raw weights and each instance's
/// probability of its true class. An instance counts as misclassified when
/// that probability is below one half.
pub fn weight_step(weights: &[f64], p_true: &[f64], cap_scale: f64) -> Result<WeightStep, String> {
    if weights.len() != p_true.len() {
        return Err("weights and probabilities differ in length".into());
    }
    if p_true.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err("probabilities must lie in [0, 1]".into());
    }
    let w = WeightVector::normalized(weights.to_vec()).map_err(|e| e.to_string())?;
    let correct: Vec<bool> = p_true.iter().map(|&p| p >= 0.5).collect();
    let hard: Vec<usize> = correct.iter().map(|&c| usize::from(!c)).collect();
    let epsilon = weighted_error(&hard, &vec![0; hard.len()], w.as_slice());
    let alpha = alpha_from_error(epsilon, 2, AlphaRule::BinaryHalfLog, DEFAULT_EPSILON_MIN);
    if alpha <= 0.0 {
        return Err(format!(
            "weighted error {epsilon:.3} is no better than chance"
        ));
    }
    let errors: Vec<f64> = p_true.iter().map(|p| 1.0 - p).collect();
    let indicator = update_weights_indicator(&w, alpha, &correct).map_err(|e| e.to_string())?;
    let dynamic = update_weights_dynamic(&w, alpha, &errors).map_err(|e| e.to_string())?;
    let cap = (cap_scale > 0.0).then(|| {
        SoftMargin::Scaled {
            scale: cap_scale.max(1.0),
        }
        .cap_for(w.len())
    });
    let clip = |v: &WeightVector| match cap {
        Some(c) => clip_soft_margin(v, c)
            .map(|x| Some(x.into_inner()))
            .map_err(|e| e.to_string()),
        None => Ok(None),
    };
    Ok(WeightStep {
        epsilon,
        alpha,
        before: w.as_slice().to_vec(),
        indicator_capped: clip(&indicator)?,
        dynamic_capped: clip(&dynamic)?,
        indicator: indicator.into_inner(),
        dynamic: dynamic.into_inner(),
        cap,
    })
}

#[derive(Debug, Serialize)]
pub struct AlphaCurve {
    pub n_classes: usize,
    pub epsilon: Vec<f64>,
    pub binary: Vec<f64>,
    pub samme: Vec<f64>,
}

/// Classifier weight against error over `(0, 1)` for both rules.
pub fn alpha_curve(n_classes: usize, samples: usize) -> Result<AlphaCurve, String> {
    if n_classes < 2 || samples < 2 {
        return Err("need at least 2 classes and 2 samples".into());
    }
    let epsilon: Vec<f64> = (1..=samples)
        .map(|i| i as f64 / (samples + 1) as f64)
        .collect();
    let rule = |r| {
        epsilon
            .iter()
            .map(|&e| alpha_from_error(e, n_classes, r, DEFAULT_EPSILON_MIN))
            .collect()
    };
    Ok(AlphaCurve {
        n_classes,
        binary: rule(AlphaRule::BinaryHalfLog),
        samme: rule(AlphaRule::Samme),
        epsilon,
    })
}
