//! Binary gradient boosting on the logistic loss.
//!
//! The model is an additive score `F(x) = f0 + sum_m gamma_m * h_m(x)`. Each
//! stage fits a least-squares regression stump `h_m` to the pseudo-residuals
//! of the current scores, then picks the step `gamma_m` in `[0, gamma_max]`
//! by golden-section search on the training loss.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::weak_learners::{midpoint, TIE_TOLERANCE};

pub const DEFAULT_STAGES: usize = 100;
pub const DEFAULT_GAMMA_MAX: f64 = 10.0;
pub const DEFAULT_LINE_SEARCH_TOLERANCE: f64 = 1e-6;
const PRIOR_CLAMP: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Loss {
    #[default]
    Logistic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GbConfig {
    pub stages: usize,
    pub loss: Loss,
    /// Upper end of the step-size interval `[0, gamma_max]`.
    pub gamma_max: f64,
    pub line_search_tolerance: f64,
}

impl Default for GbConfig {
    fn default() -> Self {
        Self {
            stages: DEFAULT_STAGES,
            loss: Loss::Logistic,
            gamma_max: DEFAULT_GAMMA_MAX,
            line_search_tolerance: DEFAULT_LINE_SEARCH_TOLERANCE,
        }
    }
}

impl GbConfig {
    pub fn validate(&self) -> Result<()> {
        if self.stages == 0 {
            return Err(Error::config("stages must be at least 1"));
        }
        if !(self.gamma_max > 0.0 && self.gamma_max.is_finite()) {
            return Err(Error::config(format!(
                "gamma_max must be positive, got {}",
                self.gamma_max
            )));
        }
        if !(self.line_search_tolerance > 0.0 && self.line_search_tolerance.is_finite()) {
            return Err(Error::config(format!(
                "line_search_tolerance must be positive, got {}",
                self.line_search_tolerance
            )));
        }
        Ok(())
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// `sum_i ln(1 + exp(-y_i * F_i))` for labels in {-1, +1}.
pub fn logistic_loss(labels: &[f64], scores: &[f64]) -> f64 {
    debug_assert_eq!(labels.len(), scores.len());
    labels
        .iter()
        .zip(scores)
        .map(|(y, f)| softplus(-y * f))
        .sum()
}

/// Negative gradient of the logistic loss: `y_i / (1 + exp(y_i * F_i))`.
pub fn pseudo_residuals(labels: &[f64], scores: &[f64]) -> Vec<f64> {
    debug_assert_eq!(labels.len(), scores.len());
    labels
        .iter()
        .zip(scores)
        .map(|(y, f)| y / (1.0 + (y * f).exp()))
        .collect()
}

fn loss_along(labels: &[f64], scores: &[f64], direction: &[f64], gamma: f64) -> f64 {
    labels
        .iter()
        .zip(scores.iter().zip(direction))
        .map(|(y, (f, h))| softplus(-y * (f + gamma * h)))
        .sum()
}

/// Step size in `[0, gamma_max]` minimizing `L(y, F + gamma * h)`.
///
/// Golden-section search narrows the bracket to `line_search_tolerance`;
/// the midpoint is then compared against both ends so the result never
/// does worse than `gamma = 0`.
pub fn line_search_gamma(
    labels: &[f64],
    scores: &[f64],
    direction: &[f64],
    config: &GbConfig,
) -> Result<f64> {
    config.validate()?;
    if labels.len() != scores.len() || labels.len() != direction.len() {
        return Err(Error::training("line search inputs differ in length"));
    }
    if direction.iter().all(|&h| h == 0.0) {
        return Err(Error::training("weak learner output is zero everywhere"));
    }
    let f = |g: f64| loss_along(labels, scores, direction, g);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;

    let (mut lo, mut hi) = (0.0, config.gamma_max);
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > config.line_search_tolerance {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }

    let inner = 0.5 * (lo + hi);
    let mut best = (0.0, f(0.0));
    for g in [config.gamma_max, inner] {
        let l = f(g);
        if l < best.1 {
            best = (g, l);
        }
    }
    Ok(best.0)
}

/// Depth-one regression tree: `x[feature] <= threshold` takes `left_value`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionStump {
    pub feature_index: usize,
    pub threshold: f64,
    pub left_value: f64,
    pub right_value: f64,
}

impl RegressionStump {
    pub fn predict(&self, x: &[f64]) -> f64 {
        if x[self.feature_index] <= self.threshold {
            self.left_value
        } else {
            self.right_value
        }
    }

    /// Least-squares fit with leaf values equal to the mean target on each
    /// side. `orders[j]` holds the row indices sorted by feature `j`.
    fn fit_sorted(data: &Dataset, targets: &[f64], orders: &[Vec<usize>]) -> Self {
        let n = targets.len() as f64;
        let total: f64 = targets.iter().sum();
        let mean = total / n;
        // minimizing SSE is maximizing S_L^2 / n_L + S_R^2 / n_R
        let mut best: Option<(f64, RegressionStump)> = None;
        for (j, order) in orders.iter().enumerate() {
            let mut left_sum = 0.0;
            for pos in 0..order.len() - 1 {
                let i = order[pos];
                left_sum += targets[i];
                let here = data.value(i, j);
                let next = data.value(order[pos + 1], j);
                if here == next {
                    continue;
                }
                let n_left = (pos + 1) as f64;
                let n_right = n - n_left;
                let right_sum = total - left_sum;
                let score = left_sum * left_sum / n_left + right_sum * right_sum / n_right;
                if best.as_ref().is_none_or(|(s, _)| score > s + TIE_TOLERANCE) {
                    best = Some((
                        score,
                        RegressionStump {
                            feature_index: j,
                            threshold: midpoint(here, next),
                            left_value: left_sum / n_left,
                            right_value: right_sum / n_right,
                        },
                    ));
                }
            }
        }
        best.map(|(_, s)| s).unwrap_or(RegressionStump {
            feature_index: 0,
            threshold: data.value(0, 0),
            left_value: mean,
            right_value: mean,
        })
    }

    pub fn fit(data: &Dataset, targets: &[f64]) -> Result<Self> {
        if targets.len() != data.n_samples() {
            return Err(Error::training("one regression target per row required"));
        }
        Ok(Self::fit_sorted(data, targets, &sorted_orders(data)))
    }
}

fn sorted_orders(data: &Dataset) -> Vec<Vec<usize>> {
    (0..data.n_features())
        .map(|j| {
            let mut order: Vec<usize> = (0..data.n_samples()).collect();
            order.sort_by(|&a, &b| data.value(a, j).total_cmp(&data.value(b, j)));
            order
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbStage {
    pub stump: RegressionStump,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbModel {
    pub f0: f64,
    pub stages: Vec<GbStage>,
    pub loss: Loss,
    /// Training loss after each stage.
    pub stage_losses: Vec<f64>,
    /// Training loss of the constant model `f0`.
    pub initial_loss: f64,
}

impl GbModel {
    pub fn score(&self, x: &[f64]) -> f64 {
        self.stages
            .iter()
            .fold(self.f0, |acc, s| acc + s.gamma * s.stump.predict(x))
    }

    /// Score and label; class 1 iff the score is strictly positive.
    pub fn predict(&self, x: &[f64]) -> (f64, usize) {
        let score = self.score(x);
        (score, usize::from(score > 0.0))
    }

    pub fn predict_all(&self, data: &Dataset) -> Vec<usize> {
        data.rows().map(|x| self.predict(x).1).collect()
    }

    /// Predictions after `m` stages for `m = 1..=stages.len()`, indexed `[m - 1][row]`.
    pub fn staged_predict(&self, data: &Dataset) -> Vec<Vec<usize>> {
        let mut staged = vec![Vec::with_capacity(data.n_samples()); self.stages.len()];
        for x in data.rows() {
            let mut score = self.f0;
            for (m, s) in self.stages.iter().enumerate() {
                score += s.gamma * s.stump.predict(x);
                staged[m].push(usize::from(score > 0.0));
            }
        }
        staged
    }

    pub fn staged_accuracy(&self, data: &Dataset) -> Vec<(usize, f64)> {
        let labels = data.labels();
        self.staged_predict(data)
            .iter()
            .enumerate()
            .map(|(m, preds)| {
                let hits = preds.iter().zip(labels).filter(|(p, y)| p == y).count();
                (m + 1, hits as f64 / labels.len() as f64)
            })
            .collect()
    }
}

/// Class 0 maps to -1, class 1 to +1.
pub fn signed_labels(data: &Dataset) -> Vec<f64> {
    data.labels()
        .iter()
        .map(|&y| if y == 1 { 1.0 } else { -1.0 })
        .collect()
}

pub fn fit_gradboost(train: &Dataset, config: &GbConfig) -> Result<GbModel> {
    config.validate()?;
    if train.n_classes() != 2 {
        return Err(Error::training(format!(
            "gradient boosting is binary only; data has {} classes",
            train.n_classes()
        )));
    }
    let y = signed_labels(train);
    let n = y.len();
    let p = (y.iter().filter(|&&v| v > 0.0).count() as f64 / n as f64)
        .clamp(PRIOR_CLAMP, 1.0 - PRIOR_CLAMP);
    let f0 = 0.5 * (p / (1.0 - p)).ln();

    let orders = sorted_orders(train);
    let mut scores = vec![f0; n];
    let initial_loss = logistic_loss(&y, &scores);
    let mut stages = Vec::with_capacity(config.stages);
    let mut stage_losses = Vec::with_capacity(config.stages);

    for _ in 0..config.stages {
        let residuals = pseudo_residuals(&y, &scores);
        let stump = RegressionStump::fit_sorted(train, &residuals, &orders);
        let h: Vec<f64> = train.rows().map(|x| stump.predict(x)).collect();
        // a stump that is zero everywhere cannot move the scores
        let gamma = if h.iter().all(|&v| v == 0.0) {
            0.0
        } else {
            line_search_gamma(&y, &scores, &h, config)?
        };
        for (s, hv) in scores.iter_mut().zip(&h) {
            *s += gamma * hv;
        }
        stage_losses.push(logistic_loss(&y, &scores));
        stages.push(GbStage { stump, gamma });
    }

    Ok(GbModel {
        f0,
        stages,
        loss: config.loss,
        stage_losses,
        initial_loss,
    })
}
