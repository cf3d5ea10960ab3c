//! AdaBoost and dynamic-weight AdaBoost.
//!
//! Both variants share the same loop: fit the base learner on the current
//! distribution, measure its weighted error `eps`, turn it into a vote weight
//! `alpha`, then reweight the sample. They differ only in the reweighting:
//!
//! * `standard` multiplies the weight of every misclassified instance by
//!   `exp(alpha)`;
//! * `dwa` multiplies every weight by `exp(alpha * e_i)` where
//!   `e_i = 1 - p(true class | x_i)` is read off the learner's class
//!   probabilities. With hard 0/1 probabilities this is the standard rule.
//!
//! Weights are renormalized after every update and can optionally be capped
//! (soft margin) so no single instance dominates the distribution.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::weak_learners::{argmax, WeakLearner, WeakLearnerSpec};

pub const DEFAULT_EPSILON_MIN: f64 = 1e-10;
pub const DEFAULT_ROUNDS: usize = 50;
/// Consecutive skip-and-reset rounds tolerated before the fit stops.
pub const MAX_CONSECUTIVE_RESETS: usize = 5;
/// Default soft-margin cap is this many times the uniform weight `1/N`.
pub const DEFAULT_SOFT_MARGIN_SCALE: f64 = 10.0;

const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// Instance weights: strictly positive and summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    /// Validates positivity and normalization (within 1e-12).
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::training("weight vector is empty"));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::training(format!(
                "weight {w} is not strictly positive"
            )));
        }
        let total = compensated_sum(&weights);
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::training(format!("weights sum to {total}, not 1")));
        }
        Ok(Self(weights))
    }

    /// Scales positive finite values to sum to one.
    pub fn normalized(mut weights: Vec<f64>) -> Result<Self> {
        let total = compensated_sum(&weights);
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::training(format!(
                "cannot normalize weights with sum {total}"
            )));
        }
        for w in &mut weights {
            *w /= total;
        }
        Self::new(weights)
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::training("cannot build weights for zero samples"));
        }
        Ok(Self(vec![1.0 / n as f64; n]))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// Neumaier summation; keeps the normalization check meaningful for large N.
pub fn compensated_sum(values: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut carry = 0.0;
    for &v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

impl std::ops::Index<usize> for WeightVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitWeights {
    #[default]
    Uniform,
    ClassBalanced,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaRule {
    /// `alpha = 0.5 * ln((1 - eps) / eps)`
    BinaryHalfLog,
    /// `alpha = ln((1 - eps) / eps) + ln(K - 1)`
    Samme,
}

impl AlphaRule {
    /// Half-log for two classes, SAMME otherwise.
    pub fn for_classes(n_classes: usize) -> Self {
        if n_classes <= 2 {
            AlphaRule::BinaryHalfLog
        } else {
            AlphaRule::Samme
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    #[default]
    Standard,
    Dwa,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WorseThanRandomPolicy {
    /// Stop and keep the rounds accepted so far.
    #[default]
    Stop,
    /// Drop the learner and restart from the initial weights.
    SkipAndReset,
}

/// Soft-margin cap on individual instance weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SoftMargin {
    /// Absolute cap in `(0, 1]`.
    Cap(f64),
    /// Cap of `scale / N` for a training set of `N` rows.
    Scaled { scale: f64 },
}

impl SoftMargin {
    pub fn cap_for(&self, n_samples: usize) -> f64 {
        match *self {
            SoftMargin::Cap(cap) => cap,
            SoftMargin::Scaled { scale } => (scale / n_samples as f64).min(1.0),
        }
    }
}

impl Default for SoftMargin {
    fn default() -> Self {
        SoftMargin::Scaled {
            scale: DEFAULT_SOFT_MARGIN_SCALE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoostConfig {
    pub rounds: usize,
    pub variant: Variant,
    /// `None` picks [`AlphaRule::for_classes`].
    pub alpha_rule: Option<AlphaRule>,
    pub epsilon_min: f64,
    /// Largest weight any single instance may carry after an update.
    pub soft_margin_cap: Option<SoftMargin>,
    pub init_weights: InitWeights,
    pub base: WeakLearnerSpec,
    pub worse_than_random_policy: WorseThanRandomPolicy,
}

impl Default for BoostConfig {
    fn default() -> Self {
        Self {
            rounds: DEFAULT_ROUNDS,
            variant: Variant::Standard,
            alpha_rule: None,
            epsilon_min: DEFAULT_EPSILON_MIN,
            soft_margin_cap: None,
            init_weights: InitWeights::Uniform,
            base: WeakLearnerSpec::default(),
            worse_than_random_policy: WorseThanRandomPolicy::Stop,
        }
    }
}

impl BoostConfig {
    pub fn standard() -> Self {
        Self::default()
    }

    pub fn dwa() -> Self {
        Self {
            variant: Variant::Dwa,
            ..Self::default()
        }
    }

    /// Checks settings that do not depend on the data.
    pub fn validate(&self) -> Result<()> {
        if self.rounds == 0 {
            return Err(Error::config("rounds must be at least 1"));
        }
        if !(self.epsilon_min > 0.0 && self.epsilon_min < 0.5) {
            return Err(Error::config(format!(
                "epsilon_min must lie in (0, 0.5), got {}",
                self.epsilon_min
            )));
        }
        match self.soft_margin_cap {
            Some(SoftMargin::Cap(cap)) if !(cap > 0.0 && cap <= 1.0) => {
                return Err(Error::config(format!(
                    "soft_margin_cap must lie in (0, 1], got {cap}"
                )));
            }
            Some(SoftMargin::Scaled { scale }) if !(scale >= 1.0 && scale.is_finite()) => {
                return Err(Error::config(format!(
                    "soft margin scale must be >= 1, got {scale}"
                )));
            }
            _ => {}
        }
        self.base.validate()
    }

    pub fn resolved_alpha_rule(&self, n_classes: usize) -> AlphaRule {
        self.alpha_rule
            .unwrap_or_else(|| AlphaRule::for_classes(n_classes))
    }
}

/// Initial distribution. `ClassBalanced` gives each class total mass `1/K`.
pub fn init_weights(
    n: usize,
    mode: InitWeights,
    labels: &[usize],
    n_classes: usize,
) -> Result<WeightVector> {
    match mode {
        InitWeights::Uniform => WeightVector::uniform(n),
        InitWeights::ClassBalanced => {
            if n == 0 {
                return Err(Error::training("cannot build weights for zero samples"));
            }
            if labels.len() != n {
                return Err(Error::training(format!(
                    "{} labels for {n} samples",
                    labels.len()
                )));
            }
            let mut counts = vec![0usize; n_classes];
            for &y in labels {
                if y >= n_classes {
                    return Err(Error::training(format!("label {y} out of range")));
                }
                counts[y] += 1;
            }
            if let Some(k) = counts.iter().position(|&c| c == 0) {
                return Err(Error::training(format!(
                    "class {k} has no samples; class-balanced weights need every class"
                )));
            }
            let weights = labels
                .iter()
                .map(|&y| 1.0 / (n_classes as f64 * counts[y] as f64))
                .collect();
            WeightVector::normalized(weights)
        }
    }
}

/// `sum(w_i * [pred_i != y_i]) / sum(w_i)`.
pub fn weighted_error(predictions: &[usize], labels: &[usize], weights: &[f64]) -> f64 {
    debug_assert_eq!(predictions.len(), labels.len());
    debug_assert_eq!(predictions.len(), weights.len());
    let mut wrong = 0.0;
    let mut total = 0.0;
    for ((p, y), w) in predictions.iter().zip(labels).zip(weights) {
        total += w;
        if p != y {
            wrong += w;
        }
    }
    if total > 0.0 {
        wrong / total
    } else {
        0.0
    }
}

/// Vote weight for a round with weighted error `epsilon`, after clamping
/// `epsilon` to `[epsilon_min, 1 - epsilon_min]`.
pub fn alpha_from_error(epsilon: f64, n_classes: usize, rule: AlphaRule, epsilon_min: f64) -> f64 {
    let eps = epsilon.clamp(epsilon_min, 1.0 - epsilon_min);
    // ln((m - 1)(1 - eps) / eps) written so it is exactly zero at
    // eps = (m - 1) / m, where m is 2 for the binary rule and K for SAMME
    let margin_log = |m: f64| ((m - 1.0 - m * eps) / eps).ln_1p();
    match rule {
        AlphaRule::BinaryHalfLog => 0.5 * margin_log(2.0),
        AlphaRule::Samme => margin_log(n_classes as f64),
    }
}

/// Error rate of uniform random guessing among `n_classes` labels.
pub fn random_guess_error(n_classes: usize) -> f64 {
    (n_classes as f64 - 1.0) / n_classes as f64
}

/// Multiplies misclassified weights by `exp(alpha)` and renormalizes.
pub fn update_weights_indicator(
    weights: &WeightVector,
    alpha: f64,
    correct: &[bool],
) -> Result<WeightVector> {
    if correct.len() != weights.len() {
        return Err(Error::training(format!(
            "{} correctness flags for {} weights",
            correct.len(),
            weights.len()
        )));
    }
    check_alpha(alpha)?;
    let boost = alpha.exp();
    let raw = weights
        .as_slice()
        .iter()
        .zip(correct)
        .map(|(&w, &ok)| if ok { w } else { w * boost })
        .collect();
    WeightVector::normalized(raw)
}

/// Multiplies each weight by `exp(alpha * e_i)` and renormalizes, where
/// `e_i` in `[0, 1]` is the per-instance prediction error.
pub fn update_weights_dynamic(
    weights: &WeightVector,
    alpha: f64,
    per_instance_error: &[f64],
) -> Result<WeightVector> {
    if per_instance_error.len() != weights.len() {
        return Err(Error::training(format!(
            "{} instance errors for {} weights",
            per_instance_error.len(),
            weights.len()
        )));
    }
    check_alpha(alpha)?;
    if let Some((i, e)) = per_instance_error
        .iter()
        .enumerate()
        .find(|(_, e)| !(0.0..=1.0).contains(*e))
    {
        return Err(Error::training(format!(
            "instance error {e} at position {i} is outside [0, 1]"
        )));
    }
    let boost = alpha.exp();
    let raw = weights
        .as_slice()
        .iter()
        .zip(per_instance_error)
        .map(|(&w, &e)| {
            // keep the two endpoints bit-identical to the indicator rule
            if e == 0.0 {
                w
            } else if e == 1.0 {
                w * boost
            } else {
                w * (alpha * e).exp()
            }
        })
        .collect();
    WeightVector::normalized(raw)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::training(format!(
            "alpha must be finite, got {alpha}"
        )))
    }
}

/// Water-filling cap: weights above `cap` are pinned to it and the remaining
/// mass is spread proportionally over the rest, repeated until no weight
/// exceeds the cap.
pub fn clip_soft_margin(weights: &WeightVector, cap: f64) -> Result<WeightVector> {
    let n = weights.len();
    if !(cap > 0.0 && cap <= 1.0) || cap * (n as f64) < 1.0 - NORMALIZATION_TOLERANCE {
        return Err(Error::config(format!(
            "soft margin cap {cap} is infeasible for {n} weights (need cap >= 1/N)"
        )));
    }
    let mut w = weights.as_slice().to_vec();
    let mut pinned = vec![false; n];
    loop {
        let mut newly = 0;
        for (v, p) in w.iter_mut().zip(pinned.iter_mut()) {
            if !*p && *v > cap {
                *v = cap;
                *p = true;
                newly += 1;
            }
        }
        if newly == 0 {
            break;
        }
        let n_pinned = pinned.iter().filter(|&&p| p).count();
        let free_mass: f64 = w
            .iter()
            .zip(&pinned)
            .filter(|(_, &p)| !p)
            .map(|(v, _)| v)
            .sum();
        if n_pinned == n || free_mass <= 0.0 {
            break;
        }
        let scale = (1.0 - cap * n_pinned as f64) / free_mass;
        for (v, &p) in w.iter_mut().zip(&pinned) {
            if !p {
                *v *= scale;
            }
        }
    }
    let total = compensated_sum(&w);
    if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
        for v in &mut w {
            *v /= total;
        }
    }
    WeightVector::new(w)
}

/// One boosting round kept in an ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub epsilon: f64,
    pub alpha: f64,
    pub learner: WeakLearner,
    pub accepted: bool,
}

/// Weighted vote of the accepted rounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ensemble {
    rounds: Vec<RoundRecord>,
    n_classes: usize,
    alpha_rule: AlphaRule,
    variant: Variant,
}

impl Ensemble {
    pub fn new(
        rounds: Vec<RoundRecord>,
        n_classes: usize,
        alpha_rule: AlphaRule,
        variant: Variant,
    ) -> Result<Self> {
        if rounds.is_empty() {
            return Err(Error::training("ensemble has no rounds"));
        }
        if n_classes < 2 {
            return Err(Error::training("ensemble needs at least 2 classes"));
        }
        Ok(Self {
            rounds,
            n_classes,
            alpha_rule,
            variant,
        })
    }

    pub fn rounds(&self) -> &[RoundRecord] {
        &self.rounds
    }

    pub fn len(&self) -> usize {
        self.rounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn alpha_rule(&self) -> AlphaRule {
        self.alpha_rule
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// `sum_t alpha_t * [h_t(x) = k]` for every class `k`.
    pub fn votes(&self, x: &[f64]) -> Vec<f64> {
        let mut votes = vec![0.0; self.n_classes];
        for r in &self.rounds {
            votes[r.learner.predict(x)] += r.alpha;
        }
        votes
    }

    /// Class with the largest vote; ties go to the lower class index.
    pub fn predict(&self, x: &[f64]) -> usize {
        argmax(&self.votes(x))
    }

    pub fn predict_all(&self, data: &Dataset) -> Vec<usize> {
        data.rows().map(|x| self.predict(x)).collect()
    }

    /// Predictions of the ensemble truncated to its first `t` rounds, for
    /// `t = 1..=len()`. Indexed `[t - 1][row]`.
    pub fn staged_predict(&self, data: &Dataset) -> Vec<Vec<usize>> {
        let mut staged = vec![Vec::with_capacity(data.n_samples()); self.rounds.len()];
        let mut votes = vec![0.0; self.n_classes];
        for x in data.rows() {
            votes.iter_mut().for_each(|v| *v = 0.0);
            for (t, r) in self.rounds.iter().enumerate() {
                votes[r.learner.predict(x)] += r.alpha;
                staged[t].push(argmax(&votes));
            }
        }
        staged
    }

    /// `(t, accuracy)` of the first-`t`-rounds ensemble on `data`.
    pub fn staged_accuracy(&self, data: &Dataset) -> Vec<(usize, f64)> {
        let labels = data.labels();
        self.staged_predict(data)
            .iter()
            .enumerate()
            .map(|(t, preds)| {
                let hits = preds.iter().zip(labels).filter(|(p, y)| p == y).count();
                (t + 1, hits as f64 / labels.len() as f64)
            })
            .collect()
    }
}

/// What happened in one iteration of the boosting loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundTrace {
    /// 1-based iteration number (rejected iterations count too).
    pub iteration: usize,
    pub epsilon: f64,
    pub alpha: f64,
    pub accepted: bool,
    /// Hard predictions of this round's learner on the training rows.
    pub predictions: Vec<usize>,
    /// Distribution the learner was fitted on.
    pub weights_before: WeightVector,
    /// Distribution handed to the next iteration.
    pub weights_after: WeightVector,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FitTrace {
    pub iterations: Vec<RoundTrace>,
    /// Why the loop ended before `rounds` iterations, if it did.
    pub stopped_early: Option<String>,
}

pub fn fit_adaboost(train: &Dataset, config: &BoostConfig) -> Result<Ensemble> {
    fit_adaboost_traced(train, config).map(|(ensemble, _)| ensemble)
}

/// Runs the boosting loop and also returns the per-iteration trace.
pub fn fit_adaboost_traced(train: &Dataset, config: &BoostConfig) -> Result<(Ensemble, FitTrace)> {
    config.validate()?;
    let n = train.n_samples();
    let k = train.n_classes();
    let labels = train.labels();
    let cap = config.soft_margin_cap.map(|m| m.cap_for(n));
    if let Some(cap) = cap {
        if cap * (n as f64) < 1.0 - NORMALIZATION_TOLERANCE {
            return Err(Error::config(format!(
                "soft_margin_cap {cap} is below 1/N for N = {n}"
            )));
        }
    }
    let rule = config.resolved_alpha_rule(k);
    let threshold = random_guess_error(k);
    let initial = init_weights(n, config.init_weights, labels, k)?;

    let mut weights = initial.clone();
    let mut rounds = Vec::new();
    let mut trace = FitTrace::default();
    let mut resets = 0;

    for iteration in 1..=config.rounds {
        let learner = config.base.fit(train, weights.as_slice())?;
        let predictions: Vec<usize> = train.rows().map(|x| learner.predict(x)).collect();
        let epsilon = weighted_error(&predictions, labels, weights.as_slice());
        let alpha = alpha_from_error(epsilon, k, rule, config.epsilon_min);

        if epsilon >= threshold || alpha <= 0.0 {
            let reason = format!(
                "iteration {iteration}: weighted error {epsilon} is no better than random ({threshold})"
            );
            let next = match config.worse_than_random_policy {
                WorseThanRandomPolicy::Stop => weights.clone(),
                WorseThanRandomPolicy::SkipAndReset => initial.clone(),
            };
            trace.iterations.push(RoundTrace {
                iteration,
                epsilon,
                alpha,
                accepted: false,
                predictions,
                weights_before: std::mem::replace(&mut weights, next.clone()),
                weights_after: next,
            });
            match config.worse_than_random_policy {
                WorseThanRandomPolicy::Stop => {
                    trace.stopped_early = Some(reason);
                    break;
                }
                WorseThanRandomPolicy::SkipAndReset => {
                    resets += 1;
                    if resets >= MAX_CONSECUTIVE_RESETS {
                        trace.stopped_early =
                            Some(format!("{reason}; {resets} consecutive resets"));
                        break;
                    }
                    continue;
                }
            }
        }
        resets = 0;

        let mut next = match config.variant {
            Variant::Standard => {
                let correct: Vec<bool> = predictions
                    .iter()
                    .zip(labels)
                    .map(|(p, y)| p == y)
                    .collect();
                update_weights_indicator(&weights, alpha, &correct)?
            }
            Variant::Dwa => {
                let errors: Vec<f64> = train
                    .rows()
                    .zip(labels)
                    .map(|(x, &y)| (1.0 - learner.predict_proba(x)[y]).clamp(0.0, 1.0))
                    .collect();
                update_weights_dynamic(&weights, alpha, &errors)?
            }
        };
        if let Some(cap) = cap {
            next = clip_soft_margin(&next, cap)?;
        }

        trace.iterations.push(RoundTrace {
            iteration,
            epsilon,
            alpha,
            accepted: true,
            predictions,
            weights_before: std::mem::replace(&mut weights, next.clone()),
            weights_after: next,
        });
        rounds.push(RoundRecord {
            epsilon,
            alpha,
            learner,
            accepted: true,
        });
    }

    if rounds.is_empty() {
        return Err(Error::training(
            trace
                .stopped_early
                .clone()
                .unwrap_or_else(|| "no round was accepted".to_string()),
        ));
    }
    Ok((Ensemble::new(rounds, k, rule, config.variant)?, trace))
}
