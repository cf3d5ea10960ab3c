//! Sample-weight-aware base estimators: weighted Gaussian naive Bayes and
//! exhaustive decision stumps.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Default multiplier for the GNB variance floor.
pub const DEFAULT_VAR_SMOOTHING: f64 = 1e-9;

/// Two candidate errors closer than this are treated as a tie.
pub(crate) const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeakLearnerSpec {
    Gnb {
        #[serde(default = "default_var_smoothing")]
        var_smoothing: f64,
    },
    Stump,
}

fn default_var_smoothing() -> f64 {
    DEFAULT_VAR_SMOOTHING
}

impl Default for WeakLearnerSpec {
    fn default() -> Self {
        WeakLearnerSpec::Gnb {
            var_smoothing: DEFAULT_VAR_SMOOTHING,
        }
    }
}

impl WeakLearnerSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            WeakLearnerSpec::Gnb { var_smoothing }
                if !(var_smoothing > 0.0 && var_smoothing.is_finite()) =>
            {
                Err(Error::config(format!(
                    "var_smoothing must be positive, got {var_smoothing}"
                )))
            }
            _ => Ok(()),
        }
    }

    pub fn fit(&self, data: &Dataset, weights: &[f64]) -> Result<WeakLearner> {
        self.validate()?;
        match *self {
            WeakLearnerSpec::Gnb { var_smoothing } => {
                GaussianNb::fit(data, weights, var_smoothing).map(WeakLearner::Gnb)
            }
            WeakLearnerSpec::Stump => Stump::fit(data, weights).map(WeakLearner::Stump),
        }
    }
}

/// A fitted base estimator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeakLearner {
    Gnb(GaussianNb),
    Stump(Stump),
}

impl WeakLearner {
    pub fn predict(&self, x: &[f64]) -> usize {
        match self {
            WeakLearner::Gnb(m) => m.predict(x),
            WeakLearner::Stump(s) => s.predict(x),
        }
    }

    /// Class posterior. A stump puts all mass on its predicted class.
    pub fn predict_proba(&self, x: &[f64]) -> Vec<f64> {
        match self {
            WeakLearner::Gnb(m) => m.predict_proba(x),
            WeakLearner::Stump(s) => {
                let mut p = vec![0.0; s.n_classes];
                p[s.predict(x)] = 1.0;
                p
            }
        }
    }

    pub fn n_classes(&self) -> usize {
        match self {
            WeakLearner::Gnb(m) => m.priors.len(),
            WeakLearner::Stump(s) => s.n_classes,
        }
    }
}

/// Index of the largest entry; ties go to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (k, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = k;
        }
    }
    best
}

// Leaf masses come from running sums and subtractions, so near-equal masses
// count as tied and go to the lower class.
fn leaf_class(mass: &[f64]) -> usize {
    let mut best = 0;
    for (k, &v) in mass.iter().enumerate().skip(1) {
        if v > mass[best] + TIE_TOLERANCE {
            best = k;
        }
    }
    best
}

fn check_weights(data: &Dataset, weights: &[f64]) -> Result<f64> {
    if weights.len() != data.n_samples() {
        return Err(Error::training(format!(
            "{} weights for {} rows",
            weights.len(),
            data.n_samples()
        )));
    }
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
        return Err(Error::training(format!("invalid sample weight {w}")));
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::training("sample weights sum to zero"));
    }
    Ok(total)
}

/// Gaussian naive Bayes fitted with per-sample weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianNb {
    /// Weighted class mass, normalized to sum to one.
    pub priors: Vec<f64>,
    /// `means[k][j]` for class `k`, feature `j`.
    pub means: Vec<Vec<f64>>,
    pub variances: Vec<Vec<f64>>,
    /// Additive floor applied to every variance.
    pub smoothing: f64,
}

impl GaussianNb {
    /// Weighted per-class means and population variances. The variance floor
    /// is `var_smoothing` times the largest weighted variance of any feature
    /// over the whole sample (or `var_smoothing` itself if every feature is
    /// constant).
    pub fn fit(data: &Dataset, weights: &[f64], var_smoothing: f64) -> Result<Self> {
        let total = check_weights(data, weights)?;
        let k = data.n_classes();
        let d = data.n_features();
        let labels = data.labels();

        let mut mass = vec![0.0; k];
        let mut present = vec![false; k];
        let mut sums = vec![vec![0.0; d]; k];
        let mut global_sum = vec![0.0; d];
        for ((x, &y), &w) in data.rows().zip(labels).zip(weights) {
            present[y] = true;
            mass[y] += w;
            for j in 0..d {
                sums[y][j] += w * x[j];
                global_sum[j] += w * x[j];
            }
        }
        if let Some(c) = (0..k).find(|&c| present[c] && mass[c] <= 0.0) {
            return Err(Error::training(format!(
                "class '{}' has zero total weight",
                data.class_names()[c]
            )));
        }

        let means: Vec<Vec<f64>> = sums
            .into_iter()
            .zip(&mass)
            .map(|(s, &m)| {
                if m > 0.0 {
                    s.into_iter().map(|v| v / m).collect()
                } else {
                    vec![0.0; d]
                }
            })
            .collect();
        let global_mean: Vec<f64> = global_sum.iter().map(|s| s / total).collect();

        let mut sq = vec![vec![0.0; d]; k];
        let mut global_sq = vec![0.0; d];
        for ((x, &y), &w) in data.rows().zip(labels).zip(weights) {
            for j in 0..d {
                let dc = x[j] - means[y][j];
                sq[y][j] += w * dc * dc;
                let dg = x[j] - global_mean[j];
                global_sq[j] += w * dg * dg;
            }
        }
        let max_var = global_sq.iter().map(|s| s / total).fold(0.0_f64, f64::max);
        let smoothing = if max_var > 0.0 {
            var_smoothing * max_var
        } else {
            var_smoothing
        };

        let variances = sq
            .into_iter()
            .zip(&mass)
            .map(|(s, &m)| {
                s.into_iter()
                    .map(|v| {
                        if m > 0.0 {
                            v / m + smoothing
                        } else {
                            smoothing
                        }
                    })
                    .collect()
            })
            .collect();
        let priors = mass.iter().map(|m| m / total).collect();

        Ok(Self {
            priors,
            means,
            variances,
            smoothing,
        })
    }

    /// Unnormalized log posterior per class; `-inf` for classes with zero prior.
    pub fn joint_log_likelihood(&self, x: &[f64]) -> Vec<f64> {
        const LN_2PI: f64 = 1.837_877_066_409_345_5;
        self.priors
            .iter()
            .zip(self.means.iter().zip(&self.variances))
            .map(|(&prior, (mu, var))| {
                if prior <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                let mut ll = prior.ln();
                for j in 0..x.len() {
                    let diff = x[j] - mu[j];
                    ll -= 0.5 * (LN_2PI + var[j].ln() + diff * diff / var[j]);
                }
                ll
            })
            .collect()
    }

    pub fn predict_proba(&self, x: &[f64]) -> Vec<f64> {
        let jll = self.joint_log_likelihood(x);
        let top = jll.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut p: Vec<f64> = jll.iter().map(|&l| (l - top).exp()).collect();
        let z: f64 = p.iter().sum();
        for v in &mut p {
            *v /= z;
        }
        p
    }

    /// Hard label: argmax of [`predict_proba`](Self::predict_proba).
    pub fn predict(&self, x: &[f64]) -> usize {
        argmax(&self.predict_proba(x))
    }
}

/// One-split classifier: `x[feature] <= threshold` goes left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stump {
    pub feature_index: usize,
    pub threshold: f64,
    pub left_class: usize,
    pub right_class: usize,
    pub n_classes: usize,
}

impl Stump {
    pub fn predict(&self, x: &[f64]) -> usize {
        if x[self.feature_index] <= self.threshold {
            self.left_class
        } else {
            self.right_class
        }
    }

    /// Exhaustive search over features and midpoints between consecutive
    /// distinct values, minimizing weighted 0/1 error. For a fixed split the
    /// best leaf labels are the heaviest class on each side. Ties go to the
    /// lowest feature, then the lowest threshold, then the lowest labels.
    ///
    /// When every feature is constant a constant stump predicting the
    /// heaviest class is returned.
    pub fn fit(data: &Dataset, weights: &[f64]) -> Result<Self> {
        check_weights(data, weights)?;
        let k = data.n_classes();
        let labels = data.labels();

        let mut class_mass = vec![0.0; k];
        for (&y, &w) in labels.iter().zip(weights) {
            class_mass[y] += w;
        }
        let total: f64 = class_mass.iter().sum();

        let mut best: Option<(f64, Stump)> = None;
        let mut order: Vec<usize> = (0..data.n_samples()).collect();
        let mut left = vec![0.0; k];
        for j in 0..data.n_features() {
            order.sort_by(|&a, &b| data.value(a, j).total_cmp(&data.value(b, j)));
            left.iter_mut().for_each(|v| *v = 0.0);
            for pos in 0..order.len() - 1 {
                let i = order[pos];
                left[labels[i]] += weights[i];
                let here = data.value(i, j);
                let next = data.value(order[pos + 1], j);
                if here == next {
                    continue;
                }
                let lc = leaf_class(&left);
                let right: Vec<f64> = class_mass.iter().zip(&left).map(|(t, l)| t - l).collect();
                let rc = leaf_class(&right);
                let err = total - left[lc] - right[rc];
                if best.as_ref().is_none_or(|(e, _)| err < e - TIE_TOLERANCE) {
                    best = Some((
                        err,
                        Stump {
                            feature_index: j,
                            threshold: midpoint(here, next),
                            left_class: lc,
                            right_class: rc,
                            n_classes: k,
                        },
                    ));
                }
            }
        }

        Ok(best.map(|(_, s)| s).unwrap_or_else(|| {
            let c = argmax(&class_mass);
            Stump {
                feature_index: 0,
                threshold: data.value(0, 0),
                left_class: c,
                right_class: c,
                n_classes: k,
            }
        }))
    }
}

/// Midpoint that stays strictly between `lo` and `hi` when they are adjacent floats.
pub(crate) fn midpoint(lo: f64, hi: f64) -> f64 {
    let m = lo + (hi - lo) / 2.0;
    if m >= hi {
        lo
    } else {
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn one_d(xs: &[f64], labels: &[usize], k: usize) -> Dataset {
        Dataset::new(
            xs.iter().map(|&x| vec![x]).collect(),
            labels.to_vec(),
            vec!["x".into()],
            (0..k).map(|c| format!("c{c}")).collect(),
        )
        .unwrap()
    }

    fn uniform(n: usize) -> Vec<f64> {
        vec![1.0 / n as f64; n]
    }

    #[test]
    fn gnb_uniform_single_class_statistics() {
        // class 1 is declared but absent
        let ds = one_d(&[1.0, 2.0, 3.0], &[0, 0, 0], 2);
        let m = GaussianNb::fit(&ds, &uniform(3), 1e-9).unwrap();
        assert_abs_diff_eq!(m.means[0][0], 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m.variances[0][0] - m.smoothing, 2.0 / 3.0, epsilon = 1e-15);
        assert_eq!(m.priors, vec![1.0, 0.0]);
        assert_eq!(m.predict(&[100.0]), 0);
    }

    #[test]
    fn gnb_weighted_mean() {
        let ds = one_d(&[1.0, 2.0, 3.0], &[0, 0, 0], 2);
        let m = GaussianNb::fit(&ds, &[0.2, 0.3, 0.5], 1e-9).unwrap();
        // 0.2*1 + 0.3*2 + 0.5*3
        assert_abs_diff_eq!(m.means[0][0], 2.3, epsilon = 1e-15);
        // 0.2*1.69 + 0.3*0.09 + 0.5*0.49
        assert_abs_diff_eq!(m.variances[0][0] - m.smoothing, 0.61, epsilon = 1e-14);
    }

    #[test]
    fn gnb_mass_invariance() {
        let ds = one_d(&[1.0, 2.0, 5.0, 7.0], &[0, 1, 0, 1], 2);
        let w = [0.1, 0.2, 0.3, 0.4];
        let a = GaussianNb::fit(&ds, &w, 1e-9).unwrap();
        let doubled = one_d(
            &[1.0, 2.0, 5.0, 7.0, 1.0, 2.0, 5.0, 7.0],
            &[0, 1, 0, 1, 0, 1, 0, 1],
            2,
        );
        let half: Vec<f64> = w.iter().chain(&w).map(|v| v / 2.0).collect();
        let b = GaussianNb::fit(&doubled, &half, 1e-9).unwrap();
        for k in 0..2 {
            assert_abs_diff_eq!(a.priors[k], b.priors[k], epsilon = 1e-15);
            assert_abs_diff_eq!(a.means[k][0], b.means[k][0], epsilon = 1e-14);
            assert_abs_diff_eq!(a.variances[k][0], b.variances[k][0], epsilon = 1e-14);
        }
    }

    #[test]
    fn gnb_zero_weight_row_is_ignored() {
        let ds = one_d(&[1.0, 2.0, 5.0], &[0, 1, 0], 2);
        let a = GaussianNb::fit(&ds, &[0.3, 0.3, 0.4], 1e-9).unwrap();
        let ds2 = one_d(&[1.0, 2.0, 5.0, 1000.0], &[0, 1, 0, 1], 2);
        let b = GaussianNb::fit(&ds2, &[0.3, 0.3, 0.4, 0.0], 1e-9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn gnb_zero_weight_class_is_an_error() {
        let ds = one_d(&[1.0, 2.0, 5.0], &[0, 1, 0], 2);
        assert!(matches!(
            GaussianNb::fit(&ds, &[0.5, 0.0, 0.5], 1e-9),
            Err(Error::Training(_))
        ));
    }

    fn hand_model(means: [f64; 2], var: f64) -> GaussianNb {
        GaussianNb {
            priors: vec![0.5, 0.5],
            means: vec![vec![means[0]], vec![means[1]]],
            variances: vec![vec![var], vec![var]],
            smoothing: 0.0,
        }
    }

    #[test]
    fn gnb_symmetric_posteriors() {
        let same = hand_model([1.0, 1.0], 2.0);
        assert_eq!(same.predict_proba(&[0.3]), vec![0.5, 0.5]);
        assert_eq!(same.predict(&[0.3]), 0);
        let apart = hand_model([-2.0, 2.0], 1.0);
        assert_eq!(apart.predict_proba(&[0.0]), vec![0.5, 0.5]);
    }

    #[test]
    fn gnb_log_density_ratio() {
        // log-ratio at x=3 for means -3/+3 and unit variance: (36 - 0)/2 = 18
        let m = hand_model([-3.0, 3.0], 1.0);
        let p = m.predict_proba(&[3.0]);
        let expected = 1.0 / (1.0 + (-18.0f64).exp());
        assert_abs_diff_eq!(p[1], expected, epsilon = 1e-15);
        assert_abs_diff_eq!(p[0], 1.0 - expected, epsilon = 1e-15);
    }

    #[test]
    fn gnb_extreme_inputs_stay_finite() {
        let m = hand_model([-1e6, 1e6], 1e-6);
        for x in [-1e6, -3.0, 0.0, 5e5, 1e6] {
            let p = m.predict_proba(&[x]);
            assert!(p.iter().all(|v| v.is_finite() && *v >= 0.0));
            assert_abs_diff_eq!(p.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn constant_features_get_fallback_smoothing() {
        let ds = one_d(&[2.0, 2.0, 2.0], &[0, 1, 0], 2);
        let m = GaussianNb::fit(&ds, &uniform(3), 1e-9).unwrap();
        assert_eq!(m.smoothing, 1e-9);
        assert!(m.variances.iter().flatten().all(|&v| v >= 1e-9));
    }

    #[test]
    fn stump_separable() {
        let ds = one_d(&[0.0, 1.0, 2.0, 3.0], &[0, 0, 1, 1], 2);
        for w in [uniform(4), vec![0.7, 0.1, 0.1, 0.1]] {
            let s = Stump::fit(&ds, &w).unwrap();
            assert_eq!(s.threshold, 1.5);
            assert_eq!((s.left_class, s.right_class), (0, 1));
        }
    }

    #[test]
    fn stump_xor_error() {
        let ds = one_d(&[0.0, 1.0, 2.0, 3.0], &[0, 1, 0, 1], 2);
        let w = uniform(4);
        let s = Stump::fit(&ds, &w).unwrap();
        let err: f64 = (0..4)
            .filter(|&i| s.predict(ds.row(i)) != ds.labels()[i])
            .map(|i| w[i])
            .sum();
        assert_abs_diff_eq!(err, 0.25, epsilon = 1e-15);
        // lowest threshold wins the tie
        assert_eq!(s.threshold, 0.5);
    }

    #[test]
    fn stump_constant_features() {
        let ds = one_d(&[4.0, 4.0, 4.0], &[0, 1, 1], 2);
        let s = Stump::fit(&ds, &uniform(3)).unwrap();
        assert_eq!((s.left_class, s.right_class), (1, 1));
        assert_eq!(s.predict(&[4.0]), 1);
        assert_eq!(s.predict(&[-9.0]), 1);
    }

    #[test]
    fn stump_rule() {
        let s = Stump {
            feature_index: 0,
            threshold: 1.5,
            left_class: 0,
            right_class: 1,
            n_classes: 2,
        };
        assert_eq!(s.predict(&[2.0]), 1);
        assert_eq!(s.predict(&[1.5]), 0);
        assert_eq!(WeakLearner::Stump(s).predict_proba(&[2.0]), vec![0.0, 1.0]);
    }

    #[test]
    fn argmax_ties_go_low() {
        assert_eq!(argmax(&[0.5, 0.5]), 0);
        assert_eq!(argmax(&[0.1, 0.7, 0.7]), 1);
    }

    #[test]
    fn weight_length_mismatch() {
        let ds = one_d(&[0.0, 1.0], &[0, 1], 2);
        assert!(Stump::fit(&ds, &[1.0]).is_err());
        assert!(GaussianNb::fit(&ds, &[1.0, -1.0], 1e-9).is_err());
    }

    #[test]
    fn spec_validation() {
        assert!(WeakLearnerSpec::Gnb { var_smoothing: 0.0 }
            .validate()
            .is_err());
        assert!(WeakLearnerSpec::default().validate().is_ok());
        let parsed: WeakLearnerSpec = serde_json::from_str(r#"{"kind":"gnb"}"#).unwrap();
        assert_eq!(parsed, WeakLearnerSpec::default());
        let parsed: WeakLearnerSpec = serde_json::from_str(r#"{"kind":"stump"}"#).unwrap();
        assert_eq!(parsed, WeakLearnerSpec::Stump);
    }
}
