//! Accuracy, confusion matrices and learning curves.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn accuracy(pred: &[usize], truth: &[usize]) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(Error::data(format!(
            "{} predictions for {} labels",
            pred.len(),
            truth.len()
        )));
    }
    if truth.is_empty() {
        return Err(Error::data("accuracy of zero instances is undefined"));
    }
    let hits = pred.iter().zip(truth).filter(|(p, t)| p == t).count();
    Ok(hits as f64 / truth.len() as f64)
}

/// Counts indexed `[true class][predicted class]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn new(pred: &[usize], truth: &[usize], n_classes: usize) -> Result<Self> {
        if pred.len() != truth.len() {
            return Err(Error::data(format!(
                "{} predictions for {} labels",
                pred.len(),
                truth.len()
            )));
        }
        let mut counts = vec![vec![0u64; n_classes]; n_classes];
        for (&p, &t) in pred.iter().zip(truth) {
            if p >= n_classes || t >= n_classes {
                return Err(Error::data(format!(
                    "label pair ({t}, {p}) out of range for {n_classes} classes"
                )));
            }
            counts[t][p] += 1;
        }
        Ok(Self { counts })
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn n_classes(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.counts.len()).map(|k| self.counts[k][k]).sum()
    }

    /// Row sums: instances per true class.
    pub fn support(&self) -> Vec<u64> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    /// `trace / total`, or `None` when the matrix is empty.
    pub fn accuracy(&self) -> Option<f64> {
        let total = self.total();
        (total > 0).then(|| self.trace() as f64 / total as f64)
    }
}

pub fn confusion(pred: &[usize], truth: &[usize], n_classes: usize) -> Result<ConfusionMatrix> {
    ConfusionMatrix::new(pred, truth, n_classes)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub round: usize,
    pub train_accuracy: f64,
    pub test_accuracy: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LearningCurve {
    points: Vec<CurvePoint>,
}

impl LearningCurve {
    /// Zips staged train and test accuracies; both must cover the same rounds.
    pub fn from_staged(train: &[(usize, f64)], test: &[(usize, f64)]) -> Result<Self> {
        if train.len() != test.len() {
            return Err(Error::data("train and test curves differ in length"));
        }
        let points = train
            .iter()
            .zip(test)
            .map(|(&(r, tr), &(r2, te))| {
                if r != r2 {
                    return Err(Error::data(format!("round mismatch {r} vs {r2}")));
                }
                Ok(CurvePoint {
                    round: r,
                    train_accuracy: tr,
                    test_accuracy: te,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(points)
    }

    pub fn new(points: Vec<CurvePoint>) -> Result<Self> {
        if points.windows(2).any(|w| w[1].round <= w[0].round) {
            return Err(Error::data("curve rounds must be strictly increasing"));
        }
        let in_unit = |v: f64| (0.0..=1.0).contains(&v);
        if points
            .iter()
            .any(|p| !in_unit(p.train_accuracy) || !in_unit(p.test_accuracy))
        {
            return Err(Error::data("accuracies must lie in [0, 1]"));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[CurvePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn last(&self) -> Option<&CurvePoint> {
        self.points.last()
    }

    /// First round from which test accuracy is within `tolerance` of its final value.
    pub fn rounds_to_settle(&self, tolerance: f64) -> Option<usize> {
        let last = self.points.last()?.test_accuracy;
        self.points
            .iter()
            .find(|p| (p.test_accuracy - last).abs() <= tolerance)
            .map(|p| p.round)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accuracy_cases() {
        assert_eq!(accuracy(&[0, 1, 2], &[0, 1, 2]).unwrap(), 1.0);
        assert_eq!(accuracy(&[0, 1, 1, 0], &[0, 1, 0, 0]).unwrap(), 0.75);
        assert_eq!(accuracy(&[1, 0], &[0, 1]).unwrap(), 0.0);
        assert!(accuracy(&[], &[]).is_err());
        assert!(accuracy(&[0], &[0, 1]).is_err());
    }

    #[test]
    fn confusion_cases() {
        let m = confusion(&[0, 1, 2], &[0, 1, 2], 3).unwrap();
        for t in 0..3 {
            for p in 0..3 {
                assert_eq!(m.counts()[t][p], u64::from(t == p));
            }
        }
        let m = confusion(&[0, 1, 1], &[0, 0, 1], 2).unwrap();
        assert_eq!(m.counts(), &[vec![1, 1], vec![0, 1]]);
        assert_eq!(m.support(), vec![2, 1]);
        assert_eq!(m.accuracy(), Some(2.0 / 3.0));
        assert!(confusion(&[2], &[0], 2).is_err());
    }

    #[test]
    fn settle_round() {
        let pts = [0.5, 0.7, 0.69, 0.8, 0.79]
            .iter()
            .enumerate()
            .map(|(i, &a)| CurvePoint {
                round: i + 1,
                train_accuracy: a,
                test_accuracy: a,
            })
            .collect();
        let curve = LearningCurve::new(pts).unwrap();
        assert_eq!(curve.rounds_to_settle(0.02), Some(4));
        assert_eq!(curve.rounds_to_settle(0.1), Some(2));
    }

    #[test]
    fn curve_validation() {
        let p = |round, acc| CurvePoint {
            round,
            train_accuracy: acc,
            test_accuracy: acc,
        };
        assert!(LearningCurve::new(vec![p(2, 0.5), p(1, 0.5)]).is_err());
        assert!(LearningCurve::new(vec![p(1, 1.5)]).is_err());
        assert!(LearningCurve::from_staged(&[(1, 0.5)], &[(2, 0.5)]).is_err());
    }
}
