//! Brute-force AdaBoost written independently of the library: direct sums
//! over every candidate stump, no incremental sweeps, no shared helpers.

pub const TIE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleStump {
    pub feature: usize,
    pub threshold: f64,
    pub left: usize,
    pub right: usize,
}

impl OracleStump {
    pub fn predict(&self, x: &[f64]) -> usize {
        if x[self.feature] <= self.threshold {
            self.left
        } else {
            self.right
        }
    }
}

#[derive(Debug, Clone)]
pub struct OracleRound {
    pub epsilon: f64,
    pub alpha: f64,
    pub accepted: bool,
    pub predictions: Vec<usize>,
    pub weights_before: Vec<f64>,
    pub weights_after: Vec<f64>,
}

fn observed_labels(y: &[usize]) -> Vec<usize> {
    let mut v = y.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

pub fn best_stump(x: &[Vec<f64>], y: &[usize], w: &[f64], k: usize) -> OracleStump {
    let d = x[0].len();
    let labels = observed_labels(y);
    let mut best: Option<(f64, OracleStump)> = None;
    for j in 0..d {
        let mut vals: Vec<f64> = x.iter().map(|r| r[j]).collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        vals.dedup();
        for pair in vals.windows(2) {
            let t = pair[0] + (pair[1] - pair[0]) / 2.0;
            for &l in &labels {
                for &r in &labels {
                    let s = OracleStump {
                        feature: j,
                        threshold: t,
                        left: l,
                        right: r,
                    };
                    let err: f64 = (0..y.len())
                        .filter(|&i| s.predict(&x[i]) != y[i])
                        .map(|i| w[i])
                        .sum();
                    if best.as_ref().is_none_or(|(e, _)| err < e - TIE) {
                        best = Some((err, s));
                    }
                }
            }
        }
    }
    best.map(|(_, s)| s).unwrap_or_else(|| {
        let mut mass = vec![0.0; k];
        for (i, &c) in y.iter().enumerate() {
            mass[c] += w[i];
        }
        let mut c = 0;
        for m in 1..k {
            if mass[m] > mass[c] {
                c = m;
            }
        }
        OracleStump {
            feature: 0,
            threshold: x[0][0],
            left: c,
            right: c,
        }
    })
}

/// Textbook AdaBoost with the indicator update; stops at the first round
/// whose error is no better than random guessing.
pub fn adaboost(
    x: &[Vec<f64>],
    y: &[usize],
    k: usize,
    rounds: usize,
    eps_min: f64,
) -> (Vec<OracleRound>, Vec<(f64, OracleStump)>) {
    let n = y.len();
    let mut w = vec![1.0 / n as f64; n];
    let mut trace = Vec::new();
    let mut model = Vec::new();
    for _ in 0..rounds {
        let s = best_stump(x, y, &w, k);
        let pred: Vec<usize> = x.iter().map(|r| s.predict(r)).collect();
        let total: f64 = w.iter().sum();
        let wrong: f64 = (0..n).filter(|&i| pred[i] != y[i]).map(|i| w[i]).sum();
        let eps = wrong / total;
        let e = eps.max(eps_min).min(1.0 - eps_min);
        let alpha = if k == 2 {
            0.5 * ((1.0 - e) / e).ln()
        } else {
            ((1.0 - e) / e).ln() + ((k - 1) as f64).ln()
        };
        if eps >= (k as f64 - 1.0) / k as f64 || alpha <= 0.0 {
            trace.push(OracleRound {
                epsilon: eps,
                alpha,
                accepted: false,
                predictions: pred,
                weights_before: w.clone(),
                weights_after: w.clone(),
            });
            break;
        }
        let mut next: Vec<f64> = (0..n)
            .map(|i| {
                if pred[i] != y[i] {
                    w[i] * alpha.exp()
                } else {
                    w[i]
                }
            })
            .collect();
        let z: f64 = next.iter().sum();
        next.iter_mut().for_each(|v| *v /= z);
        trace.push(OracleRound {
            epsilon: eps,
            alpha,
            accepted: true,
            predictions: pred,
            weights_before: w.clone(),
            weights_after: next.clone(),
        });
        model.push((alpha, s));
        w = next;
    }
    (trace, model)
}

pub fn vote(model: &[(f64, OracleStump)], x: &[f64], k: usize) -> usize {
    let mut votes = vec![0.0; k];
    for (a, s) in model {
        votes[s.predict(x)] += a;
    }
    let mut best = 0;
    for c in 1..k {
        if votes[c] > votes[best] {
            best = c;
        }
    }
    best
}
