//! Two-dimensional toy problems for the demo page.

use std::f64::consts::PI;

use boostlab::rng::XorShift64Star;
use boostlab::Dataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Moons,
    Circles,
    Blobs,
}

impl Shape {
    pub fn parse(name: &str) -> Result<Self, String> {
        match name {
            "moons" => Ok(Shape::Moons),
            "circles" => Ok(Shape::Circles),
            "blobs" => Ok(Shape::Blobs),
            other => Err(format!("unknown toy dataset '{other}'")),
        }
    }

    pub fn n_classes(self) -> usize {
        match self {
            Shape::Blobs => 3,
            _ => 2,
        }
    }
}

fn gaussian(rng: &mut XorShift64Star) -> f64 {
    // Box-Muller; 1 - u keeps the log argument away from zero
    let u = 1.0 - rng.next_f64();
    let v = rng.next_f64();
    (-2.0 * u.ln()).sqrt() * (2.0 * PI * v).cos()
}

/// `n` points with Gaussian jitter `spread`; a fraction `flip` of labels is
/// reassigned at random.
pub fn generate(
    shape: Shape,
    n: usize,
    spread: f64,
    flip: f64,
    seed: u64,
) -> Result<Dataset, String> {
    if n < 10 {
        return Err("need at least 10 points".into());
    }
    let mut rng = XorShift64Star::new(seed);
    let k = shape.n_classes();
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let c = i % k;
        let t = rng.next_f64() * PI;
        let (x, y) = match shape {
            Shape::Moons if c == 0 => (t.cos(), t.sin()),
            Shape::Moons => (1.0 - t.cos(), 0.5 - t.sin()),
            Shape::Circles => {
                let r = if c == 0 { 0.4 } else { 1.0 };
                (r * (2.0 * t).cos(), r * (2.0 * t).sin())
            }
            Shape::Blobs => {
                let a = 2.0 * PI * c as f64 / 3.0;
                (a.cos(), a.sin())
            }
        };
        rows.push(vec![
            x + spread * gaussian(&mut rng),
            y + spread * gaussian(&mut rng),
        ]);
        let label = if rng.next_f64() < flip {
            rng.below(k as u64) as usize
        } else {
            c
        };
        labels.push(label);
    }
    Dataset::new(
        rows,
        labels,
        vec!["x".into(), "y".into()],
        (0..k).map(|c| format!("class {c}")).collect(),
    )
    .map_err(|e| e.to_string())
}
