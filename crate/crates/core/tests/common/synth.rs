//! Synthetic tables with the geometry of grain-shape datasets: a couple of
//! latent axis lengths per class, then many strongly correlated derived
//! features. Stand-ins when the real tables are not on disk.

use boostlab::Dataset;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use std::f64::consts::PI;

struct Shape {
    major: (f64, f64),
    minor: (f64, f64),
    extent: f64,
}

fn shape_features(rng: &mut ChaCha8Rng, s: &Shape, full: bool) -> Vec<f64> {
    let major = Normal::new(s.major.0, s.major.1)
        .unwrap()
        .sample(rng)
        .max(1.0);
    let minor = Normal::new(s.minor.0, s.minor.1)
        .unwrap()
        .sample(rng)
        .clamp(0.5, major);
    let jitter = |rng: &mut ChaCha8Rng, sd: f64| 1.0 + Normal::new(0.0, sd).unwrap().sample(rng);
    let area = PI / 4.0 * major * minor * jitter(rng, 0.02);
    let (a, b) = (major / 2.0, minor / 2.0);
    let h = ((a - b) / (a + b)).powi(2);
    let perimeter =
        PI * (a + b) * (1.0 + 3.0 * h / (10.0 + (4.0 - 3.0 * h).sqrt())) * jitter(rng, 0.015);
    let ecc = (1.0 - (minor / major).powi(2)).sqrt();
    let convex = area * (1.0 + rng.gen_range(0.003..0.03));
    let extent = (s.extent + Normal::new(0.0, 0.04).unwrap().sample(rng)).clamp(0.4, 0.95);
    if !full {
        return vec![area, perimeter, major, minor, ecc, convex, extent];
    }
    let aspect = major / minor;
    let eq_diam = (4.0 * area / PI).sqrt();
    let solidity = area / convex;
    let roundness = 4.0 * PI * area / perimeter.powi(2);
    let compactness = eq_diam / major;
    vec![
        area,
        perimeter,
        major,
        minor,
        aspect,
        ecc,
        convex,
        eq_diam,
        extent,
        solidity,
        roundness,
        compactness,
        major / area,
        minor / area,
        compactness * compactness,
        area / (a * b * PI),
    ]
}

fn build(classes: &[(&str, usize, Shape)], full: bool, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (k, (_, count, shape)) in classes.iter().enumerate() {
        for _ in 0..*count {
            rows.push(shape_features(&mut rng, shape, full));
            labels.push(k);
        }
    }
    let d = rows[0].len();
    Dataset::new(
        rows,
        labels,
        (0..d).map(|j| format!("f{j}")).collect(),
        classes.iter().map(|c| c.0.to_string()).collect(),
    )
    .unwrap()
}

/// Two elongated grain varieties, 7 shape features, 3810 rows.
pub fn rice_like(seed: u64) -> Dataset {
    build(
        &[
            (
                "Cammeo",
                1630,
                Shape {
                    major: (205.0, 12.0),
                    minor: (88.0, 5.0),
                    extent: 0.65,
                },
            ),
            (
                "Osmancik",
                2180,
                Shape {
                    major: (180.0, 10.0),
                    minor: (84.0, 5.0),
                    extent: 0.67,
                },
            ),
        ],
        false,
        seed,
    )
}

/// Seven bean varieties, 16 shape features, 13611 rows.
pub fn dry_bean_like(seed: u64) -> Dataset {
    build(
        &[
            (
                "BARBUNYA",
                1322,
                Shape {
                    major: (370.0, 30.0),
                    minor: (240.0, 18.0),
                    extent: 0.75,
                },
            ),
            (
                "BOMBAY",
                522,
                Shape {
                    major: (590.0, 40.0),
                    minor: (410.0, 25.0),
                    extent: 0.77,
                },
            ),
            (
                "CALI",
                1630,
                Shape {
                    major: (410.0, 25.0),
                    minor: (250.0, 15.0),
                    extent: 0.76,
                },
            ),
            (
                "DERMASON",
                3546,
                Shape {
                    major: (250.0, 18.0),
                    minor: (175.0, 12.0),
                    extent: 0.75,
                },
            ),
            (
                "HOROZ",
                1928,
                Shape {
                    major: (370.0, 25.0),
                    minor: (190.0, 12.0),
                    extent: 0.71,
                },
            ),
            (
                "SEKER",
                2027,
                Shape {
                    major: (250.0, 18.0),
                    minor: (200.0, 12.0),
                    extent: 0.77,
                },
            ),
            (
                "SIRA",
                2636,
                Shape {
                    major: (300.0, 20.0),
                    minor: (200.0, 12.0),
                    extent: 0.75,
                },
            ),
        ],
        true,
        seed,
    )
}
