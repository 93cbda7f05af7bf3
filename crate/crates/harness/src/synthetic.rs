//! Seeded random problem instances for cross-checks and timing runs.

use multirobust_core::{Dataset, Interval, LabelKind, Matrix, MultiplicitySpec};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;

/// A small problem the brute-force oracle can enumerate.
#[derive(Clone, Debug)]
pub struct Instance {
    pub data: Dataset,
    pub lambda: f64,
    pub spec: MultiplicitySpec,
    pub points: Vec<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InstanceShape {
    pub max_n: usize,
    pub max_d: usize,
    pub max_k: usize,
    pub points: usize,
}

impl Default for InstanceShape {
    fn default() -> Self {
        InstanceShape {
            max_n: 12,
            max_d: 4,
            max_k: 3,
            points: 3,
        }
    }
}

fn random_delta(rng: &mut impl Rng) -> Interval {
    // Mix of symmetric, one-sided and asymmetric ranges.
    match rng.gen_range(0..4) {
        0 => {
            let a = rng.gen_range(0.1..2.0);
            Interval { lo: -a, hi: a }
        }
        1 => Interval {
            lo: 0.0,
            hi: rng.gen_range(0.1..2.0),
        },
        2 => Interval {
            lo: -rng.gen_range(0.1..2.0),
            hi: 0.0,
        },
        _ => Interval {
            lo: -rng.gen_range(0.0..2.0),
            hi: rng.gen_range(0.0..2.0),
        },
    }
}

pub fn random_point(rng: &mut impl Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect()
}

/// Regression or binary data with mixed perturbation intervals and some
/// ineligible rows.
pub fn random_instance(rng: &mut impl Rng, shape: &InstanceShape) -> Result<Instance> {
    let n = rng.gen_range(2..=shape.max_n);
    let d = rng.gen_range(1..=shape.max_d);
    let x: Vec<f64> = (0..n * d).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let binary = rng.gen_bool(0.3);
    let (labels, kind): (Vec<f64>, _) = if binary {
        let y = (0..n).map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 }).collect();
        (y, LabelKind::Binary)
    } else {
        let y = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        (y, LabelKind::Regression)
    };
    let eligible: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.75)).collect();
    let delta = (0..n)
        .map(|i| {
            if !eligible[i] {
                Interval::ZERO
            } else if binary {
                // A flip moves a label by 2 towards the other class.
                if labels[i] > 0.0 {
                    Interval { lo: -2.0, hi: 0.0 }
                } else {
                    Interval { lo: 0.0, hi: 2.0 }
                }
            } else {
                random_delta(rng)
            }
        })
        .collect();
    let k = rng.gen_range(0..=shape.max_k.min(n));
    let lambda = 10f64.powf(rng.gen_range(-1.0..1.0));
    let data = Dataset::new(Matrix::from_vec(n, d, x)?, labels, kind)?;
    let spec = MultiplicitySpec::new(k, delta, eligible)?;
    let points = (0..shape.points).map(|_| random_point(rng, d)).collect();
    Ok(Instance {
        data,
        lambda,
        spec,
        points,
    })
}

pub fn random_instances(count: usize, seed: u64, shape: &InstanceShape) -> Result<Vec<Instance>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_instance(&mut rng, shape)).collect()
}

/// Linear-model regression data `y = Xθ + noise` with `n` rows and `d`
/// uniform features.
pub fn linear_regression_data(n: usize, d: usize, noise: f64, seed: u64) -> Result<Dataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let theta: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut x = Vec::with_capacity(n * d);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let row: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let t: f64 = row.iter().zip(&theta).map(|(a, b)| a * b).sum();
        y.push(t + noise * rng.gen_range(-1.0..1.0));
        x.extend(row);
    }
    Ok(Dataset::new(Matrix::from_vec(n, d, x)?, y, LabelKind::Regression)?)
}

/// Rows with a seeded point set for timing queries.
pub fn random_points(count: usize, d: usize, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = (0..count * d).map(|_| rng.gen_range(-1.0..1.0)).collect();
    Matrix::from_vec(count, d, v).expect("shape matches")
}
