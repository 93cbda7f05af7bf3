#![allow(dead_code)]

use multirobust::data::{split, SplitPlan};
use multirobust::experiment::Prepared;
use multirobust_core::{Dataset, LabelKind, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Binary data whose first column is a 0/1 group indicator.
pub fn binary_groups(n: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = Vec::with_capacity(n * 3);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let g = if rng.gen_bool(0.4) { 1.0 } else { 0.0 };
        let a: f64 = rng.gen_range(-1.0..1.0);
        let b: f64 = rng.gen_range(-1.0..1.0);
        let s = a + 0.5 * b - 0.3 * g + 0.4 * rng.gen_range(-1.0..1.0);
        x.extend([g, a, b]);
        y.push(if s > 0.0 { 1.0 } else { -1.0 });
    }
    Dataset::new(Matrix::from_vec(n, 3, x).unwrap(), y, LabelKind::Binary).unwrap()
}

pub fn prepare(all: Dataset, seed: u64) -> Prepared {
    let parts = split(all.n(), &SplitPlan::standard(seed)).unwrap();
    let names = (0..all.d()).map(|j| format!("f{j}")).collect();
    Prepared::from_parts(
        "synthetic",
        names,
        all.select(&parts[0]).unwrap(),
        all.select(&parts[1]).unwrap(),
        all.select(&parts[2]).unwrap(),
        None,
        false,
        true,
        seed,
    )
    .unwrap()
}

pub fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}
