//! Brute-force references for small instances.
//!
//! `z · y′` is linear in `y′`, so its extremes over the perturbation set sit at
//! interval endpoints: enumerating every eligible subset of size `<= k` and
//! every endpoint assignment is exact. None of this shares code with the
//! greedy in [`crate::exact`].

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_len, Error, Result};
use crate::interval::Interval;
use crate::linalg::{CoefficientMap, Matrix};
use crate::multiplicity::{validate_labels, MultiplicitySpec, PerturbationWitness};

/// Guard against combinatorial blow-up.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationBudget {
    pub max_n: usize,
    pub max_k: usize,
    pub max_evaluations: u128,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        EnumerationBudget {
            max_n: 24,
            max_k: 6,
            max_evaluations: 20_000_000,
        }
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i as u128 + 1))
}

impl EnumerationBudget {
    /// `Σ_{j <= k} C(m, j)·2^j` label vectors for `m` eligible samples.
    pub fn evaluations(eligible: usize, k: usize) -> u128 {
        (0..=k.min(eligible))
            .map(|j| binomial(eligible, j) << j)
            .sum()
    }

    pub fn check(&self, spec: &MultiplicitySpec) -> Result<()> {
        let evaluations = Self::evaluations(spec.eligible_count(), spec.k());
        if spec.n() > self.max_n || spec.k() > self.max_k || evaluations > self.max_evaluations {
            return Err(Error::BudgetExceeded {
                evaluations,
                limit: self.max_evaluations,
            });
        }
        Ok(())
    }
}

/// Calls `visit` with every feasible endpoint label vector.
fn for_each_vertex(y: &[f64], spec: &MultiplicitySpec, mut visit: impl FnMut(&[f64])) {
    let idx: Vec<usize> = (0..spec.n()).filter(|&i| spec.eligible()[i]).collect();
    let mut cur = y.to_vec();
    fn rec(
        start: usize,
        left: usize,
        idx: &[usize],
        delta: &[Interval],
        y: &[f64],
        cur: &mut Vec<f64>,
        visit: &mut dyn FnMut(&[f64]),
    ) {
        visit(cur);
        if left == 0 {
            return;
        }
        for p in start..idx.len() {
            let i = idx[p];
            for end in [delta[i].lo, delta[i].hi] {
                cur[i] = y[i] + end;
                rec(p + 1, left - 1, idx, delta, y, cur, visit);
            }
            cur[i] = y[i];
        }
    }
    rec(0, spec.k(), &idx, spec.delta(), y, &mut cur, &mut visit);
}

/// Exact range of a linear functional together with label vectors attaining
/// both ends.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleRange {
    pub range: Interval,
    pub argmin: Vec<f64>,
    pub argmax: Vec<f64>,
}

pub fn oracle_prediction_range(
    z: &[f64],
    y: &[f64],
    spec: &MultiplicitySpec,
    budget: &EnumerationBudget,
) -> Result<OracleRange> {
    check_len("labels", z.len(), y.len())?;
    check_len("spec", z.len(), spec.n())?;
    budget.check(spec)?;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut argmin, mut argmax) = (y.to_vec(), y.to_vec());
    for_each_vertex(y, spec, |yp| {
        let v: f64 = z.iter().zip(yp).map(|(a, b)| a * b).sum();
        if v < lo {
            lo = v;
            argmin.copy_from_slice(yp);
        }
        if v > hi {
            hi = v;
            argmax.copy_from_slice(yp);
        }
    });
    Ok(OracleRange {
        range: Interval { lo, hi },
        argmin,
        argmax,
    })
}

/// Every feasible endpoint label vector; for enclosure tests on tiny inputs.
pub fn feasible_vertices(
    y: &[f64],
    spec: &MultiplicitySpec,
    budget: &EnumerationBudget,
) -> Result<Vec<Vec<f64>>> {
    check_len("spec", y.len(), spec.n())?;
    budget.check(spec)?;
    let mut out = Vec::new();
    for_each_vertex(y, spec, |yp| out.push(yp.to_vec()));
    Ok(out)
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
fn lu_solve(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.rows();
    let mut m = a.clone();
    let mut x = b.to_vec();
    let scale = m.as_slice().iter().fold(0.0f64, |s, v| s.max(v.abs()));
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[(i, col)].abs().total_cmp(&m[(j, col)].abs()))
            .unwrap_or(col);
        if m[(piv, col)].is_nan() || m[(piv, col)].abs() <= 1e-12 * scale {
            return Err(Error::Singular);
        }
        if piv != col {
            for j in 0..n {
                let t = m[(col, j)];
                m[(col, j)] = m[(piv, j)];
                m[(piv, j)] = t;
            }
            x.swap(col, piv);
        }
        for r in col + 1..n {
            let f = m[(r, col)] / m[(col, col)];
            if f != 0.0 {
                for j in col..n {
                    m[(r, j)] -= f * m[(col, j)];
                }
                x[r] -= f * x[col];
            }
        }
    }
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|j| m[(r, j)] * x[j]).sum();
        x[r] = (x[r] - s) / m[(r, r)];
    }
    Ok(x)
}

/// Whether `target` is an attainable weight vector, for a square invertible
/// coefficient map: the unique preimage `C⁻¹ target` must be a feasible label
/// vector.
pub fn theta_membership(
    map: &CoefficientMap,
    target: &[f64],
    y: &[f64],
    spec: &MultiplicitySpec,
) -> Result<bool> {
    let (rows, cols) = (map.c.rows(), map.c.cols());
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    check_len("target", rows, target.len())?;
    check_len("labels", cols, y.len())?;
    let preimage = lu_solve(&map.c, target)?;
    let witness = PerturbationWitness::from_labels(y, &preimage, 1e-9)?;
    validate_labels(spec, y, &witness)
}

/// `count` pseudo-random feasible label vectors, deterministic in `seed`.
/// Half of the perturbed entries sit on an interval endpoint, the rest are
/// uniform inside it.
pub fn sample_feasible_labels(
    y: &[f64],
    spec: &MultiplicitySpec,
    count: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    check_len("spec", y.len(), spec.n())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool: Vec<usize> = (0..spec.n()).filter(|&i| spec.eligible()[i]).collect();
    let cap = spec.k().min(pool.len());
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let size = rng.gen_range(0..=cap);
        let mut yp = y.to_vec();
        for j in 0..size {
            let pick = rng.gen_range(j..pool.len());
            pool.swap(j, pick);
            let i = pool[j];
            let d = spec.delta()[i];
            let shift = match rng.gen_range(0..4u8) {
                0 => d.lo,
                1 => d.hi,
                _ if d.width() > 0.0 => rng.gen_range(d.lo..=d.hi),
                _ => d.lo,
            };
            yp[i] += shift;
        }
        out.push(yp);
    }
    Ok(out)
}

/// Feasible weight vectors `C y′` for sampled `y′`.
pub fn sample_theta(
    map: &CoefficientMap,
    y: &[f64],
    spec: &MultiplicitySpec,
    count: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    check_len("labels", map.c.cols(), y.len())?;
    sample_feasible_labels(y, spec, count, seed)?
        .iter()
        .map(|yp| map.apply(yp))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    fn sym(n: usize, k: usize) -> MultiplicitySpec {
        MultiplicitySpec::new(k, vec![iv(-1.0, 1.0); n], vec![true; n]).unwrap()
    }

    fn example_map() -> CoefficientMap {
        CoefficientMap::from_matrix(
            Matrix::from_rows(&[[1.0, 2.0, 1.0], [-1.0, 0.0, 2.0], [2.0, 1.0, 0.0]]).unwrap(),
        )
    }

    const EXAMPLE_Y: [f64; 3] = [1.0, -1.0, 2.0];

    #[test]
    fn evaluation_count() {
        assert_eq!(EnumerationBudget::evaluations(3, 2), 1 + 6 + 12);
        assert_eq!(EnumerationBudget::evaluations(2, 5), 1 + 4 + 4);
        assert_eq!(binomial(12, 3), 220);
    }

    #[test]
    fn zero_budget_is_point() {
        let y = [1.0, 2.0, 3.0];
        let z = [0.5, -1.0, 2.0];
        let r = oracle_prediction_range(&z, &y, &sym(3, 0), &EnumerationBudget::default()).unwrap();
        assert_eq!(r.range, Interval::point(4.5));
    }

    #[test]
    fn small_example() {
        let r = oracle_prediction_range(
            &[2.0, -1.0, 3.0],
            &[0.0; 3],
            &sym(3, 2),
            &EnumerationBudget::default(),
        )
        .unwrap();
        assert_eq!(r.range, iv(-5.0, 5.0));
        assert_eq!(r.argmax, vec![1.0, 0.0, 1.0]);
    }

    #[test]
    fn refuses_large_enumerations() {
        let budget = EnumerationBudget {
            max_n: 100,
            max_k: 10,
            max_evaluations: 1000,
        };
        let r = oracle_prediction_range(&[0.0; 30], &[0.0; 30], &sym(30, 5), &budget);
        assert!(matches!(r, Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn interior_values_never_beat_endpoints() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..40 {
            let n = rng.gen_range(1..=6);
            let k = rng.gen_range(0..=n.min(2));
            let z: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let delta: Vec<Interval> = (0..n)
                .map(|_| iv(-rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)))
                .collect();
            let spec = MultiplicitySpec::new(k, delta.clone(), vec![true; n]).unwrap();
            let r = oracle_prediction_range(&z, &y, &spec, &EnumerationBudget::default()).unwrap();
            // 5-point grid on each changed coordinate, all subsets of size <= k.
            for mask in 0u32..(1 << n) {
                let members: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
                if members.len() > k {
                    continue;
                }
                let combos = 5usize.pow(members.len() as u32);
                for c in 0..combos {
                    let mut yp = y.clone();
                    let mut code = c;
                    for &i in &members {
                        let t = (code % 5) as f64 / 4.0;
                        code /= 5;
                        yp[i] += delta[i].lo + t * delta[i].width();
                    }
                    let v: f64 = z.iter().zip(&yp).map(|(a, b)| a * b).sum();
                    assert!(v >= r.range.lo - 1e-12 && v <= r.range.hi + 1e-12);
                }
            }
        }
    }

    #[test]
    fn membership_of_unperturbed_and_example_points() {
        let map = example_map();
        let spec = sym(3, 2);
        let theta = map.apply(&EXAMPLE_Y).unwrap();
        assert!(theta_membership(&map, &theta, &EXAMPLE_Y, &spec).unwrap());
        // (1, 0, 3) changes samples 1 and 2 by +1 each.
        assert_eq!(map.apply(&[1.0, 0.0, 3.0]).unwrap(), vec![4.0, 5.0, 2.0]);
        assert!(theta_membership(&map, &[4.0, 5.0, 2.0], &EXAMPLE_Y, &spec).unwrap());
        // Preimage of (3, 6, 3) is (2.4, -1.8, 4.2): three changes, two out of range.
        assert!(!theta_membership(&map, &[3.0, 6.0, 3.0], &EXAMPLE_Y, &spec).unwrap());
    }

    #[test]
    fn midpoint_of_distinct_supports_is_outside() {
        let map = example_map();
        let spec = sym(3, 2);
        let a = map.apply(&[1.0, 0.0, 3.0]).unwrap();
        let b = map.apply(&[2.0, -1.5, 2.0]).unwrap();
        assert!(theta_membership(&map, &a, &EXAMPLE_Y, &spec).unwrap());
        assert!(theta_membership(&map, &b, &EXAMPLE_Y, &spec).unwrap());
        let mid: Vec<f64> = a.iter().zip(&b).map(|(p, q)| (p + q) / 2.0).collect();
        assert!(!theta_membership(&map, &mid, &EXAMPLE_Y, &spec).unwrap());
    }

    #[test]
    fn membership_errors() {
        let map = CoefficientMap::from_matrix(Matrix::zeros(2, 3));
        assert_eq!(
            theta_membership(&map, &[0.0; 2], &[0.0; 3], &sym(3, 1)),
            Err(Error::NotSquare { rows: 2, cols: 3 })
        );
        let map = CoefficientMap::from_matrix(
            Matrix::from_rows(&[[1.0, 2.0], [2.0, 4.0]]).unwrap(),
        );
        assert_eq!(
            theta_membership(&map, &[0.0; 2], &[0.0; 2], &sym(2, 1)),
            Err(Error::Singular)
        );
    }

    #[test]
    fn samples_are_members_and_deterministic() {
        let map = example_map();
        let spec = sym(3, 2);
        assert!(sample_theta(&map, &EXAMPLE_Y, &spec, 0, 1).unwrap().is_empty());
        let s = sample_theta(&map, &EXAMPLE_Y, &spec, 200, 42).unwrap();
        assert_eq!(s, sample_theta(&map, &EXAMPLE_Y, &spec, 200, 42).unwrap());
        assert_ne!(s, sample_theta(&map, &EXAMPLE_Y, &spec, 200, 43).unwrap());
        for t in &s {
            assert!(theta_membership(&map, t, &EXAMPLE_Y, &spec).unwrap());
        }
    }

    #[test]
    fn vertices_respect_budget() {
        let spec = MultiplicitySpec::new(1, vec![iv(-1.0, 1.0); 3], vec![true, false, true]).unwrap();
        let v = feasible_vertices(&[0.0; 3], &spec, &EnumerationBudget::default()).unwrap();
        assert_eq!(v.len(), 5);
        assert!(v.iter().all(|yp| yp[1] == 0.0));
    }
}
