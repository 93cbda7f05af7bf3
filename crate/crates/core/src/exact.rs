//! Exact pointwise certification.
//!
//! With `z` fixed, each label `i` contributes independently to `z · y′`, so the
//! largest increase available from changing sample `i` alone is its potential
//! impact `ρ⁺ᵢ` and the largest decrease is `ρ⁻ᵢ`. Taking the `k` largest
//! impacts in each direction attains the exact maximum and minimum over the
//! whole perturbation set.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::config::Tolerances;
use crate::error::{check_len, Error, Result};
use crate::interval::Interval;
use crate::linalg::{Dataset, InfluenceVector, LabelKind, RidgeCertifier};
use crate::multiplicity::{MultiplicitySpec, PerturbationWitness};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Up,
    Down,
}

/// Endpoint of `deltaᵢ` that moves `zᵢ·yᵢ` furthest in `dir`.
#[inline]
fn extreme_delta(zi: f64, delta: Interval, dir: Direction) -> f64 {
    match (dir, zi >= 0.0) {
        (Direction::Up, true) | (Direction::Down, false) => delta.hi,
        (Direction::Up, false) | (Direction::Down, true) => delta.lo,
    }
}

/// `ρ⁺` (for [`Direction::Up`], all entries `>= 0`) or `ρ⁻` (for
/// [`Direction::Down`], all entries `<= 0`). Ineligible samples get 0.
pub fn potential_impacts(
    z: &InfluenceVector,
    spec: &MultiplicitySpec,
    dir: Direction,
) -> Result<Vec<f64>> {
    check_len("spec", z.len(), spec.n())?;
    Ok(z.z
        .iter()
        .zip(spec.delta())
        .zip(spec.eligible())
        .map(|((&zi, &d), &e)| if e { zi * extreme_delta(zi, d, dir) } else { 0.0 })
        .collect())
}

/// Indices of the (at most) `k` largest nonzero impacts by magnitude, ties
/// broken by ascending index; returned in ascending index order.
fn top_k(impacts: &[f64], k: usize) -> Vec<usize> {
    let mut cand: Vec<usize> = (0..impacts.len()).filter(|&i| impacts[i] != 0.0).collect();
    if cand.len() > k {
        let by_magnitude = |a: &usize, b: &usize| -> Ordering {
            impacts[*b]
                .abs()
                .total_cmp(&impacts[*a].abs())
                .then(a.cmp(b))
        };
        if k > 0 {
            cand.select_nth_unstable_by(k - 1, by_magnitude);
        }
        cand.truncate(k);
    }
    cand.sort_unstable();
    cand
}

fn extreme_prediction(
    z: &InfluenceVector,
    y: &[f64],
    spec: &MultiplicitySpec,
    dir: Direction,
) -> Result<(f64, PerturbationWitness)> {
    check_len("labels", z.len(), y.len())?;
    let impacts = potential_impacts(z, spec, dir)?;
    let changed: Vec<(usize, f64)> = top_k(&impacts, spec.k())
        .into_iter()
        .map(|i| (i, extreme_delta(z.z[i], spec.delta()[i], dir)))
        .collect();
    let witness = PerturbationWitness::from_changes(y, changed);
    Ok((z.apply(&witness.resulting_labels), witness))
}

/// Largest attainable `z · y′` and a label vector attaining it.
pub fn max_prediction(
    z: &InfluenceVector,
    y: &[f64],
    spec: &MultiplicitySpec,
) -> Result<(f64, PerturbationWitness)> {
    extreme_prediction(z, y, spec, Direction::Up)
}

/// Smallest attainable `z · y′` and a label vector attaining it.
pub fn min_prediction(
    z: &InfluenceVector,
    y: &[f64],
    spec: &MultiplicitySpec,
) -> Result<(f64, PerturbationWitness)> {
    extreme_prediction(z, y, spec, Direction::Down)
}

/// Exact set of predictions reachable under a perturbation spec.
#[derive(Clone, Debug, PartialEq)]
pub struct PredictionRange {
    pub range: Interval,
    pub lower_witness: PerturbationWitness,
    pub upper_witness: PerturbationWitness,
    pub base: f64,
    pub kind: LabelKind,
}

impl PredictionRange {
    pub fn from_influence(
        z: &InfluenceVector,
        y: &[f64],
        spec: &MultiplicitySpec,
        kind: LabelKind,
    ) -> Result<Self> {
        let (lo, lower_witness) = min_prediction(z, y, spec)?;
        let (hi, upper_witness) = max_prediction(z, y, spec)?;
        let base = z.base_prediction;
        // Rounding in z·y′ can land a hair on the wrong side of base.
        let range = Interval {
            lo: lo.min(base),
            hi: hi.max(base),
        };
        Ok(PredictionRange {
            range,
            lower_witness,
            upper_witness,
            base,
            kind,
        })
    }
}

impl RidgeCertifier<'_> {
    pub fn prediction_range(&self, spec: &MultiplicitySpec, x: &[f64]) -> Result<PredictionRange> {
        let z = self.influence(x)?;
        PredictionRange::from_influence(&z, self.data().labels(), spec, self.data().kind())
    }
}

pub fn prediction_range(
    data: &Dataset,
    lambda: f64,
    spec: &MultiplicitySpec,
    x: &[f64],
) -> Result<PredictionRange> {
    RidgeCertifier::new(data, lambda)?.prediction_range(spec, x)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VerdictStatus {
    Robust,
    NotRobust,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub status: VerdictStatus,
    /// Present iff `status` is `NotRobust`.
    pub counterexample: Option<PerturbationWitness>,
}

impl Verdict {
    fn robust() -> Self {
        Verdict {
            status: VerdictStatus::Robust,
            counterexample: None,
        }
    }

    fn refuted(w: &PerturbationWitness) -> Self {
        Verdict {
            status: VerdictStatus::NotRobust,
            counterexample: Some(w.clone()),
        }
    }

    pub fn is_robust(&self) -> bool {
        self.status == VerdictStatus::Robust
    }
}

/// Robust iff the whole range lies in `[base − ε, base + ε]`, up to the
/// decision slack.
pub fn certify_regression(range: &PredictionRange, epsilon: f64) -> Result<Verdict> {
    certify_regression_with(range, epsilon, &Tolerances::DEFAULT)
}

pub fn certify_regression_with(
    range: &PredictionRange,
    epsilon: f64,
    tol: &Tolerances,
) -> Result<Verdict> {
    if epsilon.is_nan() || epsilon < 0.0 {
        return Err(Error::NegativeEpsilon(epsilon));
    }
    let slack = tol.decision;
    if range.range.hi > range.base + epsilon + slack {
        Ok(Verdict::refuted(&range.upper_witness))
    } else if range.range.lo < range.base - epsilon - slack {
        Ok(Verdict::refuted(&range.lower_witness))
    } else {
        Ok(Verdict::robust())
    }
}

/// Robust iff no reachable prediction falls in the other class, with class
/// `+1` exactly when the prediction is strictly positive.
pub fn certify_classification(range: &PredictionRange) -> Result<Verdict> {
    if range.kind != LabelKind::Binary {
        return Err(Error::NotBinary);
    }
    if range.base > 0.0 {
        if range.range.lo > 0.0 {
            Ok(Verdict::robust())
        } else {
            Ok(Verdict::refuted(&range.lower_witness))
        }
    } else if range.range.hi <= 0.0 {
        Ok(Verdict::robust())
    } else {
        Ok(Verdict::refuted(&range.upper_witness))
    }
}
