//! The label-perturbation model: at most `k` labels change, label `i` moves by
//! an amount in `deltaᵢ`, and only eligible samples may move at all.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_len, Error, Result};
use crate::interval::Interval;
use crate::linalg::{Dataset, LabelKind};

/// Materialized perturbation set for one training set.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiplicitySpec {
    k: usize,
    delta: Vec<Interval>,
    eligible: Vec<bool>,
}

impl MultiplicitySpec {
    /// Fails unless every `deltaᵢ` contains 0, `k <= n`, and lengths agree.
    pub fn new(k: usize, delta: Vec<Interval>, eligible: Vec<bool>) -> Result<Self> {
        let n = delta.len();
        check_len("eligibility mask", n, eligible.len())?;
        if k > n {
            return Err(Error::BudgetTooLarge { k, n });
        }
        if let Some(i) = delta.iter().position(|d| !d.contains_zero()) {
            return Err(Error::InvalidRule { rule: i });
        }
        Ok(MultiplicitySpec { k, delta, eligible })
    }

    /// The empty perturbation set: nothing may change.
    pub fn none(n: usize) -> Self {
        MultiplicitySpec {
            k: 0,
            delta: vec![Interval::ZERO; n],
            eligible: vec![false; n],
        }
    }

    pub fn n(&self) -> usize {
        self.delta.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn delta(&self) -> &[Interval] {
        &self.delta
    }

    pub fn eligible(&self) -> &[bool] {
        &self.eligible
    }

    pub fn eligible_count(&self) -> usize {
        self.eligible.iter().filter(|&&e| e).count()
    }

    pub fn with_k(&self, k: usize) -> Result<Self> {
        Self::new(k, self.delta.clone(), self.eligible.clone())
    }

    /// Every delta interval multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Self {
        debug_assert!(c > 0.0);
        MultiplicitySpec {
            k: self.k,
            delta: self
                .delta
                .iter()
                .map(|d| Interval {
                    lo: d.lo * c,
                    hi: d.hi * c,
                })
                .collect(),
            eligible: self.eligible.clone(),
        }
    }
}

/// How many labels may change.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Budget {
    Count(usize),
    /// A fraction of the training set size, rounded down.
    Fraction(f64),
}

impl Budget {
    pub fn resolve(self, n: usize) -> Result<usize> {
        match self {
            Budget::Count(k) if k > n => Err(Error::BudgetTooLarge { k, n }),
            Budget::Count(k) => Ok(k),
            Budget::Fraction(p) if !(0.0..=1.0).contains(&p) => Err(Error::BadFraction(p)),
            // The 1e-9 nudge keeps e.g. 0.1% of 13000 at 13 instead of 12.999…
            Budget::Fraction(p) => Ok((libm::floor(p * n as f64 + 1e-9) as usize).min(n)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Comparison {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl Comparison {
    pub fn holds(self, value: f64, threshold: f64) -> bool {
        match self {
            Comparison::Eq => value == threshold,
            Comparison::Ne => value != threshold,
            Comparison::Lt => value < threshold,
            Comparison::Le => value <= threshold,
            Comparison::Gt => value > threshold,
            Comparison::Ge => value >= threshold,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FeatureCondition {
    pub feature: usize,
    pub cmp: Comparison,
    pub threshold: f64,
}

/// One clause of the eligibility predicate with the delta it grants.
///
/// A sample matches when every feature condition holds and, if set, its label
/// equals `label`. Rules are applied in order and the last match wins.
#[derive(Clone, Debug, PartialEq)]
pub struct BiasRule {
    pub conditions: Vec<FeatureCondition>,
    pub label: Option<f64>,
    pub delta: Interval,
}

impl BiasRule {
    pub fn new(conditions: Vec<FeatureCondition>, label: Option<f64>, delta: Interval) -> Self {
        BiasRule {
            conditions,
            label,
            delta,
        }
    }

    /// Flip negatives up to `+1` inside the group `x[feature] == value`.
    pub fn promote(feature: usize, value: f64) -> Self {
        BiasRule::new(
            vec![FeatureCondition {
                feature,
                cmp: Comparison::Eq,
                threshold: value,
            }],
            Some(-1.0),
            Interval { lo: 0.0, hi: 2.0 },
        )
    }

    /// Flip positives down to `-1` inside the group `x[feature] == value`.
    pub fn demote(feature: usize, value: f64) -> Self {
        BiasRule::new(
            vec![FeatureCondition {
                feature,
                cmp: Comparison::Eq,
                threshold: value,
            }],
            Some(1.0),
            Interval { lo: -2.0, hi: 0.0 },
        )
    }

    /// The two rules that let any binary label flip to the other class.
    pub fn label_flips() -> [BiasRule; 2] {
        [
            BiasRule::new(Vec::new(), Some(-1.0), Interval { lo: 0.0, hi: 2.0 }),
            BiasRule::new(Vec::new(), Some(1.0), Interval { lo: -2.0, hi: 0.0 }),
        ]
    }

    pub fn matches(&self, row: &[f64], label: f64) -> bool {
        self.label.is_none_or(|l| l == label)
            && self
                .conditions
                .iter()
                .all(|c| c.cmp.holds(row[c.feature], c.threshold))
    }
}

pub fn materialize_spec(
    data: &Dataset,
    rules: &[BiasRule],
    budget: Budget,
) -> Result<MultiplicitySpec> {
    for (i, r) in rules.iter().enumerate() {
        if !r.delta.contains_zero() {
            return Err(Error::InvalidRule { rule: i });
        }
        if let Some(c) = r.conditions.iter().find(|c| c.feature >= data.d()) {
            return Err(Error::DimensionMismatch {
                what: "rule feature index",
                expected: data.d(),
                found: c.feature,
            });
        }
    }
    let n = data.n();
    let k = budget.resolve(n)?;
    let mut delta = vec![Interval::ZERO; n];
    let mut eligible = vec![false; n];
    for (i, (row, &y)) in data.features().iter_rows().zip(data.labels()).enumerate() {
        if let Some(rule) = rules.iter().rev().find(|r| r.matches(row, y)) {
            delta[i] = rule.delta;
            eligible[i] = true;
        }
    }
    MultiplicitySpec::new(k, delta, eligible)
}

pub fn targeted_promote(
    data: &Dataset,
    group_feature: usize,
    group_value: f64,
    budget: Budget,
) -> Result<MultiplicitySpec> {
    if data.kind() != LabelKind::Binary {
        return Err(Error::NotBinary);
    }
    materialize_spec(data, &[BiasRule::promote(group_feature, group_value)], budget)
}

pub fn targeted_demote(
    data: &Dataset,
    group_feature: usize,
    group_value: f64,
    budget: Budget,
) -> Result<MultiplicitySpec> {
    if data.kind() != LabelKind::Binary {
        return Err(Error::NotBinary);
    }
    materialize_spec(data, &[BiasRule::demote(group_feature, group_value)], budget)
}

/// A concrete alternative label vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PerturbationWitness {
    /// `(sample index, applied delta)`, one entry per changed label.
    pub changed: Vec<(usize, f64)>,
    pub resulting_labels: Vec<f64>,
}

impl PerturbationWitness {
    pub fn unchanged(original: &[f64]) -> Self {
        PerturbationWitness {
            changed: Vec::new(),
            resulting_labels: original.to_vec(),
        }
    }

    /// Applies `changes` to `original`. Indices are not checked against any spec.
    pub fn from_changes(original: &[f64], changed: Vec<(usize, f64)>) -> Self {
        let mut resulting_labels = original.to_vec();
        for &(i, d) in &changed {
            resulting_labels[i] += d;
        }
        PerturbationWitness {
            changed,
            resulting_labels,
        }
    }

    /// Derives the change list from a full label vector; entries within `tol`
    /// of the original count as unchanged and are snapped back to it.
    pub fn from_labels(original: &[f64], labels: &[f64], tol: f64) -> Result<Self> {
        check_len("witness labels", original.len(), labels.len())?;
        let mut changed = Vec::new();
        let mut resulting_labels = original.to_vec();
        for (i, (&o, &l)) in original.iter().zip(labels).enumerate() {
            if (l - o).abs() > tol * (1.0 + o.abs()) {
                changed.push((i, l - o));
                resulting_labels[i] = l;
            }
        }
        Ok(PerturbationWitness {
            changed,
            resulting_labels,
        })
    }
}

const WITNESS_TOL: f64 = 1e-9;

/// Whether `witness` is a member of the perturbation set of `spec` around
/// `original`'s labels.
pub fn validate_witness(
    spec: &MultiplicitySpec,
    original: &Dataset,
    witness: &PerturbationWitness,
) -> Result<bool> {
    validate_labels(spec, original.labels(), witness)
}

pub(crate) fn validate_labels(
    spec: &MultiplicitySpec,
    labels: &[f64],
    witness: &PerturbationWitness,
) -> Result<bool> {
    let n = labels.len();
    check_len("spec", n, spec.n())?;
    check_len("witness labels", n, witness.resulting_labels.len())?;
    if witness.changed.len() > spec.k {
        return Ok(false);
    }
    let mut touched = vec![false; n];
    for &(i, d) in &witness.changed {
        if i >= n || touched[i] || !spec.eligible[i] {
            return Ok(false);
        }
        touched[i] = true;
        let slack = WITNESS_TOL * (1.0 + d.abs());
        let iv = spec.delta[i];
        if d < iv.lo - slack || d > iv.hi + slack {
            return Ok(false);
        }
        let expect = labels[i] + d;
        if (witness.resulting_labels[i] - expect).abs() > WITNESS_TOL * (1.0 + expect.abs()) {
            return Ok(false);
        }
    }
    Ok(labels
        .iter()
        .zip(&witness.resulting_labels)
        .zip(&touched)
        .all(|((a, b), &t)| t || a == b))
}
