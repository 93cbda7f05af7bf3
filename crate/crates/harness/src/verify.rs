//! Cross-checks of the greedy certifier and the Θ-box against brute-force
//! enumeration.

use multirobust_core::approx::certify_approx;
use multirobust_core::oracle::feasible_vertices;
use multirobust_core::{
    oracle_prediction_range, validate_witness, ApproxVerdict, Dataset, EnumerationBudget,
    InfluenceVector, LabelKind, Mode, MultiplicitySpec, PredictionRange, RidgeCertifier,
};
use rand::seq::index::sample;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::experiment::{decide, Prepared};
use crate::synthetic::{random_instance, InstanceShape};

/// Absolute agreement required between greedy and oracle values.
pub const AGREEMENT_TOL: f64 = 1e-9;

/// The range computation under test. The default is the greedy certifier;
/// tests substitute corrupted versions to check that verification fails.
pub type RangeFn<'a> = &'a (dyn Fn(
    &InfluenceVector,
    &[f64],
    &MultiplicitySpec,
    LabelKind,
) -> multirobust_core::Result<PredictionRange>
         + Sync);

pub fn greedy_range(
    z: &InfluenceVector,
    y: &[f64],
    spec: &MultiplicitySpec,
    kind: LabelKind,
) -> multirobust_core::Result<PredictionRange> {
    PredictionRange::from_influence(z, y, spec, kind)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct VerifyReport {
    pub instances: usize,
    pub checks: usize,
    pub failures: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    pub fn merge(&mut self, other: VerifyReport) {
        self.instances += other.instances;
        self.checks += other.checks;
        self.failures.extend(other.failures);
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= AGREEMENT_TOL
}

/// Checks every point of one instance: greedy range against the oracle,
/// witnesses, Θ-box coordinates against the oracle, enclosure of every
/// feasible weight vector, range containment and approx soundness.
#[allow(clippy::too_many_arguments)]
pub fn verify_instance(
    tag: &str,
    data: &Dataset,
    lambda: f64,
    spec: &MultiplicitySpec,
    points: &[Vec<f64>],
    epsilon: f64,
    budget: &EnumerationBudget,
    range_fn: RangeFn,
) -> Result<VerifyReport> {
    let mut rep = VerifyReport {
        instances: 1,
        ..Default::default()
    };
    let cert = RidgeCertifier::new(data, lambda)?;
    let y = data.labels();
    let mode = match data.kind() {
        LabelKind::Binary => Mode::Classification,
        LabelKind::Regression => Mode::Regression,
    };

    let theta_box = cert.theta_box(spec)?;
    for i in 0..data.d() {
        let f = cert.coordinate_functional(i)?;
        let o = oracle_prediction_range(&f.z, y, spec, budget)?;
        let c = theta_box.coords[i];
        rep.check(close(c.lo, o.range.lo) && close(c.hi, o.range.hi), || {
            format!("{tag}: box coordinate {i} is {c:?}, oracle {:?}", o.range)
        });
    }
    let map = cert.coefficient_map();
    for v in feasible_vertices(y, spec, budget)? {
        let theta = map.apply(&v)?;
        let inside = theta
            .iter()
            .zip(&theta_box.coords)
            .all(|(t, c)| *t >= c.lo - AGREEMENT_TOL && *t <= c.hi + AGREEMENT_TOL);
        rep.check(inside, || format!("{tag}: feasible θ′ {theta:?} escapes the box"));
    }

    for (p, x) in points.iter().enumerate() {
        let z = cert.influence(x)?;
        let r = range_fn(&z, y, spec, data.kind())?;
        let o = oracle_prediction_range(&z.z, y, spec, budget)?;
        rep.check(
            close(r.range.lo, o.range.lo) && close(r.range.hi, o.range.hi),
            || format!("{tag} point {p}: range {:?}, oracle {:?}", r.range, o.range),
        );
        for (w, end, side) in [
            (&r.lower_witness, r.range.lo, "lower"),
            (&r.upper_witness, r.range.hi, "upper"),
        ] {
            let valid = validate_witness(spec, data, w)?;
            let value = z.apply(&w.resulting_labels);
            rep.check(valid && close(value, end), || {
                format!("{tag} point {p}: {side} witness (valid={valid}) gives {value}, range end {end}")
            });
        }
        let out = theta_box.output_range(x)?;
        rep.check(
            out.lo <= r.range.lo + AGREEMENT_TOL && out.hi >= r.range.hi - AGREEMENT_TOL,
            || format!("{tag} point {p}: box output {out:?} misses range {:?}", r.range),
        );
        let exact = decide(mode, &r, epsilon)?.is_robust();
        let approx = certify_approx(&theta_box, x, epsilon, mode)? == ApproxVerdict::Robust;
        rep.check(!approx || exact, || {
            format!("{tag} point {p}: approx says robust, exact does not")
        });
    }
    Ok(rep)
}

/// `count` seeded random instances.
pub fn verify_random(count: usize, seed: u64, range_fn: RangeFn) -> Result<VerifyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shape = InstanceShape::default();
    let budget = EnumerationBudget::default();
    let mut rep = VerifyReport::default();
    for i in 0..count {
        let inst = random_instance(&mut rng, &shape)?;
        let r = verify_instance(
            &format!("instance {i}"),
            &inst.data,
            inst.lambda,
            &inst.spec,
            &inst.points,
            0.1,
            &budget,
            range_fn,
        )?;
        rep.merge(r);
    }
    Ok(rep)
}

/// Verifies a prepared dataset. Small training sets are checked whole; larger
/// ones through `subsets` seeded subsamples of `budget.max_n.min(12)` rows, with
/// `k` capped at 3 so enumeration stays cheap.
#[allow(clippy::too_many_arguments)]
pub fn verify_prepared(
    prep: &Prepared,
    spec: &MultiplicitySpec,
    lambda: f64,
    epsilon: f64,
    max_points: usize,
    subsets: usize,
    budget: &EnumerationBudget,
    range_fn: RangeFn,
) -> Result<VerifyReport> {
    let xs = prep.test.features();
    let points: Vec<Vec<f64>> = xs.iter_rows().take(max_points).map(<[f64]>::to_vec).collect();
    let n = prep.train.n();
    if n <= budget.max_n && budget.check(spec).is_ok() {
        return verify_instance(
            &prep.name, &prep.train, lambda, spec, &points, epsilon, budget, range_fn,
        );
    }
    let mut rng = ChaCha8Rng::seed_from_u64(prep.seed);
    let m = budget.max_n.min(12).min(n);
    let mut rep = VerifyReport::default();
    for s in 0..subsets {
        let mut idx = sample(&mut rng, n, m).into_vec();
        idx.sort_unstable();
        let data = prep.train.select(&idx)?;
        let delta = idx.iter().map(|&i| spec.delta()[i]).collect();
        let eligible = idx.iter().map(|&i| spec.eligible()[i]).collect();
        let sub = MultiplicitySpec::new(spec.k().min(3).min(m), delta, eligible)?;
        rep.merge(verify_instance(
            &format!("{} subset {s}", prep.name),
            &data,
            lambda,
            &sub,
            &points,
            epsilon,
            budget,
            range_fn,
        )?);
    }
    Ok(rep)
}
