//! End-to-end acceptance checks. Each test prints one `PASS`/`FAIL` line.
//! Tests take a shared lock so the timing check runs on a quiet machine.

use std::io::Write;
use std::path::PathBuf;
use std::sync::Mutex;
use std::time::Instant;

use multirobust::experiment::{
    default_lambda_grid, prepare_mnist, robust_flags, select_lambda, sweep_k, Method, Prepared,
};
use multirobust::spec_config::SpecConfig;
use multirobust::synthetic::{
    linear_regression_data, random_instances, random_point, random_points, Instance,
    InstanceShape,
};
use multirobust_core::approx::certify_approx;
use multirobust_core::oracle::feasible_vertices;
use multirobust_core::{
    certify_classification, certify_regression, oracle_prediction_range, theta_membership,
    validate_witness, ApproxVerdict, CoefficientMap, EnumerationBudget, Interval,
    LabelKind, Matrix, Mode, MultiplicitySpec, PerturbationWitness, PredictionRange,
    RidgeCertifier,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

static SERIAL: Mutex<()> = Mutex::new(());

fn report(name: &str, pass: bool, detail: String) {
    // Written past the test harness's output capture so every line shows up
    // in a plain `cargo test` run.
    let line = format!("{} {name}: {detail}\n", if pass { "PASS" } else { "FAIL" });
    let _ = std::io::stdout().lock().write_all(line.as_bytes());
    assert!(pass, "{name}: {detail}");
}

fn instances(count: usize) -> Vec<Instance> {
    random_instances(count, 20240601, &InstanceShape::default()).unwrap()
}

fn mode_of(kind: LabelKind) -> Mode {
    match kind {
        LabelKind::Binary => Mode::Classification,
        LabelKind::Regression => Mode::Regression,
    }
}

fn exact_robust(r: &PredictionRange, mode: Mode, eps: f64) -> bool {
    match mode {
        Mode::Classification => certify_classification(r).unwrap().is_robust(),
        Mode::Regression => certify_regression(r, eps).unwrap().is_robust(),
    }
}

#[test]
fn oracle_equivalence() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let t = Instant::now();
    let budget = EnumerationBudget::default();
    let (mut points, mut max_err, mut bad) = (0usize, 0f64, Vec::new());
    for (n, inst) in instances(200).iter().enumerate() {
        let cert = RidgeCertifier::new(&inst.data, inst.lambda).unwrap();
        let y = inst.data.labels();
        for x in &inst.points {
            points += 1;
            let z = cert.influence(x).unwrap();
            let r = cert.prediction_range(&inst.spec, x).unwrap();
            let o = oracle_prediction_range(&z.z, y, &inst.spec, &budget).unwrap();
            let err = (r.range.lo - o.range.lo).abs().max((r.range.hi - o.range.hi).abs());
            max_err = max_err.max(err);
            let lo_ok = validate_witness(&inst.spec, &inst.data, &r.lower_witness).unwrap()
                && (z.apply(&r.lower_witness.resulting_labels) - r.range.lo).abs() <= 1e-9;
            let hi_ok = validate_witness(&inst.spec, &inst.data, &r.upper_witness).unwrap()
                && (z.apply(&r.upper_witness.resulting_labels) - r.range.hi).abs() <= 1e-9;
            if err > 1e-9 || !lo_ok || !hi_ok {
                bad.push(n);
            }
        }
    }
    let secs = t.elapsed().as_secs_f64();
    report(
        "oracle equivalence",
        bad.is_empty() && secs < 10.0,
        format!(
            "200 instances, {points} points, max |greedy - oracle| = {max_err:.2e}, \
             {} mismatches, {secs:.2}s (limit 10s)",
            bad.len()
        ),
    );
}

#[test]
fn tightest_box() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let t = Instant::now();
    let budget = EnumerationBudget::default();
    let (mut coords, mut degenerate, mut failures) = (0usize, 0usize, Vec::new());
    for (n, inst) in instances(100).iter().enumerate() {
        let cert = RidgeCertifier::new(&inst.data, inst.lambda).unwrap();
        let y = inst.data.labels();
        let theta_box = cert.theta_box(&inst.spec).unwrap();
        for (i, c) in theta_box.coords.iter().enumerate() {
            coords += 1;
            let f = cert.coordinate_functional(i).unwrap();
            let o = oracle_prediction_range(&f.z, y, &inst.spec, &budget).unwrap();
            let width = c.hi - c.lo;
            for (labels, end, is_lo) in [(&o.argmin, c.lo, true), (&o.argmax, c.hi, false)] {
                let w = PerturbationWitness::from_labels(y, labels, 0.0).unwrap();
                let feasible = validate_witness(&inst.spec, &inst.data, &w).unwrap();
                let value = f.apply(labels);
                let attained = (value - end).abs() <= 1e-9;
                // Shrinking the endpoint inwards must exclude the witness.
                let excluded = if width == 0.0 {
                    true
                } else if is_lo {
                    value < c.lo + 1e-6 * width
                } else {
                    value > c.hi - 1e-6 * width
                };
                if !(feasible && attained && excluded) {
                    failures.push((n, i));
                }
            }
            if width == 0.0 {
                degenerate += 1;
            }
        }
    }
    let secs = t.elapsed().as_secs_f64();
    report(
        "tightest box",
        failures.is_empty() && secs < 30.0,
        format!(
            "100 instances, {coords} coordinates ({degenerate} of zero width), \
             {} endpoint failures, {secs:.2}s (limit 30s)",
            failures.len()
        ),
    );
}

#[test]
fn approx_soundness() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut checked, mut approx_robust, mut exact_robust_n, mut violations) = (0, 0, 0, 0);
    for inst in instances(200) {
        let cert = RidgeCertifier::new(&inst.data, inst.lambda).unwrap();
        let theta_box = cert.theta_box(&inst.spec).unwrap();
        let mode = mode_of(inst.data.kind());
        for _ in 0..20 {
            let x = random_point(&mut rng, inst.data.d());
            let eps = rng.gen_range(0.0..1.0);
            let r = cert.prediction_range(&inst.spec, &x).unwrap();
            let out = theta_box.output_range(&x).unwrap();
            let contained = out.lo <= r.range.lo + 1e-9 && r.range.hi <= out.hi + 1e-9;
            let a = certify_approx(&theta_box, &x, eps, mode).unwrap() == ApproxVerdict::Robust;
            let e = exact_robust(&r, mode, eps);
            checked += 1;
            approx_robust += usize::from(a);
            exact_robust_n += usize::from(e);
            if !contained || (a && !e) {
                violations += 1;
            }
        }
    }
    report(
        "approx soundness",
        violations == 0,
        format!(
            "{checked} points, exact robust {exact_robust_n}, approx robust {approx_robust}, \
             {violations} containment or soundness violations"
        ),
    );
}

#[test]
fn non_convexity_example() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let c = CoefficientMap::from_matrix(
        Matrix::from_rows(&[[1.0, 2.0, 1.0], [-1.0, 0.0, 2.0], [2.0, 1.0, 0.0]]).unwrap(),
    );
    let y = [1.0, -1.0, 2.0];
    let spec = MultiplicitySpec::new(2, vec![Interval { lo: -1.0, hi: 1.0 }; 3], vec![true; 3])
        .unwrap();
    let member = |t: &[f64]| theta_membership(&c, t, &y, &spec).unwrap();

    // Members whose change support is exactly two labels.
    let supports = |v: &[f64]| -> Vec<usize> {
        (0..3).filter(|&i| (v[i] - y[i]).abs() > 1e-12).collect()
    };
    let verts: Vec<Vec<f64>> = feasible_vertices(&y, &spec, &EnumerationBudget::default())
        .unwrap()
        .into_iter()
        .filter(|v| supports(v).len() == 2)
        .collect();
    let mut found = None;
    'search: for a in &verts {
        for b in &verts {
            if supports(a) == supports(b) {
                continue;
            }
            let ta = c.apply(a).unwrap();
            let tb = c.apply(b).unwrap();
            let mid: Vec<f64> = ta.iter().zip(&tb).map(|(p, q)| 0.5 * (p + q)).collect();
            if member(&ta) && member(&tb) && !member(&mid) {
                found = Some((ta, tb, mid));
                break 'search;
            }
        }
    }
    let p1 = member(&[4.0, 5.0, 2.0]);
    let p2 = member(&[3.0, 6.0, 3.0]);
    let detail = match &found {
        Some((a, b, m)) => format!(
            "members {a:?} and {b:?}, midpoint {m:?} not a member; \
             (4,5,2) member: {p1}; (3,6,3) member: {p2}"
        ),
        None => format!("no non-convex pair found; (4,5,2) member: {p1}; (3,6,3) member: {p2}"),
    };
    report("non-convexity example", found.is_some(), detail);
}

#[test]
fn ratio_invariance() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let shape = InstanceShape::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut regression, mut comparisons, mut verdict_diffs, mut max_rel) = (0, 0, 0, 0f64);
    while regression < 50 {
        let inst = multirobust::synthetic::random_instance(&mut rng, &shape).unwrap();
        if inst.data.kind() != LabelKind::Regression {
            continue;
        }
        regression += 1;
        let cert = RidgeCertifier::new(&inst.data, inst.lambda).unwrap();
        for x in &inst.points {
            let r1 = cert.prediction_range(&inst.spec, x).unwrap();
            let w1 = r1.range.hi - r1.range.lo;
            let eps = rng.gen_range(0.0..1.0) * w1;
            let v1 = certify_regression(&r1, eps).unwrap().is_robust();
            for s in [0.5, 3.0, 10.0] {
                let r2 = cert.prediction_range(&inst.spec.scaled(s), x).unwrap();
                let w2 = r2.range.hi - r2.range.lo;
                if w1 > 0.0 {
                    max_rel = max_rel.max((w2 - s * w1).abs() / (s * w1));
                } else {
                    max_rel = max_rel.max(w2.abs());
                }
                let v2 = certify_regression(&r2, s * eps).unwrap().is_robust();
                comparisons += 1;
                verdict_diffs += usize::from(v1 != v2);
            }
        }
    }
    report(
        "ratio invariance",
        verdict_diffs == 0 && max_rel <= 1e-9,
        format!(
            "50 regression instances, {comparisons} scaled comparisons, \
             {verdict_diffs} verdict changes, max relative width error {max_rel:.2e}"
        ),
    );
}

#[test]
fn monotonicity() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let mut nested_failures = 0;
    let mut pairs = 0;
    for inst in instances(200) {
        let cert = RidgeCertifier::new(&inst.data, inst.lambda).unwrap();
        for x in &inst.points {
            let mut prev: Option<Interval> = None;
            for k in 0..=inst.data.n() {
                let r = cert.prediction_range(&inst.spec.with_k(k).unwrap(), x).unwrap().range;
                if let Some(p) = prev {
                    pairs += 1;
                    if !p.is_within(&r, 0.0) {
                        nested_failures += 1;
                    }
                }
                prev = Some(r);
            }
        }
    }

    let data = linear_regression_data(1000, 5, 0.5, 9).unwrap();
    let (train, test) = (
        data.select(&(0..800).collect::<Vec<_>>()).unwrap(),
        data.select(&(800..1000).collect::<Vec<_>>()).unwrap(),
    );
    let prep = Prepared::from_parts(
        "linear",
        (0..5).map(|j| format!("x{j}")).collect(),
        train,
        test.clone(),
        test,
        None,
        false,
        true,
        0,
    )
    .unwrap();
    let n = prep.train.n();
    let specs: Vec<(String, MultiplicitySpec)> = [0, 1, 2, 4, 8, 16, 32, 64]
        .iter()
        .map(|&k| {
            let s = MultiplicitySpec::new(k, vec![Interval { lo: -1.0, hi: 1.0 }; n], vec![true; n])
                .unwrap();
            (k.to_string(), s)
        })
        .collect();
    let mut curves_ok = true;
    let mut rates = Vec::new();
    for method in [Method::Exact, Method::Approx] {
        let rows = sweep_k(&prep, specs.clone(), method, 1.0, 0.05).unwrap();
        curves_ok &= rows.windows(2).all(|w| w[1].rate <= w[0].rate);
        rates.push(rows.iter().map(|r| format!("{:.3}", r.rate)).collect::<Vec<_>>().join(" "));
    }
    report(
        "monotonicity",
        nested_failures == 0 && curves_ok,
        format!(
            "{pairs} consecutive-k range pairs, {nested_failures} not nested; \
             exact curve [{}], approx curve [{}]",
            rates[0], rates[1]
        ),
    );
}

fn mnist_dir() -> PathBuf {
    std::env::var_os("MNIST_DIR").map_or_else(|| PathBuf::from("/root/data/mnist"), PathBuf::from)
}

#[test]
fn mnist_reproduction() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    const EXPECTED: [f64; 5] = [98.3, 96.3, 93.1, 88.3, 84.4];
    const BUDGETS: [&str; 5] = ["0.1%", "0.25%", "0.5%", "0.75%", "1.0%"];
    let t = Instant::now();
    let dir = mnist_dir();
    let prep = match prepare_mnist(&dir, 0) {
        Ok(p) => p,
        Err(e) => {
            report(
                "MNIST 1/7 reproduction",
                false,
                format!("cannot load MNIST from {} ({e}); set MNIST_DIR", dir.display()),
            );
            return;
        }
    };
    let sel = select_lambda(&prep, &default_lambda_grid()).unwrap();
    let cfg = SpecConfig::label_flip();
    let specs = BUDGETS
        .iter()
        .map(|b| {
            let budget = multirobust::spec_config::parse_budget(b).unwrap();
            (b.to_string(), prep.materialize(&cfg, budget).unwrap())
        })
        .collect();
    let rows = sweep_k(&prep, specs, Method::Exact, sel.lambda, 0.0).unwrap();
    let secs = t.elapsed().as_secs_f64();
    let mut ok = secs <= 600.0;
    let mut cells = Vec::new();
    for (r, e) in rows.iter().zip(EXPECTED) {
        let got = 100.0 * r.rate;
        let within = (got - e).abs() <= 5.0;
        ok &= within;
        cells.push(format!(
            "{} (k={}): {got:.1} vs {e}{}",
            r.budget,
            r.k,
            if within { "" } else { " OUT" }
        ));
    }
    report(
        "MNIST 1/7 reproduction",
        ok,
        format!(
            "n_train={} n_test={}, λ={} (validation accuracy {:.2}%); {}; {secs:.0}s (limit 600s)",
            prep.train.n(),
            prep.test.n(),
            sel.lambda,
            sel.validation_score,
            cells.join(", ")
        ),
    );
}

#[test]
fn timing_shape() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let (n, d) = (4000, 30);
    let data = linear_regression_data(n, d, 0.5, 17).unwrap();
    let cert = RidgeCertifier::new(&data, 1.0).unwrap();
    let spec = MultiplicitySpec::new(n / 100, vec![Interval { lo: -1.0, hi: 1.0 }; n], vec![true; n])
        .unwrap();
    let specs = [spec];
    let run = |points: &Matrix, method| {
        let t = Instant::now();
        robust_flags(&cert, points, &specs, Mode::Regression, method, 0.1).unwrap();
        t.elapsed().as_secs_f64()
    };
    let small = random_points(1_000, d, 1);
    let large = random_points(10_000, d, 2);
    let exact_small = run(&small, Method::Exact);
    let exact_large = run(&large, Method::Exact);
    let approx_large = run(&large, Method::Approx);
    let per_small = exact_small / 1_000.0;
    let per_large = exact_large / 10_000.0;
    let ratio = per_large.max(per_small) / per_large.min(per_small);
    let share = approx_large / exact_large;
    report(
        "timing shape",
        ratio <= 3.0 && share < 0.25,
        format!(
            "n_train={n}, d={d}: exact per point {:.1}µs at 1k vs {:.1}µs at 10k (ratio {ratio:.2}, \
             limit 3); approx total {approx_large:.3}s = {:.1}% of exact {exact_large:.3}s (limit 25%)",
            per_small * 1e6,
            per_large * 1e6,
            100.0 * share
        ),
    );
}

#[test]
fn degenerate_cases() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (n, inst) in instances(100).iter().enumerate() {
        let cert = RidgeCertifier::new(&inst.data, inst.lambda).unwrap();
        let mode = mode_of(inst.data.kind());
        let size = inst.data.n();
        let zero_budget = inst.spec.with_k(0).unwrap();
        let ineligible = MultiplicitySpec::new(
            inst.spec.k(),
            vec![Interval::ZERO; size],
            vec![false; size],
        )
        .unwrap();
        for spec in [&zero_budget, &ineligible] {
            let b = cert.theta_box(spec).unwrap();
            for x in &inst.points {
                let r = cert.prediction_range(spec, x).unwrap();
                let approx = certify_approx(&b, x, 0.0, mode).unwrap() == ApproxVerdict::Robust;
                if !exact_robust(&r, mode, 0.0) || !approx {
                    failures.push(format!("instance {n}: not robust under empty perturbation"));
                }
            }
        }
        let delta = (0..size)
            .map(|_| {
                let a = rng.gen_range(0.1..2.0);
                Interval { lo: -a, hi: a }
            })
            .collect();
        let full = MultiplicitySpec::new(size, delta, vec![true; size]).unwrap();
        for x in &inst.points {
            let r = cert.prediction_range(&full, x).unwrap();
            let asym = ((r.range.hi - r.base) - (r.base - r.range.lo)).abs();
            if asym > 1e-9 {
                failures.push(format!("instance {n}: k=n range off-centre by {asym:.2e}"));
            }
        }
    }
    let sample = failures.first().cloned().unwrap_or_default();
    report(
        "degenerate cases",
        failures.is_empty(),
        format!(
            "100 instances: zero budget, all-ineligible and k=n symmetric checks, {} failures {sample}",
            failures.len()
        ),
    );
}
