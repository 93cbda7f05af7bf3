//! Experiment drivers behind the CLI: certify a test set, sweep the label
//! budget, sweep the regularization strength.

use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use log::info;
use multirobust_core::approx::{certify_approx, coordinate_bounds, ApproxVerdict, ThetaBox};
use multirobust_core::{
    certify_classification, certify_regression, predicted_class, Budget, Dataset,
    InfluenceVector, LabelKind, Matrix, Mode, MultiplicitySpec, PredictionRange,
    RidgeCertifier, Verdict,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::data::{
    load_csv, load_mnist_idx, split, standardize, with_intercept, SplitKind, SplitPlan,
    TabularSchema,
};
use crate::error::{HarnessError, Result};
use crate::report::{Aggregates, ConfigEcho, PointRecord, PointVerdict, RunReport, Timing};
use crate::spec_config::{Group, SpecConfig};

/// Where a dataset comes from: a CSV file with its schema, or an MNIST
/// directory holding the four standard IDX files.
#[derive(Clone, Debug)]
pub enum DataSource {
    Csv { path: PathBuf, schema: TabularSchema },
    Mnist { dir: PathBuf },
}

impl DataSource {
    /// `mnist:<dir>` selects MNIST 1/7; anything else is a CSV path.
    pub fn parse(data: &str, schema: Option<&Path>) -> Result<Self> {
        if let Some(dir) = data.strip_prefix("mnist:") {
            return Ok(DataSource::Mnist { dir: dir.into() });
        }
        let schema = schema.ok_or_else(|| {
            HarnessError::Config(format!("CSV data {data:?} needs a --schema file"))
        })?;
        Ok(DataSource::Csv {
            path: data.into(),
            schema: TabularSchema::from_toml_file(schema)?,
        })
    }
}

/// Model-ready splits of one dataset.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub name: String,
    /// Raw column names; rules and groups refer to these.
    pub feature_names: Vec<String>,
    pub train: Dataset,
    pub test: Dataset,
    /// Raw train/test features when the model features are not a plain
    /// extension of them (standardization reorders or drops columns).
    raw: Option<(Dataset, Dataset)>,
    /// Fit set for λ selection; `None` means the whole training set.
    pub select_fit: Option<Dataset>,
    pub validation: Dataset,
    pub seed: u64,
}

impl Prepared {
    /// Builds model features from raw splits. An intercept is appended as the
    /// last column, so raw column indices stay valid unless `standardize`
    /// drops constant columns.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        name: &str,
        feature_names: Vec<String>,
        train: Dataset,
        test: Dataset,
        validation: Dataset,
        select_fit: Option<Dataset>,
        standardize_features: bool,
        intercept: bool,
        seed: u64,
    ) -> Result<Self> {
        if train.n() == 0 || test.n() == 0 {
            return Err(HarnessError::EmptyDataset(format!(
                "{name}: train has {} rows, test has {}",
                train.n(),
                test.n()
            )));
        }
        let (mut tr, mut others, raw) = if standardize_features {
            let mut rest = vec![test.clone(), validation];
            rest.extend(select_fit.clone());
            let (t, o, _) = standardize(&train, &rest)?;
            (t, o, Some((train, test)))
        } else {
            let mut rest = vec![test, validation];
            rest.extend(select_fit);
            (train, rest, None)
        };
        if intercept {
            tr = with_intercept(&tr)?;
            others = others.iter().map(with_intercept).collect::<Result<_>>()?;
        }
        let mut others = others.into_iter();
        let test = others.next().expect("test split");
        let validation = others.next().expect("validation split");
        let select_fit = others.next();
        Ok(Prepared {
            name: name.to_string(),
            feature_names,
            train: tr,
            test,
            raw,
            select_fit,
            validation,
            seed,
        })
    }

    pub fn load(source: &DataSource, seed: u64) -> Result<Self> {
        match source {
            DataSource::Csv { path, schema } => {
                let table = load_csv(path, schema)?;
                let parts = split(table.dataset.n(), &SplitPlan::standard(seed))?;
                let pick = |i: usize| table.dataset.select(&parts[i]);
                Prepared::from_parts(
                    &path.display().to_string(),
                    table.feature_names.clone(),
                    pick(0)?,
                    pick(1)?,
                    pick(2)?,
                    None,
                    schema.standardize,
                    schema.intercept,
                    seed,
                )
            }
            DataSource::Mnist { dir } => prepare_mnist(dir, seed),
        }
    }

    pub fn mode(&self) -> Mode {
        match self.train.kind() {
            LabelKind::Binary => Mode::Classification,
            LabelKind::Regression => Mode::Regression,
        }
    }

    pub fn train_raw(&self) -> &Dataset {
        self.raw.as_ref().map_or(&self.train, |r| &r.0)
    }

    pub fn test_raw(&self) -> &Dataset {
        self.raw.as_ref().map_or(&self.test, |r| &r.1)
    }

    pub fn materialize(&self, cfg: &SpecConfig, budget: Budget) -> Result<MultiplicitySpec> {
        cfg.materialize(self.train_raw(), &self.feature_names, budget)
    }

    /// Names of the groups each test point belongs to.
    pub fn test_groups(&self, groups: &[Group]) -> Vec<Vec<String>> {
        self.test_raw()
            .features()
            .iter_rows()
            .map(|r| {
                groups
                    .iter()
                    .filter(|g| g.matches(r))
                    .map(|g| g.name.clone())
                    .collect()
            })
            .collect()
    }
}

/// MNIST restricted to digits 1 (+1) and 7 (−1): the standard train and
/// test files, pixels scaled to [0, 1] plus an intercept. A seeded 10% of the
/// training set is held out for λ selection only; the final model is fit on
/// the whole training set.
pub fn prepare_mnist(dir: &Path, seed: u64) -> Result<Prepared> {
    let train = load_mnist_idx(
        &dir.join("train-images-idx3-ubyte"),
        &dir.join("train-labels-idx1-ubyte"),
        &[1, 7],
    )?;
    let test = load_mnist_idx(
        &dir.join("t10k-images-idx3-ubyte"),
        &dir.join("t10k-labels-idx1-ubyte"),
        &[1, 7],
    )?;
    info!("MNIST 1/7: {} train, {} test", train.n(), test.n());
    let plan = SplitPlan {
        seed,
        kind: SplitKind::Fractions {
            train: 0.9,
            test: 0.0,
            validation: 0.1,
        },
    };
    let parts = split(train.n(), &plan)?;
    let fit = train.select(&parts[0])?;
    let val = train.select(&parts[2])?;
    let names = (0..train.d()).map(|j| format!("px{j}")).collect();
    Prepared::from_parts("mnist-1-7", names, train, test, val, Some(fit), false, true, seed)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    Approx,
}

impl FromStr for Method {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Method::Exact),
            "approx" => Ok(Method::Approx),
            _ => Err(HarnessError::Config(format!("unknown mode {s:?} (exact|approx)"))),
        }
    }
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Approx => "approx",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertifyOptions {
    pub lambda: f64,
    pub method: Method,
    /// Regression tolerance; ignored for classification.
    pub epsilon: f64,
}

pub fn decide(mode: Mode, range: &PredictionRange, epsilon: f64) -> Result<Verdict> {
    Ok(match mode {
        Mode::Classification => certify_classification(range)?,
        Mode::Regression => certify_regression(range, epsilon)?,
    })
}

/// Θ-box with coordinates computed in parallel.
pub fn parallel_theta_box(cert: &RidgeCertifier, spec: &MultiplicitySpec) -> Result<ThetaBox> {
    Ok(parallel_theta_boxes(cert, std::slice::from_ref(spec))?.remove(0))
}

/// One box per spec, sharing each coordinate functional across specs.
pub fn parallel_theta_boxes(
    cert: &RidgeCertifier,
    specs: &[MultiplicitySpec],
) -> Result<Vec<ThetaBox>> {
    let y = cert.data().labels();
    let per_coord = (0..cert.data().d())
        .into_par_iter()
        .map(|i| {
            let f = cert.coordinate_functional(i)?;
            specs
                .iter()
                .map(|s| coordinate_bounds(&f, y, s))
                .collect::<multirobust_core::Result<Vec<_>>>()
        })
        .collect::<multirobust_core::Result<Vec<_>>>()?;
    Ok((0..specs.len())
        .map(|s| ThetaBox::from_coordinates(per_coord.iter().map(|c| c[s].clone()).collect()))
        .collect())
}

fn influence_ranges(
    cert: &RidgeCertifier,
    z: &InfluenceVector,
    specs: &[MultiplicitySpec],
) -> Result<Vec<PredictionRange>> {
    let data = cert.data();
    specs
        .iter()
        .map(|s| Ok(PredictionRange::from_influence(z, data.labels(), s, data.kind())?))
        .collect()
}

/// Certifies every test point.
pub fn certify(
    prep: &Prepared,
    spec: &MultiplicitySpec,
    groups: &[Group],
    opts: &CertifyOptions,
) -> Result<RunReport> {
    let mode = prep.mode();
    let start = Instant::now();
    let cert = RidgeCertifier::new(&prep.train, opts.lambda)?;
    let fit_seconds = start.elapsed().as_secs_f64();

    let membership = prep.test_groups(groups);
    let xs = prep.test.features();
    let mut box_seconds = None;
    let t = Instant::now();
    let mut points: Vec<PointRecord> = match opts.method {
        Method::Exact => (0..xs.rows())
            .into_par_iter()
            .map(|i| {
                let z = cert.influence(xs.row(i))?;
                let range = influence_ranges(&cert, &z, std::slice::from_ref(spec))?.remove(0);
                let v = decide(mode, &range, opts.epsilon)?;
                Ok(PointRecord {
                    index: i,
                    base: range.base,
                    lo: range.range.lo,
                    hi: range.range.hi,
                    verdict: if v.is_robust() {
                        PointVerdict::Robust
                    } else {
                        PointVerdict::NotRobust
                    },
                    witness: v.counterexample.map(|w| w.changed),
                    groups: Vec::new(),
                })
            })
            .collect::<Result<Vec<_>>>()?,
        Method::Approx => {
            let theta_box = parallel_theta_box(&cert, spec)?;
            box_seconds = Some(t.elapsed().as_secs_f64());
            (0..xs.rows())
                .into_par_iter()
                .map(|i| {
                    let x = xs.row(i);
                    let out = theta_box.output_range(x)?;
                    let v = certify_approx(&theta_box, x, opts.epsilon, mode)?;
                    Ok(PointRecord {
                        index: i,
                        base: theta_box.base_prediction(x)?,
                        lo: out.lo,
                        hi: out.hi,
                        verdict: match v {
                            ApproxVerdict::Robust => PointVerdict::Robust,
                            ApproxVerdict::Unknown => PointVerdict::Unknown,
                        },
                        witness: None,
                        groups: Vec::new(),
                    })
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    let certify_seconds = t.elapsed().as_secs_f64();
    for (p, g) in points.iter_mut().zip(membership) {
        p.groups = g;
    }
    let group_names: Vec<String> = groups.iter().map(|g| g.name.clone()).collect();
    let aggregates = Aggregates::from_points(&points, &group_names);
    Ok(RunReport {
        config: ConfigEcho {
            dataset: prep.name.clone(),
            task: match mode {
                Mode::Classification => "classification".into(),
                Mode::Regression => "regression".into(),
            },
            method: opts.method.as_str().into(),
            lambda: opts.lambda,
            epsilon: opts.epsilon,
            k: spec.k(),
            eligible: spec.eligible_count(),
            n_train: prep.train.n(),
            n_test: prep.test.n(),
            seed: prep.seed,
        },
        timing: Timing {
            fit_seconds,
            box_seconds,
            certify_seconds,
            per_point_mean_seconds: certify_seconds / points.len().max(1) as f64,
        },
        points,
        aggregates,
    })
}

/// Robustness verdicts of every row of `xs` under each spec:
/// `result[s][i]` is point `i` under spec `s`.
pub fn robust_flags(
    cert: &RidgeCertifier,
    xs: &Matrix,
    specs: &[MultiplicitySpec],
    mode: Mode,
    method: Method,
    epsilon: f64,
) -> Result<Vec<Vec<bool>>> {
    let per_point: Vec<Vec<bool>> = match method {
        Method::Exact => (0..xs.rows())
            .into_par_iter()
            .map(|i| {
                let z = cert.influence(xs.row(i))?;
                influence_ranges(cert, &z, specs)?
                    .iter()
                    .map(|r| Ok(decide(mode, r, epsilon)?.is_robust()))
                    .collect()
            })
            .collect::<Result<_>>()?,
        Method::Approx => {
            let boxes = parallel_theta_boxes(cert, specs)?;
            (0..xs.rows())
                .into_par_iter()
                .map(|i| {
                    boxes
                        .iter()
                        .map(|b| {
                            Ok(certify_approx(b, xs.row(i), epsilon, mode)?
                                == ApproxVerdict::Robust)
                        })
                        .collect()
                })
                .collect::<Result<_>>()?
        }
    };
    Ok((0..specs.len())
        .map(|s| per_point.iter().map(|p| p[s]).collect())
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub budget: String,
    pub k: usize,
    pub robust: usize,
    pub total: usize,
    pub rate: f64,
}

/// Robustness rate per budget, sorted by resolved `k`.
pub fn sweep_k(
    prep: &Prepared,
    mut specs: Vec<(String, MultiplicitySpec)>,
    method: Method,
    lambda: f64,
    epsilon: f64,
) -> Result<Vec<SweepRow>> {
    if specs.is_empty() {
        return Err(HarnessError::Config("empty budget grid".into()));
    }
    specs.sort_by_key(|(_, s)| s.k());
    let cert = RidgeCertifier::new(&prep.train, lambda)?;
    let only: Vec<MultiplicitySpec> = specs.iter().map(|(_, s)| s.clone()).collect();
    let flags = robust_flags(&cert, prep.test.features(), &only, prep.mode(), method, epsilon)?;
    Ok(specs
        .iter()
        .zip(flags)
        .map(|((label, s), f)| {
            let robust = f.iter().filter(|&&b| b).count();
            SweepRow {
                budget: label.clone(),
                k: s.k(),
                robust,
                total: f.len(),
                rate: robust as f64 / f.len() as f64,
            }
        })
        .collect())
}

/// Accuracy in percent for classification, R² in percent for regression.
pub fn score(cert: &RidgeCertifier, data: &Dataset) -> Result<f64> {
    let preds = data.features().matvec(cert.theta())?;
    let y = data.labels();
    Ok(match data.kind() {
        LabelKind::Binary => {
            let hits = preds
                .iter()
                .zip(y)
                .filter(|(p, t)| predicted_class(**p) == **t)
                .count();
            100.0 * hits as f64 / y.len() as f64
        }
        LabelKind::Regression => {
            let mean = y.iter().sum::<f64>() / y.len() as f64;
            let ss_tot: f64 = y.iter().map(|t| (t - mean).powi(2)).sum();
            let ss_res: f64 = preds.iter().zip(y).map(|(p, t)| (t - p).powi(2)).sum();
            if ss_tot == 0.0 {
                0.0
            } else {
                100.0 * (1.0 - ss_res / ss_tot)
            }
        }
    })
}

/// Half-decade grid from 0.1 to 10⁴.
pub fn default_lambda_grid() -> Vec<f64> {
    (-2..=8).map(|e| 10f64.powf(f64::from(e) / 2.0)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LambdaSelection {
    pub lambda: f64,
    pub validation_score: f64,
    /// `(λ, validation score)` over the whole grid.
    pub scores: Vec<(f64, f64)>,
}

/// Validation score of every λ, each fit on the selection fit set.
pub fn validation_scores(prep: &Prepared, grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    let fit = prep.select_fit.as_ref().unwrap_or(&prep.train);
    let gram = fit.features().gram();
    grid.iter()
        .map(|&l| {
            let cert = RidgeCertifier::with_gram(fit, l, &gram)?;
            Ok((l, score(&cert, &prep.validation)?))
        })
        .collect()
}

/// The λ with the best validation score; ties go to the larger λ.
pub fn select_lambda(prep: &Prepared, grid: &[f64]) -> Result<LambdaSelection> {
    if grid.is_empty() {
        return Err(HarnessError::Config("empty λ grid".into()));
    }
    let scores = validation_scores(prep, grid)?;
    let (lambda, validation_score) = scores
        .iter()
        .copied()
        .max_by(|a, b| a.1.total_cmp(&b.1).then(a.0.total_cmp(&b.0)))
        .expect("nonempty");
    info!("selected λ = {lambda} (validation score {validation_score:.3})");
    Ok(LambdaSelection {
        lambda,
        validation_score,
        scores,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LambdaRow {
    pub lambda: f64,
    pub validation_score: f64,
    pub test_score: f64,
    pub robust_rate: f64,
}

/// Validation score, test score and robustness rate per λ.
pub fn sweep_lambda(
    prep: &Prepared,
    spec: &MultiplicitySpec,
    grid: &[f64],
    method: Method,
    epsilon: f64,
) -> Result<Vec<LambdaRow>> {
    if grid.is_empty() {
        return Err(HarnessError::Config("empty λ grid".into()));
    }
    let mut grid = grid.to_vec();
    grid.sort_by(f64::total_cmp);
    let val = validation_scores(prep, &grid)?;
    let gram = prep.train.features().gram();
    grid.iter()
        .zip(val)
        .map(|(&l, (_, validation_score))| {
            let cert = RidgeCertifier::with_gram(&prep.train, l, &gram)?;
            let flags = robust_flags(
                &cert,
                prep.test.features(),
                std::slice::from_ref(spec),
                prep.mode(),
                method,
                epsilon,
            )?;
            let robust = flags[0].iter().filter(|&&b| b).count();
            Ok(LambdaRow {
                lambda: l,
                validation_score,
                test_score: score(&cert, &prep.test)?,
                robust_rate: robust as f64 / flags[0].len() as f64,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LambdaChoice {
    /// Accuracy slack in percentage points below the best validation score.
    pub tolerance: f64,
    pub lambda: f64,
    pub validation_score: f64,
    pub robust_rate: f64,
}

/// For each tolerance, the most robust λ whose validation score is within
/// the tolerance of the best; ties go to the larger λ.
pub fn choose_lambdas(rows: &[LambdaRow], tolerances: &[f64]) -> Vec<LambdaChoice> {
    let best = rows
        .iter()
        .map(|r| r.validation_score)
        .fold(f64::NEG_INFINITY, f64::max);
    tolerances
        .iter()
        .filter_map(|&tol| {
            rows.iter()
                .filter(|r| r.validation_score >= best - tol)
                .max_by(|a, b| {
                    a.robust_rate
                        .total_cmp(&b.robust_rate)
                        .then(a.lambda.total_cmp(&b.lambda))
                })
                .map(|r| LambdaChoice {
                    tolerance: tol,
                    lambda: r.lambda,
                    validation_score: r.validation_score,
                    robust_rate: r.robust_rate,
                })
        })
        .collect()
}
