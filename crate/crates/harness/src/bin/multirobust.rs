use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;
use multirobust::experiment::{
    certify, choose_lambdas, default_lambda_grid, select_lambda, sweep_k, sweep_lambda,
    CertifyOptions, DataSource, Method, Prepared,
};
use multirobust::report::write_rows;
use multirobust::spec_config::{parse_budget, parse_budget_list, SpecConfig};
use multirobust::verify::{greedy_range, verify_prepared, verify_random};
use multirobust::{HarnessError, Result};
use multirobust_core::{Budget, EnumerationBudget, LabelKind};

/// Certify ridge-regression predictions against inaccurate training labels.
///
/// Every flag can also be set through an environment variable named
/// MULTIROBUST_<FLAG>, e.g. MULTIROBUST_DATA or MULTIROBUST_THREADS.
#[derive(Parser, Debug)]
#[command(name = "multirobust", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Certify every test point and write a JSON report plus CSV summary.
    Certify(CommonArgs),
    /// Robustness rate for each label budget in --budget-k.
    SweepK(CommonArgs),
    /// Accuracy and robustness rate across a λ grid.
    SweepLambda {
        #[command(flatten)]
        common: CommonArgs,
        /// Accuracy slack levels (percentage points) for λ choices.
        #[arg(long, env = "MULTIROBUST_TOLERANCE", default_value = "0,0.2,0.5,1,2")]
        tolerance: String,
    },
    /// Check the certifier against brute-force enumeration.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Number of seeded random instances to check as well.
        #[arg(long, env = "MULTIROBUST_RANDOM", default_value_t = 50)]
        random: usize,
        /// Test points checked per dataset subsample.
        #[arg(long, env = "MULTIROBUST_MAX_POINTS", default_value_t = 20)]
        max_points: usize,
        /// Subsamples drawn when the training set is too large to enumerate.
        #[arg(long, env = "MULTIROBUST_SUBSETS", default_value_t = 5)]
        subsets: usize,
    },
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// CSV file, or `mnist:<dir>` for MNIST 1/7 from IDX files.
    #[arg(long, env = "MULTIROBUST_DATA")]
    data: Option<String>,
    /// Schema TOML for CSV data.
    #[arg(long, env = "MULTIROBUST_SCHEMA")]
    schema: Option<PathBuf>,
    /// Perturbation-model TOML; label flips by default for binary targets.
    #[arg(long, env = "MULTIROBUST_SPEC")]
    spec: Option<PathBuf>,
    /// A value, a comma-separated grid (sweep-lambda), or `auto` to select
    /// by validation score.
    #[arg(long, env = "MULTIROBUST_LAMBDA", default_value = "auto")]
    lambda: String,
    /// Regression tolerance around the base prediction.
    #[arg(long, env = "MULTIROBUST_EPSILON", default_value_t = 0.0)]
    epsilon: f64,
    /// `exact` or `approx`.
    #[arg(long, env = "MULTIROBUST_MODE", default_value = "exact")]
    mode: Method,
    /// Label budget: a count ("13"), a percentage ("1.0%") or a fraction.
    /// sweep-k takes a comma-separated list.
    #[arg(long, env = "MULTIROBUST_BUDGET_K")]
    budget_k: Option<String>,
    #[arg(long, env = "MULTIROBUST_SEED", default_value_t = 0)]
    seed: u64,
    /// Worker threads; 0 uses every core.
    #[arg(long, env = "MULTIROBUST_THREADS", default_value_t = 0)]
    threads: usize,
    /// Output path: the JSON report for certify, a CSV otherwise.
    #[arg(long, env = "MULTIROBUST_OUT")]
    out: Option<PathBuf>,
}

impl CommonArgs {
    fn prepare(&self) -> Result<Prepared> {
        let data = self
            .data
            .as_deref()
            .ok_or_else(|| HarnessError::Config("--data is required".into()))?;
        Prepared::load(&DataSource::parse(data, self.schema.as_deref())?, self.seed)
    }

    fn spec_config(&self, prep: &Prepared) -> Result<SpecConfig> {
        match (&self.spec, prep.train.kind()) {
            (Some(p), _) => SpecConfig::from_toml_file(p),
            (None, LabelKind::Binary) => Ok(SpecConfig::label_flip()),
            (None, LabelKind::Regression) => Err(HarnessError::Config(
                "regression data needs a --spec file".into(),
            )),
        }
    }

    fn lambda_grid(&self) -> Result<Option<Vec<f64>>> {
        if self.lambda.trim() == "auto" {
            return Ok(None);
        }
        let grid = self
            .lambda
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| HarnessError::Config(format!("bad λ value {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Some(grid))
    }

    fn single_lambda(&self, prep: &Prepared) -> Result<f64> {
        match self.lambda_grid()? {
            None => Ok(select_lambda(prep, &default_lambda_grid())?.lambda),
            Some(g) if g.len() == 1 => Ok(g[0]),
            Some(g) => Ok(select_lambda(prep, &g)?.lambda),
        }
    }

    fn budget(&self) -> Result<Option<Budget>> {
        self.budget_k.as_deref().map(parse_budget).transpose()
    }
}

fn setup(common: &CommonArgs) -> Result<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(common.threads)
        .build_global()
        .map_err(|e| HarnessError::Config(e.to_string()))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Certify(c) => {
            setup(&c)?;
            let prep = c.prepare()?;
            let cfg = c.spec_config(&prep)?;
            let spec = prep.materialize(&cfg, cfg.budget(c.budget()?)?)?;
            let groups = cfg.groups(&prep.feature_names)?;
            let lambda = c.single_lambda(&prep)?;
            let opts = CertifyOptions {
                lambda,
                method: c.mode,
                epsilon: c.epsilon,
            };
            let report = certify(&prep, &spec, &groups, &opts)?;
            let a = &report.aggregates;
            println!(
                "{} {} λ={lambda} k={}: {}/{} robust ({:.2}%)",
                prep.name,
                c.mode.as_str(),
                spec.k(),
                a.robust,
                a.total,
                100.0 * a.rate
            );
            for g in &a.groups {
                println!("  {}: {}/{} ({:.2}%)", g.name, g.robust, g.total, 100.0 * g.rate);
            }
            if let Some(out) = &c.out {
                for p in report.write(out)? {
                    info!("wrote {}", p.display());
                }
            }
        }
        Command::SweepK(c) => {
            setup(&c)?;
            let prep = c.prepare()?;
            let cfg = c.spec_config(&prep)?;
            let text = c
                .budget_k
                .clone()
                .or_else(|| cfg.budget.clone())
                .ok_or_else(|| HarnessError::Config("sweep-k needs --budget-k".into()))?;
            let specs = parse_budget_list(&text)?
                .into_iter()
                .zip(text.split(','))
                .map(|(b, label)| Ok((label.trim().to_string(), prep.materialize(&cfg, b)?)))
                .collect::<Result<Vec<_>>>()?;
            let lambda = c.single_lambda(&prep)?;
            let rows = sweep_k(&prep, specs, c.mode, lambda, c.epsilon)?;
            println!("budget,k,robust,total,rate");
            for r in &rows {
                println!("{},{},{},{},{:.6}", r.budget, r.k, r.robust, r.total, r.rate);
            }
            if let Some(out) = &c.out {
                write_rows(out, &rows)?;
            }
        }
        Command::SweepLambda { common: c, tolerance } => {
            setup(&c)?;
            let prep = c.prepare()?;
            let cfg = c.spec_config(&prep)?;
            let spec = prep.materialize(&cfg, cfg.budget(c.budget()?)?)?;
            let grid = c.lambda_grid()?.unwrap_or_else(default_lambda_grid);
            let tolerances = tolerance
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| HarnessError::Config(format!("bad tolerance {s:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            let rows = sweep_lambda(&prep, &spec, &grid, c.mode, c.epsilon)?;
            let choices = choose_lambdas(&rows, &tolerances);
            println!("lambda,validation_score,test_score,robust_rate");
            for r in &rows {
                println!(
                    "{},{:.4},{:.4},{:.6}",
                    r.lambda, r.validation_score, r.test_score, r.robust_rate
                );
            }
            for ch in &choices {
                println!(
                    "tolerance {}: λ={} (validation {:.4}, robust {:.4})",
                    ch.tolerance, ch.lambda, ch.validation_score, ch.robust_rate
                );
            }
            if let Some(out) = &c.out {
                write_rows(out, &rows)?;
                write_rows(&out.with_extension("choices.csv"), &choices)?;
            }
        }
        Command::Verify {
            common: c,
            random,
            max_points,
            subsets,
        } => {
            setup(&c)?;
            let mut rep = verify_random(random, c.seed, &greedy_range)?;
            if c.data.is_some() {
                let prep = c.prepare()?;
                let cfg = c.spec_config(&prep)?;
                let spec = prep.materialize(&cfg, cfg.budget(c.budget()?)?)?;
                let lambda = c.single_lambda(&prep)?;
                rep.merge(verify_prepared(
                    &prep,
                    &spec,
                    lambda,
                    c.epsilon,
                    max_points,
                    subsets,
                    &EnumerationBudget::default(),
                    &greedy_range,
                )?);
            }
            println!(
                "verify: {} instances, {} checks, {} failures",
                rep.instances,
                rep.checks,
                rep.failures.len()
            );
            for f in rep.failures.iter().take(20) {
                println!("  {f}");
            }
            if let Some(out) = &c.out {
                write_json(out, &rep)?;
            }
            if !rep.passed() {
                return Err(HarnessError::Verification(format!(
                    "{} of {} checks failed",
                    rep.failures.len(),
                    rep.checks
                )));
            }
        }
    }
    Ok(())
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let text =
        serde_json::to_string_pretty(value).map_err(|e| HarnessError::Config(e.to_string()))?;
    std::fs::write(path, text + "\n").map_err(|e| HarnessError::io(path, e))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
