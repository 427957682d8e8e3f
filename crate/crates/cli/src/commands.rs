use std::fmt::Write as _;

use anyhow::Result;
use assocq::bounds::{self, BoundCheckReport, SimulationCheckConfig};
use assocq::montecarlo::{fit_rate_points, run_experiment};
use assocq::rng::{derive_seed, RandomStream};
use assocq::{build_model, BerryEsseenEstimate, CoefficientScheme, ExperimentConfig, MovingAverageModel};
use serde::{Deserialize, Serialize};

use crate::config::{usage, Overrides, RunConfig};
use crate::output::{unix_now, OutputDir};
use crate::{Cli, Command, SimulateArgs, UsageError};

pub const DETERMINISTIC_CHECKS: [&str; 3] = ["mills", "phi_scaling", "phi_shift"];
pub const EXACT_CHECKS: [&str; 3] = ["indicator_cov", "lemma1_rate", "variance_gap"];
pub const MONTECARLO_CHECKS: [&str; 2] = ["exponential_tail", "moment_growth"];
pub const MIN_RATE_POINTS: usize = 4;

const TAIL_SEED_LABEL: u64 = 0x7a11;
const MOMENT_SEED_LABEL: u64 = 0x303e;

pub(crate) fn dispatch(cli: &Cli) -> Result<bool> {
    let started = unix_now();
    let g = &cli.global;
    let overrides = Overrides { seed: g.seed, replications: g.replications, grid_step: g.grid_step };
    let config = RunConfig::load(g.config.as_deref(), &overrides)?;
    let mut out = OutputDir::create(&g.out_dir)?;
    let (name, passed) = match &cli.command {
        Command::Table1 => ("table1".to_string(), cmd_table1(&config, &mut out)?),
        Command::Rates => ("rates".to_string(), cmd_rates(&config, &mut out)?),
        Command::Checks { selector } => (format!("checks {selector}"), cmd_checks(&config, selector, &mut out)?),
        Command::Simulate(args) => (simulate_command_line(args), cmd_simulate(&config, args, &mut out)?),
    };
    out.finish(&name, &config, rayon::current_num_threads(), started)?;
    Ok(passed)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    pub case: String,
    pub p: f64,
    pub n: usize,
    #[serde(rename = "R")]
    pub replications: usize,
    #[serde(rename = "D_n")]
    pub d_n: f64,
    #[serde(rename = "D_n_jumps")]
    pub d_n_jumps: f64,
    pub argmax_t: f64,
    pub mc_se: f64,
    pub x_p: f64,
    pub a_p: f64,
}

impl Table1Row {
    fn new(case: &str, e: &BerryEsseenEstimate) -> Self {
        Self {
            case: case.to_string(),
            p: e.p,
            n: e.n,
            replications: e.replications,
            d_n: e.d_n,
            d_n_jumps: e.d_n_jumps,
            argmax_t: e.argmax_t,
            mc_se: e.mc_se,
            x_p: e.quantile.x_p,
            a_p: e.quantile.a_p,
        }
    }
}

/// Runs every configured case; returns the rows and whether every cell ran.
pub fn table1_rows(config: &RunConfig) -> Result<(Vec<Table1Row>, bool)> {
    let mut rows = Vec::new();
    let mut complete = true;
    for (ci, case) in config.cases.iter().enumerate() {
        let exp = config.experiment(ci, config.p_levels.clone(), config.n_values.clone())?;
        let outcome = run_experiment(&exp).map_err(usage)?;
        for f in &outcome.failures {
            eprintln!("warning: {} p={} n={}: {}", case.name, f.p, f.n, f.message);
            complete = false;
        }
        rows.extend(outcome.estimates.iter().map(|e| Table1Row::new(&case.name, e)));
    }
    Ok((rows, complete))
}

pub fn cmd_table1(config: &RunConfig, out: &mut OutputDir) -> Result<bool> {
    let (rows, complete) = table1_rows(config)?;
    out.write_csv("table1.csv", &rows)?;
    print!("{}", format_table1(config, &rows));
    Ok(complete)
}

/// Cases and levels as rows, sample sizes as columns.
pub fn format_table1(config: &RunConfig, rows: &[Table1Row]) -> String {
    let mut s = String::new();
    let _ = write!(s, "{:<8} {:>5}", "case", "p");
    for n in &config.n_values {
        let _ = write!(s, " {:>12}", format!("n={n}"));
    }
    s.push('\n');
    for case in &config.cases {
        for &p in &config.p_levels {
            let _ = write!(s, "{:<8} {:>5}", case.name, p);
            for &n in &config.n_values {
                match rows.iter().find(|r| r.case == case.name && r.p == p && r.n == n) {
                    Some(r) => {
                        let _ = write!(s, " {:>12.6}", r.d_n);
                    }
                    None => {
                        let _ = write!(s, " {:>12}", "-");
                    }
                }
            }
            s.push('\n');
        }
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub p: f64,
    pub n: usize,
    pub d_n: f64,
    pub mc_se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub case: String,
    pub p: f64,
    pub n: usize,
    #[serde(rename = "R")]
    pub replications: usize,
    #[serde(rename = "D_n")]
    pub d_n: f64,
    pub mc_se: f64,
    pub log_n: f64,
    #[serde(rename = "log_D_n")]
    pub log_d_n: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFitRow {
    pub case: String,
    pub p: f64,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Monte Carlo distance for every `(p, n)` of an experiment.
pub fn monte_carlo_points(exp: &ExperimentConfig) -> Result<Vec<RatePoint>> {
    let outcome = run_experiment(exp).map_err(usage)?;
    if let Some(f) = outcome.failures.first() {
        anyhow::bail!("cell p={} n={} failed: {}", f.p, f.n, f.message);
    }
    Ok(outcome.estimates.iter().map(|e| RatePoint { p: e.p, n: e.n, d_n: e.d_n, mc_se: e.mc_se }).collect())
}

pub fn cmd_rates(config: &RunConfig, out: &mut OutputDir) -> Result<bool> {
    run_rates_with(config, out, monte_carlo_points)
}

/// `cmd_rates` with the distance estimator supplied by the caller, so the
/// fitting and output path can be driven by synthetic distances.
pub fn run_rates_with<F>(config: &RunConfig, out: &mut OutputDir, estimator: F) -> Result<bool>
where
    F: Fn(&ExperimentConfig) -> Result<Vec<RatePoint>>,
{
    let rc = &config.rates;
    if rc.n_values.len() < MIN_RATE_POINTS {
        return Err(UsageError(format!(
            "rates needs at least {MIN_RATE_POINTS} n values, got {}",
            rc.n_values.len()
        ))
        .into());
    }
    let mut rows = Vec::new();
    let mut fits = Vec::new();
    for (ci, case) in config.cases.iter().enumerate() {
        let exp = config.experiment(ci, rc.p_levels.clone(), rc.n_values.clone())?;
        exp.validate().map_err(usage)?;
        let points = estimator(&exp)?;
        for &p in &rc.p_levels {
            let cell: Vec<&RatePoint> = points.iter().filter(|r| r.p == p).collect();
            let pairs: Vec<(usize, f64)> = cell.iter().map(|r| (r.n, r.d_n)).collect();
            let fit = fit_rate_points(&pairs)?;
            rows.extend(cell.iter().map(|r| RateRow {
                case: case.name.clone(),
                p,
                n: r.n,
                replications: exp.replications,
                d_n: r.d_n,
                mc_se: r.mc_se,
                log_n: (r.n as f64).ln(),
                log_d_n: r.d_n.ln(),
            }));
            println!("{:<8} p={:<5} slope {:>9.6}  r2 {:.4}", case.name, p, fit.slope, fit.r_squared);
            fits.push(RateFitRow {
                case: case.name.clone(),
                p,
                slope: fit.slope,
                intercept: fit.intercept,
                r_squared: fit.r_squared,
                points: pairs.len(),
            });
        }
    }
    out.write_csv("rates.csv", &rows)?;
    out.write_csv("rates_fit.csv", &fits)?;
    Ok(true)
}

/// One report in `checks.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub check: String,
    pub case: Option<String>,
    pub p: Option<f64>,
    pub t: Option<f64>,
    pub report: BoundCheckReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChecksDocument {
    pub selector: String,
    pub passed: bool,
    pub entries: Vec<CheckEntry>,
}

pub fn all_check_names() -> Vec<&'static str> {
    DETERMINISTIC_CHECKS.iter().chain(&EXACT_CHECKS).chain(&MONTECARLO_CHECKS).copied().collect()
}

pub fn select_checks(selector: &str) -> Result<Vec<&'static str>> {
    Ok(match selector {
        "all" => all_check_names(),
        "deterministic" => DETERMINISTIC_CHECKS.to_vec(),
        "exact" => EXACT_CHECKS.to_vec(),
        "montecarlo" => MONTECARLO_CHECKS.to_vec(),
        name => match all_check_names().into_iter().find(|c| *c == name) {
            Some(c) => vec![c],
            None => {
                return Err(UsageError(format!(
                    "unknown check {name:?}; valid selectors: all, deterministic, exact, montecarlo, {}",
                    all_check_names().join(", ")
                ))
                .into())
            }
        },
    })
}

pub fn run_checks(config: &RunConfig, selector: &str) -> Result<ChecksDocument> {
    let names = select_checks(selector)?;
    let cc = &config.checks;
    let models: Vec<(String, MovingAverageModel)> =
        config.cases.iter().map(|c| Ok((c.name.clone(), c.model()?))).collect::<Result<_>>()?;
    let mut entries = Vec::new();
    let entry = |check: &str, case: Option<&str>, p: Option<f64>, t: Option<f64>, report| CheckEntry {
        check: check.to_string(),
        case: case.map(str::to_string),
        p,
        t,
        report,
    };
    for name in names {
        match name {
            "mills" => entries.push(entry(name, None, None, None, bounds::check_mills())),
            "phi_scaling" => entries.push(entry(name, None, None, None, bounds::check_phi_scaling())),
            "phi_shift" => entries.push(entry(name, None, None, None, bounds::check_phi_shift())),
            "indicator_cov" => {
                for (case, model) in &models {
                    let r = bounds::check_indicator_cov_inequality(model).map_err(usage)?;
                    entries.push(entry(name, Some(case), None, None, r));
                }
            }
            "lemma1_rate" => {
                for (case, model) in &models {
                    for &p in &cc.p_levels {
                        let r = bounds::check_lemma1_rate(model, p, &cc.shifted_rate).map_err(usage)?;
                        entries.push(entry(name, Some(case), Some(p), None, r));
                    }
                }
            }
            "variance_gap" => {
                for (case, model) in &models {
                    for &p in &cc.p_levels {
                        for &t in &cc.gap_t_values {
                            let r = bounds::check_variance_gap(model, p, t, &cc.gap_n_values).map_err(usage)?;
                            entries.push(entry(name, Some(case), Some(p), Some(t), r));
                        }
                    }
                }
            }
            "exponential_tail" => {
                for (ci, (case, model)) in models.iter().enumerate() {
                    let sim = SimulationCheckConfig {
                        threshold: cc.threshold,
                        n_values: cc.tail_n_values.clone(),
                        replications: cc.tail_replications,
                        seed: derive_seed(config.case_seed(ci), TAIL_SEED_LABEL),
                    };
                    let r = bounds::check_exponential_tail(model, &sim, &cc.tail_eps).map_err(usage)?;
                    entries.push(entry(name, Some(case), None, None, r));
                }
            }
            "moment_growth" => {
                for (ci, (case, model)) in models.iter().enumerate() {
                    let sim = SimulationCheckConfig {
                        threshold: cc.threshold,
                        n_values: cc.moment_n_values.clone(),
                        replications: cc.moment_replications,
                        seed: derive_seed(config.case_seed(ci), MOMENT_SEED_LABEL),
                    };
                    let r = bounds::check_moment_growth(model, &sim, &cc.moment_q).map_err(usage)?;
                    entries.push(entry(name, Some(case), None, None, r));
                }
            }
            _ => unreachable!("selector resolved to a known check"),
        }
    }
    let passed = entries.iter().all(|e| e.report.passed);
    Ok(ChecksDocument { selector: selector.to_string(), passed, entries })
}

pub fn cmd_checks(config: &RunConfig, selector: &str, out: &mut OutputDir) -> Result<bool> {
    let doc = run_checks(config, selector)?;
    for e in &doc.entries {
        let mut label = e.check.clone();
        if let Some(c) = &e.case {
            let _ = write!(label, " {c}");
        }
        if let Some(p) = e.p {
            let _ = write!(label, " p={p}");
        }
        if let Some(t) = e.t {
            let _ = write!(label, " t={t}");
        }
        let verdict = if e.report.passed { "PASS" } else { "FAIL" };
        println!("{verdict} {label:<36} margin {:>13.6e} at {}", e.report.worst_margin, e.report.worst_point);
    }
    out.write_json("checks.json", &doc)?;
    Ok(doc.passed)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSummary {
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
    pub lag1_autocov: f64,
    pub model_lag1_autocov: f64,
    /// Large-sample standard error of the lag-one sample autocovariance.
    pub lag1_se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct PathRow {
    k: usize,
    x: f64,
}

fn simulate_model(config: &RunConfig, args: &SimulateArgs) -> Result<MovingAverageModel> {
    if let Some(kind) = &args.kind {
        let (param, m) = (args.param.unwrap_or(f64::NAN), args.m.unwrap_or(0));
        let scheme = match kind.as_str() {
            "exponential" => CoefficientScheme::Exponential { rho: param },
            "polynomial" => CoefficientScheme::Polynomial { s: param },
            other => return Err(UsageError(format!("unknown scheme {other:?}; use exponential or polynomial")).into()),
        };
        return build_model(scheme, m).map_err(|e| UsageError(e.to_string()).into());
    }
    let name = args.case.as_deref().unwrap_or(&config.cases[0].name);
    match config.cases.iter().find(|c| c.name == name) {
        Some(c) => c.model(),
        None => Err(UsageError(format!("no case named {name:?}")).into()),
    }
}

fn simulate_command_line(args: &SimulateArgs) -> String {
    let mut s = String::from("simulate");
    if let Some(c) = &args.case {
        let _ = write!(s, " --case {c}");
    }
    if let (Some(k), Some(p), Some(m)) = (&args.kind, args.param, args.m) {
        let _ = write!(s, " --kind {k} --param {p} --m {m}");
    }
    let _ = write!(s, " --n {}", args.n);
    s
}

pub fn summarize_path(model: &MovingAverageModel, path: &[f64]) -> PathSummary {
    let n = path.len();
    let nf = n as f64;
    let mean = path.iter().sum::<f64>() / nf;
    let variance = path.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / nf;
    let lag1 = path.windows(2).map(|w| (w[0] - mean) * (w[1] - mean)).sum::<f64>() / nf;
    // Bartlett: n Var(gamma_hat(1)) -> sum_k gamma(k)^2 + gamma(k + 1) gamma(k - 1)
    let g = |k: i64| model.autocov(k.unsigned_abs() as usize);
    let m = model.order() as i64;
    let bartlett: f64 = (-m - 1..=m + 1).map(|k| g(k) * g(k) + g(k + 1) * g(k - 1)).sum();
    PathSummary {
        n,
        mean,
        variance,
        lag1_autocov: lag1,
        model_lag1_autocov: model.autocov(1),
        lag1_se: (bartlett / nf).sqrt(),
    }
}

pub fn cmd_simulate(config: &RunConfig, args: &SimulateArgs, out: &mut OutputDir) -> Result<bool> {
    if args.n < 2 {
        return Err(UsageError("--n must be at least 2".into()).into());
    }
    let model = simulate_model(config, args)?;
    let mut stream = RandomStream::new(config.seed, 0);
    let path = model.simulate_path(args.n, &mut stream);
    let rows: Vec<PathRow> = path.iter().enumerate().map(|(k, &x)| PathRow { k: k + 1, x }).collect();
    out.write_csv("simulate.csv", &rows)?;
    let summary = summarize_path(&model, &path);
    println!(
        "n {}  mean {:.6}  var {:.6}  lag-1 autocov {:.6} (model {:.6}, se {:.6})",
        summary.n, summary.mean, summary.variance, summary.lag1_autocov, summary.model_lag1_autocov, summary.lag1_se
    );
    out.write_json("simulate_summary.json", &summary)?;
    Ok(true)
}
