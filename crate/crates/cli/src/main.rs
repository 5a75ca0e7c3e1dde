use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use metric_distortion::bounds::{
    borda_order, compute_constants, copeland_bound_finite, copeland_bound_limit, generic_det_lower,
    plurality_bound_finite, plurality_bound_limit, rd_lower_bound, rd_lower_bound_pl, rd_upper_bound, wu_bound_golden,
    DEFAULT_EPSILON,
};
use metric_distortion::constructions::{
    gen_borda_lb, gen_generic_lb_pair, gen_plurality_lb, gen_plurality_pl_lb, gen_rd_lb, gen_rd_pl_lb, Branch,
    ConstructionKind,
};
use metric_distortion::dual::{dual_witness, verify_dual_feasibility};
use metric_distortion::harness::{estimate_distortion, sweep_bounds, write_sweep_csv, DEFAULT_TRIALS};
use metric_distortion::io::{load_instance, load_model, parse_grid, parse_usize_list};
use metric_distortion::models::ModelSpec;
use metric_distortion::oracle::brute_force_distortion;
use metric_distortion::rng::DEFAULT_SEED;
use metric_distortion::{ConstructedElection, Error, GFunction, Rule};

#[derive(Parser)]
#[command(name = "mdist", version, about = "Metric distortion of voting rules under probabilistic voting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Debug)]
struct Grid(Vec<f64>);

#[derive(Clone, Debug)]
struct Counts(Vec<usize>);

fn grid_arg(s: &str) -> Result<Grid, String> {
    parse_grid(s).map(Grid).map_err(|e| e.to_string())
}

fn counts_arg(s: &str) -> Result<Counts, String> {
    parse_usize_list(s).map(Counts).map_err(|e| e.to_string())
}

#[derive(Subcommand)]
enum Command {
    /// Print gamma_mid, gamma_out and their maximizers for Plackett-Luce.
    Constants {
        #[arg(long)]
        theta: f64,
    },
    /// Evaluate every closed-form bound at one (theta, m).
    Bounds {
        #[arg(long)]
        theta: f64,
        #[arg(long)]
        m: usize,
        /// Also evaluate the finite-n bounds.
        #[arg(long)]
        n: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        eps: f64,
    },
    /// Write a lower-bound construction as instance and model JSON files.
    GenInstance {
        #[arg(long)]
        theorem: ConstructionKind,
        /// Comma list of key=value among m, n, theta, eps, zeta, branch.
        #[arg(long, default_value = "")]
        params: String,
        /// Output prefix; files are PREFIX.instance.json and PREFIX.model.json.
        #[arg(long)]
        out: PathBuf,
    },
    /// Monte Carlo distortion estimate.
    Simulate {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        rule: Rule,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
        #[arg(long, env = "MDIST_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Exact distortion by enumerating every profile of a tiny election.
    Oracle {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        rule: Rule,
    },
    /// Check the dual certificate; defaults to (mu*, lambda*).
    VerifyDual {
        #[arg(long)]
        theta: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long, default_value_t = 10_000)]
        grid: usize,
    },
    /// Bound table as CSV: theta,m,rule,bound_kind,value.
    Sweep {
        /// `start:end:log|lin[:count]` or a comma list.
        #[arg(long, value_parser = grid_arg)]
        theta: Grid,
        #[arg(long, value_parser = counts_arg)]
        m: Counts,
        /// Write to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Invalid(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json value serializes"));
}

fn pl(theta: f64) -> Result<GFunction, Failure> {
    GFunction::pl(theta).map_err(|e| Failure::Usage(e.to_string()))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Constants { theta } => {
            let c = compute_constants(&pl(theta)?)?;
            print_json(&json!({
                "theta": theta,
                "gamma_mid": c.gamma_mid,
                "gamma_out": c.gamma_out,
                "x_star_mid": c.x_star_mid,
                "x_star_out": c.x_star_out,
            }));
        }
        Command::Bounds { theta, m, n, eps } => {
            let g = pl(theta)?;
            let c = compute_constants(&g)?;
            let mut out = json!({
                "theta": theta,
                "m": m,
                "plurality_limit": plurality_bound_limit(m, &c),
                "copeland_limit": copeland_bound_limit(&c),
                "weighted_uncovered_limit": wu_bound_golden(&c),
                "random_dictator_upper": rd_upper_bound(m, &c)?,
                "random_dictator_lower_pl": rd_lower_bound_pl(m, theta)?,
                "borda_order": borda_order(m, theta)?,
                "deterministic_lower": generic_det_lower(&c),
            });
            if m >= 3 {
                out["random_dictator_lower"] = json!(rd_lower_bound(m, n.unwrap_or(f64::INFINITY), &g)?);
            }
            if let Some(n) = n {
                out["n"] = json!(n);
                out["eps"] = json!(eps);
                out["plurality_finite"] = json!(plurality_bound_finite(n, m, eps, &c)?);
                out["copeland_finite"] = json!(copeland_bound_finite(n, m, eps, &c)?);
            }
            print_json(&out);
        }
        Command::GenInstance { theorem, params, out } => gen_instance(theorem, &params, &out)?,
        Command::Simulate { instance, model, rule, trials, seed } => {
            let inst = load_instance(&instance)?;
            let model = load_model(&model, &inst)?;
            let est = estimate_distortion(&inst, &model, rule, trials, seed)?;
            print_json(&serde_json::to_value(&est).expect("estimate serializes"));
        }
        Command::Oracle { instance, model, rule } => {
            let inst = load_instance(&instance)?;
            let model = load_model(&model, &inst)?;
            let r = brute_force_distortion(&inst, &model, rule)?;
            let mut v = serde_json::to_value(&r).expect("oracle result serializes");
            v["rule"] = json!(rule);
            print_json(&v);
        }
        Command::VerifyDual { theta, alpha, mu, lambda, grid } => {
            let g = pl(theta)?;
            let c = compute_constants(&g)?;
            let w = dual_witness(alpha, &c)?;
            let report = verify_dual_feasibility(&g, alpha, mu.unwrap_or(w.mu_star), lambda.unwrap_or(w.lambda_star), grid)?;
            let mut v = serde_json::to_value(&report).expect("dual report serializes");
            v["theta"] = json!(theta);
            v["mu_star"] = json!(w.mu_star);
            v["lambda_star"] = json!(w.lambda_star);
            print_json(&v);
            if !report.pass {
                return Err(Failure::Invalid(format!("dual check failed: minimum {}", report.min_value)));
            }
        }
        Command::Sweep { theta, m, out } => {
            let rows = sweep_bounds(&theta.0, &m.0).map_err(|e| Failure::Usage(e.to_string()))?;
            match out {
                Some(path) => write_sweep_csv(&rows, fs::File::create(path).map_err(Error::from)?)?,
                None => write_sweep_csv(&rows, std::io::stdout().lock())?,
            }
        }
    }
    Ok(())
}

struct Params(BTreeMap<String, String>);

impl Params {
    fn parse(text: &str) -> Result<Self, Failure> {
        let mut map = BTreeMap::new();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Failure::Usage(format!("expected key=value, got {item:?}")))?;
            let k = k.trim();
            if !["m", "n", "theta", "eps", "zeta", "branch"].contains(&k) {
                return Err(Failure::Usage(format!("unknown parameter {k:?}")));
            }
            map.insert(k.to_string(), v.trim().to_string());
        }
        Ok(Params(map))
    }

    fn get<T: std::str::FromStr>(&self, key: &str, default: Option<T>) -> Result<T, Failure> {
        match self.0.get(key) {
            Some(v) => v.parse().map_err(|_| Failure::Usage(format!("bad value for {key}: {v:?}"))),
            None => default.ok_or_else(|| Failure::Usage(format!("missing parameter {key}"))),
        }
    }
}

fn gen_instance(kind: ConstructionKind, params: &str, out: &Path) -> Result<(), Failure> {
    let p = Params::parse(params)?;
    let theta: f64 = p.get("theta", Some(2.0))?;
    let eps: f64 = p.get("eps", Some(0.01))?;
    let zeta: f64 = p.get("zeta", Some(0.01))?;
    let branch: Branch = p.get("branch", Some(Branch::Mid))?;
    let n: usize = p.get("n", None)?;
    let g = pl(theta)?;
    let elections: Vec<ConstructedElection> = match kind {
        ConstructionKind::PluralityLb => vec![gen_plurality_lb(p.get("m", None)?, n, eps, zeta, &g, branch)?],
        ConstructionKind::PluralityPlLb => vec![gen_plurality_pl_lb(p.get("m", None)?, n, eps, zeta, theta)?],
        ConstructionKind::RdLb => vec![gen_rd_lb(p.get("m", None)?, n, &g)?],
        ConstructionKind::RdPlLb => vec![gen_rd_pl_lb(p.get("m", None)?, n, theta)?],
        ConstructionKind::BordaLb => vec![gen_borda_lb(p.get("m", None)?, n, theta)?],
        ConstructionKind::GenericLb => gen_generic_lb_pair(&g, branch, n)?.into(),
    };
    let mut summaries = Vec::new();
    for (k, e) in elections.iter().enumerate() {
        let stem = if k == 0 { out.display().to_string() } else { format!("{}.mirror", out.display()) };
        let instance_path = format!("{stem}.instance.json");
        let model_path = format!("{stem}.model.json");
        fs::write(&instance_path, e.instance.to_json()).map_err(Error::from)?;
        fs::write(&model_path, ModelSpec::from(&e.model).to_json()).map_err(Error::from)?;
        summaries.push(json!({
            "theorem": kind.as_str(),
            "instance": instance_path,
            "model": model_path,
            "n": e.instance.n(),
            "m": e.instance.m(),
            "w": e.w,
            "b": e.b,
            "predicted_distortion": e.predicted_distortion,
            "params": e.params,
        }));
    }
    print_json(&if summaries.len() == 1 { summaries.remove(0) } else { Value::Array(summaries) });
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
