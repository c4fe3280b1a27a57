//! The `padic-gibbs` command line: one command per invocation, one JSON report.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::{rational, FieldConfig, ModelConfig};
use crate::error::{Error, Result};
use crate::ising::{homogeneous_fixed_point, ising_gibbs_report, ising_uniqueness_check, lambda_spec, IsingSpec};
use crate::model::{
    check_compatibility, check_family, default_path_window, finite_volume_measure, marginal_sweep,
    measure_norm_profile, tilted_hamiltonian_domain_check, LambdaSpec, Normalization, SpinConfiguration,
};
use crate::padic::{exp_domain_valuation, NormValue, Padic};
use crate::recursion::{propagate_inward, translation_invariant_solve, uniqueness_conditions, BoundaryField};
use crate::tree::TreeSlice;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Weight tables are printed in full up to this many configurations.
const MAX_LISTED_WEIGHTS: usize = 1024;
const DEFAULT_WINDOWS: usize = 5;

#[derive(Debug, Parser, Serialize)]
#[command(name = "padic-gibbs", version, about = "p-adic Gibbs measures for lambda-models on Cayley trees")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON model configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub p: Option<u64>,
    #[arg(long, global = true)]
    pub precision: Option<u32>,
    #[arg(long, global = true)]
    pub k: Option<u32>,
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    /// `row` or `literal`.
    #[arg(long, global = true)]
    pub normalization: Option<Normalization>,
    /// Also write the report here (atomically).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Draws a random admissible boundary seed for `solve-field`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// p-adic norm of a rational.
    Norm {
        #[arg(long)]
        rational: String,
    },
    /// `exp_p` of a rational in the convergence domain.
    Exp {
        #[arg(long)]
        rational: String,
    },
    /// `log_p` of a rational with `|x - 1|_p < 1`.
    Log {
        #[arg(long)]
        rational: String,
    },
    /// Propagate a boundary field inward from the deepest level.
    SolveField,
    /// Translation-invariant solution of the boundary-field equation.
    TiSolve,
    /// Finite-volume measure on the whole slice.
    Measure {
        /// A `+`/`-` string over the vertices in breadth-first order.
        #[arg(long)]
        configuration: Option<String>,
    },
    /// Compatibility of consecutive finite-volume measures.
    Compat {
        #[arg(long)]
        level: Option<usize>,
    },
    /// Sufficient conditions for a unique compatible family.
    Uniqueness,
    /// Marginal path measures along the default path.
    Marginal {
        #[arg(long)]
        windows: Option<usize>,
    },
    /// Norms of measures and marginals, with a boundedness verdict.
    NormProfile {
        #[arg(long)]
        windows: Option<usize>,
    },
    /// Uniqueness, fixed point, compatibility and boundedness for an Ising model.
    IsingReport {
        #[arg(long)]
        windows: Option<usize>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Norm { .. } => "norm",
            Command::Exp { .. } => "exp",
            Command::Log { .. } => "log",
            Command::SolveField => "solve-field",
            Command::TiSolve => "ti-solve",
            Command::Measure { .. } => "measure",
            Command::Compat { .. } => "compat",
            Command::Uniqueness => "uniqueness",
            Command::Marginal { .. } => "marginal",
            Command::NormProfile { .. } => "norm-profile",
            Command::IsingReport { .. } => "ising-report",
        }
    }
}

/// Process exit status plus the report to print.
#[derive(Debug)]
pub struct Outcome {
    pub exit_code: i32,
    pub report: Value,
}

struct Computed {
    result: Value,
    ok: bool,
}

fn computed(result: impl Serialize, ok: bool) -> Result<Computed> {
    let result = serde_json::to_value(result).map_err(|e| Error::Internal(e.to_string()))?;
    Ok(Computed { result, ok })
}

pub fn run(cli: &Cli) -> Outcome {
    let command = cli.command.name();
    let loaded = load_config(cli);
    let config = loaded.as_ref().ok();
    let hash = config_hash(cli, config);
    let mut report = json!({ "command": command, "version": VERSION, "config_hash": hash });
    let outcome = loaded.and_then(|cfg| {
        report["prime"] = json!(cfg.p);
        report["precision"] = json!(cfg.precision().ok());
        dispatch(cli, &cfg)
    });
    let exit_code = match outcome {
        Ok(c) => {
            report["result"] = c.result;
            if c.ok {
                0
            } else {
                1
            }
        }
        Err(e) => {
            report["error"] = json!({ "kind": e.kind(), "message": e.to_string() });
            if matches!(e, Error::Internal(_)) {
                1
            } else {
                2
            }
        }
    };
    Outcome { exit_code, report }
}

/// Runs the command, prints the report, writes `--out`, and returns the exit status.
pub fn main_with(cli: Cli) -> i32 {
    let mut outcome = run(&cli);
    let text = render(&outcome.report);
    print!("{text}");
    if let Some(path) = &cli.out {
        if let Err(e) = write_atomically(path, &text) {
            eprintln!("padic-gibbs: cannot write {}: {e}", path.display());
            outcome.exit_code = 2;
        }
    }
    outcome.exit_code
}

pub fn render(report: &Value) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("JSON values always serialize");
    text.push('\n');
    text
}

fn write_atomically(path: &Path, text: &str) -> std::io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, text)?;
    fs::rename(&tmp, path)
}

fn load_config(cli: &Cli) -> Result<ModelConfig> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            ModelConfig::from_json(&text)?
        }
        None => ModelConfig::default(),
    };
    if let Some(p) = cli.p {
        cfg.p = Some(p);
    }
    if let Some(n) = cli.precision {
        cfg.precision = Some(n);
    }
    if let Some(k) = cli.k {
        cfg.k = Some(k);
    }
    if let Some(d) = cli.depth {
        cfg.depth = Some(d);
    }
    if let Some(n) = cli.normalization {
        cfg.normalization = Some(n);
    }
    cfg.prime()?;
    cfg.precision()?;
    Ok(cfg)
}

/// SHA-256 over the effective configuration and command, so equal inputs hash equally.
fn config_hash(cli: &Cli, config: Option<&ModelConfig>) -> String {
    let canonical = json!({ "command": &cli.command, "config": config, "seed": cli.seed });
    hex::encode(Sha256::digest(canonical.to_string().as_bytes()))
}

fn dispatch(cli: &Cli, cfg: &ModelConfig) -> Result<Computed> {
    let (p, n) = (cfg.prime()?, cfg.precision()?);
    match &cli.command {
        Command::Norm { rational: r } => {
            let x = rational(r, p, n)?;
            let norm = x.norm()?;
            let result = json!({
                "value": x,
                "norm_exponent": norm.exponent(),
                "zero": norm == NormValue::Zero,
            });
            computed(result, true)
        }
        Command::Exp { rational: r } => {
            let x = rational(r, p, n)?;
            computed(json!({ "input": x, "value": x.exp()? }), true)
        }
        Command::Log { rational: r } => {
            let x = rational(r, p, n)?;
            computed(json!({ "input": x, "value": x.log()? }), true)
        }
        Command::SolveField => solve_field(cli, cfg),
        Command::TiSolve => ti_solve(cfg),
        Command::Measure { configuration } => measure(cfg, configuration.as_deref()),
        Command::Compat { level } => compat(cfg, *level),
        Command::Uniqueness => uniqueness(cfg),
        Command::Marginal { windows } => {
            let (slice, lambda) = model(cfg)?;
            let windows = windows.or(cfg.windows).unwrap_or(DEFAULT_WINDOWS);
            let (field, windows) = resolve_field(cfg, &lambda, &slice, windows)?;
            let sweep = marginal_sweep(&lambda, &field, windows, normalization(cfg))?;
            computed(json!({ "normalization": normalization(cfg), "windows": sweep }), true)
        }
        Command::NormProfile { windows } => {
            let (slice, lambda) = model(cfg)?;
            let windows = windows.or(cfg.windows).unwrap_or(DEFAULT_WINDOWS);
            let (field, windows) = resolve_field(cfg, &lambda, &slice, windows)?;
            let profile =
                measure_norm_profile(&lambda, &field, &slice, slice.depth(), windows, normalization(cfg))?;
            // the dichotomy: bounded exactly when p is odd
            let ok = profile.bounded.value == (p != 2);
            computed(profile, ok)
        }
        Command::IsingReport { windows } => {
            let spec = ising(cfg)?;
            let windows = windows.or(cfg.windows).unwrap_or(DEFAULT_WINDOWS);
            let report = ising_gibbs_report(&spec, cfg.order()?, cfg.depth()?, windows, normalization(cfg))?;
            let ok = report.unique.value && report.compatible;
            computed(report, ok)
        }
    }
}

fn normalization(cfg: &ModelConfig) -> Normalization {
    cfg.normalization.unwrap_or_default()
}

fn ising(cfg: &ModelConfig) -> Result<IsingSpec> {
    cfg.ising_spec()?.ok_or_else(|| Error::Config("this command needs an `ising` block".into()))
}

/// The slice and the interaction on it, from `lambda` or from `ising`.
fn model(cfg: &ModelConfig) -> Result<(TreeSlice, LambdaSpec)> {
    let slice = TreeSlice::build(cfg.order()?, cfg.depth()?)?;
    let lambda = interaction(cfg, Some(&slice))?;
    Ok((slice, lambda))
}

fn interaction(cfg: &ModelConfig, slice: Option<&TreeSlice>) -> Result<LambdaSpec> {
    match (cfg.lambda_spec()?, cfg.ising_spec()?) {
        (Some(_), Some(_)) => Err(Error::Config("give either `lambda` or `ising`, not both".into())),
        (Some(l), None) => Ok(l),
        (None, Some(spec)) => match slice {
            Some(slice) => lambda_spec(&spec, slice),
            None if spec.is_homogeneous() => lambda_spec(&spec, &TreeSlice::build(1, 0)?),
            None => Err(Error::Config("an inhomogeneous Ising model needs k and depth".into())),
        },
        (None, None) => Err(Error::Config("the config needs a `lambda` or an `ising` block".into())),
    }
}

/// The boundary field family named by the config. Zero and translation-invariant
/// families also cover the default path out to `windows`; others are limited to the slice.
fn resolve_field(
    cfg: &ModelConfig,
    lambda: &LambdaSpec,
    slice: &TreeSlice,
    windows: usize,
) -> Result<(BoundaryField, usize)> {
    let (p, n) = (cfg.prime()?, cfg.precision()?);
    let depth = slice.depth();
    let mut extend = None;
    let field = match cfg.field() {
        FieldConfig::Zero => {
            let zero = Padic::zero(p as u64, n)?;
            extend = Some(zero);
            BoundaryField::zero(slice, p, n)?
        }
        FieldConfig::Solve { seed } => {
            let given = cfg.scalar_map(&seed)?;
            let zero = Padic::zero(p as u64, n)?;
            let seed = slice
                .level(depth)
                .iter()
                .map(|a| (a.clone(), given.get(a).cloned().unwrap_or_else(|| zero.clone())))
                .collect();
            if let Some(extra) = given.keys().find(|a| a.depth() != depth || !slice.contains(a)) {
                return Err(Error::Config(format!("seed value at {extra} is not on level {depth}")));
            }
            propagate_inward(&seed, lambda, slice)?
        }
        FieldConfig::Explicit { values } => BoundaryField::from_values(p, cfg.scalar_map(&values)?)?,
        FieldConfig::TranslationInvariant => {
            let solution = translation_invariant_solve(lambda, slice.order())?;
            let seed = slice.level(depth).iter().map(|a| (a.clone(), solution.h.clone())).collect();
            extend = Some(solution.h);
            propagate_inward(&seed, lambda, slice)?
        }
    };
    let mut field = field;
    let windows = match extend {
        Some(h) => {
            for a in default_path_window(windows) {
                if a.depth() > depth {
                    field.insert(a, h.clone())?;
                }
            }
            windows
        }
        None => windows.min(depth),
    };
    if windows == 0 {
        return Err(Error::Config("the marginal sweep needs depth >= 1 or a zero/translation-invariant field".into()));
    }
    Ok((field, windows))
}

/// Boundary values `p^v u` with `v` from the domain bound upward, drawn deterministically.
pub fn random_seed_values(slice: &TreeSlice, prime: u32, precision: u32, seed: u64) -> Result<BoundaryField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = exp_domain_valuation(prime);
    let values = slice
        .level(slice.depth())
        .iter()
        .map(|a| {
            let v = base + rng.gen_range(0..3);
            let mut unit: u64 = rng.gen_range(1..1_000_000);
            while unit.is_multiple_of(prime as u64) {
                unit += 1;
            }
            let sign = if rng.gen_bool(0.5) { 1i64 } else { -1 };
            let numerator = num_bigint::BigInt::from(prime).pow(v as u32) * unit * sign;
            Ok((a.clone(), Padic::from_rational(numerator, 1, prime as u64, precision)?))
        })
        .collect::<Result<Vec<_>>>()?;
    BoundaryField::from_values(prime, values)
}

fn solve_field(cli: &Cli, cfg: &ModelConfig) -> Result<Computed> {
    let (slice, lambda) = model(cfg)?;
    let field = match cli.seed {
        Some(seed) => {
            let boundary = random_seed_values(&slice, cfg.prime()?, cfg.precision()?, seed)?;
            let seed = boundary.level(slice.depth()).cloned().unwrap_or_default();
            propagate_inward(&seed, &lambda, &slice)?
        }
        None => match cfg.field() {
            FieldConfig::Zero | FieldConfig::Explicit { .. } => {
                return Err(Error::Config("solve-field needs field mode `solve` or `translation-invariant`".into()))
            }
            _ => resolve_field(cfg, &lambda, &slice, slice.depth().max(1))?.0,
        },
    };
    let root = field.value(&crate::tree::TreeAddress::root()).cloned();
    computed(json!({ "root": root, "field": field }), true)
}

fn ti_solve(cfg: &ModelConfig) -> Result<Computed> {
    let k = cfg.order()?;
    if cfg.lambda.is_none() {
        if let Some(spec) = cfg.ising_spec()? {
            let fp = homogeneous_fixed_point(&spec, k)?;
            let near_one = fp.solve.distance_from_one.at_least(1);
            let residual_ok = residual_ok(&fp.zeta, &fp.solve.residual);
            let checks = json!({ "near_one": near_one, "residual_ok": residual_ok });
            return computed(json!({ "fixed_point": fp, "checks": checks }), near_one && residual_ok);
        }
    }
    let lambda = interaction(cfg, None)?;
    let solution = translation_invariant_solve(&lambda, k)?;
    let near_one = solution.fixed_point.distance_from_one.at_least(1);
    let residual_ok = residual_ok(&solution.fixed_point.z, &solution.fixed_point.residual);
    let checks = json!({ "near_one": near_one, "residual_ok": residual_ok });
    computed(json!({ "solution": solution, "checks": checks }), near_one && residual_ok)
}

fn residual_ok(z: &Padic, residual: &crate::padic::Order) -> bool {
    residual.at_least(z.abs_precision().unwrap_or(i64::MAX))
}

fn measure(cfg: &ModelConfig, configuration: Option<&str>) -> Result<Computed> {
    let (slice, lambda) = model(cfg)?;
    let (field, _) = resolve_field(cfg, &lambda, &slice, slice.depth().max(1))?;
    let mu = finite_volume_measure(&lambda, &field, &slice)?;
    let total = mu.total();
    let normalized = total.agrees_with(&total.integer_like(1));
    let (max_norm, min_norm) = mu.norm_range().map_or((None, None), |(a, b)| (Some(a), Some(b)));
    let mut result = json!({
        "depth": mu.depth(),
        "vertices": slice.vertices(),
        "configurations": mu.weights().len(),
        "partition_function": mu.partition_function(),
        "total": total,
        "normalized": normalized,
        "max_norm": max_norm,
        "min_norm": min_norm,
    });
    match configuration {
        Some(text) => {
            let config: SpinConfiguration = text.parse()?;
            let weight = mu.weight(&config)?;
            let domain = tilted_hamiltonian_domain_check(&config, &lambda, &field, &slice)?;
            result["configuration"] = json!({ "spins": config, "weight": weight, "domain": domain });
        }
        None if mu.weights().len() <= MAX_LISTED_WEIGHTS => {
            let weights: Vec<Value> = mu
                .configurations()
                .map(|(c, w)| json!({ "configuration": c, "weight": w }))
                .collect();
            result["weights"] = Value::Array(weights);
        }
        None => result["weights_omitted"] = json!(true),
    }
    computed(result, normalized)
}

fn compat(cfg: &ModelConfig, level: Option<usize>) -> Result<Computed> {
    let (slice, lambda) = model(cfg)?;
    let (field, _) = resolve_field(cfg, &lambda, &slice, slice.depth().max(1))?;
    let reports = match level {
        Some(n) => vec![check_compatibility(n, &lambda, &field, &slice)?],
        None => check_family(&lambda, &field, &slice)?,
    };
    let passed = reports.iter().all(|r| r.passed);
    computed(json!({ "passed": passed, "levels": reports }), passed)
}

fn uniqueness(cfg: &ModelConfig) -> Result<Computed> {
    let slice = match (cfg.k, cfg.depth) {
        (Some(k), Some(d)) => Some(TreeSlice::build(k, d)?),
        _ => None,
    };
    let lambda = interaction(cfg, slice.as_ref())?;
    let verdict = uniqueness_conditions(&lambda);
    let mut ok = verdict.holds();
    let mut result = json!({ "lambda": verdict });
    if let Some(spec) = cfg.ising_spec()? {
        let check = ising_uniqueness_check(&spec);
        ok &= check.unique.value;
        result["ising"] = serde_json::to_value(check).map_err(|e| Error::Internal(e.to_string()))?;
    }
    result["unique"] = json!(ok);
    computed(result, ok)
}
