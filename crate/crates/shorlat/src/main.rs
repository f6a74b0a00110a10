//! Command-line interface: basis reduction, period recovery, the
//! continued-fractions baseline, and seeded Monte Carlo experiments.
//!
//! Every command emits one structured document (JSON by default, CSV with
//! `--format csv`) tagged with a schema version. Exit codes: 0 on success,
//! 1 on recovery failure, 2 on usage errors.

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde_json::{json, Map, Value};

use shorlat::cf::cf_recover;
use shorlat::error::Error;
use shorlat::factor::{
    coprimality_experiment, factor_experiment, recovery_experiment, reduction_bench, BoundPolicy,
    DEFAULT_MAX_ROUNDS,
};
use shorlat::io::{
    basis_from_str, basis_to_json, envelope, outcome_to_json, parse_rational, trace_to_json,
};
use shorlat::lattice::{gauss_reduce, gauss_reduce_t};
use shorlat::numtheory::modpow;
use shorlat::recovery::{make_params, recover_period};
use shorlat::sampler::{RoundingMode, SamplerConfig};

#[derive(Parser)]
#[command(name = "shorlat", version, about = "Period recovery via lattice reduction")]
struct Cli {
    /// Master seed for all randomized commands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Output format for the result document.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Suppress progress notes on stderr.
    #[arg(long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PolicyArg {
    ExactOrder,
    SqrtN,
    N,
}

impl From<PolicyArg> for BoundPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::ExactOrder => BoundPolicy::ExactOrder,
            PolicyArg::SqrtN => BoundPolicy::SqrtN,
            PolicyArg::N => BoundPolicy::N,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RoundingArg {
    Floor,
    Ceil,
    Random,
}

impl From<RoundingArg> for RoundingMode {
    fn from(r: RoundingArg) -> Self {
        match r {
            RoundingArg::Floor => RoundingMode::Floor,
            RoundingArg::Ceil => RoundingMode::Ceil,
            RoundingArg::Random => RoundingMode::RandomPerSample,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Reduce a rank-2 basis and report the trace.
    Reduce {
        /// First generator, comma-separated integers (e.g. "89,0").
        #[arg(long, requires = "v", conflicts_with = "input")]
        u: Option<String>,
        /// Second generator, comma-separated integers.
        #[arg(long, requires = "u")]
        v: Option<String>,
        /// Basis file, line-oriented or JSON ("-" for stdin).
        #[arg(long)]
        input: Option<PathBuf>,
        /// Relaxed termination parameter t^2 as a rational, e.g. "3/2".
        #[arg(long = "t-squared")]
        t_squared: Option<String>,
    },
    /// Recover a period from two samples.
    Recover {
        #[arg(long, value_parser = parse_bigint)]
        x: BigInt,
        #[arg(long, value_parser = parse_bigint)]
        y: BigInt,
        /// Upper bound B on the period.
        #[arg(long, value_parser = parse_bigint)]
        bound: BigInt,
        /// Override the sampling resolution (must be >= sqrt(2)*4B^2).
        #[arg(long = "N", value_parser = parse_bigint)]
        n: Option<BigInt>,
    },
    /// Continued-fractions recovery from a single sample.
    CfRecover {
        #[arg(long, value_parser = parse_bigint)]
        x: BigInt,
        #[arg(long, value_parser = parse_bigint)]
        bound: BigInt,
        #[arg(long = "N", value_parser = parse_bigint)]
        n: Option<BigInt>,
        /// Verify candidates as the order of this unit...
        #[arg(long, requires = "modulus")]
        unit: Option<u64>,
        /// ...modulo this modulus.
        #[arg(long, requires = "unit")]
        modulus: Option<u64>,
    },
    /// Coprimality and recovery statistics for a hidden period.
    Simulate {
        /// Hidden period.
        #[arg(long)]
        r: u64,
        /// Pair draws for the coprimality estimate.
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        /// Period bound used by the recovery runs (default: r).
        #[arg(long)]
        bound: Option<u64>,
        /// Ideal-sample probability as a rational, e.g. "81/100".
        #[arg(long, default_value = "1")]
        q: String,
        /// Full recovery trials (default: min(trials, 1000)).
        #[arg(long = "recovery-trials")]
        recovery_trials: Option<u64>,
        #[arg(long = "max-rounds", default_value_t = DEFAULT_MAX_ROUNDS)]
        max_rounds: u64,
    },
    /// Iteration statistics for plain reduction over random bases.
    Bench {
        /// Entry magnitude bound for the random bases.
        #[arg(long = "max-M", alias = "max-m", default_value_t = 1_000_000)]
        max_m: i64,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 2)]
        dim: usize,
    },
    /// Classical factoring trials against a composite.
    Factor {
        /// Composite to factor (desk scale).
        n: u64,
        #[arg(long, default_value_t = 1)]
        trials: u64,
        #[arg(long = "b-policy", value_enum, default_value_t = PolicyArg::N)]
        b_policy: PolicyArg,
        #[arg(long, default_value = "1")]
        q: String,
        #[arg(long, value_enum, default_value_t = RoundingArg::Random)]
        rounding: RoundingArg,
        #[arg(long = "max-rounds", default_value_t = DEFAULT_MAX_ROUNDS)]
        max_rounds: u64,
    },
}

fn parse_bigint(s: &str) -> Result<BigInt, String> {
    BigInt::from_str(s).map_err(|e| format!("{e}"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((doc, success)) => {
            if emit(&doc, cli.format).is_err() {
                return ExitCode::from(1);
            }
            if success {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::InvalidParameter(_) | Error::OutOfRange { .. } | Error::InvalidN { .. } => {
                    ExitCode::from(2)
                }
                _ => ExitCode::from(1),
            }
        }
    }
}

fn run(cli: &Cli) -> shorlat::Result<(Value, bool)> {
    match &cli.command {
        Command::Reduce {
            u,
            v,
            input,
            t_squared,
        } => run_reduce(u.as_deref(), v.as_deref(), input.as_deref(), t_squared.as_deref()),
        Command::Recover { x, y, bound, n } => run_recover(x, y, bound, n.as_ref()),
        Command::CfRecover {
            x,
            bound,
            n,
            unit,
            modulus,
        } => run_cf_recover(x, bound, n.as_ref(), *unit, *modulus),
        Command::Simulate {
            r,
            trials,
            bound,
            q,
            recovery_trials,
            max_rounds,
        } => run_simulate(cli, *r, *trials, *bound, q, *recovery_trials, *max_rounds),
        Command::Bench { max_m, trials, dim } => {
            let bench = reduction_bench(*trials, *dim, *max_m, cli.seed)?;
            let ok = bench.bound_violations == 0;
            let mut body = to_map(serde_json::to_value(&bench).expect("bench serializes"));
            body.insert("seed".into(), json!(cli.seed));
            Ok((envelope("bench", body), ok))
        }
        Command::Factor {
            n,
            trials,
            b_policy,
            q,
            rounding,
            max_rounds,
        } => run_factor(cli, *n, *trials, (*b_policy).into(), q, (*rounding).into(), *max_rounds),
    }
}

fn run_reduce(
    u: Option<&str>,
    v: Option<&str>,
    input: Option<&std::path::Path>,
    t_squared: Option<&str>,
) -> shorlat::Result<(Value, bool)> {
    let basis = if let (Some(u), Some(v)) = (u, v) {
        basis_from_str(&format!("{u}\n{v}\n"))?
    } else if let Some(path) = input {
        let text = if path.as_os_str() == "-" {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| Error::InvalidParameter(format!("cannot read stdin: {e}")))?;
            buf
        } else {
            std::fs::read_to_string(path)
                .map_err(|e| Error::InvalidParameter(format!("cannot read {}: {e}", path.display())))?
        };
        basis_from_str(&text)?
    } else {
        return Err(Error::InvalidParameter(
            "provide either --u/--v or --input".into(),
        ));
    };

    let tau = t_squared.map(parse_rational).transpose()?;
    let (reduced, trace) = match tau {
        Some(t) if t != BigRational::one() => gauss_reduce_t(&basis, &t)?,
        _ => gauss_reduce(&basis)?,
    };

    let mut body = Map::new();
    body.insert("input".into(), basis_to_json(&basis));
    body.insert("reduced".into(), basis_to_json(&reduced));
    body.insert(
        "shortest_norm_sq".into(),
        shorlat::io::bigint_to_json(&reduced.u().norm_sq()),
    );
    body.insert("trace".into(), trace_to_json(&trace));
    Ok((envelope("reduce", body), true))
}

fn run_recover(
    x: &BigInt,
    y: &BigInt,
    bound: &BigInt,
    n: Option<&BigInt>,
) -> shorlat::Result<(Value, bool)> {
    let params = make_params(bound, n)?;
    let outcome = recover_period(x, y, &params)?;
    let success = outcome.r_hat.is_some();
    let mut body = to_map(outcome_to_json(&outcome));
    body.insert("bound".into(), shorlat::io::bigint_to_json(&params.bound));
    body.insert("s".into(), shorlat::io::bigint_to_json(&params.s));
    body.insert("n".into(), shorlat::io::bigint_to_json(&params.n));
    Ok((envelope("recover", body), success))
}

fn run_cf_recover(
    x: &BigInt,
    bound: &BigInt,
    n: Option<&BigInt>,
    unit: Option<u64>,
    modulus: Option<u64>,
) -> shorlat::Result<(Value, bool)> {
    let params = make_params(bound, n)?;
    let verifier = unit.zip(modulus);
    let result = cf_recover(x, &params, |c| match verifier {
        Some((a, m)) => modpow(&BigInt::from(a), c, &BigInt::from(m))
            .map(|v| v.is_one())
            .unwrap_or(false),
        None => false,
    })?;

    let success = match verifier {
        Some(_) => result.accepted.is_some(),
        None => !result.candidates.is_empty(),
    };
    let mut body = Map::new();
    body.insert(
        "candidates".into(),
        Value::Array(
            result
                .candidates
                .iter()
                .map(shorlat::io::bigint_to_json)
                .collect(),
        ),
    );
    body.insert(
        "accepted".into(),
        result
            .accepted
            .as_ref()
            .map_or(Value::Null, shorlat::io::bigint_to_json),
    );
    body.insert("verified".into(), json!(verifier.is_some()));
    body.insert("n".into(), shorlat::io::bigint_to_json(&params.n));
    Ok((envelope("cf-recover", body), success))
}

fn run_simulate(
    cli: &Cli,
    r: u64,
    trials: u64,
    bound: Option<u64>,
    q: &str,
    recovery_trials: Option<u64>,
    max_rounds: u64,
) -> shorlat::Result<(Value, bool)> {
    if r < 1 {
        return Err(Error::InvalidParameter("r must be positive".into()));
    }
    let coprimality = coprimality_experiment(r, trials, cli.seed);
    if !cli.quiet {
        eprintln!(
            "coprime fraction over {} draws: {:.4} (+-{:.4})",
            trials, coprimality.fraction, coprimality.std_error
        );
    }

    let bound = bound.unwrap_or(r);
    let q = parse_rational(q)?;
    let config = SamplerConfig::new(RoundingMode::RandomPerSample, q, cli.seed)?;
    let recovery_trials = recovery_trials.unwrap_or_else(|| trials.min(1000));
    let recovery = recovery_experiment(r, bound, recovery_trials, &config, max_rounds)?;

    let mut body = Map::new();
    body.insert("seed".into(), json!(cli.seed));
    body.insert(
        "coprimality".into(),
        serde_json::to_value(&coprimality).expect("stats serialize"),
    );
    body.insert(
        "recovery".into(),
        serde_json::to_value(&recovery).expect("stats serialize"),
    );
    let ok = coprimality.fraction > 0.5;
    Ok((envelope("simulate", body), ok))
}

fn run_factor(
    cli: &Cli,
    n: u64,
    trials: u64,
    policy: BoundPolicy,
    q: &str,
    rounding: RoundingMode,
    max_rounds: u64,
) -> shorlat::Result<(Value, bool)> {
    let q = parse_rational(q)?;
    let config = SamplerConfig::new(rounding, q, cli.seed)?;
    let experiment = factor_experiment(n, trials, cli.seed, &config, policy, max_rounds)?;
    if !cli.quiet {
        eprintln!(
            "{}/{} trials produced a nontrivial factor",
            experiment.successes, experiment.trials
        );
    }
    let ok = experiment.successes > 0;
    let mut body = to_map(serde_json::to_value(&experiment).expect("experiment serializes"));
    body.insert("master_seed".into(), json!(cli.seed));
    Ok((envelope("factor", body), ok))
}

fn to_map(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("value".into(), other);
            m
        }
    }
}

/// CSV rendering: documents with a `records` array become one row per
/// record; anything else becomes a single row. Nested values are embedded
/// as JSON strings.
fn emit(doc: &Value, format: Format) -> std::io::Result<()> {
    match format {
        Format::Json => {
            println!("{}", serde_json::to_string_pretty(doc)?);
            Ok(())
        }
        Format::Csv => {
            let mut writer = csv::Writer::from_writer(std::io::stdout());
            let obj = doc.as_object().expect("documents are objects");
            if let Some(Value::Array(records)) = obj.get("records") {
                let mut keys: Vec<&String> = Vec::new();
                if let Some(Value::Object(first)) = records.first() {
                    keys = first.keys().collect();
                }
                writer.write_record(keys.iter().map(|k| k.as_str()))?;
                for rec in records {
                    let rec = rec.as_object().expect("records are objects");
                    writer.write_record(keys.iter().map(|k| cell(rec.get(k.as_str()))))?;
                }
            } else {
                writer.write_record(obj.keys().map(|k| k.as_str()))?;
                writer.write_record(obj.values().map(|v| cell(Some(v))))?;
            }
            writer.flush()
        }
    }
}

fn cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(Value::Bool(b)) => b.to_string(),
        Some(Value::Number(n)) => n.to_string(),
        Some(other) => other.to_string(),
    }
}
