#![forbid(unsafe_code)]

mod input;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;
use svfkit_core::dimension::{
    dimension_drop, drop_grid_to_csv, lyapunov_dimension, lyapunov_exponents, DropOpts,
    DropVerdict, LyapunovMethod,
};
use svfkit_core::equilibrium::{classify3d, permutation_lift, wedge_abs_lift, ClassifyOpts, Route};
use svfkit_core::multilinear::exterior_power;
use svfkit_core::pressure::{curve_to_csv, pressure_estimate, sig17, Potential, PressureOpts};
use svfkit_core::structure::{detect_generalized_permutation, PermDetectOpts};
use svfkit_core::symbolic::{entropy_rate, BernoulliSpec, MeasureSpec, DEFAULT_WORD_BUDGET};
use svfkit_core::{Backend, Error};

const EXIT_PARSE: u8 = 2;
const EXIT_NUMERIC: u8 = 3;
const EXIT_INCONCLUSIVE: u8 = 4;

/// Singular-value-pressure toolkit for tuples of invertible matrices.
#[derive(Parser)]
#[command(name = "svfkit", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the equilibrium states of a 3x3 tuple at parameter s.
    Classify(JobArgs),
    /// Certified pressure bounds at one s, or a curve over a grid.
    Pressure(JobArgs),
    /// Affinity-dimension interval.
    Affdim(JobArgs),
    /// Explicit equilibrium states (classification payload).
    Equilibria(JobArgs),
    /// Lyapunov exponents and Lyapunov dimension of a Bernoulli measure.
    Lyapunov(JobArgs),
    /// Affinity-dimension drop when one matrix is removed.
    Drop(JobArgs),
    /// Nonnegative lift of a generalized-permutation tuple at s.
    Lift(JobArgs),
    /// Exterior powers of the tuple.
    Wedge(JobArgs),
}

#[derive(Args, Serialize)]
struct JobArgs {
    /// Tuple file (JSON; see the README for the schema).
    input: PathBuf,
    /// Singular-value-function parameter.
    #[arg(long)]
    s: Option<f64>,
    /// Grid a:b:step for curve commands.
    #[arg(long)]
    grid: Option<String>,
    /// Word-length ceiling for partition sums.
    #[arg(long, default_value_t = 8)]
    nmax: usize,
    /// Bisection tolerance on s.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Seed for any sampled computation (required for Monte Carlo).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: SVFKIT_THREADS, then all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// 1-based index of the matrix to remove (drop command).
    #[arg(long)]
    remove: Option<usize>,
    /// Exterior power / lift index.
    #[arg(long)]
    k: Option<usize>,
    /// Require the exact rational backend.
    #[arg(long)]
    exact: bool,
    /// Exit with code 4 instead of reporting an inconclusive verdict.
    #[arg(long)]
    strict: bool,
    /// Write the JSON report here instead of stdout (CSV sidecars are
    /// derived from this path).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Bernoulli probabilities "p1,p2,..." for the lyapunov command.
    #[arg(long)]
    probs: Option<String>,
    /// Lyapunov method: closed | words | mc.
    #[arg(long)]
    method: Option<String>,
    #[arg(long, default_value_t = 10_000)]
    mc_samples: usize,
    #[arg(long, default_value_t = 200)]
    mc_length: usize,
    /// Word budget for exhaustive enumerations.
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Serialize)]
struct ConfigEcho {
    input: String,
    backend: Backend,
    s: Option<f64>,
    grid: Option<String>,
    nmax: usize,
    tol: f64,
    seed: Option<u64>,
    threads: Option<usize>,
    remove: Option<usize>,
    k: Option<usize>,
    exact: bool,
    strict: bool,
    budget: u64,
}

#[derive(Serialize)]
struct Report<T: Serialize> {
    command: String,
    config: ConfigEcho,
    result: T,
    flags: Vec<String>,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn parse(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_PARSE,
            message: message.into(),
        }
    }

    fn inconclusive(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INCONCLUSIVE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Input(_) | Error::Domain(_) => EXIT_PARSE,
            Error::Numeric(_) | Error::Budget(_) => EXIT_NUMERIC,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, args) = match &cli.command {
        Command::Classify(a) => ("classify", a),
        Command::Pressure(a) => ("pressure", a),
        Command::Affdim(a) => ("affdim", a),
        Command::Equilibria(a) => ("equilibria", a),
        Command::Lyapunov(a) => ("lyapunov", a),
        Command::Drop(a) => ("drop", a),
        Command::Lift(a) => ("lift", a),
        Command::Wedge(a) => ("wedge", a),
    };
    let threads = args.threads.or_else(|| {
        std::env::var("SVFKIT_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    let pool = {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(t) = threads {
            builder = builder.num_threads(t.max(1));
        }
        match builder.build() {
            Ok(p) => p,
            Err(e) => {
                eprintln!("svfkit: cannot build thread pool: {e}");
                return ExitCode::from(EXIT_NUMERIC);
            }
        }
    };
    let started = std::time::Instant::now();
    let outcome = pool.install(|| run(name, args, threads));
    match outcome {
        Ok(()) => {
            eprintln!(
                "svfkit: {name} finished in {:.3}s",
                started.elapsed().as_secs_f64()
            );
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("svfkit: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(name: &str, args: &JobArgs, threads: Option<usize>) -> Result<(), Failure> {
    let tuple = input::parse_input(&args.input).map_err(Failure::parse)?;
    if args.exact && tuple.backend() != Backend::Exact {
        return Err(Failure::parse(
            "--exact requires a tuple file with \"scalars\": \"rational\"",
        ));
    }
    let budget = args.budget.unwrap_or(DEFAULT_WORD_BUDGET);
    let config = ConfigEcho {
        input: args.input.display().to_string(),
        backend: tuple.backend(),
        s: args.s,
        grid: args.grid.clone(),
        nmax: args.nmax,
        tol: args.tol,
        seed: args.seed,
        threads,
        remove: args.remove,
        k: args.k,
        exact: args.exact,
        strict: args.strict,
        budget,
    };
    let popts = PressureOpts {
        n_max: args.nmax,
        budget,
        tol: args.tol,
        ..Default::default()
    };
    match name {
        "classify" | "equilibria" => {
            let s = require_s(args)?;
            let opts = ClassifyOpts {
                pressure: popts,
                ..Default::default()
            };
            let report = classify3d(&tuple, s, &opts)?;
            let inconclusive = report.route == Route::BoundsOnly;
            emit(name, config, &report.summary(), args, Vec::new())?;
            if inconclusive && args.strict {
                return Err(Failure::inconclusive(
                    "classification is inconclusive (bounds only) under --strict",
                ));
            }
            Ok(())
        }
        "pressure" => {
            let mut flags = Vec::new();
            if let Some(grid_spec) = &args.grid {
                let grid = parse_grid(grid_spec, tuple.dim())?;
                let rows = svfkit_core::pressure::pressure_curve(&tuple, &grid, &popts)?;
                let csv = curve_to_csv(&rows);
                if let Some(path) = sidecar(&args.output, "curve.csv") {
                    std::fs::write(&path, &csv).map_err(|e| {
                        Failure::parse(format!("cannot write {}: {e}", path.display()))
                    })?;
                    flags.push(format!("curve csv written to {}", path.display()));
                }
                #[derive(Serialize)]
                struct CurveResult {
                    rows: Vec<svfkit_core::pressure::PressureRow>,
                    curve_csv: String,
                }
                emit(
                    name,
                    config,
                    &CurveResult {
                        rows,
                        curve_csv: csv,
                    },
                    args,
                    flags,
                )
            } else {
                let s = require_s(args)?;
                let est = pressure_estimate(&tuple, &Potential::svf(s), &popts)?;
                emit(name, config, &est, args, flags)
            }
        }
        "affdim" => {
            let interval = svfkit_core::equilibrium::affinity_dimension_auto(
                &tuple,
                &popts,
                &PermDetectOpts::default(),
            )?;
            let mut flags = Vec::new();
            if !interval.certified {
                flags.push(
                    "tuple is not contractive: strict pressure decrease not certified".into(),
                );
            }
            let inconclusive = !interval.certified;
            emit(name, config, &interval, args, flags)?;
            if inconclusive && args.strict {
                return Err(Failure::inconclusive(
                    "affinity dimension not certified under --strict",
                ));
            }
            Ok(())
        }
        "lyapunov" => {
            let measure = measure_from_args(args, tuple.count())?;
            let method = lyapunov_method_from_args(args)?;
            let spectrum = lyapunov_exponents(&tuple, &measure, &method, budget)?;
            let entropy = entropy_rate(&measure, args.nmax.max(1), budget, args.seed.unwrap_or(0))?;
            let dim = lyapunov_dimension(entropy.value, &spectrum, tuple.dim());
            #[derive(Serialize)]
            struct LyapunovResult {
                spectrum: svfkit_core::dimension::LyapunovSpectrum,
                entropy: svfkit_core::symbolic::EntropyEstimate,
                lyapunov_dimension: svfkit_core::dimension::LyapunovDimension,
            }
            emit(
                name,
                config,
                &LyapunovResult {
                    spectrum,
                    entropy,
                    lyapunov_dimension: dim,
                },
                args,
                Vec::new(),
            )
        }
        "drop" => {
            let remove = args
                .remove
                .ok_or_else(|| Failure::parse("drop needs --remove <index> (1-based)"))?;
            if remove == 0 || remove > tuple.count() {
                return Err(Failure::parse(format!(
                    "--remove {remove} out of range 1..={}",
                    tuple.count()
                )));
            }
            let opts = DropOpts {
                pressure: popts,
                ..Default::default()
            };
            let report = dimension_drop(&tuple, remove - 1, &opts)?;
            let csv = drop_grid_to_csv(&report.grid);
            let mut flags = Vec::new();
            if let Some(path) = sidecar(&args.output, "gaps.csv") {
                std::fs::write(&path, &csv)
                    .map_err(|e| Failure::parse(format!("cannot write {}: {e}", path.display())))?;
                flags.push(format!("gap csv written to {}", path.display()));
            }
            #[derive(Serialize)]
            struct DropResult {
                drop: svfkit_core::dimension::DropReport,
                gaps_csv: String,
            }
            let inconclusive = report.verdict == DropVerdict::Inconclusive;
            emit(
                name,
                config,
                &DropResult {
                    drop: report,
                    gaps_csv: csv,
                },
                args,
                flags,
            )?;
            if inconclusive && args.strict {
                return Err(Failure::inconclusive(
                    "dimension-drop verdict is inconclusive under --strict",
                ));
            }
            Ok(())
        }
        "lift" => {
            let s = require_s(args)?;
            let form = detect_generalized_permutation(&tuple, &PermDetectOpts::default())?
                .ok_or_else(|| {
                    Failure::parse("lift needs a generalized permutation tuple (none detected)")
                })?;
            let lift = if (s - s.round()).abs() < f64::EPSILON && s.round() >= 1.0 {
                wedge_abs_lift(&form, s.round() as usize)?
            } else {
                let k = args.k.unwrap_or(s.floor() as usize);
                permutation_lift(&form, s, k)?
            };
            #[derive(Serialize)]
            struct LiftResult {
                dimension: usize,
                labels: Vec<String>,
                matrices: Vec<Vec<Vec<String>>>,
                basis: Vec<Vec<String>>,
            }
            let matrices = lift
                .mats
                .iter()
                .map(|m| {
                    (0..m.dim())
                        .map(|i| (0..m.dim()).map(|j| sig17(m[(i, j)])).collect())
                        .collect()
                })
                .collect();
            let labels = lift
                .labels
                .iter()
                .map(|(combo, extra)| {
                    let set: Vec<String> = combo.iter().map(|c| (c + 1).to_string()).collect();
                    if *extra == usize::MAX {
                        format!("{{{}}}", set.join(","))
                    } else {
                        format!("({{{}}},{})", set.join(","), extra + 1)
                    }
                })
                .collect();
            let basis = (0..form.basis_f.dim())
                .map(|i| {
                    (0..form.basis_f.dim())
                        .map(|j| sig17(form.basis_f[(i, j)]))
                        .collect()
                })
                .collect();
            emit(
                name,
                config,
                &LiftResult {
                    dimension: lift.dim(),
                    labels,
                    matrices,
                    basis,
                },
                args,
                Vec::new(),
            )
        }
        "wedge" => {
            let k = args
                .k
                .ok_or_else(|| Failure::parse("wedge needs --k <power>"))?;
            #[derive(Serialize)]
            struct WedgeResult {
                k: usize,
                dimension: usize,
                matrices: Vec<Vec<Vec<String>>>,
            }
            let matrices: Vec<Vec<Vec<String>>> = match tuple.exact_mats() {
                Some(mats) => mats
                    .iter()
                    .map(|m| {
                        exterior_power(m, k).map(|w| {
                            (0..w.dim())
                                .map(|i| (0..w.dim()).map(|j| w[(i, j)].to_string()).collect())
                                .collect()
                        })
                    })
                    .collect::<Result<_, _>>()?,
                None => tuple
                    .float_mats()
                    .iter()
                    .map(|m| {
                        exterior_power(m, k).map(|w| {
                            (0..w.dim())
                                .map(|i| (0..w.dim()).map(|j| sig17(w[(i, j)])).collect())
                                .collect()
                        })
                    })
                    .collect::<Result<_, _>>()?,
            };
            let dimension = matrices[0].len();
            emit(
                name,
                config,
                &WedgeResult {
                    k,
                    dimension,
                    matrices,
                },
                args,
                Vec::new(),
            )
        }
        _ => unreachable!("clap owns the command list"),
    }
}

fn require_s(args: &JobArgs) -> Result<f64, Failure> {
    args.s
        .ok_or_else(|| Failure::parse("this command needs --s <value>"))
}

fn parse_grid(spec: &str, dim: usize) -> Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(Failure::parse(format!(
            "grid {spec:?} is not of the form a:b:step"
        )));
    }
    let a: f64 = parts[0]
        .parse()
        .map_err(|_| Failure::parse("bad grid start"))?;
    let b: f64 = parts[1]
        .parse()
        .map_err(|_| Failure::parse("bad grid end"))?;
    let step: f64 = parts[2]
        .parse()
        .map_err(|_| Failure::parse("bad grid step"))?;
    if !(step > 0.0 && b >= a) {
        return Err(Failure::parse("grid needs a <= b and step > 0"));
    }
    if a < 0.0 || b > dim as f64 {
        return Err(Failure::parse(format!("grid must stay within [0, {dim}]")));
    }
    let mut out = Vec::new();
    let mut s = a;
    while s <= b + 1e-12 {
        out.push(s.min(b));
        s += step;
    }
    Ok(out)
}

fn measure_from_args(args: &JobArgs, alphabet: usize) -> Result<MeasureSpec, Failure> {
    match &args.probs {
        Some(spec) => {
            let mut probs = Vec::new();
            for part in spec.split(',') {
                let part = part.trim();
                let value = if part.contains('/') {
                    let r = svfkit_core::parse_rational(part)?;
                    svfkit_core::rational_to_f64(&r)
                } else {
                    part.parse::<f64>()
                        .map_err(|_| Failure::parse(format!("bad probability {part:?}")))?
                };
                probs.push(value);
            }
            if probs.len() != alphabet {
                return Err(Failure::parse(format!(
                    "{} probabilities for {alphabet} matrices",
                    probs.len()
                )));
            }
            Ok(MeasureSpec::Bernoulli(BernoulliSpec::new(probs)?))
        }
        None => Ok(MeasureSpec::Bernoulli(BernoulliSpec::uniform(alphabet))),
    }
}

fn lyapunov_method_from_args(args: &JobArgs) -> Result<LyapunovMethod, Failure> {
    match args.method.as_deref().unwrap_or("words") {
        "closed" => Ok(LyapunovMethod::ClosedForm),
        "words" => Ok(LyapunovMethod::DeterministicWords {
            n: args.nmax.max(1),
        }),
        "mc" => {
            let seed = args.seed.ok_or_else(|| {
                Failure::parse("Monte Carlo needs --seed (no silent entropy source)")
            })?;
            Ok(LyapunovMethod::MonteCarlo {
                samples: args.mc_samples,
                length: args.mc_length,
                seed,
            })
        }
        other => Err(Failure::parse(format!(
            "unknown lyapunov method {other:?}; use closed | words | mc"
        ))),
    }
}

fn sidecar(output: &Option<PathBuf>, suffix: &str) -> Option<PathBuf> {
    output.as_ref().map(|p| {
        let mut stem = p.clone();
        stem.set_extension(suffix);
        stem
    })
}

fn emit<T: Serialize>(
    command: &str,
    config: ConfigEcho,
    result: &T,
    args: &JobArgs,
    flags: Vec<String>,
) -> Result<(), Failure> {
    let report = Report {
        command: command.to_string(),
        config,
        result,
        flags,
    };
    let json = serde_json::to_string_pretty(&report).map_err(|e| Failure {
        code: EXIT_NUMERIC,
        message: format!("serialization: {e}"),
    })?;
    match &args.output {
        Some(path) => std::fs::write(path, json + "\n")
            .map_err(|e| Failure::parse(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{json}");
            Ok(())
        }
    }
}
