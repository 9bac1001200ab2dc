//! `lpforge` command-line front end.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 on usage, I/O or
//! input errors.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use num_rational::BigRational;
use serde_json::{json, Value};

use lpforge_core::approx::{
    build_approximation, build_approximation_normalized, build_approximation_unit, verify_axiom_instance,
    ApproximationWitness, Verdict, VerifyOptions,
};
use lpforge_core::bm::{bm_distance_bound, bm_distance_bound_f64, BmOptions, PNorm};
use lpforge_core::convexity::{brute_force_modulus, certify_uniform_convexity, eta, ModulusOptions};
use lpforge_core::doc::{self, AnyWitness};
use lpforge_core::logic::{
    self, cantor_pair, classify_with, code_real, hat_type, is_admissible, is_small, majorant_m, parse_formula,
    parse_type, Classification, FiniteType,
};
use lpforge_core::scalar::Scalar;
use lpforge_core::tol::{self, Tolerances};
use lpforge_core::{Error, Exponent, MeasureSpace, SimpleFunction};

/// Accepted gap between the sampled modulus and the closed form before a sample counts
/// as a counterexample.
pub const MODULUS_SLACK: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(name = "lpforge", version, about = "Certified l^p approximations, convexity moduli and finite-type syntax")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Seed for every randomized step. LPFORGE_SEED takes precedence.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for parallel searches (results do not depend on it).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Write the JSON result here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Add a `timestamp` field to the JSON result.
    #[arg(long, global = true)]
    pub timestamp: bool,
    /// Absolute slack for bounds that pass through a p-th root.
    #[arg(long, global = true, default_value_t = tol::BOUND)]
    pub bound_tol: f64,
    /// Relative slack for floating comparisons.
    #[arg(long, global = true, default_value_t = tol::RELATIVE)]
    pub relative_tol: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Plain,
    Normalized,
    Unit,
    Axiom,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Measure space JSON: {"atoms": [...], "weights": [...]}.
    #[arg(long)]
    pub space: PathBuf,
    /// Function family JSON: an array of value arrays, or {"functions": [...]}.
    #[arg(long)]
    pub functions: PathBuf,
    /// Accuracy parameter N.
    #[arg(long = "N", short = 'N')]
    pub n_grid: u64,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    /// Use floating arithmetic even when exact arithmetic is possible.
    #[arg(long)]
    pub float: bool,
    /// Random coordinate vectors for the isometry check.
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build an approximation witness and verify it.
    Approximate {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value = "plain")]
        mode: ModeArg,
    },
    /// Re-verify a witness document.
    Certify {
        #[arg(long)]
        witness: PathBuf,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        /// Fail unless every clause is decided in exact arithmetic.
        #[arg(long)]
        exact: bool,
    },
    /// Check one instance of the quantitative approximation axiom.
    AxiomCheck {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Closed-form modulus of uniform convexity, optionally against a sampled search.
    Modulus {
        #[arg(long)]
        p: f64,
        #[arg(long, required_unless_present = "sweep")]
        eps: Option<f64>,
        /// Run the sampling search in addition to the closed form.
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        /// Write a CSV over ε = 0.1, 0.2, …, 1.9 to this file.
        #[arg(long)]
        sweep: Option<PathBuf>,
    },
    /// Replay the convexity argument on two functions.
    ConvexityCertify {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        x1: PathBuf,
        #[arg(long)]
        x2: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        c: f64,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 50)]
        trials: usize,
    },
    /// Upper bound on ‖L‖·‖L⁻¹‖ over ℓ^p for a square matrix or a witness basis map.
    BmBound {
        /// Matrix JSON: array of rows of rationals.
        #[arg(long, conflicts_with = "witness", required_unless_present = "witness")]
        matrix: Option<PathBuf>,
        /// Use the basis map of this witness.
        #[arg(long)]
        witness: Option<PathBuf>,
        /// Exponent, or `inf`.
        #[arg(long, default_value = "2")]
        p: String,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
    },
    /// Classify a formula.
    Classify {
        #[arg(long)]
        formula: String,
        /// Free variable declarations such as `x:X`.
        #[arg(long = "free")]
        free: Vec<String>,
    },
    /// Skolem normal form of a delta sentence.
    Skolemize {
        #[arg(long)]
        formula: String,
    },
    /// Parse a type and report its properties.
    Type {
        #[arg(long)]
        check: String,
    },
    /// Regularize a sequence into one with rate 2^{-n+3}.
    Cauchyfy {
        /// Either an array of numbers or {"space", "p", "points": [[...], ...]}.
        #[arg(long)]
        points: PathBuf,
        #[arg(long, default_value_t = 64)]
        horizon: usize,
    },
    /// Values of the majorant M(b) and checks against real codes.
    Majorant {
        #[arg(long)]
        b: u64,
        #[arg(long)]
        n: u32,
    },
}

/// Failure of a command: usage and input problems (exit 2).
#[derive(Debug)]
pub struct CliError(pub String);

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// What a command produced: a JSON document, whether its checks passed, and any
/// diagnostic for the error stream.
pub struct Outcome {
    pub document: Value,
    pub passed: bool,
    pub note: Option<String>,
}

impl Outcome {
    fn new(document: Value, passed: bool) -> Self {
        Outcome { document, passed, note: None }
    }
}

pub struct Context {
    pub seed: u64,
    pub tolerances: Tolerances,
}

fn read_json(path: &Path) -> CliResult<Value> {
    let text = fs::read_to_string(path).map_err(|e| CliError(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError(format!("{}: {e}", path.display())))
}

fn load_space(path: &Path) -> CliResult<Arc<MeasureSpace>> {
    Ok(Arc::new(MeasureSpace::from_json(&read_json(path)?)?))
}

fn verify_options(ctx: &Context, trials: usize, require_exact: bool) -> VerifyOptions {
    VerifyOptions { trials, seed: ctx.seed, require_exact, tolerances: ctx.tolerances }
}

fn verdict_note(v: &Verdict) -> Option<String> {
    v.first_failure.map(|c| {
        let detail = v.clause(c).map(|r| r.detail.clone()).unwrap_or_default();
        format!("failed clause {c}: {detail}")
    })
}

fn build<S: Scalar>(
    fs: &[SimpleFunction<S>],
    n: u64,
    p: Exponent,
    mode: ModeArg,
    options: &VerifyOptions,
) -> CliResult<(ApproximationWitness<S>, Option<Vec<SimpleFunction<S>>>, Verdict)> {
    let (w, orig) = match mode {
        ModeArg::Plain => (build_approximation(fs, n, p)?, None),
        ModeArg::Normalized => (build_approximation_normalized(fs, n, p)?, None),
        ModeArg::Unit => (build_approximation_unit(fs, n, p)?, None),
        ModeArg::Axiom => {
            let check = verify_axiom_instance(fs, n, p, options)?;
            return Ok((check.witness, Some(check.original_inputs), check.verdict));
        }
    };
    let verdict = lpforge_core::approx::verify_certificate(&w, options);
    Ok((w, orig, verdict))
}

fn approximate(ctx: &Context, input: &InputArgs, mode: ModeArg) -> CliResult<Outcome> {
    let p = Exponent::new(input.p)?;
    let space = load_space(&input.space)?;
    let fdoc = read_json(&input.functions)?;
    let exact = !input.float && p.as_integer().is_some() && doc::is_rational_json(&fdoc);
    let options = verify_options(ctx, input.trials, false);
    let (document, verdict) = if exact {
        let fs = doc::functions_from_json::<BigRational>(&space, &fdoc)?;
        let (w, orig, v) = build(&fs, input.n_grid, p, mode, &options)?;
        (doc::witness_to_json(&w, orig.as_deref(), Some(&v)), v)
    } else {
        let fs = doc::functions_from_json::<f64>(&space, &fdoc)?;
        let (w, orig, v) = build(&fs, input.n_grid, p, mode, &options)?;
        (doc::witness_to_json(&w, orig.as_deref(), Some(&v)), v)
    };
    Ok(Outcome { document, passed: verdict.passed, note: verdict_note(&verdict) })
}

fn certify(ctx: &Context, path: &Path, trials: usize, exact: bool) -> CliResult<Outcome> {
    let (w, embedded) = AnyWitness::from_json(&read_json(path)?)?;
    let verdict = w.verify(&verify_options(ctx, trials, exact));
    let document = json!({
        "schema": doc::SCHEMA_VERSION,
        "kind": "verdict",
        "arithmetic": match w { AnyWitness::Exact(_) => "exact", AnyWitness::Float(_) => "float" },
        "verdict": doc::verdict_json(&verdict),
        "embedded_verdict_passed": embedded.as_ref().map(|v| v.passed),
    });
    Ok(Outcome { document, passed: verdict.passed, note: verdict_note(&verdict) })
}

fn modulus_row(p: f64, eps: f64, oracle: bool, dim: usize, options: &ModulusOptions) -> CliResult<Value> {
    let eta = eta(eps, p)?;
    if !oracle {
        return Ok(json!({ "p": p, "eps": eps, "eta": eta }));
    }
    let est = brute_force_modulus(p, dim, eps, options)?;
    Ok(json!({
        "p": p,
        "eps": eps,
        "eta": eta,
        "dim": dim,
        "samples": options.samples,
        "oracle": est.oracle,
        "extremal": est.extremal,
        "accepted": est.accepted,
        "gap": est.oracle - eta,
        "valid": est.oracle >= eta - MODULUS_SLACK,
    }))
}

#[allow(clippy::too_many_arguments)]
fn modulus(
    ctx: &Context,
    p: f64,
    eps: Option<f64>,
    oracle: bool,
    dim: usize,
    samples: usize,
    sweep: Option<&Path>,
) -> CliResult<Outcome> {
    let options = ModulusOptions { samples, seed: ctx.seed, ..ModulusOptions::default() };
    let mut passed = true;
    let mut document = json!({ "schema": doc::SCHEMA_VERSION, "kind": "modulus" });
    if let Some(e) = eps {
        let row = modulus_row(p, e, oracle, dim, &options)?;
        passed &= row.get("valid").and_then(Value::as_bool).unwrap_or(true);
        document.as_object_mut().expect("object").extend(row.as_object().expect("object").clone());
    }
    if let Some(path) = sweep {
        let mut csv = String::from(if oracle { "p,eps,eta,oracle,extremal,gap\n" } else { "p,eps,eta\n" });
        let mut rows = Vec::new();
        for k in 1..=19 {
            let e = k as f64 / 10.0;
            let row = modulus_row(p, e, oracle, dim, &options)?;
            if oracle {
                passed &= row["valid"].as_bool().unwrap_or(false);
                writeln!(csv, "{p},{e},{},{},{},{}", row["eta"], row["oracle"], row["extremal"], row["gap"]).expect("string write");
            } else {
                writeln!(csv, "{p},{e},{}", row["eta"]).expect("string write");
            }
            rows.push(row);
        }
        fs::write(path, csv).map_err(|e| CliError(format!("{}: {e}", path.display())))?;
        document["sweep"] = Value::Array(rows);
    }
    let mut out = Outcome::new(document, passed);
    if !passed {
        out.note = Some("sampled modulus fell below the closed form".into());
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn convexity_certify(
    ctx: &Context,
    space: &Path,
    x1: &Path,
    x2: &Path,
    eps: f64,
    c: f64,
    p: f64,
    trials: usize,
) -> CliResult<Outcome> {
    let space = load_space(space)?;
    let f1 = doc::function_from_json::<f64>(&space, &read_json(x1)?)?;
    let f2 = doc::function_from_json::<f64>(&space, &read_json(x2)?)?;
    let cert = certify_uniform_convexity(&f1, &f2, eps, c, p, &verify_options(ctx, trials, false))?;
    let mut document = serde_json::to_value(&cert).map_err(|e| CliError(e.to_string()))?;
    document["schema"] = json!(doc::SCHEMA_VERSION);
    document["kind"] = json!("convexity-certificate");
    let note = cert.first_failure.as_ref().map(|s| format!("failed step {s}"));
    Ok(Outcome { document, passed: cert.passed, note })
}

fn parse_p_norm(text: &str) -> CliResult<PNorm> {
    match text.trim() {
        "inf" | "infinity" | "∞" => Ok(PNorm::Infinity),
        t => {
            let p: f64 = t.parse().map_err(|_| CliError(format!("invalid exponent {t:?}")))?;
            Ok(PNorm::new(p)?)
        }
    }
}

fn bm_bound(ctx: &Context, matrix: Option<&Path>, witness: Option<&Path>, p: &str, restarts: usize) -> CliResult<Outcome> {
    let pn = parse_p_norm(p)?;
    let options = BmOptions { restarts, seed: ctx.seed, ..BmOptions::default() };
    let (bound, source) = if let Some(path) = matrix {
        let rows = read_json(path)?;
        let rows = rows
            .as_array()
            .ok_or_else(|| CliError("matrix must be an array of rows".into()))?
            .iter()
            .map(|r| {
                r.as_array()
                    .ok_or_else(|| CliError("matrix rows must be arrays".into()))?
                    .iter()
                    .map(|v| BigRational::from_json(v).map_err(CliError::from))
                    .collect::<CliResult<Vec<_>>>()
            })
            .collect::<CliResult<Vec<_>>>()?;
        (bm_distance_bound(&rows, pn, &options)?, "matrix")
    } else {
        let path = witness.expect("clap requires one source");
        let (w, _) = AnyWitness::from_json(&read_json(path)?)?;
        let m = match &w {
            AnyWitness::Exact(w) => lpforge_core::approx::basis_map_matrix(&w.certificate)?,
            AnyWitness::Float(w) => lpforge_core::approx::basis_map_matrix(&w.certificate)?,
        };
        (bm_distance_bound_f64(&m, pn, &options)?, "witness-basis-map")
    };
    let mut document = serde_json::to_value(&bound).map_err(|e| CliError(e.to_string()))?;
    document["schema"] = json!(doc::SCHEMA_VERSION);
    document["kind"] = json!("bm-bound");
    document["source"] = json!(source);
    let passed = bound.value >= 1.0 && bound.lower <= bound.value * (1.0 + ctx.tolerances.relative);
    Ok(Outcome::new(document, passed))
}

fn parse_decl(text: &str) -> CliResult<(String, FiniteType)> {
    let (name, ty) = text
        .split_once(':')
        .ok_or_else(|| CliError(format!("free variable declaration {text:?} must look like name:type")))?;
    Ok((name.trim().to_owned(), parse_type(ty)?))
}

fn classify(formula: &str, free: &[String]) -> CliResult<Outcome> {
    let decls = free.iter().map(|d| parse_decl(d)).collect::<CliResult<Vec<_>>>()?;
    let f = parse_formula(formula)?;
    let class = classify_with(&f, &decls)?;
    Ok(Outcome::new(
        json!({
            "schema": doc::SCHEMA_VERSION,
            "kind": "classification",
            "formula": f.to_string(),
            "classification": class.to_string(),
        }),
        true,
    ))
}

fn skolemize(formula: &str) -> CliResult<Outcome> {
    let f = parse_formula(formula)?;
    let class = logic::classify(&f)?;
    let s = logic::skolemize(&f)?;
    let reparsed = parse_formula(&s.to_string())?;
    let s_class = logic::classify(&reparsed)?;
    let passed = reparsed == s && matches!(s_class, Classification::SkolemForm | Classification::ForallFormula);
    Ok(Outcome::new(
        json!({
            "schema": doc::SCHEMA_VERSION,
            "kind": "skolem-normal-form",
            "formula": f.to_string(),
            "classification": class.to_string(),
            "skolem_form": s.to_string(),
            "skolem_classification": s_class.to_string(),
            "round_trip": reparsed == s,
        }),
        passed,
    ))
}

fn type_check(text: &str) -> CliResult<Outcome> {
    let t = parse_type(text)?;
    Ok(Outcome::new(
        json!({
            "schema": doc::SCHEMA_VERSION,
            "kind": "type",
            "type": t.to_string(),
            "arrow": t.arrow_string(),
            "small": is_small(&t),
            "admissible": is_admissible(&t),
            "hat": hat_type(&t).to_string(),
        }),
        true,
    ))
}

fn cauchyfy(path: &Path, horizon: usize) -> CliResult<Outcome> {
    let v = read_json(path)?;
    let (document, violation) = match &v {
        Value::Array(xs) => {
            let xs = xs
                .iter()
                .map(|x| x.as_f64().ok_or_else(|| CliError("points must be numbers".into())))
                .collect::<CliResult<Vec<f64>>>()?;
            let d = |a: &f64, b: &f64| (a - b).abs();
            let h = logic::cauchy_hat(&xs, d, horizon);
            let violation = logic::cauchy::rate_violation(&h.points, d);
            (serde_json::to_value(&h).map_err(|e| CliError(e.to_string()))?, violation)
        }
        Value::Object(m) => {
            let space = Arc::new(MeasureSpace::from_json(
                m.get("space").ok_or_else(|| CliError("missing space".into()))?,
            )?);
            let p = Exponent::new(m.get("p").and_then(Value::as_f64).unwrap_or(2.0))?;
            let pts = doc::functions_from_json::<f64>(
                &space,
                m.get("points").ok_or_else(|| CliError("missing points".into()))?,
            )?;
            let d = |a: &SimpleFunction<f64>, b: &SimpleFunction<f64>| {
                a.sub(b).and_then(|f| f.lp_norm(p)).unwrap_or(f64::INFINITY)
            };
            let h = logic::cauchy_hat(&pts, d, horizon);
            let violation = logic::cauchy::rate_violation(&h.points, d);
            let document = json!({
                "points": h.points.iter().map(SimpleFunction::values_json).collect::<Vec<_>>(),
                "indices": h.indices,
                "first_failure": h.first_failure,
                "horizon": h.horizon,
            });
            (document, violation)
        }
        _ => return Err(CliError("points file must be an array or an object".into())),
    };
    let mut document = document;
    document["schema"] = json!(doc::SCHEMA_VERSION);
    document["kind"] = json!("cauchy-hat");
    document["rate_ratio"] = json!(violation);
    document["rate_holds"] = json!(violation <= 1.0);
    let mut out = Outcome::new(document, violation <= 1.0);
    if violation > 1.0 {
        out.note = Some(format!("rate bound exceeded by a factor {violation}"));
    }
    Ok(out)
}

fn majorant(b: u64, n: u32) -> CliResult<Outcome> {
    if b == 0 {
        return Err(CliError("b must be at least 1".into()));
    }
    let bb = BigUint::from(b);
    let prefix: Vec<BigUint> = (0..=n).map(|k| majorant_m(&bb, k)).collect();
    let monotone = prefix.windows(2).all(|w| w[0] < w[1]);
    // Codes of the reals 1, 1 + 1/4, …, b at every precision up to n.
    let mut dominates = true;
    for k in 0..=n {
        for q in 4..=4 * b {
            let r = BigRational::new(q.into(), 4u32.into());
            dominates &= code_real(&r, k) <= prefix[k as usize];
        }
    }
    let document = json!({
        "schema": doc::SCHEMA_VERSION,
        "kind": "majorant",
        "b": b,
        "n": n,
        "value": prefix[n as usize].to_string(),
        "prefix": prefix.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "pairing": "j(x,y) = (x+y)(x+y+1)/2 + y",
        "j_1_2": cantor_pair(&1u32.into(), &2u32.into()).to_string(),
        "monotone": monotone,
        "dominates_codes": dominates,
    });
    Ok(Outcome::new(document, monotone && dominates))
}

fn timestamp() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Runs one parsed command line.
pub fn dispatch(cli: &Cli, ctx: &Context) -> CliResult<Outcome> {
    match &cli.command {
        Command::Approximate { input, mode } => approximate(ctx, input, *mode),
        Command::Certify { witness, trials, exact } => certify(ctx, witness, *trials, *exact),
        Command::AxiomCheck { input } => approximate(ctx, input, ModeArg::Axiom),
        Command::Modulus { p, eps, oracle, dim, samples, sweep } => {
            modulus(ctx, *p, *eps, *oracle, *dim, *samples, sweep.as_deref())
        }
        Command::ConvexityCertify { space, x1, x2, eps, c, p, trials } => {
            convexity_certify(ctx, space, x1, x2, *eps, *c, *p, *trials)
        }
        Command::BmBound { matrix, witness, p, restarts } => {
            bm_bound(ctx, matrix.as_deref(), witness.as_deref(), p, *restarts)
        }
        Command::Classify { formula, free } => classify(formula, free),
        Command::Skolemize { formula } => skolemize(formula),
        Command::Type { check } => type_check(check),
        Command::Cauchyfy { points, horizon } => cauchyfy(points, *horizon),
        Command::Majorant { b, n } => majorant(*b, *n),
    }
}

/// Commands whose output depends on the seed; their documents record it.
fn is_seeded(command: &Command) -> bool {
    match command {
        Command::Approximate { .. }
        | Command::Certify { .. }
        | Command::AxiomCheck { .. }
        | Command::ConvexityCertify { .. }
        | Command::BmBound { .. } => true,
        Command::Modulus { oracle, .. } => *oracle,
        _ => false,
    }
}

fn context(global: &Global) -> CliResult<Context> {
    let seed = match std::env::var("LPFORGE_SEED") {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| CliError(format!("LPFORGE_SEED must be an unsigned integer, got {s:?}")))?,
        Err(_) => global.seed,
    };
    let tolerances = Tolerances { bound: global.bound_tol, relative: global.relative_tol };
    tolerances.validate()?;
    if let Some(j) = global.jobs {
        if j == 0 {
            return Err(CliError("--jobs must be positive".into()));
        }
        // A pool can only be installed once per process; later calls keep the first.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j).build_global();
    }
    Ok(Context { seed, tolerances })
}

/// Parses arguments, runs the command, writes the result, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = context(&cli.global).and_then(|ctx| {
        let mut o = dispatch(&cli, &ctx)?;
        if is_seeded(&cli.command) {
            o.document["seed"] = json!(ctx.seed);
        }
        Ok(o)
    });
    let mut outcome = match result {
        Ok(o) => o,
        Err(CliError(msg)) => {
            eprintln!("error: {msg}");
            return 2;
        }
    };
    if cli.global.timestamp {
        outcome.document["timestamp"] = json!(timestamp());
    }
    let text = doc::to_pretty(&outcome.document);
    let written = match &cli.global.out {
        Some(path) => fs::write(path, &text).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return 2;
    }
    if let Some(note) = &outcome.note {
        eprintln!("{note}");
    }
    if outcome.passed {
        0
    } else {
        1
    }
}
