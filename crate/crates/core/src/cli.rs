//! Command-line front end. `run` is the whole program; the binary only wires
//! it to the process streams and exit code.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::angular::{classify, Verdict, ZERO_TOL};
use crate::certificates::{certificate_drift_check, small_beta_certificate};
use crate::error::Error;
use crate::exact::{beta_c, chi_exact, chi_exact_report, density, ExactModel};
use crate::pdmp::{simulate_chi_with, ChiConfig, SwitchedSystem};
use crate::planar::{bbm_criterion, expm2, is_hurwitz, Mat2};
use crate::products::{predicted_exponent, product_lyapunov, running_estimate, ProductVariant};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_NO_INPUT: i32 = 66;

#[derive(Parser, Debug)]
#[command(
    name = "switchstab",
    version,
    about = "Stability of planar randomly switched linear systems"
)]
struct Cli {
    /// System spec (JSON): {"A0", "A1", "lambda", "beta"} or {"family", "a", "b", "beta"}.
    #[arg(long, global = true)]
    spec: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file (CSV for grids, JSON otherwise).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 32)]
    replicas: usize,
    #[arg(long, global = true, default_value_t = 1e5)]
    horizon: f64,
    #[arg(long, global = true, default_value_t = 100_000)]
    steps: usize,
    /// `lo:hi:n` or `lo:hi:n:log`.
    #[arg(long = "beta-grid", global = true)]
    beta_grid: Option<String>,
    /// Overrides the spec's beta.
    #[arg(long, global = true)]
    beta: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate the hyperbolicity criterion and its λ-window.
    Check,
    /// Zero structure of the angular drifts and the ergodicity verdict.
    Classify,
    /// exp(tA0) and exp(tA1).
    Expm {
        #[arg(long, default_value_t = 1.0)]
        time: f64,
    },
    /// Monte Carlo estimate of the Lyapunov exponent.
    ChiMc {
        /// Initial angle; defaults to θ_+ + 0.1.
        #[arg(long)]
        theta0: Option<f64>,
        #[arg(long, default_value_t = 0)]
        i0: u8,
        #[arg(long = "burn-in", default_value_t = 0.0)]
        burn_in: f64,
    },
    /// Lyapunov exponent by quadrature (family specs).
    ChiExact,
    /// Critical rate where χ changes sign (family specs).
    BetaC {
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Invariant density on a grid (family specs), as CSV.
    Density {
        #[arg(long, default_value_t = 512)]
        grid: usize,
    },
    /// χ over a β-grid: quadrature (family specs) and Monte Carlo, as CSV.
    Sweep {
        #[arg(long, default_value_t = 0.0)]
        burn_in: f64,
    },
    /// Lyapunov exponent of the embedded-chain matrix products.
    Products {
        #[arg(long, value_enum, default_value_t = VariantArg::Both)]
        variant: VariantArg,
        /// Record the running estimate every this many steps in the CSV written to --out.
        #[arg(long, default_value_t = 1000)]
        every: usize,
    },
    /// Quadratic Lyapunov certificate β₁.
    Certificate {
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum VariantArg {
    Alternating,
    IidHalfsum,
    Both,
}

/// Parsed system spec.
#[derive(Debug, Clone)]
pub enum SystemSpec {
    Matrices {
        a0: Mat2,
        a1: Mat2,
        lam: f64,
        beta: Option<f64>,
    },
    Family {
        model: ExactModel,
        beta: Option<f64>,
    },
}

impl SystemSpec {
    fn matrices(&self) -> (Mat2, Mat2, f64) {
        match self {
            Self::Matrices { a0, a1, lam, .. } => (*a0, *a1, *lam),
            Self::Family { model, .. } => {
                let (a0, a1) = model.matrices();
                (a0, a1, 0.5)
            }
        }
    }

    fn beta(&self) -> Option<f64> {
        match self {
            Self::Matrices { beta, .. } | Self::Family { beta, .. } => *beta,
        }
    }

    fn model(&self) -> Option<ExactModel> {
        match self {
            Self::Family { model, .. } => Some(*model),
            Self::Matrices { .. } => None,
        }
    }
}

/// Failure of a command, mapped onto an exit code.
#[derive(Debug)]
enum CliError {
    Usage(String),
    NoInput(String),
    Precondition(String),
    Failure(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Quadrature(_) | Error::NumericalDegeneracy(_) => {
                CliError::Failure(e.to_string())
            }
            _ => CliError::Precondition(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failure(format!("i/o error: {e}"))
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn matrix_field(v: &Value, key: &str) -> CliResult<Mat2> {
    let rows: [[f64; 2]; 2] = serde_json::from_value(
        v.get(key)
            .cloned()
            .ok_or_else(|| CliError::NoInput(format!("spec is missing \"{key}\"")))?,
    )
    .map_err(|e| CliError::NoInput(format!("spec field \"{key}\" is not a 2x2 matrix: {e}")))?;
    Ok(Mat2::from_rows(rows))
}

fn number_field(v: &Value, key: &str) -> CliResult<Option<f64>> {
    match v.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(x) => x
            .as_f64()
            .map(Some)
            .ok_or_else(|| CliError::NoInput(format!("spec field \"{key}\" is not a number"))),
    }
}

/// Parse and validate a spec document.
pub fn parse_spec(text: &str) -> std::result::Result<SystemSpec, (i32, String)> {
    parse_spec_inner(text).map_err(|e| match e {
        CliError::NoInput(m) => (EXIT_NO_INPUT, m),
        CliError::Precondition(m) => (EXIT_PRECONDITION, m),
        CliError::Usage(m) => (EXIT_USAGE, m),
        CliError::Failure(m) => (EXIT_FAILURE, m),
    })
}

fn parse_spec_inner(text: &str) -> CliResult<SystemSpec> {
    let v: Value = serde_json::from_str(text)
        .map_err(|e| CliError::NoInput(format!("spec is not valid JSON: {e}")))?;
    if !v.is_object() {
        return Err(CliError::NoInput("spec must be a JSON object".into()));
    }
    let beta = number_field(&v, "beta")?;
    if let Some(b) = beta {
        if !(b >= 0.0 && b.is_finite()) {
            return Err(CliError::Precondition(format!(
                "beta = {b} must be nonnegative"
            )));
        }
    }
    if let Some(fam) = v.get("family") {
        let fam = fam
            .as_str()
            .ok_or_else(|| CliError::NoInput("\"family\" must be a string".into()))?;
        let b = number_field(&v, "b")?
            .ok_or_else(|| CliError::NoInput("spec is missing \"b\"".into()))?;
        let model = match fam {
            "rotations" => {
                let a = number_field(&v, "a")?
                    .ok_or_else(|| CliError::NoInput("spec is missing \"a\"".into()))?;
                ExactModel::rotations(a, b)?
            }
            "jordan" => ExactModel::jordan(b)?,
            other => return Err(CliError::NoInput(format!("unknown family \"{other}\""))),
        };
        return Ok(SystemSpec::Family { model, beta });
    }
    let a0 = matrix_field(&v, "A0")?;
    let a1 = matrix_field(&v, "A1")?;
    let lam = number_field(&v, "lambda")?.unwrap_or(0.5);
    for (m, name) in [(&a0, "A0"), (&a1, "A1")] {
        if !is_hurwitz(m) {
            return Err(CliError::Precondition(format!("{name} not Hurwitz")));
        }
    }
    if !(lam > 0.0 && lam < 1.0) {
        return Err(CliError::Precondition(format!(
            "lambda = {lam} must lie in (0, 1)"
        )));
    }
    Ok(SystemSpec::Matrices { a0, a1, lam, beta })
}

/// Parse `lo:hi:n` or `lo:hi:n:log` into a sorted grid.
pub fn parse_beta_grid(s: &str) -> std::result::Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 && !(parts.len() == 4 && parts[3] == "log") {
        return Err(format!("beta grid \"{s}\" is not lo:hi:n or lo:hi:n:log"));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| format!("bad grid lower bound \"{}\"", parts[0]))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| format!("bad grid upper bound \"{}\"", parts[1]))?;
    let n: usize = parts[2]
        .parse()
        .map_err(|_| format!("bad grid size \"{}\"", parts[2]))?;
    let log = parts.len() == 4;
    if n == 0 || !(lo <= hi) || !lo.is_finite() || !hi.is_finite() || lo < 0.0 {
        return Err(format!("beta grid \"{s}\" needs 0 <= lo <= hi and n >= 1"));
    }
    if log && lo <= 0.0 {
        return Err("a log grid needs lo > 0".into());
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..n)
        .map(|k| {
            let t = k as f64 / (n - 1) as f64;
            if log {
                (lo.ln() + t * (hi.ln() - lo.ln())).exp()
            } else {
                lo + t * (hi - lo)
            }
        })
        .collect())
}

struct Ctx<'a> {
    cli: &'a Cli,
    spec_text: Option<String>,
}

impl Ctx<'_> {
    fn spec(&self) -> CliResult<SystemSpec> {
        let text = self
            .spec_text
            .as_deref()
            .ok_or_else(|| CliError::Usage("this command needs --spec FILE".into()))?;
        parse_spec_inner(text)
    }

    fn beta(&self, spec: &SystemSpec) -> CliResult<f64> {
        self.cli
            .beta
            .or(spec.beta())
            .ok_or_else(|| CliError::Usage("no beta given (spec field \"beta\" or --beta)".into()))
    }

    fn grid(&self) -> CliResult<Option<Vec<f64>>> {
        self.cli
            .beta_grid
            .as_deref()
            .map(parse_beta_grid)
            .transpose()
            .map_err(CliError::Usage)
    }

    fn family(&self, spec: &SystemSpec) -> CliResult<ExactModel> {
        spec.model().ok_or_else(|| {
            CliError::Usage("this command needs a family spec (\"rotations\" or \"jordan\")".into())
        })
    }

    fn system(&self, spec: &SystemSpec, beta: f64) -> CliResult<SwitchedSystem> {
        let (a0, a1, lam) = spec.matrices();
        Ok(SwitchedSystem::new(a0, a1, lam, beta)?)
    }

    fn metadata(&self, command: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# command={command}");
        let _ = writeln!(s, "# seed={}", self.cli.seed);
        if let Some(t) = &self.spec_text {
            let compact: Value = serde_json::from_str(t).unwrap_or(Value::Null);
            let _ = writeln!(s, "# spec={compact}");
        }
        if let Some(b) = self.cli.beta {
            let _ = writeln!(s, "# beta={b}");
        }
        if let Some(g) = &self.cli.beta_grid {
            let _ = writeln!(s, "# beta_grid={g}");
        }
        s
    }
}

enum Output {
    Json(Value),
    Csv(String),
    /// JSON summary on stdout, CSV detail in `--out`.
    JsonAndCsv(Value, String),
}

fn json_f64(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

fn run_command(ctx: &Ctx, warn: &mut Vec<String>) -> CliResult<Output> {
    let cli = ctx.cli;
    match &cli.command {
        Command::Check => {
            let spec = ctx.spec()?;
            let (a0, a1, _) = spec.matrices();
            let r = bbm_criterion(&a0, &a1)?;
            Ok(Output::Json(json!({
                "holds": r.holds,
                "lhs": r.lhs,
                "rhs": r.rhs,
                "boundary": r.boundary,
                "lambda_window": r.lambda_window.map(|(lo, hi)| vec![lo, hi]),
            })))
        }
        Command::Classify => {
            let spec = ctx.spec()?;
            let (a0, a1, lam) = spec.matrices();
            let r = classify(&a0, &a1, lam, ZERO_TOL)?;
            Ok(Output::Json(
                serde_json::to_value(r).expect("report serializes"),
            ))
        }
        Command::Expm { time } => {
            let spec = ctx.spec()?;
            let (a0, a1, _) = spec.matrices();
            if !time.is_finite() {
                return Err(CliError::Precondition(format!(
                    "time = {time} must be finite"
                )));
            }
            Ok(Output::Json(json!({
                "t": time,
                "exp_A0": expm2(&a0, *time).rows(),
                "exp_A1": expm2(&a1, *time).rows(),
            })))
        }
        Command::ChiMc {
            theta0,
            i0,
            burn_in,
        } => {
            let spec = ctx.spec()?;
            let beta = ctx.beta(&spec)?;
            let sys = ctx.system(&spec, beta)?;
            if *i0 > 1 {
                return Err(CliError::Usage("--i0 must be 0 or 1".into()));
            }
            if let Ok(r) = classify(&sys.a0, &sys.a1, sys.lam, ZERO_TOL) {
                if r.verdict == Verdict::TwoRecurrentClasses {
                    warn.push(
                        "two recurrent classes: the estimate is conditional on the class the trajectory enters"
                            .into(),
                    );
                }
            }
            let th = theta0.unwrap_or_else(|| sys.default_initial_angle());
            let cfg = ChiConfig {
                horizon: cli.horizon,
                replicas: cli.replicas,
                seed: cli.seed,
                burn_in: *burn_in,
            };
            let e = simulate_chi_with(&sys, th, *i0, &cfg)?;
            Ok(Output::Json(json!({
                "chi": e.value,
                "std_error": e.std_error,
                "horizon": e.horizon,
                "burn_in": burn_in,
                "replicas": e.replicas,
                "seed": e.seed,
                "single_replica": e.single_replica,
                "beta": beta,
                "theta0": th,
                "i0": i0,
            })))
        }
        Command::ChiExact => {
            let spec = ctx.spec()?;
            let model = ctx.family(&spec)?;
            if let Some(grid) = ctx.grid()? {
                let mut s = ctx.metadata("chi-exact");
                s.push_str("beta,chi_exact,abs_error,method\n");
                for b in grid {
                    let r = chi_exact_report(&model, b)?;
                    let method = serde_json::to_value(r.method).expect("serializes");
                    let _ = writeln!(
                        s,
                        "{b},{},{},{}",
                        r.value,
                        r.abs_error,
                        method.as_str().unwrap_or("")
                    );
                }
                return Ok(Output::Csv(s));
            }
            let beta = ctx.beta(&spec)?;
            let r = chi_exact_report(&model, beta)?;
            let lim = model.chi_limits();
            Ok(Output::Json(json!({
                "beta": beta,
                "chi": r.value,
                "abs_error": r.abs_error,
                "method": r.method,
                "chi_at_zero": lim.at_zero,
                "chi_at_infinity": lim.at_infinity,
            })))
        }
        Command::BetaC { tol } => {
            let spec = ctx.spec()?;
            let model = ctx.family(&spec)?;
            let bc = beta_c(&model, *tol)?;
            Ok(Output::Json(json!({
                "beta_c": bc,
                "chi_at_beta_c": chi_exact(&model, bc)?,
                "tol": tol,
                "model": model,
            })))
        }
        Command::Density { grid } => {
            let spec = ctx.spec()?;
            let model = ctx.family(&spec)?;
            let beta = ctx.beta(&spec)?;
            let d = density(&model, beta, *grid)?;
            let mut s = ctx.metadata("density");
            let _ = writeln!(s, "# beta={beta}");
            let _ = writeln!(s, "# log_c_beta={}", d.log_c_beta);
            let _ = writeln!(s, "# total_mass={}", d.total_mass);
            s.push_str("theta,weight_i0,weight_i1\n");
            for (th, w) in d.theta.iter().zip(&d.weights) {
                let _ = writeln!(s, "{th},{},{}", w[0], w[1]);
            }
            Ok(Output::Csv(s))
        }
        Command::Sweep { burn_in } => {
            let spec = ctx.spec()?;
            let grid = ctx
                .grid()?
                .ok_or_else(|| CliError::Usage("sweep needs --beta-grid".into()))?;
            let model = spec.model();
            let mut s = ctx.metadata("sweep");
            let _ = writeln!(s, "# horizon={}", cli.horizon);
            let _ = writeln!(s, "# replicas={}", cli.replicas);
            let _ = writeln!(s, "# burn_in={burn_in}");
            s.push_str(if model.is_some() {
                "beta,chi_exact,chi_mc,chi_mc_stderr\n"
            } else {
                "beta,chi_mc,chi_mc_stderr\n"
            });
            for b in grid {
                let sys = ctx.system(&spec, b)?;
                let th = sys.default_initial_angle();
                let cfg = ChiConfig {
                    horizon: cli.horizon,
                    replicas: cli.replicas,
                    seed: cli.seed,
                    burn_in: *burn_in,
                };
                let e = simulate_chi_with(&sys, th, 0, &cfg)?;
                match model {
                    Some(m) => {
                        let _ =
                            writeln!(s, "{b},{},{},{}", chi_exact(&m, b)?, e.value, e.std_error);
                    }
                    None => {
                        let _ = writeln!(s, "{b},{},{}", e.value, e.std_error);
                    }
                }
            }
            Ok(Output::Csv(s))
        }
        Command::Products { variant, every } => {
            let spec = ctx.spec()?;
            let beta = ctx.beta(&spec)?;
            let sys = ctx.system(&spec, beta)?;
            let variants: Vec<ProductVariant> = match variant {
                VariantArg::Alternating => vec![ProductVariant::Alternating],
                VariantArg::IidHalfsum => vec![ProductVariant::IidHalfsum],
                VariantArg::Both => vec![ProductVariant::Alternating, ProductVariant::IidHalfsum],
            };
            let mut results = Vec::new();
            for v in &variants {
                let e = product_lyapunov(&sys, *v, cli.steps, cli.replicas, cli.seed)?;
                let predicted = match spec.model() {
                    Some(m) => {
                        let b = if *v == ProductVariant::Alternating {
                            beta
                        } else {
                            beta / 2.0
                        };
                        Some(predicted_exponent(chi_exact(&m, b)?, &sys))
                    }
                    None => None,
                };
                results.push(json!({
                    "variant": v.as_str(),
                    "value": e.value,
                    "std_error": e.std_error,
                    "steps": e.steps,
                    "replicas": e.replicas,
                    "seed": e.seed,
                    "predicted": predicted,
                }));
            }
            if cli.out.is_some() {
                let mut s = ctx.metadata("products");
                let _ = writeln!(s, "# steps={}", cli.steps);
                s.push_str("variant,k,estimate\n");
                for v in &variants {
                    for (k, est) in
                        running_estimate(&sys, *v, cli.steps, cli.seed, (*every).max(1))?
                    {
                        let _ = writeln!(s, "{},{k},{est}", v.as_str());
                    }
                }
                return Ok(Output::JsonAndCsv(
                    json!({ "beta": beta, "estimates": results }),
                    s,
                ));
            }
            Ok(Output::Json(json!({ "beta": beta, "estimates": results })))
        }
        Command::Certificate { samples } => {
            let spec = ctx.spec()?;
            let (a0, a1, lam) = spec.matrices();
            let c = small_beta_certificate(&a0, &a1, lam)?;
            let audit_beta = if c.beta1.is_finite() {
                0.5 * c.beta1
            } else {
                1.0
            };
            let drift = certificate_drift_check(&c, &a0, &a1, lam, audit_beta, *samples);
            let mut out = json!({
                "rho": c.rho,
                "kappa0": c.kappa0,
                "kappa1": c.kappa1,
                "beta1": c.beta1.is_finite().then_some(c.beta1),
                "beta1_finite": c.beta1.is_finite(),
                "M0": c.m0.rows(),
                "M1": c.m1.rows(),
                "audit_beta": audit_beta,
                "audit_max_drift_ratio": drift,
            });
            if let Some(m) = spec.model() {
                if m.admits_transition() {
                    let bc = beta_c(&m, 1e-12)?;
                    out["beta_c"] = json!(bc);
                    out["beta1_over_beta_c"] = json_f64(c.beta1 / bc);
                }
            }
            Ok(Output::Json(out))
        }
    }
}

/// Run the program on `args` (including the program name). Returns the exit code.
pub fn run<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    let spec_text = match &cli.spec {
        Some(p) => match std::fs::read_to_string(p) {
            Ok(t) => Some(t),
            Err(e) => {
                let _ = writeln!(stderr, "switchstab: cannot read spec {}: {e}", p.display());
                return EXIT_NO_INPUT;
            }
        },
        None => None,
    };
    let ctx = Ctx {
        cli: &cli,
        spec_text,
    };
    let mut warnings = Vec::new();
    let result = run_command(&ctx, &mut warnings);
    for w in &warnings {
        let _ = writeln!(stderr, "switchstab: warning: {w}");
    }
    let emitted = result.and_then(|out| {
        let pretty = |v: &Value| serde_json::to_string_pretty(v).expect("json serializes") + "\n";
        match (out, &cli.out) {
            (Output::Json(v), p) => {
                let text = pretty(&v);
                stdout.write_all(text.as_bytes())?;
                if let Some(p) = p {
                    std::fs::write(p, &text)?;
                }
            }
            (Output::Csv(s), Some(p)) => std::fs::write(p, s)?,
            (Output::Csv(s), None) => stdout.write_all(s.as_bytes())?,
            (Output::JsonAndCsv(v, s), p) => {
                stdout.write_all(pretty(&v).as_bytes())?;
                if let Some(p) = p {
                    std::fs::write(p, s)?;
                }
            }
        }
        Ok(())
    });
    match emitted {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let (code, msg) = match e {
                CliError::Usage(m) => (EXIT_USAGE, m),
                CliError::NoInput(m) => (EXIT_NO_INPUT, m),
                CliError::Precondition(m) => (EXIT_PRECONDITION, m),
                CliError::Failure(m) => (EXIT_FAILURE, m),
            };
            let _ = writeln!(stderr, "switchstab: {msg}");
            code
        }
    }
}
