use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qharness::generator::{
    apply_generator_algebraic, apply_generator_fd, apply_generator_poly, apply_generator_quadrature,
    generator_q_minus_one, inputs_json, C2Function, GeneratorEvaluation,
};
use qharness::json::{polyseq_to_json, JsonScalar};
use qharness::measures::{classify_nu_with, NuOptions, OrthMeasure};
use qharness::process::{fd_ladder, transition_measure, TransitionSpec, FD_LADDER};
use qharness::scalar::parse_rational;
use qharness::solver::{generator_element, solve_h, verify_qcommutation};
use qharness::verify::{algebra_identities, commutation_checks, IdentityCheck};
use qharness::{Error, Polynomial, QHParams, Rational, RealScalar};

const SCHEMA: u32 = 1;

#[derive(Parser)]
#[command(name = "qharness", version, about = "Generators and orthogonality measures of quadratic harnesses")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    #[arg(long, global = true, default_value = "0", allow_hyphen_values = true)]
    eta: String,
    #[arg(long, global = true, default_value = "0", allow_hyphen_values = true)]
    theta: String,
    #[arg(long, global = true, default_value = "0", allow_hyphen_values = true)]
    tau: String,
    #[arg(long, global = true, default_value = "0", allow_hyphen_values = true)]
    q: String,
    /// Time of the generator, or the later time of a transition.
    #[arg(long, global = true, default_value = "1", allow_hyphen_values = true)]
    t: String,
    /// Coordinates checked or computed.
    #[arg(long, global = true, default_value_t = 12)]
    window: usize,
    /// Order of fallback Gauss rules.
    #[arg(long, global = true, default_value_t = 40)]
    order: usize,
    /// Float residual, agreement and truncation tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<String>,
    /// Compute in f64 instead of exact rationals.
    #[arg(long, global = true)]
    float: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Algebra identities and q-commutation residuals.
    Verify {
        /// Also run the algebra suite with this β.
        #[arg(long, allow_hyphen_values = true)]
        beta: Option<String>,
    },
    /// Solve for H and the generator element A.
    Solve,
    /// Orthogonality measure ν_{x,t} of the generator.
    Measure {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        /// Density samples on the support.
        #[arg(long, default_value_t = 0)]
        samples: usize,
    },
    /// A_t f(x) by every available route.
    Generator {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        /// Coefficients of f, constant term first, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
    },
    /// Transition law of X_t given X_s = x.
    Transition {
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
    /// Finite-difference ladder against the exact generator.
    Fdcheck {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
    },
}

enum CliError {
    /// Exit status 2.
    Usage(String),
    /// Exit status 1.
    Failure(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::ParameterRange(_) | Error::Precondition(_) => CliError::Usage(e.to_string()),
            _ => CliError::Failure(e.to_string()),
        }
    }
}

/// Validated run settings: `window >= 4`, `0 < tol <= 1e-2`.
struct RunConfig {
    window: usize,
    tol: f64,
    nu: NuOptions,
}

impl RunConfig {
    fn new(c: &Common) -> Result<Self, CliError> {
        if c.window < 4 {
            return Err(CliError::Usage(format!("--window must be at least 4, got {}", c.window)));
        }
        if !(c.tol > 0.0 && c.tol <= 1e-2) {
            return Err(CliError::Usage(format!("--tol must lie in (0, 1e-2], got {}", c.tol)));
        }
        if c.order == 0 {
            return Err(CliError::Usage("--order must be positive".into()));
        }
        let nu = NuOptions {
            order: c.order,
            tol: c.tol,
            ..NuOptions::default()
        };
        Ok(RunConfig {
            window: c.window,
            tol: c.tol,
            nu,
        })
    }
}

trait CliScalar: RealScalar + JsonScalar {
    const DOMAIN: &'static str;
    fn parse(s: &str) -> Option<Self>;
}

impl CliScalar for Rational {
    const DOMAIN: &'static str = "rational";
    fn parse(s: &str) -> Option<Self> {
        parse_rational(s)
    }
}

impl CliScalar for f64 {
    const DOMAIN: &'static str = "f64";
    fn parse(s: &str) -> Option<Self> {
        s.trim()
            .parse::<f64>()
            .ok()
            .or_else(|| parse_rational(s).map(|r| r.to_f64()))
            .filter(|v| v.is_finite())
    }
}

fn scalar<S: CliScalar>(name: &str, s: &str) -> Result<S, CliError> {
    S::parse(s).ok_or_else(|| CliError::Usage(format!("--{name}: cannot parse {s:?} as a {}", S::DOMAIN)))
}

fn params<S: CliScalar>(c: &Common) -> Result<QHParams<S>, CliError> {
    Ok(QHParams::new(
        scalar("eta", &c.eta)?,
        scalar("theta", &c.theta)?,
        scalar("tau", &c.tau)?,
        scalar("q", &c.q)?,
    )?)
}

fn polynomial<S: CliScalar>(s: &str) -> Result<Polynomial<S>, CliError> {
    let coeffs = s
        .split(',')
        .map(|c| scalar("poly", c))
        .collect::<Result<Vec<S>, _>>()?;
    Ok(Polynomial::new(coeffs))
}

/// Command result: the JSON document, an optional CSV table and the verdict.
struct Outcome {
    doc: Value,
    csv: Option<String>,
    ok: bool,
}

impl Outcome {
    fn passed(doc: Value, csv: Option<String>) -> Self {
        Outcome { doc, csv, ok: true }
    }
}

fn rule_csv(m: &OrthMeasure) -> String {
    let mut s = String::from("node,weight\n");
    for (y, w) in m.rule() {
        writeln!(s, "{y:.16e},{w:.16e}").unwrap();
    }
    s
}

fn check_rows<S: CliScalar>(suite: &str, checks: &[IdentityCheck], tol: f64) -> (Vec<Value>, bool) {
    let mut ok = true;
    let rows = checks
        .iter()
        .map(|c| {
            let pass = c.report.passes::<S>(tol);
            ok &= pass;
            let mut v = c.to_json();
            v["suite"] = json!(suite);
            v["pass"] = json!(pass);
            v
        })
        .collect();
    (rows, ok)
}

fn verify<S: CliScalar>(c: &Common, cfg: &RunConfig, beta: Option<&str>) -> Result<Outcome, CliError> {
    let p = params::<S>(c)?;
    let t: S = scalar("t", &c.t)?;
    let mut rows = Vec::new();
    let mut ok = true;
    if let Some(b) = beta {
        let beta: S = scalar("beta", b)?;
        let (r, pass) = check_rows::<S>("algebra", &algebra_identities(&beta, &p.q, cfg.window)?, cfg.tol);
        rows.extend(r);
        ok &= pass;
    }
    let (r, pass) = check_rows::<S>("commutation", &commutation_checks(&p, &t, cfg.window)?, cfg.tol);
    rows.extend(r);
    ok &= pass;
    let mut doc = json!({ "checks": rows, "pass": ok });
    if p.q.to_f64() == -1.0 {
        doc["note"] = json!("q = -1: every ν_{x,t} is the point mass at θ + η(t + τ) - x");
    }
    let mut csv = String::from("suite,identity,window,max_residual,exact_zero,pass\n");
    for r in doc["checks"].as_array().unwrap() {
        writeln!(
            csv,
            "{},\"{}\",{},{:.16e},{},{}",
            r["suite"].as_str().unwrap(),
            r["identity"].as_str().unwrap(),
            r["window"],
            r["max_residual"].as_f64().unwrap(),
            r["exact_zero"],
            r["pass"]
        )
        .unwrap();
    }
    Ok(Outcome { doc, csv: Some(csv), ok })
}

fn solve<S: CliScalar>(c: &Common, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = params::<S>(c)?;
    let t: S = scalar("t", &c.t)?;
    let h = solve_h(&p, &t, cfg.window)?;
    let a = generator_element(&p, &t, cfg.window)?;
    let report = verify_qcommutation(&h, &p, &t)?;
    let ok = report.passes::<S>(cfg.tol);
    let residual = |r: &qharness::ResidualReport| {
        json!({"window": r.window, "max_residual": r.max_abs, "exact_zero": r.exact_zero})
    };
    let doc = json!({
        "h": polyseq_to_json(&h),
        "generator": polyseq_to_json(&a),
        "equation": residual(&report.equation),
        "initial": residual(&report.initial),
        "pass": ok,
    });
    Ok(Outcome { doc, csv: None, ok })
}

fn density_samples(m: &OrthMeasure, n: usize) -> Value {
    let Some((a, b)) = m.density.as_ref().and(m.support()) else {
        return json!([]);
    };
    let pts: Vec<Value> = (0..n)
        .map(|i| {
            let y = a + (b - a) * (i as f64 + 0.5) / n as f64;
            json!([y, m.density_at(y)])
        })
        .collect();
    Value::Array(pts)
}

fn measure<S: CliScalar>(c: &Common, cfg: &RunConfig, x: &str, samples: usize) -> Result<Outcome, CliError> {
    let p = params::<S>(c)?;
    let t: S = scalar("t", &c.t)?;
    let x: S = scalar("x", x)?;
    let m = classify_nu_with(&p, &t, &x, &cfg.nu)?;
    let mut doc = inputs_json(&p, &t, &x, Value::Null);
    doc.as_object_mut().unwrap().remove("f");
    doc["measure"] = m.descriptor();
    if samples > 0 {
        doc["density_samples"] = density_samples(&m, samples);
    }
    Ok(Outcome::passed(doc, Some(rule_csv(&m))))
}

fn route_json<S: CliScalar>(r: &qharness::Result<GeneratorEvaluation<S>>, name: &str) -> Value {
    match r {
        Ok(e) => {
            let mut v = json!({
                "method": e.method,
                "value": e.value.to_json(),
                "value_f64": e.value.to_f64(),
                "error_estimate": e.error_estimate,
            });
            v["route"] = json!(name);
            v
        }
        Err(err) => json!({"route": name, "error": err.to_string()}),
    }
}

fn generator<S: CliScalar>(c: &Common, cfg: &RunConfig, x: &str, poly: &str) -> Result<Outcome, CliError> {
    let p = params::<S>(c)?;
    let t: S = scalar("t", &c.t)?;
    let x: S = scalar("x", x)?;
    let f: Polynomial<S> = polynomial(poly)?;
    let reference = apply_generator_algebraic(&p, &t, &x, &f)?;
    let r0 = reference.value.to_f64();
    let scale = r0.abs().max(1.0);

    let (pf, tf, xf) = (p.to_f64(), t.to_f64(), x.to_f64());
    let ff = f.map(RealScalar::to_f64);
    let mut routes = vec![
        ("algebraic", Ok(reference.clone())),
        ("moment_functional", apply_generator_poly(&p, &t, &x, &f)),
    ];
    let floats = vec![
        ("quadrature", apply_generator_quadrature(&pf, tf, xf, &ff, &cfg.nu)),
        ("finite_difference", apply_generator_fd(&p, &t, &x, &f).map(|(e, _)| e)),
    ];
    let mut rows: Vec<Value> = Vec::new();
    let mut ok = true;
    for (name, r) in routes.drain(..) {
        let mut v = route_json(&r, name);
        if let Ok(e) = &r {
            let agree = if S::INEXACT {
                (e.value.to_f64() - r0).abs() <= cfg.tol * scale
            } else {
                e.value == reference.value
            };
            ok &= agree;
            v["agrees"] = json!(agree);
        }
        rows.push(v);
    }
    let mut with_floats = floats;
    if pf.q == -1.0 {
        let d1 = ff.derivative();
        let d2 = d1.derivative();
        let (g, g1, g2) = (|y: f64| ff.eval(&y), |y: f64| d1.eval(&y), |y: f64| d2.eval(&y));
        let c2 = C2Function {
            g: &g,
            g_second: &g2,
            g_prime: Some(&g1),
            label: poly.to_string(),
        };
        with_floats.push(("closed_form_q_minus_one", generator_q_minus_one(&pf, tf, xf, &c2)));
    }
    for (name, r) in with_floats {
        let mut v = route_json(&r, name);
        if let Ok(e) = &r {
            let allowance = cfg.tol * scale + e.error_estimate;
            let agree = (e.value - r0).abs() <= allowance;
            ok &= agree;
            v["agrees"] = json!(agree);
            v["allowance"] = json!(allowance);
        }
        rows.push(v);
    }
    let mut csv = String::from("route,value,error_estimate,agrees\n");
    for r in &rows {
        match r.get("value_f64") {
            Some(v) => writeln!(
                csv,
                "{},{:.16e},{:.16e},{}",
                r["route"].as_str().unwrap(),
                v.as_f64().unwrap(),
                r["error_estimate"].as_f64().unwrap(),
                r["agrees"]
            ),
            None => writeln!(csv, "{},,,", r["route"].as_str().unwrap()),
        }
        .unwrap();
    }
    let mut doc = reference.inputs.clone();
    doc["routes"] = Value::Array(rows);
    doc["reference"] = reference.value.to_json();
    doc["agreement"] = json!(ok);
    Ok(Outcome { doc, csv: Some(csv), ok })
}

fn transition<S: CliScalar>(c: &Common, cfg: &RunConfig, s: &str, x: &str) -> Result<Outcome, CliError> {
    let p = params::<S>(c)?;
    let t: S = scalar("t", &c.t)?;
    let s: S = scalar("s", s)?;
    let x: S = scalar("x", x)?;
    let spec = TransitionSpec::new(p.clone(), s.clone(), t.clone(), x.clone())?;
    let m = transition_measure(&spec, &cfg.nu)?;
    let mut doc = inputs_json(&p, &t, &x, Value::Null);
    doc.as_object_mut().unwrap().remove("f");
    doc["s"] = s.to_json();
    doc["x_in_support"] = json!(spec.x_in_support());
    doc["bipoisson"] = spec
        .bipoisson_equivalent()
        .map_or(Value::Null, |(th, s1, t1)| json!({"theta": th.to_json(), "s": s1.to_json(), "t": t1.to_json()}));
    doc["measure"] = m.descriptor();
    Ok(Outcome::passed(doc, Some(rule_csv(&m))))
}

fn fdcheck<S: CliScalar>(c: &Common, cfg: &RunConfig, x: &str, poly: &str) -> Result<Outcome, CliError> {
    let p = params::<S>(c)?;
    let t: S = scalar("t", &c.t)?;
    let x: S = scalar("x", x)?;
    let f: Polynomial<S> = polynomial(poly)?;
    let reference = apply_generator_algebraic(&p, &t, &x, &f)?.value;
    let ladder = fd_ladder(&p, &t, &x, &f, FD_LADDER, Some(&reference))?;
    let scale = reference.to_f64().abs().max(1.0);
    let exact = ladder.steps.iter().all(|s| s.error.unwrap_or(f64::INFINITY) <= cfg.tol * scale);
    let first_order = ladder.observed_order.is_some_and(|o| (0.8..=1.2).contains(&o));
    let ok = exact || first_order;
    let mut csv = String::from("k,h,value,error\n");
    for s in &ladder.steps {
        writeln!(csv, "{},{:.16e},{:.16e},{:.16e}", s.k, s.h, s.value, s.error.unwrap_or(f64::NAN)).unwrap();
    }
    let mut doc = inputs_json(&p, &t, &x, f.to_json());
    doc["reference"] = reference.to_json();
    doc["ladder"] = serde_json::to_value(&ladder).expect("ladder serializes");
    doc["pass"] = json!(ok);
    Ok(Outcome { doc, csv: Some(csv), ok })
}

fn run<S: CliScalar>(cli: &Cli) -> Result<Outcome, CliError> {
    let c = &cli.common;
    let cfg = RunConfig::new(c)?;
    let (name, mut out) = match &cli.command {
        Command::Verify { beta } => ("verify", verify::<S>(c, &cfg, beta.as_deref())?),
        Command::Solve => ("solve", solve::<S>(c, &cfg)?),
        Command::Measure { x, samples } => ("measure", measure::<S>(c, &cfg, x, *samples)?),
        Command::Generator { x, poly } => ("generator", generator::<S>(c, &cfg, x, poly)?),
        Command::Transition { s, x } => ("transition", transition::<S>(c, &cfg, s, x)?),
        Command::Fdcheck { x, poly } => ("fdcheck", fdcheck::<S>(c, &cfg, x, poly)?),
    };
    out.doc["schema"] = json!(SCHEMA);
    out.doc["command"] = json!(name);
    out.doc["domain"] = json!(S::DOMAIN);
    Ok(out)
}

fn emit(c: &Common, out: &Outcome) -> Result<(), CliError> {
    let text = match c.format {
        Format::Json => serde_json::to_string_pretty(&out.doc).expect("JSON serializes") + "\n",
        Format::Csv => out
            .csv
            .clone()
            .ok_or_else(|| CliError::Usage("this command has no CSV output".into()))?,
    };
    match &c.out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Usage(format!("cannot write {path}: {e}"))),
        None => match std::io::stdout().lock().write_all(text.as_bytes()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Failure(format!("stdout: {e}"))),
            _ => Ok(()),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = if cli.common.float { run::<f64>(&cli) } else { run::<Rational>(&cli) };
    match result.and_then(|out| emit(&cli.common, &out).map(|()| out.ok)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Failure(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
