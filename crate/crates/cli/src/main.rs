use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use numrad_core::approx::{self, ApproxProblem};
use numrad_core::certify::{self, Verdict};
use numrad_core::extend::{self, ExtendOptions, Subspace};
use numrad_core::radius::{self, Operator, RadiusOptions};
use numrad_core::space::{ScalarField, Space};
use numrad_core::Error;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "numrad", version, about = "Numerical radius, best approximation and minimal extensions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Clone)]
struct Common {
    /// Output format.
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    /// Active-set tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for randomized estimators.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Phase-grid resolution for complex enumerations.
    #[arg(long, global = true)]
    phase_resolution: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Numerical radius ‖T‖_w with its active pairs.
    Radius {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        op: PathBuf,
    },
    /// Sampled q-numerical radius.
    Qradius {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        op: PathBuf,
        #[arg(long)]
        q: f64,
    },
    /// Support points of the numerical range (CSV theta,re,im by default).
    RangeSamples {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        op: PathBuf,
        #[arg(long, default_value_t = 360)]
        samples: usize,
    },
    /// Best approximation in an affine operator family.
    Approx {
        #[arg(long)]
        problem: PathBuf,
    },
    /// Optimality certificate for a candidate L (exit 3 not optimal, 4 inconclusive).
    Certify {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        op: PathBuf,
    },
    /// Strong-unicity constant at L (the computed minimizer when --op is absent).
    Suba {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        op: Option<PathBuf>,
    },
    /// Minimal numerical-radius extension of A : V → V.
    Minext {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        subspace: PathBuf,
        #[arg(long)]
        op: PathBuf,
        /// Initial extension A₀ (defaults to A on V, zero on the orthogonal complement).
        #[arg(long)]
        a0: Option<PathBuf>,
    },
    /// Minimal numerical-radius projection onto V.
    Minproj {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        subspace: PathBuf,
    },
    /// Upper estimate of the numerical index.
    Index {
        #[arg(long)]
        space: PathBuf,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
    /// Reference constructions end to end; exit 0 only if all pass.
    Repro,
}

enum Failure {
    Input(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Core(Error::Capability(_)) => 2,
            Failure::Core(Error::Solver(_)) => 5,
            Failure::Core(_) => 1,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Failure::Input(_) => "input",
            Failure::Core(Error::Dimension { .. }) => "dimension",
            Failure::Core(Error::InvalidInput(_)) => "invalid_input",
            Failure::Core(Error::Degenerate(_)) => "degenerate",
            Failure::Core(Error::Precondition(_)) => "precondition",
            Failure::Core(Error::Capability(_)) => "capability",
            Failure::Core(Error::EmptyPairSet) => "empty_pair_set",
            Failure::Core(Error::Solver(_)) => "solver",
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Input(m) => m.clone(),
            Failure::Core(e) => e.to_string(),
        }
    }
}

struct Output {
    body: String,
    code: u8,
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_space(path: &Path) -> Result<Space, Failure> {
    Ok(Space::from_json(&read_json(path)?)?)
}

fn read_op(path: &Path, space: &Space) -> Result<Operator, Failure> {
    let op = Operator::from_json(&read_json(path)?)?;
    op.check(space)?;
    Ok(op)
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn csv(header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut out = format!("{header}\n");
    for r in rows {
        out.push_str(&r);
        out.push('\n');
    }
    out
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

fn validate(common: &Common) -> Result<(), Failure> {
    if common.phase_resolution == Some(0) {
        return Err(Failure::Input("--phase-resolution must be positive".into()));
    }
    if common.tol.is_some_and(|t| !(t.is_finite() && t > 0.0)) {
        return Err(Failure::Input("--tol must be a positive number".into()));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<Output, Failure> {
    let c = &cli.common;
    validate(c)?;
    let format = c.format.unwrap_or(match cli.command {
        Command::RangeSamples { .. } => Format::Csv,
        _ => Format::Json,
    });
    let ok = |body: String| Ok(Output { body, code: 0 });
    match &cli.command {
        Command::Radius { space, op } => {
            let s = read_space(space)?;
            let t = read_op(op, &s)?;
            let opts = RadiusOptions { tol: c.tol, phase_resolution: c.phase_resolution.unwrap_or(4), ..RadiusOptions::default() };
            let rep = radius::numerical_radius_opts(&s, &t, opts)?;
            ok(match format {
                Format::Json => pretty(&rep.to_json(!s.is_real())),
                Format::Csv => csv("value,method,tol,active", [format!(
                    "{},{},{},{}",
                    rep.value,
                    json!(rep.method).as_str().unwrap_or_default(),
                    rep.tol,
                    rep.active.len()
                )]),
            })
        }
        Command::Qradius { space, op, q } => {
            let s = read_space(space)?;
            let t = read_op(op, &s)?;
            let rep = radius::q_radius(&s, &t, *q, c.phase_resolution.unwrap_or(64))?;
            ok(match format {
                Format::Json => {
                    let mut v = rep.to_json(!s.is_real());
                    v["q"] = json!(q);
                    pretty(&v)
                }
                Format::Csv => csv("q,value,tol", [format!("{q},{},{}", rep.value, rep.tol)]),
            })
        }
        Command::RangeSamples { space, op, samples } => {
            let s = read_space(space)?;
            let t = read_op(op, &s)?;
            let pts = radius::range_support_points(&s, &t, *samples, c.phase_resolution.unwrap_or(16))?;
            ok(match format {
                Format::Csv => csv("theta,re,im", pts.iter().map(|(th, z)| format!("{th},{},{}", z.re, z.im))),
                Format::Json => pretty(&json!(pts.iter().map(|(th, z)| json!({"theta": th, "re": z.re, "im": z.im})).collect::<Vec<_>>())),
            })
        }
        Command::Approx { problem } => {
            let p = ApproxProblem::from_json(&read_json(problem)?, c.phase_resolution.unwrap_or(4))?;
            let sol = approx::solve(&p)?;
            let complex = p.space.field() == ScalarField::Complex;
            ok(match format {
                Format::Json => pretty(&sol.to_json(complex)),
                Format::Csv => csv(
                    "value,unique,coefficients",
                    [format!("{},{},{}", sol.value, json!(sol.unique).as_str().unwrap_or_default(), join(&sol.coeffs))],
                ),
            })
        }
        Command::Certify { problem, op } => {
            let p = ApproxProblem::from_json(&read_json(problem)?, c.phase_resolution.unwrap_or(4))?;
            let l = read_op(op, &p.space)?;
            let cert = certify::best_approx_certificate(&p, &l, c.tol)?;
            let cert = if cert.verdict == Verdict::Optimal { certify::caratheodory_reduce(&cert, p.family.len())? } else { cert };
            let code = match cert.verdict {
                Verdict::Optimal => 0,
                Verdict::NotOptimal => 3,
                Verdict::Inconclusive => 4,
            };
            let complex = p.space.field() == ScalarField::Complex;
            let body = match format {
                Format::Json => pretty(&cert.to_json(complex)),
                Format::Csv => csv(
                    "verdict,residual,k,value",
                    [format!("{},{},{},{}", json!(cert.verdict).as_str().unwrap_or_default(), cert.residual, cert.k, cert.value)],
                ),
            };
            Ok(Output { body, code })
        }
        Command::Suba { problem, op } => {
            let p = ApproxProblem::from_json(&read_json(problem)?, c.phase_resolution.unwrap_or(4))?;
            let l = match op {
                Some(path) => read_op(path, &p.space)?,
                None => approx::solve(&p)?.l,
            };
            let rep = certify::suba_constant(&p, &l, c.tol)?;
            let complex = p.space.field() == ScalarField::Complex;
            ok(match format {
                Format::Json => pretty(&rep.to_json(complex)),
                Format::Csv => csv(
                    "r,kind,witness",
                    [format!("{},{},{}", rep.r, json!(rep.kind).as_str().unwrap_or_default(), join(&rep.witness))],
                ),
            })
        }
        Command::Minext { space, subspace, op, a0 } => {
            let s = read_space(space)?;
            let v = Subspace::from_json(&read_json(subspace)?, s.dim())?;
            let a = Operator::from_json(&read_json(op)?)?;
            let a0 = a0.as_deref().map(|p| read_op(p, &s)).transpose()?;
            let opts = ExtendOptions { phase_resolution: c.phase_resolution.unwrap_or(4), ..ExtendOptions::default() };
            let res = extend::minimal_extension(&s, &v, &a, a0.as_ref(), opts)?;
            ok(extension_output(&res, format))
        }
        Command::Minproj { space, subspace } => {
            let s = read_space(space)?;
            let v = Subspace::from_json(&read_json(subspace)?, s.dim())?;
            let opts = ExtendOptions { phase_resolution: c.phase_resolution.unwrap_or(4), ..ExtendOptions::default() };
            let res = extend::minimal_projection(&s, &v, opts)?;
            ok(extension_output(&res, format))
        }
        Command::Index { space, trials } => {
            let s = read_space(space)?;
            let est = radius::numerical_index(&s, *trials, c.seed)?;
            ok(match format {
                Format::Json => pretty(&json!({
                    "value": est.value,
                    "candidates": est.candidates,
                    "seed": c.seed,
                    "witness": est.witness.to_json(!s.is_real()),
                })),
                Format::Csv => csv("value,candidates,seed", [format!("{},{},{}", est.value, est.candidates, c.seed)]),
            })
        }
        Command::Repro => {
            let rep = extend::reference_examples();
            let body = match format {
                Format::Json => pretty(&serde_json::to_value(&rep).expect("report serializes")),
                Format::Csv => {
                    let mut out = String::from("entry,check,expected,computed,tol,pass\n");
                    for e in &rep.entries {
                        if let Some(err) = &e.error {
                            let _ = writeln!(out, "{},error,,,,false # {}", e.name, err.replace(',', ";"));
                        }
                        for ch in &e.checks {
                            let _ = writeln!(out, "{},{},{},{},{},{}", e.name, ch.label, ch.expected, ch.computed, ch.tol, ch.pass);
                        }
                    }
                    out
                }
            };
            Ok(Output { body, code: if rep.pass { 0 } else { 4 } })
        }
    }
}

fn extension_output(res: &extend::ExtensionResult, format: Format) -> String {
    match format {
        Format::Json => pretty(&res.to_json()),
        Format::Csv => csv(
            "lambda_w,op_norm_a,radius_a,unique,suba_r",
            [format!(
                "{},{},{},{},{}",
                res.lambda_w,
                res.op_norm_a,
                res.radius_a,
                json!(res.unique).as_str().unwrap_or_default(),
                res.suba.as_ref().map(|s| s.r.to_string()).unwrap_or_default()
            )],
        ),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{}", out.body);
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("{}", json!({"error": f.kind(), "message": f.message()}));
            ExitCode::from(f.code())
        }
    }
}
