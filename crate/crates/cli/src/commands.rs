use std::fs;
use std::path::Path;

use bura::dataio::{encode_filename, parse_tab, FileKind, TabFile};
use bura::rational::{check_interlacing, partial_fraction, reciprocal_transform, PartialFractions};
use bura::remez::{compute_bura, BuraResult, RemezConfig, RemezError, TargetParams};
use bura::solver::{
    solve_reaction, time_march, time_march_spectral, DeltaPolicy, Discrete, Method, Problem, SolveOptions, SolverError,
};
use bura::ura::{build_0ura, build_1ura, UraError, UraResult};
use bura::xnum::ExtReal;
use clap::{Args, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::output::{json_line, print_tab_summary, sci, write_tab, TabJson};
use crate::{CliConfig, CliError, Format, ParamArgs};

/// Spectral reference solutions are computed up to this many unknowns.
const REFERENCE_LIMIT: usize = 2000;

/// Accepts `0`, decimals like `1e-8` and codes `d0` .. `d9`.
pub fn parse_delta(s: &str) -> Result<f64, String> {
    let s = s.trim();
    if let Some(code) = s.strip_prefix('d').or_else(|| s.strip_prefix('D')) {
        let d: i32 = code.parse().map_err(|_| format!("bad delta code `{s}`"))?;
        return match d {
            0 => Ok(0.0),
            1..=9 => Ok(10f64.powi(-d)),
            _ => Err(format!("delta code `{s}` is outside d0..d9")),
        };
    }
    let v: f64 = s.parse().map_err(|_| format!("cannot read delta `{s}`"))?;
    if (0.0..1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("delta {v} must lie in [0, 1)"))
    }
}

fn remez_err(e: RemezError) -> CliError {
    match e {
        RemezError::InvalidParams(m) => CliError::Usage(m),
        other => CliError::Numeric(other.to_string()),
    }
}

fn ura_err(e: UraError) -> CliError {
    match e {
        UraError::BaseNotZero(_) | UraError::NegativeShift(_) => CliError::Usage(e.to_string()),
        other => CliError::Numeric(other.to_string()),
    }
}

fn solver_err(e: SolverError) -> CliError {
    match e {
        SolverError::InvalidAlpha(_)
        | SolverError::NegativeReaction(_)
        | SolverError::InvalidStep(_)
        | SolverError::DeltaTooLarge { .. }
        | SolverError::ShiftBelowBase { .. }
        | SolverError::DimensionMismatch { .. }
        | SolverError::BadLowerBound { .. } => CliError::Usage(e.to_string()),
        SolverError::Remez(r) => remez_err(r),
        SolverError::Ura(u) => ura_err(u),
        other => CliError::Numeric(other.to_string()),
    }
}

fn params(p: &ParamArgs, rc: &RemezConfig) -> Result<TargetParams, CliError> {
    TargetParams::new(p.q, p.delta, p.alpha, p.k, rc.precision).map_err(remez_err)
}

pub(crate) fn run_bura(params: &TargetParams, rc: &RemezConfig) -> Result<BuraResult, CliError> {
    compute_bura(params, rc).map_err(remez_err)
}

fn decomposition(r: &BuraResult) -> Result<PartialFractions, CliError> {
    partial_fraction(&r.r).map_err(|e| CliError::Numeric(e.to_string()))
}

#[derive(Serialize)]
struct ComputeJson {
    name: String,
    q: String,
    delta: String,
    alpha: String,
    k: usize,
    error: String,
    iterations: usize,
    verified: Option<bool>,
    extreme_points: Vec<String>,
    notes: Vec<String>,
    tab: TabJson,
}

pub fn compute(cfg: &CliConfig, p: &ParamArgs, write: bool) -> Result<(), CliError> {
    let rc = cfg.remez()?;
    let params = params(p, &rc)?;
    let name = encode_filename(&params, FileKind::BuraTab).ok();
    let r = run_bura(&params, &rc)?;
    let tab = TabFile::from_partial_fractions(&decomposition(&r)?);
    let stem = name.as_ref().map(|n| n.stem.clone()).unwrap_or_else(|| "bura".into());
    match cfg.format {
        Format::Json => json_line(&ComputeJson {
            name: stem.clone(),
            q: sci(&params.q),
            delta: sci(&params.delta),
            alpha: sci(&params.alpha),
            k: params.k,
            error: sci(&r.error_level),
            iterations: r.iterations,
            verified: r.verified,
            extreme_points: r.extreme_points.iter().map(sci).collect(),
            notes: r.notes.clone(),
            tab: TabJson::from(&tab),
        }),
        Format::Tab => {
            println!("{stem}  E = {}  ({})", sci(&r.error_level), r.error_level.to_short_sci(4));
            println!("iterations {}, certificate {}", r.iterations, verdict(r.verified));
            for note in &r.notes {
                println!("note: {note}");
            }
            print_tab_summary(&tab);
        }
    }
    if write {
        let Some(name) = name else {
            return Err(CliError::Usage("parameters have no file-name encoding; use --no-write".into()));
        };
        let path = write_tab(&cfg.output_dir, &name, &tab)?;
        if cfg.format == Format::Tab {
            println!("wrote {path}");
        }
    }
    Ok(())
}

fn verdict(v: Option<bool>) -> &'static str {
    match v {
        Some(true) => "passed",
        Some(false) => "FAILED",
        None => "not run",
    }
}

#[derive(Serialize)]
struct DecomposeJson {
    c0: String,
    poles: Vec<String>,
    coeffs: Vec<String>,
    c0_tilde: String,
    poles_tilde: Vec<String>,
    coeffs_tilde: Vec<String>,
    bura_signs: bool,
    interlacing: bool,
}

pub fn decompose(cfg: &CliConfig, input: &[String]) -> Result<(), CliError> {
    let rc = cfg.remez()?;
    let pf = match input {
        [file] => {
            let text = fs::read_to_string(Path::new(file))?;
            parse_tab(&text, rc.precision).map_err(|e| CliError::Usage(format!("{file}: {e}")))?.to_partial_fractions()
        }
        [q, d, a, k] => {
            let p = ParamArgs {
                q: q.parse().map_err(|_| CliError::Usage(format!("cannot read q `{q}`")))?,
                delta: parse_delta(d).map_err(CliError::Usage)?,
                alpha: a.parse().map_err(|_| CliError::Usage(format!("cannot read alpha `{a}`")))?,
                k: k.parse().map_err(|_| CliError::Usage(format!("cannot read k `{k}`")))?,
            };
            decomposition(&run_bura(&params(&p, &rc)?, &rc)?)?
        }
        _ => return Err(CliError::Usage("decompose takes a file or four parameters".into())),
    };
    let rf = reciprocal_transform(&pf).map_err(|e| CliError::Numeric(e.to_string()))?;
    let inter = check_interlacing(&pf.to_rational()).map_err(|e| CliError::Numeric(e.to_string()))?;
    let all = |v: &[(ExtReal, ExtReal)], first: bool| -> Vec<String> {
        v.iter().map(|(c, d)| sci(if first { c } else { d })).collect()
    };
    let out = DecomposeJson {
        c0: sci(&pf.c0),
        poles: all(&pf.terms, false),
        coeffs: all(&pf.terms, true),
        c0_tilde: sci(&rf.c0t),
        poles_tilde: all(&rf.terms, false),
        coeffs_tilde: all(&rf.terms, true),
        bura_signs: pf.has_bura_signs() && rf.has_positive_coefficients(),
        interlacing: inter.passed,
    };
    match cfg.format {
        Format::Json => json_line(&out),
        Format::Tab => {
            println!("c0  = {}    c~0 = {}", out.c0, out.c0_tilde);
            for j in 0..out.poles.len() {
                println!("d{:<2} = {}  c{:<2} = {}", j + 1, out.poles[j], j + 1, out.coeffs[j]);
            }
            for j in 0..out.poles_tilde.len() {
                println!("d~{:<2} = {}  c~{:<2} = {}", j + 1, out.poles_tilde[j], j + 1, out.coeffs_tilde[j]);
            }
            println!("signs c0 > 0, c_i < 0, c~_i > 0: {}", if out.bura_signs { "yes" } else { "NO" });
            println!("{}", inter.detail);
        }
    }
    Ok(())
}

fn num(s: &str, what: &str) -> Result<f64, CliError> {
    s.parse().map_err(|_| CliError::Usage(format!("cannot read {what} `{s}`")))
}

#[derive(Serialize)]
struct UraJson {
    name: String,
    error_sup: String,
    poles_negative: bool,
    tab: TabJson,
}

pub fn ura(cfg: &CliConfig, order: &str, values: &[String], write: bool) -> Result<(), CliError> {
    let rc = cfg.remez()?;
    let (q0, shift, rest) = match (order, values) {
        ("0", [q, rest @ ..]) if rest.len() == 3 => (0.0, num(q, "q")?, rest),
        ("1", [q0, q1, rest @ ..]) if rest.len() == 3 => (num(q0, "q0")?, num(q1, "q1")?, rest),
        _ => return Err(CliError::Usage("expected `ura 0 q delta alpha k` or `ura 1 q0 q1 delta alpha k`".into())),
    };
    let p = ParamArgs {
        q: q0,
        delta: parse_delta(&rest[0]).map_err(CliError::Usage)?,
        alpha: num(&rest[1], "alpha")?,
        k: rest[2].parse().map_err(|_| CliError::Usage(format!("cannot read k `{}`", rest[2])))?,
    };
    let base_params = params(&p, &rc)?;
    let base = run_bura(&base_params, &rc)?;
    let s = ExtReal::parse(&format!("{shift:e}"), rc.precision).map_err(|e| CliError::Usage(e.to_string()))?;
    let (u, kind): (UraResult, FileKind) = if order == "0" {
        (build_0ura(&base, &s).map_err(ura_err)?, FileKind::ZeroUra)
    } else {
        (build_1ura(&base, &s).map_err(ura_err)?, FileKind::OneUra { q0, q1: shift })
    };
    let name = encode_filename(&u.target(), kind).ok();
    let tab = TabFile::from_partial_fractions(&u.pf);
    let stem = name.as_ref().map(|n| n.stem.clone()).unwrap_or_else(|| "ura".into());
    match cfg.format {
        Format::Json => json_line(&UraJson {
            name: stem.clone(),
            error_sup: sci(&u.error_sup),
            poles_negative: u.poles_negative,
            tab: TabJson::from(&tab),
        }),
        Format::Tab => {
            println!("{stem}  sup error = {}  ({})", sci(&u.error_sup), u.error_sup.to_short_sci(4));
            println!("base error E = {}", base.error_level.to_short_sci(4));
            print_tab_summary(&tab);
        }
    }
    if write {
        let Some(name) = name else {
            return Err(CliError::Usage("parameters have no file-name encoding; use --no-write".into()));
        };
        let path = write_tab(&cfg.output_dir.join(name.folder), &name, &tab)?;
        if cfg.format == Format::Tab {
            println!("wrote {path}");
        }
    }
    Ok(())
}

#[derive(ValueEnum, Debug, Clone, Copy)]
pub enum ProblemArg {
    Fd,
    Fem,
    FemLumped,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
pub enum Rhs {
    Ones,
    Random,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[arg(value_enum)]
    problem: ProblemArg,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    k: usize,
    /// Interior nodes.
    #[arg(long)]
    n: usize,
    /// Reaction coefficient: solve `(A^alpha + b I) u = f`.
    #[arg(long, conflicts_with = "tau")]
    b: Option<f64>,
    /// Time step of an implicit Euler march for `u' + A^alpha u = 0`, `u(0) = f`.
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long, default_value_t = 10, requires = "tau")]
    steps: usize,
    /// `0`, `gap` (lambda_1/lambda_N), a decimal or a code `d6`.
    #[arg(long, default_value = "0")]
    delta: String,
    /// `bura`, `ura0` or `ura1:Q0`.
    #[arg(long, default_value = "bura")]
    method: String,
    #[arg(long, value_enum, default_value_t = Rhs::Ones)]
    rhs: Rhs,
}

fn method(s: &str) -> Result<Method, CliError> {
    match s {
        "bura" => Ok(Method::Bura),
        "ura0" => Ok(Method::ZeroUra),
        _ => match s.strip_prefix("ura1:") {
            Some(q0) => Ok(Method::OneUra { q0: num(q0, "q0")? }),
            None => Err(CliError::Usage(format!("unknown method `{s}`"))),
        },
    }
}

#[derive(Serialize)]
struct SolveJson {
    n: usize,
    lambda1: f64,
    lambda_n: f64,
    q: f64,
    delta: f64,
    k: usize,
    error_level: f64,
    solves: usize,
    norm_w: f64,
    bound: f64,
    measured_error: Option<f64>,
}

#[derive(Serialize)]
struct MarchJson {
    n: usize,
    steps: usize,
    q: f64,
    error_level: f64,
    norm_final: f64,
    bound_final: f64,
    measured_error_final: Option<f64>,
}

pub fn solve(cfg: &CliConfig, a: &SolveArgs) -> Result<(), CliError> {
    let rc = cfg.remez()?;
    let problem = match a.problem {
        ProblemArg::Fd => Problem::Fd,
        ProblemArg::Fem => Problem::FemConsistent,
        ProblemArg::FemLumped => Problem::FemLumped,
    };
    let op = Discrete::assemble(problem, &|_| 1.0, a.n).map_err(solver_err)?;
    let delta = match a.delta.as_str() {
        "gap" => DeltaPolicy::SpectralGap,
        d => match parse_delta(d).map_err(CliError::Usage)? {
            0.0 => DeltaPolicy::Zero,
            v => DeltaPolicy::Fixed(v),
        },
    };
    let method = method(&a.method)?;
    let f: Vec<f64> = match a.rhs {
        Rhs::Ones => vec![1.0; a.n],
        Rhs::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            (0..a.n).map(|_| rng.gen_range(-1.0..1.0)).collect()
        }
    };
    let reference = a.n <= REFERENCE_LIMIT;
    if let Some(tau) = a.tau {
        let m = time_march(&op, a.alpha, tau, a.steps, &f, &|_| None, a.k, delta, method, &rc).map_err(solver_err)?;
        let last = m.states.last().expect("initial state");
        let measured = if reference {
            let dec = op.spectral().map_err(solver_err)?;
            let exact = time_march_spectral(&dec, a.alpha, tau, a.steps, &f, &|_| None);
            let diff: Vec<f64> = exact[a.steps].iter().zip(last).map(|(x, y)| x - y).collect();
            Some(op.norm(&diff))
        } else {
            None
        };
        let out = MarchJson {
            n: a.n,
            steps: a.steps,
            q: m.approx.q,
            error_level: m.approx.error_level,
            norm_final: op.norm(last),
            bound_final: *m.error_bounds.last().expect("initial bound"),
            measured_error_final: measured,
        };
        match cfg.format {
            Format::Json => json_line(&out),
            Format::Tab => {
                println!("implicit Euler, {} steps of {tau:e}, q = {:.6e}", a.steps, out.q);
                println!("approximation error {:.4e}", out.error_level);
                println!("||u^n|| = {:.6e}, error bound {:.3e}", out.norm_final, out.bound_final);
                if let Some(e) = measured {
                    println!("error against spectral march {e:.3e}");
                }
            }
        }
        return Ok(());
    }
    let opts = SolveOptions { remez: rc, reference };
    let r = solve_reaction(&op, a.alpha, a.b.unwrap_or(0.0), a.k, delta, &f, method, &opts).map_err(solver_err)?;
    let out = SolveJson {
        n: a.n,
        lambda1: op.lambda1,
        lambda_n: op.lambda_n,
        q: r.q,
        delta: r.delta,
        k: r.k,
        error_level: r.error_level,
        solves: r.solves,
        norm_w: op.norm(&r.w),
        bound: r.residual_bound,
        measured_error: r.measured_error,
    };
    match cfg.format {
        Format::Json => json_line(&out),
        Format::Tab => {
            println!("lambda_1 = {:.10e}, lambda_N = {:.10e}", out.lambda1, out.lambda_n);
            println!(
                "q = {:.6e}, delta = {:.3e}, k = {}, approximation error {:.4e}",
                out.q, out.delta, out.k, out.error_level
            );
            println!("{} shifted solves, ||w|| = {:.10e}", out.solves, out.norm_w);
            println!("error bound {:.4e}", out.bound);
            if let Some(e) = out.measured_error {
                println!("error against spectral solution {e:.4e}");
            }
        }
    }
    if let Some(e) = out.measured_error {
        if e > out.bound * (1.0 + 1e-6) {
            return Err(CliError::Numeric(format!("measured error {e:.4e} exceeds the bound {:.4e}", out.bound)));
        }
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct GridArgs {
    #[arg(long, value_delimiter = ',', default_value = "0")]
    q: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0", value_parser = parse_delta)]
    delta: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,0.75")]
    alpha: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "3,4,5")]
    k: Vec<usize>,
}

#[derive(Serialize)]
struct GridJson {
    name: String,
    error: Option<String>,
    failure: Option<String>,
}

pub fn emit_tables(cfg: &CliConfig, g: &GridArgs) -> Result<(), CliError> {
    let rc = cfg.remez()?;
    let mut cases = Vec::new();
    for &q in &g.q {
        for &k in &g.k {
            for &d in &g.delta {
                for &a in &g.alpha {
                    let p = TargetParams::new(q, d, a, k, rc.precision).map_err(remez_err)?;
                    let name = encode_filename(&p, FileKind::BuraTab).map_err(|e| CliError::Usage(e.to_string()))?;
                    cases.push((p, name));
                }
            }
        }
    }
    let results: Vec<Result<(ExtReal, TabFile), String>> = cases
        .par_iter()
        .map(|(p, _)| {
            let r = compute_bura(p, &rc).map_err(|e| e.to_string())?;
            let pf = partial_fraction(&r.r).map_err(|e| e.to_string())?;
            Ok((r.error_level, TabFile::from_partial_fractions(&pf)))
        })
        .collect();
    let mut failures = 0;
    for ((_, name), res) in cases.iter().zip(results) {
        let line = match res {
            Ok((e, tab)) => {
                write_tab(&cfg.output_dir, name, &tab)?;
                GridJson { name: name.stem.clone(), error: Some(e.to_short_sci(4)), failure: None }
            }
            Err(msg) => {
                failures += 1;
                GridJson { name: name.stem.clone(), error: None, failure: Some(msg) }
            }
        };
        match cfg.format {
            Format::Json => json_line(&line),
            Format::Tab => match (&line.error, &line.failure) {
                (Some(e), _) => println!("{}  E = {e}", line.name),
                (_, Some(f)) => println!("{}  FAILED: {f}", line.name),
                _ => unreachable!("one of error and failure is set"),
            },
        }
    }
    if failures > 0 {
        return Err(CliError::Numeric(format!("{failures} of {} cases did not converge", cases.len())));
    }
    Ok(())
}
