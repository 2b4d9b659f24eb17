use bura::dataio::{decode_stem, reference_lookup_stem, reference_table, RefDatum};
use bura::rational::{partial_fraction, reciprocal_transform, PartialFractions, ReciprocalFractions};
use bura::remez::{compute_bura, BuraResult, RemezConfig, RemezError, TargetParams};
use bura::solver::{solve_fractional, DeltaPolicy, Discrete, Problem, SolveOptions};
use bura::ura::{build_0ura, build_1ura};
use bura::xnum::ExtReal;
use clap::ValueEnum;
use rayon::prelude::*;
use serde::Serialize;

use crate::output::json_line;
use crate::{CliConfig, CliError, Format};

/// Digits compared for the 26-digit coefficient listings. The `d8` listing
/// agrees with a converged run to about 15 digits only.
const LISTING_DIGITS: u32 = 12;

const BURA_TABLES: [&str; 8] = [
    "error_table",
    "extreme_points",
    "bura_poles",
    "bura_coeffs",
    "listing_bura_coeffs",
    "listing_bura_poles",
    "listing_recip_coeffs",
    "listing_recip_poles",
];

#[derive(ValueEnum, Debug, Clone, Copy)]
pub enum Subset {
    /// A handful of cases touching every table kind, plus a solver check.
    Smoke,
    /// Every parameter set in the bundled tables. Slow.
    Full,
}

const SMOKE: [&str; 5] = ["q000d0a25k3", "q001d0a25k3", "q000d0a25k7", "q000d8a50k6", "qq22d0a50k3"];

#[derive(Serialize)]
struct Check {
    case: String,
    table: String,
    passed: bool,
    detail: String,
}

impl Check {
    fn new(case: &str, table: &str, passed: bool, detail: impl Into<String>) -> Self {
        Check { case: case.into(), table: table.into(), passed, detail: detail.into() }
    }
}

pub fn run(cfg: &CliConfig, cases: &[String], subset: Option<Subset>) -> Result<(), CliError> {
    let rc = cfg.remez()?;
    let (stems, solver) = match (cases.is_empty(), subset) {
        (false, _) => (cases.to_vec(), false),
        (true, Some(Subset::Full)) => (all_stems(), true),
        (true, _) => (SMOKE.iter().map(|s| s.to_string()).collect(), true),
    };
    let mut checks: Vec<Check> = stems.par_iter().map(|s| check_stem(s, &rc)).flatten().collect();
    if solver {
        checks.push(solver_check(&rc));
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    for c in &checks {
        match cfg.format {
            Format::Json => json_line(c),
            Format::Tab => {
                println!("{} {} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.case, c.table, c.detail)
            }
        }
    }
    if cfg.format == Format::Tab {
        println!("{} checks, {failed} failed", checks.len());
    }
    if failed > 0 {
        return Err(CliError::Numeric(format!("{failed} verification checks failed")));
    }
    Ok(())
}

fn all_stems() -> Vec<String> {
    let mut stems: Vec<String> = BURA_TABLES
        .iter()
        .chain(&["ura0_poles", "ura0_coeffs", "ura1_coeffs"])
        .flat_map(|t| reference_table(t))
        .map(|d| d.stem.clone())
        .collect();
    stems.sort();
    stems.dedup();
    stems
}

fn bura(q: f64, d: f64, a: f64, k: usize, rc: &RemezConfig) -> Result<BuraResult, RemezError> {
    compute_bura(&TargetParams::new(q, d, a, k, rc.precision)?, rc)
}

fn check_stem(stem: &str, rc: &RemezConfig) -> Vec<Check> {
    if let Some(rest) = stem.strip_prefix("qq") {
        return check_one_ura(stem, rest, rc);
    }
    let Some((q, d, a, k)) = decode_stem(stem) else {
        return vec![Check::new(stem, "-", false, "not a parameter stem")];
    };
    let tables: Vec<&RefDatum> = BURA_TABLES.iter().filter_map(|t| reference_lookup_stem(t, stem).ok()).collect();
    let ura0: Vec<&RefDatum> =
        ["ura0_poles", "ura0_coeffs"].iter().filter_map(|t| reference_lookup_stem(t, stem).ok()).collect();
    if tables.is_empty() && ura0.is_empty() {
        return vec![Check::new(stem, "-", false, "no reference values for this case")];
    }
    let mut out = Vec::new();
    let mut best = None;
    if tables.iter().any(|t| t.table_id == "error_table" && t.is_missing()) {
        out.push(expected_failure(stem, bura(q, d, a, k, rc)));
    } else if !tables.is_empty() {
        match bura(q, d, a, k, rc).map_err(|e| e.to_string()).and_then(|r| {
            let pf = partial_fraction(&r.r).map_err(|e| e.to_string())?;
            let rf = reciprocal_transform(&pf).map_err(|e| e.to_string())?;
            Ok((r, pf, rf))
        }) {
            Ok((r, pf, rf)) => {
                out.extend(tables.iter().map(|t| compare_bura(stem, t, &r, &pf, &rf)));
                best = Some(r.error_level);
            }
            Err(e) => out.push(Check::new(stem, "compute", false, e)),
        }
    }
    if !ura0.is_empty() {
        out.extend(check_zero_ura(stem, q, d, a, k, &ura0, best.as_ref(), rc));
    }
    out
}

fn expected_failure(stem: &str, r: Result<BuraResult, RemezError>) -> Check {
    match r {
        Err(RemezError::Failed { iterations, .. }) => Check::new(
            stem,
            "error_table",
            true,
            format!("no equioscillation after {iterations} iterations, as tabulated"),
        ),
        Ok(r) if r.verified == Some(true) && !r.notes.is_empty() => Check::new(
            stem,
            "error_table",
            true,
            format!("tabulated as failed; converged with certificate here ({})", r.notes.join("; ")),
        ),
        Ok(_) => Check::new(stem, "error_table", false, "tabulated as failed but converged without diagnostic"),
        Err(e) => Check::new(stem, "error_table", false, format!("unexpected error: {e}")),
    }
}

/// Compares every present value of `datum`; `value(j)` gives the computed
/// counterpart of index `j`.
fn compare(stem: &str, datum: &RefDatum, digits: Option<u32>, value: impl Fn(usize) -> Option<ExtReal>) -> Check {
    let mut n = 0;
    for v in datum.values.iter().filter(|v| !v.is_missing()) {
        let Some(c) = value(v.index) else {
            return Check::new(stem, &datum.table_id, false, format!("no computed value for index {}", v.index));
        };
        let ok = match digits {
            Some(s) => v.matches_digits(&c, s),
            None => v.matches(&c),
        };
        if !ok {
            return Check::new(
                stem,
                &datum.table_id,
                false,
                format!("index {}: computed {}, reference {}", v.index, c.to_short_sci(8), v.text),
            );
        }
        n += 1;
    }
    Check::new(stem, &datum.table_id, true, format!("{n} values match"))
}

fn compare_bura(stem: &str, t: &RefDatum, r: &BuraResult, pf: &PartialFractions, rf: &ReciprocalFractions) -> Check {
    let coeff = |c0: &ExtReal, terms: &[(ExtReal, ExtReal)], j: usize| -> Option<ExtReal> {
        if j == 0 {
            Some(c0.clone())
        } else {
            terms.get(j - 1).map(|p| p.0.clone())
        }
    };
    let pole =
        |terms: &[(ExtReal, ExtReal)], j: usize| j.checked_sub(1).and_then(|i| terms.get(i)).map(|p| p.1.clone());
    let listing = Some(LISTING_DIGITS);
    match t.table_id.as_str() {
        "error_table" => compare(stem, t, None, |j| (j == 0).then(|| r.error_level.clone())),
        "extreme_points" => compare(stem, t, None, |j| j.checked_sub(1).and_then(|i| r.extreme_points.get(i)).cloned()),
        "bura_poles" => compare(stem, t, None, |j| pole(&pf.terms, j)),
        "bura_coeffs" => compare(stem, t, None, |j| coeff(&pf.c0, &pf.terms, j)),
        "listing_bura_poles" => compare(stem, t, listing, |j| pole(&pf.terms, j)),
        "listing_bura_coeffs" => compare(stem, t, listing, |j| coeff(&pf.c0, &pf.terms, j)),
        "listing_recip_poles" => compare(stem, t, listing, |j| pole(&rf.terms, j)),
        "listing_recip_coeffs" => compare(stem, t, listing, |j| coeff(&rf.c0t, &rf.terms, j)),
        other => Check::new(stem, other, false, "unknown table"),
    }
}

#[allow(clippy::too_many_arguments)]
fn check_zero_ura(
    stem: &str,
    q: f64,
    d: f64,
    a: f64,
    k: usize,
    tables: &[&RefDatum],
    best: Option<&ExtReal>,
    rc: &RemezConfig,
) -> Vec<Check> {
    let ura = bura(0.0, d, a, k, rc)
        .map_err(|e| e.to_string())
        .and_then(|b| build_0ura(&b, &ExtReal::from_f64(q, rc.precision)).map_err(|e| e.to_string()));
    let u = match ura {
        Ok(u) => u,
        Err(e) => return vec![Check::new(stem, "ura0", false, e)],
    };
    let mut out: Vec<Check> = tables
        .iter()
        .map(|t| match t.table_id.as_str() {
            "ura0_poles" => {
                compare(stem, t, None, |j| j.checked_sub(1).and_then(|i| u.pf.terms.get(i)).map(|p| p.1.clone()))
            }
            _ => compare(stem, t, None, |j| {
                if j == 0 {
                    Some(u.pf.c0.clone())
                } else {
                    u.pf.terms.get(j - 1).map(|p| p.0.clone())
                }
            }),
        })
        .collect();
    if let Some(e) = best {
        let lower = u.error_sup.clone() / ((1.0 + q) * (1.0 + q));
        let ok = lower < *e && *e < u.error_sup;
        out.push(Check::new(
            stem,
            "ura0_sandwich",
            ok,
            format!("{} < E = {} < {}", lower.to_short_sci(4), e.to_short_sci(4), u.error_sup.to_short_sci(4)),
        ));
    }
    out
}

fn check_one_ura(stem: &str, rest: &str, rc: &RemezConfig) -> Vec<Check> {
    let digits: Vec<f64> = rest.chars().take(2).filter_map(|c| c.to_digit(10)).map(|d| 100.0 * d as f64).collect();
    let (Some(&q0), Some(&q1), Some((_, d, a, k))) =
        (digits.first(), digits.get(1), decode_stem(&format!("q000{}", &rest[2.min(rest.len())..])))
    else {
        return vec![Check::new(stem, "-", false, "not a 1-URA stem")];
    };
    let Ok(datum) = reference_lookup_stem("ura1_coeffs", stem) else {
        return vec![Check::new(stem, "ura1_coeffs", false, "no reference values for this case")];
    };
    let ura = bura(q0, d, a, k, rc)
        .map_err(|e| e.to_string())
        .and_then(|b| build_1ura(&b, &ExtReal::from_f64(q1, rc.precision)).map_err(|e| e.to_string()));
    match ura {
        Ok(u) => vec![compare(stem, datum, None, |j| {
            if j == 0 {
                Some(u.pf.c0.clone())
            } else {
                u.pf.terms.get(j - 1).map(|p| p.0.clone())
            }
        })],
        Err(e) => vec![Check::new(stem, "ura1_coeffs", false, e)],
    }
}

/// `A^{-1/2} 1` for the 63-point finite-difference Laplacian against its
/// spectral solution.
fn solver_check(rc: &RemezConfig) -> Check {
    let n = 63;
    let run = || -> Result<(f64, f64), String> {
        let op = Discrete::assemble(Problem::Fd, &|_| 1.0, n).map_err(|e| e.to_string())?;
        let opts = SolveOptions { remez: rc.clone(), reference: true };
        let r = solve_fractional(&op, 0.5, 5, DeltaPolicy::Zero, &vec![1.0; n], &opts).map_err(|e| e.to_string())?;
        Ok((r.measured_error.unwrap_or(f64::INFINITY), r.residual_bound))
    };
    match run() {
        Ok((e, b)) => Check::new("fd63a50k5", "solver", e <= b * (1.0 + 1e-6), format!("error {e:.3e}, bound {b:.3e}")),
        Err(e) => Check::new("fd63a50k5", "solver", false, e),
    }
}
