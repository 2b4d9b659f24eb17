//! Best uniform rational approximation of `g(q, delta, alpha; t)` by the
//! Remez exchange.
//!
//! Each iteration solves the leveled node system, locates the extrema of the
//! resulting error and replaces the whole node set by `2k + 2` alternating
//! extrema. If alternation is lost the step falls back to a one-point
//! exchange. A run that fails from the default start is retried by
//! continuation in `delta` from a wide interval.

mod approximant;
mod extrema;
mod leveled;
mod nodes;
mod target;

pub use approximant::RationalApproximant;
pub use extrema::find_error_extrema;
pub use leveled::solve_leveled_system;
pub use nodes::init_nodes;
pub use target::{evaluate_target, TargetParams, MAX_DEGREE};

pub(crate) use extrema::error_at;
pub(crate) use leveled::solve_leveled_values;

use thiserror::Error;

use crate::xnum::{ExtReal, Precision};
use extrema::{error_extrema, Extremum};
use nodes::{select_alternating, single_point_exchange};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RemezError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("singular node system: {0}")]
    SingularSystem(String),
    #[error("leveling iteration failed: {0}")]
    NoLeveling(String),
    #[error("only {found} alternating extrema, {needed} required")]
    TooFewExtrema { found: usize, needed: usize },
    #[error("pole in the approximation interval: {0}")]
    PoleInInterval(String),
    #[error("equioscillation not achieved after {iterations} iterations: {diagnostic}")]
    Failed { iterations: usize, diagnostic: String },
}

/// Knobs of the exchange.
#[derive(Debug, Clone, PartialEq)]
pub struct RemezConfig {
    pub precision: Precision,
    pub max_exchange_iterations: usize,
    /// Relative spread `max|e| / min|e| - 1` over the extreme set at which
    /// the exchange stops.
    pub level_tol: f64,
    /// Sampling points per gap between consecutive nodes in the extremum
    /// search.
    pub grid_density: usize,
    /// Points of the log grid used to certify the final error level; `0`
    /// skips the check.
    pub certificate_points: usize,
}

impl Default for RemezConfig {
    fn default() -> Self {
        RemezConfig {
            precision: Precision::default(),
            max_exchange_iterations: 60,
            level_tol: 1e-10,
            grid_density: extrema::DEFAULT_DENSITY,
            certificate_points: 10_000,
        }
    }
}

/// A converged best approximation.
#[derive(Debug, Clone)]
pub struct BuraResult {
    pub params: TargetParams,
    pub r: RationalApproximant,
    /// `E_{q,delta,alpha,k}`, the largest `|r - g|` over the extreme set.
    pub error_level: ExtReal,
    /// The `2k + 2` alternation points, ascending from `delta` to `1`.
    pub extreme_points: Vec<ExtReal>,
    /// `r - g` at each extreme point.
    pub extreme_errors: Vec<ExtReal>,
    pub iterations: usize,
    pub converged: bool,
    /// Final `max|e| / min|e| - 1` over the extreme set.
    pub level_spread: f64,
    /// Whether the dense-grid certificate `max|r - g| <= E (1 + 1e-6)`
    /// passed. `None` when it was not run.
    pub verified: Option<bool>,
    /// Largest `|r - g|` seen on the certificate grid.
    pub certificate_max: Option<ExtReal>,
    /// How the run got there: fallbacks taken, unusual extreme sets.
    pub notes: Vec<String>,
}

impl BuraResult {
    /// Error level as a double.
    pub fn error(&self) -> f64 {
        self.error_level.to_f64()
    }
}

struct Converged {
    r: RationalApproximant,
    extrema: Vec<Extremum>,
    iterations: usize,
    spread: ExtReal,
}

fn spread_of(pts: &[Extremum]) -> ExtReal {
    let abs: Vec<ExtReal> = pts.iter().map(|p| p.e.abs()).collect();
    let max = abs.iter().cloned().reduce(ExtReal::max).expect("nonempty");
    let min = abs.into_iter().reduce(ExtReal::min).expect("nonempty");
    max / min - 1.0
}

/// Runs the exchange from `start` until the spread falls below `level_tol`,
/// then keeps going while it still shrinks quickly so that coefficients are
/// accurate well beyond the stopping tolerance.
fn exchange(params: &TargetParams, cfg: &RemezConfig, start: Vec<ExtReal>) -> Result<Converged, RemezError> {
    let prec = params.precision();
    let n = params.alternation_count();
    let tol = ExtReal::from_f64(cfg.level_tol, prec);
    let floor = ExtReal::exp10(-((prec.decimal_digits() / 3) as i32), prec);
    let values = |nodes: &[ExtReal]| nodes.iter().map(|t| evaluate_target(params, t)).collect::<Vec<_>>();

    let mut nodes = start;
    let mut warm: Option<Vec<ExtReal>> = None;
    let mut best: Option<Converged> = None;
    let mut last_diag = String::from("no iterations run");
    for it in 1..=cfg.max_exchange_iterations {
        let (r, _h) = solve_leveled_values(&nodes, &values(&nodes), params.k, warm.as_deref())?;
        let cands = error_extrema(&r, params, Some(&nodes), cfg.grid_density)?;
        let next = match select_alternating(&cands, n) {
            Some(sel) => sel,
            None => {
                let found = select_alternating(&cands, 0).map_or(0, |v| v.len());
                let worst = cands
                    .iter()
                    .max_by(|a, b| a.e.abs().total_cmp(&b.e.abs()))
                    .expect("endpoints are always candidates")
                    .clone();
                let errs: Vec<ExtReal> = nodes.iter().map(|t| error_at(&r, params, t)).collect();
                let swapped = single_point_exchange(&nodes, &errs, &worst);
                if swapped == nodes {
                    return Err(RemezError::TooFewExtrema { found, needed: n });
                }
                last_diag = format!("one-point exchange at iteration {it} ({found} alternating extrema)");
                warm = Some(swapped.iter().map(|t| r.denominator().eval(t)).collect());
                nodes = swapped;
                continue;
            }
        };
        let spread = spread_of(&next);
        last_diag = format!("level spread {:.3e} at iteration {it}", spread.to_f64());
        if let Some(b) = &best {
            if spread >= b.spread {
                // Past the accuracy the working precision supports.
                return Ok(best.take().expect("checked"));
            }
        }
        let next_nodes: Vec<ExtReal> = next.iter().map(|x| x.t.clone()).collect();
        warm = Some(next_nodes.iter().map(|t| r.denominator().eval(t)).collect());
        let done = spread <= tol;
        if done || best.is_some() {
            let stop = spread <= floor;
            best = Some(Converged { r, extrema: next, iterations: it, spread });
            if stop {
                return Ok(best.expect("just set"));
            }
        }
        nodes = next_nodes;
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(RemezError::SingularSystem("extreme points collapsed".into()));
        }
    }
    best.ok_or(RemezError::Failed { iterations: cfg.max_exchange_iterations, diagnostic: last_diag })
}

/// Continuation path for `delta`: `1e-2, 1e-3, ...` down to the target,
/// reusing each stage's extreme points as the next start.
fn continuation(params: &TargetParams, cfg: &RemezConfig) -> Result<Converged, RemezError> {
    let prec = params.precision();
    let target_exp = if params.delta.is_zero() { None } else { Some(params.delta.log10().to_f64().floor() as i32) };
    let last_exp = target_exp.unwrap_or(-3 * (params.k as i32 + 1));
    let mut stages: Vec<ExtReal> = (2..=-last_exp).map(|e| ExtReal::exp10(-e, prec)).collect();
    stages.retain(|d| *d > params.delta);
    stages.push(params.delta.clone());

    let mut start: Option<Vec<ExtReal>> = None;
    let mut total = 0;
    let mut out = None;
    for d in stages {
        let stage = params.with_delta(d.clone());
        let nodes = match start.take() {
            None => init_nodes(&stage),
            Some(mut prev) => {
                prev[0] = d.clone();
                prev
            }
        };
        let c = exchange(&stage, cfg, nodes)?;
        total += c.iterations;
        start = Some(c.extrema.iter().map(|x| x.t.clone()).collect());
        out = Some(c);
    }
    let mut c = out.expect("at least one stage");
    c.iterations = total;
    Ok(c)
}

/// Largest `|r - g|` on a log grid of `points` nodes over `[delta, 1]`.
/// When `delta = 0` the grid starts at `1e-12` or a decade below `lowest`,
/// whichever is smaller, and `t = 0` is checked too.
pub(crate) fn certificate_max(
    r: &RationalApproximant,
    params: &TargetParams,
    points: usize,
    lowest: Option<&ExtReal>,
) -> ExtReal {
    let prec = params.precision();
    let zero = ExtReal::zero(prec);
    let lo = if params.delta.is_zero() {
        let base = ExtReal::exp10(-12, prec);
        match lowest {
            Some(t) if !t.is_zero() => base.min(t / 10.0),
            _ => base,
        }
    } else {
        params.delta.clone()
    };
    let (la, lb) = (lo.ln(), zero.clone());
    let mut worst = if params.delta.is_zero() { error_at(r, params, &zero).abs() } else { zero };
    for i in 0..points {
        let s = ExtReal::from_ratio(i as i64, (points - 1) as i64, prec);
        let t = (&la + (&lb - &la) * s).exp();
        worst = worst.max(error_at(r, params, &t).abs());
    }
    worst
}

/// Computes the `(q, delta, alpha, k)` best uniform rational approximation.
///
/// Errors with [`RemezError::Failed`] when equioscillation is not reached
/// from either the direct start or the `delta` continuation path.
pub fn compute_bura(params: &TargetParams, cfg: &RemezConfig) -> Result<BuraResult, RemezError> {
    params.validate()?;
    let params = TargetParams::from_ext(
        params.q.with_precision(cfg.precision),
        params.delta.with_precision(cfg.precision),
        params.alpha.with_precision(cfg.precision),
        params.k,
    )?;
    let mut notes = Vec::new();
    let direct = exchange(&params, cfg, init_nodes(&params));
    let c = match direct {
        Ok(c) => c,
        Err(first) => {
            notes.push(format!("direct start failed ({first}); used delta continuation"));
            continuation(&params, cfg).map_err(|second| RemezError::Failed {
                iterations: cfg.max_exchange_iterations,
                diagnostic: format!("direct start: {first}; delta continuation: {second}"),
            })?
        }
    };
    let error_level = c.extrema.iter().map(|x| x.e.abs()).reduce(ExtReal::max).expect("nonempty");
    let lowest = c.extrema.iter().map(|x| &x.t).find(|t| !t.is_zero());
    if let Some(t) = lowest {
        if *t < 1e-12 {
            notes.push(format!("smallest interior extreme point {} lies below 1e-12", t.to_short_sci(4)));
        }
    }
    let (verified, cert) = if cfg.certificate_points >= 2 {
        let m = certificate_max(&c.r, &params, cfg.certificate_points, lowest);
        let ok = m <= &error_level * (1.0 + 1e-6);
        (Some(ok), Some(m))
    } else {
        (None, None)
    };
    Ok(BuraResult {
        extreme_points: c.extrema.iter().map(|x| x.t.clone()).collect(),
        extreme_errors: c.extrema.iter().map(|x| x.e.clone()).collect(),
        error_level,
        r: c.r,
        iterations: c.iterations,
        converged: true,
        level_spread: c.spread.to_f64(),
        verified,
        certificate_max: cert,
        notes,
        params,
    })
}
