//! Local extrema of the error `e(t) = r(t) - g(t)` on `[delta, 1]`.

use crate::xnum::{ExtReal, Precision};

use super::{RationalApproximant, RemezError, TargetParams};

/// Grid points per gap between consecutive hint nodes.
pub(crate) const DEFAULT_DENSITY: usize = 24;

/// Refinement stops once the bracket is this many decimal digits tight,
/// relative to its right end.
fn refine_digits(prec: Precision) -> i32 {
    (prec.decimal_digits() / 3) as i32
}

/// An extremum candidate and the error there.
#[derive(Debug, Clone)]
pub(crate) struct Extremum {
    pub t: ExtReal,
    pub e: ExtReal,
}

pub(crate) fn error_at(r: &RationalApproximant, params: &TargetParams, t: &ExtReal) -> ExtReal {
    r.eval(t) - super::evaluate_target(params, t)
}

fn error_slope(r: &RationalApproximant, params: &TargetParams, t: &ExtReal) -> ExtReal {
    let (_, dr) = r.eval_with_derivative(t);
    let (_, dg) = params.eval_with_derivative(t);
    dr - dg.expect("slope is only sampled at t > 0")
}

/// `n` points from `a` to `b` inclusive, log-spaced when `b / a > 3`.
fn spaced(a: &ExtReal, b: &ExtReal, n: usize) -> Vec<ExtReal> {
    let mut out = Vec::with_capacity(n);
    let geometric = !a.is_zero() && b / a > 3.0;
    let (la, lb) = if geometric { (a.ln(), b.ln()) } else { (a.clone(), b.clone()) };
    for i in 0..n {
        let s = ExtReal::from_ratio(i as i64, (n - 1) as i64, a.precision());
        let v = &la + (&lb - &la) * s;
        out.push(if geometric { v.exp() } else { v });
    }
    out
}

/// Positive sampling grid on `[max(delta, floor), 1]`, denser around the hint
/// nodes when given.
pub(crate) fn sample_grid(params: &TargetParams, hints: Option<&[ExtReal]>, density: usize) -> Vec<ExtReal> {
    let prec = params.precision();
    let one = ExtReal::one(prec);
    let k = params.k;
    let lo = if params.delta.is_zero() {
        // Reach well below the smallest positive node; the error of a
        // converged approximant is monotone between 0 and its first interior
        // extremum.
        let smallest = hints
            .and_then(|h| h.iter().find(|t| !t.is_zero()).cloned())
            .unwrap_or_else(|| ExtReal::exp10(-3 * (k as i32 + 1), prec));
        (smallest * ExtReal::exp10(-4, prec)).min(ExtReal::exp10(-3 * (k as i32 + 1) - 4, prec))
    } else {
        params.delta.clone()
    };
    let mut grid = spaced(&lo, &one, 40 * (k + 1));
    if let Some(h) = hints {
        let pos: Vec<&ExtReal> = h.iter().filter(|t| **t >= lo).collect();
        for w in pos.windows(2) {
            grid.extend(spaced(w[0], w[1], density + 1));
        }
    }
    grid.sort_by(|a, b| a.total_cmp(b));
    grid.dedup_by(|a, b| a == b);
    grid
}

/// Root of the error slope in `[a, b]` where it changes sign, by the Illinois
/// variant of regula falsi with a bisection safeguard.
fn refine(
    r: &RationalApproximant,
    params: &TargetParams,
    a: &ExtReal,
    b: &ExtReal,
    fa: &ExtReal,
    fb: &ExtReal,
) -> ExtReal {
    let prec = params.precision();
    let tight = ExtReal::exp10(-refine_digits(prec), prec);
    let (mut a, mut b, mut fa, mut fb) = (a.clone(), b.clone(), fa.clone(), fb.clone());
    let mut side = 0i32;
    for it in 0..400 {
        if (&b - &a).abs() <= &tight * b.abs() {
            break;
        }
        let mut c = (&a * &fb - &b * &fa) / (&fb - &fa);
        if it % 8 == 7 || !(c > a && c < b) {
            c = (&a + &b) * 0.5;
        }
        let fc = error_slope(r, params, &c);
        if fc.is_zero() {
            return c;
        }
        if fc.signum_i() == fb.signum_i() {
            b = c;
            fb = fc;
            if side == 1 {
                fa = fa * 0.5;
            }
            side = 1;
        } else {
            a = c;
            fa = fc;
            if side == -1 {
                fb = fb * 0.5;
            }
            side = -1;
        }
    }
    (a + b) * 0.5
}

/// Checks that the denominator stays positive on the grid.
fn check_poles(r: &RationalApproximant, grid: &[ExtReal], params: &TargetParams) -> Result<(), RemezError> {
    let q = r.denominator();
    let left = if params.delta.is_zero() { ExtReal::zero(params.precision()) } else { params.delta.clone() };
    for t in std::iter::once(&left).chain(grid) {
        if !(q.eval(t) > 0.0) {
            return Err(RemezError::PoleInInterval(format!(
                "denominator is not positive at t = {}",
                t.to_short_sci(4)
            )));
        }
    }
    Ok(())
}

/// All local extrema of the error, endpoints included, ascending.
pub(crate) fn error_extrema(
    r: &RationalApproximant,
    params: &TargetParams,
    hints: Option<&[ExtReal]>,
    density: usize,
) -> Result<Vec<Extremum>, RemezError> {
    let prec = params.precision();
    let grid = sample_grid(params, hints, density);
    check_poles(r, &grid, params)?;
    let slopes: Vec<ExtReal> = grid.iter().map(|t| error_slope(r, params, t)).collect();

    let mut out = Vec::new();
    let left = if params.delta.is_zero() { ExtReal::zero(prec) } else { params.delta.clone() };
    out.push(Extremum { e: error_at(r, params, &left), t: left });
    let last = grid.len() - 1;
    for i in 0..last {
        let (s0, s1) = (&slopes[i], &slopes[i + 1]);
        if s0.signum_i() * s1.signum_i() >= 0 {
            // Interior zero of the slope exactly on a grid point.
            if s1.is_zero() && i + 1 < last && s0.signum_i() * slopes[i + 2].signum_i() < 0 {
                let t = grid[i + 1].clone();
                out.push(Extremum { e: error_at(r, params, &t), t });
            }
            continue;
        }
        let t = refine(r, params, &grid[i], &grid[i + 1], s0, s1);
        out.push(Extremum { e: error_at(r, params, &t), t });
    }
    let one = ExtReal::one(prec);
    out.push(Extremum { e: error_at(r, params, &one), t: one });
    Ok(out)
}

/// All local extrema of `r(t) - g(t)` on `[delta, 1]`, endpoints included,
/// ascending.
///
/// The derivative of the error is sampled on a logarithmic grid (reaching far
/// below the smallest node when `delta = 0`) and each sign change is refined
/// in extended precision. The count is not checked against `2k + 2` here; the
/// exchange reports too few alternating extrema itself.
pub fn find_error_extrema(r: &RationalApproximant, params: &TargetParams) -> Result<Vec<ExtReal>, RemezError> {
    Ok(error_extrema(r, params, None, DEFAULT_DENSITY)?.into_iter().map(|x| x.t).collect())
}
