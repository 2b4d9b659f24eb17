//! Uniform rational approximations of `g(q, delta, alpha; .)` obtained by
//! shifting a stored best approximation instead of running Remez again.
//!
//! With `r = P/Q` a best approximation at parameter `q0`, the function
//! `r / (1 + q1 r) = P / (Q + q1 P)` is again of type `(k, k)` and
//! approximates `g` at `q0 + q1`. `q0 = 0` gives the 0-URA, `q0 > 0` the
//! 1-URA.

use thiserror::Error;

use crate::rational::{partial_fraction, PartialFractions, RationalError, RationalEval};
use crate::remez::{evaluate_target, BuraResult, RationalApproximant, TargetParams};
use crate::xnum::ExtReal;

/// Grid size of the sup-norm scan.
pub const SUP_GRID_POINTS: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum UraError {
    #[error("1 + q r(t) vanishes at t = {t:e}")]
    PoleInInterval { t: f64 },
    #[error("a 0-URA needs a base approximation with q = 0, got q = {0}")]
    BaseNotZero(f64),
    #[error("shift must be nonnegative, got {0}")]
    NegativeShift(f64),
    #[error(transparent)]
    Rational(#[from] RationalError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UraKind {
    ZeroUra,
    OneUra,
}

#[derive(Debug, Clone)]
pub struct UraResult {
    pub kind: UraKind,
    /// Parameters of the underlying best approximation.
    pub base_params: TargetParams,
    /// `q` for a 0-URA, `q1` for a 1-URA.
    pub shift: ExtReal,
    pub r: RationalApproximant,
    pub pf: PartialFractions,
    /// Sup of `|r - g(q0 + shift)|` over `[delta, 1]`.
    pub error_sup: ExtReal,
    /// Whether every pole is real and negative.
    pub poles_negative: bool,
}

impl UraResult {
    /// Target parameters the URA approximates, `q = q0 + shift`.
    pub fn target(&self) -> TargetParams {
        self.base_params.with_q(&self.base_params.q + &self.shift)
    }
}

fn shifted(base: &BuraResult, shift: &ExtReal, kind: UraKind) -> Result<UraResult, UraError> {
    if shift.is_sign_negative() && !shift.is_zero() {
        return Err(UraError::NegativeShift(shift.to_f64()));
    }
    let p = base.r.numerator().clone();
    let den = base.r.denominator().add(&p.scale(shift));
    let base_params = base.params.clone();
    let target = base_params.with_q(&base_params.q + shift);
    let r = RationalApproximant::new(p, den);
    // The shifted denominator stays positive wherever r0 >= 0; check it.
    let lo = if target.delta.is_zero() { 1e-300 } else { target.delta.to_f64() };
    for i in 0..=200 {
        let t = if i == 0 { target.delta.to_f64() } else { (lo.ln() * (1.0 - i as f64 / 200.0)).exp() };
        let tq = ExtReal::from_f64(t, target.precision());
        if !(r.denominator().eval(&tq) > 0.0) {
            return Err(UraError::PoleInInterval { t });
        }
    }
    let pf = partial_fraction(&r)?;
    let poles_negative = pf.terms.iter().all(|(_, d)| *d < 0.0);
    let error_sup = sup_error_on_interval(&pf, &target);
    Ok(UraResult { kind, base_params, shift: shift.clone(), r, pf, error_sup, poles_negative })
}

/// 0-URA `r0 / (1 + q r0)` of `g(q, delta, alpha; .)` from the best
/// approximation `r0` of `t^alpha` on the same interval.
pub fn build_0ura(base: &BuraResult, q: &ExtReal) -> Result<UraResult, UraError> {
    if !base.params.q.is_zero() {
        return Err(UraError::BaseNotZero(base.params.q.to_f64()));
    }
    shifted(base, q, UraKind::ZeroUra)
}

/// 1-URA `r_{q0} / (1 + q1 r_{q0})` of `g(q0 + q1, delta, alpha; .)` from the
/// best approximation at `q0`.
pub fn build_1ura(base: &BuraResult, q1: &ExtReal) -> Result<UraResult, UraError> {
    shifted(base, q1, UraKind::OneUra)
}

fn abs_err_f64<R: RationalEval + ?Sized>(r: &R, q: f64, a: f64, t: f64) -> f64 {
    let x = t.powf(a);
    (r.eval_f64(t) - x / (1.0 + q * x)).abs()
}

fn abs_err<R: RationalEval + ?Sized>(r: &R, params: &TargetParams, t: &ExtReal) -> ExtReal {
    match r.eval_at(t) {
        Ok(v) => (v - evaluate_target(params, t)).abs(),
        Err(_) => ExtReal::from_f64(f64::INFINITY, params.precision()),
    }
}

/// Sup of `|r(t) - g(t)|` over `[delta, 1]`.
///
/// A double-precision scan over [`SUP_GRID_POINTS`] log-spaced points
/// (from `1e-300` when `delta = 0`, plus `t = 0`) locates the candidate
/// maxima; the peak of each run of points above half the scan maximum is
/// refined by golden-section search in extended precision.
pub fn sup_error_on_interval<R: RationalEval + ?Sized>(r: &R, params: &TargetParams) -> ExtReal {
    let prec = params.precision();
    let (q, a) = (params.q.to_f64(), params.alpha.to_f64());
    let lo = if params.delta.is_zero() { 1e-300_f64 } else { params.delta.to_f64() };
    let n = SUP_GRID_POINTS;
    let (la, lb) = (lo.ln(), 0.0_f64);
    let ts: Vec<f64> = (0..n).map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp()).collect();
    let es: Vec<f64> = ts.iter().map(|&t| abs_err_f64(r, q, a, t)).collect();
    let scan_max = es.iter().cloned().fold(0.0, f64::max);

    let mut best = if params.delta.is_zero() {
        abs_err(r, params, &ExtReal::zero(prec))
    } else {
        abs_err(r, params, &params.delta)
    };
    best = best.max(abs_err(r, params, &ExtReal::one(prec)));
    let golden = ExtReal::from_f64((5f64.sqrt() - 1.0) / 2.0, prec);
    // One refinement per run of grid points above half the scan maximum;
    // flat stretches would otherwise yield many rounding-noise maxima.
    let mut i = 0;
    while i < n {
        if es[i] < 0.5 * scan_max {
            i += 1;
            continue;
        }
        let start = i;
        while i < n && es[i] >= 0.5 * scan_max {
            i += 1;
        }
        let peak = (start..i).max_by(|&a, &b| es[a].total_cmp(&es[b])).expect("nonempty run");
        if peak == 0 || peak == n - 1 {
            continue;
        }
        // Golden-section search for the maximum in ln t.
        let mut x0 = ExtReal::from_f64(ts[peak - 1], prec).ln();
        let mut x1 = ExtReal::from_f64(ts[peak + 1], prec).ln();
        let f = |x: &ExtReal| abs_err(r, params, &x.exp());
        let mut c = &x1 - (&x1 - &x0) * &golden;
        let mut d = &x0 + (&x1 - &x0) * &golden;
        let (mut fc, mut fd) = (f(&c), f(&d));
        for _ in 0..80 {
            if fc > fd {
                x1 = d;
                d = c.clone();
                fd = fc.clone();
                c = &x1 - (&x1 - &x0) * &golden;
                fc = f(&c);
            } else {
                x0 = c;
                c = d.clone();
                fc = fd.clone();
                d = &x0 + (&x1 - &x0) * &golden;
                fd = f(&d);
            }
        }
        best = best.max(fc.max(fd));
    }
    best
}
