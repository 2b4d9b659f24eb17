//! Fractional, reaction and time-stepping solves on 1D discretisations.
//!
//! With `lambda_1` the smallest eigenvalue and `t = lambda_1 / lambda`, the
//! solution operators are `lambda_1^{-alpha} g(q, delta, alpha; t)` applied
//! spectrally, where `q = b lambda_1^{-alpha}` for `(A^alpha + b I)^{-1}`. A
//! rational `r ~ g` written in `xi = 1/t` as `c~0 + sum c~_i/(xi - d~_i)`
//! turns this into `k` shifted solves with `lambda_1^{-1} A - d~_i I`.

use rayon::prelude::*;
use thiserror::Error;

use crate::dataio::{reference_lookup, DataError};
use crate::discretize::{
    assemble_fd_1d, assemble_fem_1d, eig_tridiag, extreme_eigenvalues, spectral_apply_fractional, DiscretizeError,
    Mass, SpectralDecomp, Tridiag,
};
use crate::rational::{partial_fraction, reciprocal_transform, RationalError, ReciprocalF64};
use crate::remez::{compute_bura, RemezConfig, RemezError, TargetParams};
use crate::ura::{build_0ura, build_1ura, UraError};
use crate::xnum::ExtReal;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("alpha = {0} must lie in (0, 1)")]
    InvalidAlpha(f64),
    #[error("reaction coefficient b = {0} must be >= 0")]
    NegativeReaction(f64),
    #[error("time step {0} must be positive")]
    InvalidStep(f64),
    #[error("right-hand side has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("shifted system {index} (d~ = {shift:e}) is not positive definite")]
    ShiftNotSpd { index: usize, shift: f64 },
    #[error("delta = {delta:e} exceeds lambda_1/lambda_N = {ratio:e}")]
    DeltaTooLarge { delta: f64, ratio: f64 },
    #[error("q = {q} lies below the base q0 = {q0}")]
    ShiftBelowBase { q: f64, q0: f64 },
    #[error("lower bound {bound:e} exceeds lambda_1 = {lambda1:e}")]
    BadLowerBound { bound: f64, lambda1: f64 },
    #[error(transparent)]
    Discretize(#[from] DiscretizeError),
    #[error(transparent)]
    Remez(#[from] RemezError),
    #[error(transparent)]
    Rational(#[from] RationalError),
    #[error(transparent)]
    Ura(#[from] UraError),
    #[error(transparent)]
    Data(#[from] DataError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Problem {
    Fd,
    FemConsistent,
    FemLumped,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeltaPolicy {
    Zero,
    /// `delta = lambda_1 / lambda_N`.
    SpectralGap,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// Best approximation of `g(q, ...)` computed directly.
    Bura,
    /// `r0 / (1 + q r0)` from the best approximation at `q = 0`.
    ZeroUra,
    /// `r_{q0} / (1 + (q - q0) r_{q0})`.
    OneUra { q0: f64 },
}

/// An assembled operator `A` (or pencil `(S, M)`) with its spectral bounds.
#[derive(Debug, Clone)]
pub struct Discrete {
    pub problem: Problem,
    pub matrix: Tridiag,
    pub mass: Option<Mass>,
    /// `lambda_1` or a lower bound for it.
    pub lambda1: f64,
    /// `lambda_N` or an upper bound for it.
    pub lambda_n: f64,
}

impl Discrete {
    /// Assembles on `n` interior nodes. The reaction term of the FEM
    /// assembly is zero; reactions enter through `b` in [`solve_reaction`].
    pub fn assemble(problem: Problem, a: &dyn Fn(f64) -> f64, n: usize) -> Result<Self, SolverError> {
        let (matrix, mass) = match problem {
            Problem::Fd => (assemble_fd_1d(a, n)?, None),
            Problem::FemConsistent => {
                let fem = assemble_fem_1d(a, &|_| 0.0, n)?;
                (fem.stiffness, Some(Mass::Consistent(fem.mass)))
            }
            Problem::FemLumped => {
                let fem = assemble_fem_1d(a, &|_| 0.0, n)?;
                (fem.stiffness, Some(Mass::Lumped(fem.lumped_mass)))
            }
        };
        let (lambda1, lambda_n) = extreme_eigenvalues(&matrix, mass.as_ref());
        Ok(Discrete { problem, matrix, mass, lambda1, lambda_n })
    }

    /// Replaces `lambda_1` by a lower bound and `lambda_N` by a Gershgorin
    /// upper bound, as when the spectrum is not computed.
    pub fn with_lambda1_bound(mut self, bound: f64) -> Result<Self, SolverError> {
        if !(bound > 0.0 && bound <= self.lambda1) {
            return Err(SolverError::BadLowerBound { bound, lambda1: self.lambda1 });
        }
        self.lambda1 = bound;
        let upper = match &self.mass {
            None => self.matrix.gershgorin_upper(),
            Some(Mass::Lumped(w)) => {
                let wmin = w.iter().cloned().fold(f64::INFINITY, f64::min);
                self.matrix.gershgorin_upper() / wmin
            }
            // The smallest eigenvalue of the P1 mass on a uniform mesh is at
            // least h/3.
            Some(Mass::Consistent(m)) => self.matrix.gershgorin_upper() / (m.diag[0] / 2.0),
        };
        self.lambda_n = upper.max(self.lambda_n);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    /// Admissible `delta`: `lambda_1 / lambda_N`.
    pub fn spectral_ratio(&self) -> f64 {
        self.lambda1 / self.lambda_n
    }

    /// Full eigendecomposition for reference solutions.
    pub fn spectral(&self) -> Result<SpectralDecomp, SolverError> {
        Ok(eig_tridiag(&self.matrix, self.mass.as_ref())?)
    }

    /// Euclidean norm, or the `M` norm for finite elements.
    pub fn norm(&self, x: &[f64]) -> f64 {
        match &self.mass {
            None => x.iter().map(|v| v * v).sum::<f64>().sqrt(),
            Some(m) => m.matvec(x).iter().zip(x).map(|(a, b)| a * b).sum::<f64>().sqrt(),
        }
    }

    fn delta(&self, policy: DeltaPolicy) -> Result<f64, SolverError> {
        let ratio = self.spectral_ratio();
        match policy {
            DeltaPolicy::Zero => Ok(0.0),
            DeltaPolicy::SpectralGap => Ok(ratio),
            DeltaPolicy::Fixed(d) if d <= ratio => Ok(d),
            DeltaPolicy::Fixed(d) => Err(SolverError::DeltaTooLarge { delta: d, ratio }),
        }
    }
}

/// A rational approximation of `g(q, delta, alpha; .)` in the reciprocal
/// variable, ready to be applied.
#[derive(Debug, Clone)]
pub struct ScaledApproximant {
    pub method: Method,
    pub rf: ReciprocalF64,
    pub q: f64,
    pub delta: f64,
    pub alpha: f64,
    pub k: usize,
    /// Sup of `|r - g|` on `[delta, 1]`: `E` for a BURA, the measured
    /// uniform error for a URA.
    pub error_level: f64,
}

fn check_alpha(alpha: f64) -> Result<(), SolverError> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(SolverError::InvalidAlpha(alpha))
    }
}

/// Computes the approximant of `g(q, delta, alpha; .)` by the given method.
pub fn build_approximant(
    method: Method,
    q: f64,
    delta: f64,
    alpha: f64,
    k: usize,
    cfg: &RemezConfig,
) -> Result<ScaledApproximant, SolverError> {
    check_alpha(alpha)?;
    let prec = cfg.precision;
    let qx = ExtReal::parse(&format!("{q:e}"), prec).map_err(RationalError::from)?;
    let (pf, error_level) = match method {
        Method::Bura => {
            let bura = compute_bura(&TargetParams::new(q, delta, alpha, k, prec)?, cfg)?;
            (partial_fraction(&bura.r)?, bura.error_level.to_f64())
        }
        Method::ZeroUra => {
            let base = compute_bura(&TargetParams::new(0.0, delta, alpha, k, prec)?, cfg)?;
            let ura = build_0ura(&base, &qx)?;
            (ura.pf, ura.error_sup.to_f64())
        }
        Method::OneUra { q0 } => {
            if q < q0 {
                return Err(SolverError::ShiftBelowBase { q, q0 });
            }
            let base = compute_bura(&TargetParams::new(q0, delta, alpha, k, prec)?, cfg)?;
            let q0x = ExtReal::parse(&format!("{q0:e}"), prec).map_err(RationalError::from)?;
            let ura = build_1ura(&base, &(qx - q0x))?;
            (ura.pf, ura.error_sup.to_f64())
        }
    };
    let rf = reciprocal_transform(&pf)?.to_f64();
    Ok(ScaledApproximant { method, rf, q, delta, alpha, k, error_level })
}

fn apply(
    a: &Tridiag,
    m: Option<&Mass>,
    lambda1: f64,
    rf: &ReciprocalF64,
    alpha: f64,
    f: &[f64],
) -> Result<Vec<f64>, SolverError> {
    let n = a.n();
    if f.len() != n {
        return Err(SolverError::DimensionMismatch { expected: n, got: f.len() });
    }
    let scaled = a.scaled(1.0 / lambda1);
    let (rhs, mt) = match m {
        None => (f.to_vec(), None),
        Some(m) => (m.matvec(f), Some(m.as_tridiag())),
    };
    // Independent shifted solves; summed afterwards in a fixed order so the
    // result does not depend on scheduling.
    let parts: Vec<Vec<f64>> = rf
        .terms
        .par_iter()
        .enumerate()
        .map(|(index, &(c, d))| {
            let shifted = match &mt {
                None => scaled.shifted(-d),
                Some(mt) => scaled.combine(1.0, mt, -d),
            };
            let x = shifted.solve_spd(&rhs).map_err(|_| SolverError::ShiftNotSpd { index: index + 1, shift: d })?;
            Ok(x.into_iter().map(|v| c * v).collect())
        })
        .collect::<Result<_, SolverError>>()?;
    let mut w: Vec<f64> = f.iter().map(|v| rf.c0t * v).collect();
    for part in &parts {
        w.iter_mut().zip(part).for_each(|(a, b)| *a += b);
    }
    let s = lambda1.powf(-alpha);
    w.iter_mut().for_each(|v| *v *= s);
    Ok(w)
}

/// `lambda_1^{-alpha} [c~0 f + sum c~_i (lambda_1^{-1} A - d~_i I)^{-1} f]`.
pub fn bura_apply(
    a: &Tridiag,
    lambda1: f64,
    rf: &ReciprocalF64,
    alpha: f64,
    f: &[f64],
) -> Result<Vec<f64>, SolverError> {
    apply(a, None, lambda1, rf, alpha, f)
}

/// The same for the pencil `(S, M)`, i.e. for the operator `M^{-1} S`,
/// using `(lambda_1^{-1} S - d~_i M)^{-1} M f`.
pub fn bura_apply_pencil(
    s: &Tridiag,
    m: &Mass,
    lambda1: f64,
    rf: &ReciprocalF64,
    alpha: f64,
    f: &[f64],
) -> Result<Vec<f64>, SolverError> {
    apply(s, Some(m), lambda1, rf, alpha, f)
}

/// Applies an approximant to an assembled operator.
pub fn apply_approximant(op: &Discrete, approx: &ScaledApproximant, f: &[f64]) -> Result<Vec<f64>, SolverError> {
    apply(&op.matrix, op.mass.as_ref(), op.lambda1, &approx.rf, approx.alpha, f)
}

#[derive(Debug, Clone)]
pub struct FracSolveReport {
    pub w: Vec<f64>,
    pub u_ref: Option<Vec<f64>>,
    /// `lambda_1^{-alpha} E ||f||`.
    pub residual_bound: f64,
    pub measured_error: Option<f64>,
    /// Shifted solves performed, equal to `k`.
    pub solves: usize,
    pub k: usize,
    pub q: f64,
    pub delta: f64,
    pub error_level: f64,
    pub lambda1: f64,
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub remez: RemezConfig,
    /// Compute the spectral reference solution and the measured error.
    pub reference: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { remez: RemezConfig::default(), reference: true }
    }
}

/// Smallest tabulated `k` whose error `E_{q,delta,alpha,k}` is at most
/// `accuracy`.
pub fn select_degree(q: f64, delta: f64, alpha: f64, accuracy: f64) -> Option<usize> {
    let prec = crate::xnum::Precision::default();
    (3..=8).find(|&k| {
        let Ok(params) = TargetParams::new(q, delta, alpha, k, prec) else {
            return false;
        };
        reference_lookup("error_table", &params)
            .ok()
            .and_then(|d| d.get(0).and_then(|v| v.to_f64()))
            .is_some_and(|e| e <= accuracy)
    })
}

/// Report for an approximant already built; `b` is the reaction
/// coefficient of the reference operator `A^alpha + b I`.
pub fn solve_with(
    op: &Discrete,
    approx: &ScaledApproximant,
    b: f64,
    f: &[f64],
    reference: Option<&SpectralDecomp>,
) -> Result<FracSolveReport, SolverError> {
    let w = apply_approximant(op, approx, f)?;
    let residual_bound = op.lambda1.powf(-approx.alpha) * approx.error_level * op.norm(f);
    let u_ref = reference.map(|dec| spectral_apply_fractional(dec, approx.alpha, b, f));
    let measured_error = u_ref.as_ref().map(|u| {
        let diff: Vec<f64> = u.iter().zip(&w).map(|(a, b)| a - b).collect();
        op.norm(&diff)
    });
    Ok(FracSolveReport {
        w,
        u_ref,
        residual_bound,
        measured_error,
        solves: approx.rf.terms.len(),
        k: approx.k,
        q: approx.q,
        delta: approx.delta,
        error_level: approx.error_level,
        lambda1: op.lambda1,
    })
}

/// Solves `A^alpha u = f` with the BURA of `t^alpha` on `[delta, 1]`.
pub fn solve_fractional(
    op: &Discrete,
    alpha: f64,
    k: usize,
    delta: DeltaPolicy,
    f: &[f64],
    opts: &SolveOptions,
) -> Result<FracSolveReport, SolverError> {
    solve_reaction(op, alpha, 0.0, k, delta, f, Method::Bura, opts)
}

/// Solves `(A^alpha + b I) u = f` with `q = b lambda_1^{-alpha}`.
#[allow(clippy::too_many_arguments)]
pub fn solve_reaction(
    op: &Discrete,
    alpha: f64,
    b: f64,
    k: usize,
    delta: DeltaPolicy,
    f: &[f64],
    method: Method,
    opts: &SolveOptions,
) -> Result<FracSolveReport, SolverError> {
    check_alpha(alpha)?;
    if !(b >= 0.0) {
        return Err(SolverError::NegativeReaction(b));
    }
    if f.len() != op.n() {
        return Err(SolverError::DimensionMismatch { expected: op.n(), got: f.len() });
    }
    let delta = op.delta(delta)?;
    let q = b * op.lambda1.powf(-alpha);
    let approx = build_approximant(method, q, delta, alpha, k, &opts.remez)?;
    let dec = if opts.reference { Some(op.spectral()?) } else { None };
    solve_with(op, &approx, b, f, dec.as_ref())
}

#[derive(Debug, Clone)]
pub struct MarchReport {
    /// `u^0 = v, u^1, ..., u^steps`.
    pub states: Vec<Vec<f64>>,
    /// Bound on `||u^n - u_exact^n||`, accumulated from the per-step bounds
    /// `lambda_1^{-alpha} E ||rhs^n||`.
    pub error_bounds: Vec<f64>,
    pub approx: ScaledApproximant,
}

/// Implicit Euler for `u' + A^alpha u = f`: each step solves
/// `(A^alpha + I/tau) u^n = u^{n-1}/tau + f^n` with one approximant of
/// `g(lambda_1^{-alpha}/tau, delta, alpha; .)` reused for all steps.
#[allow(clippy::too_many_arguments)]
pub fn time_march(
    op: &Discrete,
    alpha: f64,
    tau: f64,
    steps: usize,
    v: &[f64],
    source: &dyn Fn(usize) -> Option<Vec<f64>>,
    k: usize,
    delta: DeltaPolicy,
    method: Method,
    cfg: &RemezConfig,
) -> Result<MarchReport, SolverError> {
    check_alpha(alpha)?;
    if !(tau > 0.0) {
        return Err(SolverError::InvalidStep(tau));
    }
    if v.len() != op.n() {
        return Err(SolverError::DimensionMismatch { expected: op.n(), got: v.len() });
    }
    let delta = op.delta(delta)?;
    let q = op.lambda1.powf(-alpha) / tau;
    let approx = build_approximant(method, q, delta, alpha, k, cfg)?;
    let scale = op.lambda1.powf(-alpha) * approx.error_level;
    let mut states = vec![v.to_vec()];
    let mut error_bounds = vec![0.0];
    for n in 1..=steps {
        let prev = states.last().expect("initial state");
        let mut rhs: Vec<f64> = prev.iter().map(|x| x / tau).collect();
        if let Some(fnow) = source(n) {
            if fnow.len() != rhs.len() {
                return Err(SolverError::DimensionMismatch { expected: rhs.len(), got: fnow.len() });
            }
            rhs.iter_mut().zip(&fnow).for_each(|(a, b)| *a += b);
        }
        let next = apply_approximant(op, &approx, &rhs)?;
        // The exact step operator contracts by 1/(1 + tau lambda_1^alpha) on
        // the data, i.e. the inherited error shrinks.
        let contraction = 1.0 / (1.0 + tau * op.lambda1.powf(alpha));
        let inherited = error_bounds.last().expect("initial bound") * contraction;
        error_bounds.push(inherited + scale * op.norm(&rhs));
        states.push(next);
    }
    Ok(MarchReport { states, error_bounds, approx })
}

/// Implicit Euler with the exact spectral step, for reference.
pub fn time_march_spectral(
    dec: &SpectralDecomp,
    alpha: f64,
    tau: f64,
    steps: usize,
    v: &[f64],
    source: &dyn Fn(usize) -> Option<Vec<f64>>,
) -> Vec<Vec<f64>> {
    let mut states = vec![v.to_vec()];
    for n in 1..=steps {
        let prev = states.last().expect("initial state");
        let mut rhs: Vec<f64> = prev.iter().map(|x| x / tau).collect();
        if let Some(fnow) = source(n) {
            rhs.iter_mut().zip(&fnow).for_each(|(a, b)| *a += b);
        }
        states.push(spectral_apply_fractional(dec, alpha, 1.0 / tau, &rhs));
    }
    states
}
