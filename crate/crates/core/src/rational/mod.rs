//! Coefficient, product and partial-fraction forms of a `(k, k)` rational
//! function, and the reciprocal transform `xi = 1/t`.
//!
//! Terms are kept ordered by increasing pole magnitude (the pole nearest the
//! origin first), which is the row order of the published tables and of the
//! `.tab` files.

use thiserror::Error;

use crate::remez::RationalApproximant;
use crate::xnum::{ExtReal, Poly, Precision, XnumError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RationalError {
    #[error("poles {0} and {1} coincide to working precision")]
    RepeatedPole(usize, usize),
    #[error("pole {index} is not real (imaginary part {im:e})")]
    ComplexPole { index: usize, im: f64 },
    #[error("numerator degree {num} exceeds denominator degree {den}")]
    DegreeMismatch { num: usize, den: usize },
    #[error("evaluation point {t:e} hits a pole")]
    PoleHit { t: f64 },
    #[error("a pole at the origin has no reciprocal")]
    ZeroPole,
    #[error(transparent)]
    Roots(#[from] XnumError),
}

/// `c0 + sum c_i / (t - d_i)`; `terms` holds `(c_i, d_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialFractions {
    pub c0: ExtReal,
    pub terms: Vec<(ExtReal, ExtReal)>,
}

/// `c~0 + sum c~_i / (xi - d~_i)` in the reciprocal variable `xi = 1/t`;
/// `terms` holds `(c~_i, d~_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReciprocalFractions {
    pub c0t: ExtReal,
    pub terms: Vec<(ExtReal, ExtReal)>,
}

/// Double-precision copy of a reciprocal decomposition for the solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct ReciprocalF64 {
    pub c0t: f64,
    pub terms: Vec<(f64, f64)>,
}

fn sort_by_magnitude(terms: &mut [(ExtReal, ExtReal)]) {
    terms.sort_by(|a, b| a.1.abs().total_cmp(&b.1.abs()));
}

fn eval_terms(c0: &ExtReal, terms: &[(ExtReal, ExtReal)], t: &ExtReal) -> Result<ExtReal, RationalError> {
    let prec = t.precision();
    let mut acc = c0.clone();
    for (c, d) in terms {
        let gap = t - d;
        if gap.abs() <= d.abs().max(ExtReal::one(prec)) * prec.eps() {
            return Err(RationalError::PoleHit { t: t.to_f64() });
        }
        acc += c / gap;
    }
    Ok(acc)
}

/// Polynomials `(P, Q)` with `Q` monic and `P / Q = c0 + sum c_i/(t - d_i)`.
fn rebuild(c0: &ExtReal, terms: &[(ExtReal, ExtReal)]) -> (Poly, Poly) {
    let prec = c0.precision();
    let poles: Vec<ExtReal> = terms.iter().map(|(_, d)| d.clone()).collect();
    let q = Poly::from_roots(&poles, prec);
    let mut p = q.scale(c0);
    for (i, (c, _)) in terms.iter().enumerate() {
        let others: Vec<ExtReal> = poles.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, d)| d.clone()).collect();
        p = p.add(&Poly::from_roots(&others, prec).scale(c));
    }
    (p, q)
}

impl PartialFractions {
    pub fn new(c0: ExtReal, terms: Vec<(ExtReal, ExtReal)>) -> Self {
        PartialFractions { c0, terms }
    }

    pub fn from_f64(c0: f64, terms: &[(f64, f64)], prec: Precision) -> Self {
        PartialFractions {
            c0: ExtReal::from_f64(c0, prec),
            terms: terms.iter().map(|&(c, d)| (ExtReal::from_f64(c, prec), ExtReal::from_f64(d, prec))).collect(),
        }
    }

    pub fn k(&self) -> usize {
        self.terms.len()
    }

    pub fn precision(&self) -> Precision {
        self.c0.precision()
    }

    pub fn poles(&self) -> Vec<ExtReal> {
        self.terms.iter().map(|(_, d)| d.clone()).collect()
    }

    pub fn coefficients(&self) -> Vec<ExtReal> {
        self.terms.iter().map(|(c, _)| c.clone()).collect()
    }

    pub fn eval(&self, t: &ExtReal) -> Result<ExtReal, RationalError> {
        eval_terms(&self.c0, &self.terms, t)
    }

    /// Back to coefficient form.
    pub fn to_rational(&self) -> RationalApproximant {
        let (p, q) = rebuild(&self.c0, &self.terms);
        RationalApproximant::new(p, q)
    }

    /// `c0 > 0` and every `c_i < 0`.
    pub fn has_bura_signs(&self) -> bool {
        self.c0 > 0.0 && self.terms.iter().all(|(c, _)| *c < 0.0)
    }
}

impl ReciprocalFractions {
    pub fn new(c0t: ExtReal, terms: Vec<(ExtReal, ExtReal)>) -> Self {
        ReciprocalFractions { c0t, terms }
    }

    pub fn k(&self) -> usize {
        self.terms.len()
    }

    /// `r~(xi)`, which equals `r(1/xi)`.
    pub fn eval(&self, xi: &ExtReal) -> Result<ExtReal, RationalError> {
        eval_terms(&self.c0t, &self.terms, xi)
    }

    /// `c~0 > 0` and every `c~_i > 0`.
    pub fn has_positive_coefficients(&self) -> bool {
        self.c0t > 0.0 && self.terms.iter().all(|(c, _)| *c > 0.0)
    }

    pub fn to_f64(&self) -> ReciprocalF64 {
        ReciprocalF64 {
            c0t: self.c0t.to_f64(),
            terms: self.terms.iter().map(|(c, d)| (c.to_f64(), d.to_f64())).collect(),
        }
    }
}

impl ReciprocalF64 {
    /// `r~(xi)` in double precision.
    pub fn eval(&self, xi: f64) -> f64 {
        self.c0t + self.terms.iter().map(|(c, d)| c / (xi - d)).sum::<f64>()
    }
}

/// Decomposes `P/Q` into `c0 + sum c_i/(t - d_i)` with `c0 = lead(P)/lead(Q)`
/// and residues `c_i = P(d_i) / Q'(d_i)`.
pub fn partial_fraction(r: &RationalApproximant) -> Result<PartialFractions, RationalError> {
    let p = r.numerator();
    let q = r.denominator();
    if p.degree() > q.degree() {
        return Err(RationalError::DegreeMismatch { num: p.degree(), den: q.degree() });
    }
    let prec = q.precision();
    let c0 = if p.degree() == q.degree() { p.leading() / q.leading() } else { ExtReal::zero(prec) };
    let roots = r.poles()?;
    for (index, root) in roots.iter().enumerate() {
        if !root.is_real() {
            return Err(RationalError::ComplexPole { index: index + 1, im: root.im.to_f64() });
        }
    }
    let dq = q.derivative();
    let mut terms = Vec::with_capacity(roots.len());
    for root in roots {
        let d = root.re.clone();
        terms.push((p.eval(&d) / dq.eval(&d), d));
    }
    sort_by_magnitude(&mut terms);
    // Separation test relative to the pole size: a repeated pole leaves two
    // roots agreeing to about half the working digits.
    let tight = prec.half_eps() * 1e6;
    for i in 1..terms.len() {
        let (a, b) = (&terms[i - 1].1, &terms[i].1);
        if (a - b).abs() <= &tight * a.abs().max(b.abs()) {
            return Err(RationalError::RepeatedPole(i, i + 1));
        }
    }
    Ok(PartialFractions { c0, terms })
}

/// Rewrites `r(t)` in the variable `xi = 1/t`:
/// `c~0 = c0 - sum c_i/d_i`, `c~_i = -c_i/d_i^2`, `d~_i = 1/d_i`.
pub fn reciprocal_transform(pf: &PartialFractions) -> Result<ReciprocalFractions, RationalError> {
    let mut c0t = pf.c0.clone();
    let mut terms = Vec::with_capacity(pf.terms.len());
    for (c, d) in &pf.terms {
        if d.is_zero() {
            return Err(RationalError::ZeroPole);
        }
        c0t -= c / d;
        terms.push((-(c / d.square()), d.recip()));
    }
    sort_by_magnitude(&mut terms);
    Ok(ReciprocalFractions { c0t, terms })
}

/// Inverse of [`reciprocal_transform`]; the map is an involution, so this
/// applies the same formulas with the roles swapped.
pub fn inverse_reciprocal(rf: &ReciprocalFractions) -> Result<PartialFractions, RationalError> {
    let back = reciprocal_transform(&PartialFractions { c0: rf.c0t.clone(), terms: rf.terms.clone() })?;
    Ok(PartialFractions { c0: back.c0t, terms: back.terms })
}

/// Outcome of the zero/pole interlacing check.
#[derive(Debug, Clone, PartialEq)]
pub struct InterlacingReport {
    pub passed: bool,
    /// One-based index `i` of the first violated link of
    /// `0 > zeta_1 > d_1 > zeta_2 > ... > zeta_k > d_k`.
    pub first_violation: Option<usize>,
    pub detail: String,
}

/// Checks `0 > zeta_1 > d_1 > zeta_2 > d_2 > ... > zeta_k > d_k` for the
/// zeros `zeta_i` and poles `d_i` of `r`, both ordered from the origin
/// outwards.
pub fn check_interlacing(r: &RationalApproximant) -> Result<InterlacingReport, RationalError> {
    let zeros = r.zeros()?;
    let poles = r.poles()?;
    let fail = |i: usize, detail: String| InterlacingReport { passed: false, first_violation: Some(i), detail };
    if zeros.len() != poles.len() {
        return Ok(fail(1, format!("{} zeros against {} poles", zeros.len(), poles.len())));
    }
    if let Some(i) = zeros.iter().chain(poles).position(|z| !z.is_real()) {
        return Ok(fail(i % zeros.len().max(1) + 1, "complex root".into()));
    }
    let mut z: Vec<&ExtReal> = zeros.iter().map(|x| &x.re).collect();
    let mut d: Vec<&ExtReal> = poles.iter().map(|x| &x.re).collect();
    z.sort_by(|a, b| b.total_cmp(a));
    d.sort_by(|a, b| b.total_cmp(a));
    let mut upper = ExtReal::zero(r.denominator().precision());
    for i in 0..z.len() {
        if !(*z[i] < upper) {
            return Ok(fail(
                i + 1,
                format!("zeta_{} = {} is not below {}", i + 1, z[i].to_short_sci(4), upper.to_short_sci(4)),
            ));
        }
        if !(d[i] < z[i]) {
            return Ok(fail(
                i + 1,
                format!(
                    "d_{} = {} is not below zeta_{} = {}",
                    i + 1,
                    d[i].to_short_sci(4),
                    i + 1,
                    z[i].to_short_sci(4)
                ),
            ));
        }
        upper = d[i].clone();
    }
    Ok(InterlacingReport { passed: true, first_violation: None, detail: "interlacing holds".into() })
}

/// Anything that can be evaluated as a rational function of `t`.
pub trait RationalEval {
    fn eval_at(&self, t: &ExtReal) -> Result<ExtReal, RationalError>;

    /// Cheap double-precision value for grid scans.
    fn eval_f64(&self, t: f64) -> f64;
}

impl RationalEval for PartialFractions {
    fn eval_at(&self, t: &ExtReal) -> Result<ExtReal, RationalError> {
        self.eval(t)
    }

    fn eval_f64(&self, t: f64) -> f64 {
        self.c0.to_f64() + self.terms.iter().map(|(c, d)| c.to_f64() / (t - d.to_f64())).sum::<f64>()
    }
}

impl RationalEval for RationalApproximant {
    fn eval_at(&self, t: &ExtReal) -> Result<ExtReal, RationalError> {
        let q = self.denominator().eval(t);
        if q.abs() <= self.denominator().max_abs_coeff() * t.precision().eps() {
            return Err(RationalError::PoleHit { t: t.to_f64() });
        }
        Ok(self.numerator().eval(t) / q)
    }

    fn eval_f64(&self, t: f64) -> f64 {
        let horner = |p: &Poly| p.coeffs().iter().rev().fold(0.0, |acc, c| acc * t + c.to_f64());
        horner(self.numerator()) / horner(self.denominator())
    }
}

impl RationalEval for ReciprocalFractions {
    /// Evaluates `r(t)` through `r~(1/t)`.
    fn eval_at(&self, t: &ExtReal) -> Result<ExtReal, RationalError> {
        if t.is_zero() {
            // r(0) is the limit of r~(xi) as xi grows, which is c~0.
            return Ok(self.c0t.clone());
        }
        self.eval(&t.recip())
    }

    fn eval_f64(&self, t: f64) -> f64 {
        if t == 0.0 {
            return self.c0t.to_f64();
        }
        self.to_f64().eval(1.0 / t)
    }
}

/// Evaluates `r` at `t`; the partial-fraction form is preferred where it is
/// available because it is better conditioned than `P/Q`.
pub fn rational_eval<R: RationalEval + ?Sized>(r: &R, t: &ExtReal) -> Result<ExtReal, RationalError> {
    r.eval_at(t)
}
