use std::sync::OnceLock;

use crate::xnum::{poly_roots, ExtReal, Poly, Root, XnumError};

/// Degree-(k,k) rational function `P(t) / Q(t)` with `Q` monic.
///
/// In product form `r(t) = b * prod (t - zeta_i) / prod (t - d_i)` the scale
/// `b` is the leading coefficient of `P`. Zeros and poles are found on first
/// use and cached.
#[derive(Debug)]
pub struct RationalApproximant {
    p: Poly,
    qden: Poly,
    scale: ExtReal,
    zeros: OnceLock<Result<Vec<Root>, XnumError>>,
    poles: OnceLock<Result<Vec<Root>, XnumError>>,
}

impl Clone for RationalApproximant {
    fn clone(&self) -> Self {
        RationalApproximant::new(self.p.clone(), self.qden.clone())
    }
}

impl PartialEq for RationalApproximant {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.qden == other.qden
    }
}

impl RationalApproximant {
    /// Builds `p / q`, rescaling both so the denominator is monic.
    pub fn new(p: Poly, q: Poly) -> Self {
        assert!(!q.is_zero(), "denominator must not vanish identically");
        let lead = q.leading().clone();
        let p = p.scale(&lead.recip());
        let qden = q.monic();
        let scale = p.leading().clone();
        RationalApproximant { p, qden, scale, zeros: OnceLock::new(), poles: OnceLock::new() }
    }

    pub fn numerator(&self) -> &Poly {
        &self.p
    }

    pub fn denominator(&self) -> &Poly {
        &self.qden
    }

    /// Leading coefficient `b` of the product form.
    pub fn scale(&self) -> &ExtReal {
        &self.scale
    }

    pub fn degree(&self) -> usize {
        self.qden.degree().max(self.p.degree())
    }

    pub fn eval(&self, t: &ExtReal) -> ExtReal {
        self.p.eval(t) / self.qden.eval(t)
    }

    /// Value and derivative at `t`.
    pub fn eval_with_derivative(&self, t: &ExtReal) -> (ExtReal, ExtReal) {
        let (p, dp) = self.p.eval_with_derivative(t);
        let (q, dq) = self.qden.eval_with_derivative(t);
        let r = &p / &q;
        let dr = (dp * &q - p * dq) / q.square();
        (r, dr)
    }

    fn root_tol(&self) -> ExtReal {
        self.qden.precision().half_eps()
    }

    /// Roots of the denominator, ascending by real part.
    pub fn poles(&self) -> Result<&[Root], XnumError> {
        self.poles.get_or_init(|| poly_roots(&self.qden, &self.root_tol())).as_deref().map_err(Clone::clone)
    }

    /// Roots of the numerator, ascending by real part.
    pub fn zeros(&self) -> Result<&[Root], XnumError> {
        self.zeros.get_or_init(|| poly_roots(&self.p, &self.root_tol())).as_deref().map_err(Clone::clone)
    }
}
