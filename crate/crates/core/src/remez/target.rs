use crate::xnum::{ExtReal, Precision};

use super::RemezError;

/// Largest supported degree.
pub const MAX_DEGREE: usize = 12;

/// Parameters of `g(q, delta, alpha; t) = t^alpha / (1 + q t^alpha)` on
/// `[delta, 1]` together with the approximation degree `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetParams {
    pub q: ExtReal,
    pub delta: ExtReal,
    pub alpha: ExtReal,
    pub k: usize,
}

fn decimal(x: f64, prec: Precision) -> ExtReal {
    // Shortest round-trip text keeps decimal inputs such as 1e-6 exact.
    ExtReal::parse(&format!("{x:e}"), prec).expect("finite f64 formats as a number")
}

impl TargetParams {
    /// Builds and validates the parameters; decimal inputs like `1e-6` are
    /// taken as the exact decimal value rather than the nearest double.
    pub fn new(q: f64, delta: f64, alpha: f64, k: usize, prec: Precision) -> Result<Self, RemezError> {
        if !(q.is_finite() && delta.is_finite() && alpha.is_finite()) {
            return Err(RemezError::InvalidParams("parameters must be finite".into()));
        }
        let p = TargetParams { q: decimal(q, prec), delta: decimal(delta, prec), alpha: decimal(alpha, prec), k };
        p.validate()?;
        Ok(p)
    }

    pub fn from_ext(q: ExtReal, delta: ExtReal, alpha: ExtReal, k: usize) -> Result<Self, RemezError> {
        let p = TargetParams { q, delta, alpha, k };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), RemezError> {
        if self.q.is_sign_negative() {
            return Err(RemezError::InvalidParams(format!("q = {} must be >= 0", self.q)));
        }
        if self.delta.is_sign_negative() || self.delta >= 1.0 {
            return Err(RemezError::InvalidParams(format!("delta = {} must lie in [0, 1)", self.delta)));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(RemezError::InvalidParams(format!("alpha = {} must lie in (0, 1)", self.alpha)));
        }
        if self.k == 0 || self.k > MAX_DEGREE {
            return Err(RemezError::InvalidParams(format!("k = {} must lie in [1, {MAX_DEGREE}]", self.k)));
        }
        Ok(())
    }

    pub fn precision(&self) -> Precision {
        self.alpha.precision()
    }

    /// Number of alternation points, `2k + 2`.
    pub fn alternation_count(&self) -> usize {
        2 * self.k + 2
    }

    /// Same target with a different `q`.
    pub fn with_q(&self, q: ExtReal) -> Self {
        TargetParams { q, ..self.clone() }
    }

    /// Same target with a different left endpoint.
    pub fn with_delta(&self, delta: ExtReal) -> Self {
        TargetParams { delta, ..self.clone() }
    }

    /// `g(t)` and `g'(t)`; the derivative is reported as `None` at `t = 0`
    /// where it is unbounded.
    pub(crate) fn eval_with_derivative(&self, t: &ExtReal) -> (ExtReal, Option<ExtReal>) {
        let x = t.powf(&self.alpha);
        let den = &self.q * &x + 1.0;
        let g = &x / &den;
        if t.is_zero() {
            return (g, None);
        }
        let dg = &self.alpha * &x / t / den.square();
        (g, Some(dg))
    }
}

/// `g(q, delta, alpha; t) = t^alpha / (1 + q t^alpha)`.
pub fn evaluate_target(params: &TargetParams, t: &ExtReal) -> ExtReal {
    let x = t.powf(&params.alpha);
    let den = &params.q * &x + 1.0;
    x / den
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Precision {
        Precision::default()
    }

    #[test]
    fn target_values() {
        let sqrt = TargetParams::new(0.0, 0.0, 0.5, 3, p()).unwrap();
        assert_eq!(evaluate_target(&sqrt, &ExtReal::from_f64(0.25, p())), 0.5);
        let one = ExtReal::one(p());
        let q1 = TargetParams::new(1.0, 0.0, 0.37, 3, p()).unwrap();
        assert_eq!(evaluate_target(&q1, &one), 0.5);
        let q100 = TargetParams::new(100.0, 0.0, 0.75, 3, p()).unwrap();
        let v = evaluate_target(&q100, &one);
        assert!((v - ExtReal::from_ratio(1, 101, p())).abs() < p().eps());
        assert!((evaluate_target(&q100, &one).to_f64() - 9.90099e-3).abs() < 1e-8);
    }

    #[test]
    fn decimal_inputs_are_exact() {
        let t = TargetParams::new(0.0, 1e-6, 0.25, 3, p()).unwrap();
        let exact = ExtReal::exp10(-6, p());
        assert_eq!(t.delta, exact);
    }

    #[test]
    fn parameter_domain_is_checked() {
        assert!(TargetParams::new(-1.0, 0.0, 0.5, 3, p()).is_err());
        assert!(TargetParams::new(0.0, 1.0, 0.5, 3, p()).is_err());
        assert!(TargetParams::new(0.0, 0.0, 1.0, 3, p()).is_err());
        assert!(TargetParams::new(0.0, 0.0, 0.0, 3, p()).is_err());
        assert!(TargetParams::new(0.0, 0.0, 0.5, 0, p()).is_err());
        assert!(TargetParams::new(0.0, 0.0, 0.5, 13, p()).is_err());
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let t = TargetParams::new(3.0, 0.0, 0.25, 3, p()).unwrap();
        let x = ExtReal::from_f64(0.3, p());
        let h = ExtReal::exp10(-30, p());
        let (_, d) = t.eval_with_derivative(&x);
        let fd = (evaluate_target(&t, &(&x + &h)) - evaluate_target(&t, &(&x - &h))) / (&h * 2.0);
        assert!((d.unwrap() - fd).abs() < ExtReal::exp10(-50, p()));
    }
}
