use std::fmt;

use super::{ExtReal, Precision};

/// Dense polynomial; `coeffs[j]` multiplies `t^j`.
///
/// Trailing zero coefficients are stripped on construction, so the last
/// stored coefficient is nonzero unless the polynomial is identically zero
/// (stored as a single zero coefficient).
#[derive(Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<ExtReal>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<ExtReal>) -> Self {
        assert!(!coeffs.is_empty(), "a polynomial needs at least one coefficient");
        while coeffs.len() > 1 && coeffs.last().is_some_and(ExtReal::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_f64(coeffs: &[f64], prec: Precision) -> Self {
        Poly::new(coeffs.iter().map(|&c| ExtReal::from_f64(c, prec)).collect())
    }

    pub fn zero(prec: Precision) -> Self {
        Poly { coeffs: vec![ExtReal::zero(prec)] }
    }

    pub fn constant(c: ExtReal) -> Self {
        Poly::new(vec![c])
    }

    /// Monic polynomial `prod (t - r_i)`.
    pub fn from_roots(roots: &[ExtReal], prec: Precision) -> Self {
        let mut coeffs = vec![ExtReal::one(prec)];
        for r in roots {
            let mut next = vec![ExtReal::zero(prec); coeffs.len() + 1];
            for (j, c) in coeffs.iter().enumerate() {
                next[j + 1] += c;
                next[j] -= c * r;
            }
            coeffs = next;
        }
        Poly::new(coeffs)
    }

    pub fn coeffs(&self) -> &[ExtReal] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<ExtReal> {
        self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero()
    }

    pub fn leading(&self) -> &ExtReal {
        self.coeffs.last().expect("nonempty")
    }

    pub fn precision(&self) -> Precision {
        self.coeffs[0].precision()
    }

    pub fn max_abs_coeff(&self) -> ExtReal {
        self.coeffs.iter().map(ExtReal::abs).reduce(ExtReal::max).expect("nonempty")
    }

    /// Horner evaluation.
    pub fn eval(&self, t: &ExtReal) -> ExtReal {
        let mut acc = self.leading().clone();
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc * t + c;
        }
        acc
    }

    /// Value and first derivative in one Horner pass.
    pub fn eval_with_derivative(&self, t: &ExtReal) -> (ExtReal, ExtReal) {
        let mut p = self.leading().clone();
        let mut dp = ExtReal::zero(p.precision());
        for c in self.coeffs.iter().rev().skip(1) {
            dp = dp * t + &p;
            p = p * t + c;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> Poly {
        if self.degree() == 0 {
            return Poly::zero(self.precision());
        }
        Poly::new(self.coeffs.iter().enumerate().skip(1).map(|(j, c)| c * (j as f64)).collect())
    }

    pub fn scale(&self, s: &ExtReal) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let prec = self.precision();
        let coeffs = (0..n)
            .map(|j| {
                let mut c = ExtReal::zero(prec);
                if let Some(a) = self.coeffs.get(j) {
                    c += a;
                }
                if let Some(b) = other.coeffs.get(j) {
                    c += b;
                }
                c
            })
            .collect();
        Poly::new(coeffs)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let prec = self.precision();
        let mut out = vec![ExtReal::zero(prec); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    /// Divides every coefficient by the leading one.
    pub fn monic(&self) -> Poly {
        let lead = self.leading().clone();
        Poly::new(self.coeffs.iter().map(|c| c / &lead).collect())
    }

    /// Coefficients in reverse order: `t^n p(1/t)` for `n = degree`.
    pub fn reversed(&self) -> Poly {
        Poly::new(self.coeffs.iter().rev().cloned().collect())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(ExtReal::to_f64).collect()
    }
}

/// Evaluates `p` at `t` by Horner's scheme.
pub fn poly_eval(p: &Poly, t: &ExtReal) -> ExtReal {
    p.eval(t)
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coeffs.iter()).finish()
    }
}
