use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use rug::float::{Constant, Round};
use rug::ops::Pow;
use rug::Float;

use super::XnumError;

/// Default working precision in decimal digits.
pub const DEFAULT_DIGITS: u32 = 128;
/// Smallest working precision accepted anywhere in the toolkit.
pub const MIN_DIGITS: u32 = 32;

/// Working precision, stored as decimal digits and converted to MPFR bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Precision(u32);

impl Precision {
    pub fn digits(digits: u32) -> Result<Self, XnumError> {
        if digits < MIN_DIGITS {
            return Err(XnumError::PrecisionTooLow { digits, min: MIN_DIGITS });
        }
        Ok(Precision(digits))
    }

    pub fn decimal_digits(self) -> u32 {
        self.0
    }

    /// Mantissa bits: ceil(digits * log2(10)) plus a few guard bits.
    pub fn bits(self) -> u32 {
        (f64::from(self.0) * std::f64::consts::LOG2_10).ceil() as u32 + 8
    }

    /// `10^(-digits/2)`, the tolerance used for "agrees to half the working precision".
    pub fn half_eps(self) -> ExtReal {
        ExtReal::exp10(-(self.0 as i32) / 2, self)
    }

    /// `10^(-digits)`.
    pub fn eps(self) -> ExtReal {
        ExtReal::exp10(-(self.0 as i32), self)
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision(DEFAULT_DIGITS)
    }
}

/// Extended-precision real number backed by an MPFR float.
///
/// Binary operations produce a result at the larger of the two operand
/// precisions, so values built from one [`Precision`] stay at that precision.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct ExtReal(Float);

fn bits_to_digits(bits: u32) -> u32 {
    ((f64::from(bits.saturating_sub(8))) / std::f64::consts::LOG2_10).floor() as u32
}

impl ExtReal {
    pub fn zero(prec: Precision) -> Self {
        ExtReal(Float::new(prec.bits()))
    }

    pub fn one(prec: Precision) -> Self {
        ExtReal(Float::with_val(prec.bits(), 1))
    }

    pub fn from_f64(v: f64, prec: Precision) -> Self {
        ExtReal(Float::with_val(prec.bits(), v))
    }

    pub fn from_i64(v: i64, prec: Precision) -> Self {
        ExtReal(Float::with_val(prec.bits(), v))
    }

    /// Exact ratio `num/den` rounded once at the working precision.
    pub fn from_ratio(num: i64, den: i64, prec: Precision) -> Self {
        let n = Float::with_val(prec.bits(), num);
        ExtReal(n / den)
    }

    /// `10^e`, correctly rounded.
    pub fn exp10(e: i32, prec: Precision) -> Self {
        let ten = Float::with_val(prec.bits(), 10);
        ExtReal(ten.pow(e))
    }

    pub fn pi(prec: Precision) -> Self {
        ExtReal(Float::with_val(prec.bits(), Constant::Pi))
    }

    /// Parses decimal text such as `-1.25E-0003`, `2.5e7` or `0.125`.
    pub fn parse(text: &str, prec: Precision) -> Result<Self, XnumError> {
        let trimmed = text.trim();
        let parsed = Float::parse(trimmed).map_err(|_| XnumError::Parse(trimmed.to_string()))?;
        Ok(ExtReal(Float::with_val(prec.bits(), parsed)))
    }

    pub fn precision(&self) -> Precision {
        Precision(bits_to_digits(self.0.prec()).max(MIN_DIGITS))
    }

    pub fn as_float(&self) -> &Float {
        &self.0
    }

    pub fn into_float(self) -> Float {
        self.0
    }

    pub fn from_float(f: Float) -> Self {
        ExtReal(f)
    }

    /// A constant at the same precision as `self`.
    pub fn lit(&self, v: f64) -> Self {
        ExtReal(Float::with_val(self.0.prec(), v))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    pub fn with_precision(&self, prec: Precision) -> Self {
        ExtReal(Float::with_val(prec.bits(), &self.0))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    pub fn is_sign_negative(&self) -> bool {
        self.0.is_sign_negative() && !self.0.is_zero()
    }

    pub fn is_sign_positive(&self) -> bool {
        self.0.is_sign_positive() && !self.0.is_zero()
    }

    /// -1, 0 or 1.
    pub fn signum_i(&self) -> i32 {
        match self.0.cmp0() {
            Some(Ordering::Less) => -1,
            Some(Ordering::Greater) => 1,
            _ => 0,
        }
    }

    pub fn abs(&self) -> Self {
        ExtReal(Float::with_val(self.0.prec(), self.0.abs_ref()))
    }

    pub fn sqrt(&self) -> Self {
        ExtReal(Float::with_val(self.0.prec(), self.0.sqrt_ref()))
    }

    pub fn ln(&self) -> Self {
        ExtReal(Float::with_val(self.0.prec(), self.0.ln_ref()))
    }

    pub fn exp(&self) -> Self {
        ExtReal(Float::with_val(self.0.prec(), self.0.exp_ref()))
    }

    pub fn log10(&self) -> Self {
        ExtReal(Float::with_val(self.0.prec(), self.0.log10_ref()))
    }

    pub fn sin(&self) -> Self {
        ExtReal(Float::with_val(self.0.prec(), self.0.sin_ref()))
    }

    pub fn cos(&self) -> Self {
        ExtReal(Float::with_val(self.0.prec(), self.0.cos_ref()))
    }

    pub fn recip(&self) -> Self {
        ExtReal(Float::with_val(self.0.prec(), self.0.recip_ref()))
    }

    pub fn square(&self) -> Self {
        ExtReal(Float::with_val(self.0.prec(), self.0.square_ref()))
    }

    /// `self^e` for real exponents. Exact at `0^e = 0` (e > 0) and `1^e = 1`.
    pub fn powf(&self, e: &ExtReal) -> Self {
        if self.0.is_zero() && e.0.cmp0() == Some(Ordering::Greater) {
            return ExtReal(Float::new(self.0.prec()));
        }
        if self.0 == 1 {
            return ExtReal(Float::with_val(self.0.prec(), 1));
        }
        let prec = self.0.prec().max(e.0.prec());
        ExtReal(Float::with_val(prec, (&self.0).pow(&e.0)))
    }

    pub fn powi(&self, e: i32) -> Self {
        ExtReal(Float::with_val(self.0.prec(), (&self.0).pow(e)))
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    /// Total order for sorting; NaN compares as equal to everything.
    pub fn total_cmp(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).unwrap_or(Ordering::Equal)
    }

    /// Scientific notation with `sig` significant digits and a four-digit
    /// signed exponent, e.g. `1.5251198659461835471669134E+0000`.
    pub fn to_sci_string(&self, sig: usize) -> String {
        assert!(sig >= 1);
        if self.0.is_zero() {
            return format!("{}E+0000", format_mantissa("0", sig));
        }
        let (neg, digits, exp) = self.0.to_sign_string_exp_round(10, Some(sig), Round::Nearest);
        let exp = exp.expect("finite nonzero value has an exponent") - 1;
        let sign = if neg { "-" } else { "" };
        let e_sign = if exp < 0 { '-' } else { '+' };
        format!("{sign}{}E{e_sign}{:04}", format_mantissa(&digits, sig), exp.abs())
    }

    /// Short scientific form with `sig` significant digits, e.g. `1.235E-2`.
    pub fn to_short_sci(&self, sig: usize) -> String {
        if self.0.is_zero() {
            return format!("{}E0", format_mantissa("0", sig));
        }
        let (neg, digits, exp) = self.0.to_sign_string_exp_round(10, Some(sig), Round::Nearest);
        let exp = exp.expect("finite nonzero value has an exponent") - 1;
        let sign = if neg { "-" } else { "" };
        format!("{sign}{}E{exp}", format_mantissa(&digits, sig))
    }
}

fn format_mantissa(digits: &str, sig: usize) -> String {
    let mut d: String = digits.chars().filter(|c| c.is_ascii_digit()).collect();
    while d.len() < sig {
        d.push('0');
    }
    if sig == 1 {
        d
    } else {
        format!("{}.{}", &d[..1], &d[1..sig])
    }
}

impl fmt::Debug for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_short_sci(20))
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sig = f.precision().unwrap_or(17).max(1);
        write!(f, "{}", self.to_short_sci(sig))
    }
}

macro_rules! bin_op {
    ($tr:ident, $m:ident, $atr:ident, $am:ident, $op:tt) => {
        impl $tr<&ExtReal> for &ExtReal {
            type Output = ExtReal;
            fn $m(self, rhs: &ExtReal) -> ExtReal {
                let prec = self.0.prec().max(rhs.0.prec());
                ExtReal(Float::with_val(prec, &self.0 $op &rhs.0))
            }
        }
        impl $tr<ExtReal> for ExtReal {
            type Output = ExtReal;
            fn $m(self, rhs: ExtReal) -> ExtReal {
                &self $op &rhs
            }
        }
        impl $tr<&ExtReal> for ExtReal {
            type Output = ExtReal;
            fn $m(self, rhs: &ExtReal) -> ExtReal {
                &self $op rhs
            }
        }
        impl $tr<ExtReal> for &ExtReal {
            type Output = ExtReal;
            fn $m(self, rhs: ExtReal) -> ExtReal {
                self $op &rhs
            }
        }
        impl $tr<f64> for &ExtReal {
            type Output = ExtReal;
            fn $m(self, rhs: f64) -> ExtReal {
                ExtReal(Float::with_val(self.0.prec(), &self.0 $op rhs))
            }
        }
        impl $tr<f64> for ExtReal {
            type Output = ExtReal;
            fn $m(self, rhs: f64) -> ExtReal {
                &self $op rhs
            }
        }
        impl $atr<&ExtReal> for ExtReal {
            fn $am(&mut self, rhs: &ExtReal) {
                *self = &*self $op rhs;
            }
        }
        impl $atr<ExtReal> for ExtReal {
            fn $am(&mut self, rhs: ExtReal) {
                *self = &*self $op &rhs;
            }
        }
    };
}

bin_op!(Add, add, AddAssign, add_assign, +);
bin_op!(Sub, sub, SubAssign, sub_assign, -);
bin_op!(Mul, mul, MulAssign, mul_assign, *);
bin_op!(Div, div, DivAssign, div_assign, /);

impl Neg for &ExtReal {
    type Output = ExtReal;
    fn neg(self) -> ExtReal {
        ExtReal(Float::with_val(self.0.prec(), -&self.0))
    }
}

impl Neg for ExtReal {
    type Output = ExtReal;
    fn neg(self) -> ExtReal {
        ExtReal(-self.0)
    }
}

impl PartialEq<f64> for ExtReal {
    fn eq(&self, other: &f64) -> bool {
        self.0 == *other
    }
}

impl PartialOrd<f64> for ExtReal {
    fn partial_cmp(&self, other: &f64) -> Option<Ordering> {
        self.0.partial_cmp(other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Precision {
        Precision::default()
    }

    #[test]
    fn precision_floor_enforced() {
        assert!(Precision::digits(31).is_err());
        assert_eq!(Precision::digits(32).unwrap().decimal_digits(), 32);
        assert_eq!(ExtReal::one(p()).precision().decimal_digits(), 128);
    }

    #[test]
    fn fractional_power_is_exact_at_zero_and_one() {
        let a = ExtReal::from_f64(0.25, p());
        assert!(ExtReal::zero(p()).powf(&a).is_zero());
        assert_eq!(ExtReal::one(p()).powf(&a), 1.0);
        let half = ExtReal::from_f64(0.5, p());
        let r = ExtReal::from_f64(0.25, p()).powf(&half);
        assert_eq!(r, 0.5);
    }

    #[test]
    fn sci_formatting() {
        let x = ExtReal::parse("1.5251198659461835471669134E+0000", p()).unwrap();
        assert_eq!(x.to_sci_string(25), "1.525119865946183547166913E+0000");
        let y = ExtReal::parse("-2.2376872996078341567977828E-0010", p()).unwrap();
        assert_eq!(y.to_sci_string(26), "-2.2376872996078341567977828E-0010");
        assert_eq!(ExtReal::from_f64(0.01235, p()).to_short_sci(4), "1.235E-2");
        assert_eq!(ExtReal::zero(p()).to_sci_string(3), "0.00E+0000");
        assert_eq!(ExtReal::from_f64(40.0, p()).to_sci_string(3), "4.00E+0001");
    }

    #[test]
    fn arithmetic_is_deterministic() {
        let a = ExtReal::from_ratio(1, 3, p());
        let b = ExtReal::from_ratio(2, 7, p());
        let x = (&a * &b + &a) / &b - &a;
        let y = (&a * &b + &a) / &b - &a;
        assert_eq!(x, y);
        assert!((x - ExtReal::from_ratio(7, 6, p())).abs() < p().eps() * 10.0);
    }
}
