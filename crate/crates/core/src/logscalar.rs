//! Extended-range signed scalars stored as `(sign, ln |x|)`.
//!
//! Enstrophy bounds reach `exp(c G^2)` and energy breakpoints fall to
//! `exp(-c G^2)`, far outside the native exponent range already at `G = 2`.
//! Products and quotients are exact in the log domain; sums use the usual
//! log-sum-exp reduction around the larger magnitude.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::scalar::Scalar;

/// Signed magnitude carried as its natural logarithm.
///
/// Zero has `sign == 0` and `ln_mag == -inf`.
#[derive(Clone, Copy, Debug)]
pub struct LogScalar<T = f64> {
    sign: i8,
    ln_mag: T,
}

impl<T: Scalar> LogScalar<T> {
    pub fn zero() -> Self {
        LogScalar {
            sign: 0,
            ln_mag: T::neg_infinity(),
        }
    }

    pub fn one() -> Self {
        LogScalar {
            sign: 1,
            ln_mag: T::zero(),
        }
    }

    /// Encodes a native value.
    pub fn from_value(x: T) -> Self {
        if x == T::zero() {
            Self::zero()
        } else if x > T::zero() {
            LogScalar {
                sign: 1,
                ln_mag: x.ln(),
            }
        } else {
            LogScalar {
                sign: -1,
                ln_mag: (-x).ln(),
            }
        }
    }

    /// The positive number `exp(ln)`; `ln = -inf` gives zero.
    pub fn from_ln(ln: T) -> Self {
        Self::from_parts(1, ln)
    }

    pub fn from_parts(sign: i8, ln_mag: T) -> Self {
        if sign == 0 || ln_mag == T::neg_infinity() {
            Self::zero()
        } else {
            LogScalar {
                sign: sign.signum(),
                ln_mag,
            }
        }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn ln_mag(&self) -> T {
        self.ln_mag
    }

    /// Natural log of the value, defined only for positive values.
    pub fn ln(&self) -> Option<T> {
        (self.sign > 0).then_some(self.ln_mag)
    }

    pub fn log10_mag(&self) -> T {
        self.ln_mag / T::lit(std::f64::consts::LN_10)
    }

    /// Decodes to a native value (saturating to `inf` or `0`).
    pub fn value(&self) -> T {
        match self.sign {
            0 => T::zero(),
            s if s > 0 => self.ln_mag.exp(),
            _ => -self.ln_mag.exp(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn is_positive(&self) -> bool {
        self.sign > 0
    }

    pub fn is_finite(&self) -> bool {
        self.sign == 0 || self.ln_mag.is_finite()
    }

    pub fn abs(self) -> Self {
        Self::from_parts(self.sign.abs(), self.ln_mag)
    }

    pub fn recip(self) -> Self {
        if self.sign == 0 {
            LogScalar {
                sign: 1,
                ln_mag: T::infinity(),
            }
        } else {
            LogScalar {
                sign: self.sign,
                ln_mag: -self.ln_mag,
            }
        }
    }

    /// `|x|^p` carrying the sign of `x`. Intended for non-negative `x`.
    pub fn powf(self, p: T) -> Self {
        if self.sign == 0 {
            return if p == T::zero() {
                Self::one()
            } else {
                Self::zero()
            };
        }
        Self::from_parts(self.sign, self.ln_mag * p)
    }

    pub fn scale(self, factor: T) -> Self {
        self * Self::from_value(factor)
    }
}

impl<T: Scalar> From<T> for LogScalar<T> {
    fn from(x: T) -> Self {
        Self::from_value(x)
    }
}

impl<T: Scalar> Neg for LogScalar<T> {
    type Output = Self;
    fn neg(self) -> Self {
        LogScalar {
            sign: -self.sign,
            ln_mag: self.ln_mag,
        }
    }
}

impl<T: Scalar> Add for LogScalar<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        if self.sign == 0 {
            return rhs;
        }
        if rhs.sign == 0 {
            return self;
        }
        let (big, small) = if self.ln_mag >= rhs.ln_mag {
            (self, rhs)
        } else {
            (rhs, self)
        };
        if big.ln_mag.is_infinite() {
            return big;
        }
        let d = small.ln_mag - big.ln_mag;
        if big.sign == small.sign {
            Self::from_parts(big.sign, big.ln_mag + d.exp().ln_1p())
        } else if d == T::zero() {
            Self::zero()
        } else {
            Self::from_parts(big.sign, big.ln_mag + (-d.exp_m1()).ln())
        }
    }
}

impl<T: Scalar> Sub for LogScalar<T> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<T: Scalar> Mul for LogScalar<T> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: Self) -> Self {
        if self.sign == 0 || rhs.sign == 0 {
            return Self::zero();
        }
        Self::from_parts(self.sign * rhs.sign, self.ln_mag + rhs.ln_mag)
    }
}

impl<T: Scalar> Div for LogScalar<T> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        self * rhs.recip()
    }
}

impl<T: Scalar> PartialEq for LogScalar<T> {
    fn eq(&self, other: &Self) -> bool {
        self.sign == other.sign && (self.sign == 0 || self.ln_mag == other.ln_mag)
    }
}

impl<T: Scalar> PartialOrd for LogScalar<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.sign.cmp(&other.sign) {
            Ordering::Equal => match self.sign {
                0 => Some(Ordering::Equal),
                s if s > 0 => self.ln_mag.partial_cmp(&other.ln_mag),
                _ => other.ln_mag.partial_cmp(&self.ln_mag),
            },
            ord => Some(ord),
        }
    }
}

impl<T: Scalar> fmt::Display for LogScalar<T> {
    /// Scientific notation computed from the logarithm, so magnitudes
    /// beyond the native range print correctly. Precision defaults to 6.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sign == 0 {
            return write!(f, "0");
        }
        let digits = f.precision().unwrap_or(6);
        let lg = self.log10_mag().to_f64().unwrap_or(f64::NAN);
        let s = sci_from_log10(lg, digits);
        if self.sign < 0 {
            write!(f, "-{s}")
        } else {
            write!(f, "{s}")
        }
    }
}

/// Formats `10^lg` as `m.mmm…e±k` with `digits` digits after the point.
pub fn sci_from_log10(lg: f64, digits: usize) -> String {
    if !lg.is_finite() {
        return if lg > 0.0 { "inf".into() } else { "0".into() };
    }
    let mut k = lg.floor();
    let mut m = 10f64.powf(lg - k);
    let mut text = format!("{m:.digits$}");
    if text.starts_with("10") {
        k += 1.0;
        m /= 10.0;
        text = format!("{m:.digits$}");
    }
    format!("{text}e{}", k as i64)
}

#[cfg(test)]
mod tests {
    use super::*;

    type L = LogScalar<f64>;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn round_trip_native() {
        for &x in &[1.0, -2.5, 1e-12, 3e17, -7e-5] {
            assert!(close(L::from_value(x).value(), x, 1e-14));
        }
        assert_eq!(L::from_value(0.0).value(), 0.0);
        assert!(L::zero().is_zero());
    }

    #[test]
    fn arithmetic_matches_native() {
        let a = L::from_value(3.0);
        let b = L::from_value(-5.0);
        assert!(close((a + b).value(), -2.0, 1e-14));
        assert!(close((a - b).value(), 8.0, 1e-14));
        assert!(close((a * b).value(), -15.0, 1e-14));
        assert!(close((a / b).value(), -0.6, 1e-14));
        assert!((a - a).is_zero());
    }

    #[test]
    fn beyond_native_range() {
        let big = L::from_ln(1000.0);
        let sum = big + big;
        assert!(close(sum.ln_mag(), 1000.0 + 2f64.ln(), 1e-15));
        assert!(big.value().is_infinite());
        let tiny = L::from_ln(-9000.0);
        assert_eq!(tiny.value(), 0.0);
        assert!(tiny.is_positive());
        assert!(tiny < L::from_value(1e-300));
    }

    #[test]
    fn ordering_with_signs() {
        let v = [
            L::from_value(-3.0),
            L::from_value(-1.0),
            L::zero(),
            L::from_value(2.0),
        ];
        for w in v.windows(2) {
            assert!(w[0] < w[1]);
        }
    }

    #[test]
    fn display_out_of_range() {
        assert_eq!(format!("{:.3}", L::from_ln(1000.0)), "1.970e434");
        assert_eq!(format!("{:.2}", L::from_value(-0.00123)), "-1.23e-3");
        assert_eq!(sci_from_log10(2.0, 3), "1.000e2");
    }

    #[test]
    fn powf_and_recip() {
        let x = L::from_value(16.0);
        assert!(close(x.powf(0.6).value(), 16f64.powf(0.6), 1e-14));
        assert!(close(x.recip().value(), 1.0 / 16.0, 1e-15));
        assert!(L::zero().powf(2.0).is_zero());
    }

    #[test]
    fn works_in_single_precision() {
        let a = LogScalar::<f32>::from_value(3.0);
        let b = LogScalar::<f32>::from_value(4.0);
        assert!(((a + b).value() - 7.0).abs() < 1e-5);
    }
}
