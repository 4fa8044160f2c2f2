//! Decimal high-precision reals for quantities that mix quadratic
//! irrationals with transcendental rates (`r_n = e^{-alpha n}`).

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use dashu_base::SquareRoot;
use dashu_float::DBig;
use dashu_int::IBig;
use num_bigint::BigInt;
use num_rational::BigRational;

/// Working precision in significant decimal digits.
pub const PRECISION_DIGITS: usize = 60;

#[derive(Clone, Debug, PartialEq, PartialOrd)]
pub struct Real(DBig);

fn ibig(v: &BigInt) -> IBig {
    v.to_string().parse().expect("decimal integer round-trips")
}

impl Real {
    fn wrap(v: DBig) -> Self {
        Real(v.with_precision(PRECISION_DIGITS).value())
    }

    pub fn zero() -> Self {
        Self::from_i64(0)
    }

    pub fn one() -> Self {
        Self::from_i64(1)
    }

    pub fn from_i64(v: i64) -> Self {
        Self::wrap(DBig::from(v))
    }

    pub fn from_bigint(v: &BigInt) -> Self {
        Self::wrap(DBig::from(ibig(v)))
    }

    pub fn from_rational(v: &BigRational) -> Self {
        Self::from_bigint(v.numer()) / Self::from_bigint(v.denom())
    }

    /// Exact conversion of the binary value of `v`.
    pub fn from_f64(v: f64) -> Self {
        let r = BigRational::from_float(v).expect("finite float");
        Self::from_rational(&r)
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().value()
    }

    pub fn sqrt(&self) -> Self {
        Self::wrap(self.0.sqrt())
    }

    pub fn ln(&self) -> Self {
        Self::wrap(self.0.ln())
    }

    pub fn exp(&self) -> Self {
        Self::wrap(self.0.exp())
    }

    /// Machin's formula to working precision.
    pub fn pi() -> Self {
        fn atan_inv(x: i64) -> Real {
            let x2 = Real::from_i64(x * x);
            let mut pow = Real::one() / Real::from_i64(x);
            let mut acc = Real::zero();
            let eps = Real::one() / Real::from_i64(10).powi(PRECISION_DIGITS as u32 + 5);
            let mut k = 0i64;
            while pow > eps {
                let term = &pow / Real::from_i64(2 * k + 1);
                acc = if k % 2 == 0 { acc + term } else { acc - term };
                pow = pow / &x2;
                k += 1;
            }
            acc
        }
        Real::from_i64(16) * atan_inv(5) - Real::from_i64(4) * atan_inv(239)
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// `self^y` for positive `self`.
    pub fn powf(&self, y: &Real) -> Self {
        (y * &self.ln()).exp()
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn is_negative(&self) -> bool {
        self.0 < DBig::ZERO
    }

    pub fn is_positive(&self) -> bool {
        self.0 > DBig::ZERO
    }

    pub fn ceil_int(&self) -> BigInt {
        let v = self.0.ceil().to_int().value();
        v.to_string().parse().expect("integer")
    }

    pub fn floor_int(&self) -> BigInt {
        let v = self.0.floor().to_int().value();
        v.to_string().parse().expect("integer")
    }

    pub fn max(self, other: Real) -> Real {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Real) -> Real {
        if other < self {
            other
        } else {
            self
        }
    }

    /// Relative difference `|a-b| / max(|a|,|b|)`; zero when both vanish.
    pub fn rel_diff(&self, other: &Real) -> Real {
        let scale = self.abs().max(other.abs());
        if scale == Real::zero() {
            return Real::zero();
        }
        (self - other).abs() / scale
    }

    /// Scientific notation with `digits` significant digits, e.g. `2.3629e-1`.
    pub fn to_sci(&self, digits: usize) -> String {
        let repr = self.0.repr();
        let sig = repr.significand();
        if sig.is_zero() {
            return "0".to_string();
        }
        let neg = sig < &IBig::ZERO;
        let mut s = sig.to_string();
        if neg {
            s.remove(0);
        }
        let exp10 = repr.exponent() + s.len() as isize - 1;
        let digits = digits.max(1);
        // round half up on the decimal string
        let mut body: Vec<u8> = s.bytes().map(|c| c - b'0').collect();
        let mut exp10 = exp10;
        if body.len() > digits {
            let round_up = body[digits] >= 5;
            body.truncate(digits);
            if round_up {
                let mut i = digits;
                loop {
                    if i == 0 {
                        body.insert(0, 1);
                        body.truncate(digits);
                        exp10 += 1;
                        break;
                    }
                    i -= 1;
                    if body[i] == 9 {
                        body[i] = 0;
                    } else {
                        body[i] += 1;
                        break;
                    }
                }
            }
        }
        while body.len() < digits {
            body.push(0);
        }
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        out.push((b'0' + body[0]) as char);
        if digits > 1 {
            out.push('.');
            for d in &body[1..] {
                out.push((b'0' + d) as char);
            }
        }
        out.push_str(&format!("e{exp10}"));
        out
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(30);
        f.write_str(&self.to_sci(digits))
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident) => {
        impl $tr<&Real> for &Real {
            type Output = Real;
            fn $m(self, rhs: &Real) -> Real {
                Real::wrap((&self.0).$m(&rhs.0))
            }
        }
        impl $tr<Real> for Real {
            type Output = Real;
            fn $m(self, rhs: Real) -> Real {
                Real::wrap(self.0.$m(rhs.0))
            }
        }
        impl $tr<&Real> for Real {
            type Output = Real;
            fn $m(self, rhs: &Real) -> Real {
                Real::wrap(self.0.$m(&rhs.0))
            }
        }
        impl $tr<Real> for &Real {
            type Output = Real;
            fn $m(self, rhs: Real) -> Real {
                Real::wrap((&self.0).$m(rhs.0))
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(-self.0)
    }
}

impl From<i64> for Real {
    fn from(v: i64) -> Self {
        Real::from_i64(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_ratio_log_to_fifty_digits() {
        let five = Real::from_i64(5);
        let phi2 = (Real::from_i64(3) + five.sqrt()) / Real::from_i64(2);
        // ln((3+sqrt5)/2) = 2 ln(phi)
        let expected = "9.6242365011920689499551782684873684627036866877132e-1";
        assert_eq!(phi2.ln().to_sci(50), expected);
    }

    #[test]
    fn pi_digits() {
        assert_eq!(Real::pi().to_sci(40), "3.141592653589793238462643383279502884197e0");
    }

    #[test]
    fn exp_ln_round_trip() {
        let x = Real::from_f64(0.3);
        let back = x.ln().exp();
        assert!(back.rel_diff(&x) < Real::from_f64(1e-55));
    }

    #[test]
    fn sci_formatting_rounds() {
        assert_eq!(Real::from_f64(0.5).to_sci(3), "5.00e-1");
        assert_eq!(Real::from_i64(-12345).to_sci(3), "-1.23e4");
        assert_eq!(Real::from_i64(9999).to_sci(2), "1.0e4");
        assert_eq!(Real::zero().to_sci(4), "0");
    }

    #[test]
    fn floor_and_ceil() {
        let x = Real::from_f64(2.5);
        assert_eq!(x.floor_int(), BigInt::from(2));
        assert_eq!(x.ceil_int(), BigInt::from(3));
        let y = Real::from_f64(-2.5);
        assert_eq!(y.floor_int(), BigInt::from(-3));
    }
}
