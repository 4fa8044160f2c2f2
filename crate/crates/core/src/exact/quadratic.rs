use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::real::Real;

/// Splits `n > 0` as `f^2 * d` with `d` square-free.
pub fn square_free_part(n: &BigInt) -> (BigInt, BigInt) {
    assert!(n.is_positive(), "square_free_part needs n > 0");
    let mut rest = n.clone();
    let mut f = BigInt::one();
    let mut d = BigInt::one();
    let mut p = BigInt::from(2);
    while &p * &p <= rest {
        let mut e = 0u32;
        while (&rest % &p).is_zero() {
            rest /= &p;
            e += 1;
        }
        for _ in 0..e / 2 {
            f *= &p;
        }
        if e % 2 == 1 {
            d *= &p;
        }
        p += if p == BigInt::from(2) { 1 } else { 2 };
    }
    d *= rest;
    (f, d)
}

pub fn is_perfect_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

/// `p + q*sqrt(d)` with rational `p, q` and square-free `d > 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticReal {
    pub p: BigRational,
    pub q: BigRational,
    d: BigInt,
}

fn rat(v: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(v.into())
}

impl QuadraticReal {
    /// Panics unless `d` is square-free and greater than one.
    pub fn new(p: BigRational, q: BigRational, d: BigInt) -> Self {
        let (f, core) = square_free_part(&d);
        assert!(f.is_one() && core > BigInt::one(), "radicand {d} must be square-free and > 1");
        QuadraticReal { p, q, d }
    }

    pub fn from_rational(p: BigRational, d: BigInt) -> Self {
        QuadraticReal { p, q: BigRational::zero(), d }
    }

    pub fn radicand(&self) -> &BigInt {
        &self.d
    }

    pub fn conjugate(&self) -> Self {
        QuadraticReal { p: self.p.clone(), q: -&self.q, d: self.d.clone() }
    }

    /// `p^2 - d q^2`.
    pub fn norm(&self) -> BigRational {
        &self.p * &self.p - rat(self.d.clone()) * &self.q * &self.q
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    pub fn signum(&self) -> i32 {
        let sp = sign_of(&self.p);
        let sq = sign_of(&self.q);
        if sq == 0 {
            return sp;
        }
        if sp == 0 || sp == sq {
            return sq;
        }
        // opposite signs: compare p^2 with d q^2
        match (&self.p * &self.p).cmp(&(rat(self.d.clone()) * &self.q * &self.q)) {
            Ordering::Greater => sp,
            Ordering::Less => sq,
            Ordering::Equal => 0,
        }
    }

    pub fn cmp_rational(&self, r: &BigRational) -> Ordering {
        let diff = QuadraticReal { p: &self.p - r, q: self.q.clone(), d: self.d.clone() };
        diff.signum().cmp(&0)
    }

    pub fn inv(&self) -> Option<Self> {
        let n = self.norm();
        if n.is_zero() {
            return None;
        }
        let c = self.conjugate();
        Some(QuadraticReal { p: &c.p / &n, q: &c.q / &n, d: self.d.clone() })
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        QuadraticReal { p: &self.p * k, q: &self.q * k, d: self.d.clone() }
    }

    pub fn add_rational(&self, k: &BigRational) -> Self {
        QuadraticReal { p: &self.p + k, q: self.q.clone(), d: self.d.clone() }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = QuadraticReal::from_rational(BigRational::one(), self.d.clone());
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn to_real(&self) -> Real {
        Real::from_rational(&self.p) + Real::from_rational(&self.q) * Real::from_bigint(&self.d).sqrt()
    }

    pub fn to_f64(&self) -> f64 {
        self.to_real().to_f64()
    }

    fn check_field(&self, o: &Self) {
        assert_eq!(self.d, o.d, "mixed quadratic fields");
    }
}

fn sign_of(r: &BigRational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

impl Add for &QuadraticReal {
    type Output = QuadraticReal;
    fn add(self, o: &QuadraticReal) -> QuadraticReal {
        self.check_field(o);
        QuadraticReal { p: &self.p + &o.p, q: &self.q + &o.q, d: self.d.clone() }
    }
}

impl Sub for &QuadraticReal {
    type Output = QuadraticReal;
    fn sub(self, o: &QuadraticReal) -> QuadraticReal {
        self.check_field(o);
        QuadraticReal { p: &self.p - &o.p, q: &self.q - &o.q, d: self.d.clone() }
    }
}

impl Mul for &QuadraticReal {
    type Output = QuadraticReal;
    fn mul(self, o: &QuadraticReal) -> QuadraticReal {
        self.check_field(o);
        let d = rat(self.d.clone());
        QuadraticReal {
            p: &self.p * &o.p + d * &self.q * &o.q,
            q: &self.p * &o.q + &self.q * &o.p,
            d: self.d.clone(),
        }
    }
}

impl Neg for QuadraticReal {
    type Output = QuadraticReal;
    fn neg(self) -> QuadraticReal {
        QuadraticReal { p: -self.p, q: -self.q, d: self.d }
    }
}

impl fmt::Display for QuadraticReal {
    /// Renders as `(P + Q√D)/R` over a common denominator.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let den = num_integer::Integer::lcm(self.p.denom(), self.q.denom());
        let pn = self.p.numer() * (&den / self.p.denom());
        let qn = self.q.numer() * (&den / self.q.denom());
        let qs = if qn.is_one() {
            String::new()
        } else if (-&qn).is_one() {
            "-".to_string()
        } else {
            qn.to_string()
        };
        let rad = format!("{qs}√{}", self.d);
        let body = if qn.is_zero() {
            pn.to_string()
        } else if pn.is_zero() {
            rad
        } else if qn.is_negative() {
            format!("{pn} - {}", rad.trim_start_matches('-'))
        } else {
            format!("{pn} + {rad}")
        };
        if den.is_one() {
            write!(f, "{body}")
        } else {
            write!(f, "({body})/{den}")
        }
    }
}
