use std::fmt;
use std::ops::{Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A 2x2 integer matrix `[[a, b], [c, d]]` with arbitrary-precision entries.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix2 {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl IntMatrix2 {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>, d: impl Into<BigInt>) -> Self {
        IntMatrix2 { a: a.into(), b: b.into(), c: c.into(), d: d.into() }
    }

    pub fn from_entries(e: [i64; 4]) -> Self {
        Self::new(e[0], e[1], e[2], e[3])
    }

    /// Parses `a,b,c,d`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(Error::invalid(format!("expected 4 comma-separated entries, got {s:?}")));
        }
        let mut v = Vec::with_capacity(4);
        for p in parts {
            let x: BigInt = p.parse().map_err(|_| Error::invalid(format!("bad matrix entry {p:?}")))?;
            v.push(x);
        }
        let mut it = v.into_iter();
        Ok(IntMatrix2 {
            a: it.next().unwrap(),
            b: it.next().unwrap(),
            c: it.next().unwrap(),
            d: it.next().unwrap(),
        })
    }

    pub fn identity() -> Self {
        Self::new(1, 0, 0, 1)
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn trace(&self) -> BigInt {
        &self.a + &self.d
    }

    pub fn minus_identity(&self) -> Self {
        IntMatrix2 {
            a: &self.a - 1,
            b: self.b.clone(),
            c: self.c.clone(),
            d: &self.d - 1,
        }
    }

    /// `adj(M)` with `M * adj(M) = det(M) I`.
    pub fn adjugate(&self) -> Self {
        IntMatrix2 {
            a: self.d.clone(),
            b: -&self.b,
            c: -&self.c,
            d: self.a.clone(),
        }
    }

    /// Exact inverse of a unimodular matrix.
    pub fn inverse_unimodular(&self) -> Option<Self> {
        let det = self.det();
        if det.is_one() {
            Some(self.adjugate())
        } else if (-&det).is_one() {
            let adj = self.adjugate();
            Some(IntMatrix2 { a: -adj.a, b: -adj.b, c: -adj.c, d: -adj.d })
        } else {
            None
        }
    }

    /// `A^n` by binary exponentiation; `A^0 = I`.
    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::identity();
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

    pub fn apply(&self, v: &[BigRational; 2]) -> [BigRational; 2] {
        let a = BigRational::from_integer(self.a.clone());
        let b = BigRational::from_integer(self.b.clone());
        let c = BigRational::from_integer(self.c.clone());
        let d = BigRational::from_integer(self.d.clone());
        [&a * &v[0] + &b * &v[1], &c * &v[0] + &d * &v[1]]
    }

    pub fn apply_int(&self, v: [&BigInt; 2]) -> [BigInt; 2] {
        [&self.a * v[0] + &self.b * v[1], &self.c * v[0] + &self.d * v[1]]
    }

    pub fn to_f64(&self) -> [[f64; 2]; 2] {
        let f = |x: &BigInt| x.to_f64().unwrap_or(f64::NAN);
        [[f(&self.a), f(&self.b)], [f(&self.c), f(&self.d)]]
    }

    pub fn max_abs_entry(&self) -> BigInt {
        [&self.a, &self.b, &self.c, &self.d].iter().map(|x| x.abs()).max().unwrap_or_else(BigInt::zero)
    }

    pub fn entries(&self) -> [&BigInt; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }
}

impl Mul for &IntMatrix2 {
    type Output = IntMatrix2;
    fn mul(self, o: &IntMatrix2) -> IntMatrix2 {
        IntMatrix2 {
            a: &self.a * &o.a + &self.b * &o.c,
            b: &self.a * &o.b + &self.b * &o.d,
            c: &self.c * &o.a + &self.d * &o.c,
            d: &self.c * &o.b + &self.d * &o.d,
        }
    }
}

impl Mul for IntMatrix2 {
    type Output = IntMatrix2;
    fn mul(self, o: IntMatrix2) -> IntMatrix2 {
        &self * &o
    }
}

impl Sub for &IntMatrix2 {
    type Output = IntMatrix2;
    fn sub(self, o: &IntMatrix2) -> IntMatrix2 {
        IntMatrix2 {
            a: &self.a - &o.a,
            b: &self.b - &o.b,
            c: &self.c - &o.c,
            d: &self.d - &o.d,
        }
    }
}

impl fmt::Display for IntMatrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}
