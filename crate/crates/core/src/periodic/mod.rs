//! Period-n points of a toral automorphism: exact enumeration, the odd-period
//! inner lattice and containment lattices, and lattice-point counting.

pub mod snf;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{companion_u, HyperbolicMap, IntMatrix2};

pub use snf::{smith, Smith};

pub const DEFAULT_CAP: u64 = 1_000_000;

/// A point of the torus with rational coordinates in `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RationalPoint {
    pub x: BigRational,
    pub y: BigRational,
}

fn frac(r: BigRational) -> BigRational {
    let fl = r.floor();
    r - fl
}

impl RationalPoint {
    pub fn new(x: BigRational, y: BigRational) -> Self {
        RationalPoint { x: frac(x), y: frac(y) }
    }

    pub fn from_ints(xn: i64, xd: i64, yn: i64, yd: i64) -> Self {
        Self::new(
            BigRational::new(xn.into(), xd.into()),
            BigRational::new(yn.into(), yd.into()),
        )
    }

    pub fn origin() -> Self {
        Self::from_ints(0, 1, 0, 1)
    }

    pub fn to_f64(&self) -> [f64; 2] {
        [self.x.to_f64().unwrap_or(f64::NAN), self.y.to_f64().unwrap_or(f64::NAN)]
    }

    /// `[[xnum, xden], [ynum, yden]]`.
    pub fn as_pairs(&self) -> [[String; 2]; 2] {
        [
            [self.x.numer().to_string(), self.x.denom().to_string()],
            [self.y.numer().to_string(), self.y.denom().to_string()],
        ]
    }

    pub fn coords(&self) -> [BigRational; 2] {
        [self.x.clone(), self.y.clone()]
    }
}

impl fmt::Display for RationalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Exact test that `(A^n - I) x` is an integer vector.
pub fn is_periodic(map: &HyperbolicMap, x: &RationalPoint, n: u32) -> bool {
    is_zero_mod_one(&map.power(n).minus_identity(), x)
}

pub fn is_zero_mod_one(m: &IntMatrix2, x: &RationalPoint) -> bool {
    m.apply(&x.coords()).iter().all(|c| c.is_integer())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OddPeriodData {
    pub k: u32,
    pub n: u32,
    pub s_k: BigInt,
    /// `(tr A - 2) S_k`
    pub s_k_prime: BigInt,
    pub r_k: BigInt,
    /// `S_k^2`
    pub n_n: BigInt,
}

pub fn odd_data(map: &HyperbolicMap, k: u32) -> OddPeriodData {
    let mut s = BigInt::one();
    let mut r = if k.is_multiple_of(2) { BigInt::one() } else { -BigInt::one() };
    for j in 1..=k {
        let tj = map.trace_power(j);
        s += &tj;
        if (k - j).is_multiple_of(2) {
            r += tj;
        } else {
            r -= tj;
        }
    }
    let tm2: BigInt = map.trace() - 2;
    let data = OddPeriodData {
        k,
        n: 2 * k + 1,
        s_k_prime: &tm2 * &s,
        n_n: &s * &s,
        s_k: s,
        r_k: r,
    };
    debug_assert_eq!(map.h(data.n), -(&tm2 * &data.n_n));
    data
}

#[derive(Clone, Debug)]
pub struct PeriodicSet {
    pub n: u32,
    pub points: Vec<RationalPoint>,
    pub count: BigInt,
}

fn check_cap(what: &'static str, count: &BigInt, cap: u64) -> Result<u64> {
    match count.to_u64() {
        Some(c) if c <= cap => Ok(c),
        _ => Err(Error::CapExceeded { what, count: count.to_string(), cap }),
    }
}

/// Solutions of `M x = 0 mod 1` for nonsingular `M`, sorted.
pub fn kernel_mod_one(m: &IntMatrix2, cap: u64) -> Result<Vec<RationalPoint>> {
    let det = m.det().abs();
    if det.is_zero() {
        return Err(Error::invalid("singular matrix has infinitely many solutions"));
    }
    check_cap("periodic points", &det, cap)?;
    let s = smith(m);
    let d1 = s.d1.to_u64().expect("bounded by cap");
    let d2 = s.d2.to_u64().expect("bounded by cap");
    let q = &s.q;
    let mut pts: Vec<RationalPoint> = (0..d1)
        .into_par_iter()
        .flat_map_iter(|i| {
            let u = BigRational::new(i.into(), s.d1.clone());
            let den2 = s.d2.clone();
            (0..d2).map(move |j| {
                let v = BigRational::new(j.into(), den2.clone());
                let xy = q.apply(&[u.clone(), v]);
                let [x, y] = xy;
                RationalPoint::new(x, y)
            })
        })
        .collect();
    pts.par_sort_unstable();
    Ok(pts)
}

pub fn enumerate_periodic(map: &HyperbolicMap, n: u32, cap: u64) -> Result<PeriodicSet> {
    let m = map.power(n).minus_identity();
    let points = kernel_mod_one(&m, cap)?;
    Ok(PeriodicSet { n, count: map.h(n).abs(), points })
}

/// `{(m/S_k, j/S_k)}` for `0 <= m, j < S_k`.
pub fn inner_lattice_odd(map: &HyperbolicMap, k: u32, cap: u64) -> Result<Vec<RationalPoint>> {
    let s = odd_data(map, k).s_k;
    check_cap("inner lattice points", &(&s * &s), cap)?;
    let sz = s.to_i64().expect("bounded by cap");
    let mut out = Vec::with_capacity((sz * sz) as usize);
    for m in 0..sz {
        for j in 0..sz {
            out.push(RationalPoint::new(
                BigRational::new(m.into(), s.clone()),
                BigRational::new(j.into(), s.clone()),
            ));
        }
    }
    Ok(out)
}

/// Common denominator `S_k'` of the period-(2k+1) points.
pub fn candidate_lattice_odd(map: &HyperbolicMap, k: u32) -> BigInt {
    odd_data(map, k).s_k_prime
}

/// Common denominator `g_k = (t^2 - 4) u_k` of the period-2k points.
pub fn candidate_lattice_even(map: &HyperbolicMap, k: u32) -> Result<BigInt> {
    if k == 0 {
        return Err(Error::invalid("even containment lattice needs k >= 1"));
    }
    Ok(&map.spectral.disc * companion_u(map.trace(), k))
}

/// Lattice points in the half-open parallelogram spanned from `v[0]` by the
/// edges to `v[1]` and `v[2]`; `v[3]` must be the opposite corner.
pub fn pick_count(v: &[[BigInt; 2]; 4]) -> Result<BigInt> {
    let e1 = [&v[1][0] - &v[0][0], &v[1][1] - &v[0][1]];
    let e2 = [&v[2][0] - &v[0][0], &v[2][1] - &v[0][1]];
    if &v[1][0] + &v[2][0] - &v[0][0] != v[3][0] || &v[1][1] + &v[2][1] - &v[0][1] != v[3][1] {
        return Err(Error::invalid("vertices do not form a parallelogram"));
    }
    let area = (&e1[0] * &e2[1] - &e1[1] * &e2[0]).abs();
    if area.is_zero() {
        return Err(Error::DegenerateParallelogram);
    }
    let n1 = e1[0].gcd(&e1[1]) + 1;
    let n2 = e2[0].gcd(&e2[1]) + 1;
    let boundary: BigInt = (&n1 + &n2) * 2 - 4;
    let interior = &area - &boundary / 2 + 1;
    Ok(interior + n1 + n2 - 3)
}

/// Vertices of `M [0,1]^2`: `0, (a, c), (b, d), (a+b, c+d)`.
pub fn image_vertices(m: &IntMatrix2) -> [[BigInt; 2]; 4] {
    let z = BigInt::zero();
    [
        [z.clone(), z],
        [m.a.clone(), m.c.clone()],
        [m.b.clone(), m.d.clone()],
        [&m.a + &m.b, &m.c + &m.d],
    ]
}
