use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::matrix::IntMatrix2;
use super::quadratic::{square_free_part, QuadraticReal};
use super::real::Real;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct SpectralData {
    pub trace: BigInt,
    /// Determinant, always +1 or -1.
    pub det: i8,
    /// `t^2 - 4 det`, not reduced.
    pub disc: BigInt,
    /// The eigenvalue with `|lambda| > 1`.
    pub lambda: QuadraticReal,
    /// `log |lambda|`.
    pub log_lambda: Real,
}

pub fn spectral_analyze(m: &IntMatrix2) -> Result<SpectralData> {
    let det = m.det();
    let sigma: i8 = if det.is_one() {
        1
    } else if (-&det).is_one() {
        -1
    } else {
        return Err(Error::NotUnimodular { det: det.to_string() });
    };
    let t = m.trace();
    let elliptic = if sigma == 1 { t.abs() <= BigInt::from(2) } else { t.is_zero() };
    if elliptic {
        return Err(Error::NotHyperbolic { trace: t.to_string(), det: sigma });
    }
    let disc = &t * &t - BigInt::from(4 * sigma as i64);
    let (f, core) = square_free_part(&disc);
    // lambda = (t + sgn(t) f sqrt(core)) / 2
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let qcoef = if t.is_negative() { -f } else { f };
    let lambda = QuadraticReal::new(
        BigRational::from_integer(t.clone()) * &half,
        BigRational::from_integer(qcoef) * &half,
        core,
    );
    let log_lambda = lambda.to_real().abs().ln();
    Ok(SpectralData { trace: t, det: sigma, disc, lambda, log_lambda })
}

impl SpectralData {
    /// `t_n = tr(A^n)` from `t_n = t t_{n-1} - det t_{n-2}`.
    pub fn trace_power(&self, n: u32) -> BigInt {
        let sigma = BigInt::from(self.det);
        let mut prev = BigInt::from(2);
        let mut cur = self.trace.clone();
        if n == 0 {
            return prev;
        }
        for _ in 1..n {
            let next = &self.trace * &cur - &sigma * &prev;
            prev = cur;
            cur = next;
        }
        cur
    }

    /// `det(A^n - I) = det^n - t_n + 1`.
    pub fn h(&self, n: u32) -> BigInt {
        let sign = if self.det == -1 && n % 2 == 1 { -1 } else { 1 };
        BigInt::from(sign) - self.trace_power(n) + 1
    }

    pub fn lambda_real(&self) -> Real {
        self.lambda.to_real()
    }

    /// `lambda^{-1}` (equal to `det / lambda`).
    pub fn lambda_inv(&self) -> QuadraticReal {
        self.lambda.inv().expect("unit")
    }
}

/// `u_k` with `lambda^k - lambda^{-k} = u_k sqrt(t^2 - 4)`; needs det 1.
pub fn companion_u(t: &BigInt, k: u32) -> BigInt {
    let mut prev = BigInt::zero();
    let mut cur = BigInt::one();
    if k == 0 {
        return prev;
    }
    for _ in 1..k {
        let next = t * &cur - &prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Replaces `A` by `A^2` when `det A = -1` or `lambda < -1`.
pub fn normalize(m: &IntMatrix2) -> Result<(IntMatrix2, u32)> {
    let sd = spectral_analyze(m)?;
    if sd.det == 1 && sd.trace.is_positive() {
        Ok((m.clone(), 1))
    } else {
        Ok((m.pow(2), 2))
    }
}

/// A hyperbolic automorphism, kept alongside its normalized form.
#[derive(Clone, Debug)]
pub struct HyperbolicMap {
    pub original: IntMatrix2,
    /// Normalized matrix: det 1, trace > 2.
    pub matrix: IntMatrix2,
    pub exponent: u32,
    pub spectral: SpectralData,
}

impl HyperbolicMap {
    pub fn new(original: IntMatrix2) -> Result<Self> {
        let (matrix, exponent) = normalize(&original)?;
        let spectral = spectral_analyze(&matrix)?;
        Ok(HyperbolicMap { original, matrix, exponent, spectral })
    }

    pub fn from_entries(e: [i64; 4]) -> Result<Self> {
        Self::new(IntMatrix2::from_entries(e))
    }

    pub fn cat() -> Self {
        Self::from_entries([2, 1, 1, 1]).expect("cat map is hyperbolic")
    }

    pub fn trace(&self) -> &BigInt {
        &self.spectral.trace
    }

    pub fn trace_power(&self, n: u32) -> BigInt {
        self.spectral.trace_power(n)
    }

    pub fn h(&self, n: u32) -> BigInt {
        self.spectral.h(n)
    }

    pub fn log_lambda(&self) -> &Real {
        &self.spectral.log_lambda
    }

    pub fn lambda_real(&self) -> Real {
        self.spectral.lambda_real()
    }

    /// `lambda^n` evaluated in high precision.
    pub fn lambda_pow(&self, n: u32) -> Real {
        self.lambda_real().powi(n)
    }

    pub fn power(&self, n: u32) -> IntMatrix2 {
        self.matrix.pow(n)
    }

    /// Eigenvector of the normalized matrix for `mu`: `[b, mu - a]`, or `[mu - d, c]` when `b = 0`.
    pub fn eigenvector(&self, mu: &QuadraticReal) -> [QuadraticReal; 2] {
        let m = &self.matrix;
        let d = mu.radicand().clone();
        let int = |v: &BigInt| QuadraticReal::from_rational(BigRational::from_integer(v.clone()), d.clone());
        if !m.b.is_zero() {
            [int(&m.b), mu.add_rational(&BigRational::from_integer(-&m.a))]
        } else {
            [mu.add_rational(&BigRational::from_integer(-&m.d)), int(&m.c)]
        }
    }

    pub fn unstable_vector(&self) -> [QuadraticReal; 2] {
        self.eigenvector(&self.spectral.lambda)
    }

    pub fn stable_vector(&self) -> [QuadraticReal; 2] {
        self.eigenvector(&self.spectral.lambda_inv())
    }
}

/// Applies an integer matrix to a vector over the quadratic field.
pub fn apply_quadratic(m: &IntMatrix2, v: &[QuadraticReal; 2]) -> [QuadraticReal; 2] {
    let d = v[0].radicand().clone();
    let k = |x: &BigInt| QuadraticReal::from_rational(BigRational::from_integer(x.clone()), d.clone());
    [
        &(&k(&m.a) * &v[0]) + &(&k(&m.b) * &v[1]),
        &(&k(&m.c) * &v[0]) + &(&k(&m.d) * &v[1]),
    ]
}
