use num_bigint::BigInt;
use num_rational::BigRational;

use super::config::RecurrenceConfig;
use crate::error::{Error, Result};
use crate::exact::{HyperbolicMap, IntMatrix2, Real};

fn round_half_away(r: &BigRational) -> BigInt {
    r.round().to_integer()
}

/// Squared torus distance from `M x` to the nearest integer point, exactly.
pub fn torus_residual_sq(m: &IntMatrix2, x: &[BigRational; 2]) -> BigRational {
    let y = m.apply(x);
    y.iter()
        .map(|c| {
            let k = BigRational::from_integer(round_half_away(c));
            let d = c - k;
            &d * &d
        })
        .fold(BigRational::from_integer(0.into()), |a, b| a + b)
}

/// Whether `(A^n - I) x mod 1` lies in the open ball `B(0, r_n)`.
pub fn membership(map: &HyperbolicMap, cfg: &RecurrenceConfig, n: u32, x: [f64; 2]) -> Result<bool> {
    let m = map.power(n).minus_identity();
    let r = cfg.rate(n)?;
    membership_with(&m, &r, x)
}

pub fn membership_with(m: &IntMatrix2, r: &Real, x: [f64; 2]) -> Result<bool> {
    let to_rat = |v: f64| {
        BigRational::from_float(v).ok_or_else(|| Error::invalid(format!("coordinate {v} is not finite")))
    };
    let xr = [to_rat(x[0])?, to_rat(x[1])?];
    Ok(membership_rational(m, r, &xr))
}

pub fn membership_rational(m: &IntMatrix2, r: &Real, x: &[BigRational; 2]) -> bool {
    let d2 = torus_residual_sq(m, x);
    Real::from_rational(&d2) < r * r
}

/// Membership in the layer for every power in one pass: index `i` is `n = i + 1`.
pub fn membership_profile(map: &HyperbolicMap, cfg: &RecurrenceConfig, nmax: u32, x: [f64; 2]) -> Result<Vec<bool>> {
    let mut out = Vec::with_capacity(nmax as usize);
    let mut p = IntMatrix2::identity();
    for n in 1..=nmax {
        p = &p * &map.matrix;
        let r = cfg.rate(n)?;
        out.push(membership_with(&p.minus_identity(), &r, x)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let cat = HyperbolicMap::cat();
        let cfg = RecurrenceConfig::exponential(0.5).unwrap();
        assert!(membership(&cat, &cfg, 2, [0.8 + 1e-6, 0.6]).unwrap());
        let big = RecurrenceConfig::exponential(5.0).unwrap();
        assert!(!membership(&cat, &big, 1, [0.5, 0.5]).unwrap());
        assert!(membership(&cat, &big, 4, [0.0, 0.0]).unwrap());
    }

    #[test]
    fn residual_is_exact() {
        let m = IntMatrix2::from_entries([4, 3, 3, 1]);
        let x = [BigRational::new(4.into(), 5.into()), BigRational::new(3.into(), 5.into())];
        assert_eq!(torus_residual_sq(&m, &x), BigRational::from_integer(0.into()));
        let half = [BigRational::new(1.into(), 2.into()), BigRational::new(0.into(), 1.into())];
        assert_eq!(torus_residual_sq(&m, &half), BigRational::new(1.into(), 4.into()));
    }

    #[test]
    fn profile_matches_single_calls() {
        let cat = HyperbolicMap::cat();
        let cfg = RecurrenceConfig::exponential(0.3).unwrap();
        let x = [0.2500001, 0.75];
        let prof = membership_profile(&cat, &cfg, 6, x).unwrap();
        for (i, b) in prof.iter().enumerate() {
            assert_eq!(*b, membership(&cat, &cfg, i as u32 + 1, x).unwrap());
        }
    }
}
