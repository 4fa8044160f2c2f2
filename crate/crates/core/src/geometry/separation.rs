use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use super::config::RecurrenceConfig;
use super::layer::LayerGeometry;
use crate::error::{Error, Result};
use crate::exact::{HyperbolicMap, Real};
use crate::periodic::odd_data;

#[derive(Clone, Debug)]
pub struct Separation {
    pub n: u32,
    pub s_k: BigInt,
    /// Minimum torus distance between distinct parallelograms.
    pub d_n: Real,
    /// `d_n * lambda^n`.
    pub scaled: Real,
    /// Minimum over pairs of pieces sharing a column of centres.
    pub same_column: Real,
    /// `same_column * S_k`.
    pub same_column_ratio: f64,
    pub candidates: u64,
}

type P = [f64; 2];

fn seg_dist2(p: P, a: P, b: P) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let w = [p[0] - a[0], p[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let t = if len2 > 0.0 { ((w[0] * d[0] + w[1] * d[1]) / len2).clamp(0.0, 1.0) } else { 0.0 };
    let e = [w[0] - t * d[0], w[1] - t * d[1]];
    e[0] * e[0] + e[1] * e[1]
}

/// Distance from `p` to the convex polygon `poly` (zero inside).
pub fn polygon_dist_f64(p: P, poly: &[P; 4]) -> f64 {
    let mut sign = 0.0f64;
    let mut inside = true;
    for i in 0..4 {
        let (a, b) = (poly[i], poly[(i + 1) % 4]);
        let c = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
        if c != 0.0 {
            if sign == 0.0 {
                sign = c.signum();
            } else if c.signum() != sign {
                inside = false;
            }
        }
    }
    if inside {
        return 0.0;
    }
    (0..4).map(|i| seg_dist2(p, poly[i], poly[(i + 1) % 4])).fold(f64::INFINITY, f64::min).sqrt()
}

type R = [Real; 2];

fn seg_dist2_real(p: &R, a: &R, b: &R) -> Real {
    let d = [&b[0] - &a[0], &b[1] - &a[1]];
    let w = [&p[0] - &a[0], &p[1] - &a[1]];
    let len2 = &d[0] * &d[0] + &d[1] * &d[1];
    let mut t = (&w[0] * &d[0] + &w[1] * &d[1]) / &len2;
    if t.is_negative() {
        t = Real::zero();
    } else if t > Real::one() {
        t = Real::one();
    }
    let e = [&w[0] - &t * &d[0], &w[1] - &t * &d[1]];
    &e[0] * &e[0] + &e[1] * &e[1]
}

pub fn polygon_dist_real(p: &R, poly: &[R; 4]) -> Real {
    let mut pos = false;
    let mut neg = false;
    for i in 0..4 {
        let (a, b) = (&poly[i], &poly[(i + 1) % 4]);
        let c = (&b[0] - &a[0]) * (&p[1] - &a[1]) - (&b[1] - &a[1]) * (&p[0] - &a[0]);
        pos |= c.is_positive();
        neg |= c.is_negative();
    }
    if !(pos && neg) {
        return Real::zero();
    }
    (0..4)
        .map(|i| seg_dist2_real(p, &poly[i], &poly[(i + 1) % 4]))
        .reduce(Real::min)
        .expect("four edges")
        .sqrt()
}

/// The difference body `P - P = 2P`.
fn doubled(geo: &LayerGeometry) -> ([P; 4], [R; 4]) {
    let two = Real::from_i64(2);
    let v1 = [&geo.v1[0] * &two, &geo.v1[1] * &two];
    let v2 = [&geo.v2[0] * &two, &geo.v2[1] * &two];
    let neg = |v: &R| [-v[0].clone(), -v[1].clone()];
    let real = [v1.clone(), v2.clone(), neg(&v1), neg(&v2)];
    let f = real.clone().map(|v| [v[0].to_f64(), v[1].to_f64()]);
    (f, real)
}

/// Minimum distance between distinct pieces of the odd sublayer.
///
/// Pieces are translates of one centrally symmetric parallelogram `P` by
/// points of `(1/S) Z^2`, so the distance between two of them is the
/// distance from their centre difference to `2P`. Differences in `Z^2` are
/// the same piece and are skipped.
pub fn pairwise_separation(map: &HyperbolicMap, cfg: &RecurrenceConfig, n: u32, cap: u64) -> Result<Separation> {
    if n.is_multiple_of(2) {
        return Err(Error::invalid(format!("separation needs odd n, got {n}")));
    }
    let od = odd_data(map, (n - 1) / 2);
    match od.n_n.to_u64() {
        Some(c) if c <= cap => {}
        _ => return Err(Error::CapExceeded { what: "sublayer pieces", count: od.n_n.to_string(), cap }),
    }
    let s = od.s_k.to_i64().expect("bounded by cap");
    let geo = LayerGeometry::new(map, cfg, n)?;
    let (poly, poly_r) = doubled(&geo);
    let sf = s as f64;
    let reach = (2.0 * geo.lambda1() * sf).ceil() as i64 + 1;

    // f64 screen, then refine the near-minimal candidates in high precision
    let rows: Vec<Vec<(f64, i64, i64)>> = (-reach..=reach)
        .into_par_iter()
        .map(|m| {
            (-reach..=reach)
                .filter(|j| m.rem_euclid(s) != 0 || j.rem_euclid(s) != 0)
                .map(|j| (polygon_dist_f64([m as f64 / sf, j as f64 / sf], &poly), m, j))
                .collect()
        })
        .collect();
    let all: Vec<(f64, i64, i64)> = rows.into_iter().flatten().collect();
    let candidates = all.len() as u64;
    let refine = |pred: &dyn Fn(i64) -> bool| -> Real {
        let best = all.iter().filter(|c| pred(c.1)).map(|c| c.0).fold(f64::INFINITY, f64::min);
        let tol = best * 1e-6 + 1e-300;
        all.iter()
            .filter(|c| pred(c.1) && c.0 <= best + tol)
            .map(|&(_, m, j)| {
                let p = [
                    Real::from_i64(m) / Real::from_i64(s),
                    Real::from_i64(j) / Real::from_i64(s),
                ];
                polygon_dist_real(&p, &poly_r)
            })
            .reduce(Real::min)
            .unwrap_or_else(Real::zero)
    };
    let d_n = refine(&|_| true);
    let same_column = refine(&|m| m.rem_euclid(s) == 0);
    let scaled = &d_n * map.lambda_pow(n);
    let same_column_ratio = (&same_column * Real::from_i64(s)).to_f64();
    Ok(Separation { n, s_k: od.s_k, d_n, scaled, same_column, same_column_ratio, candidates })
}
