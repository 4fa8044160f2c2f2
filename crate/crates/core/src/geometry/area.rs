use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::Rng;

use super::config::RecurrenceConfig;
use super::layer::LayerGeometry;
use crate::error::{Error, Result};
use crate::exact::{HyperbolicMap, Real};
use crate::mc::{run_batches, Moments, DEFAULT_BATCH};
use crate::periodic::odd_data;

#[derive(Clone, Debug)]
pub struct LayerArea {
    pub n: u32,
    /// `N_n = S_k^2`.
    pub pieces: BigInt,
    /// `sqrt((a+d)^2 - 4) / |b H_n| * r_n^2`.
    pub stated_piece: Real,
    /// Area of the inscribed parallelogram, `2 |v1 x v2|`.
    pub geometric_piece: Real,
    /// Area of the ellipse `{|(A^n - I) v| < r_n}`, `pi r_n^2 / |H_n|`.
    pub ellipse_piece: Real,
}

impl LayerArea {
    fn total(&self, piece: &Real) -> Real {
        piece * Real::from_bigint(&self.pieces)
    }

    pub fn stated_total(&self) -> Real {
        self.total(&self.stated_piece)
    }

    pub fn geometric_total(&self) -> Real {
        self.total(&self.geometric_piece)
    }

    pub fn ellipse_total(&self) -> Real {
        self.total(&self.ellipse_piece)
    }
}

pub fn layer_area(map: &HyperbolicMap, cfg: &RecurrenceConfig, n: u32) -> Result<LayerArea> {
    if n.is_multiple_of(2) {
        return Err(Error::invalid(format!("odd sublayer area needs odd n, got {n}")));
    }
    let b = &map.matrix.b;
    if b.is_zero() {
        return Err(Error::ZeroB);
    }
    let geo = LayerGeometry::new(map, cfg, n)?;
    let r2 = &geo.radii.r * &geo.radii.r;
    let h = Real::from_bigint(&geo.h.abs());
    let stated_piece = Real::from_bigint(&map.spectral.disc).sqrt() * &r2 / (Real::from_bigint(&b.abs()) * &h);
    let cross = &geo.v1[0] * &geo.v2[1] - &geo.v1[1] * &geo.v2[0];
    let geometric_piece = Real::from_i64(2) * cross.abs();
    let ellipse_piece = Real::pi() * &r2 / &h;
    Ok(LayerArea { n, pieces: odd_data(map, (n - 1) / 2).n_n, stated_piece, geometric_piece, ellipse_piece })
}

/// Rejection estimate of one parallelogram's area from its bounding box.
pub fn mc_piece_area(geo: &LayerGeometry, samples: u64, seed: u64) -> (f64, f64) {
    let e = geo.extent();
    let parts = run_batches(seed, samples, DEFAULT_BATCH, |rng, _, count| {
        let mut m = Moments::default();
        for _ in 0..count {
            let p = [rng.gen_range(-e[0]..e[0]), rng.gen_range(-e[1]..e[1])];
            m.push(if geo.parallelogram_contains(p) { 1.0 } else { 0.0 });
        }
        m
    });
    let m = Moments::merge_all(&parts);
    let box_area = 4.0 * e[0] * e[1];
    (m.mean() * box_area, m.stderr() * box_area)
}

/// Uniform-torus estimate of the area of the union of the odd sublayer.
pub fn mc_union_area(map: &HyperbolicMap, cfg: &RecurrenceConfig, n: u32, samples: u64, seed: u64) -> Result<(f64, f64)> {
    if n.is_multiple_of(2) {
        return Err(Error::invalid("odd sublayer needs odd n"));
    }
    let geo = LayerGeometry::new(map, cfg, n)?;
    let s = odd_data(map, (n - 1) / 2)
        .s_k
        .to_i64()
        .ok_or_else(|| Error::invalid("lattice spacing out of range"))?;
    let parts = run_batches(seed, samples, DEFAULT_BATCH, |rng, _, count| {
        let mut m = Moments::default();
        for _ in 0..count {
            let p = [rng.gen::<f64>(), rng.gen::<f64>()];
            m.push(if geo.lattice_union_contains(p, s) { 1.0 } else { 0.0 });
        }
        m
    });
    let m = Moments::merge_all(&parts);
    Ok((m.mean(), m.stderr()))
}
