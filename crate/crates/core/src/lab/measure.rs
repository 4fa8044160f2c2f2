use num_traits::ToPrimitive;
use rand::Rng;

use crate::error::{Error, Result};
use crate::exact::HyperbolicMap;
use crate::geometry::layer::{check_fine, wrap};
use crate::geometry::{LayerGeometry, RecurrenceConfig};
use crate::periodic::odd_data;

/// Half the diameter of the torus; energy integrands use `|x - y| / H`.
pub const HALF_DIAMETER: f64 = std::f64::consts::FRAC_1_SQRT_2;

pub fn torus_dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    let dx = wrap(a[0] - b[0]);
    let dy = wrap(a[1] - b[1]);
    (dx * dx + dy * dy).sqrt()
}

/// `(d / H)^{-s}`.
pub fn kernel(d: f64, s: f64) -> f64 {
    if s == 0.0 {
        1.0
    } else {
        (d / HALF_DIAMETER).powf(-s)
    }
}

/// Normalized Lebesgue measure on the odd sublayer: `S_k^2` congruent
/// parallelograms centred on `(1/S_k) Z^2`.
#[derive(Clone, Debug)]
pub struct OddMeasure {
    pub geo: LayerGeometry,
    pub s: i64,
    /// `P = Q [-1,1]^2`
    pub q: [[f64; 2]; 2],
}

impl OddMeasure {
    pub fn new(map: &HyperbolicMap, cfg: &RecurrenceConfig, n: u32) -> Result<Self> {
        if n.is_multiple_of(2) {
            return Err(Error::invalid(format!("odd sublayer needs odd n, got {n}")));
        }
        let geo = LayerGeometry::new(map, cfg, n)?;
        check_fine(&geo)?;
        let q = geo.square_map();
        if (q[0][0] * q[1][1] - q[0][1] * q[1][0]) == 0.0 {
            return Err(Error::DegenerateLayer);
        }
        let s = odd_data(map, (n - 1) / 2)
            .s_k
            .to_i64()
            .ok_or_else(|| Error::invalid("lattice spacing out of range"))?;
        Ok(OddMeasure { geo, s, q })
    }

    pub fn pieces(&self) -> f64 {
        (self.s as f64) * (self.s as f64)
    }

    /// Uniform point of the parallelogram centred at the origin.
    pub fn offset<R: Rng>(&self, rng: &mut R) -> [f64; 2] {
        let u: f64 = rng.gen_range(-1.0..1.0);
        let w: f64 = rng.gen_range(-1.0..1.0);
        [self.q[0][0] * u + self.q[0][1] * w, self.q[1][0] * u + self.q[1][1] * w]
    }

    pub fn center<R: Rng>(&self, rng: &mut R) -> [f64; 2] {
        let sf = self.s as f64;
        [rng.gen_range(0..self.s) as f64 / sf, rng.gen_range(0..self.s) as f64 / sf]
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> [f64; 2] {
        let c = self.center(rng);
        let o = self.offset(rng);
        [c[0] + o[0], c[1] + o[1]]
    }

    /// Lattice difference `(m, j) / S`, uniform over nonzero residues.
    pub fn nonzero_shift<R: Rng>(&self, rng: &mut R) -> [f64; 2] {
        let sf = self.s as f64;
        let total = self.s * self.s;
        let idx = rng.gen_range(1..total);
        [(idx / self.s) as f64 / sf, (idx % self.s) as f64 / sf]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::batch_rng;

    #[test]
    fn samples_lie_in_pieces() {
        let map = HyperbolicMap::cat();
        let cfg = RecurrenceConfig::exponential(0.6).unwrap();
        let m = OddMeasure::new(&map, &cfg, 5).unwrap();
        let mut rng = batch_rng(3, 0);
        for _ in 0..2000 {
            let p = m.sample(&mut rng);
            assert!(m.geo.lattice_union_contains([p[0] - p[0].floor(), p[1] - p[1].floor()], m.s));
            let o = m.offset(&mut rng);
            assert!(m.geo.parallelogram_contains(o));
        }
    }

    #[test]
    fn kernel_is_one_at_half_diameter() {
        assert!((kernel(HALF_DIAMETER, 1.3) - 1.0).abs() < 1e-15);
        assert_eq!(kernel(0.0, 0.0), 1.0);
        assert!((torus_dist([0.95, 0.5], [0.05, 0.5]) - 0.1).abs() < 1e-12);
    }
}
