use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde_json::{json, Value};

use super::config::RecurrenceConfig;
use crate::error::{Error, Result};
use crate::exact::{HyperbolicMap, IntMatrix2, QuadraticReal, Real};
use crate::periodic::{enumerate_periodic, inner_lattice_odd, odd_data, RationalPoint};

#[derive(Clone, Debug)]
pub struct Radii {
    pub n: u32,
    pub r: Real,
    /// Semi-axis along the stable direction, `r / (1 - lambda^-n)`.
    pub lambda1: Real,
    /// Semi-axis along the unstable direction, `r / (lambda^n - 1)`.
    pub lambda2: Real,
}

pub fn radii(map: &HyperbolicMap, cfg: &RecurrenceConfig, n: u32) -> Result<Radii> {
    if n == 0 {
        return Err(Error::invalid("n must be >= 1"));
    }
    let r = cfg.rate(n)?;
    let ln = map.lambda_pow(n);
    let one = Real::one();
    let lambda1 = &r / (&one - &one / &ln);
    let lambda2 = &r / (&ln - &one);
    Ok(Radii { n, r, lambda1, lambda2 })
}

fn unit(v: &[QuadraticReal; 2]) -> [Real; 2] {
    let x = v[0].to_real();
    let y = v[1].to_real();
    let norm = (&x * &x + &y * &y).sqrt();
    let (x, y) = (x / &norm, y / &norm);
    if x.is_negative() || (x == Real::zero() && y.is_negative()) {
        [-x, -y]
    } else {
        [x, y]
    }
}

/// Unit eigen-directions, oriented with non-negative x component.
#[derive(Clone, Debug)]
pub struct Axes {
    pub stable: [Real; 2],
    pub unstable: [Real; 2],
}

impl Axes {
    pub fn of(map: &HyperbolicMap) -> Self {
        Axes { stable: unit(&map.stable_vector()), unstable: unit(&map.unstable_vector()) }
    }

    pub fn stable_f64(&self) -> [f64; 2] {
        [self.stable[0].to_f64(), self.stable[1].to_f64()]
    }

    pub fn unstable_f64(&self) -> [f64; 2] {
        [self.unstable[0].to_f64(), self.unstable[1].to_f64()]
    }
}

/// Shape data shared by every piece of layer `n`.
#[derive(Clone, Debug)]
pub struct LayerGeometry {
    pub n: u32,
    pub radii: Radii,
    pub axes: Axes,
    /// `A^n - I`.
    pub m: IntMatrix2,
    pub h: BigInt,
    /// Half-diagonals of the inscribed parallelogram.
    pub v1: [Real; 2],
    pub v2: [Real; 2],
    f: Cached,
}

#[derive(Clone, Debug)]
struct Cached {
    lambda1: f64,
    lambda2: f64,
    r: f64,
    v1: [f64; 2],
    v2: [f64; 2],
    m: [[f64; 2]; 2],
}

impl LayerGeometry {
    pub fn new(map: &HyperbolicMap, cfg: &RecurrenceConfig, n: u32) -> Result<Self> {
        let radii = radii(map, cfg, n)?;
        let axes = Axes::of(map);
        let v1 = [&radii.lambda1 * &axes.stable[0], &radii.lambda1 * &axes.stable[1]];
        let v2 = [&radii.lambda2 * &axes.unstable[0], &radii.lambda2 * &axes.unstable[1]];
        let m = map.power(n).minus_identity();
        let f = Cached {
            lambda1: radii.lambda1.to_f64(),
            lambda2: radii.lambda2.to_f64(),
            r: radii.r.to_f64(),
            v1: [v1[0].to_f64(), v1[1].to_f64()],
            v2: [v2[0].to_f64(), v2[1].to_f64()],
            m: m.to_f64(),
        };
        Ok(LayerGeometry { n, m, h: map.h(n), radii, axes, v1, v2, f })
    }

    pub fn lambda1(&self) -> f64 {
        self.f.lambda1
    }

    pub fn lambda2(&self) -> f64 {
        self.f.lambda2
    }

    pub fn r(&self) -> f64 {
        self.f.r
    }

    pub fn v1_f64(&self) -> [f64; 2] {
        self.f.v1
    }

    pub fn v2_f64(&self) -> [f64; 2] {
        self.f.v2
    }

    /// Parallelogram vertices relative to the centre, counter-clockwise or clockwise.
    pub fn vertices_f64(&self) -> [[f64; 2]; 4] {
        let v1 = self.v1_f64();
        let v2 = self.v2_f64();
        [v1, v2, [-v1[0], -v1[1]], [-v2[0], -v2[1]]]
    }

    /// `P = Q [-1,1]^2` with columns `(v1 + v2)/2` and `(v1 - v2)/2`.
    pub fn square_map(&self) -> [[f64; 2]; 2] {
        let v1 = self.v1_f64();
        let v2 = self.v2_f64();
        [
            [(v1[0] + v2[0]) / 2.0, (v1[0] - v2[0]) / 2.0],
            [(v1[1] + v2[1]) / 2.0, (v1[1] - v2[1]) / 2.0],
        ]
    }

    /// Half-widths of the parallelogram's bounding box.
    pub fn extent(&self) -> [f64; 2] {
        let v1 = self.v1_f64();
        let v2 = self.v2_f64();
        [v1[0].abs().max(v2[0].abs()), v1[1].abs().max(v2[1].abs())]
    }

    /// Point in the parallelogram `{s v1 + t v2 : |s| + |t| <= 1}`.
    pub fn parallelogram_contains(&self, off: [f64; 2]) -> bool {
        let [s, t] = self.diag_coords(off);
        s.abs() + t.abs() <= 1.0
    }

    /// Coordinates of `off` in the basis `(v1, v2)`.
    pub fn diag_coords(&self, off: [f64; 2]) -> [f64; 2] {
        let v1 = self.v1_f64();
        let v2 = self.v2_f64();
        let det = v1[0] * v2[1] - v1[1] * v2[0];
        [(off[0] * v2[1] - off[1] * v2[0]) / det, (v1[0] * off[1] - v1[1] * off[0]) / det]
    }

    /// Vertical chord `(lo, hi)` of the parallelogram at horizontal offset `u`.
    pub fn chord(&self, u: f64) -> Option<(f64, f64)> {
        let vs = self.vertices_f64();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..4 {
            let (a, b) = (vs[i], vs[(i + 1) % 4]);
            let (xl, xh) = (a[0].min(b[0]), a[0].max(b[0]));
            if u < xl || u > xh || xh == xl {
                continue;
            }
            let y = a[1] + (b[1] - a[1]) * (u - a[0]) / (b[0] - a[0]);
            lo = lo.min(y);
            hi = hi.max(y);
        }
        (lo <= hi).then_some((lo, hi))
    }

    /// Whether `p` lies in a parallelogram centred on the lattice `(1/s) Z^2`.
    pub fn lattice_union_contains(&self, p: [f64; 2], s: i64) -> bool {
        let sf = s as f64;
        let ex = self.extent()[0];
        let m0 = ((p[0] - ex) * sf).floor() as i64;
        let m1 = ((p[0] + ex) * sf).ceil() as i64;
        for m in m0..=m1 {
            let Some((lo, hi)) = self.chord(p[0] - m as f64 / sf) else { continue };
            // need j with lo <= p1 - j/s <= hi
            let jmin = ((p[1] - hi) * sf).ceil();
            let jmax = ((p[1] - lo) * sf).floor();
            if jmin <= jmax {
                return true;
            }
        }
        false
    }

    /// `|(A^n - I) off| < r`, the exact piece of the recurrence layer.
    pub fn piece_contains(&self, off: [f64; 2]) -> bool {
        let m = self.f.m;
        let y0 = m[0][0] * off[0] + m[0][1] * off[1];
        let y1 = m[1][0] * off[0] + m[1][1] * off[1];
        let r = self.r();
        y0 * y0 + y1 * y1 < r * r
    }

    /// `|(A^n - I) off|^2 / r^2` in high precision.
    pub fn piece_form(&self, off: &[Real; 2]) -> Real {
        let e = |v: &BigInt| Real::from_bigint(v);
        let y0 = e(&self.m.a) * &off[0] + e(&self.m.b) * &off[1];
        let y1 = e(&self.m.c) * &off[0] + e(&self.m.d) * &off[1];
        (&y0 * &y0 + &y1 * &y1) / (&self.radii.r * &self.radii.r)
    }

    pub fn disc(&self, center: RationalPoint) -> EllipseDisc {
        EllipseDisc {
            center,
            lambda1: self.lambda1(),
            lambda2: self.lambda2(),
            major_dir: self.axes.stable_f64(),
            minor_dir: self.axes.unstable_f64(),
        }
    }
}

/// Nearest representative of `x` in `[-1/2, 1/2)`.
pub fn wrap(x: f64) -> f64 {
    x - x.round()
}

pub fn torus_offset(p: [f64; 2], c: [f64; 2]) -> [f64; 2] {
    [wrap(p[0] - c[0]), wrap(p[1] - c[1])]
}

#[derive(Clone, Debug)]
pub struct EllipseDisc {
    pub center: RationalPoint,
    pub lambda1: f64,
    pub lambda2: f64,
    pub major_dir: [f64; 2],
    pub minor_dir: [f64; 2],
}

impl EllipseDisc {
    /// Coordinates of `p - center` in the axis basis (nearest torus translate).
    pub fn axis_coords(&self, p: [f64; 2]) -> [f64; 2] {
        let off = torus_offset(p, self.center.to_f64());
        let (u, w) = (self.major_dir, self.minor_dir);
        let det = u[0] * w[1] - u[1] * w[0];
        [(off[0] * w[1] - off[1] * w[0]) / det, (u[0] * off[1] - u[1] * off[0]) / det]
    }

    /// Inside the ellipse with semi-axes scaled by `factor`.
    pub fn contains_scaled(&self, p: [f64; 2], factor: f64) -> bool {
        let [a, b] = self.axis_coords(p);
        let (x, y) = (a / (self.lambda1 * factor), b / (self.lambda2 * factor));
        x * x + y * y < 1.0
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        self.contains_scaled(p, 1.0)
    }

    pub fn area(&self) -> f64 {
        std::f64::consts::PI * self.lambda1 * self.lambda2
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LayerKind {
    Full,
    OddSub,
}

impl LayerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LayerKind::Full => "full",
            LayerKind::OddSub => "oddSub",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Layer {
    pub n: u32,
    pub kind: LayerKind,
    pub geometry: LayerGeometry,
    /// Sorted centres.
    pub centers: Vec<RationalPoint>,
    /// `S_k` for odd sublayers.
    pub spacing: Option<BigInt>,
}

/// Rejects layers whose radius is not below 1/4.
pub fn check_fine(geo: &LayerGeometry) -> Result<()> {
    let r = geo.r();
    if r >= 0.25 {
        return Err(Error::CoarseLayer { n: geo.n, rate: r });
    }
    Ok(())
}

pub fn build_layer(map: &HyperbolicMap, cfg: &RecurrenceConfig, n: u32, kind: LayerKind, cap: u64) -> Result<Layer> {
    let geometry = LayerGeometry::new(map, cfg, n)?;
    check_fine(&geometry)?;
    let (mut centers, spacing) = match kind {
        LayerKind::Full => (enumerate_periodic(map, n, cap)?.points, None),
        LayerKind::OddSub => {
            if n.is_multiple_of(2) {
                return Err(Error::invalid(format!("odd sublayer needs odd n, got {n}")));
            }
            let k = (n - 1) / 2;
            (inner_lattice_odd(map, k, cap)?, Some(odd_data(map, k).s_k))
        }
    };
    centers.sort();
    Ok(Layer { n, kind, geometry, centers, spacing })
}

impl Layer {
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn discs(&self) -> impl Iterator<Item = EllipseDisc> + '_ {
        self.centers.iter().map(|c| self.geometry.disc(c.clone()))
    }

    pub fn centers_f64(&self) -> Vec<[f64; 2]> {
        self.centers.iter().map(RationalPoint::to_f64).collect()
    }

    /// Parallelogram vertices of each piece, absolute coordinates.
    pub fn parallelograms(&self) -> Vec<[[f64; 2]; 4]> {
        let vs = self.geometry.vertices_f64();
        self.centers_f64()
            .into_iter()
            .map(|c| vs.map(|v| [c[0] + v[0], c[1] + v[1]]))
            .collect()
    }

    pub fn to_json(&self) -> Value {
        let num = |b: &BigInt| -> Value {
            match b.to_i64() {
                Some(v) => json!(v),
                None => json!(b.to_string()),
            }
        };
        let centers: Vec<Value> = self
            .centers
            .iter()
            .map(|p| json!([[num(p.x.numer()), num(p.x.denom())], [num(p.y.numer()), num(p.y.denom())]]))
            .collect();
        let g = &self.geometry;
        json!({
            "n": self.n,
            "kind": self.kind.as_str(),
            "lambda1": g.lambda1(),
            "lambda2": g.lambda2(),
            "lambda1Decimal": g.radii.lambda1.to_sci(30),
            "lambda2Decimal": g.radii.lambda2.to_sci(30),
            "r": g.r(),
            "count": self.centers.len(),
            "absH": g.h.abs().to_string(),
            "centers": centers,
            "axis": {
                "major": g.axes.stable_f64(),
                "minor": g.axes.unstable_f64(),
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cat_radii_example() {
        let map = HyperbolicMap::cat();
        let cfg = RecurrenceConfig::exponential(0.5).unwrap();
        let r = radii(&map, &cfg, 3).unwrap();
        assert!((r.lambda1.to_f64() - 0.23629).abs() < 1e-5);
        assert!((r.lambda2.to_f64() - 0.013168).abs() < 1e-6);
        let r1 = radii(&map, &cfg, 1).unwrap();
        let ratio = &r1.lambda1 / &r1.lambda2;
        assert!(ratio.rel_diff(&map.lambda_real()) < Real::from_f64(1e-50));
    }

    #[test]
    fn product_identity() {
        let map = HyperbolicMap::from_entries([3, 2, 1, 1]).unwrap();
        let cfg = RecurrenceConfig::exponential(0.8).unwrap();
        for n in 1..12 {
            let r = radii(&map, &cfg, n).unwrap();
            let lhs = &r.lambda1 * &r.lambda2 * Real::from_bigint(&map.h(n).abs());
            assert!(lhs.rel_diff(&(&r.r * &r.r)) < Real::from_f64(1e-40));
        }
    }

    #[test]
    fn layers_for_cat() {
        let map = HyperbolicMap::cat();
        let cfg = RecurrenceConfig::exponential(0.5).unwrap();
        let odd = build_layer(&map, &cfg, 3, LayerKind::OddSub, 1_000_000).unwrap();
        assert_eq!(odd.len(), 16);
        assert!(odd.centers.contains(&RationalPoint::from_ints(1, 4, 3, 4)));
        let big = RecurrenceConfig::exponential(3.0).unwrap();
        let full = build_layer(&map, &big, 1, LayerKind::Full, 1_000_000).unwrap();
        assert_eq!(full.centers, vec![RationalPoint::origin()]);
        assert!(matches!(
            build_layer(&map, &cfg, 1, LayerKind::Full, 1_000_000),
            Err(Error::CoarseLayer { .. })
        ));
        assert!(build_layer(&map, &cfg, 4, LayerKind::OddSub, 1_000_000).is_err());
    }

    #[test]
    fn chord_agrees_with_containment() {
        let map = HyperbolicMap::cat();
        let cfg = RecurrenceConfig::exponential(0.5).unwrap();
        let g = LayerGeometry::new(&map, &cfg, 3).unwrap();
        let ex = g.extent()[0];
        for i in 0..50 {
            let u = -ex + 2.0 * ex * (i as f64 + 0.5) / 50.0;
            let (lo, hi) = g.chord(u).unwrap();
            assert!(g.parallelogram_contains([u, 0.5 * (lo + hi)]));
            assert!(!g.parallelogram_contains([u, hi + 1e-9]));
            assert!(!g.parallelogram_contains([u, lo - 1e-9]));
        }
        assert!(g.chord(ex * 1.01).is_none());
    }

    #[test]
    fn vertices_on_ellipse_boundary() {
        let map = HyperbolicMap::from_entries([5, 2, 2, 1]).unwrap();
        let cfg = RecurrenceConfig::exponential(0.7).unwrap();
        let g = LayerGeometry::new(&map, &cfg, 5).unwrap();
        for v in [&g.v1, &g.v2] {
            let q = g.piece_form(v);
            assert!((q - Real::one()).abs() < Real::from_f64(1e-30));
        }
    }
}
