use num_traits::ToPrimitive;

use super::config::RecurrenceConfig;
use super::layer::LayerGeometry;
use crate::error::{Error, Result};
use crate::exact::HyperbolicMap;
use crate::periodic::odd_data;

/// Intervals cut by the odd sublayer on the vertical circle `x = x0`.
#[derive(Clone, Debug)]
pub struct SliceFamily {
    pub x0: f64,
    pub n: u32,
    pub lambda2: f64,
    pub r: f64,
    /// `(lo, hi)` with `lo` in `[0, 1)` and `hi - lo` the chord length; sorted by `lo`.
    pub intervals: Vec<(f64, f64)>,
}

impl SliceFamily {
    pub fn m_n(&self) -> usize {
        self.intervals.len()
    }

    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }

    /// True if no two intervals overlap on the circle.
    pub fn disjoint(&self) -> bool {
        let iv = &self.intervals;
        for w in iv.windows(2) {
            if w[1].0 < w[0].1 {
                return false;
            }
        }
        match (iv.first(), iv.last()) {
            (Some(f), Some(l)) if iv.len() > 1 => l.1 - 1.0 <= f.0,
            _ => true,
        }
    }
}

/// Columns of centres `m / S` whose parallelograms can reach `x = x0`, with
/// the chord each one cuts.
fn column_chords(geo: &LayerGeometry, s: i64, x0: f64) -> Vec<(i64, f64, f64)> {
    let sf = s as f64;
    let ex = geo.extent()[0];
    let m0 = ((x0 - ex) * sf).floor() as i64;
    let m1 = ((x0 + ex) * sf).ceil() as i64;
    (m0..=m1)
        .filter_map(|m| geo.chord(x0 - m as f64 / sf).map(|(lo, hi)| (m, lo, hi)))
        .collect()
}

fn setup(map: &HyperbolicMap, cfg: &RecurrenceConfig, x0: f64, n: u32) -> Result<(LayerGeometry, i64)> {
    check_x0(x0)?;
    let sl = Slicer::new(map, cfg, n)?;
    Ok((sl.geo, sl.s))
}

fn check_x0(x0: f64) -> Result<()> {
    if !(0.0..1.0).contains(&x0) {
        return Err(Error::invalid(format!("x0 must lie in [0, 1), got {x0}")));
    }
    Ok(())
}

/// Layer data reused across many slices of the same layer.
#[derive(Clone, Debug)]
pub struct Slicer {
    pub geo: LayerGeometry,
    pub s: i64,
    pub n: u32,
}

impl Slicer {
    pub fn new(map: &HyperbolicMap, cfg: &RecurrenceConfig, n: u32) -> Result<Self> {
        if n.is_multiple_of(2) {
            return Err(Error::invalid(format!("slices use odd n, got {n}")));
        }
        let geo = LayerGeometry::new(map, cfg, n)?;
        let s = odd_data(map, (n - 1) / 2)
            .s_k
            .to_i64()
            .ok_or_else(|| Error::invalid("lattice spacing out of range"))?;
        Ok(Slicer { geo, s, n })
    }

    pub fn slice(&self, x0: f64, cap: u64) -> Result<SliceFamily> {
        check_x0(x0)?;
        let (geo, s) = (&self.geo, self.s);
        let l2 = geo.lambda2();
        let kept: Vec<(f64, f64)> = column_chords(geo, s, x0)
            .into_iter()
            .filter(|(_, lo, hi)| {
                let len = hi - lo;
                len >= l2 / 3.0 && len <= 2.0 * l2
            })
            .map(|(_, lo, hi)| (lo, hi))
            .collect();
        let count = kept.len() as u64 * s as u64;
        if count > cap {
            return Err(Error::CapExceeded { what: "slice intervals", count: count.to_string(), cap });
        }
        let sf = s as f64;
        let mut intervals = Vec::with_capacity(count as usize);
        for (lo, hi) in kept {
            for j in 0..s {
                let a = j as f64 / sf + lo;
                let a = a - a.floor();
                intervals.push((a, a + (hi - lo)));
            }
        }
        intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(SliceFamily { x0, n: self.n, lambda2: l2, r: geo.r(), intervals })
    }
}

pub fn line_slice(map: &HyperbolicMap, cfg: &RecurrenceConfig, x0: f64, n: u32, cap: u64) -> Result<SliceFamily> {
    check_x0(x0)?;
    Slicer::new(map, cfg, n)?.slice(x0, cap)
}

fn overlap(a: f64, b: f64, c: f64, d: f64) -> f64 {
    (b.min(d) - a.max(c)).max(0.0)
}

/// Pieces whose chord meets `{x0} x (y0, y0 + len)` in a set of length
/// between `lambda2 / 4` and `2 lambda2`.
pub fn segment_count(
    map: &HyperbolicMap,
    cfg: &RecurrenceConfig,
    x0: f64,
    n: u32,
    y0: f64,
    len: f64,
) -> Result<u64> {
    if !(len > 0.0 && len <= 1.0) {
        return Err(Error::invalid(format!("segment length must lie in (0, 1], got {len}")));
    }
    let (geo, s) = setup(map, cfg, x0, n)?;
    let l2 = geo.lambda2();
    let sf = s as f64;
    let mut count = 0u64;
    for (_, lo, hi) in column_chords(&geo, s, x0) {
        for j in 0..s {
            let c = j as f64 / sf;
            let a = c + lo;
            let shift = (y0 - a).floor();
            let cut: f64 = (-1..=2)
                .map(|k| overlap(a + shift + k as f64, c + hi + shift + k as f64, y0, y0 + len))
                .sum();
            if cut >= l2 / 4.0 && cut <= 2.0 * l2 {
                count += 1;
            }
        }
    }
    Ok(count)
}
