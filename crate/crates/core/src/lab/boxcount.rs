//! Box counting of full recurrence layers on the grid `(1/G) Z^2`.
//!
//! For each layer the grid sizes `delta` between the short and long semi-axes
//! are scanned and the size minimizing `log N / log(1/delta)` is kept; the
//! reported slope is the least-squares slope of `log N` against
//! `log(1/delta)` through these per-layer minimizers.

use std::io::Write;

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::HyperbolicMap;
use crate::geometry::layer::{build_layer, LayerKind};
use crate::geometry::RecurrenceConfig;

/// Largest residual RMS accepted by the slope fit.
pub const MAX_FIT_RMS: f64 = 0.5;

/// Log-spaced grid of box sizes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaGrid {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl DeltaGrid {
    pub fn new(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if !(lo > 0.0 && hi >= lo && hi <= 1.0) || count == 0 || (count == 1 && hi != lo) {
            return Err(Error::invalid(format!("bad delta grid {lo}:{hi}:{count}")));
        }
        Ok(DeltaGrid { lo, hi, count })
    }

    /// Parses `LO:HI:COUNT`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::invalid(format!("delta grid must be LO:HI:COUNT, got {s:?}")));
        }
        let f = |x: &str| x.trim().parse::<f64>().map_err(|_| Error::invalid(format!("bad number {x:?} in delta grid")));
        let count = parts[2].trim().parse::<usize>().map_err(|_| Error::invalid(format!("bad count {:?}", parts[2])))?;
        DeltaGrid::new(f(parts[0])?, f(parts[1])?, count)
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.lo];
        }
        let (a, b) = (self.lo.ln(), self.hi.ln());
        (0..self.count)
            .map(|i| (a + (b - a) * i as f64 / (self.count - 1) as f64).exp())
            .collect()
    }
}

/// Filled quadratic form `u^T G u <= 1` with `det G` supplied exactly.
#[derive(Clone, Copy, Debug)]
pub struct Ellipse {
    pub g11: f64,
    pub g12: f64,
    pub g22: f64,
    pub det: f64,
}

impl Ellipse {
    /// `{u : |M u| <= r}`.
    pub fn of_layer(m: [[f64; 2]; 2], det_m: f64, r: f64) -> Self {
        let r2 = r * r;
        Ellipse {
            g11: (m[0][0] * m[0][0] + m[1][0] * m[1][0]) / r2,
            g12: (m[0][0] * m[0][1] + m[1][0] * m[1][1]) / r2,
            g22: (m[0][1] * m[0][1] + m[1][1] * m[1][1]) / r2,
            det: det_m * det_m / (r2 * r2),
        }
    }

    pub fn half_width(&self) -> f64 {
        (self.g22 / self.det).sqrt()
    }

    fn chord(&self, u: f64) -> (f64, f64) {
        let mid = -self.g12 * u / self.g22;
        let half = (self.g22 - self.det * u * u).max(0.0).sqrt() / self.g22;
        (mid - half, mid + half)
    }

    /// Vertical extent over the offsets `u0 <= u <= u1`.
    pub fn y_range(&self, u0: f64, u1: f64) -> (f64, f64) {
        let top = -self.g12 / (self.g11 * self.det).sqrt();
        let hi = self.chord(top.clamp(u0, u1)).1;
        let lo = self.chord((-top).clamp(u0, u1)).0;
        (lo, hi)
    }
}

/// Smallest box size accepted.
pub const MIN_DELTA: f64 = 1e-15;

/// `t g` split as an integer part and a fraction in `[0, 1)`, for `t = num / den`.
fn scaled(num: i64, den: i64, g: i64) -> (i64, f64) {
    let p = num as i128 * g as i128;
    let d = den as i128;
    let base = p.div_euclid(d);
    (base as i64, p.rem_euclid(d) as f64 / den as f64)
}

/// Number of boxes of the grid `(1/g) Z^2` on the torus meeting the union of
/// translates of `e` by `centers`, given as `[(num, den); 2]` fractions.
pub fn count_boxes(e: &Ellipse, centers: &[[(i64, i64); 2]], g: u64) -> u64 {
    count_boxes_chunked(e, centers, g, (1u64 << 22) as f64)
}

/// As [`count_boxes`], with about `target` column entries per chunk.
fn count_boxes_chunked(e: &Ellipse, centers: &[[(i64, i64); 2]], g: u64, target: f64) -> u64 {
    if centers.is_empty() {
        return 0;
    }
    let gi = g as i64;
    let gf = g as f64;
    let wx = e.half_width();
    let wg = wx * gf;
    let span = (2.0 * wg).ceil() as i64 + 2;
    // (first column, integer and fractional parts of the scaled centre)
    let mut cs: Vec<(i64, i64, f64, i64, f64)> = centers
        .iter()
        .map(|c| {
            let (bx, fx) = scaled(c[0].0, c[0].1, gi);
            let (by, fy) = scaled(c[1].0, c[1].1, gi);
            (bx + (fx - wg).floor() as i64, bx, fx, by, fy)
        })
        .collect();
    cs.sort_unstable_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)).then(a.3.cmp(&b.3)));
    let width = ((target * gf / (centers.len() as f64 * span as f64)) as i64).clamp(span.min(gi), gi);
    let nchunks = (gi + width - 1) / width;
    let mut chunk_ids: Vec<i64> = Vec::new();
    for c in &cs {
        let ia = c.0.rem_euclid(gi);
        let ib = ia + (c.1 + (c.2 + wg).floor() as i64 - c.0);
        if ib < gi {
            chunk_ids.extend(ia / width..=ib / width);
        } else {
            chunk_ids.extend(ia / width..nchunks);
            chunk_ids.extend(0..=((ib - gi).min(gi - 1)) / width);
        }
    }
    chunk_ids.sort_unstable();
    chunk_ids.dedup();
    chunk_ids
        .par_iter()
        .map(|&k| {
            let c0 = k * width;
            let c1 = (c0 + width).min(gi);
            let mut entries: Vec<(i64, i64, i64)> = Vec::new();
            for shift in [-gi, 0, gi] {
                // ellipses whose unwrapped columns meet [c0, c1) after shifting
                let lo = c0 - shift - span;
                let hi = c1 - shift;
                let from = cs.partition_point(|s| s.0 < lo);
                for &(ia, bx, fx, by, fy) in &cs[from..] {
                    if ia >= hi {
                        break;
                    }
                    let ib = bx + (fx + wg).floor() as i64;
                    let a = ia.max(c0 - shift);
                    let b = ib.min(c1 - shift - 1);
                    for col in a..=b {
                        let rel = (col - bx) as f64 - fx;
                        let u0 = (rel / gf).max(-wx);
                        let u1 = ((rel + 1.0) / gf).min(wx);
                        if u1 < u0 {
                            continue;
                        }
                        let (ylo, yhi) = e.y_range(u0, u1);
                        let j0 = by + (fy + ylo * gf).floor() as i64;
                        let j1 = by + (fy + yhi * gf).floor() as i64;
                        let cc = col + shift;
                        if j1 - j0 + 1 >= gi {
                            entries.push((cc, 0, gi - 1));
                        } else {
                            let a0 = j0.rem_euclid(gi);
                            let a1 = a0 + (j1 - j0);
                            if a1 < gi {
                                entries.push((cc, a0, a1));
                            } else {
                                entries.push((cc, a0, gi - 1));
                                entries.push((cc, 0, a1 - gi));
                            }
                        }
                    }
                }
            }
            entries.sort_unstable();
            let mut total = 0u64;
            let mut cur: Option<(i64, i64, i64)> = None;
            for (col, a, b) in entries {
                match cur {
                    Some((cc, ca, cb)) if cc == col && a <= cb + 1 => cur = Some((cc, ca, cb.max(b))),
                    _ => {
                        if let Some((_, ca, cb)) = cur {
                            total += (cb - ca + 1) as u64;
                        }
                        cur = Some((col, a, b));
                    }
                }
            }
            if let Some((_, ca, cb)) = cur {
                total += (cb - ca + 1) as u64;
            }
            total
        })
        .sum()
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LayerBoxes {
    pub n: u32,
    pub lambda1: f64,
    pub lambda2: f64,
    pub deltas: Vec<f64>,
    pub counts: Vec<u64>,
    /// Index minimizing `log N / log(1/delta)`.
    pub best: usize,
    pub best_ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BoxCountResult {
    /// Per-layer minimizing box sizes.
    pub deltas: Vec<f64>,
    pub counts: Vec<u64>,
    pub fitted_slope: f64,
    pub intercept: f64,
    /// `log(1/delta)` range of the fit.
    pub fit_range: [f64; 2],
    /// RMS residual of the fit in `log N`.
    pub residual: f64,
    pub layers: Vec<LayerBoxes>,
}

impl BoxCountResult {
    /// RFC 4180 table `n,delta,count`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["n", "delta", "count"])?;
        for l in &self.layers {
            for (d, c) in l.deltas.iter().zip(&l.counts) {
                out.write_record([l.n.to_string(), format!("{d:e}"), c.to_string()])?;
            }
        }
        out.flush()?;
        Ok(())
    }
}

/// Grid sizes used for layer `n`: `1/G` for integer `G`, restricted to
/// `[max(lambda2, MIN_DELTA), lambda1]`, always including both ends.
pub fn layer_grid(lambda1: f64, lambda2: f64, grid: &DeltaGrid) -> Result<Vec<u64>> {
    if lambda1 < MIN_DELTA {
        return Err(Error::EnvelopeExceeded(format!("semi-axis {lambda1:e} is below the smallest box size {MIN_DELTA:e}")));
    }
    let lambda2 = lambda2.max(MIN_DELTA);
    let mut gs: Vec<u64> = vec![(1.0 / lambda1).ceil() as u64, (1.0 / lambda2).floor() as u64];
    for d in grid.values() {
        if d >= lambda2 && d <= lambda1 {
            gs.push((1.0 / d).round() as u64);
        }
    }
    for g in gs.iter_mut() {
        *g = (*g).max(1);
    }
    gs.sort_unstable();
    gs.dedup();
    gs.reverse();
    Ok(gs)
}

/// Rough number of column entries generated; used for runtime guards.
pub fn boxcount_cost(map: &HyperbolicMap, cfg: &RecurrenceConfig, window: &[u32], grid: &DeltaGrid) -> Result<f64> {
    let mut total = 0.0;
    for &n in window {
        let rd = crate::geometry::radii(map, cfg, n)?;
        let (l1, l2) = (rd.lambda1.to_f64(), rd.lambda2.to_f64());
        let h = map.h(n).to_f64().unwrap_or(f64::INFINITY).abs();
        for g in layer_grid(l1, l2, grid)? {
            total += h * (2.0 * l1 * g as f64 + 2.0);
        }
    }
    Ok(total)
}

/// Least-squares line `y = a + b x`; returns `(b, a, rms)`.
pub fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let rss: f64 = x.iter().zip(y).map(|(u, v)| (v - a - b * u).powi(2)).sum();
    (b, a, (rss / n).sqrt())
}

pub fn boxcount_estimate(
    map: &HyperbolicMap,
    cfg: &RecurrenceConfig,
    window: &[u32],
    grid: &DeltaGrid,
    cap: u64,
) -> Result<BoxCountResult> {
    if window.len() < 2 {
        return Err(Error::IllConditionedFit("need at least two layers".into()));
    }
    let mut layers = Vec::with_capacity(window.len());
    for &n in window {
        let layer = build_layer(map, cfg, n, LayerKind::Full, cap)?;
        let geo = &layer.geometry;
        let det = geo.h.to_f64().unwrap_or(f64::INFINITY);
        let e = Ellipse::of_layer(geo.m.to_f64(), det, geo.r());
        let centers = layer
            .centers
            .iter()
            .map(|c| {
                let f = |q: &num_rational::BigRational| -> Result<(i64, i64)> {
                    match (q.numer().to_i64(), q.denom().to_i64()) {
                        (Some(a), Some(b)) => Ok((a, b)),
                        _ => Err(Error::invalid("centre denominator out of range")),
                    }
                };
                Ok([f(&c.x)?, f(&c.y)?])
            })
            .collect::<Result<Vec<_>>>()?;
        let (l1, l2) = (geo.lambda1(), geo.lambda2());
        let gs = layer_grid(l1, l2, grid)?;
        let mut deltas = Vec::with_capacity(gs.len());
        let mut counts = Vec::with_capacity(gs.len());
        for g in gs {
            deltas.push(1.0 / g as f64);
            counts.push(count_boxes(&e, &centers, g));
        }
        let mut best = 0;
        let mut best_ratio = f64::INFINITY;
        for (i, (d, c)) in deltas.iter().zip(&counts).enumerate() {
            if *d >= 1.0 {
                continue;
            }
            let ratio = (*c as f64).ln() / (1.0 / d).ln();
            if ratio < best_ratio {
                best_ratio = ratio;
                best = i;
            }
        }
        if !best_ratio.is_finite() {
            return Err(Error::IllConditionedFit(format!("layer {n} has no usable box size")));
        }
        layers.push(LayerBoxes { n, lambda1: l1, lambda2: l2, deltas, counts, best, best_ratio });
    }
    let deltas: Vec<f64> = layers.iter().map(|l| l.deltas[l.best]).collect();
    let counts: Vec<u64> = layers.iter().map(|l| l.counts[l.best]).collect();
    let x: Vec<f64> = deltas.iter().map(|d| (1.0 / d).ln()).collect();
    let y: Vec<f64> = counts.iter().map(|&c| (c as f64).ln()).collect();
    let lo = x.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo < 1e-9 {
        return Err(Error::IllConditionedFit("all layers chose the same box size".into()));
    }
    let (slope, intercept, rms) = fit_line(&x, &y);
    if rms > MAX_FIT_RMS {
        return Err(Error::IllConditionedFit(format!("residual RMS {rms:.3} exceeds {MAX_FIT_RMS}")));
    }
    Ok(BoxCountResult { deltas, counts, fitted_slope: slope, intercept, fit_range: [lo, hi], residual: rms, layers })
}
