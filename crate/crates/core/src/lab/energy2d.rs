use std::f64::consts::{FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use super::measure::{kernel, torus_dist, OddMeasure, HALF_DIAMETER};
use super::quadrature::integrate_breaks;
use crate::error::{Error, Result};
use crate::exact::HyperbolicMap;
use crate::geometry::RecurrenceConfig;
use crate::mc::{run_batches, Moments, DEFAULT_BATCH};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sampler {
    /// Independent pairs from the layer measure.
    Plain,
    /// Same-piece pairs by quadrature, distinct-piece pairs by Monte Carlo.
    Stratified,
}

impl std::str::FromStr for Sampler {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(Sampler::Plain),
            "stratified" => Ok(Sampler::Stratified),
            _ => Err(Error::invalid(format!("unknown sampler {s:?} (plain | stratified)"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EnergyResult {
    pub s: f64,
    pub n: u32,
    pub estimate: f64,
    pub stderr: f64,
    pub sample_count: u64,
    pub seed: u64,
    pub sampler: Sampler,
    /// Normalized same-piece energy, when computed by quadrature.
    pub self_energy: Option<f64>,
}

/// `E |X - Y|^{-s}` for `X, Y` independent uniform on `Q [-1,1]^2`, via the
/// covariogram of the square in polar coordinates.
pub fn parallelogram_self_energy(q: [[f64; 2]; 2], s: f64) -> Result<f64> {
    if !(0.0..2.0).contains(&s) {
        return Err(Error::invalid(format!("planar self-energy needs 0 <= s < 2, got {s}")));
    }
    let radial = |phi: f64| {
        let (a, b) = (phi.cos().abs(), phi.sin().abs());
        let r = 2.0 / a.max(b);
        4.0 * r.powf(2.0 - s) / (2.0 - s) - 2.0 * (a + b) * r.powf(3.0 - s) / (3.0 - s)
            + a * b * r.powf(4.0 - s) / (4.0 - s)
    };
    let stretch = |phi: f64| {
        let (c, sn) = (phi.cos(), phi.sin());
        let x = q[0][0] * c + q[0][1] * sn;
        let y = q[1][0] * c + q[1][1] * sn;
        (x * x + y * y).sqrt()
    };
    // direction where |Q e| is smallest
    let p = q[0][0] * q[0][0] + q[1][0] * q[1][0];
    let r = q[0][1] * q[0][1] + q[1][1] * q[1][1];
    let c = q[0][0] * q[0][1] + q[1][0] * q[1][1];
    let theta_min = 0.5 * (2.0 * c).atan2(p - r) + PI / 2.0;
    let mut pts: Vec<f64> = (0..=8).map(|i| i as f64 * FRAC_PI_4).collect();
    for k in -2..=3 {
        let t = theta_min + k as f64 * PI;
        if t > 0.0 && t < 2.0 * PI {
            pts.push(t);
        }
    }
    pts.sort_by(f64::total_cmp);
    let quad = integrate_breaks(|phi| stretch(phi).powf(-s) * radial(phi), &pts, 0.0, 1e-11);
    Ok(quad.value / 16.0)
}

pub fn riesz_energy_2d(
    map: &HyperbolicMap,
    cfg: &RecurrenceConfig,
    n: u32,
    s: f64,
    sampler: Sampler,
    samples: u64,
    seed: u64,
) -> Result<EnergyResult> {
    if !(s.is_finite() && s >= 0.0) {
        return Err(Error::invalid(format!("s must be non-negative, got {s}")));
    }
    if samples == 0 {
        return Err(Error::invalid("samples must be positive"));
    }
    let mu = OddMeasure::new(map, cfg, n)?;
    match sampler {
        Sampler::Plain => {
            let parts = run_batches(seed, samples, DEFAULT_BATCH, |rng, _, count| {
                let mut m = Moments::default();
                for _ in 0..count {
                    let x = mu.sample(rng);
                    let y = mu.sample(rng);
                    m.push(kernel(torus_dist(x, y), s));
                }
                m
            });
            let m = Moments::merge_all(&parts);
            Ok(EnergyResult {
                s,
                n,
                estimate: m.mean(),
                stderr: m.stderr(),
                sample_count: samples,
                seed,
                sampler,
                self_energy: None,
            })
        }
        Sampler::Stratified => {
            let self_e = HALF_DIAMETER.powf(s) * parallelogram_self_energy(mu.q, s)?;
            let big_n = mu.pieces();
            let w_self = 1.0 / big_n;
            let (mean, se) = if big_n > 1.0 {
                let parts = run_batches(seed, samples, DEFAULT_BATCH, |rng, _, count| {
                    let mut m = Moments::default();
                    for _ in 0..count {
                        let d = mu.nonzero_shift(rng);
                        let x = mu.offset(rng);
                        let y = mu.offset(rng);
                        m.push(kernel(torus_dist(x, [d[0] + y[0], d[1] + y[1]]), s));
                    }
                    m
                });
                let m = Moments::merge_all(&parts);
                (m.mean(), m.stderr())
            } else {
                (0.0, 0.0)
            };
            Ok(EnergyResult {
                s,
                n,
                estimate: w_self * self_e + (1.0 - w_self) * mean,
                stderr: (1.0 - w_self) * se,
                sample_count: samples,
                seed,
                sampler,
                self_energy: Some(self_e),
            })
        }
    }
}
