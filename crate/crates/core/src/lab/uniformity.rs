use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::measure::{torus_dist, OddMeasure};
use crate::error::{Error, Result};
use crate::exact::HyperbolicMap;
use crate::geometry::RecurrenceConfig;
use crate::mc::batch_rng;

#[derive(Clone, Copy, Debug)]
pub enum BallSpec {
    /// `count` balls of radius `radius` with uniform random centres.
    Random { count: usize, radius: f64, samples: u64, seed: u64 },
    WholeTorus,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BallRatio {
    pub center: [f64; 2],
    pub radius: f64,
    /// `mu_n(B) / L(B)`
    pub ratio: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MeasureCheck {
    pub n: u32,
    pub balls: Vec<BallRatio>,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

impl MeasureCheck {
    pub fn spread(&self) -> f64 {
        self.max_ratio / self.min_ratio
    }
}

/// Compares `mu_n(B)` with `L(B)` for a family of balls. `mu_n(B)` is
/// estimated as the fraction of `mu_n`-distributed points that land in `B`.
pub fn measure_uniformity(map: &HyperbolicMap, cfg: &RecurrenceConfig, n: u32, spec: BallSpec) -> Result<MeasureCheck> {
    let mu = OddMeasure::new(map, cfg, n)?;
    let (count, radius, samples, seed) = match spec {
        BallSpec::WholeTorus => {
            let b = BallRatio { center: [0.5, 0.5], radius: super::measure::HALF_DIAMETER, ratio: 1.0, stderr: 0.0 };
            return Ok(MeasureCheck { n, balls: vec![b], min_ratio: 1.0, max_ratio: 1.0 });
        }
        BallSpec::Random { count, radius, samples, seed } => (count, radius, samples, seed),
    };
    if count == 0 || samples == 0 {
        return Err(Error::invalid("ball count and samples must be positive"));
    }
    if !(radius > 0.0 && radius <= 0.5) {
        return Err(Error::invalid(format!("ball radius must lie in (0, 1/2], got {radius}")));
    }
    if radius < 10.0 * mu.geo.lambda1() {
        return Err(Error::invalid(format!(
            "ball radius {radius} is below 10 lambda1 = {}",
            10.0 * mu.geo.lambda1()
        )));
    }
    let mut rng = batch_rng(seed, 0);
    let centers: Vec<[f64; 2]> = (0..count).map(|_| [rng.gen::<f64>(), rng.gen::<f64>()]).collect();
    let area = PI * radius * radius;
    let balls: Vec<BallRatio> = centers
        .par_iter()
        .enumerate()
        .map(|(i, &c)| {
            let mut rng = batch_rng(seed, 1 + i as u64);
            let mut hits = 0u64;
            for _ in 0..samples {
                if torus_dist(mu.sample(&mut rng), c) < radius {
                    hits += 1;
                }
            }
            let p = hits as f64 / samples as f64;
            let se = (p * (1.0 - p) / samples as f64).sqrt();
            BallRatio { center: c, radius, ratio: p / area, stderr: se / area }
        })
        .collect();
    let min_ratio = balls.iter().map(|b| b.ratio).fold(f64::INFINITY, f64::min);
    let max_ratio = balls.iter().map(|b| b.ratio).fold(0.0, f64::max);
    Ok(MeasureCheck { n, balls, min_ratio, max_ratio })
}
