//! Riesz energies of length measures on unions of arcs of the unit circle,
//! in closed form. Distances are circular and divided by `HALF_DIAMETER`.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::measure::HALF_DIAMETER;
use crate::error::{Error, Result};
use crate::exact::HyperbolicMap;
use crate::geometry::{line_slice, RecurrenceConfig};

/// `((1 + u)^p - 1) / p`, with the `p -> 0` limit `ln(1 + u)`.
fn growth(u: f64, p: f64) -> f64 {
    if p == 0.0 {
        u.ln_1p()
    } else {
        (p * u.ln_1p()).exp_m1() / p
    }
}

/// `int_{z0}^{z1} z^e dz`, `0 <= z0 <= z1`.
fn int_pow(z0: f64, z1: f64, e: f64) -> f64 {
    if z1 <= z0 {
        return 0.0;
    }
    if z0 == 0.0 {
        return if e > -1.0 { z1.powf(e + 1.0) / (e + 1.0) } else { f64::INFINITY };
    }
    z0.powf(e + 1.0) * growth((z1 - z0) / z0, e + 1.0)
}

/// `int_0^U u (1 + u)^e du`.
fn moment_kernel(u: f64, e: f64) -> f64 {
    if u < 0.25 {
        let mut c = 1.0;
        let mut pow = u * u;
        let mut sum = 0.0;
        for k in 0..200 {
            let term = c * pow / (k as f64 + 2.0);
            sum += term;
            if term.abs() <= 1e-18 * sum.abs() {
                break;
            }
            c *= (e - k as f64) / (k as f64 + 1.0);
            pow *= u;
        }
        sum
    } else {
        growth(u, e + 2.0) - growth(u, e + 1.0)
    }
}

/// `int_{z0}^{z1} (z - z0) z^e dz`, `0 <= z0 <= z1`.
fn first_moment(z0: f64, z1: f64, e: f64) -> f64 {
    if z1 <= z0 {
        return 0.0;
    }
    if z0 == 0.0 {
        return if e > -2.0 { z1.powf(e + 2.0) / (e + 2.0) } else { f64::INFINITY };
    }
    z0.powf(e + 2.0) * moment_kernel((z1 - z0) / z0, e)
}

/// `int_{d0}^{d1} w(d) |d - k|^{-s} dd` with `w` linear and `|d - k|` monotone.
fn linear_piece(d0: f64, d1: f64, w0: f64, w1: f64, k: f64, s: f64) -> f64 {
    let (mut z0, mut z1) = ((d0 - k).abs(), (d1 - k).abs());
    let (mut wa, mut wb) = (w0, w1);
    if z0 > z1 {
        std::mem::swap(&mut z0, &mut z1);
        std::mem::swap(&mut wa, &mut wb);
    }
    if z1 <= z0 {
        return 0.0;
    }
    let mut out = 0.0;
    if wa != 0.0 {
        out += wa * int_pow(z0, z1, -s);
    }
    if wb != wa {
        out += (wb - wa) / (z1 - z0) * first_moment(z0, z1, -s);
    }
    out
}

/// Integrates a piecewise-linear weight (given at sorted `knots`) against
/// the circular kernel `|d|_circ^{-s}`.
fn against_kernel(knots: &[(f64, f64)], s: f64) -> f64 {
    let mut total = 0.0;
    for w in knots.windows(2) {
        let ((da, wa), (db, wb)) = (w[0], w[1]);
        if db <= da {
            continue;
        }
        // split at integers and half-integers
        let mut cuts = vec![da];
        let mut h = (2.0 * da).floor() + 1.0;
        while h / 2.0 < db {
            cuts.push(h / 2.0);
            h += 1.0;
        }
        cuts.push(db);
        let slope = (wb - wa) / (db - da);
        for c in cuts.windows(2) {
            let (x0, x1) = (c[0], c[1]);
            if x1 <= x0 {
                continue;
            }
            let k = (0.5 * (x0 + x1)).round();
            let w0 = wa + slope * (x0 - da);
            let w1 = wa + slope * (x1 - da);
            total += linear_piece(x0, x1, w0, w1, k, s);
        }
    }
    total
}

/// `int_I int_J (|x - y|_circ / H)^{-s} dy dx` for arcs `I = [a, a + l1]`, `J = [b, b + l2]`.
pub fn pair_integral(a: f64, l1: f64, b: f64, l2: f64, s: f64) -> Result<f64> {
    // weight of the difference d = y - x
    let base = b - a;
    let m = l1.min(l2);
    let knots = [(base - l1, 0.0), (base - l1 + m, m), (base + l2 - m, m), (base + l2, 0.0)];
    let touches = {
        // w > 0 where d is an integer
        let lo = base - l1;
        let hi = base + l2;
        (lo.ceil() < hi) && !(lo.ceil() == lo && lo + 1.0 >= hi)
    };
    if s >= 1.0 && touches {
        return Err(Error::SelfEnergyDiverges { s });
    }
    Ok(HALF_DIAMETER.powf(s) * against_kernel(&knots, s))
}

/// `int_I (|x - y|_circ / H)^{-s} dx` for the arc `I = [a, a + l]`.
pub fn arc_potential(a: f64, l: f64, y: f64, s: f64) -> Result<f64> {
    let lo = a - y;
    let hi = lo + l;
    if s >= 1.0 && lo.ceil() <= hi && lo.ceil() > lo {
        return Err(Error::SelfEnergyDiverges { s });
    }
    Ok(HALF_DIAMETER.powf(s) * against_kernel(&[(lo, 1.0), (hi, 1.0)], s))
}

/// `iint_{[0,l]^2} |x - y|^{-s}` without normalization.
pub fn interval_self_integral(l: f64, s: f64) -> Result<f64> {
    if s >= 1.0 {
        return Err(Error::SelfEnergyDiverges { s });
    }
    Ok(2.0 * l.powf(2.0 - s) / ((1.0 - s) * (2.0 - s)))
}

/// Normalized length measure on a union of arcs `(lo, hi)`.
#[derive(Clone, Debug)]
pub struct ArcMeasure {
    pub arcs: Vec<(f64, f64)>,
    pub total: f64,
    cum: Vec<f64>,
}

impl ArcMeasure {
    pub fn new(arcs: Vec<(f64, f64)>) -> Result<Self> {
        let total: f64 = arcs.iter().map(|(a, b)| b - a).sum();
        if arcs.is_empty() || total <= 0.0 {
            return Err(Error::EmptySlice);
        }
        let cum = arcs
            .iter()
            .scan(0.0, |acc, (a, b)| {
                *acc += b - a;
                Some(*acc)
            })
            .collect();
        Ok(ArcMeasure { arcs, total, cum })
    }

    /// A point of the circle drawn from the measure.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        let u = rng.gen::<f64>() * self.total;
        let i = self.cum.partition_point(|&c| c <= u).min(self.arcs.len() - 1);
        let (a, b) = self.arcs[i];
        let y = a + rng.gen::<f64>() * (b - a);
        y - y.floor()
    }

    /// `(self part, mutual part)` of the normalized energy.
    pub fn energy_parts(&self, s: f64) -> Result<(f64, f64)> {
        let arcs = &self.arcs;
        let rows: Vec<Result<(f64, f64)>> = (0..arcs.len())
            .into_par_iter()
            .map(|i| {
                let (a, ah) = arcs[i];
                let own = pair_integral(a, ah - a, a, ah - a, s)?;
                let mut mutual = 0.0;
                for &(b, bh) in &arcs[i + 1..] {
                    mutual += 2.0 * pair_integral(a, ah - a, b, bh - b, s)?;
                }
                Ok((own, mutual))
            })
            .collect();
        let mut own = 0.0;
        let mut mutual = 0.0;
        for r in rows {
            let (o, m) = r?;
            own += o;
            mutual += m;
        }
        let t2 = self.total * self.total;
        Ok((own / t2, mutual / t2))
    }

    pub fn energy(&self, s: f64) -> Result<f64> {
        let (a, b) = self.energy_parts(s)?;
        Ok(a + b)
    }

    /// `R_s mu (y)`.
    pub fn potential(&self, y: f64, s: f64) -> Result<f64> {
        let mut acc = 0.0;
        for &(a, b) in &self.arcs {
            acc += arc_potential(a, b - a, y, s)?;
        }
        Ok(acc / self.total)
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SliceEnergy {
    pub s: f64,
    pub n: u32,
    pub x0: f64,
    pub m_n: usize,
    pub estimate: f64,
    pub self_part: f64,
    pub mutual_part: f64,
}

pub fn riesz_energy_1d(map: &HyperbolicMap, cfg: &RecurrenceConfig, x0: f64, n: u32, s: f64, cap: u64) -> Result<SliceEnergy> {
    if !(s.is_finite() && s >= 0.0) {
        return Err(Error::invalid(format!("s must be non-negative, got {s}")));
    }
    if s >= 1.0 {
        return Err(Error::SelfEnergyDiverges { s });
    }
    let fam = line_slice(map, cfg, x0, n, cap)?;
    let m_n = fam.m_n();
    let mu = ArcMeasure::new(fam.intervals)?;
    let (self_part, mutual_part) = mu.energy_parts(s)?;
    Ok(SliceEnergy { s, n, x0, m_n, estimate: self_part + mutual_part, self_part, mutual_part })
}
