//! Numerical check of the potential inequality for measures disintegrated
//! along vertical circles over Lebesgue measure on the horizontal one.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::energy1d::ArcMeasure;
use super::measure::{kernel, torus_dist, HALF_DIAMETER};
use super::quadrature::integrate;
use crate::error::{Error, Result};
use crate::exact::HyperbolicMap;
use crate::geometry::layer::wrap;
use crate::geometry::{RecurrenceConfig, Slicer};
use crate::mc::{batch_rng, Moments};

/// Relative slack for comparisons that are equalities in exact arithmetic.
pub const ROUNDOFF: f64 = 1e-12;

/// The measure whose fibres are tested.
#[derive(Clone, Debug)]
pub enum Fibration {
    /// Lebesgue measure on the torus, every fibre a full circle.
    UniformProduct,
    /// Normalized length on the slice intervals of layer `n`, integrated over `x`.
    Slices { slicer: Box<Slicer>, cap: u64 },
}

impl Fibration {
    pub fn slices(map: &HyperbolicMap, cfg: &RecurrenceConfig, n: u32, cap: u64) -> Result<Self> {
        Ok(Fibration::Slices { slicer: Box::new(Slicer::new(map, cfg, n)?), cap })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Fibration::UniformProduct => "uniform-product",
            Fibration::Slices { .. } => "slices",
        }
    }

    pub fn n(&self) -> Option<u32> {
        match self {
            Fibration::UniformProduct => None,
            Fibration::Slices { slicer, .. } => Some(slicer.n),
        }
    }

    pub fn fiber(&self, x1: f64) -> Result<ArcMeasure> {
        match self {
            Fibration::UniformProduct => ArcMeasure::new(vec![(0.0, 1.0)]),
            Fibration::Slices { slicer, cap } => ArcMeasure::new(slicer.slice(x1, *cap)?.intervals),
        }
    }
}

/// `sup_x R_t L^1 (x)` on the circle with distances divided by `HALF_DIAMETER`.
pub fn lebesgue_potential_norm(t: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&t) {
        return Err(Error::invalid(format!("t must lie in [0, 1), got {t}")));
    }
    Ok(HALF_DIAMETER.powf(t) * 2.0 * 0.5f64.powf(1.0 - t) / (1.0 - t))
}

/// `R_a L^2 (x)` on the torus, the same at every point.
pub fn torus_lebesgue_potential(a: f64) -> Result<f64> {
    if !(0.0..2.0).contains(&a) {
        return Err(Error::invalid(format!("planar potential needs 0 <= a < 2, got {a}")));
    }
    let q = integrate(
        |phi: f64| (0.5 / phi.cos()).powf(2.0 - a) / (2.0 - a),
        0.0,
        std::f64::consts::FRAC_PI_4,
        0.0,
        1e-13,
    );
    Ok(HALF_DIAMETER.powf(a) * 8.0 * q.value)
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PointCheck {
    pub x: [f64; 2],
    /// `R_{s+t} mu (x)`
    pub lhs: f64,
    pub lhs_stderr: f64,
    /// `int R_s mu_{y1}(x2) |x1 - y1|^{-t} dy1`
    pub rhs: f64,
    pub rhs_stderr: f64,
    pub gap_stderr: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DisintegrationReport {
    pub case: &'static str,
    pub n: Option<u32>,
    pub s: f64,
    pub t: f64,
    pub fibers: usize,
    pub seed: u64,
    pub points: Vec<PointCheck>,
    pub all_hold: bool,
    /// `I_{s+t}(mu)`
    pub energy: f64,
    pub energy_stderr: f64,
    pub sup_fiber_potential: f64,
    pub base_potential_norm: f64,
    pub product_bound: f64,
    pub bound_holds: bool,
}

fn draw<R: Rng>(fib: &Fibration, rng: &mut R) -> Result<(f64, ArcMeasure, f64)> {
    let x1: f64 = rng.gen();
    let m = fib.fiber(x1)?;
    let x2 = m.sample(rng);
    Ok((x1, m, x2))
}

/// Checks the pointwise inequality at `points` points drawn from the measure,
/// with both sides averaged over `fibers` common draws `y ~ mu`.
pub fn disintegration_bound(fib: &Fibration, s: f64, t: f64, points: usize, fibers: usize, seed: u64) -> Result<DisintegrationReport> {
    if !(0.0..1.0).contains(&s) {
        return Err(Error::invalid(format!("s must lie in [0, 1), got {s}")));
    }
    let base_norm = lebesgue_potential_norm(t)?;
    if points == 0 || fibers < 2 {
        return Err(Error::invalid("need at least one point and two fibres"));
    }
    let mut rng = batch_rng(seed, 0);
    let ys: Vec<(f64, ArcMeasure, f64)> = (0..fibers).map(|_| draw(fib, &mut rng)).collect::<Result<_>>()?;
    let mut rng = batch_rng(seed, 1);
    let xs: Vec<(f64, ArcMeasure, f64)> = (0..points).map(|_| draw(fib, &mut rng)).collect::<Result<_>>()?;

    let rows: Vec<Result<(PointCheck, f64)>> = xs
        .par_iter()
        .map(|(x1, _, x2)| {
            let x = [*x1, *x2];
            let (mut l, mut r, mut g) = (Moments::default(), Moments::default(), Moments::default());
            let mut top = 0.0f64;
            for (y1, m, y2) in &ys {
                let lhs = kernel(torus_dist(x, [*y1, *y2]), s + t);
                let pot = m.potential(*x2, s)?;
                top = top.max(pot);
                let rhs = pot * kernel(wrap(x1 - y1).abs(), t);
                l.push(lhs);
                r.push(rhs);
                g.push(rhs - lhs);
            }
            let holds = l.mean() <= r.mean() + 3.0 * g.stderr() + ROUNDOFF * r.mean();
            let pc = PointCheck {
                x,
                lhs: l.mean(),
                lhs_stderr: l.stderr(),
                rhs: r.mean(),
                rhs_stderr: r.stderr(),
                gap_stderr: g.stderr(),
                holds,
            };
            Ok((pc, top))
        })
        .collect();
    let mut checks = Vec::with_capacity(points);
    let mut sup = 0.0f64;
    for row in rows {
        let (pc, top) = row?;
        sup = sup.max(top);
        checks.push(pc);
    }
    // potentials peak inside the intervals; probe every midpoint of a few fibres
    let probe: Vec<Result<f64>> = ys
        .par_iter()
        .take(20)
        .map(|(_, m, _)| {
            let mut top = 0.0f64;
            for &(a, b) in &m.arcs {
                let c = 0.5 * (a + b);
                top = top.max(m.potential(c - c.floor(), s)?);
            }
            Ok(top)
        })
        .collect();
    for p in probe {
        sup = sup.max(p?);
    }
    let mut e = Moments::default();
    for c in &checks {
        e.push(c.lhs);
    }
    let energy = e.mean();
    let product_bound = sup * base_norm;
    Ok(DisintegrationReport {
        case: fib.name(),
        n: fib.n(),
        s,
        t,
        fibers,
        seed,
        all_hold: checks.iter().all(|c| c.holds),
        points: checks,
        energy,
        energy_stderr: e.stderr(),
        sup_fiber_potential: sup,
        base_potential_norm: base_norm,
        product_bound,
        bound_holds: energy <= product_bound * (1.0 + ROUNDOFF),
    })
}
