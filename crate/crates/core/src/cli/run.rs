use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde_json::{json, Value};

use super::config::{Format, RunConfig, SCHEMA_VERSION};
use crate::error::{Error, Result};
use crate::exact::{spectral_analyze, HyperbolicMap, IntMatrix2, QuadraticReal};
use crate::geometry::{build_layer, layer_area, line_slice, membership, pairwise_separation, LayerKind, RecurrenceConfig};
use crate::lab::boxcount::boxcount_cost;
use crate::lab::{
    boxcount_estimate, covering_upper_counts, dim_formula, disintegration_bound, measure_uniformity, riesz_energy_1d,
    riesz_energy_2d, BallSpec, DeltaGrid, Fibration, Sampler,
};
use crate::periodic::{candidate_lattice_even, candidate_lattice_odd, enumerate_periodic, inner_lattice_odd, RationalPoint};

/// Estimated runtimes above this many seconds need `--force`.
pub const RUNTIME_LIMIT_S: f64 = 600.0;

pub const DEFAULT_DELTA_GRID: &str = "1e-7:0.25:8";
pub const DEFAULT_ALPHA_GRID: &str = "0.1:3.0:30";
pub const DEFAULT_X0: f64 = 0.3141;

/// Everything an operation produces before it is written out.
#[derive(Debug, Default)]
pub struct Outcome {
    pub seed: Option<u64>,
    pub estimate: Option<f64>,
    pub stderr: Option<f64>,
    pub result: Value,
    pub notes: Vec<String>,
    /// Header and rows for CSV output.
    pub table: Option<(Vec<String>, Vec<Vec<String>>)>,
}

pub struct Context {
    pub map: HyperbolicMap,
    pub notes: Vec<String>,
}

impl Context {
    pub fn new(cfg: &RunConfig) -> Result<Self> {
        let map = HyperbolicMap::from_entries(cfg.matrix)?;
        let mut notes = Vec::new();
        if map.exponent != 1 {
            notes.push(format!(
                "matrix normalized to A^{}; alpha is per step of the original matrix and was rescaled by {}; layer indices count steps of the normalized matrix",
                map.exponent, map.exponent
            ));
        }
        Ok(Context { map, notes })
    }

    pub fn rates(&self, cfg: &RunConfig) -> Result<RecurrenceConfig> {
        let rc = match (&cfg.alpha, &cfg.rates) {
            (Some(a), None) => RecurrenceConfig::exponential(*a)?,
            (None, Some(path)) => RecurrenceConfig::parse_table(&std::fs::read_to_string(path)?)?,
            (Some(_), Some(_)) => return Err(Error::invalid("give either --alpha or --rates, not both")),
            (None, None) => return Err(Error::invalid(format!("{} needs --alpha or --rates", cfg.op))),
        };
        Ok(rc.with_exponent(self.map.exponent))
    }
}

fn guard(cfg: &RunConfig, seconds: f64) -> Result<()> {
    let threads = rayon::current_num_threads().max(1) as f64;
    let est = seconds / threads;
    if est > RUNTIME_LIMIT_S && !cfg.force {
        return Err(Error::RuntimeGuard { seconds: est });
    }
    Ok(())
}

fn frac(q: &num_rational::BigRational) -> String {
    if q.denom() == &BigInt::from(1) {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn point_json(p: &RationalPoint) -> Value {
    json!([frac(&p.x), frac(&p.y)])
}

fn matrix_json(m: &IntMatrix2) -> Value {
    let e = m.entries();
    json!([[e[0].to_string(), e[1].to_string()], [e[2].to_string(), e[3].to_string()]])
}

fn quad_json(q: &QuadraticReal) -> Value {
    json!({
        "exact": q.to_string(),
        "decimal": q.to_real().to_sci(30),
        "value": q.to_f64(),
    })
}

fn single(cfg: &RunConfig) -> Result<u32> {
    let w = cfg.window()?;
    if !w.is_single() {
        return Err(Error::invalid(format!("{} takes a single -n", cfg.op)));
    }
    Ok(w.lo)
}

fn need<T: Copy>(v: Option<T>, what: &str, op: &str) -> Result<T> {
    v.ok_or_else(|| Error::invalid(format!("{op} needs {what}")))
}

pub fn execute(cfg: &RunConfig) -> Result<Outcome> {
    let ctx = Context::new(cfg)?;
    let mut out = match cfg.op.as_str() {
        "analyze" => analyze(cfg, &ctx)?,
        "periodic" => periodic(cfg, &ctx)?,
        "curve" => curve(cfg, &ctx)?,
        "layer" => layer(cfg, &ctx)?,
        "membership" => member(cfg, &ctx)?,
        "area" => area(cfg, &ctx)?,
        "covering" => covering(cfg, &ctx)?,
        "boxcount" => boxcount(cfg, &ctx)?,
        "energy" => energy(cfg, &ctx)?,
        "slice" => slice(cfg, &ctx)?,
        "separation" => separation(cfg, &ctx)?,
        "uniformity" => uniformity(cfg, &ctx)?,
        "disintegration" => disintegration(cfg, &ctx)?,
        other => return Err(Error::invalid(format!("unknown operation {other:?}"))),
    };
    let mut notes = ctx.notes;
    notes.append(&mut out.notes);
    out.notes = notes;
    Ok(out)
}

fn analyze(_cfg: &RunConfig, ctx: &Context) -> Result<Outcome> {
    let map = &ctx.map;
    let orig = spectral_analyze(&map.original)?;
    let sd = &map.spectral;
    let result = json!({
        "matrix": matrix_json(&map.original),
        "det": orig.det,
        "trace": orig.trace.to_string(),
        "discriminant": orig.disc.to_string(),
        "lambda": quad_json(&orig.lambda),
        "logLambda": orig.log_lambda.to_sci(30),
        "exponent": map.exponent,
        "normalized": {
            "matrix": matrix_json(&map.matrix),
            "trace": sd.trace.to_string(),
            "discriminant": sd.disc.to_string(),
            "lambda": quad_json(&sd.lambda),
            "logLambda": sd.log_lambda.to_sci(30),
        },
    });
    Ok(Outcome { result, ..Default::default() })
}

fn periodic(cfg: &RunConfig, ctx: &Context) -> Result<Outcome> {
    let map = &ctx.map;
    let n = single(cfg)?;
    let count = map.h(n).abs();
    let mut result = json!({ "n": n, "count": count.to_string() });
    if cfg.count_only {
        let table = (vec!["n".into(), "count".into()], vec![vec![n.to_string(), count.to_string()]]);
        return Ok(Outcome { estimate: count.to_f64(), result, table: Some(table), ..Default::default() });
    }
    let c = count.to_f64().unwrap_or(f64::INFINITY);
    guard(cfg, c * 2e-6)?;
    let set = enumerate_periodic(map, n, cfg.cap)?;
    result["points"] = Value::Array(set.points.iter().map(point_json).collect());
    let mut notes = Vec::new();
    if cfg.check_lattice {
        let pass = if n % 2 == 1 {
            let k = (n - 1) / 2;
            let bound = candidate_lattice_odd(map, k);
            let inner = inner_lattice_odd(map, k, cfg.cap)?;
            inner.iter().all(|p| set.points.binary_search(p).is_ok()) && divides_all(&set.points, &bound)
        } else {
            let bound = candidate_lattice_even(map, n / 2)?;
            divides_all(&set.points, &bound)
        };
        let verdict = if pass { "PASS" } else { "FAIL" };
        result["lattice"] = json!(verdict);
        notes.push(format!("lattice check: {verdict}"));
    }
    let rows = set.points.iter().map(|p| vec![frac(&p.x), frac(&p.y)]).collect();
    Ok(Outcome {
        estimate: count.to_f64(),
        result,
        notes,
        table: Some((vec!["x".into(), "y".into()], rows)),
        ..Default::default()
    })
}

fn divides_all(points: &[RationalPoint], bound: &BigInt) -> bool {
    points
        .iter()
        .all(|p| (bound % p.x.denom()).eq(&BigInt::from(0)) && (bound % p.y.denom()).eq(&BigInt::from(0)))
}

fn curve(cfg: &RunConfig, ctx: &Context) -> Result<Outcome> {
    let grid = match cfg.alpha_grid {
        Some(g) => g,
        None => super::config::LinearGrid::parse(DEFAULT_ALPHA_GRID)?,
    };
    let k = ctx.map.exponent as f64;
    let l = ctx.map.log_lambda().to_f64();
    let mut rows = Vec::new();
    let mut items = Vec::new();
    for a in grid.values() {
        let f = dim_formula(a * k, l)?;
        rows.push(vec![format!("{a}"), format!("{}", f.s0), format!("{}", f.s1), f.active_branch.as_str().to_string()]);
        items.push(json!({ "alpha": a, "s0": f.s0, "s1": f.s1, "branch": f.active_branch.as_str() }));
    }
    let header = ["alpha", "s0", "s1", "branch"].map(String::from).to_vec();
    Ok(Outcome {
        result: json!({ "logLambda": l / k, "rows": items }),
        table: Some((header, rows)),
        ..Default::default()
    })
}

fn layer(cfg: &RunConfig, ctx: &Context) -> Result<Outcome> {
    let rc = ctx.rates(cfg)?;
    let n = single(cfg)?;
    guard(cfg, ctx.map.h(n).abs().to_f64().unwrap_or(f64::INFINITY) * 2e-6)?;
    let l = build_layer(&ctx.map, &rc, n, LayerKind::Full, cfg.cap)?;
    Ok(Outcome { result: l.to_json(), ..Default::default() })
}

fn member(cfg: &RunConfig, ctx: &Context) -> Result<Outcome> {
    let rc = ctx.rates(cfg)?;
    let x = need(cfg.point, "--point X,Y", &cfg.op)?;
    let mut rows = Vec::new();
    let mut items = Vec::new();
    for n in cfg.window()?.values() {
        let m = membership(&ctx.map, &rc, n, x)?;
        rows.push(vec![n.to_string(), m.to_string()]);
        items.push(json!({ "n": n, "member": m }));
    }
    Ok(Outcome {
        result: json!({ "point": x, "layers": items }),
        table: Some((vec!["n".into(), "member".into()], rows)),
        ..Default::default()
    })
}

fn area(cfg: &RunConfig, ctx: &Context) -> Result<Outcome> {
    let rc = ctx.rates(cfg)?;
    let mut items = Vec::new();
    let mut rows = Vec::new();
    for n in cfg.window()?.values() {
        let a = layer_area(&ctx.map, &rc, n)?;
        items.push(json!({
            "n": n,
            "pieces": a.pieces.to_string(),
            "statedPiece": a.stated_piece.to_sci(20),
            "geometricPiece": a.geometric_piece.to_sci(20),
            "ellipsePiece": a.ellipse_piece.to_sci(20),
            "statedTotal": a.stated_total().to_sci(20),
            "geometricTotal": a.geometric_total().to_sci(20),
            "ellipseTotal": a.ellipse_total().to_sci(20),
        }));
        rows.push(vec![
            n.to_string(),
            a.pieces.to_string(),
            a.stated_total().to_sci(20),
            a.geometric_total().to_sci(20),
            a.ellipse_total().to_sci(20),
        ]);
    }
    let header = ["n", "pieces", "stated_total", "geometric_total", "ellipse_total"].map(String::from).to_vec();
    Ok(Outcome { result: json!({ "layers": items }), table: Some((header, rows)), ..Default::default() })
}

fn covering(cfg: &RunConfig, ctx: &Context) -> Result<Outcome> {
    let rc = ctx.rates(cfg)?;
    let s = need(cfg.s, "-s", &cfg.op)?;
    let mut items = Vec::new();
    let mut rows = Vec::new();
    for n in cfg.window()?.values() {
        let c = covering_upper_counts(&ctx.map, &rc, n, s)?;
        items.push(json!({ "n": n, "ball": c.ball.to_sci(20), "square": c.square.to_sci(20) }));
        rows.push(vec![n.to_string(), c.ball.to_sci(20), c.square.to_sci(20)]);
    }
    let header = ["n", "ball", "square"].map(String::from).to_vec();
    Ok(Outcome { result: json!({ "s": s, "terms": items }), table: Some((header, rows)), ..Default::default() })
}

fn boxcount(cfg: &RunConfig, ctx: &Context) -> Result<Outcome> {
    let rc = ctx.rates(cfg)?;
    let grid = match cfg.delta_grid {
        Some(g) => g,
        None => DeltaGrid::parse(DEFAULT_DELTA_GRID)?,
    };
    let window = cfg.window()?.values();
    guard(cfg, boxcount_cost(&ctx.map, &rc, &window, &grid)? * 1e-7)?;
    let r = boxcount_estimate(&ctx.map, &rc, &window, &grid, cfg.cap)?;
    let mut rows = Vec::new();
    for l in &r.layers {
        for (d, c) in l.deltas.iter().zip(&l.counts) {
            rows.push(vec![l.n.to_string(), format!("{d:e}"), c.to_string()]);
        }
    }
    let header = ["n", "delta", "count"].map(String::from).to_vec();
    let f = dim_formula(rc.alpha(), ctx.map.log_lambda().to_f64())?;
    let mut result = serde_json::to_value(&r)?;
    result["deltaGrid"] = serde_json::to_value(grid)?;
    result["s0"] = json!(f.s0);
    Ok(Outcome { estimate: Some(r.fitted_slope), result, table: Some((header, rows)), ..Default::default() })
}

fn energy(cfg: &RunConfig, ctx: &Context) -> Result<Outcome> {
    let rc = ctx.rates(cfg)?;
    let s = need(cfg.s, "-s", &cfg.op)?;
    let window = cfg.window()?.values();
    let mut items = Vec::new();
    let mut rows = Vec::new();
    let (mut est, mut se) = (None, None);
    let mut seed = None;
    match cfg.dim.unwrap_or(2) {
        2 => {
            let samples = cfg.samples.unwrap_or(1_000_000);
            let sampler = cfg.sampler.unwrap_or(Sampler::Stratified);
            guard(cfg, samples as f64 * window.len() as f64 * 1.5e-7)?;
            seed = Some(cfg.seed());
            for &n in &window {
                let r = riesz_energy_2d(&ctx.map, &rc, n, s, sampler, samples, cfg.seed())?;
                rows.push(vec![n.to_string(), format!("{}", r.estimate), format!("{}", r.stderr)]);
                est = Some(r.estimate);
                se = Some(r.stderr);
                items.push(serde_json::to_value(&r)?);
            }
        }
        1 => {
            let x0 = cfg.x0.unwrap_or(DEFAULT_X0);
            let mut pairs = 0.0;
            for &n in &window {
                let m = line_slice(&ctx.map, &rc, x0, n, cfg.cap)?.m_n() as f64;
                pairs += m * m / 2.0;
            }
            guard(cfg, pairs * 6e-7)?;
            for &n in &window {
                let r = riesz_energy_1d(&ctx.map, &rc, x0, n, s, cfg.cap)?;
                rows.push(vec![n.to_string(), format!("{}", r.estimate), "0".into()]);
                est = Some(r.estimate);
                se = Some(0.0);
                items.push(serde_json::to_value(&r)?);
            }
        }
        d => return Err(Error::invalid(format!("--dim must be 1 or 2, got {d}"))),
    }
    if window.len() > 1 {
        est = None;
        se = None;
    }
    let header = ["n", "estimate", "stderr"].map(String::from).to_vec();
    Ok(Outcome { seed, estimate: est, stderr: se, result: json!({ "layers": items }), table: Some((header, rows)), ..Default::default() })
}

fn slice(cfg: &RunConfig, ctx: &Context) -> Result<Outcome> {
    let rc = ctx.rates(cfg)?;
    let x0 = cfg.x0.unwrap_or(DEFAULT_X0);
    let mut items = Vec::new();
    let mut rows = Vec::new();
    for n in cfg.window()?.values() {
        let f = line_slice(&ctx.map, &rc, x0, n, cfg.cap)?;
        let scale = f.r * ctx.map.lambda_pow(n).to_f64();
        for (a, b) in &f.intervals {
            rows.push(vec![n.to_string(), format!("{a}"), format!("{b}")]);
        }
        items.push(json!({
            "n": n,
            "x0": x0,
            "mN": f.m_n(),
            "mNOverRLambdaN": f.m_n() as f64 / scale,
            "lambda2": f.lambda2,
            "r": f.r,
            "totalLength": f.total_length(),
            "disjoint": f.disjoint(),
            "intervals": f.intervals,
        }));
    }
    let header = ["n", "lo", "hi"].map(String::from).to_vec();
    Ok(Outcome { result: json!({ "layers": items }), table: Some((header, rows)), ..Default::default() })
}

fn separation(cfg: &RunConfig, ctx: &Context) -> Result<Outcome> {
    let rc = ctx.rates(cfg)?;
    let mut items = Vec::new();
    let mut rows = Vec::new();
    for n in cfg.window()?.values() {
        let s = pairwise_separation(&ctx.map, &rc, n, cfg.cap)?;
        items.push(json!({
            "n": n,
            "sK": s.s_k.to_string(),
            "dN": s.d_n.to_sci(20),
            "dNLambdaN": s.scaled.to_sci(20),
            "sameColumn": s.same_column.to_sci(20),
            "sameColumnTimesSK": s.same_column_ratio,
            "candidates": s.candidates,
        }));
        rows.push(vec![n.to_string(), s.s_k.to_string(), s.d_n.to_sci(20), s.scaled.to_sci(20)]);
    }
    let header = ["n", "s_k", "d_n", "d_n_lambda_n"].map(String::from).to_vec();
    Ok(Outcome { result: json!({ "layers": items }), table: Some((header, rows)), ..Default::default() })
}

fn uniformity(cfg: &RunConfig, ctx: &Context) -> Result<Outcome> {
    let rc = ctx.rates(cfg)?;
    let n = single(cfg)?;
    let spec = BallSpec::Random {
        count: cfg.balls.unwrap_or(100),
        radius: cfg.radius.unwrap_or(0.1),
        samples: cfg.samples.unwrap_or(100_000),
        seed: cfg.seed(),
    };
    if let BallSpec::Random { count, samples, .. } = spec {
        guard(cfg, count as f64 * samples as f64 * 1e-7)?;
    }
    let m = measure_uniformity(&ctx.map, &rc, n, spec)?;
    let rows = m
        .balls
        .iter()
        .map(|b| vec![format!("{}", b.center[0]), format!("{}", b.center[1]), format!("{}", b.ratio), format!("{}", b.stderr)])
        .collect();
    let mut result = serde_json::to_value(&m)?;
    result["spread"] = json!(m.spread());
    let header = ["cx", "cy", "ratio", "stderr"].map(String::from).to_vec();
    Ok(Outcome { seed: Some(cfg.seed()), estimate: Some(m.spread()), result, table: Some((header, rows)), ..Default::default() })
}

fn disintegration(cfg: &RunConfig, ctx: &Context) -> Result<Outcome> {
    let s = need(cfg.s, "-s", &cfg.op)?;
    let t = need(cfg.t, "-t", &cfg.op)?;
    let points = cfg.points.unwrap_or(200);
    let fibers = cfg.fibers.unwrap_or(2000);
    let fib = match cfg.window {
        None => Fibration::UniformProduct,
        Some(_) => {
            let rc = ctx.rates(cfg)?;
            let n = single(cfg)?;
            let m = line_slice(&ctx.map, &rc, 0.5, n, cfg.cap).map(|f| f.m_n()).unwrap_or(1) as f64;
            guard(cfg, points as f64 * fibers as f64 * m.max(1.0) * 1e-7)?;
            Fibration::slices(&ctx.map, &rc, n, cfg.cap)?
        }
    };
    let r = disintegration_bound(&fib, s, t, points, fibers, cfg.seed())?;
    let rows = r
        .points
        .iter()
        .map(|p| vec![format!("{}", p.x[0]), format!("{}", p.x[1]), format!("{}", p.lhs), format!("{}", p.rhs), p.holds.to_string()])
        .collect();
    let header = ["x1", "x2", "lhs", "rhs", "holds"].map(String::from).to_vec();
    Ok(Outcome {
        seed: Some(cfg.seed()),
        estimate: Some(r.energy),
        stderr: Some(r.energy_stderr),
        result: serde_json::to_value(&r)?,
        table: Some((header, rows)),
        ..Default::default()
    })
}

/// Runs `cfg` and renders the output in the requested format.
pub fn render(cfg: &RunConfig) -> Result<String> {
    let start = Instant::now();
    let out = execute(cfg)?;
    let ms = start.elapsed().as_millis() as u64;
    match cfg.format {
        Format::Json => {
            let record = json!({
                "schemaVersion": SCHEMA_VERSION,
                "op": cfg.op,
                "params": serde_json::to_value(cfg)?,
                "seed": out.seed,
                "estimate": out.estimate,
                "stderr": out.stderr,
                "runtimeMs": if cfg.timing { Some(ms) } else { None },
                "notes": out.notes,
                "result": out.result,
            });
            Ok(serde_json::to_string_pretty(&record)? + "\n")
        }
        Format::Csv => {
            let (header, rows) = out
                .table
                .ok_or_else(|| Error::invalid(format!("{} has no CSV form; use --format json", cfg.op)))?;
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&header)?;
            for r in rows {
                w.write_record(&r)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::invalid(e.to_string()))?;
            Ok(String::from_utf8(bytes).expect("csv is utf-8"))
        }
    }
}
