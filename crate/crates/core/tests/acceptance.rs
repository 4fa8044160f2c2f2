//! Acceptance criteria 1-10. Runs every criterion, prints one PASS/FAIL line
//! each, and exits non-zero if any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use torus_recur::exact::{spectral_analyze, HyperbolicMap, IntMatrix2};
use torus_recur::geometry::{pairwise_separation, RecurrenceConfig};
use torus_recur::lab::{
    boxcount_estimate, covering_upper_counts, dim_formula, disintegration_bound, measure_uniformity, pair_integral,
    riesz_energy_1d, riesz_energy_2d, BallSpec, Branch, DeltaGrid, Fibration, Sampler,
};
use torus_recur::periodic::{
    candidate_lattice_even, candidate_lattice_odd, enumerate_periodic, image_vertices, inner_lattice_odd,
    is_periodic, odd_data, pick_count,
};

use common::{adjugate_points, pair_integral_oracle, MATRICES};

type Criterion = (u32, &'static str, f64, fn() -> Verdict);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn cat() -> (HyperbolicMap, f64) {
    let map = HyperbolicMap::cat();
    let l = map.log_lambda().to_f64();
    (map, l)
}

fn spread(v: &[f64]) -> f64 {
    let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = v.iter().cloned().fold(f64::INFINITY, f64::min);
    max / min
}

fn fmt(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(", ")
}

fn exact_identities() -> Verdict {
    let mut checks = 0u64;
    for e in MATRICES {
        let m = IntMatrix2::from_entries(e);
        let sd = spectral_analyze(&m).unwrap();
        let mut p = IntMatrix2::identity();
        for n in 0..=30 {
            if sd.h(n) != p.minus_identity().det() {
                return verdict(false, format!("H_n mismatch for {e:?} at n={n}"));
            }
            p = &p * &m;
            checks += 1;
        }
        let map = HyperbolicMap::new(m).unwrap();
        let a = &map.matrix;
        let t = a.trace();
        let mut pw = IntMatrix2::identity();
        let mut s = BigInt::from(0);
        for k in 0..=14 {
            s += if k == 0 { BigInt::from(1) } else { pw.trace() };
            pw = &pw * a;
            if k == 0 {
                continue;
            }
            let h = map.h(2 * k + 1);
            if h != -(&t - BigInt::from(2)) * &s * &s {
                return verdict(false, format!("odd identity fails for {e:?} at k={k}"));
            }
            checks += 1;
        }
        for n in 1..=30 {
            let h = map.h(n).abs();
            if h > BigInt::from(10_000) {
                break;
            }
            let set = enumerate_periodic(&map, n, 10_000).unwrap();
            let pick = pick_count(&image_vertices(&map.power(n).minus_identity())).unwrap();
            if BigInt::from(set.points.len()) != h || pick != h {
                return verdict(false, format!("count mismatch for {e:?} at n={n}"));
            }
            let den = if n % 2 == 1 { candidate_lattice_odd(&map, (n - 1) / 2) } else { candidate_lattice_even(&map, n / 2).unwrap() };
            if !set.points.iter().all(|p| den.is_multiple_of(p.x.denom()) && den.is_multiple_of(p.y.denom())) {
                return verdict(false, format!("denominator check fails for {e:?} at n={n}"));
            }
            if n % 2 == 1 {
                let k = (n - 1) / 2;
                if odd_data(&map, k).n_n <= BigInt::from(10_000) {
                    let inner = inner_lattice_odd(&map, k, 10_000).unwrap();
                    if !inner.iter().all(|p| is_periodic(&map, p, n)) {
                        return verdict(false, format!("inner lattice point not periodic for {e:?} at n={n}"));
                    }
                    checks += inner.len() as u64;
                }
            }
            checks += set.points.len() as u64;
        }
    }
    verdict(true, format!("{} matrices, {checks} exact checks", MATRICES.len()))
}

fn snf_vs_adjugate() -> Verdict {
    let mut sets = 0;
    for e in MATRICES {
        let map = HyperbolicMap::from_entries(e).unwrap();
        for n in 1.. {
            if map.h(n).abs() > BigInt::from(2000) {
                break;
            }
            let pts = enumerate_periodic(&map, n, 2000).unwrap().points;
            let (q, oracle) = adjugate_points(map.power(n).entries().map(|v| v.to_i128().unwrap()));
            let qb = BigInt::from(q);
            let got: BTreeSet<(i128, i128)> = pts
                .iter()
                .map(|p| {
                    let x = (p.x.clone() * &qb).to_integer().to_i128().unwrap();
                    let y = (p.y.clone() * &qb).to_integer().to_i128().unwrap();
                    (x, y)
                })
                .collect();
            if got != oracle || got.len() != pts.len() {
                return verdict(false, format!("point sets differ for {e:?} at n={n}"));
            }
            sets += 1;
        }
    }
    verdict(true, format!("{sets} point sets identical"))
}

fn dimension_curve() -> Verdict {
    let (_, l) = cat();
    let f = |a: f64| dim_formula(a, l).unwrap();
    let refs = [(l, 1.0), (l / 2.0, 4.0 / 3.0), (2.0 * l, 0.5)];
    let worst = refs.iter().map(|&(a, want)| (f(a).s0 - want).abs()).fold(0.0, f64::max);
    let grid: Vec<f64> = (1..=300).map(|i| 3.0 * l * i as f64 / 300.0).collect();
    let s0: Vec<f64> = grid.iter().map(|&a| f(a).s0).collect();
    let monotone = s0.windows(2).all(|w| w[1] <= w[0]);
    let switch = grid.iter().all(|&a| {
        let b = f(a).active_branch;
        if a <= l {
            b == Branch::ParallelogramCovering
        } else {
            b == Branch::BallCovering
        }
    }) && f(l * (1.0 - 1e-12)).active_branch != f(l * (1.0 + 1e-12)).active_branch;
    verdict(worst < 1e-12 && monotone && switch, format!("max reference error {worst:.1e}, monotone {monotone}, switch at logL {switch}"))
}

fn covering_ratios() -> Verdict {
    let (map, l) = cat();
    let mut worst = 0.0f64;
    for alpha in [0.3, l, 2.0] {
        let cfg = RecurrenceConfig::exponential(alpha).unwrap();
        let s_ball = 1.1 * l / alpha;
        let s_sq = 1.1 * 2.0 * l / (alpha + l);
        let balls: Vec<_> = (20..=30).map(|n| covering_upper_counts(&map, &cfg, n, s_ball).unwrap()).collect();
        let squares: Vec<_> = (20..=30).map(|n| covering_upper_counts(&map, &cfg, n, s_sq).unwrap()).collect();
        let want_b = (l - alpha * s_ball).exp();
        let want_s = (2.0 * l - (alpha + l) * s_sq).exp();
        for w in balls.windows(2) {
            let r = (&w[1].ball / &w[0].ball).to_f64();
            worst = worst.max((r - want_b).abs() / want_b);
        }
        for w in squares.windows(2) {
            let r = (&w[1].square / &w[0].square).to_f64();
            worst = worst.max((r - want_s).abs() / want_s);
        }
    }
    verdict(worst <= 1e-6, format!("max relative ratio error {worst:.2e}"))
}

fn boxcounting() -> Verdict {
    let (map, l) = cat();
    let grid = DeltaGrid::parse("1e-7:0.25:8").unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for (alpha, window, target) in [
        (l / 2.0, vec![3, 5, 7, 9], 4.0 / 3.0),
        (l, vec![3, 5, 7, 9], 1.0),
        (3.0 * l, vec![3, 5, 7, 9, 11], 1.0 / 3.0),
    ] {
        let cfg = RecurrenceConfig::exponential(alpha).unwrap();
        match boxcount_estimate(&map, &cfg, &window, &grid, 10_000_000) {
            Ok(r) => {
                let good = (r.fitted_slope - target).abs() <= 0.15;
                ok &= good;
                parts.push(format!("slope {:.3} vs {:.3}", r.fitted_slope, target));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("error {e}"));
            }
        }
    }
    verdict(ok, parts.join("; "))
}

fn separation() -> Verdict {
    let map = HyperbolicMap::cat();
    let cfg = RecurrenceConfig::exponential(1.0).unwrap();
    let scaled: Vec<f64> = (3..=15)
        .step_by(2)
        .map(|n| pairwise_separation(&map, &cfg, n, 10_000_000).unwrap().scaled.to_f64())
        .collect();
    let positive = scaled.iter().all(|&v| v > 0.0);
    let sp = spread(&scaled);
    verdict(positive && sp <= 20.0, format!("d_n lambda^n = [{}], max/min {sp:.1} (need <= 20)", fmt(&scaled)))
}

fn energies() -> Verdict {
    let (map, l) = cat();
    let mut ok = true;
    let mut parts = Vec::new();
    let cfg = RecurrenceConfig::exponential(l).unwrap();
    let e0 = riesz_energy_2d(&map, &cfg, 9, 0.0, Sampler::Plain, 10_000_000, 42).unwrap();
    let a = (e0.estimate - 1.0).abs() <= 3.0 * e0.stderr + 1e-12;
    ok &= a;
    parts.push(format!("(a) I_0 = {:.6}", e0.estimate));

    let s0 = dim_formula(l, l).unwrap().s0;
    let run = |s: f64| -> Vec<f64> {
        [5, 7, 9, 11]
            .iter()
            .map(|&n| riesz_energy_2d(&map, &cfg, n, s, Sampler::Stratified, 10_000_000, 42).unwrap().estimate)
            .collect()
    };
    let bounded = run(0.9 * s0);
    let b2 = spread(&bounded) <= 3.0;
    ok &= b2;
    parts.push(format!("(b) 2D at 0.9 s0: [{}] max/min {:.2}", fmt(&bounded), spread(&bounded)));

    let alpha1 = 0.3;
    let cfg1 = RecurrenceConfig::exponential(alpha1).unwrap();
    let s1 = dim_formula(alpha1, l).unwrap().s1;
    let slice: Vec<f64> = [7, 9, 11, 13]
        .iter()
        .map(|&n| riesz_energy_1d(&map, &cfg1, 0.3141, n, 0.9 * s1, 100_000_000).unwrap().estimate)
        .collect();
    let b1 = spread(&slice) <= 3.0;
    ok &= b1;
    parts.push(format!("(b) 1D at 0.9 s1: [{}] max/min {:.2}", fmt(&slice), spread(&slice)));

    let s = 1.2 * s0;
    let growing = run(s);
    let c = s <= 2.0 && growing.windows(2).all(|w| w[1] >= 1.5 * w[0]);
    ok &= c;
    parts.push(format!("(c) 2D at 1.2 s0: [{}]", fmt(&growing)));
    verdict(ok, parts.join("; "))
}

fn disintegration() -> Verdict {
    let control = disintegration_bound(&Fibration::UniformProduct, 0.4, 0.4, 200, 2000, 42).unwrap();
    let (map, l) = cat();
    let alpha = 0.3;
    let cfg = RecurrenceConfig::exponential(alpha).unwrap();
    let (s, t) = (0.4, 0.5);
    let s0 = dim_formula(alpha, l).unwrap().s0;
    let fib = Fibration::slices(&map, &cfg, 9, 100_000_000).unwrap();
    let r = disintegration_bound(&fib, s, t, 200, 2000, 42).unwrap();
    let ok = s + t < s0 && control.all_hold && control.bound_holds && r.all_hold && r.bound_holds;
    verdict(
        ok,
        format!(
            "control: {} points hold, I = {:.4} <= {:.4}; n=9: {} points hold, I = {:.4} <= {:.4}",
            control.points.iter().filter(|p| p.holds).count(),
            control.energy,
            control.product_bound,
            r.points.iter().filter(|p| p.holds).count(),
            r.energy,
            r.product_bound
        ),
    )
}

fn uniformity() -> Verdict {
    let (map, _) = cat();
    let cfg = RecurrenceConfig::exponential(1.0).unwrap();
    let spec = BallSpec::Random { count: 100, radius: 0.1, samples: 100_000, seed: 42 };
    let m = measure_uniformity(&map, &cfg, 9, spec).unwrap();
    verdict(m.spread() <= 4.0, format!("ratios in [{:.3}, {:.3}], max/min {:.3}", m.min_ratio, m.max_ratio, m.spread()))
}

fn pair_integrals() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (a, b) = (rng.gen::<f64>(), rng.gen::<f64>());
        let (l1, l2) = (rng.gen_range(1e-3..0.5), rng.gen_range(1e-3..0.5));
        let s = rng.gen_range(0.05..0.95);
        let got = pair_integral(a, l1, b, l2, s).unwrap();
        let want = pair_integral_oracle(a, l1, b, l2, s);
        worst = worst.max((got - want).abs() / want);
    }
    verdict(worst <= 1e-6, format!("100 pairs, max relative error {worst:.2e}"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "exact identity suite", 10.0, exact_identities),
        (2, "SNF vs adjugate oracle", 30.0, snf_vs_adjugate),
        (3, "dimension formula curve", 1.0, dimension_curve),
        (4, "covering decay ratios", 5.0, covering_ratios),
        (5, "box-counting slopes", 600.0, boxcounting),
        (6, "sublayer separation", 120.0, separation),
        (7, "energy certificates", 600.0, energies),
        (8, "disintegration inequality", 300.0, disintegration),
        (9, "measure uniformity", 120.0, uniformity),
        (10, "1-D closed form vs quadrature", 10.0, pair_integrals),
    ];
    let mut failed = 0;
    for (id, name, limit, f) in criteria {
        let start = Instant::now();
        let v = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            verdict(false, format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        let in_time = secs <= limit;
        let pass = v.pass && in_time;
        if !pass {
            failed += 1;
        }
        let timing = if in_time { format!("{secs:.1} s") } else { format!("{secs:.1} s, over {limit} s limit") };
        println!("criterion {id:>2} {}: {name}: {} ({timing})", if pass { "PASS" } else { "FAIL" }, v.detail);
    }
    println!("acceptance: {} of 10 criteria passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
