#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};
use std::f64::consts::FRAC_PI_2;
use std::path::PathBuf;

use serde_json::Value;

/// Unimodular hyperbolic matrices, including det -1 and negative trace.
pub const MATRICES: [[i64; 4]; 14] = [
    [2, 1, 1, 1],
    [1, 1, 1, 2],
    [3, 1, 2, 1],
    [2, 1, 3, 2],
    [3, 2, 1, 1],
    [4, 1, 3, 1],
    [5, 2, 2, 1],
    [1, 2, 1, 3],
    [3, 1, 5, 2],
    [2, 3, 1, 2],
    [1, 1, 1, 0],
    [2, 1, 1, 0],
    [0, 1, 1, 3],
    [-2, 1, 1, -1],
];

pub fn det(m: [i64; 4]) -> i64 {
    m[0] * m[3] - m[1] * m[2]
}

pub fn mul(x: [i128; 4], y: [i128; 4]) -> [i128; 4] {
    [
        x[0] * y[0] + x[1] * y[2],
        x[0] * y[1] + x[1] * y[3],
        x[2] * y[0] + x[3] * y[2],
        x[2] * y[1] + x[3] * y[3],
    ]
}

/// `A^n` by repeated multiplication in `i128`.
pub fn pow128(m: [i64; 4], n: u32) -> [i128; 4] {
    let base = m.map(|v| v as i128);
    let mut acc = [1, 0, 0, 1];
    for _ in 0..n {
        acc = mul(acc, base);
    }
    acc
}

/// Period-n points of `m`, as numerator pairs over `|det(A^n - I)|`, found by
/// applying the adjugate to every residue vector.
pub fn adjugate_points(m: [i128; 4]) -> (i128, BTreeSet<(i128, i128)>) {
    let a = [m[0] - 1, m[1], m[2], m[3] - 1];
    let d = a[0] * a[3] - a[1] * a[2];
    let q = d.abs();
    let adj = [a[3], -a[1], -a[2], a[0]];
    let sign = d.signum();
    let mut out = BTreeSet::new();
    for v1 in 0..q {
        for v2 in 0..q {
            let x = (sign * (adj[0] * v1 + adj[1] * v2)).rem_euclid(q);
            let y = (sign * (adj[2] * v1 + adj[3] * v2)).rem_euclid(q);
            out.insert((x, y));
        }
    }
    (q, out)
}

/// Lattice points of the half-open parallelogram `{s e1 + t e2 : s, t in [0, 1)}` by scanning its bounding box.
pub fn scan_count(e1: [i128; 2], e2: [i128; 2]) -> i128 {
    let xs = [0, e1[0], e2[0], e1[0] + e2[0]];
    let ys = [0, e1[1], e2[1], e1[1] + e2[1]];
    let area = e1[0] * e2[1] - e1[1] * e2[0];
    let mut count = 0;
    for x in *xs.iter().min().unwrap()..=*xs.iter().max().unwrap() {
        for y in *ys.iter().min().unwrap()..=*ys.iter().max().unwrap() {
            // s = (x e2y - y e2x) / area, t = (e1x y - e1y x) / area
            let s = x * e2[1] - y * e2[0];
            let t = e1[0] * y - e1[1] * x;
            let inside = |v: i128| if area > 0 { v >= 0 && v < area } else { v <= 0 && v > area };
            if inside(s) && inside(t) {
                count += 1;
            }
        }
    }
    count
}

/// Tanh-sinh rule on `[a, b]`. The integrand receives the distances to both
/// ends so endpoint singularities are resolved exactly.
pub fn tanh_sinh<F: Fn(f64, f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let half = 0.5 * (b - a);
    if half <= 0.0 {
        return 0.0;
    }
    let tmax = 6.5;
    let term = |t: f64| -> f64 {
        let u = FRAC_PI_2 * t.sinh();
        let w = FRAC_PI_2 * t.cosh() / (u.cosh() * u.cosh());
        // distance of the node from the nearer end
        let near = (b - a) / ((2.0 * u.abs()).exp() + 1.0);
        if near.is_nan() || near <= 0.0 || w == 0.0 {
            return 0.0;
        }
        let far = (b - a) - near;
        let v = if t < 0.0 { f(near, far) } else { f(far, near) };
        let r = w * v;
        if r.is_finite() {
            r
        } else {
            0.0
        }
    };
    let mut h = 0.5;
    let mut sum = term(0.0);
    let mut k = 1;
    while k as f64 * h <= tmax {
        sum += term(k as f64 * h) + term(-(k as f64) * h);
        k += 1;
    }
    let mut est = half * h * sum;
    for _ in 0..12 {
        h *= 0.5;
        let mut k = 1;
        while k as f64 * h <= tmax {
            sum += term(k as f64 * h) + term(-(k as f64) * h);
            k += 2;
        }
        let next = half * h * sum;
        if (next - est).abs() <= tol * next.abs() {
            return next;
        }
        est = next;
    }
    est
}

fn breaks_in(lo: f64, hi: f64, offset: f64) -> Vec<f64> {
    // half-integer grid points of `d` inside (lo, hi), shifted by `offset`
    let mut v = vec![lo];
    let mut k = (2.0 * (lo - offset)).floor() + 1.0;
    while offset + k / 2.0 < hi {
        v.push(offset + k / 2.0);
        k += 1.0;
    }
    v.push(hi);
    v
}

/// `int_{d0}^{d1} (|d|_circ / H)^{-s} dd` by tanh-sinh on pieces between half-integers.
pub fn circle_kernel_integral(d0: f64, d1: f64, s: f64) -> f64 {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let pts = breaks_in(d0, d1, 0.0);
    let mut acc = 0.0;
    for w in pts.windows(2) {
        let (p, q) = (w[0], w[1]);
        let k = (0.5 * (p + q)).round();
        let dist = |off_l: f64, off_r: f64| -> f64 {
            if p == k {
                off_l
            } else if q == k {
                off_r
            } else {
                (p + off_l - k).abs()
            }
        };
        acc += tanh_sinh(|l, r| (dist(l, r) / h).powf(-s), p, q, 1e-13);
    }
    acc
}

/// `int_{[a,a+l1]} int_{[b,b+l2]} (|x - y|_circ / H)^{-s}` by nested tanh-sinh.
pub fn pair_integral_oracle(a: f64, l1: f64, b: f64, l2: f64, s: f64) -> f64 {
    let inner = |x: f64| circle_kernel_integral(b - x, b + l2 - x, s);
    // inner(x) is non-smooth where b - x or b + l2 - x is a half-integer
    let mut cuts: Vec<f64> = vec![a, a + l1];
    for e in [b, b + l2] {
        for c in breaks_in(e - a - l1, e - a, 0.0) {
            cuts.push(e - c);
        }
    }
    cuts.retain(|&c| c >= a && c <= a + l1);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (p, q) = (w[0], w[1]);
        total += tanh_sinh(|l, _| inner(p + l), p, q, 1e-11);
    }
    total
}

fn seg_dist(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let w = [p[0] - a[0], p[1] - a[1]];
    let t = ((w[0] * d[0] + w[1] * d[1]) / (d[0] * d[0] + d[1] * d[1])).clamp(0.0, 1.0);
    ((w[0] - t * d[0]).powi(2) + (w[1] - t * d[1]).powi(2)).sqrt()
}

/// Distance between two disjoint convex quadrilaterals, as the least vertex-to-edge distance.
pub fn quad_dist(p: &[[f64; 2]; 4], q: &[[f64; 2]; 4]) -> f64 {
    let mut best = f64::INFINITY;
    for (x, y) in [(p, q), (q, p)] {
        for v in x {
            for i in 0..4 {
                best = best.min(seg_dist(*v, y[i], y[(i + 1) % 4]));
            }
        }
    }
    best
}

/// Least torus distance between distinct pieces, over all pairs and the 9 neighbouring translates.
pub fn brute_separation(pieces: &[[[f64; 2]; 4]]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..pieces.len() {
        for j in i + 1..pieces.len() {
            for dx in -1..=1 {
                for dy in -1..=1 {
                    let q = pieces[j].map(|v| [v[0] + dx as f64, v[1] + dy as f64]);
                    best = best.min(quad_dist(&pieces[i], &q));
                }
            }
        }
    }
    best
}

pub fn schema_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("schemas")
}

/// Validator for the subset of JSON Schema used by the shipped schemas:
/// `type`, `required`, `properties`, `additionalProperties: false`, `items`,
/// `minItems`, `maxItems`, `enum`, `const`, `minimum`, `maximum`,
/// `exclusiveMinimum`, `pattern` (anchored prefixes), `allOf`, `if`/`then`
/// and `$ref` (local or by file name).
pub struct Validator {
    docs: HashMap<String, Value>,
}

impl Validator {
    pub fn load() -> Self {
        let mut docs = HashMap::new();
        for name in ["record.schema.json", "runconfig.schema.json"] {
            let text = std::fs::read_to_string(schema_dir().join(name)).expect("schema file");
            docs.insert(name.to_string(), serde_json::from_str(&text).expect("schema parses"));
        }
        Validator { docs }
    }

    pub fn validate(&self, doc: &str, v: &Value) -> Vec<String> {
        let mut errs = Vec::new();
        let root = &self.docs[doc];
        self.check(doc, root, v, "$", &mut errs);
        errs
    }

    fn resolve(&self, doc: &str, r: &str) -> (String, &Value) {
        let (file, frag) = match r.split_once('#') {
            Some((f, frag)) => (if f.is_empty() { doc } else { f }, frag),
            None => (r, ""),
        };
        let mut node = &self.docs[file];
        for part in frag.split('/').filter(|p| !p.is_empty()) {
            node = &node[part];
        }
        (file.to_string(), node)
    }

    fn check(&self, doc: &str, s: &Value, v: &Value, path: &str, errs: &mut Vec<String>) {
        if let Some(r) = s.get("$ref").and_then(Value::as_str) {
            let (d, node) = self.resolve(doc, r);
            self.check(&d, node, v, path, errs);
            return;
        }
        if let Some(t) = s.get("type") {
            let types: Vec<&str> = match t {
                Value::String(x) => vec![x.as_str()],
                Value::Array(xs) => xs.iter().filter_map(Value::as_str).collect(),
                _ => vec![],
            };
            if !types.iter().any(|t| type_matches(t, v)) {
                errs.push(format!("{path}: expected {types:?}, got {v}"));
                return;
            }
        }
        if let Some(c) = s.get("const") {
            if !json_eq(c, v) {
                errs.push(format!("{path}: expected const {c}, got {v}"));
            }
        }
        if let Some(Value::Array(opts)) = s.get("enum") {
            if !opts.iter().any(|o| json_eq(o, v)) {
                errs.push(format!("{path}: {v} not in enum"));
            }
        }
        if let Some(x) = v.as_f64() {
            if let Some(m) = s.get("minimum").and_then(Value::as_f64) {
                if x < m {
                    errs.push(format!("{path}: {x} < minimum {m}"));
                }
            }
            if let Some(m) = s.get("maximum").and_then(Value::as_f64) {
                if x > m {
                    errs.push(format!("{path}: {x} > maximum {m}"));
                }
            }
            if let Some(m) = s.get("exclusiveMinimum").and_then(Value::as_f64) {
                if x <= m {
                    errs.push(format!("{path}: {x} <= exclusiveMinimum {m}"));
                }
            }
        }
        if let (Some(p), Some(text)) = (s.get("pattern").and_then(Value::as_str), v.as_str()) {
            if !pattern_matches(p, text) {
                errs.push(format!("{path}: {text:?} does not match {p}"));
            }
        }
        if let Value::Object(obj) = v {
            if let Some(Value::Array(req)) = s.get("required") {
                for k in req.iter().filter_map(Value::as_str) {
                    if !obj.contains_key(k) {
                        errs.push(format!("{path}: missing {k}"));
                    }
                }
            }
            let props = s.get("properties").and_then(Value::as_object);
            for (k, val) in obj {
                match props.and_then(|p| p.get(k)) {
                    Some(ps) => self.check(doc, ps, val, &format!("{path}.{k}"), errs),
                    None => {
                        if s.get("additionalProperties") == Some(&Value::Bool(false)) {
                            errs.push(format!("{path}: unexpected property {k}"));
                        }
                    }
                }
            }
        }
        if let Value::Array(items) = v {
            if let Some(m) = s.get("minItems").and_then(Value::as_u64) {
                if (items.len() as u64) < m {
                    errs.push(format!("{path}: fewer than {m} items"));
                }
            }
            if let Some(m) = s.get("maxItems").and_then(Value::as_u64) {
                if (items.len() as u64) > m {
                    errs.push(format!("{path}: more than {m} items"));
                }
            }
            if let Some(is) = s.get("items") {
                for (i, it) in items.iter().enumerate() {
                    self.check(doc, is, it, &format!("{path}[{i}]"), errs);
                }
            }
        }
        if let Some(Value::Array(all)) = s.get("allOf") {
            for sub in all {
                self.check(doc, sub, v, path, errs);
            }
        }
        if let Some(cond) = s.get("if") {
            let mut probe = Vec::new();
            self.check(doc, cond, v, path, &mut probe);
            if probe.is_empty() {
                if let Some(then) = s.get("then") {
                    self.check(doc, then, v, path, errs);
                }
            }
        }
    }
}

fn type_matches(t: &str, v: &Value) -> bool {
    match t {
        "object" => v.is_object(),
        "array" => v.is_array(),
        "string" => v.is_string(),
        "boolean" => v.is_boolean(),
        "null" => v.is_null(),
        "number" => v.is_number(),
        "integer" => v.is_i64() || v.is_u64(),
        _ => false,
    }
}

fn json_eq(a: &Value, b: &Value) -> bool {
    match (a.as_f64(), b.as_f64()) {
        (Some(x), Some(y)) => x == y,
        _ => a == b,
    }
}

/// Supports the anchored forms `^-?[0-9]` and `^[0-9]+$`.
fn pattern_matches(p: &str, text: &str) -> bool {
    match p {
        "^-?[0-9]" => text.strip_prefix('-').unwrap_or(text).starts_with(|c: char| c.is_ascii_digit()),
        "^[0-9]+$" => !text.is_empty() && text.chars().all(|c| c.is_ascii_digit()),
        _ => panic!("unsupported pattern {p}"),
    }
}

/// Runs the CLI in-process and returns `(exit code, stdout, stderr)`.
pub fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["torus-recur"];
    argv.extend_from_slice(args);
    let code = torus_recur::cli::main_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}
