use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lab::{DeltaGrid, Sampler};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_CAP: u64 = crate::periodic::DEFAULT_CAP;

/// Range of layer indices `lo, lo + step, ..., <= hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub lo: u32,
    pub hi: u32,
    pub step: u32,
}

impl Window {
    pub fn single(n: u32) -> Self {
        Window { lo: n, hi: n, step: 1 }
    }

    /// Parses `N`, `LO:HI` or `LO:HI:STEP`.
    pub fn parse(s: &str, default_step: u32) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |x: &str| x.trim().parse::<u32>().map_err(|_| Error::invalid(format!("bad layer index {x:?}")));
        let w = match parts.as_slice() {
            [n] => Window::single(num(n)?),
            [lo, hi] => Window { lo: num(lo)?, hi: num(hi)?, step: default_step },
            [lo, hi, st] => Window { lo: num(lo)?, hi: num(hi)?, step: num(st)? },
            _ => return Err(Error::invalid(format!("bad window {s:?} (N | LO:HI[:STEP])"))),
        };
        if w.lo == 0 || w.hi < w.lo || w.step == 0 {
            return Err(Error::invalid(format!("bad window {s:?}")));
        }
        Ok(w)
    }

    pub fn values(&self) -> Vec<u32> {
        (self.lo..=self.hi).step_by(self.step as usize).collect()
    }

    pub fn is_single(&self) -> bool {
        self.lo == self.hi
    }
}

/// Evenly spaced grid `lo..=hi` with `count` points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearGrid {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl LinearGrid {
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::invalid(format!("grid must be LO:HI:COUNT, got {s:?}")));
        }
        let f = |x: &str| x.trim().parse::<f64>().map_err(|_| Error::invalid(format!("bad number {x:?}")));
        let count = parts[2].trim().parse::<usize>().map_err(|_| Error::invalid(format!("bad count {:?}", parts[2])))?;
        let g = LinearGrid { lo: f(parts[0])?, hi: f(parts[1])?, count };
        if !(g.lo.is_finite() && g.hi.is_finite()) || g.hi < g.lo || count == 0 || (count == 1 && g.hi != g.lo) {
            return Err(Error::invalid(format!("bad grid {s:?}")));
        }
        Ok(g)
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.lo];
        }
        (0..self.count)
            .map(|i| self.lo + (self.hi - self.lo) * i as f64 / (self.count - 1) as f64)
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Fully resolved parameters of one run. Every field is explicit, so the
/// JSON form is canonical and executing it reproduces the run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub op: String,
    pub matrix: [i64; 4],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rates: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<Window>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_grid: Option<DeltaGrid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_grid: Option<LinearGrid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampler: Option<Sampler>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub balls: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fibers: Option<usize>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub count_only: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub check_lattice: bool,
    pub cap: u64,
    pub format: Format,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub force: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub timing: bool,
}

impl RunConfig {
    pub fn new(op: &str, matrix: [i64; 4]) -> Self {
        RunConfig {
            schema_version: SCHEMA_VERSION,
            op: op.to_string(),
            matrix,
            alpha: None,
            rates: None,
            window: None,
            delta_grid: None,
            alpha_grid: None,
            s: None,
            t: None,
            dim: None,
            sampler: None,
            x0: None,
            point: None,
            samples: None,
            seed: None,
            balls: None,
            radius: None,
            points: None,
            fibers: None,
            count_only: false,
            check_lattice: false,
            cap: DEFAULT_CAP,
            format: Format::Json,
            out: None,
            force: false,
            timing: false,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: RunConfig = serde_json::from_str(text)?;
        if c.schema_version != SCHEMA_VERSION {
            return Err(Error::invalid(format!("unsupported schemaVersion {}", c.schema_version)));
        }
        Ok(c)
    }

    pub fn window(&self) -> Result<Window> {
        self.window.ok_or_else(|| Error::invalid(format!("{} needs -n or --window", self.op)))
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_parsing() {
        assert_eq!(Window::parse("7", 2).unwrap().values(), vec![7]);
        assert_eq!(Window::parse("3:9", 2).unwrap().values(), vec![3, 5, 7, 9]);
        assert_eq!(Window::parse("3:6:1", 2).unwrap().values(), vec![3, 4, 5, 6]);
        assert!(Window::parse("0:3", 1).is_err());
        assert!(Window::parse("5:3", 1).is_err());
        assert!(Window::parse("a", 1).is_err());
    }

    #[test]
    fn config_round_trip() {
        let mut c = RunConfig::new("energy", [2, 1, 1, 1]);
        c.alpha = Some(0.1 + 0.2);
        c.window = Some(Window::single(7));
        c.s = Some(0.8);
        c.seed = Some(42);
        let text = c.to_json();
        let back = RunConfig::from_json(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_json(), text);
        assert!(RunConfig::from_json(&text.replace("\"op\"", "\"bogus\": 1, \"op\"")).is_err());
    }
}
