use crate::error::{Error, Result};
use crate::exact::Real;

#[derive(Clone, Debug, PartialEq)]
pub enum RateRule {
    /// `r_n = exp(-alpha n)`, `alpha` per step of the user's matrix.
    Exponential { alpha: f64 },
    /// `rates[i] = r_{i+1}` per step of the user's matrix.
    Table { rates: Vec<f64> },
}

/// Shrinking radii, expressed per step of the normalized matrix `A^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct RecurrenceConfig {
    pub rule: RateRule,
    /// Squaring exponent from normalization.
    pub exponent: u32,
}

impl RecurrenceConfig {
    pub fn exponential(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::invalid(format!("alpha must be positive and finite, got {alpha}")));
        }
        Ok(RecurrenceConfig { rule: RateRule::Exponential { alpha }, exponent: 1 })
    }

    pub fn from_table(rates: Vec<f64>) -> Result<Self> {
        if rates.is_empty() {
            return Err(Error::invalid("rate table is empty"));
        }
        for (i, r) in rates.iter().enumerate() {
            if !(r.is_finite() && *r > 0.0) {
                return Err(Error::invalid(format!("rate r_{} = {r} is not positive", i + 1)));
            }
            if i > 0 && *r > rates[i - 1] {
                return Err(Error::invalid(format!("rates must be non-increasing (r_{} > r_{})", i + 1, i)));
            }
        }
        let cfg = RecurrenceConfig { rule: RateRule::Table { rates }, exponent: 1 };
        if cfg.alpha() <= 0.0 {
            return Err(Error::invalid("rate table gives alpha <= 0"));
        }
        Ok(cfg)
    }

    /// Parses one rate per line; blank lines and `#` comments are skipped.
    pub fn parse_table(text: &str) -> Result<Self> {
        let mut rates = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let v: f64 = line
                .parse()
                .map_err(|_| Error::invalid(format!("line {}: not a number: {line:?}", ln + 1)))?;
            rates.push(v);
        }
        Self::from_table(rates)
    }

    /// Rescales to the time unit of `A^k`.
    pub fn with_exponent(mut self, k: u32) -> Self {
        self.exponent = k;
        self
    }

    /// Number of normalized steps covered by the rule (`None` if unbounded).
    pub fn horizon(&self) -> Option<u32> {
        match &self.rule {
            RateRule::Exponential { .. } => None,
            RateRule::Table { rates } => Some(rates.len() as u32 / self.exponent),
        }
    }

    /// Decay rate per normalized step. For tables this is the minimum of
    /// `-log r_n / n` over the second half of the horizon.
    pub fn alpha(&self) -> f64 {
        match &self.rule {
            RateRule::Exponential { alpha } => alpha * self.exponent as f64,
            RateRule::Table { rates } => {
                let k = self.exponent as usize;
                let h = rates.len() / k;
                if h == 0 {
                    return f64::NAN;
                }
                let lo = (h / 2).max(1);
                (lo..=h)
                    .map(|n| -rates[n * k - 1].ln() / n as f64)
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }

    pub fn rate(&self, n: u32) -> Result<Real> {
        match &self.rule {
            RateRule::Exponential { alpha } => {
                let a = Real::from_f64(*alpha) * Real::from_i64(self.exponent as i64 * n as i64);
                Ok((-a).exp())
            }
            RateRule::Table { rates } => {
                let idx = n as usize * self.exponent as usize;
                if n == 0 || idx > rates.len() {
                    return Err(Error::invalid(format!("rate table has no entry for step {n}")));
                }
                Ok(Real::from_f64(rates[idx - 1]))
            }
        }
    }
}
