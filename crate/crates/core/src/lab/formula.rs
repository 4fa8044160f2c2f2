use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    ParallelogramCovering,
    BallCovering,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::ParallelogramCovering => "parallelogram-covering",
            Branch::BallCovering => "ball-covering",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DimFormula {
    pub alpha: f64,
    pub log_lambda: f64,
    /// `2 L / (alpha + L)`
    pub parallelogram: f64,
    /// `L / alpha`
    pub ball: f64,
    pub s0: f64,
    /// `(L - alpha) / (L + alpha)`
    pub s1: f64,
    pub active_branch: Branch,
}

pub fn dim_formula(alpha: f64, log_lambda: f64) -> Result<DimFormula> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::invalid(format!("alpha must be positive, got {alpha}")));
    }
    if !(log_lambda.is_finite() && log_lambda > 0.0) {
        return Err(Error::invalid(format!("log lambda must be positive, got {log_lambda}")));
    }
    let l = log_lambda;
    let parallelogram = 2.0 * l / (alpha + l);
    let ball = l / alpha;
    let (s0, active_branch) = if alpha <= l {
        (parallelogram, Branch::ParallelogramCovering)
    } else {
        (ball, Branch::BallCovering)
    };
    Ok(DimFormula {
        alpha,
        log_lambda,
        parallelogram,
        ball,
        s0,
        s1: (l - alpha) / (l + alpha),
        active_branch,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const L: f64 = 0.962_423_650_119_206_9;

    #[test]
    fn landmarks() {
        let f = dim_formula(L, L).unwrap();
        assert_eq!(f.s0, 1.0);
        assert_eq!(f.parallelogram, f.ball);
        let f = dim_formula(L / 2.0, L).unwrap();
        assert!((f.s0 - 4.0 / 3.0).abs() < 1e-15);
        assert!((f.s1 - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(f.active_branch, Branch::ParallelogramCovering);
        let f = dim_formula(2.0 * L, L).unwrap();
        assert_eq!(f.s0, 0.5);
        assert_eq!(f.active_branch, Branch::BallCovering);
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(dim_formula(0.0, L).is_err());
        assert!(dim_formula(1.0, -1.0).is_err());
    }
}
