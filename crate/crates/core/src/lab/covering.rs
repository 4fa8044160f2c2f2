use num_traits::Signed;

use crate::error::Result;
use crate::exact::{HyperbolicMap, Real};
use crate::geometry::{radii, RecurrenceConfig};

#[derive(Clone, Debug)]
pub struct CoveringTerms {
    pub n: u32,
    /// `|H_n| (2 lambda1)^s`: one ball of radius `lambda1` per piece.
    pub ball: Real,
    /// `|H_n| ceil(lambda1 / lambda2) (2 sqrt2 lambda2)^s`: squares of side `2 lambda2`.
    pub square: Real,
}

pub fn covering_upper_counts(map: &HyperbolicMap, cfg: &RecurrenceConfig, n: u32, s: f64) -> Result<CoveringTerms> {
    let rd = radii(map, cfg, n)?;
    let h = Real::from_bigint(&map.h(n).abs());
    let s = Real::from_f64(s);
    let two = Real::from_i64(2);
    let ball = &h * (&two * &rd.lambda1).powf(&s);
    let gamma = Real::from_bigint(&(&rd.lambda1 / &rd.lambda2).ceil_int());
    let side = &two * two.sqrt() * &rd.lambda2;
    let square = &h * gamma * side.powf(&s);
    Ok(CoveringTerms { n, ball, square })
}
