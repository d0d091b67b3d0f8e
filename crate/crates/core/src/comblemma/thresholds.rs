use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::exactlp::Rational;

/// Density thresholds `d_s` (cyclic groups) and `D_s` (primes).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdTable {
    pub s: u32,
    pub d: Rational,
    #[serde(rename = "D")]
    pub big_d: Rational,
}

impl ThresholdTable {
    pub fn new(s: u32) -> Result<Self> {
        Ok(ThresholdTable { s, d: threshold_d(s)?, big_d: threshold_big_d(s)? })
    }
}

fn middle(s: u32) -> Rational {
    Rational::new(s as i64 + 13, 4 * s as i64)
}

pub fn threshold_d(s: u32) -> Result<Rational> {
    Ok(match s {
        0..=4 => return Err(invalid(format!("s = {s} < 5"))),
        5 => Rational::new(9, 10),
        6 => Rational::new(5, 6),
        7..=12 => middle(s),
        _ => Rational::new(1, 2),
    })
}

pub fn threshold_big_d(s: u32) -> Result<Rational> {
    Ok(match s {
        0..=4 => return Err(invalid(format!("s = {s} < 5"))),
        5 => Rational::new(59, 60),
        6 => Rational::new(7, 8),
        7 => Rational::new(3, 4),
        8..=12 => middle(s),
        _ => Rational::new(1, 2),
    })
}
