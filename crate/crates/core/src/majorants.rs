//! Prime-square majorants on a residue class mod W, W-trick parameters, and
//! normalisation trends.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::modring::{factorize, sigma, squares_mod, SquareKind};

/// Primes `<= x`, sieve of Eratosthenes.
pub fn sieve_primes(x: u64) -> Vec<u64> {
    if x < 2 {
        return Vec::new();
    }
    let n = x as usize;
    let mut composite = vec![false; n + 1];
    let mut i = 2;
    while i * i <= n {
        if !composite[i] {
            for k in (i * i..=n).step_by(i) {
                composite[k] = true;
            }
        }
        i += 1;
    }
    (2..=n).filter(|&k| !composite[k]).map(|k| k as u64).collect()
}

/// Neumaier-compensated real sum.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        comp += if sum.abs() >= v.abs() { (sum - t) + v } else { (v - t) + sum };
        sum = t;
    }
    sum + comp
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WTrickParams {
    pub y: u64,
    pub s: u32,
    pub w: f64,
    #[serde(rename = "W")]
    pub big_w: u64,
    #[serde(rename = "N")]
    pub n: u64,
    /// `W <= ln N`; reported, not enforced.
    pub w_within_log: bool,
}

/// `w = ln ln ln y` (or the override), `W = 8 prod_{3 <= p < w} p`, `N = floor(2y / (sW))`.
pub fn wtrick_params(y: u64, s: u32, w_override: Option<f64>) -> Result<WTrickParams> {
    if s == 0 {
        return Err(invalid("s must be positive"));
    }
    let w = match w_override {
        Some(w) if w.is_finite() => w,
        Some(w) => return Err(invalid(format!("w = {w} is not finite"))),
        None => {
            if y < 16 {
                return Err(invalid(format!("y = {y} < 16: ln ln ln y undefined")));
            }
            (y as f64).ln().ln().ln()
        }
    };
    let mut big_w: u64 = 8;
    if w > 3.0 {
        for p in sieve_primes(w.ceil() as u64) {
            if p >= 3 && (p as f64) < w {
                big_w = big_w
                    .checked_mul(p)
                    .ok_or_else(|| invalid(format!("W overflows at w = {w}")))?;
            }
        }
    }
    let n = (2 * y as u128 / (s as u128 * big_w as u128)) as u64;
    let w_within_log = n >= 2 && (big_w as f64) <= (n as f64).ln();
    Ok(WTrickParams { y, s, w, big_w, n, w_within_log })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MajorantEntry {
    pub n: u64,
    pub p: u64,
    pub weight: f64,
}

/// Sparse weights on `[1, N]`, nonzero only where `Wn + b = p^2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MajorantVector {
    pub b: u64,
    #[serde(rename = "W")]
    pub big_w: u64,
    #[serde(rename = "N")]
    pub n: u64,
    /// `phi(W) / (W sigma_W(b))`.
    pub scale: f64,
    pub entries: Vec<MajorantEntry>,
}

impl MajorantVector {
    pub fn total(&self) -> f64 {
        compensated_sum(self.entries.iter().map(|e| e.weight))
    }

    pub fn weight_at(&self, n: u64) -> f64 {
        self.entries
            .binary_search_by_key(&n, |e| e.n)
            .map_or(0.0, |k| self.entries[k].weight)
    }

    pub fn mean(&self) -> f64 {
        self.total() / self.n as f64
    }
}

fn build_weights(b: u64, w: u64, n: u64, keep: impl Fn(u64) -> bool + Sync) -> Result<MajorantVector> {
    if w < 2 || n < 1 {
        return Err(invalid("need W >= 2 and N >= 1"));
    }
    let units = squares_mod(w, SquareKind::UnitSquares)?;
    let b = b % w;
    if !units.contains(b) {
        return Err(crate::Error::NotUnitSquare { residue: b, modulus: w });
    }
    let f = factorize(w)?;
    let scale = f.euler_phi() as f64 / (w as f64 * sigma(w, b)? as f64);
    let limit = (w as u128 * (n as u128 + 1)) as f64;
    let p_max = limit.sqrt() as u64 + 1;
    let entries = sieve_primes(p_max)
        .into_par_iter()
        .filter_map(|p| {
            let sq = p as u128 * p as u128;
            if sq < (w + b) as u128 || sq % w as u128 != b as u128 || !keep(p) {
                return None;
            }
            let idx = ((sq - b as u128) / w as u128) as u64;
            (idx <= n).then(|| MajorantEntry { n: idx, p, weight: scale * 2.0 * p as f64 * (p as f64).ln() })
        })
        .collect();
    Ok(MajorantVector { b, big_w: w, n, scale, entries })
}

pub fn build_nu(b: u64, w: u64, n: u64) -> Result<MajorantVector> {
    build_weights(b, w, n, |_| true)
}

/// `nu_b` restricted to primes in `A`.
pub fn build_f(in_a: impl Fn(u64) -> bool + Sync, b: u64, w: u64, n: u64) -> Result<MajorantVector> {
    build_weights(b, w, n, in_a)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizationCheck {
    pub b: u64,
    #[serde(rename = "W")]
    pub big_w: u64,
    #[serde(rename = "N")]
    pub n: u64,
    pub total: f64,
    pub relative_deviation: f64,
}

/// `sum_{n <= N} nu_b(n)` against `N`.
pub fn normalization_check(b: u64, w: u64, n: u64) -> Result<NormalizationCheck> {
    let total = build_nu(b, w, n)?.total();
    Ok(NormalizationCheck { b, big_w: w, n, total, relative_deviation: (total - n as f64).abs() / n as f64 })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizationTrend {
    pub rows: Vec<NormalizationCheck>,
    /// Strictly decreasing relative deviation along the rows.
    pub decreasing: bool,
}

pub fn normalization_trend(b: u64, w: u64, ns: &[u64]) -> Result<NormalizationTrend> {
    let rows = ns.iter().map(|&n| normalization_check(b, w, n)).collect::<Result<Vec<_>>>()?;
    let decreasing = rows.windows(2).all(|p| p[1].relative_deviation < p[0].relative_deviation);
    Ok(NormalizationTrend { rows, decreasing })
}

pub const TREND_NS: [u64; 4] = [1_000, 10_000, 100_000, 1_000_000];
pub const TREND_MODULI: [(u64, u64); 3] = [(8, 1), (120, 1), (840, 1)];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChebyshevTrend {
    pub x: u64,
    pub sum: f64,
    pub ratio: f64,
}

/// `sum_{x <= X} x Lambda(x)` over prime powers, and its ratio to `X^2 / 2`.
pub fn chebyshev_trend(x: u64) -> Result<ChebyshevTrend> {
    if x < 2 {
        return Err(invalid("X must be at least 2"));
    }
    let terms = sieve_primes(x).into_iter().flat_map(|p| {
        let lp = (p as f64).ln();
        std::iter::successors(Some(p), move |&q| q.checked_mul(p).filter(|&r| r <= x))
            .map(move |q| q as f64 * lp)
    });
    let sum = compensated_sum(terms);
    let half_sq = (x as f64) * (x as f64) / 2.0;
    Ok(ChebyshevTrend { x, sum, ratio: sum / half_sq })
}
