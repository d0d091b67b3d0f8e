//! Quadratic Gauss sums, Fourier coefficients of square indicators, and
//! quadratic-residue counts in initial intervals.
//!
//! Every additive character is evaluated from an exactly reduced integer
//! numerator, so the only floating-point error is in `sin_cos` and the
//! (compensated) summation.

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use num_integer::Integer;
use rayon::prelude::*;
use rustfft::algorithm::MixedRadix;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::modring::{
    factorize, inv_mod, is_prime, mul_mod, pow_mod, squares_mod, ModulusFactorization, SquareKind,
};

pub type ComplexValue = Complex64;

/// `e(num / den) = exp(2 pi i num / den)`.
pub fn e_frac(num: i64, den: u64) -> Complex64 {
    let d = den as i128;
    let mut r = (num as i128).rem_euclid(d);
    if 2 * r > d {
        r -= d;
    }
    let (s, c) = (TAU * (r as f64 / den as f64)).sin_cos();
    Complex64::new(c, s)
}

/// Kahan–Babuska compensated accumulator over complex terms.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: Complex64,
    comp: Complex64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: Complex64) {
        self.sum.re = neumaier(self.sum.re, x.re, &mut self.comp.re);
        self.sum.im = neumaier(self.sum.im, x.im, &mut self.comp.im);
    }

    pub fn value(&self) -> Complex64 {
        self.sum + self.comp
    }
}

fn neumaier(sum: f64, x: f64, comp: &mut f64) -> f64 {
    let t = sum + x;
    if sum.abs() >= x.abs() {
        *comp += (sum - t) + x;
    } else {
        *comp += (x - t) + sum;
    }
    t
}

impl FromIterator<Complex64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::default();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussSumReport {
    pub modulus: u64,
    pub t: i64,
    pub value: ComplexValue,
    pub magnitude: f64,
    pub bound: f64,
    pub satisfied: bool,
}

/// Absolute slack when comparing a float magnitude against its bound.
pub const REPORT_TOLERANCE: f64 = 1e-9;

impl GaussSumReport {
    fn new(modulus: u64, t: i64, value: Complex64, bound: f64) -> Self {
        let magnitude = value.norm();
        GaussSumReport {
            modulus,
            t,
            value,
            magnitude,
            bound,
            satisfied: magnitude <= bound + REPORT_TOLERANCE,
        }
    }
}

fn odd_prime_power(pf: &ModulusFactorization) -> Result<(u64, u32)> {
    match pf.factors() {
        [(p, n)] if *p != 2 => Ok((*p, *n)),
        [(2, _)] => Err(invalid("p = 2 is not supported; the modulus must be an odd prime power")),
        _ => Err(invalid(format!("{} is not an odd prime power", pf.modulus()))),
    }
}

/// `sum over squares x mod p^n of e(t x / p^n)`, by direct summation.
pub fn square_gauss_sum(pf: &ModulusFactorization, t: i64) -> Result<Complex64> {
    odd_prime_power(pf)?;
    let q = pf.modulus();
    let t = t.rem_euclid(q as i64) as u64;
    let squares = squares_mod(q, SquareKind::AllSquares)?;
    Ok(squares
        .elements()
        .iter()
        .map(|&x| e_frac(mul_mod(t, x, q) as i64, q))
        .collect::<CompensatedSum>()
        .value())
}

/// `gcd(t, q)` with the convention `gcd(0, q) = q`.
pub fn gcd_with_modulus(t: i64, q: u64) -> u64 {
    (t.rem_euclid(q as i64) as u64).gcd(&q)
}

/// Square Gauss sum against the bound `c * gcd(t, p^n) * sqrt(p)`.
pub fn square_gauss_report(pf: &ModulusFactorization, t: i64, c: f64) -> Result<GaussSumReport> {
    let (p, _) = odd_prime_power(pf)?;
    let value = square_gauss_sum(pf, t)?;
    let q = pf.modulus();
    let bound = c * gcd_with_modulus(t, q) as f64 * (p as f64).sqrt();
    Ok(GaussSumReport::new(q, t, value, bound))
}

fn check_odd_prime(p: u64) -> Result<()> {
    if p == 2 || !is_prime(p) {
        return Err(invalid(format!("{p} is not an odd prime")));
    }
    Ok(())
}

/// Euler's criterion.
pub fn legendre(t: i64, p: u64) -> Result<i8> {
    check_odd_prime(p)?;
    let r = t.rem_euclid(p as i64) as u64;
    Ok(match pow_mod(r, (p - 1) / 2, p) {
        0 => 0,
        1 => 1,
        _ => -1,
    })
}

/// `1` for `p = 1 mod 4`, `i` for `p = 3 mod 4`.
pub fn epsilon(p: u64) -> Complex64 {
    if p % 4 == 1 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(0.0, 1.0)
    }
}

/// `sum over units y mod p^n of e(t y^2 / p^n)`, by direct summation.
pub fn reduced_gauss_sum(p: u64, n: u32, t: i64) -> Result<Complex64> {
    check_odd_prime(p)?;
    if n == 0 {
        return Err(invalid("exponent must be positive"));
    }
    if t.rem_euclid(p as i64) == 0 {
        return Err(invalid(format!("t = {t} is not coprime to {p}")));
    }
    let q = p.pow(n);
    let t = t.rem_euclid(q as i64) as u64;
    Ok((1..q)
        .filter(|y| y % p != 0)
        .map(|y| e_frac(mul_mod(t, mul_mod(y, y, q), q) as i64, q))
        .collect::<CompensatedSum>()
        .value())
}

/// Closed form of the reduced sum for `gcd(t, p) = 1`.
pub fn reduced_gauss_closed_form(p: u64, n: u32, t: i64) -> Result<Complex64> {
    let chi = legendre(t, p)?;
    if chi == 0 {
        return Err(invalid(format!("t = {t} is not coprime to {p}")));
    }
    if n >= 2 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(epsilon(p) * (chi as f64 * (p as f64).sqrt()) - 1.0)
}

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    let mut planner = FftPlanner::new();
    let mut base = |n: usize| {
        if inverse {
            planner.plan_fft_inverse(n)
        } else {
            planner.plan_fft_forward(n)
        }
    };
    // Odd prime powers: chain p-point FFTs, much faster than the default plan.
    if len > 2 && len % 2 == 1 {
        if let Ok(f) = factorize(len as u64) {
            if let [(p, k)] = f.factors() {
                if *k >= 2 {
                    let step = base(*p as usize);
                    let mut acc = Arc::clone(&step);
                    for _ in 1..*k {
                        acc = Arc::new(MixedRadix::new(Arc::clone(&step), acc));
                    }
                    return acc;
                }
            }
        }
    }
    base(len)
}

/// `out[t] = sum_x h[x] e(t x / q)` for all `t`, via one inverse FFT.
pub fn exponential_spectrum(h: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = h.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    if !buf.is_empty() {
        plan(buf.len(), true).process(&mut buf);
    }
    buf
}

/// Discrete Fourier transform `out[xi] = sum_x f[x] e(-x xi / W)`.
pub fn dft(f: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = f.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    if !buf.is_empty() {
        plan(buf.len(), false).process(&mut buf);
    }
    buf
}

/// Reduced Gauss sums for every `t mod p^n` at once.
pub fn reduced_gauss_spectrum(p: u64, n: u32) -> Result<Vec<Complex64>> {
    check_odd_prime(p)?;
    let q = p.pow(n);
    let mut roots = vec![0.0; q as usize];
    for y in (1..q).filter(|y| y % p != 0) {
        roots[mul_mod(y, y, q) as usize] += 1.0;
    }
    Ok(exponential_spectrum(&roots))
}

/// Square Gauss sums for every `t mod q` at once.
pub fn square_gauss_spectrum(q: u64) -> Result<Vec<Complex64>> {
    let sq = squares_mod(q, SquareKind::AllSquares)?;
    let h: Vec<f64> = sq.indicator().into_iter().map(|b| b as u8 as f64).collect();
    Ok(exponential_spectrum(&h))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormSweep {
    pub cases: u64,
    pub max_error: f64,
    pub worst: Option<(u64, u32, u64)>,
}

/// Largest deviation from the closed form over all odd `p <= p_max`,
/// `n` in `exponents`, and every `t mod p^n` coprime to `p`.
pub fn reduced_gauss_closed_form_sweep(p_max: u64, exponents: &[u32]) -> ClosedFormSweep {
    let jobs: Vec<(u64, u32)> = (3..=p_max)
        .filter(|&p| is_prime(p))
        .flat_map(|p| exponents.iter().map(move |&n| (p, n)))
        .collect();
    let parts: Vec<ClosedFormSweep> = jobs
        .par_iter()
        .map(|&(p, n)| {
            let spectrum = reduced_gauss_spectrum(p, n).expect("odd prime");
            // Closed form depends only on t mod p.
            let table: Vec<Complex64> = (0..p as i64)
                .map(|r| reduced_gauss_closed_form(p, n, r).unwrap_or_default())
                .collect();
            let mut out = ClosedFormSweep { cases: 0, max_error: 0.0, worst: None };
            for (t, v) in spectrum.iter().enumerate().filter(|(t, _)| *t as u64 % p != 0) {
                let err = (v - table[t % p as usize]).norm();
                out.cases += 1;
                if out.worst.is_none() || err > out.max_error {
                    out.max_error = err;
                    out.worst = Some((p, n, t as u64));
                }
            }
            out
        })
        .collect();
    parts.into_iter().fold(
        ClosedFormSweep { cases: 0, max_error: 0.0, worst: None },
        |acc, part| ClosedFormSweep {
            cases: acc.cases + part.cases,
            max_error: acc.max_error.max(part.max_error),
            worst: if part.max_error > acc.max_error || acc.worst.is_none() {
                part.worst
            } else {
                acc.worst
            },
        },
    )
}

/// `max |G(t)| / (gcd(t, p^n) sqrt p)` over odd `p <= p_max`, `n <= n_max`, all `t`.
pub fn gauss_bound_statistic(p_max: u64, n_max: u32) -> f64 {
    let jobs: Vec<(u64, u32)> = (3..=p_max)
        .filter(|&p| is_prime(p))
        .flat_map(|p| (1..=n_max).map(move |n| (p, n)))
        .collect();
    jobs.par_iter()
        .map(|&(p, n)| {
            let q = p.pow(n);
            let spectrum = square_gauss_spectrum(q).expect("positive modulus");
            let root_p = (p as f64).sqrt();
            spectrum.iter()
                .enumerate()
                .map(|(t, v)| v.norm() / (gcd_with_modulus(t as i64, q) as f64 * root_p))
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NuHatReport {
    pub report: GaussSumReport,
    /// `|nu~(xi)| * sqrt(min p)`.
    pub statistic: f64,
    pub direct: ComplexValue,
    pub split: ComplexValue,
}

/// `nu~(xi) = (1/S(W)) sum over squares x of e(-x xi / W)` evaluated as a
/// product of prime-power factors `G_q(-xi beta_q)/S(q)` with
/// `beta_q = (W/q)^{-1} mod q`.
pub fn nu_hat_split(f: &ModulusFactorization, xi: i64) -> Result<Complex64> {
    let w = f.modulus();
    let mut acc = Complex64::new(1.0, 0.0);
    for q in f.prime_powers() {
        let beta = inv_mod((w / q) % q, q).expect("coprime components");
        let freq = mul_mod(((-xi).rem_euclid(q as i64)) as u64, beta, q) as i64;
        let qf = factorize(q)?;
        let s = squares_mod(q, SquareKind::AllSquares)?.len() as f64;
        acc *= square_gauss_sum(&qf, freq)? / s;
    }
    Ok(acc)
}

pub fn nu_hat_direct(w: u64, xi: i64) -> Result<Complex64> {
    let sq = squares_mod(w, SquareKind::AllSquares)?;
    let neg = (-xi).rem_euclid(w as i64) as u64;
    let sum = sq
        .elements()
        .iter()
        .map(|&x| e_frac(mul_mod(neg, x, w) as i64, w))
        .collect::<CompensatedSum>()
        .value();
    Ok(sum / sq.len() as f64)
}

/// Pseudorandomness of the normalized square indicator at frequency `xi`,
/// against the bound `c / sqrt(min p)`.
pub fn nu_hat_check(f: &ModulusFactorization, xi: i64, c: f64) -> Result<NuHatReport> {
    let w = f.modulus();
    if w % 2 == 0 || w == 1 {
        return Err(invalid("modulus must be odd and greater than 1"));
    }
    if xi.rem_euclid(w as i64) == 0 {
        return Err(invalid("frequency 0 is excluded"));
    }
    let split = nu_hat_split(f, xi)?;
    let direct = nu_hat_direct(w, xi)?;
    let min_p = f.smallest_prime().expect("w > 1") as f64;
    let report = GaussSumReport::new(w, xi, split, c / min_p.sqrt());
    Ok(NuHatReport { statistic: report.magnitude * min_p.sqrt(), report, direct, split })
}

/// `max |nu~(xi)| sqrt(min p)` over all odd square-free `3 <= W <= w_max`, `xi != 0`.
pub fn nu_hat_statistic(w_max: u64) -> f64 {
    let ws: Vec<u64> = (3..=w_max)
        .step_by(2)
        .filter(|&w| factorize(w).map(|f| f.is_squarefree()).unwrap_or(false))
        .collect();
    ws.par_iter()
        .map(|&w| {
            let f = factorize(w).expect("w >= 1");
            let sq = squares_mod(w, SquareKind::AllSquares).expect("w >= 1");
            let h: Vec<f64> = sq.indicator().into_iter().map(|b| b as u8 as f64).collect();
            let root = (f.smallest_prime().expect("w > 1") as f64).sqrt();
            dft(&h)
                .iter()
                .skip(1)
                .map(|v| v.norm() / sq.len() as f64 * root)
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QrIntervalCount {
    pub count: u64,
    pub main_term: f64,
    pub normalized_error: f64,
}

/// Squares mod `p` among the representatives `1..=floor(eta p)`.
pub fn qr_interval_count(p: u64, eta: f64) -> Result<QrIntervalCount> {
    check_odd_prime(p)?;
    if !(eta > 0.0 && eta < 1.0) {
        return Err(invalid("eta must lie in (0, 1)"));
    }
    let prefix = qr_prefix_counts(p);
    Ok(qr_from_prefix(p, eta, &prefix))
}

/// `prefix[k]` = number of nonzero squares mod `p` in `1..=k`.
fn qr_prefix_counts(p: u64) -> Vec<u32> {
    let mut is_sq = vec![false; p as usize];
    for y in 1..=(p - 1) / 2 {
        is_sq[mul_mod(y, y, p) as usize] = true;
    }
    let mut prefix = vec![0u32; p as usize];
    for k in 1..p as usize {
        prefix[k] = prefix[k - 1] + is_sq[k] as u32;
    }
    prefix
}

fn qr_from_prefix(p: u64, eta: f64, prefix: &[u32]) -> QrIntervalCount {
    let top = ((eta * p as f64).floor() as u64).min(p - 1);
    let count = prefix[top as usize] as u64;
    let main_term = eta * (p + 1) as f64 / 2.0;
    let pf = p as f64;
    let normalized_error = (count as f64 - main_term).abs() / (pf.sqrt() * pf.ln());
    QrIntervalCount { count, main_term, normalized_error }
}

pub const ETA_GRID: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

/// `max normalized_error` over odd primes `p <= p_max` and `eta` in [`ETA_GRID`],
/// with the maximizing `(p, eta)`.
pub fn qr_interval_statistic(p_max: u64) -> (f64, u64, f64) {
    let primes: Vec<u64> = (3..=p_max).filter(|&p| is_prime(p)).collect();
    primes
        .par_iter()
        .map(|&p| {
            let prefix = qr_prefix_counts(p);
            ETA_GRID
                .iter()
                .map(|&eta| (qr_from_prefix(p, eta, &prefix).normalized_error, p, eta))
                .fold((0.0, p, 0.1), |a, b| if b.0 > a.0 { b } else { a })
        })
        .reduce(|| (0.0, 0, 0.0), |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a })
}
