//! Exact sumset and convolution counting over Z/W.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exactlp::Rational;
use crate::modring::{factorize, is_prime, squares_mod, SquareKind};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepresentationReport {
    pub modulus: u64,
    pub sets: Vec<Vec<u64>>,
    /// `counts[x]` = number of tuples `(a_1..a_s)` in `A_1 x .. x A_s` with sum `x`.
    pub counts: Vec<u128>,
    pub min_count: u128,
    pub min_witness: u64,
}

fn check_subset(set: &[u64], w: u64) -> Result<()> {
    match set.iter().find(|&&x| x >= w) {
        Some(x) => Err(invalid(format!("element {x} outside [0, {w})"))),
        None => Ok(()),
    }
}

/// Cyclic convolution `f * 1_A` in exact integers.
fn convolve_with_set(f: &[u128], set: &[u64]) -> Vec<u128> {
    let w = f.len();
    let mut out = vec![0u128; w];
    for (x, &fx) in f.iter().enumerate() {
        if fx == 0 {
            continue;
        }
        for &a in set {
            let y = x + a as usize;
            out[if y >= w { y - w } else { y }] += fx;
        }
    }
    out
}

pub fn convolution_counts(sets: &[Vec<u64>], w: u64) -> Result<RepresentationReport> {
    if sets.is_empty() {
        return Err(invalid("empty set list"));
    }
    if w == 0 {
        return Err(invalid("modulus must be positive"));
    }
    for s in sets {
        check_subset(s, w)?;
    }
    let mut counts = vec![0u128; w as usize];
    counts[0] = 1;
    for s in sets {
        counts = convolve_with_set(&counts, s);
    }
    let (min_witness, &min_count) = counts
        .iter()
        .enumerate()
        .min_by_key(|&(_, c)| *c)
        .expect("w >= 1");
    Ok(RepresentationReport {
        modulus: w,
        sets: sets.to_vec(),
        counts,
        min_count,
        min_witness: min_witness as u64,
    })
}

fn odd_prime_power(p: u64, n: u32) -> Result<u64> {
    if p == 2 || !is_prime(p) {
        return Err(invalid(format!("{p} is not an odd prime")));
    }
    if n == 0 {
        return Err(invalid("exponent must be positive"));
    }
    p.checked_pow(n).ok_or_else(|| invalid("prime power overflows"))
}

/// `hist[l]` = number of ordered pairs of squares `(x, y)` mod `q` with `x - y = l`.
pub fn square_difference_histogram(q: u64) -> Result<Vec<u64>> {
    let sq = squares_mod(q, SquareKind::AllSquares)?;
    let mut hist = vec![0u64; q as usize];
    for &x in sq.elements() {
        for &y in sq.elements() {
            hist[((x + q - y) % q) as usize] += 1;
        }
    }
    Ok(hist)
}

/// `|T(l, p^n)|`.
pub fn t_count(p: u64, n: u32, l: i64) -> Result<u64> {
    let q = odd_prime_power(p, n)?;
    if l.rem_euclid(p as i64) == 0 {
        return Err(invalid(format!("l = {l} is not a unit mod {p}")));
    }
    let l = l.rem_euclid(q as i64) as u64;
    let sq = squares_mod(q, SquareKind::AllSquares)?;
    Ok(sq
        .elements()
        .iter()
        .filter(|&&y| sq.contains((y + l) % q))
        .count() as u64)
}

/// `(p^n - p^(n-1))/4 + 2`.
pub fn t_count_bound(p: u64, n: u32) -> Result<Rational> {
    let q = odd_prime_power(p, n)?;
    Ok(Rational::new((q - q / p) as i64, 4) + Rational::from_integer(2))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TCountSweep {
    pub prime_powers: u64,
    pub units_checked: u64,
    pub violations: Vec<(u64, u32, u64, u64)>,
    /// Largest `count / bound` seen.
    pub max_ratio: f64,
}

/// Checks the T-count bound for every unit `l` and every odd prime power `<= q_max`.
pub fn t_count_sweep(q_max: u64) -> TCountSweep {
    let mut jobs = Vec::new();
    for p in (3..=q_max).filter(|&p| is_prime(p)) {
        let mut n = 1;
        while let Some(q) = p.checked_pow(n).filter(|&q| q <= q_max) {
            jobs.push((p, n, q));
            n += 1;
        }
    }
    let parts: Vec<TCountSweep> = jobs
        .par_iter()
        .map(|&(p, n, q)| {
            let hist = square_difference_histogram(q).expect("q >= 1");
            let bound = t_count_bound(p, n).expect("odd prime power");
            let mut part = TCountSweep {
                prime_powers: 1,
                units_checked: 0,
                violations: vec![],
                max_ratio: 0.0,
            };
            for l in (1..q).filter(|l| l % p != 0) {
                let c = hist[l as usize];
                part.units_checked += 1;
                let count = Rational::from(c);
                if count > bound {
                    part.violations.push((p, n, l, c));
                }
                part.max_ratio = part.max_ratio.max((count / &bound).to_f64());
            }
            part
        })
        .collect();
    let mut total = TCountSweep { prime_powers: 0, units_checked: 0, violations: vec![], max_ratio: 0.0 };
    for part in parts {
        total.prime_powers += part.prime_powers;
        total.units_checked += part.units_checked;
        total.violations.extend(part.violations);
        total.max_ratio = total.max_ratio.max(part.max_ratio);
    }
    total
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub modulus: u64,
    pub energy: u128,
    pub square_count: u64,
    /// `(W * energy)^(1/4) / square_count`.
    pub indicator_ratio: f64,
}

/// Quadruples of squares with `x + z = y + w` mod W, via the pair-sum histogram.
pub fn additive_energy_squares(w: u64) -> Result<EnergyReport> {
    let sq = squares_mod(w, SquareKind::AllSquares)?;
    let mut hist = vec![0u64; w as usize];
    for &x in sq.elements() {
        for &z in sq.elements() {
            hist[((x + z) % w) as usize] += 1;
        }
    }
    let energy: u128 = hist.iter().map(|&r| r as u128 * r as u128).sum();
    let square_count = sq.len() as u64;
    let indicator_ratio = (w as f64 * energy as f64).powf(0.25) / square_count as f64;
    Ok(EnergyReport { modulus: w, energy, square_count, indicator_ratio })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplicativitySweep {
    pub pairs: u64,
    pub failures: Vec<(u64, u64)>,
}

/// `energy(W1 W2) == energy(W1) energy(W2)` for coprime `W1 < W2`, `W1 W2 <= max_product`.
pub fn energy_multiplicativity_sweep(max_product: u64) -> MultiplicativitySweep {
    let energies: Vec<u128> = (0..=max_product)
        .into_par_iter()
        .map(|w| if w == 0 { 0 } else { additive_energy_squares(w).expect("w >= 1").energy })
        .collect();
    let mut out = MultiplicativitySweep { pairs: 0, failures: vec![] };
    for w1 in 2..=max_product {
        for w2 in (w1 + 1)..=(max_product / w1) {
            if num_integer::gcd(w1, w2) != 1 {
                continue;
            }
            out.pairs += 1;
            let lhs = energies[(w1 * w2) as usize];
            if lhs != energies[w1 as usize] * energies[w2 as usize] {
                out.failures.push((w1, w2));
            }
        }
    }
    out
}

/// Order of the largest proper subgroup of Z/W.
pub fn largest_proper_subgroup(w: u64) -> Result<u64> {
    let f = factorize(w)?;
    f.smallest_prime()
        .map(|p| w / p)
        .ok_or_else(|| invalid("Z/1 has no proper subgroup"))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GreenRuzsaCheck {
    pub lhs: i64,
    pub rhs: i64,
    pub ok: bool,
}

/// `sum_x min(t, 1_A * 1_B(x)) >= t min(W, |A| + |B| - t - D)`.
pub fn green_ruzsa_verify(w: u64, a: &[u64], b: &[u64], t: u64) -> Result<GreenRuzsaCheck> {
    check_subset(a, w)?;
    check_subset(b, w)?;
    let (a, b) = (dedup(a), dedup(b));
    if t == 0 || t as usize > a.len().min(b.len()) {
        return Err(invalid(format!("t = {t} outside [1, min(|A|, |B|)]")));
    }
    let d = largest_proper_subgroup(w)? as i64;
    let mut r = vec![0u128; w as usize];
    for &x in &a {
        r[x as usize] = 1;
    }
    let conv = convolve_with_set(&r, &b);
    let lhs: i64 = conv.iter().map(|&c| c.min(t as u128) as i64).sum();
    let t = t as i64;
    let rhs = t * (w as i64).min(a.len() as i64 + b.len() as i64 - t - d);
    Ok(GreenRuzsaCheck { lhs, rhs, ok: lhs >= rhs })
}

fn dedup(s: &[u64]) -> Vec<u64> {
    let mut v = s.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreenRuzsaInstance {
    pub w: u64,
    pub a: Vec<u64>,
    pub b: Vec<u64>,
    pub t: u64,
}

const HIGHLY_COMPOSITE: [u64; 8] = [12, 24, 36, 48, 60, 72, 96, 120];

fn random_subset(rng: &mut ChaCha8Rng, w: u64) -> Vec<u64> {
    let size = rng.gen_range(1..=w as usize);
    let mut all: Vec<u64> = (0..w).collect();
    all.shuffle(rng);
    let mut s = all[..size].to_vec();
    s.sort_unstable();
    s
}

/// Seeded random instance; a third use prime moduli and a third highly composite ones.
pub fn random_green_ruzsa_instance(seed: u64, index: u64) -> GreenRuzsaInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let w = match index % 3 {
        0 => loop {
            let w = rng.gen_range(2..=120u64);
            if is_prime(w) {
                break w;
            }
        },
        1 => *HIGHLY_COMPOSITE.choose(&mut rng).expect("nonempty"),
        _ => rng.gen_range(2..=120u64),
    };
    let a = random_subset(&mut rng, w);
    let b = random_subset(&mut rng, w);
    let t = rng.gen_range(1..=a.len().min(b.len()) as u64);
    GreenRuzsaInstance { w, a, b, t }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CauchyDavenportCheck {
    pub sumset_size: u64,
    pub bound: u64,
    pub ok: bool,
}

pub fn cauchy_davenport_verify(p: u64, sets: &[Vec<u64>]) -> Result<CauchyDavenportCheck> {
    if !is_prime(p) {
        return Err(invalid(format!("{p} is not prime")));
    }
    if sets.is_empty() || sets.iter().any(|s| s.is_empty()) {
        return Err(invalid("sets must be nonempty"));
    }
    for s in sets {
        check_subset(s, p)?;
    }
    let sumset = cyclic_sumset(sets, p);
    let sumset_size = sumset.count_ones();
    let total: u64 = sets.iter().map(|s| dedup(s).len() as u64).sum();
    let bound = p.min(total - (sets.len() as u64 - 1));
    Ok(CauchyDavenportCheck { sumset_size, bound, ok: sumset_size >= bound })
}

/// Fixed-length bitset over Z/W with cyclic shifts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicBits {
    w: usize,
    words: Vec<u64>,
}

impl CyclicBits {
    pub fn new(w: u64) -> Self {
        let w = w as usize;
        CyclicBits { w, words: vec![0; w.div_ceil(64)] }
    }

    pub fn from_elements(w: u64, elems: &[u64]) -> Self {
        let mut b = CyclicBits::new(w);
        for &x in elems {
            b.set(x);
        }
        b
    }

    pub fn set(&mut self, x: u64) {
        let x = x as usize;
        self.words[x / 64] |= 1 << (x % 64);
    }

    pub fn get(&self, x: u64) -> bool {
        let x = x as usize;
        self.words[x / 64] >> (x % 64) & 1 == 1
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn zeros(&self) -> Vec<u64> {
        (0..self.w as u64).filter(|&x| !self.get(x)).collect()
    }

    fn bit_of_doubled(&self, i: usize) -> u64 {
        let i = if i >= self.w { i - self.w } else { i };
        self.words[i / 64] >> (i % 64) & 1
    }

    /// 64 bits of the periodic extension starting at `start < W`.
    fn window(&self, start: usize) -> u64 {
        if start % 64 == 0 && start + 64 <= self.w {
            return self.words[start / 64];
        }
        if start + 64 <= self.w {
            let (q, r) = (start / 64, start % 64);
            return self.words[q] >> r | self.words[q + 1] << (64 - r);
        }
        (0..64).fold(0u64, |acc, k| acc | self.bit_of_doubled((start + k) % self.w) << k)
    }

    /// `self |= (other + a)`.
    pub fn or_shifted(&mut self, other: &CyclicBits, a: u64) {
        debug_assert_eq!(self.w, other.w);
        let w = self.w;
        let a = a as usize % w;
        for k in 0..self.words.len() {
            let y = 64 * k;
            let mut bits = other.window((y + w - a) % w);
            let valid = (w - y).min(64);
            if valid < 64 {
                bits &= (1u64 << valid) - 1;
            }
            self.words[k] |= bits;
        }
    }
}

pub fn cyclic_sumset(sets: &[Vec<u64>], w: u64) -> CyclicBits {
    let mut acc = CyclicBits::from_elements(w, &[0]);
    for s in sets {
        let mut next = CyclicBits::new(w);
        for &a in &dedup(s) {
            next.or_shifted(&acc, a);
        }
        acc = next;
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub p: u64,
    pub s: u32,
    pub tau: f64,
    pub eta: f64,
    pub set: Vec<u64>,
    /// `|A| / ((p + 1) / 2)`.
    pub density: f64,
    pub missing: Vec<u64>,
}

/// Squares in `[1, eta p]` with `eta = (tau + 1/s)/2`, whose s-fold sumset
/// omits a residue since `eta s < 1`.
pub fn interval_counterexample(p: u64, s: u32, tau: f64) -> Result<Counterexample> {
    if !is_prime(p) || p == 2 {
        return Err(invalid(format!("{p} is not an odd prime")));
    }
    if s < 5 {
        return Err(invalid("s must be at least 5"));
    }
    let inv_s = 1.0 / s as f64;
    if !(0.0..inv_s).contains(&tau) {
        return Err(invalid(format!("tau = {tau} outside [0, 1/s)")));
    }
    let eta = (tau + inv_s) / 2.0;
    let top = ((eta * p as f64).floor() as u64).min(p - 1);
    let sq = squares_mod(p, SquareKind::AllSquares)?;
    let set: Vec<u64> = (1..=top).filter(|&x| sq.contains(x)).collect();
    let needed = tau * (p + 1) as f64 / 2.0;
    if (set.len() as f64) < needed {
        return Err(Error::DensityShortfall { size: set.len(), needed });
    }
    let sumset = cyclic_sumset(&vec![set.clone(); s as usize], p);
    Ok(Counterexample {
        p,
        s,
        tau,
        eta,
        density: set.len() as f64 / ((p + 1) as f64 / 2.0),
        missing: sumset.zeros(),
        set,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MainWitness {
    pub count: u128,
    /// `count * W / S(W)^s`.
    pub normalized: f64,
}

/// Tuples in `A^s` summing to `y`.
pub fn theorem_main_witness(w: u64, s: u32, a: &[u64], y: u64) -> Result<MainWitness> {
    let all = main_witness_counts(w, s, a)?;
    Ok(all.into_iter().nth((y % w) as usize).expect("y < w"))
}

/// [`theorem_main_witness`] for every target at once.
pub fn main_witness_counts(w: u64, s: u32, a: &[u64]) -> Result<Vec<MainWitness>> {
    let sq = squares_mod(w, SquareKind::AllSquares)?;
    if let Some(x) = a.iter().find(|&&x| !sq.contains(x) || x >= w) {
        return Err(invalid(format!("{x} is not a square mod {w}")));
    }
    if s == 0 {
        return Err(invalid("s must be positive"));
    }
    let sets = vec![dedup(a); s as usize];
    let rep = convolution_counts(&sets, w)?;
    let scale = w as f64 / (sq.len() as f64).powi(s as i32);
    Ok(rep
        .counts
        .into_iter()
        .map(|count| MainWitness { count, normalized: count as f64 * scale })
        .collect())
}

/// `(p^n energy)^(1/4) / S(p^n)`: the restriction ratio of the all-ones input.
pub fn indicator_restriction_ratio(p: u64, n: u32) -> Result<f64> {
    let q = odd_prime_power(p, n)?;
    Ok(additive_energy_squares(q)?.indicator_ratio)
}

/// `max (ratio(p, 1) - 1) p` over primes in `[p_min, p_max]`.
pub fn restriction_ratio_statistic(p_min: u64, p_max: u64) -> f64 {
    let primes: Vec<u64> = (p_min.max(3)..=p_max).filter(|&p| is_prime(p)).collect();
    primes
        .par_iter()
        .map(|&p| (indicator_restriction_ratio(p, 1).expect("odd prime") - 1.0) * p as f64)
        .reduce(|| f64::NEG_INFINITY, f64::max)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyRow {
    pub p: u64,
    pub n: u32,
    pub s: u64,
    pub energy: u128,
    pub ratio: f64,
}

pub fn energy_table(prime_powers: &[(u64, u32)]) -> Result<Vec<EnergyRow>> {
    prime_powers
        .par_iter()
        .map(|&(p, n)| {
            let q = odd_prime_power(p, n)?;
            let e = additive_energy_squares(q)?;
            Ok(EnergyRow { p, n, s: e.square_count, energy: e.energy, ratio: e.indicator_ratio })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn naive_counts(sets: &[Vec<u64>], w: u64) -> Vec<u128> {
        let mut counts = vec![0u128; w as usize];
        let mut idx = vec![0usize; sets.len()];
        loop {
            let sum: u64 = idx.iter().zip(sets).map(|(&i, s)| s[i]).sum();
            counts[(sum % w) as usize] += 1;
            let mut k = 0;
            loop {
                if k == sets.len() {
                    return counts;
                }
                idx[k] += 1;
                if idx[k] < sets[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }

    #[test]
    fn convolution_examples() {
        let r = convolution_counts(&[vec![0, 1], vec![0, 1]], 3).unwrap();
        assert_eq!(r.counts, vec![1, 2, 1]);
        let full: Vec<u64> = (0..7).collect();
        let r = convolution_counts(&vec![full; 4], 7).unwrap();
        assert!(r.counts.iter().all(|&c| c == 343));
        let r = convolution_counts(&[vec![2], vec![3], vec![4]], 5).unwrap();
        assert_eq!(r.counts, vec![0, 0, 0, 0, 1]);
        assert_eq!((r.min_count, r.min_witness), (0, 0));
        assert!(convolution_counts(&[], 5).is_err());
        assert!(convolution_counts(&[vec![5]], 5).is_err());
    }

    #[test]
    fn t_count_examples() {
        assert_eq!(t_count(5, 1, 1).unwrap(), 2);
        assert_eq!(t_count(3, 1, 1).unwrap(), 1);
        let c = t_count(7, 2, 1).unwrap();
        assert!(Rational::from(c) <= t_count_bound(7, 2).unwrap());
        assert_eq!(t_count_bound(7, 2).unwrap(), Rational::new(25, 2));
        assert!(t_count(5, 1, 10).is_err());
        let hist = square_difference_histogram(49).unwrap();
        for l in (1..49).filter(|l| l % 7 != 0) {
            assert_eq!(hist[l as usize], t_count(7, 2, l as i64).unwrap());
        }
    }

    #[test]
    fn t_count_sweep_small() {
        let sweep = t_count_sweep(200);
        assert!(sweep.violations.is_empty(), "{:?}", sweep.violations);
        assert!(sweep.prime_powers > 45);
    }

    #[test]
    fn energy_examples() {
        assert_eq!(additive_energy_squares(3).unwrap().energy, 6);
        assert_eq!(additive_energy_squares(1).unwrap().energy, 1);
        let r = indicator_restriction_ratio(3, 1).unwrap();
        assert!((r - 18f64.powf(0.25) / 2.0).abs() < 1e-12);
        assert!((r - 1.0299).abs() < 1e-4);
        assert!(indicator_restriction_ratio(9, 1).is_err());
    }

    #[test]
    fn energy_is_multiplicative_small() {
        let sweep = energy_multiplicativity_sweep(400);
        assert!(sweep.failures.is_empty());
        assert!(sweep.pairs > 100);
    }

    #[test]
    fn energy_matches_quadruple_count() {
        for w in [5u64, 8, 9, 12] {
            let sq = squares_mod(w, SquareKind::AllSquares).unwrap();
            let e = sq.elements();
            let mut n = 0u128;
            for &x in e {
                for &y in e {
                    for &z in e {
                        for &v in e {
                            n += ((x + z) % w == (y + v) % w) as u128;
                        }
                    }
                }
            }
            let r = additive_energy_squares(w).unwrap();
            assert_eq!(r.energy, n);
            assert!(r.energy >= (r.square_count as u128).pow(2));
        }
    }

    #[test]
    fn green_ruzsa_examples() {
        let r = green_ruzsa_verify(5, &[0, 1], &[0, 1], 1).unwrap();
        assert_eq!((r.lhs, r.rhs, r.ok), (3, 2, true));
        let full: Vec<u64> = (0..6).collect();
        let r = green_ruzsa_verify(6, &full, &full, 6).unwrap();
        assert_eq!(r.lhs, 36);
        assert_eq!(r.rhs, 6 * 3);
        assert!(r.ok);
        let r = green_ruzsa_verify(12, &[4], &[0, 1, 5, 7], 1).unwrap();
        assert_eq!(r.lhs, 4);
        assert_eq!(r.rhs, -2, "|A| + |B| - t - D = 1 + 4 - 1 - 6 < W");
        assert!(green_ruzsa_verify(5, &[0], &[1, 2], 2).is_err());
        assert!(green_ruzsa_verify(5, &[0], &[1, 2], 0).is_err());
    }

    #[test]
    fn green_ruzsa_random_instances() {
        for i in 0..300 {
            let inst = random_green_ruzsa_instance(7, i);
            let r = green_ruzsa_verify(inst.w, &inst.a, &inst.b, inst.t).unwrap();
            assert!(r.ok, "{inst:?} -> {r:?}");
        }
        assert_eq!(random_green_ruzsa_instance(7, 3), random_green_ruzsa_instance(7, 3));
    }

    #[test]
    fn cauchy_davenport_examples() {
        let r = cauchy_davenport_verify(13, &[vec![3], vec![5], vec![9]]).unwrap();
        assert_eq!((r.sumset_size, r.bound), (1, 1));
        let full: Vec<u64> = (0..13).collect();
        let r = cauchy_davenport_verify(13, &[full.clone(), vec![2]]).unwrap();
        assert_eq!(r.sumset_size, 13);
        assert!(cauchy_davenport_verify(13, &[vec![]]).is_err());
        assert!(cauchy_davenport_verify(12, &[vec![1]]).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..500 {
            let k = rng.gen_range(2..=4);
            let sets: Vec<Vec<u64>> = (0..k).map(|_| random_subset(&mut rng, 13)).collect();
            assert!(cauchy_davenport_verify(13, &sets).unwrap().ok);
        }
    }

    #[test]
    fn counterexample_small_prime() {
        let c = interval_counterexample(10007, 5, 0.15).unwrap();
        assert!(c.set.len() as f64 >= 0.15 * 10008.0 / 2.0);
        assert!(!c.missing.is_empty());
        assert!(interval_counterexample(10007, 5, 0.2).is_err());
        let c = interval_counterexample(1009, 5, 0.0).unwrap();
        assert!(!c.missing.is_empty());
        assert!(matches!(
            interval_counterexample(11, 5, 0.19),
            Err(Error::DensityShortfall { .. })
        ));
    }

    #[test]
    fn main_witness_examples() {
        let sq = squares_mod(29, SquareKind::AllSquares).unwrap();
        let all = main_witness_counts(29, 5, sq.elements()).unwrap();
        assert!(all.iter().all(|m| m.count > 0));
        assert_eq!(theorem_main_witness(29, 5, &[0], 0).unwrap().count, 1);
        assert_eq!(theorem_main_witness(29, 5, &[0], 3).unwrap().count, 0);
        assert!(theorem_main_witness(29, 5, &[2], 3).is_err());

        let sq = squares_mod(101, SquareKind::AllSquares).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        let mut a: Vec<u64> = sq.elements().to_vec();
        a.shuffle(&mut rng);
        a.truncate((a.len() * 2).div_ceil(5));
        let all = main_witness_counts(101, 5, &a).unwrap();
        assert!(all.iter().all(|m| m.count > 0));
    }

    #[test]
    fn restriction_ratio_trend() {
        let r11 = indicator_restriction_ratio(11, 1).unwrap();
        let r199 = indicator_restriction_ratio(199, 1).unwrap();
        assert!(r199 < r11);
        assert!((r199 - 1.0).abs() < 0.05);
    }

    fn arb_sets() -> impl Strategy<Value = (u64, Vec<Vec<u64>>)> {
        (2u64..40).prop_flat_map(|w| {
            (
                Just(w),
                prop::collection::vec(prop::collection::btree_set(0..w, 1..6), 2..4)
                    .prop_map(|v| v.into_iter().map(|s| s.into_iter().collect()).collect()),
            )
        })
    }

    proptest! {
        #[test]
        fn convolution_matches_enumeration((w, sets) in arb_sets()) {
            let r = convolution_counts(&sets, w).unwrap();
            prop_assert_eq!(&r.counts, &naive_counts(&sets, w));
            let mass: u128 = r.counts.iter().sum();
            prop_assert_eq!(mass, sets.iter().map(|s| s.len() as u128).product::<u128>());
        }

        #[test]
        fn bitset_sumset_matches_counts((w, sets) in arb_sets()) {
            let r = convolution_counts(&sets, w).unwrap();
            let bits = cyclic_sumset(&sets, w);
            for x in 0..w {
                prop_assert_eq!(bits.get(x), r.counts[x as usize] > 0);
            }
        }

        #[test]
        fn shifted_or_is_rotation(w in 1u64..300, elems in prop::collection::vec(0u64..300, 0..20), a in 0u64..600) {
            let elems: Vec<u64> = elems.into_iter().map(|x| x % w).collect();
            let src = CyclicBits::from_elements(w, &elems);
            let mut dst = CyclicBits::new(w);
            dst.or_shifted(&src, a);
            let shifted: Vec<u64> = elems.iter().map(|x| (x + a) % w).collect();
            prop_assert_eq!(dst, CyclicBits::from_elements(w, &shifted));
        }
    }
}
