//! Column-decreasing density matrices, the exhaustive conclusion search, and
//! a seeded sampler for matrices meeting the lemma's hypotheses.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::thresholds::threshold_d;
use crate::error::{invalid, Result};
use crate::exactlp::Rational;

/// `a_{i,j}` for `0 <= i < n` and `s` columns (0-based here), each column
/// decreasing in `i` with entries in `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityMatrix {
    s: usize,
    n: usize,
    columns: Vec<Vec<Rational>>,
}

impl DensityMatrix {
    pub fn from_columns(columns: Vec<Vec<Rational>>) -> Result<Self> {
        let s = columns.len();
        let n = columns.first().map_or(0, Vec::len);
        if s == 0 || n == 0 {
            return Err(invalid("matrix must be nonempty"));
        }
        for (j, col) in columns.iter().enumerate() {
            if col.len() != n {
                return Err(invalid(format!("column {j} has length {}", col.len())));
            }
            if col.iter().any(|a| a.is_negative() || *a > Rational::one()) {
                return Err(invalid(format!("column {j} leaves [0, 1]")));
            }
            if col.windows(2).any(|w| w[1] > w[0]) {
                return Err(invalid(format!("column {j} is not decreasing")));
            }
        }
        Ok(DensityMatrix { s, n, columns })
    }

    pub fn constant(s: usize, n: usize, v: Rational) -> Result<Self> {
        Self::from_columns(vec![vec![v; n]; s])
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.columns[j][i]
    }

    pub fn columns(&self) -> &[Vec<Rational>] {
        &self.columns
    }

    /// `(1/(ns)) sum a_{i,j}`.
    pub fn average(&self) -> Rational {
        let total: Rational = self.columns.iter().flatten().sum();
        total / Rational::from(self.n * self.s)
    }

    /// Number of nonzero entries in column `j` (a prefix, by monotonicity).
    pub fn support(&self, j: usize) -> usize {
        self.columns[j].iter().take_while(|a| !a.is_zero()).count()
    }

    pub fn first_row_nonzero(&self) -> bool {
        self.columns.iter().all(|c| !c[0].is_zero())
    }

    /// `(1 - lambda) self + lambda target`.
    pub fn mix(&self, target: &DensityMatrix, lambda: &Rational) -> Result<Self> {
        if target.s != self.s || target.n != self.n {
            return Err(invalid("shape mismatch"));
        }
        if lambda.is_negative() || *lambda > Rational::one() {
            return Err(invalid("mixing weight outside [0, 1]"));
        }
        let keep = Rational::one() - lambda;
        let columns = self
            .columns
            .iter()
            .zip(&target.columns)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| &(&keep * x) + &(lambda * y)).collect())
            .collect();
        Self::from_columns(columns)
    }
}

pub fn mix_toward_ones(m: &DensityMatrix, lambda: &Rational) -> Result<DensityMatrix> {
    m.mix(&DensityMatrix::constant(m.s, m.n, Rational::one())?, lambda)
}

/// Lexicographically first `(i_1..i_s)` with `sum i_j >= 2n`, every
/// `a_{i_j,j} != 0`, and `(1/s) sum a_{i_j,j} > threshold`.
pub fn lemma_conclusion_search(m: &DensityMatrix, threshold: &Rational) -> Option<Vec<usize>> {
    let (s, n) = (m.s, m.n);
    let need_max = 2 * n;
    let target = threshold * &Rational::from(s);
    // best[j][k]: max of sum_{j' >= j} a_{i_j', j'} over nonzero choices with
    // sum_{j' >= j} i_j' >= k; None if impossible.
    let mut best: Vec<Vec<Option<Rational>>> = vec![vec![None; need_max + 1]; s + 1];
    best[s][0] = Some(Rational::zero());
    for j in (0..s).rev() {
        let supp = m.support(j);
        for k in 0..=need_max {
            let mut top: Option<Rational> = None;
            for i in 0..supp {
                if let Some(rest) = &best[j + 1][k.saturating_sub(i)] {
                    let v = m.get(i, j) + rest;
                    if top.as_ref().map_or(true, |t| v > *t) {
                        top = Some(v);
                    }
                }
            }
            best[j][k] = top;
        }
    }
    match &best[0][need_max] {
        Some(v) if *v > target => {}
        _ => return None,
    }
    let mut witness = Vec::with_capacity(s);
    let mut prefix = Rational::zero();
    let mut need = need_max;
    for j in 0..s {
        let pick = (0..m.support(j)).find(|&i| {
            best[j + 1][need.saturating_sub(i)]
                .as_ref()
                .is_some_and(|rest| &(&prefix + m.get(i, j)) + rest > target)
        })?;
        prefix += m.get(pick, j);
        need = need.saturating_sub(pick);
        witness.push(pick);
    }
    Some(witness)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerMode {
    /// Random column profiles, mixed just enough to clear the threshold plus a random margin.
    Uniform,
    /// Average pinned to exactly `threshold + 1/1000`.
    NearThreshold,
}

const GRID: i64 = 1000;

/// Seeded matrix with average `> threshold` and a nonzero first row.
pub fn sample_hypothesis_matrix(
    s: usize,
    n: usize,
    threshold: &Rational,
    seed: u64,
    mode: SamplerMode,
) -> Result<DensityMatrix> {
    if s == 0 || n == 0 {
        return Err(invalid("matrix must be nonempty"));
    }
    if mode == SamplerMode::NearThreshold && threshold + &Rational::new(1, GRID) >= Rational::one() {
        return Err(invalid("threshold + 1/1000 must be below 1"));
    }
    if *threshold >= Rational::one() {
        return Err(invalid("threshold must be below 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut columns: Vec<Vec<Rational>> = Vec::with_capacity(s);
    let mut indicator: Vec<Vec<Rational>> = Vec::with_capacity(s);
    for _ in 0..s {
        let len = rng.gen_range(1..=n);
        let mut vals: Vec<i64> = (0..len).map(|_| rng.gen_range(1..=GRID)).collect();
        vals.sort_unstable_by(|a, b| b.cmp(a));
        let mut col: Vec<Rational> = vals.into_iter().map(|k| Rational::new(k, GRID)).collect();
        col.resize(n, Rational::zero());
        columns.push(col);
        let mut ind = vec![Rational::one(); len];
        ind.resize(n, Rational::zero());
        indicator.push(ind);
    }
    let lifted = lift_average(columns, &indicator, threshold, mode, &mut rng)?;
    DensityMatrix::from_columns(lifted)
}

fn total_average(columns: &[Vec<Rational>]) -> Rational {
    let count: usize = columns.iter().map(Vec::len).sum();
    columns.iter().flatten().sum::<Rational>() / Rational::from(count)
}

fn mix_columns(a: &[Vec<Rational>], b: &[Vec<Rational>], lambda: &Rational) -> Vec<Vec<Rational>> {
    let keep = Rational::one() - lambda;
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y).map(|(u, v)| &(&keep * u) + &(lambda * v)).collect())
        .collect()
}

/// Convex mixing that lifts the total average above `threshold` (Uniform) or
/// pins it to `threshold + 1/1000` (NearThreshold). Mixing toward `indicator`
/// keeps the zero pattern; all-ones is the fallback target. Nonzero entries
/// stay nonzero.
pub(crate) fn lift_average(
    raw: Vec<Vec<Rational>>,
    indicator: &[Vec<Rational>],
    threshold: &Rational,
    mode: SamplerMode,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Vec<Rational>>> {
    let avg = total_average(&raw);
    let goal = match mode {
        SamplerMode::Uniform if avg > *threshold => return Ok(raw),
        SamplerMode::Uniform => None,
        SamplerMode::NearThreshold => Some(threshold + &Rational::new(1, GRID)),
    };
    if let Some(goal) = &goal {
        if avg > *goal {
            let scale = goal / &avg;
            return Ok(raw.iter().map(|c| c.iter().map(|v| v * &scale).collect()).collect());
        }
    }
    let floor = goal.clone().unwrap_or_else(|| threshold.clone());
    let ones: Vec<Vec<Rational>> = raw.iter().map(|c| vec![Rational::one(); c.len()]).collect();
    let target = if total_average(indicator) > floor { indicator } else { &ones[..] };
    let t_avg = total_average(target);
    let lambda_min = (&floor - &avg) / (&t_avg - &avg);
    let lambda = match goal {
        Some(_) => lambda_min,
        None => {
            let u = Rational::new(rng.gen_range(1..=GRID), GRID);
            &lambda_min + &(&u * &(Rational::one() - &lambda_min))
        }
    };
    Ok(mix_columns(&raw, target, &lambda))
}

/// Per-trial seed derived from `(seed, trial)`.
pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    let mut x = seed ^ trial.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixFailure {
    pub trial: u64,
    pub seed: u64,
    pub matrix: DensityMatrix,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixPropertyReport {
    pub s: usize,
    pub n: usize,
    pub threshold: Rational,
    pub mode: SamplerMode,
    pub trials: u64,
    pub failures: Vec<MatrixFailure>,
}

impl MatrixPropertyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn matrix_property_test(
    s: usize,
    n: usize,
    threshold: Rational,
    trials: u64,
    seed: u64,
    mode: SamplerMode,
) -> Result<MatrixPropertyReport> {
    let outcomes: Vec<Option<MatrixFailure>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let ts = trial_seed(seed, trial);
            let m = sample_hypothesis_matrix(s, n, &threshold, ts, mode)?;
            debug_assert!(m.average() > threshold && m.first_row_nonzero());
            Ok(lemma_conclusion_search(&m, &threshold)
                .is_none()
                .then_some(MatrixFailure { trial, seed: ts, matrix: m }))
        })
        .collect::<Result<_>>()?;
    Ok(MatrixPropertyReport {
        s,
        n,
        threshold,
        mode,
        trials,
        failures: outcomes.into_iter().flatten().collect(),
    })
}

/// Random hypothesis matrices for `(s, n)` at threshold `d_s` must all admit a witness.
pub fn lemma71_property_test(
    s: u32,
    n: usize,
    trials: u64,
    seed: u64,
    mode: SamplerMode,
) -> Result<MatrixPropertyReport> {
    let valid = (s >= 6 && n >= 3) || (s == 5 && n >= 5);
    if !valid {
        return Err(invalid(format!("(s, n) = ({s}, {n}) outside the lemma's range")));
    }
    matrix_property_test(s as usize, n, threshold_d(s)?, trials, seed, mode)
}

/// `n = 3`, `s >= 12`, arbitrary threshold `D >= 1/2`.
pub fn lemma72_property_test(
    s: u32,
    big_d: &Rational,
    trials: u64,
    seed: u64,
    mode: SamplerMode,
) -> Result<MatrixPropertyReport> {
    if s < 12 {
        return Err(invalid(format!("s = {s} < 12")));
    }
    if *big_d < Rational::new(1, 2) {
        return Err(invalid("D must be at least 1/2"));
    }
    matrix_property_test(s as usize, 3, big_d.clone(), trials, seed, mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    /// Reference: scan all tuples in lexicographic order.
    fn brute_search(m: &DensityMatrix, threshold: &Rational) -> Option<Vec<usize>> {
        let (s, n) = (m.s(), m.n());
        let target = threshold * &Rational::from(s);
        let mut idx = vec![0usize; s];
        loop {
            let ok_sum = idx.iter().sum::<usize>() >= 2 * n;
            let nonzero = idx.iter().enumerate().all(|(j, &i)| !m.get(i, j).is_zero());
            if ok_sum && nonzero {
                let total: Rational = idx.iter().enumerate().map(|(j, &i)| m.get(i, j).clone()).sum();
                if total > target {
                    return Some(idx);
                }
            }
            let mut k = s;
            loop {
                if k == 0 {
                    return None;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < n {
                    break;
                }
                idx[k] = 0;
            }
        }
    }

    #[test]
    fn search_examples() {
        let ones = DensityMatrix::constant(6, 3, Rational::one()).unwrap();
        let w = lemma_conclusion_search(&ones, &r(5, 6)).unwrap();
        assert!(w.iter().sum::<usize>() >= 6);
        assert_eq!(w, vec![0, 0, 0, 2, 2, 2]);

        let flat = DensityMatrix::constant(6, 3, r(5, 6)).unwrap();
        assert_eq!(lemma_conclusion_search(&flat, &r(5, 6)), None);

        let mut cols = vec![vec![r(1, 1), r(0, 1), r(0, 1)]; 6];
        cols[0] = vec![r(1, 1), r(1, 1), r(1, 1)];
        let sparse = DensityMatrix::from_columns(cols).unwrap();
        assert_eq!(lemma_conclusion_search(&sparse, &r(1, 2)), None);
    }

    #[test]
    fn matrix_validation() {
        assert!(DensityMatrix::from_columns(vec![vec![r(1, 2), r(3, 4)]]).is_err());
        assert!(DensityMatrix::from_columns(vec![vec![r(3, 2)]]).is_err());
        assert!(DensityMatrix::from_columns(vec![vec![r(1, 2)], vec![]]).is_err());
        assert!(DensityMatrix::from_columns(vec![]).is_err());
    }

    #[test]
    fn sampler_contract() {
        for seed in 0..200 {
            for mode in [SamplerMode::Uniform, SamplerMode::NearThreshold] {
                let d = threshold_d(5).unwrap();
                let m = sample_hypothesis_matrix(5, 5, &d, seed, mode).unwrap();
                assert!(m.average() > d);
                assert!(m.first_row_nonzero());
                if mode == SamplerMode::NearThreshold {
                    assert_eq!(m.average(), &d + &r(1, 1000));
                }
            }
        }
        let d = r(5, 6);
        let a = sample_hypothesis_matrix(6, 3, &d, 42, SamplerMode::Uniform).unwrap();
        let b = sample_hypothesis_matrix(6, 3, &d, 42, SamplerMode::Uniform).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            mix_toward_ones(&a, &Rational::one()).unwrap(),
            DensityMatrix::constant(6, 3, Rational::one()).unwrap()
        );
    }

    #[test]
    fn lemma_suites_small() {
        for &(s, n) in &[(6u32, 3usize), (7, 3), (5, 5)] {
            for mode in [SamplerMode::Uniform, SamplerMode::NearThreshold] {
                let rep = lemma71_property_test(s, n, 60, 9, mode).unwrap();
                assert!(rep.passed(), "{s},{n}: {:?}", rep.failures.first());
            }
        }
        let rep = lemma72_property_test(12, &r(1, 2), 60, 9, SamplerMode::NearThreshold).unwrap();
        assert!(rep.passed());
        assert!(lemma71_property_test(5, 3, 1, 0, SamplerMode::Uniform).is_err());
        assert!(lemma72_property_test(11, &r(1, 2), 1, 0, SamplerMode::Uniform).is_err());
    }

    fn arb_matrix() -> impl Strategy<Value = DensityMatrix> {
        (1usize..5, 1usize..4).prop_flat_map(|(s, n)| {
            prop::collection::vec(prop::collection::vec(0i64..=4, n), s).prop_map(|cols| {
                let cols = cols
                    .into_iter()
                    .map(|mut c| {
                        c.sort_unstable_by(|a, b| b.cmp(a));
                        c.into_iter().map(|k| Rational::new(k, 4)).collect()
                    })
                    .collect();
                DensityMatrix::from_columns(cols).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn search_matches_brute_force(m in arb_matrix(), k in 0i64..=8) {
            let threshold = Rational::new(k, 8);
            prop_assert_eq!(lemma_conclusion_search(&m, &threshold), brute_search(&m, &threshold));
        }
    }
}
