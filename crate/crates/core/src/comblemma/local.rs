//! Randomised checks of the local representation statements: functions on
//! the unit squares mod `W` with large mean must represent every target with
//! all summands in the support and average above `d_s`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::matrix::{lift_average, trial_seed, SamplerMode};
use super::thresholds::{threshold_big_d, threshold_d};
use crate::error::{invalid, Result};
use crate::exactlp::Rational;
use crate::modring::{factorize, squares_mod, SquareKind};

/// `values[j][k]` is `f_j(units[k])`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitSquareFunctions {
    pub modulus: u64,
    pub units: Vec<u64>,
    pub values: Vec<Vec<Rational>>,
}

impl UnitSquareFunctions {
    pub fn means(&self) -> Vec<Rational> {
        let len = Rational::from(self.units.len());
        self.values.iter().map(|v| v.iter().sum::<Rational>() / &len).collect()
    }

    pub fn average_mean(&self) -> Rational {
        let means = self.means();
        let s = Rational::from(means.len());
        means.into_iter().sum::<Rational>() / s
    }
}

/// Summands `x_1..x_s` (residues) and their average `f`-value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub summands: Vec<u64>,
    pub average: Rational,
}

/// Best decomposition of every `y` in `Z/W` with all `f_j(x_j) != 0`,
/// maximising `sum f_j(x_j)`; `None` where no such decomposition exists.
pub fn best_decompositions(f: &UnitSquareFunctions) -> Vec<Option<Decomposition>> {
    let w = f.modulus as usize;
    let s = f.values.len();
    // best[j][z]: max of the first j summands' values with sum z.
    let mut best: Vec<Vec<Option<Rational>>> = vec![vec![None; w]; s + 1];
    let mut choice: Vec<Vec<usize>> = vec![vec![usize::MAX; w]; s + 1];
    best[0][0] = Some(Rational::zero());
    for j in 0..s {
        let (done, rest) = best.split_at_mut(j + 1);
        let (prev, next) = (&done[j], &mut rest[0]);
        for z in 0..w {
            let Some(base) = &prev[z] else { continue };
            for (k, &x) in f.units.iter().enumerate() {
                let v = &f.values[j][k];
                if v.is_zero() {
                    continue;
                }
                let t = (z + x as usize) % w;
                let cand = base + v;
                if next[t].as_ref().map_or(true, |b| cand > *b) {
                    next[t] = Some(cand);
                    choice[j + 1][t] = k;
                }
            }
        }
    }
    let s_r = Rational::from(s);
    (0..w)
        .map(|y| {
            let total = best[s][y].clone()?;
            let mut summands = vec![0u64; s];
            let mut z = y;
            for j in (1..=s).rev() {
                let x = f.units[choice[j][z]];
                summands[j - 1] = x;
                z = (z + w - x as usize) % w;
            }
            Some(Decomposition { summands, average: total / &s_r })
        })
        .collect()
}

fn sample_functions(
    w: u64,
    s: usize,
    copies: usize,
    threshold: &Rational,
    seed: u64,
    mode: SamplerMode,
) -> Result<UnitSquareFunctions> {
    let units = squares_mod(w, SquareKind::UnitSquares)?.elements().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zero_rate = rng.gen_range(0.0..0.6);
    let mut raw = Vec::with_capacity(copies);
    let mut indicator = Vec::with_capacity(copies);
    for _ in 0..copies {
        let mut col: Vec<Rational> = units
            .iter()
            .map(|_| {
                if rng.gen_bool(zero_rate) {
                    Rational::zero()
                } else {
                    Rational::new(rng.gen_range(1..=1000), 1000)
                }
            })
            .collect();
        if col.iter().all(Rational::is_zero) {
            let k = rng.gen_range(0..col.len());
            col[k] = Rational::new(rng.gen_range(1..=1000), 1000);
        }
        indicator.push(
            col.iter()
                .map(|v| if v.is_zero() { Rational::zero() } else { Rational::one() })
                .collect(),
        );
        raw.push(col);
    }
    let values = lift_average(raw, &indicator, threshold, mode, &mut rng)?;
    let values = if copies == 1 { vec![values[0].clone(); s] } else { values };
    Ok(UnitSquareFunctions { modulus: w, units, values })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalFailure {
    pub trial: u64,
    pub seed: u64,
    pub y: u64,
    pub best: Option<Decomposition>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalPropertyReport {
    pub modulus: u64,
    pub s: u32,
    pub hypothesis_threshold: Rational,
    pub conclusion_threshold: Rational,
    pub trials: u64,
    pub targets_per_trial: usize,
    pub failures: Vec<LocalFailure>,
}

impl LocalPropertyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn run_trials(
    w: u64,
    s: u32,
    shared: bool,
    hypothesis: Rational,
    targets: Vec<u64>,
    trials: u64,
    seed: u64,
) -> Result<LocalPropertyReport> {
    let d = threshold_d(s)?;
    let copies = if shared { 1 } else { s as usize };
    let failures: Vec<Vec<LocalFailure>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let ts = trial_seed(seed, trial);
            let mode = if trial % 2 == 0 { SamplerMode::Uniform } else { SamplerMode::NearThreshold };
            let f = sample_functions(w, s as usize, copies, &hypothesis, ts, mode)?;
            let best = best_decompositions(&f);
            Ok(targets
                .iter()
                .filter(|&&y| !best[y as usize].as_ref().is_some_and(|b| b.average > d))
                .map(|&y| LocalFailure { trial, seed: ts, y, best: best[y as usize].clone() })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(LocalPropertyReport {
        modulus: w,
        s,
        hypothesis_threshold: hypothesis,
        conclusion_threshold: d,
        trials,
        targets_per_trial: targets.len(),
        failures: failures.into_iter().flatten().collect(),
    })
}

/// `s` independent functions on unit squares mod squarefree `W` coprime to 30
/// (to 210 when `s = 5`), average of means `> d_s`; every `y` in `Z/W`.
pub fn local_theorem_property_test(w: u64, s: u32, trials: u64, seed: u64) -> Result<LocalPropertyReport> {
    let d = threshold_d(s)?;
    let f = factorize(w)?;
    if w < 2 || !f.is_squarefree() {
        return Err(invalid(format!("W = {w} must be squarefree and > 1")));
    }
    let excluded: &[u64] = if s == 5 { &[2, 3, 5, 7] } else { &[2, 3, 5] };
    if let Some(p) = excluded.iter().find(|&&p| w % p == 0) {
        return Err(invalid(format!("W = {w} is divisible by excluded prime {p}")));
    }
    run_trials(w, s, false, d, (0..w).collect(), trials, seed)
}

/// One function on unit squares mod `24W`, mean `> D_s`; every `y = s mod 24`.
pub fn theorem82_property_test(w: u64, s: u32, trials: u64, seed: u64) -> Result<LocalPropertyReport> {
    let big_d = threshold_big_d(s)?;
    let f = factorize(w)?;
    if !f.is_squarefree() || w % 2 == 0 || w % 3 == 0 {
        return Err(invalid(format!("W = {w} must be squarefree and coprime to 24")));
    }
    let m = 24 * w;
    let targets = (0..m).filter(|y| y % 24 == s as u64 % 24).collect();
    run_trials(m, s, true, big_d, targets, trials, seed)
}
