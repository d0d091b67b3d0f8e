//! Fixed inputs shared by the benchmarks, so timings stay comparable across runs.

use quadwaring_core::comblemma::{canonical_t_tuples, generate_lp};
use quadwaring_core::exactlp::random_small_lp;
use quadwaring_core::LpProblem;

pub const SEED: u64 = 20_240_601;

/// Every canonical LP for `(s, n)`.
pub fn base_case_lps(s: u32, n: usize) -> Vec<LpProblem> {
    canonical_t_tuples(s, n)
        .iter()
        .map(|t| generate_lp(s, n, t).expect("canonical tuples are valid"))
        .collect()
}

/// The first `count` seeded small LPs.
pub fn small_lps(count: u64) -> Vec<LpProblem> {
    (0..count).map(|i| random_small_lp(SEED, i)).collect()
}

/// Odd prime powers used by the Gauss-sum benchmarks.
pub const GAUSS_MODULI: [(u64, u32); 4] = [(101, 1), (31, 2), (13, 3), (10_007, 1)];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_nonempty_and_deterministic() {
        assert!(!base_case_lps(6, 3).is_empty());
        assert_eq!(small_lps(5), small_lps(5));
    }
}
