//! Exact rational linear programming with checkable optimality certificates.

mod certificate;
mod problem;
mod rational;
mod simplex;
mod vertex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use certificate::{tampered_solutions, verify_certificate, LpCertificate, Tamper};
pub use problem::{Bound, Constraint, LpProblem, Violation};
pub use rational::Rational;
pub use simplex::{simplex_solve, LpSolution, LpStatus, Telemetry};
pub use vertex::{vertex_enumerate, VertexOutcome, MAX_VERTEX_VARS};

/// Solves independent problems in parallel; output order matches input order.
pub fn solve_batch(problems: &[LpProblem]) -> Vec<LpSolution> {
    problems.par_iter().map(simplex_solve).collect()
}

fn small_rational(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> Rational {
    Rational::new(rng.gen_range(lo..=hi), rng.gen_range(1..=4))
}

/// Seeded random LP with at most [`MAX_VERTEX_VARS`] variables; a mix of
/// optimal, infeasible and unbounded instances.
pub fn random_small_lp(seed: u64, index: u64) -> LpProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let n = rng.gen_range(1..=MAX_VERTEX_VARS);
    let m = rng.gen_range(0..=if n <= 4 { 6 } else { 4 });
    let objective = (0..n).map(|_| small_rational(&mut rng, -5, 5)).collect();
    let rows = (0..m)
        .map(|_| {
            let density = rng.gen_range(0.3..=1.0);
            let mut terms = Vec::new();
            for j in 0..n {
                if rng.gen_bool(density) {
                    terms.push((j, small_rational(&mut rng, -5, 5)));
                }
            }
            Constraint::new(terms, small_rational(&mut rng, -2, 6))
        })
        .collect();
    let bounds = (0..n)
        .map(|_| {
            let lo = small_rational(&mut rng, -2, 1);
            let hi = (!rng.gen_bool(0.2)).then(|| &lo + &small_rational(&mut rng, 0, 6));
            Bound::new(lo, hi)
        })
        .collect();
    LpProblem::new(objective, rows, bounds, format!("random-{seed}-{index}")).expect("well formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_matches_vertex_oracle() {
        let mut seen = [0usize; 3];
        for i in 0..200 {
            let p = random_small_lp(11, i);
            let s = simplex_solve(&p);
            let v = vertex_enumerate(&p).unwrap();
            match (&s.status, &v) {
                (LpStatus::Optimal, VertexOutcome::Optimal { value, .. }) => {
                    assert_eq!(s.value.as_ref(), Some(value), "{}", p.label());
                    assert!(verify_certificate(&p, &s).unwrap());
                    seen[0] += 1;
                }
                (LpStatus::Infeasible, VertexOutcome::Infeasible) => seen[1] += 1,
                (LpStatus::Unbounded, VertexOutcome::Unbounded) => seen[2] += 1,
                other => panic!("{}: {other:?}", p.label()),
            }
        }
        assert!(seen.iter().all(|&c| c > 0), "status mix {seen:?}");
    }

    #[test]
    fn batch_is_order_preserving() {
        let ps: Vec<LpProblem> = (0..20).map(|i| random_small_lp(3, i)).collect();
        let batch = solve_batch(&ps);
        for (p, s) in ps.iter().zip(&batch) {
            assert_eq!(&simplex_solve(p), s);
        }
    }
}
