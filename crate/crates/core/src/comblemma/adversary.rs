//! Worst-case functions on unit squares of a small modulus: for each target
//! and support, maximise the mean subject to every representation of the
//! target having average at most `d_s`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::thresholds::{threshold_big_d, threshold_d};
use crate::error::{invalid, Error, Result};
use crate::exactlp::{simplex_solve, verify_certificate, Bound, Constraint, LpProblem, Rational};
use crate::modring::{squares_mod, SquareKind};

/// `m = 35` for `s = 5`, else `m = 5`.
pub fn adversary_modulus(s: u32) -> Result<u64> {
    match s {
        0..=4 => Err(invalid(format!("s = {s} < 5"))),
        5 => Ok(35),
        _ => Ok(5),
    }
}

/// Multiset `sum count_k * x_k` with `sum count_k = s`, entries sorted by residue.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BindingRow {
    pub multiset: Vec<(u64, usize)>,
    pub dual: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdversaryCase {
    pub y: u64,
    pub support: Vec<u64>,
    pub representations: usize,
    pub value: Rational,
    pub point: Vec<Rational>,
    pub certified: bool,
    pub binding: Vec<BindingRow>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdversaryReport {
    pub s: u32,
    pub modulus: u64,
    pub d: Rational,
    #[serde(rename = "D")]
    pub big_d: Rational,
    pub cases: Vec<AdversaryCase>,
    pub max_value: Rational,
    pub all_bounded: bool,
    pub all_certified: bool,
}

impl AdversaryReport {
    pub fn passed(&self) -> bool {
        self.all_bounded && self.all_certified
    }

    pub fn case(&self, y: u64, support: &[u64]) -> Option<&AdversaryCase> {
        self.cases.iter().find(|c| c.y == y && c.support == support)
    }
}

/// Count vectors over `support` with total `s` whose weighted sum is `y` mod `m`.
fn representations(support: &[u64], s: usize, y: u64, m: u64) -> Vec<Vec<usize>> {
    fn rec(
        support: &[u64],
        k: usize,
        left: usize,
        acc: u64,
        m: u64,
        y: u64,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if k + 1 == support.len() {
            if (acc + left as u64 * support[k]) % m == y {
                cur.push(left);
                out.push(cur.clone());
                cur.pop();
            }
            return;
        }
        for c in 0..=left {
            cur.push(c);
            rec(support, k + 1, left - c, (acc + c as u64 * support[k]) % m, m, y, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(support, 0, s, 0, m, y, &mut Vec::new(), &mut out);
    out
}

/// Adversary LP for one `(y, support)`; variable `k` is `f(support[k])`.
pub fn adversary_lp(s: u32, m: u64, y: u64, support: &[u64]) -> Result<(LpProblem, Vec<Vec<usize>>)> {
    let units = squares_mod(m, SquareKind::UnitSquares)?;
    if support.is_empty() || support.iter().any(|&x| !units.contains(x)) {
        return Err(invalid("support must be a nonempty set of unit squares"));
    }
    let d = threshold_d(s)?;
    let reps = representations(support, s as usize, y % m, m);
    let s_r = Rational::from(s as usize);
    let rows = reps
        .iter()
        .map(|counts| {
            let terms = counts
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(k, &c)| (k, Rational::from(c) / &s_r));
            Constraint::new(terms, d.clone())
        })
        .collect();
    let weight = Rational::new(1, units.len() as i64);
    let lp = LpProblem::new(
        vec![weight; support.len()],
        rows,
        vec![Bound::unit(); support.len()],
        format!("adversary s={s} m={m} y={y} S={support:?}"),
    )?;
    Ok((lp, reps))
}

fn solve_case(s: u32, m: u64, y: u64, support: Vec<u64>) -> Result<AdversaryCase> {
    let (lp, reps) = adversary_lp(s, m, y, &support)?;
    let sol = simplex_solve(&lp);
    let certified = verify_certificate(&lp, &sol)?;
    let value = sol.value.clone().ok_or(Error::NotOptimal)?;
    let binding = sol
        .certificate
        .as_ref()
        .map(|c| {
            c.row_duals
                .iter()
                .filter(|(_, y)| y.is_positive())
                .map(|(r, dual)| BindingRow {
                    multiset: reps[*r]
                        .iter()
                        .zip(&support)
                        .filter(|(&c, _)| c > 0)
                        .map(|(&c, &x)| (x, c))
                        .collect(),
                    dual: dual.clone(),
                })
                .collect()
        })
        .unwrap_or_default();
    Ok(AdversaryCase {
        y,
        support,
        representations: reps.len(),
        value,
        point: sol.primal,
        certified,
        binding,
    })
}

/// Every target in `Z/m` against every nonempty support of unit squares.
pub fn small_moduli_adversary_check(s: u32) -> Result<AdversaryReport> {
    let m = adversary_modulus(s)?;
    let units = squares_mod(m, SquareKind::UnitSquares)?;
    let u = units.elements().to_vec();
    let jobs: Vec<(u64, Vec<u64>)> = (0..m)
        .flat_map(|y| {
            let u = &u;
            (1u64..(1 << u.len())).map(move |mask| {
                let support = (0..u.len()).filter(|k| mask >> k & 1 == 1).map(|k| u[k]).collect();
                (y, support)
            })
        })
        .collect();
    let cases: Vec<AdversaryCase> = jobs
        .into_par_iter()
        .map(|(y, support)| solve_case(s, m, y, support))
        .collect::<Result<_>>()?;
    let big_d = threshold_big_d(s)?;
    let max_value = cases.iter().map(|c| c.value.clone()).max().unwrap_or_else(Rational::zero);
    Ok(AdversaryReport {
        s,
        modulus: m,
        d: threshold_d(s)?,
        all_bounded: max_value <= big_d,
        all_certified: cases.iter().all(|c| c.certified),
        big_d,
        cases,
        max_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlp::{vertex_enumerate, VertexOutcome};

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn representation_enumeration() {
        // 4*1 + 3*4 = 16 = 1 mod 5 is the only split of 7 summands.
        assert_eq!(representations(&[1, 4], 7, 1, 5), vec![vec![4, 3]]);
        let reps = representations(&[1, 4], 8, 0, 5);
        assert!(reps.iter().all(|c| c.iter().sum::<usize>() == 8));
        for c in &reps {
            assert_eq!((c[0] + 4 * c[1]) % 5, 0);
        }
        assert_eq!(representations(&[1], 5, 2, 5), Vec::<Vec<usize>>::new());
    }

    #[test]
    fn seven_one_case() {
        let case = solve_case(7, 5, 1, vec![1, 4]).unwrap();
        assert_eq!(case.value, r(3, 4));
        assert_eq!(case.point, vec![r(1, 2), r(1, 1)]);
        assert_eq!(case.binding.len(), 1);
        assert_eq!(case.binding[0].multiset, vec![(1, 4), (4, 3)]);
        assert!(case.certified);
    }

    #[test]
    fn eight_zero_case_matches_vertex_oracle() {
        let (lp, _) = adversary_lp(8, 5, 0, &[1, 4]).unwrap();
        let sol = simplex_solve(&lp);
        let VertexOutcome::Optimal { value, .. } = vertex_enumerate(&lp).unwrap() else {
            panic!("expected optimum");
        };
        assert_eq!(sol.value, Some(value.clone()));
        assert!(value <= threshold_big_d(8).unwrap());
    }

    #[test]
    fn unrepresentable_support_is_unconstrained() {
        let case = solve_case(6, 5, 0, vec![1]).unwrap();
        assert_eq!(case.representations, 0);
        assert_eq!(case.value, r(1, 2));
    }

    #[test]
    fn sweep_small_s() {
        for s in [6u32, 7, 9] {
            let rep = small_moduli_adversary_check(s).unwrap();
            assert_eq!(rep.cases.len(), 15);
            assert!(rep.passed(), "s={s} max={}", rep.max_value);
        }
        assert!(small_moduli_adversary_check(4).is_err());
        assert!(adversary_lp(6, 5, 0, &[2]).is_err());
    }
}
