//! The LP family over truncated decreasing columns, and exact verification
//! of its base cases.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::thresholds::threshold_d;
use crate::error::{invalid, Result};
use crate::exactlp::{
    simplex_solve, verify_certificate, Bound, Constraint, LpProblem, LpSolution, LpStatus,
    Rational,
};

/// Which averaging rows to emit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowSet {
    /// Every index tuple with sum `>= 2n`.
    Literal,
    /// Only tuples with sum exactly `2n`. With the monotonicity rows present
    /// these imply all the others: lowering any index raises the average.
    Minimal,
}

/// Column layout: variable `offset[j] + i` is `a_{i,j}` for `i < t[j]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    pub t: Vec<usize>,
    pub offset: Vec<usize>,
    pub num_vars: usize,
}

impl Layout {
    pub fn new(t: &[usize]) -> Self {
        let mut offset = Vec::with_capacity(t.len());
        let mut acc = 0;
        for &tj in t {
            offset.push(acc);
            acc += tj;
        }
        Layout { t: t.to_vec(), offset, num_vars: acc }
    }

    pub fn var(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.t[j]);
        self.offset[j] + i
    }
}

/// Calls `f` on every tuple `idx` with `idx[j] < limits[j]` and
/// `sum idx >= min_sum` (or `== min_sum` when `exact`), in lexicographic order.
pub fn for_each_index_tuple(
    limits: &[usize],
    min_sum: usize,
    exact: bool,
    mut f: impl FnMut(&[usize]),
) {
    let s = limits.len();
    // tail_max[j] = largest sum achievable by columns j..s.
    let mut tail_max = vec![0usize; s + 1];
    for j in (0..s).rev() {
        tail_max[j] = tail_max[j + 1] + limits[j].saturating_sub(1);
    }
    if limits.contains(&0) || tail_max[0] < min_sum {
        return;
    }
    let mut idx = vec![0usize; s];
    fn rec(
        j: usize,
        sum: usize,
        idx: &mut [usize],
        limits: &[usize],
        tail_max: &[usize],
        min_sum: usize,
        exact: bool,
        f: &mut dyn FnMut(&[usize]),
    ) {
        if j == idx.len() {
            if sum >= min_sum && (!exact || sum == min_sum) {
                f(idx);
            }
            return;
        }
        for i in 0..limits[j] {
            let s2 = sum + i;
            if exact && s2 > min_sum {
                break;
            }
            if s2 + tail_max[j + 1] < min_sum {
                continue;
            }
            idx[j] = i;
            rec(j + 1, s2, idx, limits, tail_max, min_sum, exact, f);
        }
    }
    rec(0, 0, &mut idx, limits, &tail_max, min_sum, exact, &mut f);
}

fn check_params(s: u32, n: usize, t: &[usize]) -> Result<()> {
    if s < 5 || n < 1 {
        return Err(invalid(format!("need s >= 5 and n >= 1, got s={s}, n={n}")));
    }
    if t.len() != s as usize {
        return Err(invalid(format!("t has {} entries, expected {s}", t.len())));
    }
    if let Some(tj) = t.iter().find(|&&tj| tj < 1 || tj > n) {
        return Err(invalid(format!("t entry {tj} outside [1, {n}]")));
    }
    Ok(())
}

/// `LP(t_1..t_s)` with averaging threshold `threshold`.
pub fn generate_lp_with(
    s: u32,
    n: usize,
    t: &[usize],
    threshold: &Rational,
    rows: RowSet,
) -> Result<LpProblem> {
    check_params(s, n, t)?;
    let layout = Layout::new(t);
    let inv_s = Rational::new(1, s as i64);
    let mut constraints = Vec::new();
    for (j, &tj) in t.iter().enumerate() {
        for i in 0..tj.saturating_sub(1) {
            constraints.push(Constraint::new(
                [
                    (layout.var(i + 1, j), Rational::one()),
                    (layout.var(i, j), -Rational::one()),
                ],
                Rational::zero(),
            ));
        }
    }
    for_each_index_tuple(t, 2 * n, rows == RowSet::Minimal, |idx| {
        let terms = idx.iter().enumerate().map(|(j, &i)| (layout.var(i, j), inv_s.clone()));
        constraints.push(Constraint::new(terms, threshold.clone()));
    });
    let weight = Rational::new(1, (n * s as usize) as i64);
    let label = format!(
        "LP(s={s}, n={n}, t=({}))",
        t.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
    );
    LpProblem::new(
        vec![weight; layout.num_vars],
        constraints,
        vec![Bound::unit(); layout.num_vars],
        label,
    )
}

/// The literal `LP(t_1..t_s)` at threshold `d_s`.
pub fn generate_lp(s: u32, n: usize, t: &[usize]) -> Result<LpProblem> {
    generate_lp_with(s, n, t, &threshold_d(s)?, RowSet::Literal)
}

/// Non-decreasing tuples in `[1, n]^s`: one per multiset.
pub fn canonical_t_tuples(s: u32, n: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, cur: &mut Vec<usize>, left: usize, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for v in start..=n {
            cur.push(v);
            rec(v, n, cur, left - 1, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, n, &mut Vec::new(), s as usize, &mut out);
    out
}

/// Checks `x` against every literal averaging row without materializing them.
pub fn satisfies_all_averaging_rows(
    s: u32,
    n: usize,
    t: &[usize],
    threshold: &Rational,
    x: &[Rational],
) -> bool {
    let layout = Layout::new(t);
    let cap = threshold * &Rational::from_integer(s as i64);
    let mut ok = true;
    for_each_index_tuple(t, 2 * n, false, |idx| {
        if !ok {
            return;
        }
        let mut sum = Rational::zero();
        for (j, &i) in idx.iter().enumerate() {
            sum += &x[layout.var(i, j)];
        }
        if sum > cap {
            ok = false;
        }
    });
    ok
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaseCase {
    pub t: Vec<usize>,
    pub status: LpStatus,
    pub value: Option<Rational>,
    pub num_vars: usize,
    pub num_rows: usize,
    pub certificate_verified: bool,
    /// The optimum also satisfies every literal row (sum of indices `> 2n`).
    pub literal_rows_satisfied: bool,
    pub certificate_digest: Option<String>,
    pub pivots: u64,
    pub max_bits: u64,
    pub wall_ms: f64,
}

impl BaseCase {
    pub fn bounded_by(&self, d: &Rational) -> bool {
        self.status == LpStatus::Optimal && self.value.as_ref().is_some_and(|v| v <= d)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaseCaseReport {
    pub s: u32,
    pub n: usize,
    pub threshold: Rational,
    pub case_count: usize,
    pub cases: Vec<BaseCase>,
    /// Every optimum is `<= threshold`.
    pub all_bounded: bool,
    /// Every certificate and literal-row check passed.
    pub all_certified: bool,
    /// Largest optimum and the first tuple attaining it.
    pub max_value: Option<Rational>,
    pub argmax: Option<Vec<usize>>,
    pub violations: Vec<(Vec<usize>, Rational)>,
}

fn solve_case(s: u32, n: usize, t: &[usize], d: &Rational) -> Result<(BaseCase, LpSolution)> {
    let start = Instant::now();
    let lp = generate_lp_with(s, n, t, d, RowSet::Minimal)?;
    let sol = simplex_solve(&lp);
    let certificate_verified = sol.is_optimal() && verify_certificate(&lp, &sol)?;
    let literal_rows_satisfied =
        sol.is_optimal() && satisfies_all_averaging_rows(s, n, t, d, &sol.primal);
    let case = BaseCase {
        t: t.to_vec(),
        status: sol.status,
        value: sol.value.clone(),
        num_vars: lp.num_vars(),
        num_rows: lp.constraints().len(),
        certificate_verified,
        literal_rows_satisfied,
        certificate_digest: sol.certificate.as_ref().map(|c| c.digest()),
        pivots: sol.telemetry.pivots,
        max_bits: sol.telemetry.max_bits,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    Ok((case, sol))
}

/// Solves every canonical `LP(t)` for `(s, n)` at threshold `d_s`.
pub fn verify_base_case(s: u32, n: usize) -> Result<BaseCaseReport> {
    let d = threshold_d(s)?;
    if n < 1 {
        return Err(invalid("n must be positive"));
    }
    let tuples = canonical_t_tuples(s, n);
    let cases: Vec<BaseCase> = tuples
        .par_iter()
        .map(|t| solve_case(s, n, t, &d).map(|(c, _)| c))
        .collect::<Result<_>>()?;
    let mut max_value: Option<Rational> = None;
    let mut argmax = None;
    for c in &cases {
        if let Some(v) = &c.value {
            if max_value.as_ref().map_or(true, |m| v > m) {
                max_value = Some(v.clone());
                argmax = Some(c.t.clone());
            }
        }
    }
    let violations = cases
        .iter()
        .filter(|c| !c.bounded_by(&d))
        .map(|c| (c.t.clone(), c.value.clone().unwrap_or_else(Rational::zero)))
        .collect::<Vec<_>>();
    Ok(BaseCaseReport {
        s,
        n,
        case_count: cases.len(),
        all_bounded: violations.is_empty(),
        all_certified: cases
            .iter()
            .all(|c| c.certificate_verified && c.literal_rows_satisfied),
        threshold: d,
        max_value,
        argmax,
        violations,
        cases,
    })
}

/// The `(s, n)` pairs whose LPs settle the lemma's base cases.
pub const BASE_CASES: [(u32, usize); 7] =
    [(5, 5), (6, 3), (7, 3), (8, 3), (9, 3), (10, 3), (11, 3)];
