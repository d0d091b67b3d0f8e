//! Bounded-variable primal simplex over exact rationals.
//!
//! The dictionary keeps one row per basic variable and one column per
//! nonbasic variable:
//!
//! ```text
//! x_basis[i] = beta[i] + sum_k t[i][k] * (x_nonbasic[k] - value[k])
//! z          = z       + sum_k d[k]    * (x_nonbasic[k] - value[k])
//! ```
//!
//! Variable ids are `0..n` for structurals, `n..n+m` for row slacks
//! (`s_r = b_r - A_r x >= 0`) and `n+m` for the phase-one artificial.
//! Entering and leaving choices follow Bland's rule on variable ids.

use serde::{Deserialize, Serialize};

use super::certificate::LpCertificate;
use super::problem::LpProblem;
use super::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Telemetry {
    /// Basis exchanges, including the phase-one entry of the artificial.
    pub pivots: u64,
    pub bound_flips: u64,
    /// Largest numerator or denominator bit length written to the dictionary.
    pub max_bits: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LpSolution {
    pub status: LpStatus,
    pub value: Option<Rational>,
    /// Empty unless optimal.
    pub primal: Vec<Rational>,
    pub certificate: Option<LpCertificate>,
    pub telemetry: Telemetry,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    fn terminal(status: LpStatus, telemetry: Telemetry) -> Self {
        LpSolution { status, value: None, primal: vec![], certificate: None, telemetry }
    }
}

enum Leave {
    Flip,
    Row { row: usize, to_upper: bool },
}

struct Dictionary {
    n: usize,
    lo: Vec<Rational>,
    hi: Vec<Option<Rational>>,
    basis: Vec<usize>,
    beta: Vec<Rational>,
    nonbasic: Vec<usize>,
    at_upper: Vec<bool>,
    value: Vec<Rational>,
    t: Vec<Vec<Rational>>,
    d: Vec<Rational>,
    z: Rational,
    telemetry: Telemetry,
}

struct Unbounded;

impl Dictionary {
    fn new(p: &LpProblem) -> Self {
        let n = p.num_vars();
        let m = p.constraints().len();
        let mut lo: Vec<Rational> = p.bounds().iter().map(|b| b.lo.clone()).collect();
        let mut hi: Vec<Option<Rational>> = p.bounds().iter().map(|b| b.hi.clone()).collect();
        lo.extend(std::iter::repeat(Rational::zero()).take(m + 1));
        hi.extend(std::iter::repeat(None).take(m + 1));

        let mut t = vec![vec![Rational::zero(); n]; m];
        let mut beta = Vec::with_capacity(m);
        for (r, row) in p.constraints().iter().enumerate() {
            let mut b = row.rhs.clone();
            for (j, a) in &row.terms {
                t[r][*j] = -a;
                b -= &(a * &lo[*j]);
            }
            beta.push(b);
        }
        let value = lo[..n].to_vec();
        Dictionary {
            n,
            basis: (n..n + m).collect(),
            beta,
            nonbasic: (0..n).collect(),
            at_upper: vec![false; n],
            value,
            t,
            d: vec![Rational::zero(); n],
            z: Rational::zero(),
            lo,
            hi,
            telemetry: Telemetry::default(),
        }
    }

    fn m(&self) -> usize {
        self.basis.len()
    }

    fn artificial(&self) -> usize {
        self.n + self.m()
    }

    fn note_bits(&mut self, r: &Rational) {
        let b = r.bits();
        if b > self.telemetry.max_bits {
            self.telemetry.max_bits = b;
        }
    }

    /// Smallest-id nonbasic variable that improves `z`, with its direction.
    fn entering(&self) -> Option<(usize, bool)> {
        let mut best: Option<(usize, usize, bool)> = None;
        for (k, &v) in self.nonbasic.iter().enumerate() {
            let d = &self.d[k];
            let increase = if d.is_positive() && !self.at_upper[k] {
                match &self.hi[v] {
                    Some(h) => *h > self.lo[v],
                    None => true,
                }
            } else {
                false
            };
            let decrease = d.is_negative() && self.at_upper[k];
            if (increase || decrease) && best.map_or(true, |(_, bv, _)| v < bv) {
                best = Some((k, v, increase));
            }
        }
        best.map(|(k, _, up)| (k, up))
    }

    fn ratio_test(&self, k: usize, up: bool) -> Option<(Rational, Leave)> {
        let v = self.nonbasic[k];
        let mut best: Option<(Rational, Leave, usize)> = self.hi[v]
            .as_ref()
            .map(|h| (h - &self.lo[v], Leave::Flip, usize::MAX));
        for i in 0..self.m() {
            let a = &self.t[i][k];
            if a.is_zero() {
                continue;
            }
            let g = if up { a.clone() } else { -a };
            let b = self.basis[i];
            let (limit, to_upper) = if g.is_negative() {
                ((&self.beta[i] - &self.lo[b]) / (-&g), false)
            } else if let Some(h) = &self.hi[b] {
                ((h - &self.beta[i]) / &g, true)
            } else {
                continue;
            };
            let better = match &best {
                None => true,
                Some((theta, leave, bid)) => {
                    limit < *theta
                        || (limit == *theta && !matches!(leave, Leave::Flip) && b < *bid)
                }
            };
            if better {
                best = Some((limit, Leave::Row { row: i, to_upper }, b));
            }
        }
        best.map(|(theta, leave, _)| (theta, leave))
    }

    /// Moves nonbasic column `k` by `delta`, updating basic values and `z`.
    fn shift(&mut self, k: usize, delta: &Rational) {
        if delta.is_zero() {
            return;
        }
        for i in 0..self.m() {
            if !self.t[i][k].is_zero() {
                let step = &self.t[i][k] * delta;
                self.beta[i] += &step;
            }
        }
        let dz = &self.d[k] * delta;
        self.z += &dz;
        self.value[k] += delta;
    }

    /// Exchanges `basis[r]` with `nonbasic[k]`; values must already be consistent.
    fn pivot(&mut self, r: usize, k: usize, leaving_to_upper: bool) {
        self.telemetry.pivots += 1;
        let inv = self.t[r][k].recip();
        let cols = self.nonbasic.len();
        let mut row = std::mem::take(&mut self.t[r]);
        for (j, e) in row.iter_mut().enumerate() {
            if j == k {
                *e = inv.clone();
            } else if !e.is_zero() {
                *e = -(&*e * &inv);
            }
        }
        for e in &row {
            self.note_bits(e);
        }
        let support: Vec<usize> = (0..cols).filter(|&j| j != k && !row[j].is_zero()).collect();
        let mut max_bits = 0;
        for i in 0..self.m() {
            if i == r {
                continue;
            }
            let f = self.t[i][k].clone();
            if f.is_zero() {
                continue;
            }
            let ti = &mut self.t[i];
            for &j in &support {
                ti[j].add_mul(&f, &row[j]);
                max_bits = max_bits.max(ti[j].bits());
            }
            ti[k] = &f * &inv;
            max_bits = max_bits.max(ti[k].bits());
        }
        let f = self.d[k].clone();
        if !f.is_zero() {
            for &j in &support {
                self.d[j].add_mul(&f, &row[j]);
                max_bits = max_bits.max(self.d[j].bits());
            }
            self.d[k] = &f * &inv;
        }
        self.telemetry.max_bits = self.telemetry.max_bits.max(max_bits);
        self.t[r] = row;

        let entering = self.nonbasic[k];
        let leaving = self.basis[r];
        let entering_value = std::mem::replace(
            &mut self.value[k],
            if leaving_to_upper {
                self.hi[leaving].clone().expect("finite upper bound")
            } else {
                self.lo[leaving].clone()
            },
        );
        self.beta[r] = entering_value;
        self.basis[r] = entering;
        self.nonbasic[k] = leaving;
        self.at_upper[k] = leaving_to_upper;
    }

    fn run(&mut self) -> Result<(), Unbounded> {
        while let Some((k, up)) = self.entering() {
            let Some((theta, leave)) = self.ratio_test(k, up) else {
                return Err(Unbounded);
            };
            let delta = if up { theta } else { -theta };
            self.shift(k, &delta);
            match leave {
                Leave::Flip => {
                    self.telemetry.bound_flips += 1;
                    self.at_upper[k] = up;
                    let v = self.nonbasic[k];
                    self.value[k] = if up {
                        self.hi[v].clone().expect("finite upper bound")
                    } else {
                        self.lo[v].clone()
                    };
                }
                Leave::Row { row, to_upper } => self.pivot(row, k, to_upper),
            }
        }
        Ok(())
    }

    fn cost(&self, p: &LpProblem, v: usize) -> Rational {
        if v < self.n {
            p.objective()[v].clone()
        } else {
            Rational::zero()
        }
    }

    fn install_objective(&mut self, p: &LpProblem) {
        let costs: Vec<Rational> = self.basis.iter().map(|&b| self.cost(p, b)).collect();
        let mut d = Vec::with_capacity(self.nonbasic.len());
        for (k, &v) in self.nonbasic.iter().enumerate() {
            let mut acc = self.cost(p, v);
            for (i, c) in costs.iter().enumerate() {
                if !c.is_zero() {
                    acc.add_mul(c, &self.t[i][k]);
                }
            }
            d.push(acc);
        }
        self.d = d;
        let mut z = Rational::zero();
        for (k, &v) in self.nonbasic.iter().enumerate() {
            z.add_mul(&self.cost(p, v), &self.value[k]);
        }
        for (i, c) in costs.iter().enumerate() {
            z.add_mul(c, &self.beta[i]);
        }
        self.z = z;
    }

    /// Drives slacks to feasibility with a single artificial column.
    /// Returns `false` when the problem is infeasible.
    fn phase_one(&mut self) -> bool {
        let Some(r) = (0..self.m())
            .filter(|&i| self.beta[i].is_negative())
            .min_by(|&a, &b| self.beta[a].cmp(&self.beta[b]).then(a.cmp(&b)))
        else {
            return true;
        };
        let art = self.artificial();
        for row in &mut self.t {
            row.push(Rational::one());
        }
        self.nonbasic.push(art);
        self.at_upper.push(false);
        self.value.push(Rational::zero());
        self.d = vec![Rational::zero(); self.nonbasic.len()];
        let ka = self.nonbasic.len() - 1;
        self.d[ka] = -Rational::one();
        self.z = Rational::zero();

        let theta = -&self.beta[r];
        self.shift(ka, &theta);
        self.pivot(r, ka, false);
        if self.run().is_err() {
            unreachable!("phase one objective is bounded above by zero");
        }
        if self.z.is_negative() {
            return false;
        }

        if let Some(r) = self.basis.iter().position(|&b| b == art) {
            let k = (0..self.nonbasic.len())
                .filter(|&k| !self.t[r][k].is_zero())
                .min_by_key(|&k| self.nonbasic[k])
                .expect("constraint matrix with slack identity has full row rank");
            self.pivot(r, k, false);
        }
        let ka = self.nonbasic.iter().position(|&v| v == art).expect("artificial is nonbasic");
        for row in &mut self.t {
            row.remove(ka);
        }
        self.nonbasic.remove(ka);
        self.at_upper.remove(ka);
        self.value.remove(ka);
        self.d.remove(ka);
        true
    }

    fn primal(&self) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.n];
        for (k, &v) in self.nonbasic.iter().enumerate() {
            if v < self.n {
                x[v] = self.value[k].clone();
            }
        }
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.n {
                x[b] = self.beta[i].clone();
            }
        }
        x
    }

    fn certificate(&self) -> LpCertificate {
        let mut rows = Vec::new();
        let mut upper = Vec::new();
        let mut lower = Vec::new();
        for (k, &v) in self.nonbasic.iter().enumerate() {
            let d = &self.d[k];
            if d.is_zero() {
                continue;
            }
            if v >= self.n {
                rows.push((v - self.n, -d));
            } else if d.is_positive() {
                upper.push((v, d.clone()));
            } else {
                lower.push((v, -d));
            }
        }
        rows.sort_by_key(|(i, _)| *i);
        upper.sort_by_key(|(i, _)| *i);
        lower.sort_by_key(|(i, _)| *i);
        LpCertificate {
            row_duals: rows,
            upper_duals: upper,
            lower_duals: lower,
            claimed_value: self.z.clone(),
        }
    }
}

pub fn simplex_solve(problem: &LpProblem) -> LpSolution {
    let mut dict = Dictionary::new(problem);
    if !dict.phase_one() {
        return LpSolution::terminal(LpStatus::Infeasible, dict.telemetry);
    }
    dict.install_objective(problem);
    if dict.run().is_err() {
        return LpSolution::terminal(LpStatus::Unbounded, dict.telemetry);
    }
    let primal = dict.primal();
    debug_assert_eq!(problem.objective_value(&primal), dict.z);
    LpSolution {
        status: LpStatus::Optimal,
        value: Some(dict.z.clone()),
        primal,
        certificate: Some(dict.certificate()),
        telemetry: dict.telemetry,
    }
}
