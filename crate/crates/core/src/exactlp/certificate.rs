//! Dual certificates and their independent verification.
//!
//! A certificate `(y, u, l)` proves `max c.x <= v` over
//! `{A x <= b, lo <= x <= hi}` whenever `y, u, l >= 0`, `u` vanishes on
//! variables without an upper bound, `A^T y + u - l = c`, and
//! `b.y + hi.u - lo.l = v`. The verifier re-derives all of this from the
//! problem data alone.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::problem::LpProblem;
use super::simplex::{LpSolution, LpStatus};
use super::Rational;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LpCertificate {
    /// Sparse `(row, y_row)`.
    pub row_duals: Vec<(usize, Rational)>,
    /// Sparse `(var, u_var)` for active upper bounds.
    pub upper_duals: Vec<(usize, Rational)>,
    /// Sparse `(var, l_var)` for active lower bounds.
    pub lower_duals: Vec<(usize, Rational)>,
    pub claimed_value: Rational,
}

impl LpCertificate {
    /// Hex SHA-256 of the canonical JSON encoding.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("certificate serializes");
        hex::encode(Sha256::digest(bytes))
    }
}

fn scatter(entries: &[(usize, Rational)], len: usize) -> Option<Vec<Rational>> {
    let mut out = vec![Rational::zero(); len];
    let mut seen = vec![false; len];
    for (i, v) in entries {
        if *i >= len || seen[*i] || v.is_negative() {
            return None;
        }
        seen[*i] = true;
        out[*i] = v.clone();
    }
    Some(out)
}

/// `Ok(true)` iff the solution's primal point and certificate jointly prove optimality.
pub fn verify_certificate(problem: &LpProblem, solution: &LpSolution) -> Result<bool> {
    if solution.status != LpStatus::Optimal {
        return Err(Error::NotOptimal);
    }
    let (Some(value), Some(cert)) = (&solution.value, &solution.certificate) else {
        return Ok(false);
    };
    let n = problem.num_vars();
    let x = &solution.primal;
    if !problem.is_feasible(x) || problem.objective_value(x) != *value {
        return Ok(false);
    }
    if cert.claimed_value != *value {
        return Ok(false);
    }
    let (Some(y), Some(u), Some(l)) = (
        scatter(&cert.row_duals, problem.constraints().len()),
        scatter(&cert.upper_duals, n),
        scatter(&cert.lower_duals, n),
    ) else {
        return Ok(false);
    };

    let mut reduced: Vec<Rational> = (0..n).map(|j| &u[j] - &l[j]).collect();
    let mut dual_obj = Rational::zero();
    for (row, yr) in problem.constraints().iter().zip(&y) {
        if yr.is_zero() {
            continue;
        }
        for (j, a) in &row.terms {
            reduced[*j].add_mul(a, yr);
        }
        dual_obj.add_mul(&row.rhs, yr);
    }
    for (j, b) in problem.bounds().iter().enumerate() {
        if !u[j].is_zero() {
            match &b.hi {
                Some(h) => dual_obj.add_mul(&u[j], h),
                None => return Ok(false),
            }
        }
        if !l[j].is_zero() {
            dual_obj -= &(&l[j] * &b.lo);
        }
    }
    if reduced.as_slice() != problem.objective() {
        return Ok(false);
    }
    Ok(dual_obj == *value)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tamper {
    ValueShift,
    ClaimedValueShift,
    PrimalObjectiveShift,
    PrimalOutOfBounds,
    RowDualShift,
    RowDualNegated,
    UpperDualShift,
    LowerDualShift,
    DuplicateDual,
    OutOfRangeDual,
}

/// Corrupted copies of an optimal solution, each provably not a valid proof:
/// every mutation breaks feasibility, the objective identity, dual
/// feasibility, or the duality equation.
pub fn tampered_solutions(problem: &LpProblem, solution: &LpSolution) -> Vec<(Tamper, LpSolution)> {
    let mut out = Vec::new();
    let (Some(value), Some(cert)) = (&solution.value, &solution.certificate) else {
        return out;
    };
    let delta = Rational::new(1, 7);
    let mut push = |kind: Tamper, edit: &dyn Fn(&mut LpSolution)| {
        let mut bad = solution.clone();
        edit(&mut bad);
        out.push((kind, bad));
    };
    push(Tamper::ValueShift, &|b| b.value = Some(value + &delta));
    push(Tamper::ClaimedValueShift, &|b| {
        b.certificate.as_mut().unwrap().claimed_value = &cert.claimed_value - &delta
    });
    if let Some(j) = problem.objective().iter().position(|c| !c.is_zero()) {
        push(Tamper::PrimalObjectiveShift, &|b| b.primal[j] += &delta);
    }
    if problem.num_vars() > 0 {
        let lo = problem.bounds()[0].lo.clone();
        push(Tamper::PrimalOutOfBounds, &|b| b.primal[0] = &lo - &Rational::one());
    }
    let rows = problem.constraints();
    if let Some(r) = rows.iter().position(|row| !row.terms.is_empty()) {
        push(Tamper::RowDualShift, &|b| {
            let c = b.certificate.as_mut().unwrap();
            match c.row_duals.iter_mut().find(|(i, _)| *i == r) {
                Some((_, y)) => *y += &delta,
                None => c.row_duals.push((r, delta.clone())),
            }
        });
    }
    if let Some(k) = cert.row_duals.iter().position(|(_, y)| y.is_positive()) {
        push(Tamper::RowDualNegated, &|b| {
            let y = &mut b.certificate.as_mut().unwrap().row_duals[k].1;
            *y = -y.clone();
        });
    }
    let j = (0..problem.num_vars()).find(|&j| problem.bounds()[j].hi.is_some());
    if let Some(j) = j {
        push(Tamper::UpperDualShift, &|b| {
            let c = b.certificate.as_mut().unwrap();
            match c.upper_duals.iter_mut().find(|(i, _)| *i == j) {
                Some((_, u)) => *u += &delta,
                None => c.upper_duals.push((j, delta.clone())),
            }
        });
    }
    if problem.num_vars() > 0 {
        push(Tamper::LowerDualShift, &|b| {
            let c = b.certificate.as_mut().unwrap();
            match c.lower_duals.iter_mut().find(|(i, _)| *i == 0) {
                Some((_, l)) => *l += &delta,
                None => c.lower_duals.push((0, delta.clone())),
            }
        });
    }
    if let Some(first) = cert.row_duals.first().cloned() {
        push(Tamper::DuplicateDual, &|b| b.certificate.as_mut().unwrap().row_duals.push(first.clone()));
    }
    push(Tamper::OutOfRangeDual, &|b| {
        b.certificate.as_mut().unwrap().row_duals.push((rows.len(), Rational::one()))
    });
    out
}
