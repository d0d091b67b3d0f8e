//! Brute-force LP oracle: enumerate every basic point of a small problem.
//!
//! Shares nothing with the simplex beyond the problem type and rational
//! scalars. Lower bounds are finite, so a nonempty feasible region is pointed
//! and has a vertex; boundedness is decided by a second enumeration over the
//! normalized recession cone.

use serde::{Deserialize, Serialize};

use super::problem::LpProblem;
use super::Rational;
use crate::error::{Error, Result};

pub const MAX_VERTEX_VARS: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum VertexOutcome {
    Optimal { value: Rational, point: Vec<Rational> },
    Infeasible,
    Unbounded,
}

impl VertexOutcome {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            VertexOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

/// Halfspace `a . x <= b` in dense form.
type Half = (Vec<Rational>, Rational);

/// Solves the square system `rows` (as equalities), or `None` if singular.
fn solve_square(rows: &[&Half]) -> Option<Vec<Rational>> {
    let n = rows.len();
    let mut m: Vec<Vec<Rational>> = rows
        .iter()
        .map(|(a, b)| {
            let mut r = a.clone();
            r.push(b.clone());
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let inv = m[col][col].recip();
        for e in m[col].iter_mut().skip(col) {
            *e = &*e * &inv;
        }
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone();
            for c in col..=n {
                let delta = &f * &m[col][c];
                m[r][c] -= &delta;
            }
        }
    }
    Some(m.into_iter().map(|mut r| r.pop().expect("augmented column")).collect())
}

fn dot(a: &[Rational], x: &[Rational]) -> Rational {
    a.iter().zip(x).map(|(p, q)| p * q).sum()
}

/// Best objective over vertices of `{x : a.x <= b for all halves}`, scanning
/// `n`-subsets in lexicographic order.
fn best_vertex(halves: &[Half], c: &[Rational], n: usize) -> Option<(Rational, Vec<Rational>)> {
    if n == 0 {
        let feasible = halves.iter().all(|(_, b)| !b.is_negative());
        return feasible.then(|| (Rational::zero(), vec![]));
    }
    let h = halves.len();
    if h < n {
        return None;
    }
    let mut best: Option<(Rational, Vec<Rational>)> = None;
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        let chosen: Vec<&Half> = idx.iter().map(|&i| &halves[i]).collect();
        if let Some(x) = solve_square(&chosen) {
            if halves.iter().all(|(a, b)| dot(a, &x) <= *b) {
                let v = dot(c, &x);
                if best.as_ref().map_or(true, |(bv, _)| v > *bv) {
                    best = Some((v, x));
                }
            }
        }
        let Some(pos) = (0..n).rev().find(|&p| idx[p] < h - n + p) else {
            return best;
        };
        idx[pos] += 1;
        for q in pos + 1..n {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

pub fn vertex_enumerate(problem: &LpProblem) -> Result<VertexOutcome> {
    let n = problem.num_vars();
    if n > MAX_VERTEX_VARS {
        return Err(Error::TooManyVariables(n));
    }
    let unit = |j: usize, s: i64| -> Vec<Rational> {
        (0..n).map(|k| Rational::from_integer(if k == j { s } else { 0 })).collect()
    };
    let dense_rows: Vec<Vec<Rational>> = problem
        .constraints()
        .iter()
        .map(|c| {
            let mut a = vec![Rational::zero(); n];
            for (j, v) in &c.terms {
                a[*j] = v.clone();
            }
            a
        })
        .collect();

    let mut halves: Vec<Half> = dense_rows
        .iter()
        .zip(problem.constraints())
        .map(|(a, c)| (a.clone(), c.rhs.clone()))
        .collect();
    for (j, b) in problem.bounds().iter().enumerate() {
        halves.push((unit(j, -1), -&b.lo));
        if let Some(h) = &b.hi {
            halves.push((unit(j, 1), h.clone()));
        }
    }
    let Some((value, point)) = best_vertex(&halves, problem.objective(), n) else {
        return Ok(VertexOutcome::Infeasible);
    };

    // Recession directions r: A r <= 0, r >= 0, r_j = 0 where hi_j is finite,
    // normalized by sum r <= 1. Any r with c.r > 0 makes the problem unbounded.
    let mut cone: Vec<Half> = dense_rows.iter().map(|a| (a.clone(), Rational::zero())).collect();
    for (j, b) in problem.bounds().iter().enumerate() {
        cone.push((unit(j, -1), Rational::zero()));
        if b.hi.is_some() {
            cone.push((unit(j, 1), Rational::zero()));
        }
    }
    cone.push((vec![Rational::one(); n], Rational::one()));
    let (ray_value, _) = best_vertex(&cone, problem.objective(), n).expect("0 is a cone vertex");
    if ray_value.is_positive() {
        return Ok(VertexOutcome::Unbounded);
    }
    Ok(VertexOutcome::Optimal { value, point })
}
