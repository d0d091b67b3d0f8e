use serde::{Deserialize, Serialize};

use super::Rational;
use crate::error::{Error, Result};

/// Sparse row `sum terms[k].1 * x[terms[k].0] <= rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraint {
    pub terms: Vec<(usize, Rational)>,
    pub rhs: Rational,
}

impl Constraint {
    /// Builds a row, merging repeated indices and dropping zero coefficients.
    pub fn new(terms: impl IntoIterator<Item = (usize, Rational)>, rhs: Rational) -> Self {
        let mut terms: Vec<(usize, Rational)> = terms.into_iter().collect();
        terms.sort_by_key(|(j, _)| *j);
        let mut merged: Vec<(usize, Rational)> = Vec::with_capacity(terms.len());
        for (j, a) in terms {
            match merged.last_mut() {
                Some((k, b)) if *k == j => *b += &a,
                _ => merged.push((j, a)),
            }
        }
        merged.retain(|(_, a)| !a.is_zero());
        Constraint { terms: merged, rhs }
    }

    pub fn dense(coeffs: &[Rational], rhs: Rational) -> Self {
        Self::new(coeffs.iter().cloned().enumerate(), rhs)
    }

    pub fn lhs(&self, x: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (j, a) in &self.terms {
            acc.add_mul(a, &x[*j]);
        }
        acc
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bound {
    pub lo: Rational,
    /// `None` means unbounded above.
    pub hi: Option<Rational>,
}

impl Bound {
    pub fn new(lo: Rational, hi: Option<Rational>) -> Self {
        Bound { lo, hi }
    }

    pub fn unit() -> Self {
        Bound { lo: Rational::zero(), hi: Some(Rational::one()) }
    }

    pub fn nonnegative() -> Self {
        Bound { lo: Rational::zero(), hi: None }
    }

    pub fn contains(&self, v: &Rational) -> bool {
        *v >= self.lo && self.hi.as_ref().map_or(true, |h| v <= h)
    }
}

/// `maximize objective . x` subject to `constraints` and `lo <= x <= hi`.
///
/// Lower bounds are always finite. Validated on construction and on
/// deserialization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawLpProblem")]
pub struct LpProblem {
    num_vars: usize,
    objective: Vec<Rational>,
    constraints: Vec<Constraint>,
    bounds: Vec<Bound>,
    #[serde(default)]
    label: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLpProblem {
    num_vars: usize,
    objective: Vec<Rational>,
    constraints: Vec<Constraint>,
    bounds: Vec<Bound>,
    #[serde(default)]
    label: String,
}

impl TryFrom<RawLpProblem> for LpProblem {
    type Error = Error;
    fn try_from(raw: RawLpProblem) -> Result<Self> {
        if raw.objective.len() != raw.num_vars {
            return Err(Error::MalformedLp(format!(
                "objective has {} entries for {} variables",
                raw.objective.len(),
                raw.num_vars
            )));
        }
        let constraints = raw
            .constraints
            .into_iter()
            .map(|c| {
                let mut seen: Vec<usize> = c.terms.iter().map(|(j, _)| *j).collect();
                seen.sort_unstable();
                if seen.windows(2).any(|w| w[0] == w[1]) {
                    return Err(Error::MalformedLp("repeated variable index in a row".into()));
                }
                Ok(Constraint::new(c.terms, c.rhs))
            })
            .collect::<Result<Vec<_>>>()?;
        LpProblem::new(raw.objective, constraints, raw.bounds, raw.label)
    }
}

impl LpProblem {
    pub fn new(
        objective: Vec<Rational>,
        constraints: Vec<Constraint>,
        bounds: Vec<Bound>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let num_vars = objective.len();
        if bounds.len() != num_vars {
            return Err(Error::MalformedLp(format!(
                "{} bounds for {num_vars} variables",
                bounds.len()
            )));
        }
        for (k, c) in constraints.iter().enumerate() {
            if let Some((j, _)) = c.terms.iter().find(|(j, _)| *j >= num_vars) {
                return Err(Error::MalformedLp(format!("row {k} references variable {j}")));
            }
        }
        for (j, b) in bounds.iter().enumerate() {
            if let Some(hi) = &b.hi {
                if *hi < b.lo {
                    return Err(Error::MalformedLp(format!("variable {j}: lo > hi")));
                }
            }
        }
        Ok(LpProblem { num_vars, objective, constraints, bounds, label: label.into() })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn objective(&self) -> &[Rational] {
        &self.objective
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn bounds(&self) -> &[Bound] {
        &self.bounds
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// The same problem with one more row.
    pub fn with_constraint(&self, row: Constraint) -> Result<Self> {
        let mut rows = self.constraints.clone();
        rows.push(row);
        LpProblem::new(self.objective.clone(), rows, self.bounds.clone(), self.label.clone())
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (c, v) in self.objective.iter().zip(x) {
            acc.add_mul(c, v);
        }
        acc
    }

    /// Index of the first violated row or bound, if any.
    pub fn first_violation(&self, x: &[Rational]) -> Option<Violation> {
        if x.len() != self.num_vars {
            return Some(Violation::Length);
        }
        if let Some(j) = (0..self.num_vars).find(|&j| !self.bounds[j].contains(&x[j])) {
            return Some(Violation::Bound(j));
        }
        self.constraints
            .iter()
            .position(|c| c.lhs(x) > c.rhs)
            .map(Violation::Row)
    }

    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        self.first_violation(x).is_none()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Violation {
    Length,
    Bound(usize),
    Row(usize),
}
