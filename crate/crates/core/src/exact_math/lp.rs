//! Two-phase tableau simplex over exact rationals, pivoting by Bland's rule.
//!
//! Problems are stated as `maximize c·x` subject to linear rows and `x >= 0`.

use num_traits::{One, Signed, Zero};

use super::point::RatPoint;
use super::rat::Rat;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl Relation {
    fn flipped(self) -> Self {
        match self {
            Relation::Le => Relation::Ge,
            Relation::Ge => Relation::Le,
            Relation::Eq => Relation::Eq,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<Rat>,
    pub relation: Relation,
    pub rhs: Rat,
}

impl Constraint {
    pub fn new(coeffs: Vec<Rat>, relation: Relation, rhs: Rat) -> Self {
        Constraint { coeffs, relation, rhs }
    }

    pub fn is_satisfied(&self, x: &[Rat]) -> bool {
        let lhs: Rat = self.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Ge => lhs >= self.rhs,
            Relation::Eq => lhs == self.rhs,
        }
    }
}

/// Result of an exact LP solve. A solution exists exactly in the `Optimal` case.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rat, solution: Vec<Rat> },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn solution(&self) -> Option<&[Rat]> {
        match self {
            LpOutcome::Optimal { solution, .. } => Some(solution),
            _ => None,
        }
    }

    pub fn value(&self) -> Option<&Rat> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LinearProgram {
    num_vars: usize,
    objective: Vec<Rat>,
    constraints: Vec<Constraint>,
}

impl LinearProgram {
    /// A feasibility problem over `num_vars` nonnegative variables (zero objective).
    pub fn new(num_vars: usize) -> Self {
        LinearProgram { num_vars, objective: vec![Rat::zero(); num_vars], constraints: Vec::new() }
    }

    pub fn maximize(mut self, objective: Vec<Rat>) -> Self {
        self.objective = objective;
        self
    }

    pub fn constrain(&mut self, coeffs: Vec<Rat>, relation: Relation, rhs: Rat) -> &mut Self {
        self.constraints.push(Constraint { coeffs, relation, rhs });
        self
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn solve(&self) -> Result<LpOutcome> {
        if self.objective.len() != self.num_vars {
            return Err(Error::DimensionMismatch { expected: self.num_vars, found: self.objective.len() });
        }
        for c in &self.constraints {
            if c.coeffs.len() != self.num_vars {
                return Err(Error::DimensionMismatch { expected: self.num_vars, found: c.coeffs.len() });
            }
        }
        Tableau::build(self).run(&self.objective)
    }
}

/// `maximize objective·x` subject to `constraints` and `x >= 0`.
pub fn lp_max(objective: Vec<Rat>, constraints: Vec<Constraint>) -> Result<LpOutcome> {
    let lp = LinearProgram { num_vars: objective.len(), objective, constraints };
    lp.solve()
}

/// Nonnegative coefficients `c` with `Σc = 1` and `Σ c_i g_i = p`, if `p` lies in `conv(generators)`.
pub fn in_convex_hull(p: &RatPoint, generators: &[RatPoint]) -> Result<Option<Vec<Rat>>> {
    if generators.is_empty() {
        return Err(Error::EmptyInput("convex hull of no generators"));
    }
    for g in generators {
        p.check_dim(g)?;
    }
    let mut lp = LinearProgram::new(generators.len());
    lp.constrain(vec![Rat::one(); generators.len()], Relation::Eq, Rat::one());
    for d in 0..p.dim() {
        lp.constrain(generators.iter().map(|g| g[d].clone()).collect(), Relation::Eq, p[d].clone());
    }
    Ok(match lp.solve()? {
        LpOutcome::Optimal { solution, .. } => Some(solution),
        LpOutcome::Infeasible => None,
        LpOutcome::Unbounded => unreachable!("zero objective cannot be unbounded"),
    })
}

struct Tableau {
    /// `rows[i]` holds the coefficients of every column followed by the right-hand side.
    rows: Vec<Vec<Rat>>,
    basis: Vec<usize>,
    num_vars: usize,
    first_artificial: usize,
    num_cols: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let normalized: Vec<(Vec<Rat>, Relation, Rat)> = lp
            .constraints
            .iter()
            .map(|c| {
                if c.rhs.is_negative() {
                    (c.coeffs.iter().map(|a| -a).collect(), c.relation.flipped(), -&c.rhs)
                } else {
                    (c.coeffs.clone(), c.relation, c.rhs.clone())
                }
            })
            .collect();
        let num_slack = normalized.iter().filter(|(_, r, _)| *r != Relation::Eq).count();
        let num_art = normalized.iter().filter(|(_, r, _)| *r != Relation::Le).count();
        let n = lp.num_vars;
        let first_artificial = n + num_slack;
        let num_cols = first_artificial + num_art;

        let mut rows = Vec::with_capacity(normalized.len());
        let mut basis = Vec::with_capacity(normalized.len());
        let (mut slack, mut art) = (n, first_artificial);
        for (coeffs, relation, rhs) in normalized {
            let mut row = coeffs;
            row.resize(num_cols + 1, Rat::zero());
            row[num_cols] = rhs;
            match relation {
                Relation::Le => {
                    row[slack] = Rat::one();
                    basis.push(slack);
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = -Rat::one();
                    slack += 1;
                    row[art] = Rat::one();
                    basis.push(art);
                    art += 1;
                }
                Relation::Eq => {
                    row[art] = Rat::one();
                    basis.push(art);
                    art += 1;
                }
            }
            rows.push(row);
        }
        Tableau { rows, basis, num_vars: n, first_artificial, num_cols }
    }

    fn run(mut self, objective: &[Rat]) -> Result<LpOutcome> {
        if self.first_artificial < self.num_cols {
            let mut cost = vec![Rat::zero(); self.num_cols];
            for c in &mut cost[self.first_artificial..] {
                *c = -Rat::one();
            }
            let bounded = self.optimize(&cost, self.num_cols);
            debug_assert!(bounded, "phase one is bounded above by zero");
            let infeasibility: Rat = self
                .basis
                .iter()
                .zip(&self.rows)
                .filter(|(&b, _)| b >= self.first_artificial)
                .map(|(_, row)| row[self.num_cols].clone())
                .sum();
            if infeasibility.is_positive() {
                return Ok(LpOutcome::Infeasible);
            }
            self.expel_artificials();
        }

        let mut cost = vec![Rat::zero(); self.num_cols];
        cost[..self.num_vars].clone_from_slice(objective);
        if !self.optimize(&cost, self.first_artificial) {
            return Ok(LpOutcome::Unbounded);
        }
        let mut solution = vec![Rat::zero(); self.num_vars];
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if b < self.num_vars {
                solution[b] = row[self.num_cols].clone();
            }
        }
        let value = objective.iter().zip(&solution).map(|(c, x)| c * x).sum();
        Ok(LpOutcome::Optimal { value, solution })
    }

    /// Maximizes `cost` using only columns below `col_limit`. Returns `false` if unbounded.
    fn optimize(&mut self, cost: &[Rat], col_limit: usize) -> bool {
        loop {
            // Bland: lowest-index improving column enters.
            let entering = (0..col_limit).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let mut reduced = cost[j].clone();
                for (row, &b) in self.rows.iter().zip(&self.basis) {
                    if !row[j].is_zero() && !cost[b].is_zero() {
                        reduced -= &cost[b] * &row[j];
                    }
                }
                reduced.is_positive()
            });
            let Some(col) = entering else {
                return true;
            };
            // Bland: among minimum ratios, the lowest-index basic variable leaves.
            let mut leaving: Option<(usize, Rat)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[col].is_positive() {
                    continue;
                }
                let ratio = &row[self.num_cols] / &row[col];
                let better = match &leaving {
                    None => true,
                    Some((li, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
            let Some((row, _)) = leaving else {
                return false;
            };
            self.pivot(row, col);
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = Rat::one() / &self.rows[r][c];
        for v in &mut self.rows[r] {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
        }
        self.basis[r] = c;
    }

    /// After a feasible phase one, pivots every zero-level artificial out of the
    /// basis, dropping rows that turn out to be redundant.
    fn expel_artificials(&mut self) {
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] < self.first_artificial {
                i += 1;
                continue;
            }
            match (0..self.first_artificial).find(|&j| !self.rows[i][j].is_zero()) {
                Some(j) => {
                    self.pivot(i, j);
                    i += 1;
                }
                None => {
                    self.rows.remove(i);
                    self.basis.remove(i);
                }
            }
        }
    }
}
