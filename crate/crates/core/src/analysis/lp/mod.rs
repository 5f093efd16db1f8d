//! Exact rational linear programming.
//!
//! A floating-point simplex first proposes a final basis, which is accepted
//! only after exact certification (see [`guided`]). Otherwise an exact
//! two-phase primal simplex runs on a sparse rational tableau: entering
//! columns follow Dantzig's rule (most negative reduced cost) until a run of
//! degenerate pivots is observed, after which Bland's smallest-index rule
//! takes over until progress resumes; Bland's rule guarantees termination.
//! Either way every reported result is exact.

mod guided;

use std::collections::HashMap;
use std::fmt;
use std::time::Instant;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Degenerate pivots tolerated under Dantzig's rule before switching to Bland.
const DEGENERATE_STREAK: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<(usize, BigRational)>,
    pub relation: Relation,
    pub rhs: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("constraint references undeclared variable {0}")]
    UnknownVariable(usize),
}

/// `maximize c·x subject to A x (≤|=|≥) b`, with `x ≥ 0` except for
/// variables declared free.
#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    names: Vec<String>,
    free: Vec<bool>,
    constraints: Vec<Constraint>,
    objective: Vec<(usize, BigRational)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub value: BigRational,
    pub values: Vec<BigRational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(&self) -> Option<&LpSolution> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpOutcome::Infeasible)
    }
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares a nonnegative variable and returns its index.
    pub fn add_variable(&mut self, name: impl Into<String>) -> usize {
        self.names.push(name.into());
        self.free.push(false);
        self.names.len() - 1
    }

    /// Declares an unrestricted variable.
    pub fn add_free_variable(&mut self, name: impl Into<String>) -> usize {
        let i = self.add_variable(name);
        self.free[i] = true;
        i
    }

    pub fn num_variables(&self) -> usize {
        self.names.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn name(&self, var: usize) -> &str {
        &self.names[var]
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn add_constraint(
        &mut self,
        coeffs: Vec<(usize, BigRational)>,
        relation: Relation,
        rhs: BigRational,
    ) -> Result<(), LpError> {
        self.check(&coeffs)?;
        self.constraints.push(Constraint {
            coeffs: merge_terms(coeffs),
            relation,
            rhs,
        });
        Ok(())
    }

    /// Sets the objective to maximize.
    pub fn set_objective(&mut self, coeffs: Vec<(usize, BigRational)>) -> Result<(), LpError> {
        self.check(&coeffs)?;
        self.objective = merge_terms(coeffs);
        Ok(())
    }

    fn check(&self, coeffs: &[(usize, BigRational)]) -> Result<(), LpError> {
        match coeffs.iter().find(|(j, _)| *j >= self.names.len()) {
            Some((j, _)) => Err(LpError::UnknownVariable(*j)),
            None => Ok(()),
        }
    }

    /// Objective value of an assignment.
    pub fn evaluate(&self, values: &[BigRational]) -> BigRational {
        self.objective.iter().map(|(j, c)| c * &values[*j]).sum()
    }

    /// Whether an assignment satisfies every constraint and sign restriction.
    pub fn is_feasible_point(&self, values: &[BigRational]) -> bool {
        if values.len() != self.names.len() {
            return false;
        }
        if values.iter().zip(&self.free).any(|(v, free)| !free && v.is_negative()) {
            return false;
        }
        self.constraints.iter().all(|c| {
            let lhs: BigRational = c.coeffs.iter().map(|(j, a)| a * &values[*j]).sum();
            match c.relation {
                Relation::Le => lhs <= c.rhs,
                Relation::Eq => lhs == c.rhs,
                Relation::Ge => lhs >= c.rhs,
            }
        })
    }

    pub fn solve(&self) -> LpOutcome {
        self.solve_until(None).expect("no deadline")
    }

    /// Like [`LinearProgram::solve`], giving up with `Err(TimedOut)` once
    /// `deadline` has passed.
    pub fn solve_until(&self, deadline: Option<Instant>) -> Result<LpOutcome, TimedOut> {
        self.run_solver(deadline, true)
    }

    /// Solves with the exact simplex alone, skipping the floating-point
    /// proposal. Slower; useful as a reference.
    pub fn solve_exact(&self) -> LpOutcome {
        self.run_solver(None, false).expect("no deadline")
    }

    fn run_solver(&self, deadline: Option<Instant>, guided: bool) -> Result<LpOutcome, TimedOut> {
        // Column layout: structural columns (free variables split in two),
        // then one slack per inequality, then artificials.
        let mut column_of = Vec::with_capacity(self.names.len());
        let mut ncols = 0;
        for &free in &self.free {
            column_of.push(ncols);
            ncols += if free { 2 } else { 1 };
        }
        let structural = ncols;

        let mut rows: Vec<HashMap<usize, BigRational>> = Vec::with_capacity(self.constraints.len());
        let mut rhs: Vec<BigRational> = Vec::with_capacity(self.constraints.len());
        let mut basis: Vec<Option<usize>> = Vec::with_capacity(self.constraints.len());
        for c in &self.constraints {
            let mut row = HashMap::new();
            for (j, a) in &c.coeffs {
                if a.is_zero() {
                    continue;
                }
                row.insert(column_of[*j], a.clone());
                if self.free[*j] {
                    row.insert(column_of[*j] + 1, -a);
                }
            }
            let mut slack = None;
            match c.relation {
                Relation::Le => {
                    row.insert(ncols, BigRational::one());
                    slack = Some(ncols);
                    ncols += 1;
                }
                Relation::Ge => {
                    row.insert(ncols, -BigRational::one());
                    slack = Some(ncols);
                    ncols += 1;
                }
                Relation::Eq => {}
            }
            let mut b = c.rhs.clone();
            if b.is_negative() {
                b = -b;
                for v in row.values_mut() {
                    *v = -&*v;
                }
            }
            let usable = slack.filter(|s| row[s].is_one());
            basis.push(usable);
            rows.push(row);
            rhs.push(b);
        }
        let first_artificial = ncols;
        for (i, b) in basis.iter_mut().enumerate() {
            if b.is_none() {
                rows[i].insert(ncols, BigRational::one());
                *b = Some(ncols);
                ncols += 1;
            }
        }
        let basis: Vec<usize> = basis.into_iter().map(|b| b.expect("assigned")).collect();

        // Phase-two costs: minimize −c·x.
        let mut cost = vec![BigRational::zero(); ncols];
        for (j, c) in &self.objective {
            cost[column_of[*j]] = -c;
            if self.free[*j] {
                cost[column_of[*j] + 1] = c.clone();
            }
        }

        let form = guided::StandardForm {
            rows: &rows,
            rhs: &rhs,
            basis: &basis,
            ncols,
            first_artificial,
            cost: &cost,
        };
        if guided {
            match guided::solve(&form, deadline)? {
                Some(guided::Certified::Infeasible) => return Ok(LpOutcome::Infeasible),
                Some(guided::Certified::Optimal(mut columns)) => {
                    columns.truncate(structural);
                    return Ok(self.finish(&column_of, &columns));
                }
                None => {}
            }
        }

        let mut tab = Tableau {
            rows,
            rhs,
            basis,
            obj: vec![BigRational::zero(); ncols],
            obj_rhs: BigRational::zero(),
            allowed: vec![true; ncols],
            deadline,
        };

        // Phase 1: minimize the sum of artificials.
        if first_artificial < ncols {
            let mut cost = vec![BigRational::zero(); ncols];
            for c in cost.iter_mut().skip(first_artificial) {
                *c = BigRational::one();
            }
            tab.set_costs(&cost);
            if tab.run()? == Step::Unbounded {
                unreachable!("phase one is bounded below by zero");
            }
            if !tab.obj_rhs.is_zero() {
                return Ok(LpOutcome::Infeasible);
            }
            tab.expel_artificials(first_artificial);
            for a in tab.allowed.iter_mut().skip(first_artificial) {
                *a = false;
            }
        }

        // Phase 2.
        tab.set_costs(&cost);
        if tab.run()? == Step::Unbounded {
            return Ok(LpOutcome::Unbounded);
        }

        let mut column_values = vec![BigRational::zero(); structural];
        for (i, &b) in tab.basis.iter().enumerate() {
            if b < structural {
                column_values[b] = tab.rhs[i].clone();
            }
        }
        Ok(self.finish(&column_of, &column_values))
    }

    /// Maps structural column values back to variables.
    fn finish(&self, column_of: &[usize], column_values: &[BigRational]) -> LpOutcome {
        let values: Vec<BigRational> = self
            .free
            .iter()
            .enumerate()
            .map(|(j, &free)| {
                let c = column_of[j];
                if free {
                    &column_values[c] - &column_values[c + 1]
                } else {
                    column_values[c].clone()
                }
            })
            .collect();
        let value = self.evaluate(&values);
        debug_assert!(self.is_feasible_point(&values));
        LpOutcome::Optimal(LpSolution { value, values })
    }
}

/// The solver ran past its deadline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("linear program exceeded its time budget")]
pub struct TimedOut;

fn merge_terms(coeffs: Vec<(usize, BigRational)>) -> Vec<(usize, BigRational)> {
    let mut merged: std::collections::BTreeMap<usize, BigRational> = Default::default();
    for (j, a) in coeffs {
        *merged.entry(j).or_insert_with(BigRational::zero) += a;
    }
    merged.into_iter().filter(|(_, a)| !a.is_zero()).collect()
}

#[derive(Debug, PartialEq, Eq)]
enum Step {
    Optimal,
    Unbounded,
}

/// Minimization tableau in canonical form with respect to `basis`.
struct Tableau {
    rows: Vec<HashMap<usize, BigRational>>,
    rhs: Vec<BigRational>,
    basis: Vec<usize>,
    /// Reduced costs.
    obj: Vec<BigRational>,
    /// Minus the current objective value.
    obj_rhs: BigRational,
    allowed: Vec<bool>,
    deadline: Option<Instant>,
}

impl Tableau {
    fn set_costs(&mut self, cost: &[BigRational]) {
        self.obj = cost.to_vec();
        self.obj_rhs = BigRational::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for (j, a) in &self.rows[i] {
                self.obj[*j] -= cb * a;
            }
            self.obj_rhs -= cb * &self.rhs[i];
        }
    }

    fn run(&mut self) -> Result<Step, TimedOut> {
        let mut degenerate = 0usize;
        let mut pivots = 0usize;
        loop {
            pivots += 1;
            if pivots.is_multiple_of(64) && self.deadline.is_some_and(|d| Instant::now() > d) {
                return Err(TimedOut);
            }
            let bland = degenerate >= DEGENERATE_STREAK;
            let entering = if bland {
                (0..self.obj.len()).find(|&j| self.allowed[j] && self.obj[j].is_negative())
            } else {
                let mut best: Option<usize> = None;
                for j in 0..self.obj.len() {
                    if self.allowed[j] && self.obj[j].is_negative() && best.is_none_or(|b| self.obj[j] < self.obj[b]) {
                        best = Some(j);
                    }
                }
                best
            };
            let Some(q) = entering else {
                return Ok(Step::Optimal);
            };
            let mut leaving: Option<(usize, BigRational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                let Some(a) = row.get(&q) else { continue };
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &leaving {
                    None => true,
                    Some((k, r)) => ratio < *r || (ratio == *r && self.basis[i] < self.basis[*k]),
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
            let Some((p, ratio)) = leaving else {
                return Ok(Step::Unbounded);
            };
            if ratio.is_zero() {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(p, q);
        }
    }

    fn pivot(&mut self, p: usize, q: usize) {
        let pivot = self.rows[p][&q].clone();
        if !pivot.is_one() {
            let inv = pivot.recip();
            for v in self.rows[p].values_mut() {
                *v *= &inv;
            }
            self.rhs[p] *= &inv;
        }
        let pivot_row: Vec<(usize, BigRational)> = self.rows[p].iter().map(|(j, a)| (*j, a.clone())).collect();
        let pivot_rhs = self.rhs[p].clone();
        for i in 0..self.rows.len() {
            if i == p {
                continue;
            }
            let Some(f) = self.rows[i].get(&q).cloned() else { continue };
            let row = &mut self.rows[i];
            for (j, a) in &pivot_row {
                let delta = &f * a;
                match row.get_mut(j) {
                    Some(v) => {
                        *v -= delta;
                        if v.is_zero() {
                            row.remove(j);
                        }
                    }
                    None => {
                        row.insert(*j, -delta);
                    }
                }
            }
            row.remove(&q);
            self.rhs[i] -= &f * &pivot_rhs;
        }
        let f = self.obj[q].clone();
        if !f.is_zero() {
            for (j, a) in &pivot_row {
                self.obj[*j] -= &f * a;
            }
            self.obj[q] = BigRational::zero();
            self.obj_rhs -= &f * &pivot_rhs;
        }
        self.basis[p] = q;
    }

    /// After a successful phase one, pivots zero-level artificials out of the
    /// basis, dropping rows that turn out to be redundant.
    fn expel_artificials(&mut self, first_artificial: usize) {
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] < first_artificial {
                i += 1;
                continue;
            }
            let replacement = self.rows[i]
                .iter()
                .filter(|(j, a)| **j < first_artificial && !a.is_zero())
                .map(|(j, _)| *j)
                .min();
            match replacement {
                Some(q) => {
                    self.pivot(i, q);
                    i += 1;
                }
                None => {
                    self.rows.swap_remove(i);
                    self.rhs.swap_remove(i);
                    self.basis.swap_remove(i);
                }
            }
        }
    }
}
