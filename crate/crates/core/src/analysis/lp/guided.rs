//! Floating-point simplex used only to *propose* a basis, which is then
//! certified in exact arithmetic: the basic solution is recomputed by sparse
//! rational elimination, and optimality (or phase-one infeasibility) is
//! proved by dual feasibility of the exact reduced costs. Anything that does
//! not certify is reported as `None` and left to the exact simplex.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::time::Instant;

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::TimedOut;

const EPS: f64 = 1e-9;
const DEGENERATE_STREAK: usize = 64;

/// A standard-form problem `min c·x, A x = b, x ≥ 0` with `b ≥ 0`, an initial
/// slack/artificial basis, and artificials numbered from `first_artificial`.
pub(super) struct StandardForm<'a> {
    pub rows: &'a [HashMap<usize, BigRational>],
    pub rhs: &'a [BigRational],
    pub basis: &'a [usize],
    pub ncols: usize,
    pub first_artificial: usize,
    pub cost: &'a [BigRational],
}

pub(super) enum Certified {
    /// Exact values of every column.
    Optimal(Vec<BigRational>),
    Infeasible,
}

struct FloatTableau {
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    basis: Vec<usize>,
    obj: Vec<f64>,
    allowed: Vec<bool>,
}

enum Run {
    Optimal,
    Unbounded,
    Stalled,
}

impl FloatTableau {
    fn set_costs(&mut self, cost: &[f64]) {
        self.obj = cost.to_vec();
        for (i, &bi) in self.basis.iter().enumerate() {
            let cb = cost[bi];
            if cb != 0.0 {
                for (o, a) in self.obj.iter_mut().zip(&self.a[i]) {
                    *o -= cb * a;
                }
            }
        }
    }

    fn pivot(&mut self, p: usize, q: usize) {
        let inv = 1.0 / self.a[p][q];
        for v in self.a[p].iter_mut() {
            *v *= inv;
        }
        self.b[p] *= inv;
        let row = self.a[p].clone();
        let bp = self.b[p];
        for i in 0..self.a.len() {
            if i == p {
                continue;
            }
            let f = self.a[i][q];
            if f.abs() <= f64::EPSILON {
                self.a[i][q] = 0.0;
                continue;
            }
            for (v, r) in self.a[i].iter_mut().zip(&row) {
                *v -= f * r;
            }
            self.a[i][q] = 0.0;
            self.b[i] -= f * bp;
            if self.b[i].abs() < EPS {
                self.b[i] = 0.0;
            }
        }
        let f = self.obj[q];
        if f != 0.0 {
            for (o, r) in self.obj.iter_mut().zip(&row) {
                *o -= f * r;
            }
            self.obj[q] = 0.0;
        }
        self.basis[p] = q;
    }

    fn run(&mut self, deadline: Option<Instant>, max_pivots: usize) -> Result<Run, TimedOut> {
        let mut degenerate = 0;
        for pivots in 0..max_pivots {
            if pivots % 64 == 63 && deadline.is_some_and(|d| Instant::now() > d) {
                return Err(TimedOut);
            }
            let bland = degenerate >= DEGENERATE_STREAK;
            let mut q = None;
            for j in 0..self.obj.len() {
                if !self.allowed[j] || self.obj[j] >= -EPS {
                    continue;
                }
                if bland {
                    q = Some(j);
                    break;
                }
                if q.is_none_or(|k: usize| self.obj[j] < self.obj[k]) {
                    q = Some(j);
                }
            }
            let Some(q) = q else { return Ok(Run::Optimal) };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.a.len() {
                let a = self.a[i][q];
                if a <= EPS {
                    continue;
                }
                let r = self.b[i] / a;
                let better = match leave {
                    None => true,
                    Some((k, best)) => r < best - EPS || (r <= best + EPS && self.basis[i] < self.basis[k]),
                };
                if better {
                    leave = Some((i, r));
                }
            }
            let Some((p, r)) = leave else { return Ok(Run::Unbounded) };
            degenerate = if r <= EPS { degenerate + 1 } else { 0 };
            self.pivot(p, q);
        }
        Ok(Run::Stalled)
    }
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Solves a square sparse system exactly, choosing pivots with a
/// Markowitz-style count to limit fill-in. `None` if singular.
fn sparse_solve(mut rows: Vec<BTreeMap<usize, BigRational>>, mut rhs: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let n = rows.len();
    let mut col_rows: HashMap<usize, HashSet<usize>> = HashMap::new();
    for (i, r) in rows.iter().enumerate() {
        for &c in r.keys() {
            if c >= n {
                return None;
            }
            col_rows.entry(c).or_default().insert(i);
        }
    }
    let mut row_done = vec![false; n];
    let mut order: Vec<(usize, usize)> = Vec::with_capacity(n);
    for _ in 0..n {
        let mut best: Option<(usize, usize, usize)> = None;
        for (i, r) in rows.iter().enumerate() {
            if row_done[i] {
                continue;
            }
            for &c in r.keys() {
                let score = (r.len() - 1) * (col_rows[&c].len() - 1);
                if best.is_none_or(|(_, _, s)| score < s) {
                    best = Some((i, c, score));
                }
                if score == 0 {
                    break;
                }
            }
        }
        let (p, c, _) = best?;
        row_done[p] = true;
        order.push((p, c));
        let pivot_row = rows[p].clone();
        let pivot = pivot_row[&c].clone();
        let targets: Vec<usize> = col_rows[&c].iter().copied().filter(|&i| i != p && !row_done[i]).collect();
        for i in targets {
            let f = &rows[i][&c] / &pivot;
            for (k, a) in &pivot_row {
                let delta = &f * a;
                let entry = rows[i].entry(*k).or_insert_with(BigRational::zero);
                *entry -= delta;
                if entry.is_zero() {
                    rows[i].remove(k);
                    col_rows.get_mut(k).expect("indexed").remove(&i);
                } else {
                    col_rows.entry(*k).or_default().insert(i);
                }
            }
            let delta = &f * &rhs[p];
            rhs[i] -= delta;
        }
        for k in pivot_row.keys() {
            col_rows.get_mut(k).expect("indexed").remove(&p);
        }
    }
    let mut x = vec![BigRational::zero(); n];
    for &(p, c) in order.iter().rev() {
        let mut acc = rhs[p].clone();
        for (k, a) in &rows[p] {
            if *k != c {
                acc -= a * &x[*k];
            }
        }
        x[c] = acc / &rows[p][&c];
    }
    Some(x)
}

/// Exact primal values and duals for `basis`, or `None` if singular.
fn basic_solution(
    form: &StandardForm<'_>,
    basis: &[usize],
    cost: &[BigRational],
) -> Option<(Vec<BigRational>, Vec<BigRational>)> {
    let m = form.rows.len();
    let position: HashMap<usize, usize> = basis.iter().enumerate().map(|(k, &j)| (j, k)).collect();
    let mut primal_rows = vec![BTreeMap::new(); m];
    let mut dual_rows = vec![BTreeMap::new(); m];
    for (i, row) in form.rows.iter().enumerate() {
        for (j, a) in row {
            if let Some(&k) = position.get(j) {
                primal_rows[i].insert(k, a.clone());
                dual_rows[k].insert(i, a.clone());
            }
        }
    }
    let x_b = sparse_solve(primal_rows, form.rhs.to_vec())?;
    let c_b = basis.iter().map(|&j| cost[j].clone()).collect();
    let y = sparse_solve(dual_rows, c_b)?;
    Some((x_b, y))
}

/// Whether every admissible column has a nonnegative exact reduced cost.
fn dual_feasible(form: &StandardForm<'_>, cost: &[BigRational], y: &[BigRational], admissible: impl Fn(usize) -> bool) -> bool {
    let mut reduced: Vec<BigRational> = cost.to_vec();
    for (i, row) in form.rows.iter().enumerate() {
        if y[i].is_zero() {
            continue;
        }
        for (j, a) in row {
            reduced[*j] -= &y[i] * a;
        }
    }
    reduced.iter().enumerate().all(|(j, d)| !admissible(j) || !d.is_negative())
}

pub(super) fn solve(form: &StandardForm<'_>, deadline: Option<Instant>) -> Result<Option<Certified>, TimedOut> {
    let m = form.rows.len();
    let n = form.ncols;
    let mut a = vec![vec![0.0; n]; m];
    for (i, row) in form.rows.iter().enumerate() {
        for (j, v) in row {
            a[i][*j] = to_f64(v);
        }
    }
    let b: Vec<f64> = form.rhs.iter().map(to_f64).collect();
    if a.iter().flatten().chain(&b).any(|v| !v.is_finite()) {
        return Ok(None);
    }
    let mut tab = FloatTableau {
        a,
        b,
        basis: form.basis.to_vec(),
        obj: vec![0.0; n],
        allowed: vec![true; n],
    };
    let max_pivots = 50 * (m + n) + 1000;
    let is_artificial = |j: usize| j >= form.first_artificial;

    if form.first_artificial < n {
        let phase_one: Vec<BigRational> = (0..n)
            .map(|j| if is_artificial(j) { BigRational::from_integer(1.into()) } else { BigRational::zero() })
            .collect();
        let float_costs: Vec<f64> = phase_one.iter().map(to_f64).collect();
        tab.set_costs(&float_costs);
        if !matches!(tab.run(deadline, max_pivots)?, Run::Optimal) {
            return Ok(None);
        }
        let Some((x_b, y)) = basic_solution(form, &tab.basis, &phase_one) else {
            return Ok(None);
        };
        if x_b.iter().any(|v| v.is_negative()) {
            return Ok(None);
        }
        let value: BigRational = tab.basis.iter().zip(&x_b).filter(|(j, _)| is_artificial(**j)).map(|(_, v)| v.clone()).sum();
        if value.is_positive() {
            // Certified: the phase-one optimum is positive.
            return Ok(dual_feasible(form, &phase_one, &y, |_| true).then_some(Certified::Infeasible));
        }
        // Drive zero-level artificials out where possible.
        for i in 0..m {
            if is_artificial(tab.basis[i]) {
                if let Some(q) = (0..form.first_artificial).find(|&j| tab.a[i][j].abs() > 1e-7) {
                    tab.pivot(i, q);
                }
            }
        }
        for j in form.first_artificial..n {
            tab.allowed[j] = false;
        }
    }

    let float_costs: Vec<f64> = form.cost.iter().map(to_f64).collect();
    tab.set_costs(&float_costs);
    if !matches!(tab.run(deadline, max_pivots)?, Run::Optimal) {
        return Ok(None);
    }
    let Some((x_b, y)) = basic_solution(form, &tab.basis, form.cost) else {
        return Ok(None);
    };
    let feasible = tab
        .basis
        .iter()
        .zip(&x_b)
        .all(|(&j, v)| !v.is_negative() && (!is_artificial(j) || v.is_zero()));
    if !feasible || !dual_feasible(form, form.cost, &y, |j| !is_artificial(j)) {
        return Ok(None);
    }
    let mut values = vec![BigRational::zero(); n];
    for (&j, v) in tab.basis.iter().zip(x_b) {
        values[j] = v;
    }
    Ok(Some(Certified::Optimal(values)))
}
