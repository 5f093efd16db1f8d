//! Brute-force references that share no code with the simplex solver.

use std::collections::{BTreeMap, BTreeSet};

use contextuality::model::EmpiricalModel;
use contextuality::scenario::Section;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

/// `coeffs · x (sense) rhs`, dense.
#[derive(Debug, Clone)]
pub struct Row {
    pub coeffs: Vec<BigRational>,
    pub sense: Sense,
    pub rhs: BigRational,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Brute {
    Optimal(BigRational),
    Infeasible,
}

fn satisfies(row: &Row, x: &[BigRational]) -> bool {
    let lhs: BigRational = row.coeffs.iter().zip(x).map(|(a, b)| a * b).sum();
    match row.sense {
        Sense::Le => lhs <= row.rhs,
        Sense::Eq => lhs == row.rhs,
        Sense::Ge => lhs >= row.rhs,
    }
}

/// Solves a square system by Gauss-Jordan elimination; `None` if singular.
pub fn solve_square(mut a: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = BigRational::one() / &a[col][col];
        for k in col..n {
            a[col][k] = &a[col][k] * &inv;
        }
        b[col] = &b[col] * &inv;
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for k in col..n {
                    let delta = &f * &a[col][k];
                    a[r][k] -= delta;
                }
                let delta = &f * &b[col];
                b[r] -= delta;
            }
        }
    }
    Some(b)
}

fn combinations(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn go(start: usize, n: usize, k: usize, acc: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if acc.len() == k {
            f(acc);
            return;
        }
        for i in start..n {
            if n - i < k - acc.len() {
                break;
            }
            acc.push(i);
            go(i + 1, n, k, acc, f);
            acc.pop();
        }
    }
    go(0, n, k, &mut Vec::with_capacity(k), f)
}

/// Maximizes `objective · x` over `x ≥ 0` and `rows` by visiting every
/// basic point: each choice of `n` constraints made tight. The feasible set
/// must be bounded (or empty).
pub fn vertex_enumeration(n: usize, objective: &[BigRational], rows: &[Row]) -> Brute {
    if n == 0 {
        return if rows.iter().all(|r| satisfies(r, &[])) {
            Brute::Optimal(BigRational::zero())
        } else {
            Brute::Infeasible
        };
    }
    let mut all = rows.to_vec();
    for i in 0..n {
        let mut coeffs = vec![BigRational::zero(); n];
        coeffs[i] = BigRational::one();
        all.push(Row {
            coeffs,
            sense: Sense::Ge,
            rhs: BigRational::zero(),
        });
    }
    let mut best: Option<BigRational> = None;
    combinations(all.len(), n, &mut |pick| {
        let a = pick.iter().map(|&i| all[i].coeffs.clone()).collect();
        let b = pick.iter().map(|&i| all[i].rhs.clone()).collect();
        if let Some(x) = solve_square(a, b) {
            if all.iter().all(|r| satisfies(r, &x)) {
                let v: BigRational = objective.iter().zip(&x).map(|(c, xi)| c * xi).sum();
                if best.as_ref().is_none_or(|b| v > *b) {
                    best = Some(v);
                }
            }
        }
    });
    best.map_or(Brute::Infeasible, Brute::Optimal)
}

/// Non-contextual fraction by vertex enumeration of
/// `{b ≥ 0 : Σ_{g|C = s} b(g) ≤ e_C(s)}`. Globals restricting to an
/// impossible outcome are fixed at zero first; the remaining polytope is
/// small for the fixtures this is used on.
pub fn ncf_by_vertices(e: &EmpiricalModel) -> BigRational {
    let weight = |c, s: &Section| -> BigRational {
        e.table(c)
            .and_then(|t| t.weight(s).as_rational().cloned())
            .expect("rational model")
    };
    let live: Vec<Section> = e
        .scenario()
        .global_sections()
        .into_iter()
        .filter(|g| e.tables().iter().all(|(c, t)| t.contains(&g.project(c))))
        .collect();
    let n = live.len();
    let mut rows = Vec::new();
    let mut seen = BTreeSet::new();
    for c in e.tables().keys() {
        let mut by_section: BTreeMap<Section, Vec<BigRational>> = BTreeMap::new();
        for (j, g) in live.iter().enumerate() {
            by_section.entry(g.project(c)).or_insert_with(|| vec![BigRational::zero(); n])[j] = BigRational::one();
        }
        for (s, coeffs) in by_section {
            let rhs = weight(c, &s);
            if seen.insert((coeffs.clone(), rhs.clone())) {
                rows.push(Row {
                    coeffs,
                    sense: Sense::Le,
                    rhs,
                });
            }
        }
    }
    match vertex_enumeration(n, &vec![BigRational::one(); n], &rows) {
        Brute::Optimal(v) => v,
        Brute::Infeasible => unreachable!("b = 0 is feasible"),
    }
}

/// Exact feasibility of a point against rows (used to double-check witnesses).
pub fn feasible(rows: &[Row], x: &[BigRational]) -> bool {
    x.iter().all(|v| !v.is_negative()) && rows.iter().all(|r| satisfies(r, x))
}
