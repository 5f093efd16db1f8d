//! Decision procedures: (non-)contextuality, the non-contextual fraction,
//! strong and logical contextuality, and simulation existence.

pub mod lp;
pub mod simulation;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distribution::{Distribution, DistributionError};
use crate::model::{dist_to_json, EmpiricalModel, ModelError, ModelJson, SectionWeightJson};
use crate::scenario::{Face, Section};
use crate::semifield::{rational_string, SemifieldHom, SemifieldKind, SemifieldValue};
use lp::{LinearProgram, LpOutcome, Relation};

pub use simulation::{maximal_relations, simulation_along, simulation_exists, Budget, SearchOutcome, SearchStats};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("{operation} is not available for {kind} models")]
    UnsupportedSemifield { operation: &'static str, kind: SemifieldKind },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Distribution(#[from] DistributionError),
    #[error(transparent)]
    Morphism(#[from] crate::morphism::MorphismError),
    #[error("unknown check {0:?}; expected nc, ncf, sc or lc")]
    UnknownCheck(String),
}

fn unsupported(operation: &'static str, kind: SemifieldKind) -> AnalysisError {
    AnalysisError::UnsupportedSemifield { operation, kind }
}

/// Global sections whose restriction to every context lies in that
/// context's support, in lexicographic order.
pub fn consistent_global_sections(e: &EmpiricalModel) -> Vec<Section> {
    let mut out = Vec::new();
    search_consistent(e, &mut |g| {
        out.push(g.clone());
        true
    });
    out
}

/// Depth-first search over global sections pruned by context supports; the
/// callback returns `false` to stop.
fn search_consistent(e: &EmpiricalModel, visit: &mut dyn FnMut(&Section) -> bool) {
    let scenario = e.scenario();
    let order: Vec<String> = scenario.measurements().into_iter().collect();
    let supports: Vec<(&Face, Vec<&Section>)> = e
        .tables()
        .iter()
        .map(|(c, t)| (c, t.support().collect()))
        .collect();
    // Contexts to re-check after assigning each measurement.
    let touching: Vec<Vec<usize>> = order
        .iter()
        .map(|x| {
            supports
                .iter()
                .enumerate()
                .filter(|(_, (c, _))| c.contains(x))
                .map(|(i, _)| i)
                .collect()
        })
        .collect();

    fn go(
        depth: usize,
        partial: &mut Section,
        order: &[String],
        scenario: &crate::scenario::Scenario,
        supports: &[(&Face, Vec<&Section>)],
        touching: &[Vec<usize>],
        visit: &mut dyn FnMut(&Section) -> bool,
    ) -> bool {
        if depth == order.len() {
            return visit(partial);
        }
        let x = &order[depth];
        for o in scenario.outcomes(x).expect("known measurement") {
            partial.insert(x.clone(), o.clone());
            let ok = touching[depth].iter().all(|&i| {
                supports[i].1.iter().any(|t| t.agrees_with(partial))
            });
            if ok && !go(depth + 1, partial, order, scenario, supports, touching, visit) {
                return false;
            }
        }
        let mut rest = partial.domain();
        rest.remove(x);
        *partial = partial.project(&rest);
        true
    }

    let mut partial = Section::empty();
    go(0, &mut partial, &order, scenario, &supports, &touching, visit);
}

/// A global section consistent with every support, if any. Its absence is
/// strong contextuality.
pub fn consistent_global_section(e: &EmpiricalModel) -> Option<Section> {
    let mut found = None;
    search_consistent(e, &mut |g| {
        found = Some(g.clone());
        false
    });
    found
}

pub fn is_strongly_contextual(e: &EmpiricalModel) -> bool {
    consistent_global_section(e).is_none()
}

/// A distribution on global sections whose marginals are the tables of `e`,
/// if one exists.
///
/// Nonnegative models use an equality-constrained LP; boolean models a
/// combinatorial check (every supported section must extend to a consistent
/// global section); signed models always have one, found by solving the
/// linear system with free variables.
pub fn global_explanation(e: &EmpiricalModel) -> Result<Option<Distribution<Section>>, AnalysisError> {
    match e.kind() {
        SemifieldKind::NonNegRational => {
            let globals = consistent_global_sections(e);
            solve_explanation(e, &globals, false)
        }
        SemifieldKind::SignedRational => {
            let globals = e.scenario().global_sections();
            solve_explanation(e, &globals, true)
        }
        SemifieldKind::Boolean => {
            let globals = consistent_global_sections(e);
            for (c, t) in e.tables() {
                let covered: BTreeSet<Section> = globals.iter().map(|g| g.project(c)).collect();
                if t.support().any(|s| !covered.contains(s)) {
                    return Ok(None);
                }
            }
            let d = Distribution::new(
                SemifieldKind::Boolean,
                globals.into_iter().map(|g| (g, SemifieldValue::Bool(true))),
            )?;
            Ok(Some(d))
        }
    }
}

fn solve_explanation(
    e: &EmpiricalModel,
    globals: &[Section],
    signed: bool,
) -> Result<Option<Distribution<Section>>, AnalysisError> {
    let kind = e.kind();
    let mut lp = LinearProgram::new();
    for g in globals {
        if signed {
            lp.add_free_variable(g.to_string());
        } else {
            lp.add_variable(g.to_string());
        }
    }
    for (c, t) in e.tables() {
        let mut rows: BTreeMap<Section, Vec<(usize, BigRational)>> = e
            .scenario()
            .sections_of(c)
            .expect("context is known")
            .into_iter()
            .map(|s| (s, Vec::new()))
            .collect();
        for (j, g) in globals.iter().enumerate() {
            rows.get_mut(&g.project(c)).expect("section of context").push((j, BigRational::one()));
        }
        for (s, coeffs) in rows {
            let rhs = t.weight(&s).as_rational().cloned().expect("rational model");
            if coeffs.is_empty() {
                if rhs.is_zero() {
                    continue;
                }
                return Ok(None);
            }
            lp.add_constraint(coeffs, Relation::Eq, rhs).expect("declared variables");
        }
    }
    match lp.solve() {
        LpOutcome::Optimal(sol) => {
            let entries = globals
                .iter()
                .zip(sol.values)
                .map(|(g, v)| kind.from_rational(v).map(|v| (g.clone(), v)))
                .collect::<Result<Vec<_>, _>>()
                .map_err(DistributionError::from)?;
            Ok(Some(Distribution::new(kind, entries)?))
        }
        LpOutcome::Infeasible => Ok(None),
        LpOutcome::Unbounded => unreachable!("feasibility problems have a zero objective"),
    }
}

pub fn is_noncontextual(e: &EmpiricalModel) -> Result<bool, AnalysisError> {
    Ok(global_explanation(e)?.is_some())
}

/// Result of the non-contextual fraction LP.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NcfResult {
    /// The maximal weight `λ` of a non-contextual part.
    pub ncf: BigRational,
    /// An optimal subnormalized distribution on global sections (total mass `λ`).
    pub subdistribution: BTreeMap<Section, BigRational>,
    /// `e^{NC}` when `λ > 0`.
    pub noncontextual_part: Option<EmpiricalModel>,
    /// `e'` when `λ < 1`, so that `e = λ e^{NC} + (1−λ) e'`.
    pub remainder: Option<EmpiricalModel>,
}

impl NcfResult {
    pub fn cf(&self) -> BigRational {
        BigRational::one() - &self.ncf
    }
}

/// `max Σ_g b(g)` subject to `Σ_{g|_C = s} b(g) ≤ e_C(s)` and `b ≥ 0`.
pub fn ncf(e: &EmpiricalModel) -> Result<NcfResult, AnalysisError> {
    if e.kind() != SemifieldKind::NonNegRational {
        return Err(unsupported("the non-contextual fraction", e.kind()));
    }
    let globals = consistent_global_sections(e);
    let mut lp = LinearProgram::new();
    for g in &globals {
        lp.add_variable(g.to_string());
    }
    for (c, t) in e.tables() {
        let mut rows: BTreeMap<Section, Vec<(usize, BigRational)>> = BTreeMap::new();
        for (j, g) in globals.iter().enumerate() {
            rows.entry(g.project(c)).or_default().push((j, BigRational::one()));
        }
        for (s, coeffs) in rows {
            let rhs = t.weight(&s).as_rational().cloned().expect("rational model");
            lp.add_constraint(coeffs, Relation::Le, rhs).expect("declared variables");
        }
    }
    lp.set_objective((0..globals.len()).map(|j| (j, BigRational::one())).collect())
        .expect("declared variables");
    let sol = match lp.solve() {
        LpOutcome::Optimal(sol) => sol,
        other => unreachable!("the zero vector is feasible and mass is bounded: {other:?}"),
    };
    let lambda = sol.value;
    let subdistribution: BTreeMap<Section, BigRational> = globals
        .into_iter()
        .zip(sol.values)
        .filter(|(_, v)| !v.is_zero())
        .collect();
    decompose(e, lambda, subdistribution)
}

fn decompose(
    e: &EmpiricalModel,
    lambda: BigRational,
    subdistribution: BTreeMap<Section, BigRational>,
) -> Result<NcfResult, AnalysisError> {
    let kind = SemifieldKind::NonNegRational;
    let noncontextual_part = if lambda.is_zero() {
        None
    } else {
        let global = Distribution::new(
            kind,
            subdistribution
                .iter()
                .map(|(g, v)| (g.clone(), SemifieldValue::NonNeg(v / &lambda))),
        )?;
        Some(EmpiricalModel::from_global(e.scenario().clone(), &global)?)
    };
    let remainder = if lambda.is_one() {
        None
    } else {
        let rest = BigRational::one() - &lambda;
        let mut tables = BTreeMap::new();
        for (c, t) in e.tables() {
            let mut entries = Vec::new();
            for (s, v) in t.iter() {
                let mut w = v.as_rational().cloned().expect("rational model");
                if let Some(nc) = &noncontextual_part {
                    let p = nc.table(c).expect("same cover").weight(s);
                    w -= &lambda * p.as_rational().expect("rational model");
                }
                entries.push((s.clone(), SemifieldValue::nonneg(w / &rest).map_err(DistributionError::from)?));
            }
            tables.insert(c.clone(), Distribution::new(kind, entries)?);
        }
        Some(EmpiricalModel::new(e.scenario().clone(), kind, tables)?)
    };
    Ok(NcfResult {
        ncf: lambda,
        subdistribution,
        noncontextual_part,
        remainder,
    })
}

/// Whether the possibilistic collapse of `e` is contextual.
pub fn is_logically_contextual(e: &EmpiricalModel) -> Result<bool, AnalysisError> {
    let possibilistic = match e.kind() {
        SemifieldKind::NonNegRational => e.collapse(SemifieldHom::Collapse)?,
        SemifieldKind::Boolean => e.clone(),
        kind => return Err(unsupported("logical contextuality", kind)),
    };
    Ok(!is_noncontextual(&possibilistic)?)
}

/// One of the analyses a report can contain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Check {
    Noncontextual,
    Fraction,
    Strong,
    Logical,
}

impl Check {
    pub const ALL: [Check; 4] = [Check::Noncontextual, Check::Fraction, Check::Strong, Check::Logical];

    pub fn name(self) -> &'static str {
        match self {
            Check::Noncontextual => "nc",
            Check::Fraction => "ncf",
            Check::Strong => "sc",
            Check::Logical => "lc",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = AnalysisError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| AnalysisError::UnknownCheck(s.to_string()))
    }
}

/// A rational serialized as `"p/q"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Rational(#[serde(with = "rational_string")] pub BigRational);

/// Analysis results; only the requested fields are present.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ContextualityReport {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub noncontextual: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ncf: Option<Rational>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cf: Option<Rational>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub strongly_contextual: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub logically_contextual: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witnesses: Option<Witnesses>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Witnesses {
    /// A global distribution explaining the model (when non-contextual).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub global_distribution: Option<Vec<SectionWeightJson>>,
    /// A global section consistent with every support (when not strongly contextual).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub consistent_global_section: Option<Section>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub decomposition: Option<Decomposition>,
}

/// `e = λ e^{NC} + (1−λ) e'`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub lambda: Rational,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub noncontextual: Option<ModelJson>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub remainder: Option<ModelJson>,
}

/// Runs the requested checks.
pub fn analyze(e: &EmpiricalModel, checks: &BTreeSet<Check>, witnesses: bool) -> Result<ContextualityReport, AnalysisError> {
    let mut report = ContextualityReport::default();
    let mut w = Witnesses::default();
    if checks.contains(&Check::Noncontextual) {
        let explanation = global_explanation(e)?;
        report.noncontextual = Some(explanation.is_some());
        w.global_distribution = explanation.as_ref().map(dist_to_json);
    }
    if checks.contains(&Check::Fraction) {
        let r = ncf(e)?;
        report.cf = Some(Rational(r.cf()));
        w.decomposition = Some(Decomposition {
            lambda: Rational(r.ncf.clone()),
            noncontextual: r.noncontextual_part.as_ref().map(ModelJson::from),
            remainder: r.remainder.as_ref().map(ModelJson::from),
        });
        report.ncf = Some(Rational(r.ncf));
    }
    if checks.contains(&Check::Strong) {
        let g = consistent_global_section(e);
        report.strongly_contextual = Some(g.is_none());
        w.consistent_global_section = g;
    }
    if checks.contains(&Check::Logical) {
        report.logically_contextual = Some(is_logically_contextual(e)?);
    }
    if witnesses {
        report.witnesses = Some(w);
    }
    Ok(report)
}
