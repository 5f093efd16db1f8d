//! Deciding whether a simulation `d → e` exists.
//!
//! Enlarging a relation pointwise (while it stays simplicial) never destroys
//! a simulation: the larger relation can reuse the old components and ignore
//! the extra inputs. So it suffices to try the inclusion-maximal simplicial
//! relations `X → Y`. Each of them is contained in
//! `π_φ(x) = ⋂_{C ∋ x} φ(C)` for some assignment `φ` of a target context to
//! every source context, and those are enumerated directly.
//!
//! For a fixed relation the unknowns are the top-component weights
//! `v(s, t) = σ_X(s)(t)` for `s ∈ E_Y(π(X))`, `t ∈ E_X(X)`; normalization,
//! naturality and `σ_* d = e` are all linear in them.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::lp::{LinearProgram, LpOutcome, Relation};
use super::AnalysisError;
use crate::distribution::Distribution;
use crate::model::EmpiricalModel;
use crate::morphism::{Morphism, Simulation};
use crate::scenario::{Face, Scenario, Section, SimplicialRelation};
use crate::semifield::{SemifieldKind, SemifieldValue};

/// Limits for [`simulation_exists`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Budget {
    pub max_time: Option<Duration>,
    pub max_relations: Option<usize>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget::default()
    }

    pub fn seconds(secs: f64) -> Self {
        Budget {
            max_time: Some(Duration::from_secs_f64(secs)),
            max_relations: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Inclusion-maximal relations found.
    pub maximal_relations: usize,
    /// Relations whose LP was solved.
    pub relations_examined: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SearchOutcome {
    Found { simulation: Box<Simulation>, stats: SearchStats },
    NotFound { stats: SearchStats },
    BudgetExceeded { stats: SearchStats },
}

impl SearchOutcome {
    pub fn stats(&self) -> SearchStats {
        match self {
            SearchOutcome::Found { stats, .. }
            | SearchOutcome::NotFound { stats }
            | SearchOutcome::BudgetExceeded { stats } => *stats,
        }
    }

    pub fn simulation(&self) -> Option<&Simulation> {
        match self {
            SearchOutcome::Found { simulation, .. } => Some(simulation),
            _ => None,
        }
    }

    /// `Some(true/false)` when decided, `None` when the budget ran out.
    pub fn exists(&self) -> Option<bool> {
        match self {
            SearchOutcome::Found { .. } => Some(true),
            SearchOutcome::NotFound { .. } => Some(false),
            SearchOutcome::BudgetExceeded { .. } => None,
        }
    }
}

struct Clock {
    deadline: Option<Instant>,
}

impl Clock {
    fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() > d)
    }
}

/// Searches for a simulation `d → e` over nonnegative rationals.
pub fn simulation_exists(d: &EmpiricalModel, e: &EmpiricalModel, budget: Budget) -> Result<SearchOutcome, AnalysisError> {
    for m in [d, e] {
        if m.kind() != SemifieldKind::NonNegRational {
            return Err(AnalysisError::UnsupportedSemifield {
                operation: "simulation search",
                kind: m.kind(),
            });
        }
    }
    let clock = Clock {
        deadline: budget.max_time.map(|t| Instant::now() + t),
    };
    let mut stats = SearchStats::default();
    let Some(relations) = maximal_relations_within(e.scenario(), d.scenario(), &clock) else {
        return Ok(SearchOutcome::BudgetExceeded { stats });
    };
    stats.maximal_relations = relations.len();
    for relation in relations {
        if budget.max_relations.is_some_and(|n| stats.relations_examined >= n) || clock.expired() {
            return Ok(SearchOutcome::BudgetExceeded { stats });
        }
        stats.relations_examined += 1;
        match simulation_for_relation(d, e, &relation, clock.deadline)? {
            Attempt::Found(simulation) => {
                return Ok(SearchOutcome::Found {
                    simulation,
                    stats,
                })
            }
            Attempt::Infeasible => {}
            Attempt::TimedOut => return Ok(SearchOutcome::BudgetExceeded { stats }),
        }
    }
    Ok(SearchOutcome::NotFound { stats })
}

/// The inclusion-maximal simplicial relations from `target`'s measurements
/// into `source`, largest total image first.
pub fn maximal_relations(target: &Scenario, source: &Scenario) -> Vec<SimplicialRelation> {
    maximal_relations_within(target, source, &Clock { deadline: None }).expect("no deadline")
}

/// [`maximal_relations`], or `None` if the clock runs out.
fn maximal_relations_within(target: &Scenario, source: &Scenario, clock: &Clock) -> Option<Vec<SimplicialRelation>> {
    let xs: Vec<String> = target.measurements().into_iter().collect();
    let index: BTreeMap<&String, usize> = xs.iter().enumerate().map(|(i, x)| (x, i)).collect();
    let contexts: Vec<Vec<usize>> = target
        .cover()
        .iter()
        .map(|c| c.iter().map(|x| index[x]).collect())
        .collect();
    let targets: Vec<&Face> = source.cover().iter().collect();

    // Partial images: None means "no context seen yet" (unconstrained).
    type Partial = Vec<Option<Face>>;
    let mut candidates: BTreeSet<Vec<Face>> = BTreeSet::new();
    let mut seen: HashSet<(usize, Partial)> = HashSet::new();
    let mut stack: Vec<(usize, Partial)> = vec![(0, vec![None; xs.len()])];
    let mut steps = 0usize;
    while let Some((k, partial)) = stack.pop() {
        steps += 1;
        if steps.is_multiple_of(1024) && clock.expired() {
            return None;
        }
        if k == contexts.len() {
            // Every measurement lies in some context, so all entries are set.
            candidates.insert(partial.into_iter().map(|f| f.unwrap_or_default()).collect());
            continue;
        }
        for d in &targets {
            let mut next = partial.clone();
            for &x in &contexts[k] {
                next[x] = Some(match &next[x] {
                    None => (*d).clone(),
                    Some(f) => f.intersection(d).cloned().collect(),
                });
            }
            if seen.insert((k + 1, next.clone())) {
                stack.push((k + 1, next));
            }
        }
    }
    let candidates: Vec<Vec<Face>> = candidates.into_iter().collect();
    let contains = |big: &Vec<Face>, small: &Vec<Face>| big.iter().zip(small).all(|(b, s)| s.is_subset(b));
    let mut maximal: Vec<&Vec<Face>> = candidates
        .iter()
        .filter(|c| !candidates.iter().any(|o| o != *c && contains(o, c)))
        .collect();
    maximal.sort_by_key(|c| std::cmp::Reverse(c.iter().map(BTreeSet::len).sum::<usize>()));
    Some(
        maximal
            .into_iter()
            .map(|images| SimplicialRelation::new(xs.iter().cloned().zip(images.iter().cloned()).collect()))
            .collect(),
    )
}

/// Decides whether a simulation `d → e` exists along a fixed relation from
/// `e`'s measurements into `d`'s scenario.
pub fn simulation_along(
    d: &EmpiricalModel,
    e: &EmpiricalModel,
    relation: &SimplicialRelation,
) -> Result<Option<Simulation>, AnalysisError> {
    relation
        .validate(e.scenario(), d.scenario())
        .map_err(|err| AnalysisError::Morphism(err.into()))?;
    match simulation_for_relation(d, e, relation, None)? {
        Attempt::Found(s) => Ok(Some(*s)),
        Attempt::Infeasible => Ok(None),
        Attempt::TimedOut => unreachable!("no deadline"),
    }
}

enum Attempt {
    Found(Box<Simulation>),
    Infeasible,
    TimedOut,
}

fn rational(v: &SemifieldValue) -> BigRational {
    v.as_rational().cloned().expect("nonnegative rational model")
}

/// Builds and solves the feasibility LP for a fixed relation.
fn simulation_for_relation(
    d: &EmpiricalModel,
    e: &EmpiricalModel,
    relation: &SimplicialRelation,
    deadline: Option<Instant>,
) -> Result<Attempt, AnalysisError> {
    let source = d.scenario();
    let target = e.scenario();
    let all = target.measurements();
    let image = relation.total_image();
    let inputs = source.sections_of(&image).expect("image lies in the source");
    let outputs = target.global_sections();
    let input_index: BTreeMap<&Section, usize> = inputs.iter().enumerate().map(|(i, s)| (s, i)).collect();

    // Per target context: d|π(C), e_C, and the inputs seen with positive weight.
    struct ContextData<'a> {
        context: &'a Face,
        preimage: Face,
        source_marginal: Distribution<Section>,
        table: &'a Distribution<Section>,
    }
    let mut contexts = Vec::new();
    for (c, table) in e.tables() {
        let preimage = relation.apply(c);
        let source_marginal = d.marginal(&preimage)?;
        contexts.push(ContextData {
            context: c,
            preimage,
            source_marginal,
            table,
        });
    }

    // Presolve: v(s,t) = 0 whenever some context sees s with positive weight
    // while t restricts to an impossible outcome there.
    let mut var_of: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut lp = LinearProgram::new();
    for (i, s) in inputs.iter().enumerate() {
        for (j, t) in outputs.iter().enumerate() {
            let forbidden = contexts
                .iter()
                .any(|cd| cd.source_marginal.contains(&s.project(&cd.preimage)) && !cd.table.contains(&t.project(cd.context)));
            if !forbidden {
                var_of.insert((i, j), lp.add_variable(format!("v[{s}][{t}]")));
            }
        }
    }

    let mut rows: HashSet<(Vec<(usize, BigRational)>, BigRational)> = HashSet::new();
    let mut constraints: Vec<(Vec<(usize, BigRational)>, BigRational)> = Vec::new();
    let mut push_row = |coeffs: Vec<(usize, BigRational)>, rhs: BigRational| -> bool {
        let mut coeffs = coeffs;
        coeffs.sort_by_key(|(j, _)| *j);
        if coeffs.is_empty() {
            return rhs.is_zero();
        }
        if rows.insert((coeffs.clone(), rhs.clone())) {
            constraints.push((coeffs, rhs));
        }
        true
    };

    // Normalization.
    for i in 0..inputs.len() {
        let coeffs: Vec<_> = (0..outputs.len())
            .filter_map(|j| var_of.get(&(i, j)).map(|&v| (v, BigRational::one())))
            .collect();
        if !push_row(coeffs, BigRational::one()) {
            return Ok(Attempt::Infeasible);
        }
    }

    // Naturality: the marginal on U_y = {x : y ∉ π(x)} ignores coordinate y.
    let first = source.first_section(&image);
    for y in &image {
        let reference = first.get(y).expect("first section is total");
        let avoiding: Face = all
            .iter()
            .filter(|x| !relation.image_of(x).is_some_and(|ys| ys.contains(y)))
            .cloned()
            .collect();
        if avoiding.is_empty() {
            continue;
        }
        let groups: Vec<Section> = outputs.iter().map(|t| t.project(&avoiding)).collect();
        for (i, s) in inputs.iter().enumerate() {
            if s.get(y) == Some(reference) {
                continue;
            }
            let mut base = s.clone();
            base.insert(y.clone(), reference);
            let b = input_index[&base];
            let mut by_group: BTreeMap<&Section, Vec<(usize, BigRational)>> = BTreeMap::new();
            for (j, g) in groups.iter().enumerate() {
                let entry = by_group.entry(g).or_default();
                if let Some(&v) = var_of.get(&(i, j)) {
                    entry.push((v, BigRational::one()));
                }
                if let Some(&v) = var_of.get(&(b, j)) {
                    entry.push((v, -BigRational::one()));
                }
            }
            for (_, coeffs) in by_group {
                if !push_row(coeffs, BigRational::zero()) {
                    return Ok(Attempt::Infeasible);
                }
            }
        }
    }

    // Pushforward: Σ_{s'} d(s') Σ_{t|C = c} v(ext(s'), t) = e_C(c).
    for cd in &contexts {
        let rest: Face = image.difference(&cd.preimage).cloned().collect();
        let filler = source.first_section(&rest);
        let mut by_section: BTreeMap<Section, Vec<(usize, BigRational)>> = BTreeMap::new();
        for (sp, w) in cd.source_marginal.iter() {
            let i = input_index[&filler.merge(sp)];
            let w = rational(w);
            for (j, t) in outputs.iter().enumerate() {
                if let Some(&v) = var_of.get(&(i, j)) {
                    by_section.entry(t.project(cd.context)).or_default().push((v, w.clone()));
                }
            }
        }
        for c in target.sections_of(cd.context).expect("context is known") {
            let rhs = rational(&cd.table.weight(&c));
            let coeffs = by_section.remove(&c).unwrap_or_default();
            if !push_row(coeffs, rhs) {
                return Ok(Attempt::Infeasible);
            }
        }
    }

    for (coeffs, rhs) in constraints {
        lp.add_constraint(coeffs, Relation::Eq, rhs).expect("declared variables");
    }
    let solution = match lp.solve_until(deadline) {
        Err(_) => return Ok(Attempt::TimedOut),
        Ok(LpOutcome::Infeasible) => return Ok(Attempt::Infeasible),
        Ok(LpOutcome::Unbounded) => unreachable!("feasibility problems have a zero objective"),
        Ok(LpOutcome::Optimal(sol)) => sol,
    };

    let kind = SemifieldKind::NonNegRational;
    let mut top = BTreeMap::new();
    for (i, s) in inputs.iter().enumerate() {
        let entries: Vec<(Section, SemifieldValue)> = outputs
            .iter()
            .enumerate()
            .filter_map(|(j, t)| {
                let v = &solution.values[*var_of.get(&(i, j))?];
                (!v.is_zero()).then(|| (t.clone(), SemifieldValue::NonNeg(v.clone())))
            })
            .collect();
        top.insert(s.clone(), Distribution::new(kind, entries)?);
    }
    let morphism = Morphism::new(source.clone(), target.clone(), kind, relation.clone(), top)?;
    Ok(Attempt::Found(Box::new(Simulation::new(morphism, d.clone(), e.clone())?)))
}
