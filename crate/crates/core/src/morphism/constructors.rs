use std::collections::BTreeMap;

use super::{Morphism, MorphismError, Simulation};
use crate::distribution::Distribution;
use crate::model::{apply_outcome_maps, coarse_scenario, EmpiricalModel, OutcomeMaps};
use crate::scenario::{Face, Scenario, ScenarioError, Section, SimplicialRelation, LEFT_TAG, RIGHT_TAG};
use crate::semifield::{SemifieldKind, SemifieldValue};

/// Deterministic local functions `σ_x: E_Y(π(x)) → O_x`, tabulated.
pub type LocalParts = BTreeMap<String, BTreeMap<Section, String>>;

/// Tabulates local functions given as a closure `(x, s) ↦ outcome`.
pub fn tabulate_local_parts<F>(
    source: &Scenario,
    target: &Scenario,
    relation: &SimplicialRelation,
    mut f: F,
) -> Result<LocalParts, MorphismError>
where
    F: FnMut(&str, &Section) -> String,
{
    let mut parts = LocalParts::new();
    for x in target.measurements() {
        let image = relation
            .image_of(&x)
            .ok_or_else(|| ScenarioError::UnknownMeasurement(x.clone()))?;
        let rows = source
            .sections_of(image)?
            .into_iter()
            .map(|s| {
                let o = f(&x, &s);
                (s, o)
            })
            .collect();
        parts.insert(x, rows);
    }
    Ok(parts)
}

/// Evaluates local parts on a section covering the relevant images:
/// `x ↦ σ_x(s|_{π(x)})`.
pub fn apply_local_parts(relation: &SimplicialRelation, parts: &LocalParts, given: &Section) -> Option<Section> {
    let mut out = Section::empty();
    for (x, image) in relation.image_map() {
        let o = parts.get(x)?.get(&given.restrict(image).ok()?)?;
        out.insert(x.clone(), o.clone());
    }
    Some(out)
}

impl Morphism {
    /// Glues deterministic local parts into a deterministic morphism; the
    /// component at `U` sends `s` to the point `(x ↦ σ_x(s|_{π(x)}))_{x∈U}`.
    pub fn glue_local_deterministic(
        source: &Scenario,
        target: &Scenario,
        kind: SemifieldKind,
        relation: SimplicialRelation,
        parts: &LocalParts,
    ) -> Result<Morphism, MorphismError> {
        relation.validate(target, source)?;
        for (x, image) in relation.image_map() {
            let part = parts.get(x);
            for s in source.sections_of(image)? {
                let ok = part
                    .and_then(|p| p.get(&s))
                    .is_some_and(|o| target.outcomes(x).is_some_and(|os| os.contains(o)));
                if !ok {
                    return Err(MorphismError::PartialLocalPart {
                        measurement: x.clone(),
                        given: s,
                    });
                }
            }
        }
        let image = relation.total_image();
        let mut top = BTreeMap::new();
        for s in source.sections_of(&image)? {
            let t = apply_local_parts(&relation, parts, &s).expect("parts checked total");
            top.insert(s, Distribution::unit(kind, t));
        }
        Morphism::new(source.clone(), target.clone(), kind, relation, top)
    }

    /// Glues natural families over the two blocks of a partition of the
    /// target measurements: `σ_V(s) = σ¹_{V∩U₁}(s|..) ⊗ σ²_{V∩U₂}(s|..)`.
    ///
    /// The parts' target scenarios only contribute their measurement and
    /// outcome sets; the glued morphism lands in `target`.
    pub fn glue_partition(target: &Scenario, first: &Morphism, second: &Morphism) -> Result<Morphism, MorphismError> {
        let u1 = first.target.measurements();
        let u2 = second.target.measurements();
        let all = target.measurements();
        let disjoint = u1.is_disjoint(&u2);
        let covers = u1.union(&u2).cloned().collect::<Face>() == all;
        if !disjoint || !covers {
            return Err(MorphismError::NotAPartition {
                first: (&u1).into(),
                second: (&u2).into(),
            });
        }
        for part in [first, second] {
            let block = part.target.measurements();
            if part.target.outcome_map() != target.restrict(&block)?.outcome_map() {
                return Err(MorphismError::ScenarioMismatch);
            }
        }
        if first.source != second.source {
            return Err(MorphismError::ScenarioMismatch);
        }
        if first.kind != second.kind {
            return Err(MorphismError::InstanceMismatch {
                expected: first.kind,
                found: second.kind,
            });
        }
        let mut image_map = first.relation.image_map().clone();
        image_map.extend(second.relation.image_map().clone());
        let relation = SimplicialRelation::new(image_map);
        let image1 = first.relation.total_image();
        let image2 = second.relation.total_image();
        let mut top = BTreeMap::new();
        for s in first.source.sections_of(&relation.total_image())? {
            let left = &first.top[&s.project(&image1)];
            let right = &second.top[&s.project(&image2)];
            top.insert(s, left.product(right)?.map(|(a, b)| a.merge(b)));
        }
        Morphism::new(first.source.clone(), target.clone(), first.kind, relation, top)
    }

    /// `(π, Σ r_i σ^i)` for morphisms sharing scenarios and relation.
    pub fn mix(terms: &[(SemifieldValue, Morphism)]) -> Result<Morphism, MorphismError> {
        let first = &terms
            .first()
            .ok_or(crate::distribution::DistributionError::EmptyMixture)?
            .1;
        for (_, m) in terms {
            if m.source != first.source || m.target != first.target {
                return Err(MorphismError::ScenarioMismatch);
            }
            if m.relation != first.relation {
                return Err(MorphismError::RelationMismatch);
            }
        }
        let mut top = BTreeMap::new();
        for s in first.top.keys() {
            let parts: Vec<_> = terms.iter().map(|(r, m)| (r.clone(), m.top[s].clone())).collect();
            top.insert(s.clone(), Distribution::convex(&parts)?);
        }
        Morphism::new(
            first.source.clone(),
            first.target.clone(),
            first.kind,
            first.relation.clone(),
            top,
        )
    }

    /// `(π, σ) ⊗ (ρ, τ) = (π ⊔ ρ, σ ⊗ τ)` between the tagged tensor scenarios.
    pub fn tensor(&self, other: &Morphism) -> Result<Morphism, MorphismError> {
        if self.kind != other.kind {
            return Err(MorphismError::InstanceMismatch {
                expected: self.kind,
                found: other.kind,
            });
        }
        let source = self.source.tensor(&other.source);
        let target = self.target.tensor(&other.target);
        let relation = self.relation.disjoint_union(&other.relation);
        let mut top = BTreeMap::new();
        for s in source.sections_of(&relation.total_image())? {
            let left = &self.top[&s.untagged(LEFT_TAG)];
            let right = &other.top[&s.untagged(RIGHT_TAG)];
            let joint = left
                .product(right)?
                .map(|(a, b)| a.tagged(LEFT_TAG).merge(&b.tagged(RIGHT_TAG)));
            top.insert(s, joint);
        }
        Morphism::new(source, target, self.kind, relation, top)
    }

    /// The morphism `1 → X` whose components are the marginals of a
    /// distribution on global sections of `target`.
    pub fn from_global(target: &Scenario, global: &Distribution<Section>) -> Result<Morphism, MorphismError> {
        let mut top = BTreeMap::new();
        top.insert(Section::empty(), global.clone());
        Morphism::new(
            Scenario::empty(),
            target.clone(),
            global.kind(),
            SimplicialRelation::empty_on(target),
            top,
        )
    }
}

impl Simulation {
    /// `d ⊗ d' → e ⊗ e'`.
    pub fn tensor(&self, other: &Simulation) -> Result<Simulation, MorphismError> {
        Simulation::new(
            self.morphism.tensor(&other.morphism)?,
            self.source.tensor(&other.source)?,
            self.target.tensor(&other.target)?,
        )
    }

    /// Mixes simulations out of a common source; the target is the matching
    /// mixture of targets.
    pub fn mix(terms: &[(SemifieldValue, Simulation)]) -> Result<Simulation, MorphismError> {
        let first = &terms
            .first()
            .ok_or(crate::distribution::DistributionError::EmptyMixture)?
            .1;
        if terms.iter().any(|(_, s)| s.source != first.source) {
            return Err(MorphismError::ScenarioMismatch);
        }
        let morphisms: Vec<_> = terms.iter().map(|(w, s)| (w.clone(), s.morphism.clone())).collect();
        let targets: Vec<_> = terms.iter().map(|(w, s)| (w.clone(), s.target.clone())).collect();
        Simulation::new(
            Morphism::mix(&morphisms)?,
            first.source.clone(),
            EmpiricalModel::mix(&targets)?,
        )
    }

    /// `e → e|_Y` given by the inclusion `Y ⊆ X` and identity components.
    pub fn restriction(model: &EmpiricalModel, subset: &Face) -> Result<Simulation, MorphismError> {
        let restricted = model.restrict(subset)?;
        let kind = model.kind();
        let relation = SimplicialRelation::identity(restricted.scenario());
        let top = model
            .scenario()
            .sections_of(subset)?
            .into_iter()
            .map(|s| (s.clone(), Distribution::unit(kind, s)))
            .collect();
        let morphism = Morphism::new(
            model.scenario().clone(),
            restricted.scenario().clone(),
            kind,
            relation,
            top,
        )?;
        Simulation::new(morphism, model.clone(), restricted)
    }

    /// `e → e/f`, deterministic with identity relation.
    pub fn coarse_grain(model: &EmpiricalModel, maps: &OutcomeMaps) -> Result<Simulation, MorphismError> {
        let scenario = model.scenario();
        let target = coarse_scenario(scenario, maps)?;
        let kind = model.kind();
        let top = scenario
            .global_sections()
            .into_iter()
            .map(|s| {
                let t = apply_outcome_maps(&s, maps);
                (s, Distribution::unit(kind, t))
            })
            .collect();
        let morphism = Morphism::new(
            scenario.clone(),
            target,
            kind,
            SimplicialRelation::identity(scenario),
            top,
        )?;
        let coarse = model.coarse_grain(maps)?;
        Simulation::new(morphism, model.clone(), coarse)
    }

    /// `1 → e` from a global distribution explaining `e`.
    pub fn terminal(model: &EmpiricalModel, global: &Distribution<Section>) -> Result<Simulation, MorphismError> {
        if global.kind() != model.kind() {
            return Err(MorphismError::InstanceMismatch {
                expected: model.kind(),
                found: global.kind(),
            });
        }
        let all = model.scenario().measurements();
        for g in global.support() {
            model.scenario().check_section(g, &all)?;
        }
        for (c, t) in model.tables() {
            if global.map(|g| g.project(c)) != *t {
                return Err(MorphismError::NotAGlobalExplanation(c.into()));
            }
        }
        let morphism = Morphism::from_global(model.scenario(), global)?;
        Simulation::new(morphism, EmpiricalModel::terminal(model.kind()), model.clone())
    }

    /// The simulation `e|_{X∖{x}} → e` for a Graham-reducible `x` lying in the
    /// single context `C`: `x` is resampled from `e_C(x | s|_{C∖{x}})`, or set
    /// to `fallback` (default: the first outcome) off the support.
    pub fn graham(model: &EmpiricalModel, x: &str, fallback: Option<&str>) -> Result<Simulation, MorphismError> {
        let scenario = model.scenario();
        if !scenario.has_measurement(x) {
            return Err(ScenarioError::UnknownMeasurement(x.to_string()).into());
        }
        if !scenario.graham_reducible_vertices().contains(x) {
            return Err(ScenarioError::NotReducible(x.to_string()).into());
        }
        let kind = model.kind();
        let outcomes = scenario.outcomes(x).expect("known measurement");
        let fallback = match fallback {
            Some(o) if outcomes.contains(o) => o.to_string(),
            Some(o) => {
                return Err(ScenarioError::InvalidSection {
                    section: Section::from_pairs([(x, o)]),
                    domain: (&crate::scenario::face([x])).into(),
                }
                .into())
            }
            None => outcomes.iter().next().expect("nonempty outcomes").clone(),
        };
        let context = scenario
            .cover()
            .iter()
            .find(|c| c.contains(x))
            .expect("reducible vertex lies in a context")
            .clone();
        let single = crate::scenario::face([x]);
        let mut rest_of_context = context.clone();
        rest_of_context.remove(x);
        let mut rest = scenario.measurements();
        rest.remove(x);

        let smaller = model.restrict(&rest)?;
        let source = smaller.scenario().clone();
        let joint = model.table(&context).expect("table per context").map(|t| {
            (t.project(&single), t.project(&rest_of_context))
        });
        let supported = joint.marginal_second();
        let mut local = BTreeMap::new();
        for r in source.sections_of(&rest_of_context)? {
            let d = if supported.contains(&r) {
                joint.conditional(&r)?
            } else {
                Distribution::unit(kind, Section::from_pairs([(x, fallback.as_str())]))
            };
            local.insert(r, d);
        }
        let resample = Morphism::new(
            source.clone(),
            scenario.restrict(&single)?,
            kind,
            SimplicialRelation::new([(x.to_string(), rest_of_context)].into_iter().collect()),
            local,
        )?;
        let keep = Morphism::identity(&source, kind);
        let morphism = Morphism::glue_partition(scenario, &resample, &keep)?;
        Simulation::new(morphism, smaller, model.clone())
    }

    /// Image factorization `d → d|_{π(X)} → e`.
    pub fn image_factorization(&self) -> Result<(Simulation, Simulation), MorphismError> {
        let image = self.morphism.relation.total_image();
        let first = Simulation::restriction(&self.source, &image)?;
        let second = self.morphism.with_source(first.target.scenario().clone())?;
        let second = Simulation::new(second, first.target.clone(), self.target.clone())?;
        Ok((first, second))
    }
}
