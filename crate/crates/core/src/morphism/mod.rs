//! Stochastic morphisms `(π, σ)` between scenarios and simulations between
//! empirical models.
//!
//! A morphism from the scenario of `d` (measurements `Y`) to the scenario of
//! `e` (measurements `X`) is a simplicial relation `π: X → Y` together with a
//! natural family `σ_U: E_Y(π(U)) → D(E_X(U))`. The family is stored through
//! its top component `σ_X`; every other component is the marginal
//! `σ_U(s) = σ_X(s')|_U` for any extension `s'` of `s` to `π(X)`. Naturality
//! is precisely the statement that this marginal does not depend on the
//! chosen extension, and [`Morphism::new`] checks it.

mod constructors;
mod json;

use std::collections::BTreeMap;

use thiserror::Error;

pub use constructors::{apply_local_parts, tabulate_local_parts, LocalParts};
pub use json::{ComponentJson, ComponentRowJson, MorphismJson, OutcomeWeightJson, SimulationJson};

use crate::distribution::{Distribution, DistributionError};
use crate::model::{EmpiricalModel, ModelError};
use crate::scenario::{Face, FaceDisplay, Scenario, ScenarioError, Section, SimplicialRelation};
use crate::semifield::{SemifieldError, SemifieldHom, SemifieldKind};

/// Components indexed by subset of the target measurements, then by input section.
pub type ComponentTable = BTreeMap<Face, BTreeMap<Section, Distribution<Section>>>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MorphismError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Distribution(#[from] DistributionError),
    #[error("no component for {face} at input {given}")]
    MissingComponent { face: FaceDisplay, given: Section },
    #[error("component listed for {0}, which is neither a face nor the full measurement set")]
    UnexpectedComponent(FaceDisplay),
    #[error("component at {face} on input {given} is not a distribution over {face}-sections")]
    NotNormalized { face: FaceDisplay, given: Section },
    #[error("naturality fails between {smaller} and {larger} at input {given}")]
    NaturalityViolation {
        smaller: FaceDisplay,
        larger: FaceDisplay,
        given: Section,
    },
    #[error("scenarios do not match")]
    ScenarioMismatch,
    #[error("morphisms have different relations")]
    RelationMismatch,
    #[error("expected semifield {expected}, found {found}")]
    InstanceMismatch { expected: SemifieldKind, found: SemifieldKind },
    #[error("{first} and {second} do not partition the target measurements")]
    NotAPartition { first: FaceDisplay, second: FaceDisplay },
    #[error("local part for {measurement:?} is undefined or invalid at {given}")]
    PartialLocalPart { measurement: String, given: Section },
    #[error("global distribution does not reproduce the table of {0}")]
    NotAGlobalExplanation(FaceDisplay),
    #[error("pushforward differs from the target model at context {0}")]
    NotASimulation(FaceDisplay),
}

impl From<SemifieldError> for MorphismError {
    fn from(e: SemifieldError) -> Self {
        MorphismError::Distribution(e.into())
    }
}

/// A stochastic morphism of scenarios, `source` (Y) to `target` (X).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Morphism {
    source: Scenario,
    target: Scenario,
    kind: SemifieldKind,
    relation: SimplicialRelation,
    top: BTreeMap<Section, Distribution<Section>>,
}

impl Morphism {
    /// Builds a morphism from its top component `σ_X: E_Y(π(X)) → D(E_X(X))`
    /// and validates it.
    pub fn new(
        source: Scenario,
        target: Scenario,
        kind: SemifieldKind,
        relation: SimplicialRelation,
        top: BTreeMap<Section, Distribution<Section>>,
    ) -> Result<Self, MorphismError> {
        let m = Morphism {
            source,
            target,
            kind,
            relation,
            top,
        };
        m.validate()?;
        Ok(m)
    }

    /// Builds a morphism from components on every face of the target (and on
    /// the full measurement set when that is not a face). All listed
    /// components must agree with the marginals of the top one.
    pub fn from_components(
        source: Scenario,
        target: Scenario,
        kind: SemifieldKind,
        relation: SimplicialRelation,
        mut components: ComponentTable,
    ) -> Result<Self, MorphismError> {
        let all = target.measurements();
        let faces = target.faces();
        if let Some(extra) = components.keys().find(|u| **u != all && !faces.contains(*u)) {
            return Err(MorphismError::UnexpectedComponent(extra.into()));
        }
        for u in faces.iter().chain(std::iter::once(&all)) {
            if !components.contains_key(u) {
                return Err(MorphismError::MissingComponent {
                    face: u.into(),
                    given: Section::empty(),
                });
            }
        }
        let top = components.remove(&all).expect("checked above");
        let m = Morphism::new(source, target, kind, relation, top)?;
        for (u, rows) in &components {
            let image = m.relation.apply(u);
            let inputs = m.source.sections_of(&image)?;
            for s in &inputs {
                let given = rows.get(s).ok_or_else(|| MorphismError::MissingComponent {
                    face: u.into(),
                    given: s.clone(),
                })?;
                check_output(&m.target, kind, u, s, given)?;
                if *given != m.component(u, s)? {
                    return Err(MorphismError::NaturalityViolation {
                        smaller: u.into(),
                        larger: (&all).into(),
                        given: s.clone(),
                    });
                }
            }
            if rows.len() != inputs.len() {
                let stray = rows.keys().find(|s| !inputs.contains(s)).expect("extra row");
                return Err(ScenarioError::InvalidSection {
                    section: stray.clone(),
                    domain: (&image).into(),
                }
                .into());
            }
        }
        Ok(m)
    }

    /// Checks simpliciality of `π`, completeness and normalization of the top
    /// component, and naturality.
    ///
    /// Naturality is tested one source coordinate at a time: changing the
    /// input at `y ∈ π(X)` must not change the marginal on
    /// `U_y = {x : y ∉ π(x)}`, the largest subset whose image avoids `y`.
    /// Chaining such single-coordinate changes gives independence of the
    /// extension for every subset.
    pub fn validate(&self) -> Result<(), MorphismError> {
        self.source.validate()?;
        self.target.validate()?;
        self.relation.validate(&self.target, &self.source)?;
        let all = self.target.measurements();
        let image = self.relation.apply(&all);
        let inputs = self.source.sections_of(&image)?;
        for s in &inputs {
            let out = self.top.get(s).ok_or_else(|| MorphismError::MissingComponent {
                face: (&all).into(),
                given: s.clone(),
            })?;
            check_output(&self.target, self.kind, &all, s, out)?;
        }
        if self.top.len() != inputs.len() {
            let stray = self.top.keys().find(|s| !inputs.contains(s)).expect("extra row");
            return Err(ScenarioError::InvalidSection {
                section: stray.clone(),
                domain: (&image).into(),
            }
            .into());
        }
        let first = self.source.first_section(&image);
        for y in &image {
            let reference = first.get(y).expect("first section is total");
            let avoiding: Face = all
                .iter()
                .filter(|x| !self.relation.image_of(x).is_some_and(|ys| ys.contains(y)))
                .cloned()
                .collect();
            for s in &inputs {
                if s.get(y) == Some(reference) {
                    continue;
                }
                let mut base = s.clone();
                base.insert(y.clone(), reference);
                let lhs = self.top[s].map(|t| t.project(&avoiding));
                let rhs = self.top[&base].map(|t| t.project(&avoiding));
                if lhs != rhs {
                    return Err(MorphismError::NaturalityViolation {
                        smaller: (&avoiding).into(),
                        larger: (&all).into(),
                        given: s.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    /// The identity morphism on a scenario.
    pub fn identity(scenario: &Scenario, kind: SemifieldKind) -> Morphism {
        let all = scenario.measurements();
        let top = scenario
            .sections_of(&all)
            .expect("measurements are known")
            .into_iter()
            .map(|s| (s.clone(), Distribution::unit(kind, s)))
            .collect();
        Morphism {
            source: scenario.clone(),
            target: scenario.clone(),
            kind,
            relation: SimplicialRelation::identity(scenario),
            top,
        }
    }

    pub fn source(&self) -> &Scenario {
        &self.source
    }

    pub fn target(&self) -> &Scenario {
        &self.target
    }

    pub fn kind(&self) -> SemifieldKind {
        self.kind
    }

    pub fn relation(&self) -> &SimplicialRelation {
        &self.relation
    }

    /// The top component `σ_X`, keyed by `π(X)`-sections.
    pub fn top(&self) -> &BTreeMap<Section, Distribution<Section>> {
        &self.top
    }

    /// Whether every component output is a point mass.
    pub fn is_deterministic(&self) -> bool {
        self.top.values().all(|d| d.len() == 1)
    }

    /// `σ_U(s)` for any subset `U` of the target measurements and any
    /// `π(U)`-section `s`.
    pub fn component(&self, subset: &Face, given: &Section) -> Result<Distribution<Section>, MorphismError> {
        let image = self.relation.apply(subset);
        self.source.check_section(given, &image)?;
        let full = self.relation.total_image();
        let rest: Face = full.difference(&image).cloned().collect();
        let extended = self.source.first_section(&rest).merge(given);
        let top = &self.top[&extended];
        if *subset == self.target.measurements() {
            return Ok(top.clone());
        }
        Ok(top.map(|t| t.project(subset)))
    }

    /// The components on every face of the target, plus the top component.
    pub fn components(&self) -> ComponentTable {
        let mut out = ComponentTable::new();
        let all = self.target.measurements();
        for u in self.target.faces().into_iter().chain(std::iter::once(all)) {
            if out.contains_key(&u) {
                continue;
            }
            let inputs = self
                .source
                .sections_of(&self.relation.apply(&u))
                .expect("image lies in the source");
            let rows = inputs
                .into_iter()
                .map(|s| {
                    let d = self.component(&u, &s).expect("valid input");
                    (s, d)
                })
                .collect();
            out.insert(u, rows);
        }
        out
    }

    /// `σ_* d`: for each target context `C`, the Kleisli image of `d|_{π(C)}`
    /// under `σ_C`.
    pub fn pushforward(&self, model: &EmpiricalModel) -> Result<EmpiricalModel, MorphismError> {
        if *model.scenario() != self.source {
            return Err(MorphismError::ScenarioMismatch);
        }
        if model.kind() != self.kind {
            return Err(MorphismError::InstanceMismatch {
                expected: self.kind,
                found: model.kind(),
            });
        }
        let mut tables = BTreeMap::new();
        for context in self.target.cover() {
            tables.insert(context.clone(), self.push_context(model, context)?);
        }
        Ok(EmpiricalModel::new(self.target.clone(), self.kind, tables)?)
    }

    fn push_context(&self, model: &EmpiricalModel, context: &Face) -> Result<Distribution<Section>, MorphismError> {
        let image = self.relation.apply(context);
        model.marginal(&image)?.try_bind(|s| self.component(context, s))
    }

    /// Whether `σ_* d = e`; on failure, the first context where they differ.
    pub fn simulates(&self, d: &EmpiricalModel, e: &EmpiricalModel) -> Result<(), MorphismError> {
        if *e.scenario() != self.target {
            return Err(MorphismError::ScenarioMismatch);
        }
        if *d.scenario() != self.source {
            return Err(MorphismError::ScenarioMismatch);
        }
        for context in self.target.cover() {
            let pushed = self.push_context(d, context)?;
            if Some(&pushed) != e.table(context) {
                return Err(MorphismError::NotASimulation(context.into()));
            }
        }
        Ok(())
    }

    pub fn is_simulation(&self, d: &EmpiricalModel, e: &EmpiricalModel) -> bool {
        self.simulates(d, e).is_ok()
    }

    /// `g ∘ f` where `f = self` runs first: relations compose setwise and
    /// components compose in the Kleisli category.
    pub fn then(&self, g: &Morphism) -> Result<Morphism, MorphismError> {
        compose(g, self)
    }

    /// Applies a semifield homomorphism to every component.
    pub fn collapse(&self, hom: SemifieldHom) -> Result<Morphism, MorphismError> {
        if hom.source() != self.kind {
            return Err(MorphismError::InstanceMismatch {
                expected: hom.source(),
                found: self.kind,
            });
        }
        let mut top = BTreeMap::new();
        for (s, d) in &self.top {
            top.insert(s.clone(), d.apply_hom(hom)?);
        }
        Ok(Morphism {
            source: self.source.clone(),
            target: self.target.clone(),
            kind: hom.target(),
            relation: self.relation.clone(),
            top,
        })
    }

    /// Reinterprets the same data with a different source scenario over the
    /// same outcome sets (used when the source is restricted to `π(X)`).
    fn with_source(&self, source: Scenario) -> Result<Morphism, MorphismError> {
        Morphism::new(source, self.target.clone(), self.kind, self.relation.clone(), self.top.clone())
    }
}

/// `g ∘ f`: `f` maps `Y → X`-models, `g` maps `X → W`-models.
pub fn compose(g: &Morphism, f: &Morphism) -> Result<Morphism, MorphismError> {
    if g.source != f.target {
        return Err(MorphismError::ScenarioMismatch);
    }
    if g.kind != f.kind {
        return Err(MorphismError::InstanceMismatch {
            expected: f.kind,
            found: g.kind,
        });
    }
    let relation = g.relation.then(&f.relation);
    let middle = g.relation.total_image();
    let image = relation.total_image();
    let mut top = BTreeMap::new();
    for s in f.source.sections_of(&image)? {
        let inner = f.component(&middle, &s)?;
        let out = inner.try_bind(|t| Ok::<_, MorphismError>(g.top[t].clone()))?;
        top.insert(s, out);
    }
    Morphism::new(f.source.clone(), g.target.clone(), f.kind, relation, top)
}

fn check_output(
    target: &Scenario,
    kind: SemifieldKind,
    subset: &Face,
    given: &Section,
    out: &Distribution<Section>,
) -> Result<(), MorphismError> {
    if out.kind() != kind {
        return Err(MorphismError::InstanceMismatch {
            expected: kind,
            found: out.kind(),
        });
    }
    if out.support().any(|t| target.check_section(t, subset).is_err()) {
        return Err(MorphismError::NotNormalized {
            face: subset.into(),
            given: given.clone(),
        });
    }
    Ok(())
}

/// A morphism together with models `d`, `e` such that `σ_* d = e`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Simulation {
    morphism: Morphism,
    source: EmpiricalModel,
    target: EmpiricalModel,
}

impl Simulation {
    /// Checks `σ_* d = e` exactly.
    pub fn new(morphism: Morphism, source: EmpiricalModel, target: EmpiricalModel) -> Result<Self, MorphismError> {
        morphism.simulates(&source, &target)?;
        Ok(Simulation {
            morphism,
            source,
            target,
        })
    }

    /// Builds the simulation `d → σ_* d`.
    pub fn push(morphism: Morphism, source: EmpiricalModel) -> Result<Self, MorphismError> {
        let target = morphism.pushforward(&source)?;
        Ok(Simulation {
            morphism,
            source,
            target,
        })
    }

    pub fn identity(model: &EmpiricalModel) -> Simulation {
        Simulation {
            morphism: Morphism::identity(model.scenario(), model.kind()),
            source: model.clone(),
            target: model.clone(),
        }
    }

    pub fn morphism(&self) -> &Morphism {
        &self.morphism
    }

    pub fn source(&self) -> &EmpiricalModel {
        &self.source
    }

    pub fn target(&self) -> &EmpiricalModel {
        &self.target
    }

    pub fn into_parts(self) -> (Morphism, EmpiricalModel, EmpiricalModel) {
        (self.morphism, self.source, self.target)
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &Simulation) -> Result<Simulation, MorphismError> {
        if next.source != self.target {
            return Err(MorphismError::ScenarioMismatch);
        }
        let morphism = compose(&next.morphism, &self.morphism)?;
        Simulation::new(morphism, self.source.clone(), next.target.clone())
    }

    /// Image of the simulation under a semifield homomorphism.
    pub fn collapse(&self, hom: SemifieldHom) -> Result<Simulation, MorphismError> {
        Simulation::new(
            self.morphism.collapse(hom)?,
            self.source.collapse(hom)?,
            self.target.collapse(hom)?,
        )
    }
}
