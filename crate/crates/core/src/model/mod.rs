//! No-signalling empirical models over a scenario.

mod json;
pub mod zoo;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

pub use json::{dist_from_json, dist_to_json, ModelJson, SectionWeightJson, TableJson};

use crate::distribution::{Distribution, DistributionError};
use crate::scenario::{Face, FaceDisplay, Scenario, ScenarioError, Section, LEFT_TAG, RIGHT_TAG};
use crate::semifield::{SemifieldError, SemifieldHom, SemifieldKind, SemifieldValue};

/// Per-measurement outcome relabelings used for coarse-graining.
pub type OutcomeMaps = BTreeMap<String, BTreeMap<String, String>>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Distribution(#[from] DistributionError),
    #[error("no table for context {0}")]
    MissingTable(FaceDisplay),
    #[error("context {0} has more than one table")]
    DuplicateTable(FaceDisplay),
    #[error("table for {0} is not a context of the scenario")]
    UnexpectedTable(FaceDisplay),
    #[error("table for context {context} contains the section {section}, which is not a section of it")]
    WrongSectionSpace { context: FaceDisplay, section: Section },
    #[error("tables for {first} and {second} disagree at {section} on their overlap")]
    SignallingWitness {
        first: FaceDisplay,
        second: FaceDisplay,
        section: Section,
    },
    #[error("expected semifield {expected}, found {found}")]
    InstanceMismatch { expected: SemifieldKind, found: SemifieldKind },
    #[error("models live on different scenarios")]
    ScenarioMismatch,
    #[error("outcome map for {measurement:?} does not cover outcome {outcome:?}")]
    PartialOutcomeMap { measurement: String, outcome: String },
    #[error("unknown model {0:?}")]
    UnknownModel(String),
}

impl From<SemifieldError> for ModelError {
    fn from(e: SemifieldError) -> Self {
        ModelError::Distribution(e.into())
    }
}

/// A compatible family `(e_C)_{C∈M}` of distributions over context sections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmpiricalModel {
    scenario: Scenario,
    kind: SemifieldKind,
    tables: BTreeMap<Face, Distribution<Section>>,
}

impl EmpiricalModel {
    /// Builds a model, checking that there is exactly one table per context,
    /// every table lives on its context's sections, and tables agree on overlaps.
    pub fn new(
        scenario: Scenario,
        kind: SemifieldKind,
        tables: BTreeMap<Face, Distribution<Section>>,
    ) -> Result<Self, ModelError> {
        let model = EmpiricalModel { scenario, kind, tables };
        model.validate()?;
        Ok(model)
    }

    /// Builds the model whose tables are the context marginals of `global`,
    /// which is then non-contextual by construction.
    pub fn from_global(scenario: Scenario, global: &Distribution<Section>) -> Result<Self, ModelError> {
        let all = scenario.measurements();
        for g in global.support() {
            scenario.check_section(g, &all)?;
        }
        let tables = scenario
            .cover()
            .iter()
            .map(|c| (c.clone(), global.map(|g| g.project(c))))
            .collect();
        Ok(EmpiricalModel {
            scenario,
            kind: global.kind(),
            tables,
        })
    }

    /// The deterministic model assigning `section` with certainty.
    pub fn dirac(scenario: Scenario, kind: SemifieldKind, section: &Section) -> Result<Self, ModelError> {
        Self::from_global(scenario, &Distribution::unit(kind, section.clone()))
    }

    /// The unique model on the empty scenario.
    pub fn terminal(kind: SemifieldKind) -> Self {
        Self::dirac(Scenario::empty(), kind, &Section::empty()).expect("empty section is global")
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let cover = self.scenario.cover();
        if let Some(extra) = self.tables.keys().find(|c| !cover.contains(*c)) {
            return Err(ModelError::UnexpectedTable(extra.into()));
        }
        for context in cover {
            let table = self
                .tables
                .get(context)
                .ok_or_else(|| ModelError::MissingTable(context.into()))?;
            if table.kind() != self.kind {
                return Err(ModelError::InstanceMismatch {
                    expected: self.kind,
                    found: table.kind(),
                });
            }
            for s in table.support() {
                if self.scenario.check_section(s, context).is_err() {
                    return Err(ModelError::WrongSectionSpace {
                        context: context.into(),
                        section: s.clone(),
                    });
                }
            }
        }
        let contexts: Vec<&Face> = cover.iter().collect();
        for (i, c) in contexts.iter().enumerate() {
            for d in &contexts[i + 1..] {
                let overlap: Face = c.intersection(d).cloned().collect();
                let left = self.tables[*c].map(|s| s.project(&overlap));
                let right = self.tables[*d].map(|s| s.project(&overlap));
                if left != right {
                    let section = left
                        .support()
                        .chain(right.support())
                        .find(|s| left.weight(s) != right.weight(s))
                        .cloned()
                        .expect("distinct distributions differ somewhere");
                    return Err(ModelError::SignallingWitness {
                        first: (*c).into(),
                        second: (*d).into(),
                        section,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn kind(&self) -> SemifieldKind {
        self.kind
    }

    pub fn tables(&self) -> &BTreeMap<Face, Distribution<Section>> {
        &self.tables
    }

    pub fn table(&self, context: &Face) -> Option<&Distribution<Section>> {
        self.tables.get(context)
    }

    /// `e|_U`, computed from the first covering context.
    pub fn marginal(&self, subset: &Face) -> Result<Distribution<Section>, ModelError> {
        if !self.scenario.is_face(subset)? {
            return Err(ScenarioError::NotAFace(subset.into()).into());
        }
        let context = self.scenario.covering_context(subset).expect("subset is a face");
        Ok(self.tables[context].map(|s| s.project(subset)))
    }

    /// `e|_U` computed through every covering context; all results agree for
    /// a valid model.
    pub fn marginals_via_all_contexts(&self, subset: &Face) -> Vec<Distribution<Section>> {
        self.tables
            .iter()
            .filter(|(c, _)| subset.is_subset(c))
            .map(|(_, t)| t.map(|s| s.project(subset)))
            .collect()
    }

    /// Whether every table is a point mass.
    pub fn is_deterministic(&self) -> bool {
        self.tables.values().all(|t| t.len() == 1)
    }

    /// `e|_Y` on the subscenario induced by `subset`.
    pub fn restrict(&self, subset: &Face) -> Result<EmpiricalModel, ModelError> {
        let scenario = self.scenario.restrict(subset)?;
        let mut tables = BTreeMap::new();
        for context in scenario.cover() {
            tables.insert(context.clone(), self.marginal(context)?);
        }
        Ok(EmpiricalModel {
            scenario,
            kind: self.kind,
            tables,
        })
    }

    /// `e/f`: pushes each table through the outcome relabelings. Measurements
    /// without a map keep their outcomes; the new outcome set of a mapped
    /// measurement is the image of its map.
    pub fn coarse_grain(&self, maps: &OutcomeMaps) -> Result<EmpiricalModel, ModelError> {
        let scenario = coarse_scenario(&self.scenario, maps)?;
        let tables = self
            .tables
            .iter()
            .map(|(c, t)| (c.clone(), t.map(|s| apply_outcome_maps(s, maps))))
            .collect();
        Ok(EmpiricalModel {
            scenario,
            kind: self.kind,
            tables,
        })
    }

    /// Contextwise convex mixture `Σ r_i·e^i`.
    pub fn mix(terms: &[(SemifieldValue, EmpiricalModel)]) -> Result<EmpiricalModel, ModelError> {
        let first = &terms.first().ok_or(DistributionError::EmptyMixture)?.1;
        for (_, m) in terms {
            if m.scenario != first.scenario {
                return Err(ModelError::ScenarioMismatch);
            }
            if m.kind != first.kind {
                return Err(ModelError::InstanceMismatch {
                    expected: first.kind,
                    found: m.kind,
                });
            }
        }
        let mut tables = BTreeMap::new();
        for context in first.scenario.cover() {
            let parts: Vec<_> = terms.iter().map(|(r, m)| (r.clone(), m.tables[context].clone())).collect();
            tables.insert(context.clone(), Distribution::convex(&parts)?);
        }
        Ok(EmpiricalModel {
            scenario: first.scenario.clone(),
            kind: first.kind,
            tables,
        })
    }

    /// `(e⊗d)_{C⊔D} = e_C ⊗ d_D` on the tagged tensor scenario.
    pub fn tensor(&self, other: &EmpiricalModel) -> Result<EmpiricalModel, ModelError> {
        if self.kind != other.kind {
            return Err(ModelError::InstanceMismatch {
                expected: self.kind,
                found: other.kind,
            });
        }
        let scenario = self.scenario.tensor(&other.scenario);
        let mut tables = BTreeMap::new();
        for (c, t) in &self.tables {
            for (d, u) in &other.tables {
                let mut joined = crate::scenario::tag_face(c, LEFT_TAG);
                joined.extend(crate::scenario::tag_face(d, RIGHT_TAG));
                let table = t
                    .product(u)?
                    .map(|(s, r)| s.tagged(LEFT_TAG).merge(&r.tagged(RIGHT_TAG)));
                tables.insert(joined, table);
            }
        }
        Ok(EmpiricalModel {
            scenario,
            kind: self.kind,
            tables,
        })
    }

    /// Applies a semifield homomorphism to every table; with the collapse
    /// `R⁺ → B` this is the possibilistic collapse.
    pub fn collapse(&self, hom: SemifieldHom) -> Result<EmpiricalModel, ModelError> {
        if hom.source() != self.kind {
            return Err(ModelError::InstanceMismatch {
                expected: hom.source(),
                found: self.kind,
            });
        }
        let mut tables = BTreeMap::new();
        for (c, t) in &self.tables {
            tables.insert(c.clone(), t.apply_hom(hom)?);
        }
        Ok(EmpiricalModel {
            scenario: self.scenario.clone(),
            kind: hom.target(),
            tables,
        })
    }

    /// Relabels the scenario's measurements with a tag (`x ↦ tag x`).
    pub fn tagged(&self, tag: &str) -> EmpiricalModel {
        EmpiricalModel {
            scenario: self.scenario.tagged(tag),
            kind: self.kind,
            tables: self
                .tables
                .iter()
                .map(|(c, t)| (crate::scenario::tag_face(c, tag), t.map(|s| s.tagged(tag))))
                .collect(),
        }
    }

    /// Whether a global section restricts into the support of every table.
    pub fn is_consistent_global(&self, g: &Section) -> bool {
        self.tables.iter().all(|(c, t)| t.contains(&g.project(c)))
    }
}

/// The scenario after relabeling outcomes along `maps`.
pub fn coarse_scenario(scenario: &Scenario, maps: &OutcomeMaps) -> Result<Scenario, ModelError> {
    let mut outcomes = scenario.outcome_map().clone();
    for (x, f) in maps {
        let old = scenario
            .outcomes(x)
            .ok_or_else(|| ScenarioError::UnknownMeasurement(x.clone()))?;
        let mut image = BTreeSet::new();
        for o in old {
            let mapped = f.get(o).ok_or_else(|| ModelError::PartialOutcomeMap {
                measurement: x.clone(),
                outcome: o.clone(),
            })?;
            image.insert(mapped.clone());
        }
        outcomes.insert(x.clone(), image);
    }
    Ok(scenario.with_outcomes(outcomes)?)
}

pub fn apply_outcome_maps(s: &Section, maps: &OutcomeMaps) -> Section {
    Section::from_pairs(s.iter().map(|(x, o)| {
        let mapped = maps.get(x).and_then(|f| f.get(o)).unwrap_or(o);
        (x.clone(), mapped.clone())
    }))
}
