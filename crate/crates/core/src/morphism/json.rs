use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{ComponentTable, Morphism, MorphismError, Simulation};
use crate::distribution::Distribution;
use crate::model::{EmpiricalModel, ModelJson};
use crate::scenario::{Face, Scenario, ScenarioJson, Section, SimplicialRelation};
use crate::semifield::{SemifieldKind, SemifieldValue};

/// Wire form of a morphism. Components are listed for every face of the
/// target in canonical order, followed by the full measurement set when that
/// is not itself a face.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismJson {
    pub semifield: SemifieldKind,
    pub source: ScenarioJson,
    pub target: ScenarioJson,
    pub pi: BTreeMap<String, Vec<String>>,
    pub components: Vec<ComponentJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentJson {
    pub face: Vec<String>,
    pub rows: Vec<ComponentRowJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentRowJson {
    pub given: Section,
    pub dist: Vec<OutcomeWeightJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutcomeWeightJson {
    pub t: Section,
    pub p: serde_json::Value,
}

/// Wire form of a simulation `d → e`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationJson {
    pub source: ModelJson,
    pub target: ModelJson,
    pub morphism: MorphismJson,
}

impl TryFrom<MorphismJson> for Morphism {
    type Error = MorphismError;

    fn try_from(raw: MorphismJson) -> Result<Self, MorphismError> {
        let kind = raw.semifield;
        let source = Scenario::try_from(raw.source)?;
        let target = Scenario::try_from(raw.target)?;
        let relation = SimplicialRelation::new(
            raw.pi
                .into_iter()
                .map(|(x, ys)| (x, ys.into_iter().collect()))
                .collect(),
        );
        let mut components = ComponentTable::new();
        for c in raw.components {
            let face: Face = c.face.into_iter().collect();
            let mut rows = BTreeMap::new();
            for row in c.rows {
                let mut entries = Vec::with_capacity(row.dist.len());
                for w in row.dist {
                    entries.push((w.t, SemifieldValue::from_json(kind, &w.p)?));
                }
                let dist = Distribution::new(kind, entries).map_err(|_| MorphismError::NotNormalized {
                    face: (&face).into(),
                    given: row.given.clone(),
                })?;
                if rows.insert(row.given.clone(), dist).is_some() {
                    return Err(MorphismError::UnexpectedComponent((&face).into()));
                }
            }
            if components.insert(face.clone(), rows).is_some() {
                return Err(MorphismError::UnexpectedComponent((&face).into()));
            }
        }
        Morphism::from_components(source, target, kind, relation, components)
    }
}

impl From<&Morphism> for MorphismJson {
    fn from(m: &Morphism) -> Self {
        let all = m.target.measurements();
        let mut faces: Vec<Face> = m.target.faces().into_iter().collect();
        if !faces.contains(&all) {
            faces.push(all);
        }
        let mut table = m.components();
        let components = faces
            .into_iter()
            .map(|u| {
                let rows = table.remove(&u).expect("component per face");
                ComponentJson {
                    face: u.into_iter().collect(),
                    rows: rows
                        .into_iter()
                        .map(|(given, d)| ComponentRowJson {
                            given,
                            dist: d
                                .iter()
                                .map(|(t, p)| OutcomeWeightJson {
                                    t: t.clone(),
                                    p: p.to_json(),
                                })
                                .collect(),
                        })
                        .collect(),
                }
            })
            .collect();
        MorphismJson {
            semifield: m.kind,
            source: m.source.clone().into(),
            target: m.target.clone().into(),
            pi: m
                .relation
                .image_map()
                .iter()
                .map(|(x, ys)| (x.clone(), ys.iter().cloned().collect()))
                .collect(),
            components,
        }
    }
}

impl Serialize for Morphism {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        MorphismJson::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Morphism {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        Morphism::try_from(MorphismJson::deserialize(deserializer)?).map_err(serde::de::Error::custom)
    }
}

impl TryFrom<SimulationJson> for Simulation {
    type Error = MorphismError;

    fn try_from(raw: SimulationJson) -> Result<Self, MorphismError> {
        let source = EmpiricalModel::try_from(raw.source)?;
        let target = EmpiricalModel::try_from(raw.target)?;
        let morphism = Morphism::try_from(raw.morphism)?;
        Simulation::new(morphism, source, target)
    }
}

impl From<&Simulation> for SimulationJson {
    fn from(s: &Simulation) -> Self {
        SimulationJson {
            source: (&s.source).into(),
            target: (&s.target).into(),
            morphism: (&s.morphism).into(),
        }
    }
}

impl Serialize for Simulation {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        SimulationJson::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Simulation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        Simulation::try_from(SimulationJson::deserialize(deserializer)?).map_err(serde::de::Error::custom)
    }
}
