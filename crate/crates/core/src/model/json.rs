use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{EmpiricalModel, ModelError};
use crate::distribution::Distribution;
use crate::scenario::{Face, Scenario, ScenarioJson, Section};
use crate::semifield::{SemifieldKind, SemifieldValue};

/// Wire form of a model:
/// `{"scenario": .., "semifield": .., "tables": [{"context": [..], "dist": [{"s": {..}, "p": "1/2"}]}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelJson {
    pub scenario: ScenarioJson,
    pub semifield: SemifieldKind,
    pub tables: Vec<TableJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableJson {
    pub context: Vec<String>,
    pub dist: Vec<SectionWeightJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionWeightJson {
    pub s: Section,
    pub p: serde_json::Value,
}

impl SectionWeightJson {
    pub fn from_entry(s: &Section, p: &SemifieldValue) -> Self {
        SectionWeightJson {
            s: s.clone(),
            p: p.to_json(),
        }
    }
}

/// Reads a list of weighted sections as a distribution of the given instance.
pub fn dist_from_json(
    kind: SemifieldKind,
    entries: Vec<SectionWeightJson>,
) -> Result<Distribution<Section>, ModelError> {
    let mut parsed = Vec::with_capacity(entries.len());
    for e in entries {
        parsed.push((e.s, SemifieldValue::from_json(kind, &e.p)?));
    }
    Ok(Distribution::new(kind, parsed)?)
}

pub fn dist_to_json(d: &Distribution<Section>) -> Vec<SectionWeightJson> {
    d.iter().map(|(s, p)| SectionWeightJson::from_entry(s, p)).collect()
}

impl TryFrom<ModelJson> for EmpiricalModel {
    type Error = ModelError;

    fn try_from(raw: ModelJson) -> Result<Self, ModelError> {
        let scenario = Scenario::try_from(raw.scenario)?;
        let mut tables = BTreeMap::new();
        for t in raw.tables {
            let context: Face = t.context.into_iter().collect();
            let dist = dist_from_json(raw.semifield, t.dist)?;
            if tables.insert(context.clone(), dist).is_some() {
                return Err(ModelError::DuplicateTable((&context).into()));
            }
        }
        EmpiricalModel::new(scenario, raw.semifield, tables)
    }
}

impl From<&EmpiricalModel> for ModelJson {
    fn from(m: &EmpiricalModel) -> Self {
        ModelJson {
            scenario: m.scenario.clone().into(),
            semifield: m.kind,
            tables: m
                .tables
                .iter()
                .map(|(c, t)| TableJson {
                    context: c.iter().cloned().collect(),
                    dist: dist_to_json(t),
                })
                .collect(),
        }
    }
}

impl Serialize for EmpiricalModel {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ModelJson::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for EmpiricalModel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = ModelJson::deserialize(deserializer)?;
        EmpiricalModel::try_from(raw).map_err(serde::de::Error::custom)
    }
}
