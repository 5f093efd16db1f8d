//! Loading artifacts from files or `zoo:name` URIs.

use std::fs;
use std::path::Path;

use contextuality::model::{zoo, ModelJson};
use contextuality::morphism::{MorphismJson, SimulationJson};
use contextuality::scenario::ScenarioJson;
use contextuality::{EmpiricalModel, Morphism, Scenario, Simulation};
use serde::de::DeserializeOwned;

use crate::error::CliError;

const ZOO: &str = "zoo:";

pub fn read(source: &str) -> Result<String, CliError> {
    fs::read_to_string(source).map_err(|e| CliError::Io {
        path: source.into(),
        source: e,
    })
}

/// Deserializes `text`, naming the offending JSON path on failure.
pub fn parse<T: DeserializeOwned>(input: &str, text: &str) -> Result<T, CliError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value: T = serde_path_to_error::deserialize(&mut de).map_err(|e| CliError::Parse {
        input: input.to_string(),
        at: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    de.end().map_err(|e| CliError::Parse {
        input: input.to_string(),
        at: ".".to_string(),
        message: e.to_string(),
    })?;
    Ok(value)
}

pub fn model(source: &str) -> Result<EmpiricalModel, CliError> {
    if let Some(name) = source.strip_prefix(ZOO) {
        return zoo::get(name).map_err(|_| CliError::Usage(format!("no zoo model named {name:?}; try `zoo`")));
    }
    let raw: ModelJson = parse(source, &read(source)?)?;
    EmpiricalModel::try_from(raw).map_err(|e| CliError::Invalid(format!("{source}: {e}")))
}

pub fn morphism(source: &str) -> Result<Morphism, CliError> {
    let raw: MorphismJson = parse(source, &read(source)?)?;
    Morphism::try_from(raw).map_err(|e| CliError::Invalid(format!("{source}: {e}")))
}

pub fn simulation(source: &str) -> Result<Simulation, CliError> {
    let raw: SimulationJson = parse(source, &read(source)?)?;
    Simulation::try_from(raw).map_err(|e| CliError::Invalid(format!("{source}: {e}")))
}

pub fn scenario(source: &str) -> Result<Scenario, CliError> {
    let raw: ScenarioJson = parse(source, &read(source)?)?;
    Scenario::try_from(raw).map_err(|e| CliError::Invalid(format!("{source}: {e}")))
}

/// Inline JSON, or the contents of a file when `arg` is not JSON.
pub fn inline_or_file<T: DeserializeOwned>(arg: &str) -> Result<T, CliError> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        parse("<inline>", arg)
    } else if Path::new(arg).exists() {
        parse(arg, &read(arg)?)
    } else {
        Err(CliError::Usage(format!("{arg:?} is neither inline JSON nor a readable file")))
    }
}
