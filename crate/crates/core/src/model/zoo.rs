//! Canonical fixtures with exact rational tables.

use std::collections::BTreeMap;

use super::{EmpiricalModel, ModelError};
use crate::distribution::Distribution;
use crate::scenario::{face, Scenario, Section};
use crate::semifield::{SemifieldKind, SemifieldValue};

/// The six reference models.
pub const CANONICAL: [&str; 6] = [
    "anticorr-coins",
    "parity-triple",
    "biased-pair",
    "pr-box",
    "specker-triangle",
    "hardy",
];

/// Every name understood by [`get`].
pub const NAMES: [&str; 8] = [
    "anticorr-coins",
    "parity-triple",
    "biased-pair",
    "pr-box",
    "specker-triangle",
    "hardy",
    "fair-coins",
    "terminal",
];

const BIN: &[&str] = &["0", "1"];

pub fn get(name: &str) -> Result<EmpiricalModel, ModelError> {
    let model = match name {
        "anticorr-coins" => anticorrelated_coins(),
        "parity-triple" => parity_triple(),
        "biased-pair" => biased_pair(),
        "pr-box" => pr_box(),
        "specker-triangle" => specker_triangle(),
        "hardy" => hardy(),
        "fair-coins" => fair_coins(),
        "terminal" => EmpiricalModel::terminal(SemifieldKind::NonNegRational),
        _ => return Err(ModelError::UnknownModel(name.to_string())),
    };
    Ok(model)
}

/// A table over `vars` from `(outcomes, numerator, denominator)` rows.
fn table(vars: &[&str], rows: &[(&[&str], i64, i64)]) -> Distribution<Section> {
    Distribution::new(
        SemifieldKind::NonNegRational,
        rows.iter().map(|(outs, p, q)| {
            (
                Section::from_pairs(vars.iter().zip(outs.iter()).map(|(v, o)| (*v, *o))),
                SemifieldValue::ratio(*p, *q),
            )
        }),
    )
    .expect("fixture tables are normalized")
}

fn build(scenario: Scenario, tables: Vec<(&[&str], Distribution<Section>)>) -> EmpiricalModel {
    let tables: BTreeMap<_, _> = tables.into_iter().map(|(c, t)| (face(c.iter().copied()), t)).collect();
    EmpiricalModel::new(scenario, SemifieldKind::NonNegRational, tables).expect("fixture is valid")
}

fn bell_scenario() -> Scenario {
    Scenario::from_lists(
        &[("a0", BIN), ("a1", BIN), ("b0", BIN), ("b1", BIN)],
        &[&["a0", "b0"], &["a0", "b1"], &["a1", "b0"], &["a1", "b1"]],
    )
    .expect("valid scenario")
}

fn single(vars: &[&str]) -> Scenario {
    let ms: Vec<(&str, &[&str])> = vars.iter().map(|v| (*v, BIN)).collect();
    Scenario::from_lists(&ms, &[vars]).expect("valid scenario")
}

/// Two perfectly anticorrelated fair coins.
fn anticorrelated_coins() -> EmpiricalModel {
    let vars: &[&str] = &["x", "y"];
    build(single(vars), vec![(vars, table(vars, &[(&["0", "1"], 1, 2), (&["1", "0"], 1, 2)]))])
}

fn fair_coins() -> EmpiricalModel {
    let vars: &[&str] = &["x", "y"];
    let rows: Vec<(&[&str], i64, i64)> = vec![
        (&["0", "0"], 1, 4),
        (&["0", "1"], 1, 4),
        (&["1", "0"], 1, 4),
        (&["1", "1"], 1, 4),
    ];
    build(single(vars), vec![(vars, table(vars, &rows))])
}

/// Two fair coins and their parity.
fn parity_triple() -> EmpiricalModel {
    let vars: &[&str] = &["x", "y", "z"];
    let rows: Vec<(&[&str], i64, i64)> = vec![
        (&["0", "0", "0"], 1, 4),
        (&["0", "1", "1"], 1, 4),
        (&["1", "0", "1"], 1, 4),
        (&["1", "1", "0"], 1, 4),
    ];
    build(single(vars), vec![(vars, table(vars, &rows))])
}

/// A fair coin `x`; `y` is fair when `x = 0` and lands 1 with bias 2/3 when `x = 1`.
fn biased_pair() -> EmpiricalModel {
    let vars: &[&str] = &["x", "y"];
    let rows: Vec<(&[&str], i64, i64)> = vec![
        (&["0", "0"], 1, 4),
        (&["0", "1"], 1, 4),
        (&["1", "0"], 1, 6),
        (&["1", "1"], 1, 3),
    ];
    build(single(vars), vec![(vars, table(vars, &rows))])
}

fn pr_box() -> EmpiricalModel {
    let correlated: Vec<(&[&str], i64, i64)> = vec![(&["0", "0"], 1, 2), (&["1", "1"], 1, 2)];
    let anti: Vec<(&[&str], i64, i64)> = vec![(&["0", "1"], 1, 2), (&["1", "0"], 1, 2)];
    let tables = vec![
        (&["a0", "b0"][..], table(&["a0", "b0"], &correlated)),
        (&["a0", "b1"][..], table(&["a0", "b1"], &correlated)),
        (&["a1", "b0"][..], table(&["a1", "b0"], &correlated)),
        (&["a1", "b1"][..], table(&["a1", "b1"], &anti)),
    ];
    build(bell_scenario(), tables)
}

/// Three pairwise anticorrelated fair coins on a triangle.
fn specker_triangle() -> EmpiricalModel {
    let scenario = Scenario::from_lists(
        &[("a", BIN), ("b", BIN), ("c", BIN)],
        &[&["a", "b"], &["b", "c"], &["a", "c"]],
    )
    .expect("valid scenario");
    let anti: Vec<(&[&str], i64, i64)> = vec![(&["0", "1"], 1, 2), (&["1", "0"], 1, 2)];
    let tables = vec![
        (&["a", "b"][..], table(&["a", "b"], &anti)),
        (&["b", "c"][..], table(&["b", "c"], &anti)),
        (&["a", "c"][..], table(&["a", "c"], &anti)),
    ];
    build(scenario, tables)
}

/// A Hardy-type bipartite model: `(a0,b0) = 00` is possible, yet every global
/// section extending it violates one of the zero entries.
fn hardy() -> EmpiricalModel {
    let ab: Vec<(&[&str], i64, i64)> = vec![
        (&["0", "0"], 1, 10),
        (&["0", "1"], 1, 10),
        (&["1", "0"], 1, 10),
        (&["1", "1"], 7, 10),
    ];
    let ab1: Vec<(&[&str], i64, i64)> = vec![(&["0", "1"], 1, 5), (&["1", "0"], 3, 5), (&["1", "1"], 1, 5)];
    let a1b: Vec<(&[&str], i64, i64)> = vec![(&["0", "1"], 3, 5), (&["1", "0"], 1, 5), (&["1", "1"], 1, 5)];
    let a1b1: Vec<(&[&str], i64, i64)> = vec![(&["0", "0"], 1, 5), (&["0", "1"], 2, 5), (&["1", "0"], 2, 5)];
    let tables = vec![
        (&["a0", "b0"][..], table(&["a0", "b0"], &ab)),
        (&["a0", "b1"][..], table(&["a0", "b1"], &ab1)),
        (&["a1", "b0"][..], table(&["a1", "b0"], &a1b)),
        (&["a1", "b1"][..], table(&["a1", "b1"], &a1b1)),
    ];
    build(bell_scenario(), tables)
}
