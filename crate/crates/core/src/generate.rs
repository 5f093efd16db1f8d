//! Random scenarios, models, relations and morphisms for property tests and
//! benchmarks. All weights are small exact rationals.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::distribution::Distribution;
use crate::model::{EmpiricalModel, OutcomeMaps};
use crate::morphism::Morphism;
use crate::scenario::{maximal_sets, Face, Scenario, Section, SimplicialRelation};
use crate::semifield::{SemifieldKind, SemifieldValue};

const KIND: SemifieldKind = SemifieldKind::NonNegRational;

fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("m{i}")).collect()
}

fn outcome_set(k: usize) -> BTreeSet<String> {
    (0..k).map(|i| i.to_string()).collect()
}

fn random_subset<R: Rng + ?Sized>(rng: &mut R, items: &[String], p: f64) -> Face {
    items.iter().filter(|_| rng.gen_bool(p)).cloned().collect()
}

/// A random scenario on `1..=max_measurements` measurements, each with
/// `2..=max_outcomes` outcomes (all equal when `uniform_outcomes`). Covers
/// often contain a cycle of edges, so most are not acyclic.
pub fn scenario<R: Rng + ?Sized>(rng: &mut R, max_measurements: usize, max_outcomes: usize, uniform_outcomes: bool) -> Scenario {
    let n = rng.gen_range(1..=max_measurements.max(1));
    build_scenario(rng, n, max_outcomes, uniform_outcomes, 0.6)
}

/// Like [`scenario`] with at least three measurements and always a cycle.
pub fn cyclic_scenario<R: Rng + ?Sized>(rng: &mut R, max_measurements: usize, max_outcomes: usize, uniform_outcomes: bool) -> Scenario {
    let n = rng.gen_range(3..=max_measurements.max(3));
    build_scenario(rng, n, max_outcomes, uniform_outcomes, 1.0)
}

fn build_scenario<R: Rng + ?Sized>(rng: &mut R, n: usize, max_outcomes: usize, uniform_outcomes: bool, ring_prob: f64) -> Scenario {
    let max_edge = if ring_prob >= 1.0 { 2 } else { 3 };
    let xs = names(n);
    let k0 = rng.gen_range(2..=max_outcomes.max(2));
    let outcomes = xs
        .iter()
        .map(|x| {
            let k = if uniform_outcomes { k0 } else { rng.gen_range(2..=max_outcomes.max(2)) };
            (x.clone(), outcome_set(k))
        })
        .collect();
    // Small random edges make cycles (and hence contextuality) common.
    let mut sets: Vec<Face> = (0..rng.gen_range(1..=n + 1))
        .map(|_| {
            let size = rng.gen_range(1..=n.min(max_edge));
            xs.choose_multiple(rng, size).cloned().collect()
        })
        .collect();
    if n >= 3 && rng.gen_bool(ring_prob) {
        let mut ring = xs.clone();
        ring.shuffle(rng);
        ring.truncate(rng.gen_range(3..=n));
        for (i, x) in ring.iter().enumerate() {
            sets.push(Face::from([x.clone(), ring[(i + 1) % ring.len()].clone()]));
        }
    }
    for x in &xs {
        if !sets.iter().any(|f| f.contains(x)) {
            sets.push(Face::from([x.clone()]));
        }
    }
    Scenario::new(outcomes, maximal_sets(sets)).expect("covering antichain")
}

/// A random acyclic scenario, grown by the reverse of Graham reduction: each
/// new measurement joins a face of an existing context.
pub fn acyclic_scenario<R: Rng + ?Sized>(rng: &mut R, max_measurements: usize, max_outcomes: usize, uniform_outcomes: bool) -> Scenario {
    let n = rng.gen_range(1..=max_measurements.max(1));
    let xs = names(n);
    let k0 = rng.gen_range(2..=max_outcomes.max(2));
    let outcomes = xs
        .iter()
        .map(|x| {
            let k = if uniform_outcomes { k0 } else { rng.gen_range(2..=max_outcomes.max(2)) };
            (x.clone(), outcome_set(k))
        })
        .collect();
    let mut cover: BTreeSet<Face> = BTreeSet::from([Face::from([xs[0].clone()])]);
    for x in &xs[1..] {
        let contexts: Vec<&Face> = cover.iter().collect();
        let host: Vec<String> = contexts.choose(rng).expect("nonempty cover").iter().cloned().collect();
        let mut joined = random_subset(rng, &host, 0.6);
        joined.insert(x.clone());
        cover.insert(joined);
        cover = maximal_sets(cover);
    }
    Scenario::new(outcomes, cover).expect("covering antichain")
}

/// A random weight vector over `n` items with small integer numerators;
/// roughly a fraction `zero_prob` of the entries are zero (never all).
pub fn weights<R: Rng + ?Sized>(rng: &mut R, n: usize, zero_prob: f64) -> Vec<BigRational> {
    let mut raw: Vec<u32> = (0..n)
        .map(|_| if rng.gen_bool(zero_prob) { 0 } else { rng.gen_range(1..=4) })
        .collect();
    if raw.iter().all(|&w| w == 0) {
        raw[rng.gen_range(0..n)] = 1;
    }
    let total: u32 = raw.iter().sum();
    raw.into_iter()
        .map(|w| BigRational::new(BigInt::from(w), BigInt::from(total)))
        .collect()
}

/// A random distribution over the given (nonempty) support candidates.
pub fn distribution<K: Ord + Clone, R: Rng + ?Sized>(rng: &mut R, items: &[K], zero_prob: f64) -> Distribution<K> {
    let w = weights(rng, items.len(), zero_prob);
    Distribution::new(
        KIND,
        items
            .iter()
            .cloned()
            .zip(w)
            .map(|(k, w)| (k, SemifieldValue::NonNeg(w))),
    )
    .expect("normalized")
}

/// A random distribution on global sections, supported on a few of them.
pub fn global_distribution<R: Rng + ?Sized>(rng: &mut R, scenario: &Scenario) -> Distribution<Section> {
    let globals = scenario.global_sections();
    let take = rng.gen_range(1..=globals.len().min(4));
    let picked: Vec<Section> = globals.choose_multiple(rng, take).cloned().collect();
    distribution(rng, &picked, 0.0)
}

/// A random non-contextual model: the marginals of a random global distribution.
pub fn noncontextual_model<R: Rng + ?Sized>(rng: &mut R, scenario: &Scenario) -> EmpiricalModel {
    let g = global_distribution(rng, scenario);
    EmpiricalModel::from_global(scenario.clone(), &g).expect("global sections")
}

/// The generalized parity box: on each context, uniform over the sections
/// whose outcome indices sum to a chosen residue modulo `k`. Needs every
/// measurement to have the same number `k` of outcomes.
pub fn parity_box<R: Rng + ?Sized>(rng: &mut R, scenario: &Scenario) -> Option<EmpiricalModel> {
    let ks: BTreeSet<usize> = scenario.outcome_map().values().map(BTreeSet::len).collect();
    let [k] = ks.into_iter().collect::<Vec<_>>()[..] else {
        return None;
    };
    let index = |x: &str, o: &str| -> usize {
        scenario
            .outcomes(x)
            .expect("known measurement")
            .iter()
            .position(|p| p == o)
            .expect("known outcome")
    };
    let mut tables = BTreeMap::new();
    for c in scenario.cover() {
        let residue = rng.gen_range(0..k);
        let matching: Vec<Section> = scenario
            .enumerate_sections(c)
            .expect("context")
            .into_iter()
            .filter(|s| s.iter().map(|(x, o)| index(x, o)).sum::<usize>() % k == residue)
            .collect();
        let w = BigRational::new(BigInt::from(1), BigInt::from(matching.len()));
        let table = Distribution::new(KIND, matching.into_iter().map(|s| (s, SemifieldValue::NonNeg(w.clone()))))
            .expect("normalized");
        tables.insert(c.clone(), table);
    }
    EmpiricalModel::new(scenario.clone(), KIND, tables).ok()
}

/// A random model: a mixture of a non-contextual model and, when the outcome
/// counts allow it, a parity box. Contextual with reasonable probability.
pub fn model<R: Rng + ?Sized>(rng: &mut R, scenario: &Scenario) -> EmpiricalModel {
    let nc = noncontextual_model(rng, scenario);
    let Some(parity) = parity_box(rng, scenario) else {
        return nc;
    };
    let lambda = match rng.gen_range(0..10) {
        0..=2 => 0,
        3..=4 => 4,
        _ => rng.gen_range(1..=3),
    };
    match lambda {
        0 => parity,
        4 => nc,
        _ => EmpiricalModel::mix(&[
            (SemifieldValue::ratio(lambda, 4), nc),
            (SemifieldValue::ratio(4 - lambda, 4), parity),
        ])
        .expect("same scenario"),
    }
}

/// A random simplicial relation from `target`'s measurements into `source`:
/// each context picks a source context, and images are then thinned.
pub fn relation<R: Rng + ?Sized>(rng: &mut R, target: &Scenario, source: &Scenario) -> SimplicialRelation {
    let source_contexts: Vec<&Face> = source.cover().iter().collect();
    let mut image: BTreeMap<String, Face> = BTreeMap::new();
    for c in target.cover() {
        let d = *source_contexts.choose(rng).expect("nonempty cover");
        for x in c {
            let entry = image.entry(x.clone()).or_insert_with(|| d.clone());
            *entry = entry.intersection(d).cloned().collect();
        }
    }
    for ys in image.values_mut() {
        ys.retain(|_| rng.gen_bool(0.8));
    }
    SimplicialRelation::new(image)
}

/// A random morphism along `relation`: a mixture of product kernels, each
/// made of independent local channels `E_Y(π(x)) → D(O_x)`.
pub fn morphism<R: Rng + ?Sized>(
    rng: &mut R,
    source: &Scenario,
    target: &Scenario,
    relation: &SimplicialRelation,
) -> Morphism {
    let image = relation.total_image();
    let inputs = source.sections_of(&image).expect("image in source");
    let terms = rng.gen_range(1..=2);
    let mixing = weights(rng, terms, 0.0);
    let kernels: Vec<BTreeMap<Section, Distribution<Section>>> = (0..terms)
        .map(|_| product_kernel(rng, source, target, relation, &inputs))
        .collect();
    let top = inputs
        .iter()
        .map(|s| {
            let parts: Vec<(SemifieldValue, Distribution<Section>)> = mixing
                .iter()
                .zip(&kernels)
                .map(|(w, k)| (SemifieldValue::NonNeg(w.clone()), k[s].clone()))
                .collect();
            (s.clone(), Distribution::convex(&parts).expect("convex weights"))
        })
        .collect();
    Morphism::new(source.clone(), target.clone(), KIND, relation.clone(), top).expect("product kernels are natural")
}

fn product_kernel<R: Rng + ?Sized>(
    rng: &mut R,
    source: &Scenario,
    target: &Scenario,
    relation: &SimplicialRelation,
    inputs: &[Section],
) -> BTreeMap<Section, Distribution<Section>> {
    let mut local: BTreeMap<String, BTreeMap<Section, Distribution<String>>> = BTreeMap::new();
    for (x, ys) in relation.image_map() {
        let outs: Vec<String> = target.outcomes(x).expect("target measurement").iter().cloned().collect();
        let deterministic = rng.gen_bool(0.5);
        let rows = source
            .sections_of(ys)
            .expect("image in source")
            .into_iter()
            .map(|s| {
                let d = if deterministic {
                    Distribution::unit(KIND, outs.choose(rng).expect("outcomes").clone())
                } else {
                    distribution(rng, &outs, 0.3)
                };
                (s, d)
            })
            .collect();
        local.insert(x.clone(), rows);
    }
    inputs
        .iter()
        .map(|s| {
            let mut acc = Distribution::unit(KIND, Section::empty());
            for (x, ys) in relation.image_map() {
                let row = &local[x][&s.project(ys)];
                acc = acc
                    .bind(|t| {
                        row.map(|o| {
                            let mut t = t.clone();
                            t.insert(x.clone(), o.clone());
                            t
                        })
                    })
                    .expect("same semifield");
            }
            (s.clone(), acc)
        })
        .collect()
}

/// Random coarse-graining maps for a random subset of measurements.
pub fn outcome_maps<R: Rng + ?Sized>(rng: &mut R, scenario: &Scenario) -> OutcomeMaps {
    let mut maps = OutcomeMaps::new();
    for (x, outs) in scenario.outcome_map() {
        if rng.gen_bool(0.5) {
            let k = rng.gen_range(1..=outs.len());
            let map = outs
                .iter()
                .map(|o| (o.clone(), format!("c{}", rng.gen_range(0..k))))
                .collect();
            maps.insert(x.clone(), map);
        }
    }
    maps
}

/// A random nonempty subset of the measurements.
pub fn measurement_subset<R: Rng + ?Sized>(rng: &mut R, scenario: &Scenario) -> Face {
    let xs: Vec<String> = scenario.measurements().into_iter().collect();
    let mut sub = random_subset(rng, &xs, 0.6);
    if sub.is_empty() {
        if let Some(x) = xs.choose(rng) {
            sub.insert(x.clone());
        }
    }
    sub
}
