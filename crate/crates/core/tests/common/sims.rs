//! Random simulations built only from the library's constructors.

use contextuality::analysis::global_explanation;
use contextuality::generate;
use contextuality::model::EmpiricalModel;
use contextuality::morphism::Simulation;
use contextuality::SemifieldValue;
use rand::rngs::StdRng;
use rand::seq::IteratorRandom;
use rand::Rng;

use super::laws::{random_morphism, small_scenario};

/// A labelled simulation, for failure messages.
pub struct Labelled {
    pub how: &'static str,
    pub sim: Simulation,
}

fn binary_model(rng: &mut StdRng, max_measurements: usize) -> EmpiricalModel {
    let s = if max_measurements >= 3 && rng.gen_bool(0.5) {
        generate::cyclic_scenario(rng, max_measurements, 2, true)
    } else {
        generate::scenario(rng, max_measurements, 2, true)
    };
    generate::model(rng, &s)
}

/// A push-forward simulation out of `d` along a random morphism.
pub fn push(rng: &mut StdRng, d: &EmpiricalModel) -> Simulation {
    let target = small_scenario(rng);
    let m = random_morphism(rng, d.scenario(), &target);
    Simulation::push(m, d.clone()).expect("random morphisms push forward")
}

/// One batch of simulations around a fresh random model: restriction,
/// coarse-graining, Graham reduction, pushes, mixing, tensoring, composition
/// and (for non-contextual models) the terminal simulation.
pub fn batch(rng: &mut StdRng) -> Vec<Labelled> {
    let d = binary_model(rng, 4);
    batch_from(rng, &d)
}

/// [`batch`] around a given model.
pub fn batch_from(rng: &mut StdRng, d: &EmpiricalModel) -> Vec<Labelled> {
    let d = d.clone();
    let mut out = Vec::new();
    let mut add = |how, sim| out.push(Labelled { how, sim });

    let subset = generate::measurement_subset(rng, d.scenario());
    let restriction = Simulation::restriction(&d, &subset).expect("restriction");
    add("restriction", restriction.clone());

    let maps = generate::outcome_maps(rng, d.scenario());
    let coarse = Simulation::coarse_grain(&d, &maps).expect("coarse-graining");
    add("coarse-graining", coarse.clone());

    if let Some(x) = d.scenario().graham_reducible_vertices().into_iter().choose(rng) {
        add("graham", Simulation::graham(&d, &x, None).expect("reducible vertex"));
    }

    let pushed = push(rng, &d);
    add("push", pushed.clone());

    let target = small_scenario(rng);
    let relation = generate::relation(rng, &target, d.scenario());
    let parts: Vec<(SemifieldValue, Simulation)> = generate::weights(rng, 2, 0.0)
        .into_iter()
        .map(|w| {
            let m = generate::morphism(rng, d.scenario(), &target, &relation);
            (SemifieldValue::NonNeg(w), Simulation::push(m, d.clone()).expect("push"))
        })
        .collect();
    add("mixing", Simulation::mix(&parts).expect("common source"));

    let other = binary_model(rng, 2);
    let other_sim = if rng.gen_bool(0.5) {
        Simulation::identity(&other)
    } else {
        push(rng, &other)
    };
    add("tensor", restriction.tensor(&other_sim).expect("tensor"));
    add("tensor", Simulation::identity(&d).tensor(&other_sim).expect("tensor"));

    let after = push(rng, restriction.target());
    add("composition", restriction.then(&after).expect("composable"));
    let after = push(rng, coarse.target());
    add("composition", coarse.then(&after).expect("composable"));

    if let Some(g) = global_explanation(&d).expect("nonnegative model") {
        add("terminal", Simulation::terminal(&d, &g).expect("explanation"));
    }
    out
}

/// A composable pair `d → e → f` of random simulations.
pub fn composable_pair(rng: &mut StdRng) -> (Simulation, Simulation) {
    let d = binary_model(rng, 3);
    let first = match rng.gen_range(0..3) {
        0 => push(rng, &d),
        1 => {
            let subset = generate::measurement_subset(rng, d.scenario());
            Simulation::restriction(&d, &subset).expect("restriction")
        }
        _ => {
            let maps = generate::outcome_maps(rng, d.scenario());
            Simulation::coarse_grain(&d, &maps).expect("coarse-graining")
        }
    };
    let second = push(rng, first.target());
    (first, second)
}
