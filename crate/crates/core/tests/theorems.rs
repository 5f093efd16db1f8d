mod common;

use common::criteria;

fn check(outcome: criteria::Outcome) {
    match outcome {
        Ok(summary) => eprintln!("{summary}"),
        Err(why) => panic!("{why}"),
    }
}

#[test]
fn noncontextual_iff_simulated_by_terminal() {
    check(criteria::terminal_object());
}

#[test]
fn reference_fractions() {
    check(criteria::ncf_values());
}

#[test]
fn fraction_is_monotone() {
    check(criteria::ncf_monotone());
}

#[test]
fn acyclic_models_are_noncontextual() {
    check(criteria::vorobev());
}

#[test]
fn graham_simulations_reproduce_models() {
    check(criteria::graham_construction());
}

#[test]
fn contextual_models_cannot_be_cloned() {
    check(criteria::no_cloning());
}

#[test]
fn collapse_is_a_functor() {
    check(criteria::collapse_functor());
}

#[test]
fn strong_contextuality_is_preserved() {
    check(criteria::strong_contextuality_preserved());
}
