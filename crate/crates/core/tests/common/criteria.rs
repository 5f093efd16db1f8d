//! Theorem-level checks. Each returns a one-line summary on success and a
//! counterexample description on failure.

use std::time::{Duration, Instant};

use contextuality::analysis::{
    global_explanation, is_logically_contextual, is_noncontextual, is_strongly_contextual, ncf, simulation_exists, Budget,
    SearchOutcome,
};
use contextuality::generate;
use contextuality::model::{zoo, EmpiricalModel};
use contextuality::morphism::Simulation;
use contextuality::scenario::{Section, LEFT_TAG, RIGHT_TAG};
use contextuality::{Distribution, SemifieldHom, SemifieldKind, SemifieldValue};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::seq::IteratorRandom;
use rand::{Rng, SeedableRng};

use super::{laws, oracle, sims};

pub type Outcome = Result<String, String>;

fn terminal() -> EmpiricalModel {
    EmpiricalModel::terminal(SemifieldKind::NonNegRational)
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let took = start.elapsed();
    if took <= limit {
        Ok(())
    } else {
        Err(format!("{what} took {took:?}, limit {limit:?}"))
    }
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Noncontextuality agrees with the existence of a simulation from the
/// terminal model; every witness pushes the terminal model onto `e` exactly.
pub fn terminal_object() -> Outcome {
    let start = Instant::now();
    let mut models: Vec<(String, EmpiricalModel)> = zoo::CANONICAL
        .iter()
        .map(|n| (n.to_string(), zoo::get(n).expect("zoo")))
        .collect();
    let mut rng = StdRng::seed_from_u64(0x7e57);
    for i in 0..50 {
        let s = if i % 2 == 0 {
            generate::scenario(&mut rng, 4, 2, true)
        } else {
            generate::cyclic_scenario(&mut rng, 4, 2, true)
        };
        models.push((format!("random #{i}"), generate::model(&mut rng, &s)));
    }
    let one = terminal();
    let (mut nc_count, mut total) = (0, 0);
    for (name, e) in &models {
        let nc = is_noncontextual(e).map_err(|err| format!("{name}: {err}"))?;
        let out = simulation_exists(&one, e, Budget::seconds(60.0)).map_err(|err| format!("{name}: {err}"))?;
        if out.exists() != Some(nc) {
            return Err(format!("{name}: noncontextual = {nc}, search says {:?}", out.exists()));
        }
        if let Some(sim) = out.simulation() {
            let pushed = sim.morphism().pushforward(&one).map_err(|err| err.to_string())?;
            if &pushed != e {
                return Err(format!("{name}: witness pushes forward to a different model"));
            }
        }
        if let Some(g) = global_explanation(e).map_err(|err| err.to_string())? {
            Simulation::terminal(e, &g).map_err(|err| format!("{name}: explanation is not a simulation: {err}"))?;
        }
        nc_count += nc as usize;
        total += 1;
    }
    within(start, Duration::from_secs(60), "terminal-object check")?;
    Ok(format!(
        "{total} models ({nc_count} non-contextual) agree, witnesses exact, {:.2?}",
        start.elapsed()
    ))
}

/// Exact NCF of the reference models against vertex enumeration.
pub fn ncf_values() -> Outcome {
    let start = Instant::now();
    let expected = [
        ("specker-triangle", BigRational::zero()),
        ("pr-box", BigRational::zero()),
        ("parity-triple", BigRational::one()),
        ("anticorr-coins", BigRational::one()),
    ];
    for (name, want) in expected {
        let e = zoo::get(name).map_err(|err| err.to_string())?;
        let got = ncf(&e).map_err(|err| err.to_string())?.ncf;
        let brute = oracle::ncf_by_vertices(&e);
        if got != want || brute != want {
            return Err(format!("{name}: solver {got}, vertex enumeration {brute}, expected {want}"));
        }
    }
    // Half a triangle plus half a deterministic model.
    let tri = zoo::get("specker-triangle").map_err(|err| err.to_string())?;
    let g = Section::from_pairs([("a", "0"), ("b", "1"), ("c", "0")]);
    let dirac = EmpiricalModel::dirac(tri.scenario().clone(), SemifieldKind::NonNegRational, &g).map_err(|err| err.to_string())?;
    let mixed = EmpiricalModel::mix(&[(SemifieldValue::ratio(1, 2), tri), (SemifieldValue::ratio(1, 2), dirac)])
        .map_err(|err| err.to_string())?;
    let got = ncf(&mixed).map_err(|err| err.to_string())?.ncf;
    let brute = oracle::ncf_by_vertices(&mixed);
    if got != brute || got < ratio(1, 2) {
        return Err(format!("mixed triangle: solver {got}, vertex enumeration {brute}"));
    }
    within(start, Duration::from_secs(10), "NCF check")?;
    Ok(format!("4 reference values exact and matched by vertex enumeration; mixed triangle = {got}"))
}

/// Runs `f` on simulation batches until at least `min` simulations were seen.
fn over_simulations(seed: u64, min: usize, mut f: impl FnMut(&sims::Labelled) -> Result<(), String>) -> Result<usize, String> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut seen = 0;
    for name in zoo::CANONICAL {
        for l in sims::batch_from(&mut rng, &zoo::get(name).expect("zoo")) {
            f(&l)?;
            seen += 1;
        }
    }
    while seen < min {
        for l in sims::batch(&mut rng) {
            f(&l)?;
            seen += 1;
        }
    }
    Ok(seen)
}

/// `ncf(d) ≤ ncf(e)` along every generated simulation `d → e`.
pub fn ncf_monotone() -> Outcome {
    let mut strict = 0;
    let n = over_simulations(0x3a3a, 200, |l| {
        let a = ncf(l.sim.source()).map_err(|err| err.to_string())?.ncf;
        let b = ncf(l.sim.target()).map_err(|err| err.to_string())?.ncf;
        if a > b {
            return Err(format!("{}: ncf(source) = {a} > ncf(target) = {b}", l.how));
        }
        strict += (a < b) as usize;
        Ok(())
    })?;
    Ok(format!("{n} simulations, 0 violations ({strict} strict increases)"))
}

/// Chains Graham simulations along a reduction order, starting at the
/// terminal model.
pub fn graham_chain(e: &EmpiricalModel) -> Result<Simulation, String> {
    let order = e.scenario().is_acyclic().ok_or("scenario is not acyclic")?;
    let mut steps = Vec::new();
    let mut current = e.clone();
    for x in &order {
        let step = Simulation::graham(&current, x, None).map_err(|err| err.to_string())?;
        current = step.source().clone();
        steps.push(step);
    }
    if current != terminal() {
        return Err("reduction did not end at the terminal model".into());
    }
    let mut chain = Simulation::identity(&current);
    for step in steps.iter().rev() {
        chain = chain.then(step).map_err(|err| err.to_string())?;
    }
    Ok(chain)
}

/// Models on acyclic scenarios are non-contextual, explained by the Graham chain.
pub fn vorobev() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(0x0b0e);
    let mut biggest = 0;
    for i in 0..100 {
        let uniform = rng.gen_bool(0.5);
        let s = generate::acyclic_scenario(&mut rng, 5, 3, uniform);
        let e = generate::model(&mut rng, &s);
        if !is_noncontextual(&e).map_err(|err| err.to_string())? {
            return Err(format!("model #{i} on an acyclic scenario is contextual"));
        }
        let chain = graham_chain(&e).map_err(|err| format!("model #{i}: {err}"))?;
        let pushed = chain.morphism().pushforward(&terminal()).map_err(|err| err.to_string())?;
        if pushed != e {
            return Err(format!("model #{i}: chained Graham simulation misses the model"));
        }
        biggest = biggest.max(s.num_measurements());
    }
    within(start, Duration::from_secs(120), "acyclic check")?;
    Ok(format!(
        "100 acyclic models (up to {biggest} measurements) non-contextual with exact Graham chains, {:.2?}",
        start.elapsed()
    ))
}

/// The Graham simulation reproduces the model via `e(x,y) = e(x|y) e(y)`.
pub fn graham_construction() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x6a6a);
    let mut done = 0;
    while done < 50 {
        let uniform = rng.gen_bool(0.5);
        let s = generate::scenario(&mut rng, 4, 3, uniform);
        let Some(x) = s.graham_reducible_vertices().into_iter().choose(&mut rng) else {
            continue;
        };
        let e = generate::model(&mut rng, &s);
        let sim = Simulation::graham(&e, &x, None).map_err(|err| err.to_string())?;
        if !sim.morphism().is_simulation(sim.source(), &e) {
            return Err(format!("graham({x}) does not reproduce the model"));
        }
        // The chain rule, checked directly on the context holding x.
        let context = s.cover().iter().find(|c| c.contains(&x)).expect("context").clone();
        let mut rest = context.clone();
        rest.remove(&x);
        let joint = e.table(&context).expect("table");
        let marginal = e.marginal(&rest).map_err(|err| err.to_string())?;
        for (sec, p) in joint.iter() {
            let r = sec.project(&rest);
            let q = marginal.weight(&r);
            let given = sim.morphism().component(&context, &r).map_err(|err| err.to_string())?;
            let cond = given.weight(sec);
            let lhs = p.as_rational().expect("rational").clone();
            let rhs = q.as_rational().expect("rational") * cond.as_rational().expect("rational");
            if lhs != rhs {
                return Err(format!("graham({x}): e({sec}) = {lhs} but e(x|y)e(y) = {rhs}"));
            }
        }
        done += 1;
    }
    Ok("50 Graham simulations verified, chain rule exact on every context entry".into())
}

/// No simulation `triangle → triangle ⊗ triangle`; the non-contextual
/// parity model clones through the terminal model.
pub fn no_cloning() -> Outcome {
    let start = Instant::now();
    let tri = zoo::get("specker-triangle").map_err(|err| err.to_string())?;
    let twice = tri.tensor(&tri).map_err(|err| err.to_string())?;
    let out = simulation_exists(&tri, &twice, Budget::seconds(600.0)).map_err(|err| err.to_string())?;
    let stats = match out {
        SearchOutcome::NotFound { stats } if stats.relations_examined == stats.maximal_relations => stats,
        other => return Err(format!("triangle cloning search returned {:?}", other.exists())),
    };
    within(start, Duration::from_secs(600), "no-cloning search")?;

    let e = zoo::get("parity-triple").map_err(|err| err.to_string())?;
    let ee = e.tensor(&e).map_err(|err| err.to_string())?;
    let g = global_explanation(&e).map_err(|err| err.to_string())?.ok_or("parity-triple not explained")?;
    let gg: Distribution<Section> = g
        .product(&g)
        .map_err(|err| err.to_string())?
        .map(|(a, b)| a.tagged(LEFT_TAG).merge(&b.tagged(RIGHT_TAG)));
    let forget = Simulation::restriction(&e, &Default::default()).map_err(|err| err.to_string())?;
    let build = Simulation::terminal(&ee, &gg).map_err(|err| err.to_string())?;
    if forget.target() != build.source() {
        return Err("restriction to nothing is not the terminal model".into());
    }
    let clone = forget.then(&build).map_err(|err| format!("cloning simulation rejected: {err}"))?;
    if clone.target() != &ee {
        return Err("cloning simulation has the wrong target".into());
    }
    Ok(format!(
        "triangle: all {} maximal relations infeasible in {:.2?}; parity-triple clone verified",
        stats.maximal_relations,
        start.elapsed()
    ))
}

/// Every algebraic law on `cases` seeded random instances.
pub fn algebraic_laws(cases: u64) -> Outcome {
    for (name, law) in laws::ALL {
        for seed in 0..cases {
            let mut rng = StdRng::seed_from_u64(seed);
            law(&mut rng).map_err(|err| format!("{name}, seed {seed}: {err}"))?;
        }
    }
    Ok(format!("{} laws x {cases} cases, 0 failures", laws::ALL.len()))
}

/// The possibilistic collapse is a functor; logical implies probabilistic
/// contextuality; reference verdicts for Hardy and PR.
pub fn collapse_functor() -> Outcome {
    let hom = SemifieldHom::Collapse;
    let mut rng = StdRng::seed_from_u64(0xc011);
    let mut models = Vec::new();
    for i in 0..100 {
        let (f, g) = sims::composable_pair(&mut rng);
        let whole = f.then(&g).map_err(|err| err.to_string())?;
        let lhs = whole.collapse(hom).map_err(|err| err.to_string())?;
        let rhs = f
            .collapse(hom)
            .and_then(|a| a.then(&g.collapse(hom)?))
            .map_err(|err| err.to_string())?;
        if lhs != rhs {
            return Err(format!("pair #{i}: F(g∘f) != F(g)∘F(f)"));
        }
        let d = f.source();
        let id = Simulation::identity(d).collapse(hom).map_err(|err| err.to_string())?;
        let collapsed = d.collapse(hom).map_err(|err| err.to_string())?;
        if id != Simulation::identity(&collapsed) {
            return Err(format!("pair #{i}: F(id) != id"));
        }
        if let Some(gl) = global_explanation(d).map_err(|err| err.to_string())? {
            let t = Simulation::terminal(d, &gl)
                .and_then(|t| t.collapse(hom))
                .map_err(|err| err.to_string())?;
            if t.source() != &EmpiricalModel::terminal(SemifieldKind::Boolean)
                || !is_noncontextual(&collapsed).map_err(|err| err.to_string())?
            {
                return Err(format!("pair #{i}: collapse of a terminal simulation"));
            }
        }
        models.extend([f.source().clone(), f.target().clone(), g.target().clone()]);
    }
    let hardy = zoo::get("hardy").map_err(|err| err.to_string())?;
    let pr = zoo::get("pr-box").map_err(|err| err.to_string())?;
    if !is_logically_contextual(&hardy).map_err(|err| err.to_string())? || is_strongly_contextual(&hardy) {
        return Err("hardy should be logically but not strongly contextual".into());
    }
    if !is_strongly_contextual(&pr) {
        return Err("pr-box should be strongly contextual".into());
    }
    models.extend(zoo::CANONICAL.iter().map(|n| zoo::get(n).expect("zoo")));
    let mut logical = 0;
    for e in &models {
        if is_logically_contextual(e).map_err(|err| err.to_string())? {
            logical += 1;
            if is_noncontextual(e).map_err(|err| err.to_string())? {
                return Err("a logically contextual model is non-contextual".into());
            }
        }
    }
    Ok(format!(
        "100 pairs preserve composition and identities; {} models ({logical} logically contextual) consistent",
        models.len()
    ))
}

/// No simulation maps a non-strongly-contextual model onto a strongly
/// contextual one.
pub fn strong_contextuality_preserved() -> Outcome {
    let (mut sc_sources, mut sc_targets) = (0, 0);
    let n = over_simulations(0x5c5c, 200, |l| {
        let d = is_strongly_contextual(l.sim.source());
        let e = is_strongly_contextual(l.sim.target());
        if e && !d {
            return Err(format!("{}: strongly contextual target from a non-strongly-contextual source", l.how));
        }
        sc_sources += d as usize;
        sc_targets += e as usize;
        Ok(())
    })?;
    Ok(format!(
        "{n} simulations, 0 violations ({sc_sources} strongly contextual sources, {sc_targets} targets)"
    ))
}
