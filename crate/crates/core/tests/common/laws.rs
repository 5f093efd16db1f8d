//! Algebraic laws checked on random instances. Every check returns a
//! description of the counterexample on failure.

use std::collections::BTreeMap;

use contextuality::generate;
use contextuality::model::EmpiricalModel;
use contextuality::morphism::Morphism;
use contextuality::scenario::Scenario;
use contextuality::{Distribution, SemifieldKind, SemifieldValue};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

pub type Law = fn(&mut rand::rngs::StdRng) -> Result<(), String>;

/// Every law with a short name.
pub const ALL: [(&str, Law); 9] = [
    ("monad left identity", monad_left_identity),
    ("monad right identity", monad_right_identity),
    ("monad associativity", monad_associativity),
    ("product naturality", product_naturality),
    ("composition associativity", composition_associativity),
    ("identity morphisms", identity_units),
    ("pushforward functoriality", pushforward_functoriality),
    ("pushforward of mixed models", pushforward_of_mixture),
    ("mixing morphisms", mixed_morphism_pushforward),
];

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn any_kind<R: Rng>(rng: &mut R) -> SemifieldKind {
    SemifieldKind::ALL[rng.gen_range(0..SemifieldKind::ALL.len())]
}

/// A random normalized distribution on `0..n` in any of the semifields.
pub fn dist<R: Rng>(rng: &mut R, kind: SemifieldKind, n: u8) -> Distribution<u8> {
    let items: Vec<u8> = (0..n).collect();
    match kind {
        SemifieldKind::NonNegRational => generate::distribution(rng, &items, 0.3),
        SemifieldKind::SignedRational => {
            let mut raw: Vec<i64> = (0..n).map(|_| rng.gen_range(-3..=3)).collect();
            let last = raw.len() - 1;
            let rest: i64 = raw[..last].iter().sum();
            let denom = rng.gen_range(1..=3);
            raw[last] = denom - rest;
            let entries = items
                .iter()
                .zip(raw)
                .map(|(x, w)| (*x, SemifieldValue::Signed(BigRational::new(BigInt::from(w), BigInt::from(denom)))));
            Distribution::new(kind, entries).unwrap()
        }
        SemifieldKind::Boolean => {
            let mut picked: Vec<u8> = items.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
            if picked.is_empty() {
                picked.push(rng.gen_range(0..n));
            }
            Distribution::new(kind, picked.into_iter().map(|x| (x, SemifieldValue::Bool(true)))).unwrap()
        }
    }
}

fn kernel<R: Rng>(rng: &mut R, kind: SemifieldKind, n: u8) -> BTreeMap<u8, Distribution<u8>> {
    (0..n).map(|x| (x, dist(rng, kind, n))).collect()
}

fn function<R: Rng>(rng: &mut R, n: u8) -> Vec<u8> {
    (0..n).map(|_| rng.gen_range(0..n)).collect()
}

pub fn monad_left_identity(rng: &mut rand::rngs::StdRng) -> Result<(), String> {
    let kind = any_kind(rng);
    let n = rng.gen_range(1..=4);
    let k = kernel(rng, kind, n);
    let x = rng.gen_range(0..n);
    let lhs = Distribution::unit(kind, x).bind(|y| k[y].clone()).map_err(|e| e.to_string())?;
    ensure(lhs == k[&x], || format!("unit({x}) >>= k = {lhs:?}, k({x}) = {:?}", k[&x]))
}

pub fn monad_right_identity(rng: &mut rand::rngs::StdRng) -> Result<(), String> {
    let kind = any_kind(rng);
    let n = rng.gen_range(1..=5);
    let d = dist(rng, kind, n);
    let lhs = d.bind(|y| Distribution::unit(kind, *y)).map_err(|e| e.to_string())?;
    ensure(lhs == d, || format!("d >>= unit = {lhs:?} != {d:?}"))
}

pub fn monad_associativity(rng: &mut rand::rngs::StdRng) -> Result<(), String> {
    let kind = any_kind(rng);
    let n = rng.gen_range(1..=4);
    let d = dist(rng, kind, n);
    let f = kernel(rng, kind, n);
    let g = kernel(rng, kind, n);
    let lhs = d
        .bind(|x| f[x].clone())
        .and_then(|m| m.bind(|y| g[y].clone()))
        .map_err(|e| e.to_string())?;
    let rhs = d
        .bind(|x| f[x].bind(|y| g[y].clone()).expect("same semifield"))
        .map_err(|e| e.to_string())?;
    ensure(lhs == rhs, || format!("(d >>= f) >>= g = {lhs:?}, d >>= (f >=> g) = {rhs:?}"))
}

pub fn product_naturality(rng: &mut rand::rngs::StdRng) -> Result<(), String> {
    let kind = any_kind(rng);
    let (n, m) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
    let d1 = dist(rng, kind, n);
    let d2 = dist(rng, kind, m);
    let f = function(rng, n);
    let g = function(rng, m);
    let lhs = d1
        .product(&d2)
        .map_err(|e| e.to_string())?
        .map(|(a, b)| (f[*a as usize], g[*b as usize]));
    let rhs = d1
        .map(|a| f[*a as usize])
        .product(&d2.map(|b| g[*b as usize]))
        .map_err(|e| e.to_string())?;
    ensure(lhs == rhs, || format!("D(f×g)(d1⊗d2) = {lhs:?}, Df(d1)⊗Dg(d2) = {rhs:?}"))
}

/// A small random scenario for morphism laws.
pub fn small_scenario<R: Rng>(rng: &mut R) -> Scenario {
    let uniform = rng.gen_bool(0.5);
    generate::scenario(rng, 3, 3, uniform)
}

/// A random morphism `source → target`.
pub fn random_morphism<R: Rng>(rng: &mut R, source: &Scenario, target: &Scenario) -> Morphism {
    let r = generate::relation(rng, target, source);
    generate::morphism(rng, source, target, &r)
}

pub fn composition_associativity(rng: &mut rand::rngs::StdRng) -> Result<(), String> {
    let s: Vec<Scenario> = (0..4).map(|_| small_scenario(rng)).collect();
    let f = random_morphism(rng, &s[0], &s[1]);
    let g = random_morphism(rng, &s[1], &s[2]);
    let h = random_morphism(rng, &s[2], &s[3]);
    let lhs = f.then(&g).and_then(|fg| fg.then(&h)).map_err(|e| e.to_string())?;
    let rhs = g.then(&h).and_then(|gh| f.then(&gh)).map_err(|e| e.to_string())?;
    ensure(lhs.components() == rhs.components() && lhs == rhs, || {
        format!("(h∘g)∘f != h∘(g∘f) for f = {f:?}, g = {g:?}, h = {h:?}")
    })
}

pub fn identity_units(rng: &mut rand::rngs::StdRng) -> Result<(), String> {
    let a = small_scenario(rng);
    let b = small_scenario(rng);
    let f = random_morphism(rng, &a, &b);
    let kind = SemifieldKind::NonNegRational;
    let left = Morphism::identity(&a, kind).then(&f).map_err(|e| e.to_string())?;
    let right = f.then(&Morphism::identity(&b, kind)).map_err(|e| e.to_string())?;
    ensure(left == f && right == f, || format!("identity is not a unit for {f:?}"))
}

pub fn pushforward_functoriality(rng: &mut rand::rngs::StdRng) -> Result<(), String> {
    let s: Vec<Scenario> = (0..3).map(|_| small_scenario(rng)).collect();
    let d = generate::model(rng, &s[0]);
    let f = random_morphism(rng, &s[0], &s[1]);
    let g = random_morphism(rng, &s[1], &s[2]);
    let lhs = f.then(&g).and_then(|gf| gf.pushforward(&d)).map_err(|e| e.to_string())?;
    let rhs = f
        .pushforward(&d)
        .and_then(|fd| g.pushforward(&fd))
        .map_err(|e| e.to_string())?;
    ensure(lhs == rhs, || format!("(g∘f)_* d != g_* f_* d for d = {d:?}"))
}

fn weights<R: Rng>(rng: &mut R, n: usize) -> Vec<SemifieldValue> {
    generate::weights(rng, n, 0.2)
        .into_iter()
        .map(SemifieldValue::NonNeg)
        .collect()
}

pub fn pushforward_of_mixture(rng: &mut rand::rngs::StdRng) -> Result<(), String> {
    let a = small_scenario(rng);
    let b = small_scenario(rng);
    let n = rng.gen_range(1..=3);
    let models: Vec<EmpiricalModel> = (0..n).map(|_| generate::model(rng, &a)).collect();
    let w = weights(rng, n);
    let m = random_morphism(rng, &a, &b);
    let terms: Vec<_> = w.iter().cloned().zip(models.iter().cloned()).collect();
    let lhs = EmpiricalModel::mix(&terms)
        .map_err(|e| e.to_string())
        .and_then(|d| m.pushforward(&d).map_err(|e| e.to_string()))?;
    let pushed: Result<Vec<_>, _> = models.iter().map(|d| m.pushforward(d)).collect();
    let pushed = pushed.map_err(|e| e.to_string())?;
    let terms: Vec<_> = w.into_iter().zip(pushed).collect();
    let rhs = EmpiricalModel::mix(&terms).map_err(|e| e.to_string())?;
    ensure(lhs == rhs, || "σ_*(Σ r_i d_i) != Σ r_i σ_* d_i".to_string())
}

pub fn mixed_morphism_pushforward(rng: &mut rand::rngs::StdRng) -> Result<(), String> {
    let a = small_scenario(rng);
    let b = small_scenario(rng);
    let d = generate::model(rng, &a);
    let r = generate::relation(rng, &b, &a);
    let n = rng.gen_range(1..=3);
    let ms: Vec<Morphism> = (0..n).map(|_| generate::morphism(rng, &a, &b, &r)).collect();
    let w = weights(rng, n);
    let terms: Vec<_> = w.iter().cloned().zip(ms.iter().cloned()).collect();
    let lhs = Morphism::mix(&terms)
        .and_then(|m| m.pushforward(&d))
        .map_err(|e| e.to_string())?;
    let pushed: Result<Vec<_>, _> = ms.iter().map(|m| m.pushforward(&d)).collect();
    let pushed = pushed.map_err(|e| e.to_string())?;
    let terms: Vec<_> = w.into_iter().zip(pushed).collect();
    let rhs = EmpiricalModel::mix(&terms).map_err(|e| e.to_string())?;
    ensure(lhs == rhs, || "(Σ r_i σ^i)_* d != Σ r_i σ^i_* d".to_string())
}
