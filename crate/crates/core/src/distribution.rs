//! Finitely supported distributions valued in a semifield, with the monad
//! structure (unit, bind), independent products, conditionals and mixtures.

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::semifield::{SemifieldError, SemifieldHom, SemifieldKind, SemifieldValue};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DistributionError {
    #[error(transparent)]
    Semifield(#[from] SemifieldError),
    #[error("weights sum to {0}, not 1")]
    NotNormalized(String),
    #[error("conditioning on an event of zero weight")]
    ConditioningOnNull,
    #[error("mixture weights sum to {0}, not 1")]
    WeightsNotNormalized(String),
    #[error("a mixture needs at least one term")]
    EmptyMixture,
}

/// A normalized `R`-distribution with finite support.
///
/// Only nonzero weights are stored, so the key set is exactly the support and
/// two distributions are equal iff they are structurally equal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Distribution<K> {
    kind: SemifieldKind,
    weights: BTreeMap<K, SemifieldValue>,
}

impl<K: Ord + Clone> Distribution<K> {
    /// Builds a distribution from weighted points. Repeated points are summed
    /// and zero weights dropped; the total must be exactly 1.
    pub fn new<I>(kind: SemifieldKind, entries: I) -> Result<Self, DistributionError>
    where
        I: IntoIterator<Item = (K, SemifieldValue)>,
    {
        let mut weights: BTreeMap<K, SemifieldValue> = BTreeMap::new();
        for (k, v) in entries {
            if v.kind() != kind {
                return Err(SemifieldError::InstanceMismatch {
                    expected: kind,
                    found: v.kind(),
                }
                .into());
            }
            accumulate(&mut weights, k, v);
        }
        weights.retain(|_, v| !v.is_zero());
        let total = weights.values().fold(kind.zero(), |acc, v| acc.plus(v));
        if !total.is_one() {
            return Err(DistributionError::NotNormalized(total.to_string()));
        }
        Ok(Distribution { kind, weights })
    }

    /// Trusted constructor for results that are normalized by construction.
    fn from_weights(kind: SemifieldKind, mut weights: BTreeMap<K, SemifieldValue>) -> Self {
        weights.retain(|_, v| !v.is_zero());
        debug_assert!(weights
            .values()
            .fold(kind.zero(), |acc, v| acc.plus(v))
            .is_one());
        Distribution { kind, weights }
    }

    /// The point mass `1·x`.
    pub fn unit(kind: SemifieldKind, x: K) -> Self {
        let mut weights = BTreeMap::new();
        weights.insert(x, kind.one());
        Distribution { kind, weights }
    }

    pub fn kind(&self) -> SemifieldKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = &K> {
        self.weights.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &SemifieldValue)> {
        self.weights.iter()
    }

    pub fn contains(&self, k: &K) -> bool {
        self.weights.contains_key(k)
    }

    /// The weight of `k`; zero outside the support.
    pub fn weight(&self, k: &K) -> SemifieldValue {
        self.weights.get(k).cloned().unwrap_or_else(|| self.kind.zero())
    }

    /// The single support point, if this is a point mass.
    pub fn as_point(&self) -> Option<&K> {
        match self.weights.iter().next() {
            Some((k, v)) if self.weights.len() == 1 && v.is_one() => Some(k),
            _ => None,
        }
    }

    /// Image distribution: the weights of each fiber of `f` are summed.
    pub fn map<L, F>(&self, mut f: F) -> Distribution<L>
    where
        L: Ord + Clone,
        F: FnMut(&K) -> L,
    {
        let mut weights = BTreeMap::new();
        for (k, v) in &self.weights {
            accumulate(&mut weights, f(k), v.clone());
        }
        Distribution::from_weights(self.kind, weights)
    }

    /// Kleisli extension: `x ↦ Σ_y self(y)·k(y)(x)`.
    pub fn bind<L, F>(&self, mut k: F) -> Result<Distribution<L>, DistributionError>
    where
        L: Ord + Clone,
        F: FnMut(&K) -> Distribution<L>,
    {
        self.try_bind(|y| Ok::<_, DistributionError>(k(y)))
    }

    /// [`Distribution::bind`] with a fallible kernel.
    pub fn try_bind<L, F, E>(&self, mut k: F) -> Result<Distribution<L>, E>
    where
        L: Ord + Clone,
        F: FnMut(&K) -> Result<Distribution<L>, E>,
        E: From<DistributionError>,
    {
        let mut weights = BTreeMap::new();
        for (y, w) in &self.weights {
            let inner = k(y)?;
            if inner.kind != self.kind {
                return Err(E::from(DistributionError::from(
                    SemifieldError::InstanceMismatch {
                        expected: self.kind,
                        found: inner.kind,
                    },
                )));
            }
            for (x, v) in inner.weights {
                accumulate(&mut weights, x, w.times(&v));
            }
        }
        Ok(Distribution::from_weights(self.kind, weights))
    }

    /// Independent product `(x, y) ↦ self(x)·other(y)`.
    pub fn product<L: Ord + Clone>(
        &self,
        other: &Distribution<L>,
    ) -> Result<Distribution<(K, L)>, DistributionError> {
        if self.kind != other.kind {
            return Err(SemifieldError::InstanceMismatch {
                expected: self.kind,
                found: other.kind,
            }
            .into());
        }
        let mut weights = BTreeMap::new();
        for (x, a) in &self.weights {
            for (y, b) in &other.weights {
                weights.insert((x.clone(), y.clone()), a.times(b));
            }
        }
        Ok(Distribution::from_weights(self.kind, weights))
    }

    /// Pointwise mixture `Σ r_i·d_i`. The weights must sum to 1; zero-weight
    /// terms contribute nothing.
    pub fn convex(terms: &[(SemifieldValue, Distribution<K>)]) -> Result<Self, DistributionError> {
        let kind = terms.first().ok_or(DistributionError::EmptyMixture)?.1.kind;
        let mut total = kind.zero();
        let mut weights = BTreeMap::new();
        for (r, d) in terms {
            for found in [r.kind(), d.kind] {
                if found != kind {
                    return Err(SemifieldError::InstanceMismatch { expected: kind, found }.into());
                }
            }
            total = total.plus(r);
            for (x, v) in &d.weights {
                accumulate(&mut weights, x.clone(), r.times(v));
            }
        }
        if !total.is_one() {
            return Err(DistributionError::WeightsNotNormalized(total.to_string()));
        }
        Ok(Distribution::from_weights(kind, weights))
    }

    /// Applies a semifield homomorphism to every weight.
    pub fn apply_hom(&self, hom: SemifieldHom) -> Result<Self, DistributionError> {
        let mut weights = BTreeMap::new();
        for (k, v) in &self.weights {
            weights.insert(k.clone(), hom.apply(v)?);
        }
        Ok(Distribution::from_weights(hom.target(), weights))
    }
}

impl<X: Ord + Clone, Y: Ord + Clone> Distribution<(X, Y)> {
    pub fn marginal_first(&self) -> Distribution<X> {
        self.map(|(x, _)| x.clone())
    }

    pub fn marginal_second(&self) -> Distribution<Y> {
        self.map(|(_, y)| y.clone())
    }

    /// The conditional `self(− | y0)`, i.e. `x ↦ self(x, y0) / self(y0)`.
    pub fn conditional(&self, y0: &Y) -> Result<Distribution<X>, DistributionError> {
        let mut joint = BTreeMap::new();
        let mut mass = self.kind.zero();
        for ((x, y), v) in &self.weights {
            if y == y0 {
                mass = mass.plus(v);
                joint.insert(x.clone(), v.clone());
            }
        }
        if mass.is_zero() {
            return Err(DistributionError::ConditioningOnNull);
        }
        let scale = mass.inv()?;
        for v in joint.values_mut() {
            *v = v.times(&scale);
        }
        Ok(Distribution::from_weights(self.kind, joint))
    }
}

fn accumulate<K: Ord>(weights: &mut BTreeMap<K, SemifieldValue>, k: K, v: SemifieldValue) {
    match weights.get_mut(&k) {
        Some(existing) => *existing = existing.plus(&v),
        None => {
            weights.insert(k, v);
        }
    }
}

#[derive(Serialize, Deserialize)]
struct DistributionJson<K> {
    semifield: SemifieldKind,
    support: Vec<EntryJson<K>>,
}

#[derive(Serialize, Deserialize)]
struct EntryJson<K> {
    key: K,
    value: serde_json::Value,
}

impl<K: Serialize> Serialize for Distribution<K> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out<'a, K> {
            semifield: SemifieldKind,
            support: Vec<Entry<'a, K>>,
        }
        #[derive(Serialize)]
        struct Entry<'a, K> {
            key: &'a K,
            value: &'a SemifieldValue,
        }
        Out {
            semifield: self.kind,
            support: self.weights.iter().map(|(key, value)| Entry { key, value }).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de, K: DeserializeOwned + Ord + Clone> Deserialize<'de> for Distribution<K> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = DistributionJson::<K>::deserialize(deserializer)?;
        let kind = raw.semifield;
        let entries = raw
            .support
            .into_iter()
            .map(|e| Ok((e.key, SemifieldValue::from_json(kind, &e.value)?)))
            .collect::<Result<Vec<_>, SemifieldError>>()
            .map_err(serde::de::Error::custom)?;
        Distribution::new(kind, entries).map_err(serde::de::Error::custom)
    }
}
