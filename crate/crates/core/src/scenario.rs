//! Measurement scenarios as labelled simplicial complexes, their sections, and
//! simplicial relations between them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A set of measurement names. Used for contexts, faces and arbitrary subsets.
pub type Face = BTreeSet<String>;

pub const LEFT_TAG: &str = "L:";
pub const RIGHT_TAG: &str = "R:";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("cover member {inner} is contained in {outer}")]
    NotAntichain { inner: FaceDisplay, outer: FaceDisplay },
    #[error("measurements {0} are not covered by any context")]
    CoverIncomplete(FaceDisplay),
    #[error("measurement {0:?} has no outcomes")]
    EmptyOutcomeSet(String),
    #[error("unknown measurement {0:?}")]
    UnknownMeasurement(String),
    #[error("{0} is not a face of the scenario")]
    NotAFace(FaceDisplay),
    #[error("{subset} is not a subset of the section domain {domain}")]
    NotSubset { subset: FaceDisplay, domain: FaceDisplay },
    #[error("relation maps context {0} outside every face")]
    NotSimplicial(FaceDisplay),
    #[error("measurement {0:?} is not Graham-reducible")]
    NotReducible(String),
    #[error("section {section} does not match the measurements {domain}")]
    InvalidSection { section: Section, domain: FaceDisplay },
}

/// Display wrapper so errors print faces as `{a, b}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceDisplay(pub Face);

impl fmt::Display for FaceDisplay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(x)?;
        }
        f.write_str("}")
    }
}

impl From<&Face> for FaceDisplay {
    fn from(face: &Face) -> Self {
        FaceDisplay(face.clone())
    }
}

pub fn face<I, S>(items: I) -> Face
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    items.into_iter().map(Into::into).collect()
}

/// The inclusion-maximal members of `sets`. An empty family becomes `{∅}`.
pub fn maximal_sets<I: IntoIterator<Item = Face>>(sets: I) -> BTreeSet<Face> {
    let all: BTreeSet<Face> = sets.into_iter().collect();
    let mut out: BTreeSet<Face> = all
        .iter()
        .filter(|s| !all.iter().any(|t| t != *s && s.is_subset(t)))
        .cloned()
        .collect();
    if out.is_empty() {
        out.insert(Face::new());
    }
    out
}

/// An assignment of outcomes to a set of measurements.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Section(BTreeMap<String, String>);

impl Section {
    pub fn empty() -> Self {
        Section(BTreeMap::new())
    }

    pub fn from_pairs<I, A, B>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (A, B)>,
        A: Into<String>,
        B: Into<String>,
    {
        Section(pairs.into_iter().map(|(a, b)| (a.into(), b.into())).collect())
    }

    pub fn domain(&self) -> Face {
        self.0.keys().cloned().collect()
    }

    pub fn get(&self, measurement: &str) -> Option<&str> {
        self.0.get(measurement).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &String)> {
        self.0.iter()
    }

    pub fn insert(&mut self, measurement: impl Into<String>, outcome: impl Into<String>) {
        self.0.insert(measurement.into(), outcome.into());
    }

    /// `s|_U`; fails unless `U` is contained in the domain.
    pub fn restrict(&self, subset: &Face) -> Result<Section, ScenarioError> {
        if !subset.iter().all(|x| self.0.contains_key(x)) {
            return Err(ScenarioError::NotSubset {
                subset: subset.into(),
                domain: FaceDisplay(self.domain()),
            });
        }
        Ok(self.project(subset))
    }

    /// Restriction to `subset ∩ domain`.
    pub fn project(&self, subset: &Face) -> Section {
        if subset.len() >= self.0.len()
            && self.0.keys().all(|k| subset.contains(k)) {
                return self.clone();
            }
        Section(
            self.0
                .iter()
                .filter(|(k, _)| subset.contains(*k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        )
    }

    /// Union of two sections; on shared measurements `other` wins.
    pub fn merge(&self, other: &Section) -> Section {
        let mut out = self.0.clone();
        out.extend(other.0.iter().map(|(k, v)| (k.clone(), v.clone())));
        Section(out)
    }

    /// Whether the two sections agree on their common measurements.
    pub fn agrees_with(&self, other: &Section) -> bool {
        self.0
            .iter()
            .all(|(k, v)| other.0.get(k).is_none_or(|w| w == v))
    }

    pub fn tagged(&self, tag: &str) -> Section {
        Section(self.0.iter().map(|(k, v)| (format!("{tag}{k}"), v.clone())).collect())
    }

    /// The measurements carrying `tag`, with the tag removed.
    pub fn untagged(&self, tag: &str) -> Section {
        Section(
            self.0
                .iter()
                .filter_map(|(k, v)| k.strip_prefix(tag).map(|k| (k.to_string(), v.clone())))
                .collect(),
        )
    }
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}↦{v}")?;
        }
        f.write_str("}")
    }
}

/// A finite measurement scenario `⟨X, M, (O_x)⟩`.
///
/// The cover is stored as a canonical antichain; outcome labels are kept
/// sorted, which fixes the lexicographic order of sections.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ScenarioJson", into = "ScenarioJson")]
pub struct Scenario {
    outcomes: BTreeMap<String, BTreeSet<String>>,
    cover: BTreeSet<Face>,
}

impl Scenario {
    /// Validates and builds a scenario. An empty measurement set with an empty
    /// cover is read as the empty scenario, whose cover is `{∅}`.
    pub fn new<I>(outcomes: BTreeMap<String, BTreeSet<String>>, cover: I) -> Result<Self, ScenarioError>
    where
        I: IntoIterator<Item = Face>,
    {
        let mut cover: BTreeSet<Face> = cover.into_iter().collect();
        if outcomes.is_empty() && cover.is_empty() {
            cover.insert(Face::new());
        }
        for context in &cover {
            if let Some(x) = context.iter().find(|x| !outcomes.contains_key(*x)) {
                return Err(ScenarioError::UnknownMeasurement(x.clone()));
            }
        }
        if let Some((x, _)) = outcomes.iter().find(|(_, o)| o.is_empty()) {
            return Err(ScenarioError::EmptyOutcomeSet(x.clone()));
        }
        for inner in &cover {
            if let Some(outer) = cover.iter().find(|c| *c != inner && inner.is_subset(c)) {
                return Err(ScenarioError::NotAntichain {
                    inner: inner.into(),
                    outer: outer.into(),
                });
            }
        }
        let covered: Face = cover.iter().flatten().cloned().collect();
        let missing: Face = outcomes.keys().filter(|x| !covered.contains(*x)).cloned().collect();
        if !missing.is_empty() {
            return Err(ScenarioError::CoverIncomplete(FaceDisplay(missing)));
        }
        if cover.is_empty() {
            return Err(ScenarioError::CoverIncomplete(FaceDisplay(Face::new())));
        }
        Ok(Scenario { outcomes, cover })
    }

    /// Convenience constructor from string literals.
    pub fn from_lists(measurements: &[(&str, &[&str])], cover: &[&[&str]]) -> Result<Self, ScenarioError> {
        let outcomes = measurements
            .iter()
            .map(|(x, os)| (x.to_string(), os.iter().map(|o| o.to_string()).collect()))
            .collect();
        Scenario::new(outcomes, cover.iter().map(|c| face(c.iter().copied())))
    }

    /// The empty scenario `⟨∅, {∅}, ∅⟩`, carrier of the terminal model.
    pub fn empty() -> Self {
        Scenario {
            outcomes: BTreeMap::new(),
            cover: [Face::new()].into_iter().collect(),
        }
    }

    /// Re-checks the invariants enforced by [`Scenario::new`].
    pub fn validate(&self) -> Result<(), ScenarioError> {
        Scenario::new(self.outcomes.clone(), self.cover.clone()).map(|_| ())
    }

    pub fn measurements(&self) -> Face {
        self.outcomes.keys().cloned().collect()
    }

    pub fn num_measurements(&self) -> usize {
        self.outcomes.len()
    }

    pub fn has_measurement(&self, x: &str) -> bool {
        self.outcomes.contains_key(x)
    }

    pub fn outcomes(&self, x: &str) -> Option<&BTreeSet<String>> {
        self.outcomes.get(x)
    }

    pub fn outcome_map(&self) -> &BTreeMap<String, BTreeSet<String>> {
        &self.outcomes
    }

    pub fn cover(&self) -> &BTreeSet<Face> {
        &self.cover
    }

    fn check_known<'a, I: IntoIterator<Item = &'a String>>(&self, xs: I) -> Result<(), ScenarioError> {
        for x in xs {
            if !self.outcomes.contains_key(x) {
                return Err(ScenarioError::UnknownMeasurement(x.clone()));
            }
        }
        Ok(())
    }

    /// Whether `subset` is contained in some context (the empty set always is).
    pub fn is_face(&self, subset: &Face) -> Result<bool, ScenarioError> {
        self.check_known(subset)?;
        Ok(self.covering_context(subset).is_some())
    }

    /// The first context (in canonical order) containing `subset`.
    pub fn covering_context(&self, subset: &Face) -> Option<&Face> {
        self.cover.iter().find(|c| subset.is_subset(c))
    }

    /// All faces of the complex, including `∅`.
    pub fn faces(&self) -> BTreeSet<Face> {
        let mut out = BTreeSet::new();
        for context in &self.cover {
            out.extend(subsets(context));
        }
        out
    }

    /// Sections over a face, in lexicographic order.
    pub fn enumerate_sections(&self, subset: &Face) -> Result<Vec<Section>, ScenarioError> {
        if !self.is_face(subset)? {
            return Err(ScenarioError::NotAFace(subset.into()));
        }
        self.sections_of(subset)
    }

    /// Sections over an arbitrary subset of the measurements (not necessarily
    /// a face), in lexicographic order.
    pub fn sections_of(&self, subset: &Face) -> Result<Vec<Section>, ScenarioError> {
        self.check_known(subset)?;
        let mut out = vec![Section::empty()];
        // Building back-to-front keeps the output in lexicographic order.
        for x in subset.iter().rev() {
            let mut next = Vec::with_capacity(out.len() * self.outcomes[x].len());
            for o in &self.outcomes[x] {
                for s in &out {
                    let mut t = s.clone();
                    t.insert(x.clone(), o.clone());
                    next.push(t);
                }
            }
            out = next;
        }
        out.sort();
        Ok(out)
    }

    pub fn global_sections(&self) -> Vec<Section> {
        self.sections_of(&self.measurements()).expect("measurements are known")
    }

    pub fn num_sections(&self, subset: &Face) -> usize {
        subset.iter().map(|x| self.outcomes.get(x).map_or(0, BTreeSet::len)).product()
    }

    /// Whether `section` assigns a valid outcome to exactly the measurements in `domain`.
    pub fn check_section(&self, section: &Section, domain: &Face) -> Result<(), ScenarioError> {
        let ok = section.len() == domain.len()
            && section.iter().all(|(x, o)| {
                domain.contains(x) && self.outcomes.get(x).is_some_and(|os| os.contains(o))
            });
        if ok {
            Ok(())
        } else {
            Err(ScenarioError::InvalidSection {
                section: section.clone(),
                domain: domain.into(),
            })
        }
    }

    /// The lexicographically first outcome on each measurement of `subset`.
    pub fn first_section(&self, subset: &Face) -> Section {
        Section(
            subset
                .iter()
                .filter_map(|x| Some((x.clone(), self.outcomes.get(x)?.iter().next()?.clone())))
                .collect(),
        )
    }

    /// The subscenario on `subset`, with cover `{C ∩ subset}` made an antichain.
    pub fn restrict(&self, subset: &Face) -> Result<Scenario, ScenarioError> {
        self.check_known(subset)?;
        let outcomes = self
            .outcomes
            .iter()
            .filter(|(x, _)| subset.contains(*x))
            .map(|(x, o)| (x.clone(), o.clone()))
            .collect();
        let cover = maximal_sets(self.cover.iter().map(|c| c.intersection(subset).cloned().collect()));
        Ok(Scenario { outcomes, cover })
    }

    /// Replaces outcome sets, keeping the complex.
    pub fn with_outcomes(&self, outcomes: BTreeMap<String, BTreeSet<String>>) -> Result<Scenario, ScenarioError> {
        if outcomes.keys().ne(self.outcomes.keys()) {
            let missing = self.outcomes.keys().find(|x| !outcomes.contains_key(*x));
            let extra = outcomes.keys().find(|x| !self.outcomes.contains_key(*x));
            return Err(ScenarioError::UnknownMeasurement(
                missing.or(extra).cloned().unwrap_or_default(),
            ));
        }
        Scenario::new(outcomes, self.cover.clone())
    }

    pub fn tagged(&self, tag: &str) -> Scenario {
        Scenario {
            outcomes: self.outcomes.iter().map(|(x, o)| (format!("{tag}{x}"), o.clone())).collect(),
            cover: self.cover.iter().map(|c| tag_face(c, tag)).collect(),
        }
    }

    /// `⟨X ⊔ Y, {C ⊔ D}, O ⊔ P⟩` with `L:`/`R:` name tagging.
    pub fn tensor(&self, other: &Scenario) -> Scenario {
        let mut outcomes = self.tagged(LEFT_TAG).outcomes;
        outcomes.extend(other.tagged(RIGHT_TAG).outcomes);
        let mut cover = BTreeSet::new();
        for c in &self.cover {
            for d in &other.cover {
                let mut joined = tag_face(c, LEFT_TAG);
                joined.extend(tag_face(d, RIGHT_TAG));
                cover.insert(joined);
            }
        }
        Scenario { outcomes, cover }
    }

    /// Measurements lying in exactly one context.
    pub fn graham_reducible_vertices(&self) -> Face {
        self.outcomes
            .keys()
            .filter(|x| self.cover.iter().filter(|c| c.contains(*x)).count() == 1)
            .cloned()
            .collect()
    }

    /// Deletes a reducible measurement: `⟨X∖{x}, {C∖{x}}⟩`, re-normalized.
    pub fn graham_reduce(&self, x: &str) -> Result<Scenario, ScenarioError> {
        if !self.has_measurement(x) {
            return Err(ScenarioError::UnknownMeasurement(x.to_string()));
        }
        if !self.graham_reducible_vertices().contains(x) {
            return Err(ScenarioError::NotReducible(x.to_string()));
        }
        let mut rest = self.measurements();
        rest.remove(x);
        self.restrict(&rest)
    }

    /// Greedy Graham reduction, always deleting the lexicographically smallest
    /// reducible measurement. Returns the deletion order when the complex
    /// collapses to the empty one, `None` otherwise.
    pub fn is_acyclic(&self) -> Option<Vec<String>> {
        let mut current = self.clone();
        let mut order = Vec::new();
        while current.num_measurements() > 0 {
            let x = current.graham_reducible_vertices().into_iter().next()?;
            current = current.graham_reduce(&x).expect("x is reducible");
            order.push(x);
        }
        Some(order)
    }
}

/// Wire form: `{"measurements": {"a": ["0","1"]}, "cover": [["a","b"]]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioJson {
    pub measurements: BTreeMap<String, Vec<String>>,
    pub cover: Vec<Vec<String>>,
}

impl TryFrom<ScenarioJson> for Scenario {
    type Error = ScenarioError;

    fn try_from(raw: ScenarioJson) -> Result<Self, Self::Error> {
        let outcomes = raw
            .measurements
            .into_iter()
            .map(|(x, os)| (x, os.into_iter().collect()))
            .collect();
        Scenario::new(outcomes, raw.cover.into_iter().map(|c| c.into_iter().collect()))
    }
}

impl From<Scenario> for ScenarioJson {
    fn from(s: Scenario) -> Self {
        ScenarioJson {
            measurements: s
                .outcomes
                .into_iter()
                .map(|(x, os)| (x, os.into_iter().collect()))
                .collect(),
            cover: s.cover.into_iter().map(|c| c.into_iter().collect()).collect(),
        }
    }
}

pub fn tag_face(face: &Face, tag: &str) -> Face {
    face.iter().map(|x| format!("{tag}{x}")).collect()
}

/// All subsets of `set`.
pub fn subsets(set: &Face) -> Vec<Face> {
    let items: Vec<&String> = set.iter().collect();
    assert!(items.len() < 32, "subset enumeration over {} elements", items.len());
    (0u32..(1 << items.len()))
        .map(|mask| {
            items
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, x)| (*x).clone())
                .collect()
        })
        .collect()
}

/// A relation `π: X → Y` between the measurement sets of two scenarios,
/// stored as the image `π(x) ⊆ Y` of every `x ∈ X` (possibly empty).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SimplicialRelation {
    image: BTreeMap<String, Face>,
}

impl SimplicialRelation {
    pub fn new(image: BTreeMap<String, Face>) -> Self {
        SimplicialRelation { image }
    }

    pub fn from_lists(pairs: &[(&str, &[&str])]) -> Self {
        SimplicialRelation {
            image: pairs
                .iter()
                .map(|(x, ys)| (x.to_string(), face(ys.iter().copied())))
                .collect(),
        }
    }

    /// `x ↦ {x}` on the measurements of `scenario`.
    pub fn identity(scenario: &Scenario) -> Self {
        SimplicialRelation {
            image: scenario.measurements().into_iter().map(|x| (x.clone(), face([x]))).collect(),
        }
    }

    /// Every measurement of `scenario` maps to `∅`.
    pub fn empty_on(scenario: &Scenario) -> Self {
        SimplicialRelation {
            image: scenario.measurements().into_iter().map(|x| (x, Face::new())).collect(),
        }
    }

    pub fn image_map(&self) -> &BTreeMap<String, Face> {
        &self.image
    }

    pub fn domain(&self) -> Face {
        self.image.keys().cloned().collect()
    }

    pub fn image_of(&self, x: &str) -> Option<&Face> {
        self.image.get(x)
    }

    /// `π(U) = ⋃_{x∈U} π(x)`.
    pub fn apply(&self, subset: &Face) -> Face {
        subset
            .iter()
            .filter_map(|x| self.image.get(x))
            .flatten()
            .cloned()
            .collect()
    }

    pub fn total_image(&self) -> Face {
        self.image.values().flatten().cloned().collect()
    }

    /// Checks that the relation is defined on exactly `from`'s measurements,
    /// lands in `to`'s measurements, and maps every context of `from` into a
    /// face of `to`.
    pub fn validate(&self, from: &Scenario, to: &Scenario) -> Result<(), ScenarioError> {
        for x in from.outcomes.keys() {
            if !self.image.contains_key(x) {
                return Err(ScenarioError::UnknownMeasurement(x.clone()));
            }
        }
        for (x, ys) in &self.image {
            if !from.has_measurement(x) {
                return Err(ScenarioError::UnknownMeasurement(x.clone()));
            }
            to.check_known(ys)?;
        }
        for context in &from.cover {
            if to.covering_context(&self.apply(context)).is_none() {
                return Err(ScenarioError::NotSimplicial(context.into()));
            }
        }
        Ok(())
    }

    /// `x ↦ ⋃_{y ∈ self(x)} inner(y)`: first `self`, then `inner`.
    pub fn then(&self, inner: &SimplicialRelation) -> SimplicialRelation {
        SimplicialRelation {
            image: self.image.iter().map(|(x, ys)| (x.clone(), inner.apply(ys))).collect(),
        }
    }

    /// Tags both sides: `tag:x ↦ {tag:y}`.
    pub fn tagged(&self, tag: &str) -> SimplicialRelation {
        SimplicialRelation {
            image: self
                .image
                .iter()
                .map(|(x, ys)| (format!("{tag}{x}"), tag_face(ys, tag)))
                .collect(),
        }
    }

    pub fn disjoint_union(&self, other: &SimplicialRelation) -> SimplicialRelation {
        let mut image = self.tagged(LEFT_TAG).image;
        image.extend(other.tagged(RIGHT_TAG).image);
        SimplicialRelation { image }
    }

    /// Whether `self(x) ⊆ other(x)` for every `x`.
    pub fn is_contained_in(&self, other: &SimplicialRelation) -> bool {
        self.image
            .iter()
            .all(|(x, ys)| other.image.get(x).is_some_and(|zs| ys.is_subset(zs)))
    }

    pub fn size(&self) -> usize {
        self.image.values().map(BTreeSet::len).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BIN: &[&str] = &["0", "1"];

    fn path() -> Scenario {
        Scenario::from_lists(&[("a", BIN), ("b", BIN), ("c", BIN)], &[&["a", "b"], &["b", "c"]]).unwrap()
    }

    fn triangle() -> Scenario {
        Scenario::from_lists(
            &[("a", BIN), ("b", BIN), ("c", BIN)],
            &[&["a", "b"], &["b", "c"], &["a", "c"]],
        )
        .unwrap()
    }

    fn pr() -> Scenario {
        Scenario::from_lists(
            &[("a0", BIN), ("a1", BIN), ("b0", BIN), ("b1", BIN)],
            &[&["a0", "b0"], &["a0", "b1"], &["a1", "b0"], &["a1", "b1"]],
        )
        .unwrap()
    }

    #[test]
    fn validation() {
        path();
        let err = Scenario::from_lists(&[("a", BIN), ("b", BIN)], &[&["a", "b"], &["a"]]).unwrap_err();
        assert!(matches!(err, ScenarioError::NotAntichain { .. }));
        let err = Scenario::from_lists(&[("a", BIN), ("b", BIN), ("c", BIN)], &[&["a", "b"]]).unwrap_err();
        assert_eq!(err, ScenarioError::CoverIncomplete(FaceDisplay(face(["c"]))));
        let err = Scenario::from_lists(&[("a", &[])], &[&["a"]]).unwrap_err();
        assert_eq!(err, ScenarioError::EmptyOutcomeSet("a".into()));
        let err = Scenario::from_lists(&[("a", BIN)], &[&["a", "z"]]).unwrap_err();
        assert_eq!(err, ScenarioError::UnknownMeasurement("z".into()));
        assert_eq!(Scenario::from_lists(&[], &[]).unwrap(), Scenario::empty());
    }

    #[test]
    fn faces() {
        let t = triangle();
        assert!(t.is_face(&face(["a", "c"])).unwrap());
        assert!(!t.is_face(&face(["a", "b", "c"])).unwrap());
        assert!(t.is_face(&Face::new()).unwrap());
        assert!(t.is_face(&face(["q"])).is_err());
        assert_eq!(t.faces().len(), 7);
    }

    #[test]
    fn restriction_of_sections() {
        let s = Section::from_pairs([("a", "0"), ("b", "1")]);
        assert_eq!(s.restrict(&face(["a"])).unwrap(), Section::from_pairs([("a", "0")]));
        assert_eq!(s.restrict(&face(["a", "b"])).unwrap(), s);
        assert_eq!(s.restrict(&Face::new()).unwrap(), Section::empty());
        assert!(matches!(s.restrict(&face(["c"])), Err(ScenarioError::NotSubset { .. })));
    }

    #[test]
    fn relations() {
        let triple = Scenario::from_lists(&[("x", BIN), ("y", BIN), ("z", BIN)], &[&["x", "y", "z"]]).unwrap();
        let coins = Scenario::from_lists(&[("x", BIN), ("y", BIN)], &[&["x", "y"]]).unwrap();
        let parity = SimplicialRelation::from_lists(&[("x", &["x"]), ("y", &["y"]), ("z", &["x", "y"])]);
        parity.validate(&triple, &coins).unwrap();

        let onto_alice = SimplicialRelation::from_lists(&[
            ("a0", &["a0"]),
            ("b0", &["a1"]),
            ("a1", &[]),
            ("b1", &[]),
        ]);
        assert!(matches!(onto_alice.validate(&pr(), &pr()), Err(ScenarioError::NotSimplicial(_))));
        SimplicialRelation::empty_on(&pr()).validate(&pr(), &coins).unwrap();
    }

    #[test]
    fn tensors() {
        let t = triangle();
        assert_eq!(Scenario::empty().tensor(&t), t.tagged(RIGHT_TAG));
        let one = Scenario::from_lists(&[("x", BIN), ("y", BIN)], &[&["x", "y"]]).unwrap();
        let both = one.tensor(&one);
        assert_eq!(both.cover().len(), 1);
        assert_eq!(both.num_measurements(), 4);
        let pp = pr().tensor(&pr());
        assert_eq!(pp.cover().len(), 16);
        assert!(pp.cover().iter().all(|c| c.len() == 4));
        pp.validate().unwrap();
    }

    #[test]
    fn graham() {
        assert_eq!(path().graham_reducible_vertices(), face(["a", "c"]));
        assert!(triangle().graham_reducible_vertices().is_empty());
        let single = Scenario::from_lists(&[("x", BIN), ("y", BIN), ("z", BIN)], &[&["x", "y", "z"]]).unwrap();
        assert_eq!(single.graham_reducible_vertices(), face(["x", "y", "z"]));

        let reduced = path().graham_reduce("c").unwrap();
        assert_eq!(reduced.cover(), &[face(["a", "b"])].into_iter().collect());
        reduced.validate().unwrap();
        let lone = Scenario::from_lists(&[("x", BIN)], &[&["x"]]).unwrap();
        assert_eq!(lone.graham_reduce("x").unwrap(), Scenario::empty());
        assert_eq!(triangle().graham_reduce("a"), Err(ScenarioError::NotReducible("a".into())));

        assert_eq!(path().is_acyclic(), Some(vec!["a".into(), "b".into(), "c".into()]));
        assert_eq!(triangle().is_acyclic(), None);
        assert_eq!(Scenario::empty().is_acyclic(), Some(vec![]));
    }

    #[test]
    fn section_enumeration() {
        let t = triangle();
        let secs = t.enumerate_sections(&face(["a", "b"])).unwrap();
        let expected: Vec<Section> = [("0", "0"), ("0", "1"), ("1", "0"), ("1", "1")]
            .iter()
            .map(|(a, b)| Section::from_pairs([("a", *a), ("b", *b)]))
            .collect();
        assert_eq!(secs, expected);
        assert_eq!(t.enumerate_sections(&Face::new()).unwrap(), vec![Section::empty()]);
        let ternary = Scenario::from_lists(&[("x", &["0", "1", "2"])], &[&["x"]]).unwrap();
        assert_eq!(ternary.enumerate_sections(&face(["x"])).unwrap().len(), 3);
        assert!(matches!(
            t.enumerate_sections(&face(["a", "b", "c"])),
            Err(ScenarioError::NotAFace(_))
        ));
    }
}
