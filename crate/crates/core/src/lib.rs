//! Sheaf-theoretic contextuality: empirical models over semifields,
//! stochastic simulations between them, and exact decision procedures for
//! (non-)contextuality, the contextual fraction and simulation existence.

pub mod analysis;
pub mod distribution;
pub mod generate;
pub mod model;
pub mod morphism;
pub mod scenario;
pub mod semifield;

pub use distribution::{Distribution, DistributionError};
pub use model::EmpiricalModel;
pub use morphism::{Morphism, Simulation};

pub use scenario::{Face, Scenario, Section, SimplicialRelation};
pub use semifield::{SemifieldHom, SemifieldKind, SemifieldValue};
