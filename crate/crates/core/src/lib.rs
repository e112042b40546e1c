//! Searching graphs with untrusted distance predictions.
//!
//! An agent starts at a root vertex of a graph it cannot see and must reach
//! a hidden goal. Every vertex carries a (possibly wrong) prediction of its
//! distance to the goal. This crate provides:
//!
//! * [`graph`]: weighted graphs, shortest paths, tours, Steiner trees.
//! * [`metrics`]: embedding distortion and doubling constants.
//! * [`predictions`]: error generators, error profiles, implied errors.
//! * [`exploration`]: the fog-of-war environment and online strategies.
//! * [`planning`]: the full-information planning strategy.
//! * [`instances`]: random families, adversarial instances, instance files.
//! * [`bounds`]: closed-form guarantees and per-trace property checks.
//! * [`experiments`]: parameter sweeps, summaries and verification suites.
//!
//! Algorithms are generic over the [`Scalar`] float type; the aliases below
//! fix it to `f64` or `f32`.

pub mod bounds;
pub mod error;
pub mod experiments;
pub mod exploration;
pub mod graph;
pub mod instances;
pub mod metrics;
pub mod planning;
pub mod predictions;
pub mod scalar;

pub use error::{Error, Result};
pub use graph::{Graph, VertexId};
pub use scalar::Scalar;

pub type Graph64 = graph::Graph<f64>;
pub type Graph32 = graph::Graph<f32>;
pub type Instance64 = exploration::SearchInstance<f64>;
pub type Instance32 = exploration::SearchInstance<f32>;
pub type Trace64 = exploration::SearchTrace<f64>;
pub type Trace32 = exploration::SearchTrace<f32>;
pub type Prediction64 = predictions::Prediction<f64>;
pub type Prediction32 = predictions::Prediction<f32>;
