//! Spanning-tree maximizing graph design.
//!
//! Selects edges to add to (or remove from) a weighted graph so the weighted
//! number of spanning trees is (near-)maximal, via greedy selection and
//! convex relaxations, with a posteriori certificates bounding the distance
//! to the true optimum.
//!
//! The numeric kernel is generic over the scalar type through the [`Real`]
//! trait (`f64`, `f32`); the `*64` aliases at the crate root cover the common
//! case.

pub mod certificate;
pub mod convex;
pub mod error;
pub mod generate;
pub mod graph;
pub mod greedy;
pub mod linalg;
pub mod oracle;
pub mod treeconn;

mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Graph64 = graph::WeightedGraph<f64>;
pub type Edge64 = graph::Edge<f64>;
pub type Matrix64 = linalg::Matrix<f64>;
pub type Factor64 = linalg::CholeskyFactor<f64>;
pub type Candidates64 = greedy::CandidateSet<f64>;
pub type Selection64 = greedy::SelectionResult<f64>;
pub type Certificate64 = certificate::Certificate<f64>;
pub type Relaxation64 = convex::RelaxationSolution<f64>;

pub type Graph32 = graph::WeightedGraph<f32>;
pub type Edge32 = graph::Edge<f32>;
