//! Inductive network embeddings that preserve both local proximity and
//! global structural identity.
//!
//! The pipeline: estimate a per-node structural descriptor from restarting
//! random walks (`structfeat`), build positive pairs from window
//! co-occurrence and descriptor similarity (`sampling`), learn a
//! content-to-embedding generator jointly with an auxiliary per-node
//! embedding table through a negative-sampling objective (`model`,
//! `trainer`), and evaluate with node classification, mirror-network and
//! correlation protocols (`eval`). Everything numeric is generic over the
//! scalar type; `f64` aliases are exported at the crate root.

pub mod cli;
pub mod error;
pub mod eval;
pub mod graph;
pub mod linalg;
pub mod model;
pub mod real;
pub mod sampling;
pub mod structfeat;
pub mod synth;
pub mod trainer;

pub use error::{Error, Result};
pub use graph::{load_graph, load_graph_structure, NodeId, SENTINEL};
pub use real::Real;

/// Default scalar used by the CLI and the type aliases below.
pub type Scalar = f64;

pub type Graph64 = graph::Graph<Scalar>;
pub type Mat64 = linalg::Mat<Scalar>;
pub type StructuralFeature64 = structfeat::StructuralFeature<Scalar>;
pub type GeneratorParams64 = model::GeneratorParams<Scalar>;
pub type AuxEmbeddings64 = model::AuxEmbeddings<Scalar>;
pub type TrainedModel64 = trainer::TrainedModel<Scalar>;
