//! Spectral computations for Laplacians on metric graphs.
//!
//! Start from a [`graph::MetricGraph`] and [`conditions::VertexConditions`];
//! [`spectral`] locates eigenvalues and counts zero modes, [`compactify`]
//! closes off external edges, and [`index`] computes the Dirac index data.

pub mod campaign;
pub mod checks;
pub mod compactify;
pub mod conditions;
pub mod error;
pub mod graph;
pub mod index;
pub mod linalg;
pub mod random;
pub mod spectral;

pub use conditions::VertexConditions;
pub use error::{Error, Result};
pub use graph::{GraphSpec, MetricGraph};
pub use linalg::{CMat, CVec, RankTol, C64};
