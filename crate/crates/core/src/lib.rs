//! Bearing rigidity theory and bearing-based coordination of multi-agent
//! networks.
//!
//! The crate is organised bottom-up:
//!
//! - [`graph`]: undirected graphs, orientations, incidence matrices, Laman
//!   recognition and Henneberg construction.
//! - [`rigidity`]: projection matrices, bearing and distance rigidity
//!   matrices, the bearing Laplacian, rank-based rigidity verdicts, generic
//!   rigidity sampling and SE(2) rigidity.
//! - [`localization`]: bearing localizability, the closed-form least-squares
//!   solve and the distributed gradient protocol.
//! - [`formation`]: bearing-based and bearing-only formation control laws and
//!   their objectives and metrics.
//! - [`sim`]: fixed-step integration and trajectory recording.
//!
//! Vertices are 0-based everywhere in this crate. Every undirected edge
//! `{i, j}` is stored with `i < j`, and that pair is its canonical
//! orientation `i -> j`.

pub mod error;
pub mod formation;
pub mod graph;
pub mod linalg;
pub mod localization;
pub mod rigidity;
pub mod sim;
mod weights;

pub use error::{Error, Result};
pub use graph::{Edge, Graph, OrientedGraph};
pub use rigidity::{Network, RigidityReport, Verdict};

/// Relative threshold on singular values used for every numerical rank.
pub const RANK_TOL: f64 = 1e-8;

/// Absolute distance below which two adjacent nodes count as collocated.
pub const EPS_DIST: f64 = 1e-9;
