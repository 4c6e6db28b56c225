//! Numerical rigidity kernel.

mod bearing;
mod distance;
mod generic;
mod network;
pub mod projection;
mod report;
pub mod se2;

pub use bearing::{
    is_infinitesimally_bearing_rigid, trivial_bearing_motion_basis, TrivialBasis,
};
pub use distance::{is_infinitesimally_distance_rigid, trivial_distance_motion_basis};
pub use generic::{is_generically_bearing_rigid, GenericReport, GenericVerdict};
pub use network::{bearing_laplacian_from, Network};
pub use projection::projection;
pub use report::{RigidityReport, Verdict};
pub use se2::{is_se2_infinitesimally_rigid, Se2Network};
