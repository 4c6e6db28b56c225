//! Bearing-based and bearing-only formation control.
//!
//! A target formation is a set of desired bearings `g*_ij` on the edges of a
//! graph. Bearing-based laws steer followers using relative positions while
//! leaders follow prescribed motions. Bearing-only laws use nothing but the
//! current bearings and run without leaders.

mod laws;
mod leader;
mod metrics;
mod systems;
mod target;

pub use laws::{
    bearing_gradient_field, bearing_only_descent_field, bearing_only_field,
    di_acceleration_feedback_field, di_field, si_pi_field, si_stabilization_field,
    si_velocity_feedback_field, unicycle_field,
};
pub use leader::LeaderMotion;
pub use metrics::{
    bearing_error, centroid, formation_metrics, phi1, phi2, scale, FormationMetrics,
};
pub use systems::{FormationSystem, Law};
pub use target::{Gains, TargetFormation};
