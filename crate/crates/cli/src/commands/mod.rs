pub mod analyze;
pub mod construct;
pub mod formation;
pub mod localize;
