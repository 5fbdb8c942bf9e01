//! Certified bounds on the natural norms: upper bounds from explicit
//! decompositions, lower bounds from forms with known norm.

mod bounds;
mod decomposition;
mod families;

pub use bounds::{lower_bound, upper_bound, BoundKind, Certificate, NormBound};
pub use decomposition::{difference_norm, translation_decomposition, Decomposition, DiffGen};
pub use families::{
    clamped_x_dy, dipole_chain, dipole_sequence, direction_form_family, mass_dual_estimate, scaling_check,
    staircase_decomposition, Dipole, ScalingReport, Staircase,
};
