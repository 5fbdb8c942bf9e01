//! Differential forms as jets, their integrals over chains, and the Stokes-family identities.

mod estimate;
mod integrate;
mod jet;
mod poly;
mod quadrature;
mod quantize;
mod theorems;

pub use estimate::{form_norm_estimate, natural_norm_estimate};
pub use integrate::{
    integrate_element_chain, integrate_poly_chain, pushforward_element_chain, quadrature_element_chain,
};
pub use jet::{FormJet, Provenance, SmoothMap, FD_STEP};
pub use poly::{Poly, PolyForm};
pub use quadrature::{cell_nodes, cube_rule, gauss_legendre, simplex_rule, ReferenceRule, DEFAULT_DEGREE};
pub use quantize::quantize_form;
pub use theorems::{stokes_residual, Domain, Mode, Residual};
