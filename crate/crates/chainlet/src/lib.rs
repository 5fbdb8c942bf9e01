//! Chainlet geometry at desk scale.
//!
//! The crate is organised bottom-up: [`exterior`] holds the algebra of
//! differential elements at a point, [`chains`] the polyhedral chains built from
//! simplices and parallelepipeds, [`forms`] jet-based differential forms and
//! their integrals, [`norms`] certified bounds on the natural norms, and [`lab`]
//! the fractal and convergence experiments.

pub mod chains;
pub mod element_chain;
pub mod error;
pub mod exterior;
pub mod forms;
pub mod lab;
pub mod norms;

pub use chains::{Cell, PolyChain};
pub use element_chain::ElementChain;
pub use error::{Error, Result};
pub use exterior::{Coelement, Element, MultiIndex};
