//! Elements and coelements at a point: the graded algebra of differential
//! k-elements, its products, boundary, `⊥`, and the dual operators.

mod graded;
mod index;
mod ops;

pub use graded::{Coelement, Dual, Element, Graded, Key, Primal, ZERO_TOL};
pub use index::{DerivKey, MultiIndex};
pub(crate) use ops::sign;
pub use ops::{check_pairable, derived_product, pair, ProductKind};
