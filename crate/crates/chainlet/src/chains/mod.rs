//! Oriented cells, polyhedral chains, subdivision and Whitney decompositions.

mod cell;
mod chain;
pub mod whitney;

pub use cell::{division_point, gram_det, Cell, CellKey, DEGENERACY_TOL};
pub use chain::{pairwise_sum, PolyChain, Term, CHAIN_ZERO_TOL};
pub use whitney::{whitney_decompose, BoxRegion, Polygon, Region, SampledRegion, WhitneyDecomposition};

use crate::element_chain::ElementChain;

/// Subdivides `depth` times and replaces every cell by its `Vec` placed at the cell's barycenter.
pub fn element_approximation(p: &PolyChain, depth: usize) -> ElementChain {
    let sub = p.subdivide(depth);
    let mut out = ElementChain::new(p.dim(), p.grade());
    for t in sub.terms() {
        out.push(t.cell.centroid(), t.cell.vec().scale(t.c)).expect("uniform grade");
    }
    out
}
