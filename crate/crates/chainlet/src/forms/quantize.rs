use crate::chains::PolyChain;
use crate::element_chain::ElementChain;
use crate::error::{check_dim, Error, Result};
use crate::exterior::{Element, MultiIndex};

use super::jet::FormJet;

/// `Ch_d(ω)`: binary-subdivide `region` `depth` times and place
/// `M(Q)·♯ω(p_Q)` at the midpoint of every subcube `Q`.
///
/// Cells carry their orientation and coefficient into the weight, so a
/// negatively oriented cube contributes `−M(Q)`.
pub fn quantize_form(w: &FormJet, region: &PolyChain, depth: usize) -> Result<ElementChain> {
    check_dim(region.dim(), w.dim())?;
    let n = region.dim();
    if region.grade() != n {
        return Err(Error::Invalid(format!("region must be an {n}-chain, got grade {}", region.grade())));
    }
    let full = MultiIndex::full(n);
    let mut out = ElementChain::new(n, w.grade());
    for t in region.subdivide(depth).terms() {
        let p = t.cell.centroid();
        let weight = t.c * t.cell.vec().coeff(&full);
        out.push(p.clone(), Element::sharp(&w.value(&p).order_part(0)).scale(weight))?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::Cell;
    use crate::exterior::Coelement;
    use crate::forms::integrate::integrate_element_chain;
    use crate::forms::poly::{Poly, PolyForm};

    #[test]
    fn constant_and_orthogonal_pairings() {
        let sq = PolyChain::from_cell(Cell::cube(&[0.0, 0.0], 1.0));
        let dx = FormJet::constant(Coelement::dx(2, 0));
        let dy = FormJet::constant(Coelement::dx(2, 1));
        for d in 0..4 {
            let ch = quantize_form(&dx, &sq, d).unwrap();
            assert!((integrate_element_chain(&ch, &dx).unwrap() - 1.0).abs() < 1e-14);
            assert_eq!(integrate_element_chain(&ch, &dy).unwrap(), 0.0);
        }
    }

    #[test]
    fn x_dx_against_itself() {
        let sq = PolyChain::from_cell(Cell::cube(&[0.0, 0.0], 1.0));
        let w = FormJet::from_poly(PolyForm::term(MultiIndex::new(2, vec![0]).unwrap(), Poly::var(2, 0)));
        let ch = quantize_form(&w, &sq, 6).unwrap();
        assert!((integrate_element_chain(&ch, &w).unwrap() - 1.0 / 3.0).abs() < 1e-3);
    }
}
