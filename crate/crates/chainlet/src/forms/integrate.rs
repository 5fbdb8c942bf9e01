use crate::chains::{pairwise_sum, PolyChain};
use crate::element_chain::ElementChain;
use crate::error::{check_dim, check_grade, Result};
use crate::exterior::{pair, Element};

use super::jet::{FormJet, SmoothMap};
use super::quadrature::cell_nodes;

fn check_form(chain_n: usize, chain_k: usize, w: &FormJet) -> Result<()> {
    check_dim(chain_n, w.dim())?;
    check_grade(chain_k, w.grade())
}

/// `∫_A ω = Σ ω(p)(α)` where higher-order elements are paired with the matching jets.
pub fn integrate_element_chain(a: &ElementChain, w: &FormJet) -> Result<f64> {
    check_form(a.dim(), a.grade(), w)?;
    let mut parts = Vec::with_capacity(a.len());
    for (p, alpha) in a.iter() {
        let mut v = 0.0;
        for j in alpha.orders() {
            v += pair(&w.jet(p, j)?, &alpha.order_part(j));
        }
        parts.push(v);
    }
    Ok(pairwise_sum(&parts))
}

/// `∫_P ω` by a quadrature rule of the given polynomial degree on every cell.
pub fn integrate_poly_chain(p: &PolyChain, w: &FormJet, degree: usize) -> Result<f64> {
    check_form(p.dim(), p.grade(), w)?;
    let mut parts = Vec::with_capacity(p.len());
    for t in p.terms() {
        let v = t.cell.vec();
        let cell: Vec<f64> = cell_nodes(&t.cell, degree).into_iter().map(|(x, q)| q * pair(&w.value(&x), &v)).collect();
        parts.push(t.c * pairwise_sum(&cell));
    }
    Ok(pairwise_sum(&parts))
}

/// The element chain `Σ c·w_q·Vec(σ)` at the quadrature nodes of every cell.
///
/// Integrating an order-0 form over it reproduces [`integrate_poly_chain`].
pub fn quadrature_element_chain(p: &PolyChain, degree: usize) -> ElementChain {
    let mut out = ElementChain::new(p.dim(), p.grade());
    for t in p.terms() {
        let v = t.cell.vec();
        for (x, q) in cell_nodes(&t.cell, degree) {
            out.push(x, v.scale(t.c * q)).expect("uniform grade");
        }
    }
    out
}

/// `f_*A`: each element is pushed by `Df(p)` and moved to `f(p)`.
pub fn pushforward_element_chain(a: &ElementChain, f: &SmoothMap) -> Result<ElementChain> {
    check_dim(a.dim(), f.n_in)?;
    let mut out = ElementChain::new(f.n_out, a.grade());
    for (p, alpha) in a.iter() {
        let pushed: Element = alpha.push_linear(&f.jacobian(p)?)?;
        out.push(f.apply(p), pushed)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::Cell;
    use crate::exterior::MultiIndex;
    use crate::forms::poly::{Poly, PolyForm};

    #[test]
    fn unit_square_volume_and_polynomials() {
        let sq = PolyChain::from_cell(Cell::cube(&[0.0, 0.0], 1.0));
        let f = PolyForm::volume(2).mul_poly(&Poly::monomial(vec![3, 4], 1.0));
        let w = FormJet::from_poly(f);
        assert!((integrate_poly_chain(&sq, &w, 10).unwrap() - 1.0 / 20.0).abs() < 1e-15);
        let tri = PolyChain::from_cell(Cell::simplex(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap());
        // ∫_Δ x²y = 2!·1!/5! = 1/60
        let g = FormJet::from_poly(PolyForm::volume(2).mul_poly(&Poly::monomial(vec![2, 1], 1.0)));
        assert!((integrate_poly_chain(&tri, &g, 10).unwrap() - 1.0 / 60.0).abs() < 1e-15);
        let e = quadrature_element_chain(&tri, 10);
        assert!((integrate_element_chain(&e, &g).unwrap() - 1.0 / 60.0).abs() < 1e-15);
    }

    #[test]
    fn grade_mismatch_is_an_error() {
        let sq = PolyChain::from_cell(Cell::cube(&[0.0, 0.0], 1.0));
        let w = FormJet::from_poly(PolyForm::term(MultiIndex::new(2, vec![0]).unwrap(), Poly::constant(2, 1.0)));
        assert!(integrate_poly_chain(&sq, &w, 4).is_err());
    }

    #[test]
    fn pushforward_pairs_with_pullback() {
        use nalgebra::DMatrix;
        let f = SmoothMap::new(1, 2, "curve", |p| vec![p[0] * p[0], p[0].powi(3)])
            .with_jacobian(|p| DMatrix::from_column_slice(2, 1, &[2.0 * p[0], 3.0 * p[0] * p[0]]));
        let w = FormJet::from_poly(PolyForm::term(MultiIndex::new(2, vec![1]).unwrap(), Poly::var(2, 0)));
        let seg = PolyChain::from_cell(Cell::simplex(vec![vec![0.0], vec![1.0]]).unwrap());
        let a = quadrature_element_chain(&seg, 10);
        let lhs = integrate_element_chain(&pushforward_element_chain(&a, &f).unwrap(), &w).unwrap();
        let rhs = integrate_poly_chain(&seg, &w.pullback(&f).unwrap(), 10).unwrap();
        assert!((lhs - 0.6).abs() < 1e-14 && (rhs - 0.6).abs() < 1e-14);
    }
}
