use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::chains::PolyChain;
use crate::element_chain::ElementChain;
use crate::error::{Error, Result};
use crate::exterior::sign;

use super::integrate::{integrate_element_chain, integrate_poly_chain, quadrature_element_chain};
use super::jet::FormJet;

/// Which integral identity to check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// `∫_{∂J} ω = ∫_J dω`
    Stokes,
    /// `∫_{⊥J} ω = ∫_J ★ω`
    Star,
    /// `∫_{⊥∂J} ω = ∫_J d★ω`
    Divergence,
    /// `∫_{⊥J} ★dω = (−1)^{k(n−k)} ∫_{∂J} ω`
    Curl,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Mode> {
        match s {
            "stokes" => Ok(Mode::Stokes),
            "star" => Ok(Mode::Star),
            "divergence" => Ok(Mode::Divergence),
            "curl" => Ok(Mode::Curl),
            other => Err(Error::Invalid(format!("unknown mode `{other}`"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Mode::Stokes => "stokes",
            Mode::Star => "star",
            Mode::Divergence => "divergence",
            Mode::Curl => "curl",
        };
        f.write_str(s)
    }
}

/// The domain of integration.
#[derive(Clone, Copy, Debug)]
pub enum Domain<'a> {
    Poly(&'a PolyChain),
    Elements(&'a ElementChain),
}

impl Domain<'_> {
    pub fn dim(&self) -> usize {
        match self {
            Domain::Poly(p) => p.dim(),
            Domain::Elements(a) => a.dim(),
        }
    }

    pub fn grade(&self) -> usize {
        match self {
            Domain::Poly(p) => p.grade(),
            Domain::Elements(a) => a.grade(),
        }
    }
}

/// Both sides of an identity and `|lhs − rhs|`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Residual {
    pub mode: Mode,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

/// Evaluates both sides of `mode` on `domain`.
///
/// Polyhedral chains are integrated by quadrature of degree `degree`; where `⊥`
/// is needed they are first replaced by their quadrature element chain.
pub fn stokes_residual(domain: Domain<'_>, w: &FormJet, mode: Mode, degree: usize) -> Result<Residual> {
    let (n, k) = (domain.dim(), domain.grade());
    let integrate = |d: &Domain<'_>, form: &FormJet| match d {
        Domain::Poly(p) => integrate_poly_chain(p, form, degree),
        Domain::Elements(a) => integrate_element_chain(a, form),
    };
    let perp_integral = |d: &Domain<'_>, form: &FormJet| match d {
        Domain::Poly(p) => integrate_element_chain(&quadrature_element_chain(p, degree).perp(), form),
        Domain::Elements(a) => integrate_element_chain(&a.perp(), form),
    };
    let boundary = |d: &Domain<'_>| -> Result<Owned> {
        if k == 0 {
            return Err(Error::Invalid("the boundary of a 0-chain is not defined here".into()));
        }
        Ok(match d {
            Domain::Poly(p) => Owned::Poly(p.boundary()),
            Domain::Elements(a) => Owned::Elements(a.boundary()),
        })
    };
    let (lhs, rhs) = match mode {
        Mode::Stokes => {
            let b = boundary(&domain)?;
            (integrate(&b.as_domain(), w)?, integrate(&domain, &w.d())?)
        }
        Mode::Star => (perp_integral(&domain, w)?, integrate(&domain, &w.star())?),
        Mode::Divergence => {
            let b = boundary(&domain)?;
            (perp_integral(&b.as_domain(), w)?, integrate(&domain, &w.star().d())?)
        }
        Mode::Curl => {
            let b = boundary(&domain)?;
            let s = sign(k * (n - k));
            (perp_integral(&domain, &w.d().star())?, s * integrate(&b.as_domain(), w)?)
        }
    };
    Ok(Residual { mode, lhs, rhs, residual: (lhs - rhs).abs() })
}

enum Owned {
    Poly(PolyChain),
    Elements(ElementChain),
}

impl Owned {
    fn as_domain(&self) -> Domain<'_> {
        match self {
            Owned::Poly(p) => Domain::Poly(p),
            Owned::Elements(a) => Domain::Elements(a),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::Cell;
    use crate::exterior::MultiIndex;
    use crate::forms::poly::{Poly, PolyForm};

    fn square() -> PolyChain {
        PolyChain::from_cell(Cell::cube(&[0.0, 0.0], 1.0))
    }

    fn x_dy() -> FormJet {
        FormJet::from_poly(PolyForm::term(MultiIndex::new(2, vec![1]).unwrap(), Poly::var(2, 0)))
    }

    #[test]
    fn stokes_on_unit_square() {
        let r = stokes_residual(Domain::Poly(&square()), &x_dy(), Mode::Stokes, 10).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-14 && (r.rhs - 1.0).abs() < 1e-14);
    }

    #[test]
    fn all_modes_hold_on_a_triangle_with_a_cubic_form() {
        let tri = PolyChain::from_cell(Cell::simplex(vec![vec![0.1, 0.0], vec![1.0, 0.3], vec![0.2, 0.9]]).unwrap());
        let h = |i: usize| MultiIndex::new(2, vec![i]).unwrap();
        let w1 = PolyForm::term(h(0), Poly::monomial(vec![2, 1], 1.0))
            .add(&PolyForm::term(h(1), Poly::monomial(vec![0, 3], -2.0).add(&Poly::var(2, 0))))
            .unwrap();
        let w = FormJet::from_poly(w1);
        for mode in [Mode::Stokes, Mode::Divergence, Mode::Curl] {
            let r = stokes_residual(Domain::Poly(&tri), &w, mode, 10).unwrap();
            assert!(r.residual < 1e-13, "{mode}: {r:?}");
        }
        let f = FormJet::from_poly(PolyForm::term(MultiIndex::empty(), Poly::monomial(vec![1, 2], 3.0)));
        let r = stokes_residual(Domain::Poly(&tri), &f, Mode::Star, 10).unwrap();
        assert!(r.residual < 1e-14, "{r:?}");
    }
}
