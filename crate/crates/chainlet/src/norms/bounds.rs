use serde::Serialize;

use crate::chains::PolyChain;
use crate::error::{check_dim, check_grade, Error, Result};
use crate::forms::{integrate_element_chain, integrate_poly_chain, Domain, FormJet, DEFAULT_DEGREE};

use super::decomposition::Decomposition;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Upper,
    Lower,
}

/// What a bound rests on.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Certificate {
    /// A decomposition verified to realize the target.
    Decomposition { generators: usize, depth: usize },
    /// A form with a caller-supplied bound on its natural norm. `heuristic` marks
    /// a bound that came from sampling rather than analysis.
    Form { form: String, certified_norm: f64, heuristic: bool },
}

/// A certified bound on `|P|^♮r`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormBound {
    pub target_id: String,
    pub r: usize,
    pub kind: BoundKind,
    pub value: f64,
    pub certificate: Certificate,
}

impl NormBound {
    pub fn with_target(mut self, id: impl Into<String>) -> Self {
        self.target_id = id.into();
        self
    }
}

fn shape(d: &Decomposition) -> (usize, usize) {
    let gens = d.layers.iter().map(Vec::len).sum::<usize>();
    match &d.boundary {
        Some(b) => {
            let (g, depth) = shape(b);
            (gens + g, depth + 1)
        }
        None => (gens, 0),
    }
}

/// `Σ_j Σ ‖Dʲ‖_j + |B|^{♮r−1}` after checking that `dec` realizes `p` exactly.
pub fn upper_bound(p: &PolyChain, dec: &Decomposition) -> Result<NormBound> {
    check_dim(p.dim(), dec.n)?;
    check_grade(p.grade(), dec.k)?;
    dec.validate()?;
    let residual = dec.realize()?.equivalence_residual(p)?;
    if !residual.is_empty() {
        let terms = residual.terms().iter().map(|t| format!("{:+e}·{:?}", t.c, t.cell)).collect();
        return Err(Error::NotRealized { residual: terms });
    }
    let (generators, depth) = shape(dec);
    Ok(NormBound {
        target_id: String::new(),
        r: dec.r,
        kind: BoundKind::Upper,
        value: dec.value(),
        certificate: Certificate::Decomposition { generators, depth },
    })
}

/// `|∫ ω| / c` where `c ≥ |ω|^♮r` is certified by the caller.
pub fn lower_bound(
    domain: Domain<'_>,
    w: &FormJet,
    certified_norm: f64,
    r: usize,
    heuristic: bool,
) -> Result<NormBound> {
    if certified_norm.is_nan() || certified_norm <= 0.0 {
        return Err(Error::Invalid(format!("certified norm must be positive, got {certified_norm}")));
    }
    let integral = match domain {
        Domain::Poly(p) => integrate_poly_chain(p, w, DEFAULT_DEGREE)?,
        Domain::Elements(a) => integrate_element_chain(a, w)?,
    };
    Ok(NormBound {
        target_id: String::new(),
        r,
        kind: BoundKind::Lower,
        value: integral.abs() / certified_norm,
        certificate: Certificate::Form { form: w.name().to_string(), certified_norm, heuristic },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::Cell;
    use crate::exterior::Coelement;

    #[test]
    fn simplex_bounds_meet() {
        let s = Cell::simplex(vec![vec![0.0, 0.0, 0.0], vec![1.0, 0.2, 0.0], vec![0.3, 1.1, 0.5]]).unwrap();
        let p = PolyChain::from_cell(s.clone());
        let up = upper_bound(&p, &Decomposition::trivial(&p, 2)).unwrap();
        let dir = s.vec().scale(1.0 / s.mass());
        let w = FormJet::constant(Coelement::flat(&dir));
        let lo = lower_bound(Domain::Poly(&p), &w, 1.0, 2, false).unwrap();
        assert!((up.value - s.mass()).abs() < 1e-12);
        assert!((lo.value - s.mass()).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = PolyChain::from_cell(Cell::cube(&[0.0, 0.0], 1.0));
        let q = PolyChain::from_cell(Cell::cube(&[0.0, 0.0], 2.0));
        assert!(matches!(upper_bound(&p, &Decomposition::trivial(&q, 1)), Err(Error::NotRealized { .. })));
        let w = FormJet::constant(Coelement::vol(2));
        assert!(lower_bound(Domain::Poly(&p), &w, 0.0, 0, false).is_err());
        assert_eq!(lower_bound(Domain::Poly(&p), &w.scale(0.0), 1.0, 0, false).unwrap().value, 0.0);
    }
}
