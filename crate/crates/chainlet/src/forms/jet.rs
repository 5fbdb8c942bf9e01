use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::exterior::{Coelement, Key};

use super::poly::PolyForm;

/// How the higher-order jets of a form are obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Exact derivatives of the coefficients.
    Analytic,
    /// Central finite differences of the order-0 values.
    FiniteDifference,
    /// Pullback computed as `(Df)*` applied jet by jet.
    Linearized,
}

type JetFn = dyn Fn(&[f64], usize) -> Coelement + Send + Sync;

/// A differential k-form, evaluated as jets: order `j` at `p` is the coelement
/// whose `(U, H)` coordinate is `∂^U ω_H (p)`.
#[derive(Clone)]
pub struct FormJet {
    n: usize,
    k: usize,
    name: String,
    provenance: Provenance,
    certified_norm: Option<f64>,
    eval: Arc<JetFn>,
}

impl fmt::Debug for FormJet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FormJet")
            .field("n", &self.n)
            .field("k", &self.k)
            .field("name", &self.name)
            .field("provenance", &self.provenance)
            .finish()
    }
}

/// Default step for finite-difference jets.
pub const FD_STEP: f64 = 1e-4;

impl FormJet {
    pub fn new(
        n: usize,
        k: usize,
        name: impl Into<String>,
        provenance: Provenance,
        eval: impl Fn(&[f64], usize) -> Coelement + Send + Sync + 'static,
    ) -> Self {
        FormJet { n, k, name: name.into(), provenance, certified_norm: None, eval: Arc::new(eval) }
    }

    /// A polynomial form with exact jets.
    pub fn from_poly(w: PolyForm) -> Self {
        let (n, k) = (w.dim(), w.grade());
        FormJet::new(n, k, "poly", Provenance::Analytic, move |p, j| w.jet(p, j))
    }

    /// A form given only by its values; jets come from central differences with step `h`.
    pub fn from_values(
        n: usize,
        k: usize,
        name: impl Into<String>,
        h: f64,
        value: impl Fn(&[f64]) -> Coelement + Send + Sync + 'static,
    ) -> Self {
        let value = Arc::new(value);
        FormJet::new(n, k, name, Provenance::FiniteDifference, move |p, j| fd_jet(&*value, p, j, h))
    }

    /// A constant form with value `g` (its order-0 part).
    pub fn constant(g: Coelement) -> Self {
        let (n, k) = (g.dim(), g.grade());
        let g0 = g.order_part(0);
        FormJet::new(
            n,
            k,
            "constant",
            Provenance::Analytic,
            move |_, j| {
                if j == 0 {
                    g0.clone()
                } else {
                    Coelement::zero(n, k)
                }
            },
        )
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Records a known upper bound on the natural norm of this form.
    pub fn with_certified_norm(mut self, c: f64) -> Self {
        self.certified_norm = Some(c);
        self
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn grade(&self) -> usize {
        self.k
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn certified_norm(&self) -> Option<f64> {
        self.certified_norm
    }

    /// The order-`j` jet at `p`.
    pub fn jet(&self, p: &[f64], j: usize) -> Result<Coelement> {
        check_dim(self.n, p.len())?;
        Ok((self.eval)(p, j))
    }

    /// The value `ω(p)`.
    pub fn value(&self, p: &[f64]) -> Coelement {
        (self.eval)(p, 0)
    }

    /// `dω`; order `j` of `dω` is the coelement `d` of order `j+1` of `ω`.
    pub fn d(&self) -> FormJet {
        let inner = self.eval.clone();
        FormJet {
            n: self.n,
            k: self.k + 1,
            name: format!("d({})", self.name),
            provenance: self.provenance,
            certified_norm: None,
            eval: Arc::new(move |p, j| inner(p, j + 1).d()),
        }
    }

    /// `★ω`, pointwise.
    pub fn star(&self) -> FormJet {
        let inner = self.eval.clone();
        FormJet {
            n: self.n,
            k: self.n - self.k,
            name: format!("★({})", self.name),
            provenance: self.provenance,
            certified_norm: self.certified_norm,
            eval: Arc::new(move |p, j| inner(p, j).star()),
        }
    }

    /// `ω + η`.
    pub fn add(&self, other: &FormJet) -> Result<FormJet> {
        check_dim(self.n, other.n)?;
        crate::error::check_grade(self.k, other.k)?;
        let (a, b) = (self.eval.clone(), other.eval.clone());
        let provenance =
            if self.provenance == other.provenance { self.provenance } else { Provenance::FiniteDifference };
        Ok(FormJet {
            n: self.n,
            k: self.k,
            name: format!("{} + {}", self.name, other.name),
            provenance,
            certified_norm: None,
            eval: Arc::new(move |p, j| a(p, j).add(&b(p, j)).expect("same shape")),
        })
    }

    /// `s·ω`.
    pub fn scale(&self, s: f64) -> FormJet {
        let inner = self.eval.clone();
        FormJet {
            n: self.n,
            k: self.k,
            name: format!("{s}·{}", self.name),
            provenance: self.provenance,
            certified_norm: self.certified_norm.map(|c| c * s.abs()),
            eval: Arc::new(move |p, j| inner(p, j).scale(s)),
        }
    }

    /// `f*ω`, linearized: order `j` at `p` is `Df(p)*` applied to order `j` of `ω` at `f(p)`.
    pub fn pullback(&self, f: &SmoothMap) -> Result<FormJet> {
        check_dim(self.n, f.n_out)?;
        let jac = f.jacobian.clone().ok_or_else(|| Error::MissingJacobian(f.name.clone()))?;
        let (inner, value) = (self.eval.clone(), f.value.clone());
        Ok(FormJet {
            n: f.n_in,
            k: self.k,
            name: format!("{}*({})", f.name, self.name),
            provenance: Provenance::Linearized,
            certified_norm: None,
            eval: Arc::new(move |p, j| inner(&value(p), j).pullback_linear(&jac(p)).expect("Jacobian shape matches")),
        })
    }
}

/// Order-`j` jet by central differences of the order-`(j−1)` jet.
///
/// Each derivative multiset is produced once, by differentiating last in its
/// largest direction.
fn fd_jet(value: &dyn Fn(&[f64]) -> Coelement, p: &[f64], j: usize, h: f64) -> Coelement {
    let g0 = value(p);
    if j == 0 {
        return g0;
    }
    let (n, k) = (g0.dim(), g0.grade());
    let mut out = Coelement::zero(n, k);
    for i in 0..n {
        let mut plus = p.to_vec();
        let mut minus = p.to_vec();
        plus[i] += h;
        minus[i] -= h;
        let diff =
            Coelement::combine(&fd_jet(value, &plus, j - 1, h), 0.5 / h, &fd_jet(value, &minus, j - 1, h), -0.5 / h)
                .expect("same shape");
        for (key, c) in diff.iter() {
            if key.deriv.indices().last().is_none_or(|&m| m <= i) {
                out.add_term(Key::new(key.deriv.with_index(i), key.dir.clone()), c);
            }
        }
    }
    out.prune();
    out
}

type MapFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;
type JacFn = dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync;

/// A smooth map `ℝⁿ → ℝᵐ` with an optional Jacobian.
#[derive(Clone)]
pub struct SmoothMap {
    pub n_in: usize,
    pub n_out: usize,
    pub name: String,
    value: Arc<MapFn>,
    jacobian: Option<Arc<JacFn>>,
}

impl fmt::Debug for SmoothMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SmoothMap({}: ℝ{} → ℝ{})", self.name, self.n_in, self.n_out)
    }
}

impl SmoothMap {
    pub fn new(
        n_in: usize,
        n_out: usize,
        name: impl Into<String>,
        value: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        SmoothMap { n_in, n_out, name: name.into(), value: Arc::new(value), jacobian: None }
    }

    /// `jac(p)` is the `n_out × n_in` matrix `Df(p)`.
    pub fn with_jacobian(mut self, jac: impl Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static) -> Self {
        self.jacobian = Some(Arc::new(jac));
        self
    }

    /// `x ↦ Ax + b`.
    pub fn affine(a: DMatrix<f64>, b: Vec<f64>) -> Self {
        let (m, n) = a.shape();
        let a2 = a.clone();
        SmoothMap::new(n, m, "affine", move |p| {
            let v = &a * nalgebra::DVector::from_column_slice(p);
            v.iter().zip(&b).map(|(x, y)| x + y).collect()
        })
        .with_jacobian(move |_| a2.clone())
    }

    pub fn apply(&self, p: &[f64]) -> Vec<f64> {
        (self.value)(p)
    }

    pub fn jacobian(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        match &self.jacobian {
            Some(j) => Ok(j(p)),
            None => Err(Error::MissingJacobian(self.name.clone())),
        }
    }
}
