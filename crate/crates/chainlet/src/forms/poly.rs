use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, check_grade, Error, Result};
use crate::exterior::{Coelement, DerivKey, Key, MultiIndex};

/// A real polynomial in `n` variables, stored as exponent vector → coefficient.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Poly {
    n: usize,
    terms: BTreeMap<Vec<u32>, f64>,
}

impl Poly {
    pub fn zero(n: usize) -> Self {
        Poly { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: f64) -> Self {
        Poly::monomial(vec![0; n], c)
    }

    /// The coordinate function `xᵢ`.
    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Poly::monomial(e, 1.0)
    }

    pub fn monomial(exps: Vec<u32>, c: f64) -> Self {
        let mut p = Poly::zero(exps.len());
        if c != 0.0 {
            p.terms.insert(exps, c);
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], f64)> {
        self.terms.iter().map(|(e, &c)| (e.as_slice(), c))
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    fn insert(&mut self, e: Vec<u32>, c: f64) {
        let slot = self.terms.entry(e).or_insert(0.0);
        *slot += c;
        if *slot == 0.0 {
            self.terms.retain(|_, v| *v != 0.0);
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, &c) in &other.terms {
            out.insert(e.clone(), c);
        }
        out
    }

    pub fn scale(&self, s: f64) -> Poly {
        let mut out = Poly::zero(self.n);
        if s != 0.0 {
            out.terms = self.terms.iter().map(|(e, &c)| (e.clone(), s * c)).collect();
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero(self.n);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.insert(e, ca * cb);
            }
        }
        out
    }

    /// `∂/∂xᵢ`.
    pub fn derivative(&self, i: usize) -> Poly {
        let mut out = Poly::zero(self.n);
        for (e, &c) in &self.terms {
            if e[i] > 0 {
                let mut f = e.clone();
                f[i] -= 1;
                out.insert(f, c * e[i] as f64);
            }
        }
        out
    }

    pub fn eval(&self, p: &[f64]) -> f64 {
        self.eval_derivative(&vec![0; self.n], p)
    }

    /// `∂^U f (p)` where `counts[i]` is the number of derivatives in direction `i`.
    pub fn eval_derivative(&self, counts: &[u32], p: &[f64]) -> f64 {
        let mut total = 0.0;
        'terms: for (e, &c) in &self.terms {
            let mut v = c;
            for i in 0..self.n {
                let (ei, ui) = (e[i], counts[i]);
                if ui > ei {
                    continue 'terms;
                }
                for m in 0..ui {
                    v *= (ei - m) as f64;
                }
                v *= p[i].powi((ei - ui) as i32);
            }
            total += v;
        }
        total
    }

    /// `∫_{[0,1]ⁿ} f dV`, exact.
    pub fn integrate_unit_cube(&self) -> f64 {
        self.terms.iter().map(|(e, c)| c / e.iter().map(|&a| (a + 1) as f64).product::<f64>()).sum()
    }
}

/// A differential k-form with polynomial coefficients `Σ_H f_H dx^H`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyForm {
    n: usize,
    k: usize,
    comps: BTreeMap<MultiIndex, Poly>,
}

impl PolyForm {
    pub fn zero(n: usize, k: usize) -> Self {
        PolyForm { n, k, comps: BTreeMap::new() }
    }

    pub fn new(n: usize, k: usize, comps: impl IntoIterator<Item = (MultiIndex, Poly)>) -> Result<Self> {
        let mut f = PolyForm::zero(n, k);
        for (h, p) in comps {
            check_grade(k, h.grade())?;
            check_dim(n, p.dim())?;
            if h.indices().iter().any(|&i| i >= n) {
                return Err(Error::InvalidIndex(format!("{h} out of range for dimension {n}")));
            }
            f.add_component(h, p);
        }
        Ok(f)
    }

    /// `f dx^H`.
    pub fn term(h: MultiIndex, f: Poly) -> Self {
        let n = f.dim();
        PolyForm::new(n, h.grade(), [(h, f)]).expect("consistent term")
    }

    /// `dV = dx¹ ∧ ⋯ ∧ dxⁿ`.
    pub fn volume(n: usize) -> Self {
        PolyForm::term(MultiIndex::full(n), Poly::constant(n, 1.0))
    }

    /// The constant form with the coordinates of `g` (order-0 part).
    pub fn constant(g: &Coelement) -> Self {
        let n = g.dim();
        let comps =
            g.iter().filter(|(key, _)| key.deriv.order() == 0).map(|(key, c)| (key.dir.clone(), Poly::constant(n, c)));
        PolyForm::new(n, g.grade(), comps).expect("coelement keys are valid")
    }

    fn add_component(&mut self, h: MultiIndex, p: Poly) {
        let sum = match self.comps.remove(&h) {
            Some(q) => q.add(&p),
            None => p,
        };
        if !sum.is_zero() {
            self.comps.insert(h, sum);
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn grade(&self) -> usize {
        self.k
    }

    pub fn components(&self) -> impl Iterator<Item = (&MultiIndex, &Poly)> {
        self.comps.iter()
    }

    pub fn degree(&self) -> u32 {
        self.comps.values().map(Poly::degree).max().unwrap_or(0)
    }

    pub fn add(&self, other: &PolyForm) -> Result<PolyForm> {
        check_dim(self.n, other.n)?;
        check_grade(self.k, other.k)?;
        let mut out = self.clone();
        for (h, p) in &other.comps {
            out.add_component(h.clone(), p.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, s: f64) -> PolyForm {
        self.mul_poly(&Poly::constant(self.n, s))
    }

    /// `f ω`.
    pub fn mul_poly(&self, f: &Poly) -> PolyForm {
        let mut out = PolyForm::zero(self.n, self.k);
        for (h, p) in &self.comps {
            out.add_component(h.clone(), p.mul(f));
        }
        out
    }

    /// `dω = Σ_H Σᵢ ∂ᵢ f_H dxⁱ ∧ dx^H`.
    pub fn d(&self) -> PolyForm {
        let mut out = PolyForm::zero(self.n, self.k + 1);
        for (h, p) in &self.comps {
            for i in 0..self.n {
                if let Some((dir, s)) = MultiIndex::from_sorted(vec![i]).wedge(h) {
                    let dp = p.derivative(i);
                    if !dp.is_zero() {
                        out.add_component(dir, dp.scale(s));
                    }
                }
            }
        }
        out
    }

    /// `★ω`, acting on coefficients exactly as on coelements.
    pub fn star(&self) -> PolyForm {
        let mut out = PolyForm::zero(self.n, self.n - self.k);
        for (h, p) in &self.comps {
            let comp = h.complement(self.n);
            let s = comp.complement_sign();
            out.add_component(comp, p.scale(s));
        }
        out
    }

    /// The pointwise inner product `<η, ω>` as a polynomial.
    pub fn inner(&self, other: &PolyForm) -> Result<Poly> {
        check_dim(self.n, other.n)?;
        check_grade(self.k, other.k)?;
        let mut out = Poly::zero(self.n);
        for (h, p) in &self.comps {
            if let Some(q) = other.comps.get(h) {
                out = out.add(&p.mul(q));
            }
        }
        Ok(out)
    }

    /// The order-`j` jet at `p`: coordinate `(U, H)` is `∂^U f_H(p)`.
    pub fn jet(&self, p: &[f64], j: usize) -> Coelement {
        let mut terms = Vec::new();
        for u in DerivKey::all(self.n, j) {
            let mut counts = vec![0u32; self.n];
            for &i in u.indices() {
                counts[i] += 1;
            }
            for (h, poly) in &self.comps {
                let c = poly.eval_derivative(&counts, p);
                if c != 0.0 {
                    terms.push((Key::new(u.clone(), h.clone()), c));
                }
            }
        }
        Coelement::from_terms(self.n, self.k, terms).expect("keys built in range")
    }
}

#[derive(Serialize, Deserialize)]
struct MonoRepr {
    exps: Vec<u32>,
    c: f64,
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    #[serde(rename = "H")]
    h: Vec<usize>,
    poly: Vec<MonoRepr>,
}

#[derive(Serialize, Deserialize)]
struct FormRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    k: usize,
    terms: Vec<TermRepr>,
}

impl Serialize for PolyForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let terms = self
            .comps
            .iter()
            .map(|(h, p)| TermRepr {
                h: h.indices().iter().map(|i| i + 1).collect(),
                poly: p.terms().map(|(e, c)| MonoRepr { exps: e.to_vec(), c }).collect(),
            })
            .collect();
        FormRepr { n: Some(self.n), k: self.k, terms }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PolyForm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = FormRepr::deserialize(d)?;
        let n = match repr.n {
            Some(n) => n,
            None => repr
                .terms
                .iter()
                .flat_map(|t| t.poly.first())
                .map(|m| m.exps.len())
                .next()
                .ok_or_else(|| D::Error::custom("cannot infer `n`; give it explicitly"))?,
        };
        let mut comps = Vec::new();
        for t in repr.terms {
            let idx: Vec<usize> =
                t.h.iter()
                    .map(|&i| i.checked_sub(1).ok_or_else(|| D::Error::custom("`H` indices are one-based")))
                    .collect::<std::result::Result<_, _>>()?;
            let h = MultiIndex::new(n, idx).map_err(D::Error::custom)?;
            let mut p = Poly::zero(n);
            for m in t.poly {
                if m.exps.len() != n {
                    return Err(D::Error::custom(format!("exponent vector {:?} has length != {n}", m.exps)));
                }
                p = p.add(&Poly::monomial(m.exps, m.c));
            }
            comps.push((h, p));
        }
        PolyForm::new(n, repr.k, comps).map_err(D::Error::custom)
    }
}
