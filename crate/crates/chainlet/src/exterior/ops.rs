use std::collections::BTreeMap;

use nalgebra::DMatrix;

use super::graded::{Coelement, Element, Graded, Key};
use super::index::{DerivKey, MultiIndex};
use crate::error::{check_dim, check_grade, Error, Result};

/// Which composite of `⊥` and `∧` [`derived_product`] evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProductKind {
    /// `⊥(a ∧ b)`
    Cross,
    /// `a / b = ⊥(b ∧ ⊥a)`
    Interior,
    /// `⊥(⊥a ∧ ⊥b)`
    Intersection,
    /// `π_a b = ⊥(⊥b ∩ a) ∩ a`
    Projection,
}

pub(crate) fn sign(parity: usize) -> f64 {
    if parity.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn minor(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> f64 {
    match rows.len() {
        0 => 1.0,
        1 => m[(rows[0], cols[0])],
        2 => m[(rows[0], cols[0])] * m[(rows[1], cols[1])] - m[(rows[0], cols[1])] * m[(rows[1], cols[0])],
        k => DMatrix::from_fn(k, k, |i, j| m[(rows[i], cols[j])]).determinant(),
    }
}

impl Element {
    /// The simple element `α(v₁,…,v_k)`: coordinates are the k×k minors of the edge matrix.
    pub fn simple<V: AsRef<[f64]>>(n: usize, edges: &[V]) -> Result<Element> {
        let k = edges.len();
        if k > n {
            return Err(Error::Invalid(format!("{k} edges in dimension {n}")));
        }
        for e in edges {
            check_dim(n, e.as_ref().len())?;
        }
        let m = DMatrix::from_fn(n, k, |i, j| edges[j].as_ref()[i]);
        let cols: Vec<usize> = (0..k).collect();
        let coeffs = MultiIndex::all(n, k)
            .into_iter()
            .map(|h| {
                let c = minor(&m, h.indices(), &cols);
                (Key::direction(h), c)
            })
            .collect();
        Ok(Graded::with_grade(n, k, coeffs))
    }

    /// Inner product; the monomial basis is orthonormal.
    pub fn inner(&self, other: &Element) -> Result<f64> {
        self.dot(other)
    }

    /// `√<a, a>`.
    pub fn mass(&self) -> f64 {
        self.euclidean()
    }

    /// Exterior product; directions multiply with the shuffle sign and derivative lists concatenate.
    pub fn wedge(&self, other: &Element) -> Result<Element> {
        check_dim(self.dim(), other.dim())?;
        let n = self.dim();
        let k = self.grade() + other.grade();
        let mut out = BTreeMap::new();
        if k <= n {
            for (ka, ca) in self.iter() {
                for (kb, cb) in other.iter() {
                    if let Some((dir, s)) = ka.dir.wedge(&kb.dir) {
                        *out.entry(Key::new(ka.deriv.merge(&kb.deriv), dir)).or_insert(0.0) += s * ca * cb;
                    }
                }
            }
        }
        Ok(Graded::with_grade(n, k, out))
    }

    /// `⊥`: `∇_U e_H ↦ sign(H,Hᶜ) ∇_U e_{Hᶜ}`.
    pub fn perp(&self) -> Element {
        let n = self.dim();
        let coeffs = self
            .iter()
            .map(|(key, c)| (Key::new(key.deriv.clone(), key.dir.complement(n)), key.dir.complement_sign() * c))
            .collect();
        Graded::with_grade(n, n.saturating_sub(self.grade()), coeffs)
    }

    /// `∂∇_U α(v₁..v_k) = Σᵢ (−1)^{i−1} ∇_{(U,vᵢ)} α(v₁..v̂ᵢ..v_k)`.
    pub fn boundary(&self) -> Element {
        let n = self.dim();
        if self.grade() == 0 {
            return Element::zero(n, 0);
        }
        let mut out = BTreeMap::new();
        for (key, c) in self.iter() {
            for (pos, &h) in key.dir.indices().iter().enumerate() {
                let k2 = Key::new(key.deriv.with_index(h), key.dir.without_position(pos));
                *out.entry(k2).or_insert(0.0) += super::ops::sign(pos) * c;
            }
        }
        Graded::with_grade(n, self.grade() - 1, out)
    }

    /// `∇_u a`.
    pub fn nabla(&self, u: &[f64]) -> Result<Element> {
        check_dim(self.dim(), u.len())?;
        let mut out = BTreeMap::new();
        for (key, c) in self.iter() {
            for (i, &ui) in u.iter().enumerate() {
                if ui != 0.0 {
                    *out.entry(Key::new(key.deriv.with_index(i), key.dir.clone())).or_insert(0.0) += ui * c;
                }
            }
        }
        Ok(Graded::with_grade(self.dim(), self.grade(), out))
    }

    /// `⋄ = ⊥∂⊥`, raising grade and order by one.
    pub fn coboundary(&self) -> Element {
        if self.grade() == self.dim() {
            return Element::zero(self.dim(), self.dim() + 1);
        }
        self.perp().boundary().perp()
    }

    /// `□ = ∂⋄ + ⋄∂`.
    pub fn laplace(&self) -> Element {
        let a = self.coboundary().boundary();
        if self.grade() == 0 {
            return a;
        }
        let b = self.boundary().coboundary();
        a.add(&b).expect("both terms share grade")
    }
}

/// Evaluates one of the composite products built from `⊥` and `∧`.
///
/// Grade combinations outside a formula's range give the zero element.
pub fn derived_product(kind: ProductKind, a: &Element, b: &Element) -> Result<Element> {
    check_dim(a.dim(), b.dim())?;
    let n = a.dim();
    match kind {
        ProductKind::Cross => Ok(a.wedge(b)?.perp_or_zero(n)),
        ProductKind::Interior => Ok(b.wedge(&a.perp())?.perp_or_zero(n)),
        ProductKind::Intersection => Ok(a.perp().wedge(&b.perp())?.perp_or_zero(n)),
        ProductKind::Projection => {
            let inner = derived_product(ProductKind::Intersection, &b.perp(), a)?;
            derived_product(ProductKind::Intersection, &inner.perp_or_zero(n), a)
        }
    }
}

impl Element {
    fn perp_or_zero(&self, n: usize) -> Element {
        if self.grade() > n {
            Element::zero(n, 0)
        } else {
            self.perp()
        }
    }
}

/// `γ(α)`: coordinates paired over matching keys; mismatched orders contribute nothing.
pub fn pair(g: &Coelement, a: &Element) -> f64 {
    if g.grade() != a.grade() {
        return 0.0;
    }
    g.iter().map(|(k, c)| c * a.get(k)).sum()
}

impl Coelement {
    /// `d`, the adjoint of the element boundary: `dγ(α) = γ(∂α)`.
    pub fn d(&self) -> Coelement {
        let n = self.dim();
        let k = self.grade() + 1;
        let mut out = BTreeMap::new();
        if k <= n {
            for (key, c) in self.iter() {
                for u in key.deriv.distinct() {
                    if let Some((dir, pos)) = key.dir.with_index(u) {
                        let deriv = key.deriv.without_index(u).expect("u is in the key");
                        *out.entry(Key::new(deriv, dir)).or_insert(0.0) += sign(pos) * c;
                    }
                }
            }
        }
        Graded::with_grade(n, k, out)
    }

    /// `★γ(α) = γ(⊥α)`.
    pub fn star(&self) -> Coelement {
        let n = self.dim();
        let coeffs = self
            .iter()
            .map(|(key, c)| {
                let comp = key.dir.complement(n);
                let s = comp.complement_sign();
                (Key::new(key.deriv.clone(), comp), s * c)
            })
            .collect();
        Graded::with_grade(n, n.saturating_sub(self.grade()), coeffs)
    }

    /// Product dual to the element product under linear pushforward: directions
    /// use the shuffle sign and derivative parts carry the multinomial weight
    /// `Π wᵢ!/(uᵢ! vᵢ!)`, so that `L*(g∧h) = L*g ∧ L*h` at every order.
    pub fn wedge(&self, other: &Coelement) -> Result<Coelement> {
        check_dim(self.dim(), other.dim())?;
        let n = self.dim();
        let k = self.grade() + other.grade();
        let mut out = BTreeMap::new();
        if k <= n {
            for (ka, ca) in self.iter() {
                for (kb, cb) in other.iter() {
                    if let Some((dir, s)) = ka.dir.wedge(&kb.dir) {
                        let deriv = ka.deriv.merge(&kb.deriv);
                        let w = deriv.multiplicity_factorial()
                            / (ka.deriv.multiplicity_factorial() * kb.deriv.multiplicity_factorial());
                        *out.entry(Key::new(deriv, dir)).or_insert(0.0) += w * s * ca * cb;
                    }
                }
            }
        }
        Ok(Graded::with_grade(n, k, out))
    }

    /// Operator norm of an order-0 coelement over unit simple elements when it
    /// is itself simple or has grade 0, 1, n−1 or n; an upper bound otherwise.
    pub fn comass_bound(&self) -> f64 {
        self.euclidean()
    }
}

/// The derivative list `U` after the linear map: `Π_m (L e_{u_m})` expanded into monomials.
fn push_deriv(l: &DMatrix<f64>, u: &DerivKey) -> BTreeMap<DerivKey, f64> {
    let mut cur: BTreeMap<DerivKey, f64> = BTreeMap::new();
    cur.insert(DerivKey::empty(), 1.0);
    for &col in u.indices() {
        let mut next = BTreeMap::new();
        for (key, c) in &cur {
            for row in 0..l.nrows() {
                let v = l[(row, col)];
                if v != 0.0 {
                    *next.entry(key.with_index(row)).or_insert(0.0) += c * v;
                }
            }
        }
        cur = next;
    }
    cur
}

fn push_dir(l: &DMatrix<f64>, h: &MultiIndex) -> Vec<(MultiIndex, f64)> {
    MultiIndex::all(l.nrows(), h.grade())
        .into_iter()
        .map(|m| {
            let c = minor(l, m.indices(), h.indices());
            (m, c)
        })
        .filter(|(_, c)| *c != 0.0)
        .collect()
}

impl Element {
    /// `L_*`: every slot vector, translational and directional, is mapped by `L`.
    ///
    /// `L` has `n` columns; the result lives in dimension `L.nrows()`.
    pub fn push_linear(&self, l: &DMatrix<f64>) -> Result<Element> {
        check_dim(self.dim(), l.ncols())?;
        let m = l.nrows();
        if self.grade() > m {
            return Ok(Element::zero(m, self.grade().min(m)));
        }
        let mut out = BTreeMap::new();
        for (key, c) in self.iter() {
            let dirs = push_dir(l, &key.dir);
            if dirs.is_empty() {
                continue;
            }
            for (deriv, cd) in push_deriv(l, &key.deriv) {
                for (dir, ch) in &dirs {
                    *out.entry(Key::new(deriv.clone(), dir.clone())).or_insert(0.0) += c * cd * ch;
                }
            }
        }
        Ok(Graded::with_grade(m, self.grade(), out))
    }
}

impl Coelement {
    /// `L*γ(A) = γ(L_*A)`, computed against every basis key of the orders present in `γ`.
    ///
    /// `L` has `self.dim()` rows; the result lives in dimension `L.ncols()`.
    pub fn pullback_linear(&self, l: &DMatrix<f64>) -> Result<Coelement> {
        check_dim(self.dim(), l.nrows())?;
        let n = l.ncols();
        let k = self.grade();
        if k > n {
            return Ok(Coelement::zero(n, k));
        }
        let dirs = MultiIndex::all(n, k);
        let pushed_dirs: Vec<Vec<(MultiIndex, f64)>> = dirs.iter().map(|h| push_dir(l, h)).collect();
        let mut out = BTreeMap::new();
        for j in self.orders() {
            for u in DerivKey::all(n, j) {
                let derivs = push_deriv(l, &u);
                for (h, pd) in dirs.iter().zip(&pushed_dirs) {
                    let mut v = 0.0;
                    for (deriv, cd) in &derivs {
                        for (dir, ch) in pd {
                            v += cd * ch * self.get(&Key::new(deriv.clone(), dir.clone()));
                        }
                    }
                    if v != 0.0 {
                        out.insert(Key::new(u.clone(), h.clone()), v);
                    }
                }
            }
        }
        Ok(Graded::with_grade(n, k, out))
    }
}

/// Checks that `g` and `a` can be paired at all.
pub fn check_pairable(g: &Coelement, a: &Element) -> Result<()> {
    check_dim(g.dim(), a.dim())?;
    check_grade(g.grade(), a.grade())
}
