use std::collections::BTreeMap;
use std::fmt;
use std::marker::PhantomData;

use serde::{Deserialize, Serialize};

use super::index::{DerivKey, MultiIndex};
use crate::error::{check_dim, check_grade, Error, Result};

/// Coefficients with magnitude at or below this are dropped.
pub const ZERO_TOL: f64 = 1e-12;

/// A monomial basis key `∇_{e_U} e_H`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Key {
    pub deriv: DerivKey,
    pub dir: MultiIndex,
}

impl Key {
    pub fn new(deriv: DerivKey, dir: MultiIndex) -> Self {
        Key { deriv, dir }
    }

    pub fn direction(dir: MultiIndex) -> Self {
        Key { deriv: DerivKey::empty(), dir }
    }
}

impl fmt::Display for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.deriv, self.dir)
    }
}

/// Marker for the primal side (elements).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Primal {}

/// Marker for the dual side (coelements).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dual {}

/// Sparse coordinates over the monomial basis, of uniform grade `k` and mixed orders.
#[derive(Clone, PartialEq)]
pub struct Graded<K> {
    n: usize,
    k: usize,
    coeffs: BTreeMap<Key, f64>,
    side: PhantomData<fn() -> K>,
}

/// A chain of differential k-elements at a point.
pub type Element = Graded<Primal>;
/// A linear functional on elements; the value of a form's jet at a point.
pub type Coelement = Graded<Dual>;

impl<K> Graded<K> {
    pub fn zero(n: usize, k: usize) -> Self {
        Graded { n, k, coeffs: BTreeMap::new(), side: PhantomData }
    }

    /// A single basis monomial with coefficient `c`.
    pub fn monomial(n: usize, key: Key, c: f64) -> Self {
        let mut g = Self::zero(n, key.dir.grade());
        g.add_term(key, c);
        g.prune();
        g
    }

    /// `e_H` (or `dx^H` on the dual side) of order 0.
    pub fn basis(n: usize, dir: MultiIndex) -> Self {
        Self::monomial(n, Key::direction(dir), 1.0)
    }

    /// The grade-0, order-0 unit.
    pub fn one(n: usize) -> Self {
        Self::basis(n, MultiIndex::empty())
    }

    /// `vol = e_{1..n}`.
    pub fn vol(n: usize) -> Self {
        Self::basis(n, MultiIndex::full(n))
    }

    pub fn from_terms(n: usize, k: usize, terms: impl IntoIterator<Item = (Key, f64)>) -> Result<Self> {
        let mut g = Self::zero(n, k);
        for (key, c) in terms {
            check_grade(k, key.dir.grade())?;
            if key.dir.indices().iter().chain(key.deriv.indices()).any(|&i| i >= n) {
                return Err(Error::InvalidIndex(format!("key {key} out of range for dimension {n}")));
            }
            g.add_term(key, c);
        }
        g.prune();
        Ok(g)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn grade(&self) -> usize {
        self.k
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Key, f64)> {
        self.coeffs.iter().map(|(k, &c)| (k, c))
    }

    pub fn get(&self, key: &Key) -> f64 {
        self.coeffs.get(key).copied().unwrap_or(0.0)
    }

    /// Coefficient of the order-0 direction `e_H`.
    pub fn coeff(&self, dir: &MultiIndex) -> f64 {
        self.get(&Key::direction(dir.clone()))
    }

    /// Highest derivative order present (0 for the zero element).
    pub fn max_order(&self) -> usize {
        self.coeffs.keys().map(|k| k.deriv.order()).max().unwrap_or(0)
    }

    /// Orders with at least one nonzero coordinate.
    pub fn orders(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.coeffs.keys().map(|k| k.deriv.order()).collect();
        v.dedup();
        v
    }

    /// The order-`j` component.
    pub fn order_part(&self, j: usize) -> Self {
        let mut g = Self::zero(self.n, self.k);
        g.coeffs = self.coeffs.iter().filter(|(k, _)| k.deriv.order() == j).map(|(k, &c)| (k.clone(), c)).collect();
        g
    }

    pub(crate) fn add_term(&mut self, key: Key, c: f64) {
        *self.coeffs.entry(key).or_insert(0.0) += c;
    }

    pub(crate) fn prune(&mut self) {
        self.coeffs.retain(|_, c| c.abs() > ZERO_TOL);
    }

    pub(crate) fn with_grade(n: usize, k: usize, coeffs: BTreeMap<Key, f64>) -> Self {
        let mut g = Graded { n, k, coeffs, side: PhantomData };
        g.prune();
        g
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::with_grade(self.n, self.k, self.coeffs.iter().map(|(k, &c)| (k.clone(), s * c)).collect())
    }

    /// `s·a + t·b`.
    pub fn combine(a: &Self, s: f64, b: &Self, t: f64) -> Result<Self> {
        check_dim(a.n, b.n)?;
        check_grade(a.k, b.k)?;
        let mut g = a.scale(s);
        for (key, &c) in &b.coeffs {
            g.add_term(key.clone(), t * c);
        }
        g.prune();
        Ok(g)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Self::combine(self, 1.0, other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Self::combine(self, 1.0, other, -1.0)
    }

    /// Euclidean dot product of coordinates over the orthonormal monomial basis.
    pub fn dot(&self, other: &Self) -> Result<f64> {
        check_dim(self.n, other.n)?;
        check_grade(self.k, other.k)?;
        Ok(self.coeffs.iter().map(|(k, c)| c * other.get(k)).sum())
    }

    /// Euclidean length of the coordinate vector.
    pub fn euclidean(&self) -> f64 {
        self.coeffs.values().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Sum of absolute coordinates; every basis monomial has unit norm, so this
    /// bounds the sum of the order-wise norms from above.
    pub fn norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.abs()).sum()
    }

    /// Sum of absolute coordinates of the order-`j` component.
    pub fn norm_j(&self, j: usize) -> f64 {
        self.coeffs.iter().filter(|(k, _)| k.deriv.order() == j).map(|(_, c)| c.abs()).sum()
    }

    /// Largest coordinate difference, treating grade or dimension mismatch as infinite.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.n != other.n || self.k != other.k {
            return f64::INFINITY;
        }
        let mut m: f64 = 0.0;
        for (k, c) in &self.coeffs {
            m = m.max((c - other.get(k)).abs());
        }
        for (k, c) in &other.coeffs {
            if !self.coeffs.contains_key(k) {
                m = m.max(c.abs());
            }
        }
        m
    }

    /// Reinterprets the coordinates on the other side of the duality.
    pub fn transpose<L>(&self) -> Graded<L> {
        Graded { n: self.n, k: self.k, coeffs: self.coeffs.clone(), side: PhantomData }
    }
}

impl Element {
    /// The element with the same coordinates as a coelement (`Vec(γ)` for order 0).
    pub fn sharp(g: &Coelement) -> Element {
        g.transpose()
    }
}

impl Coelement {
    pub fn flat(a: &Element) -> Coelement {
        a.transpose()
    }

    /// `dx^i`.
    pub fn dx(n: usize, i: usize) -> Coelement {
        Coelement::basis(n, MultiIndex::from_sorted(vec![i]))
    }
}

impl<K> fmt::Debug for Graded<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graded(n={}, k={}; ", self.n, self.k)?;
        let mut first = true;
        for (key, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}·{key}")?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, ")")
    }
}

#[derive(Serialize, Deserialize)]
struct EntryRepr {
    #[serde(default)]
    deriv: Vec<usize>,
    dir: Vec<usize>,
    c: f64,
}

#[derive(Serialize, Deserialize)]
struct GradedRepr {
    n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    entries: Vec<EntryRepr>,
}

fn one_based_to_zero(v: &[usize]) -> Result<Vec<usize>> {
    v.iter()
        .map(|&i| i.checked_sub(1).ok_or_else(|| Error::InvalidIndex("JSON indices are one-based".into())))
        .collect()
}

impl<K> Serialize for Graded<K> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let entries = self
            .coeffs
            .iter()
            .map(|(k, &c)| EntryRepr {
                deriv: k.deriv.indices().iter().map(|i| i + 1).collect(),
                dir: k.dir.indices().iter().map(|i| i + 1).collect(),
                c,
            })
            .collect();
        GradedRepr { n: self.n, k: Some(self.k), entries }.serialize(s)
    }
}

impl<'de, K> Deserialize<'de> for Graded<K> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = GradedRepr::deserialize(d)?;
        let k = match (repr.k, repr.entries.first()) {
            (Some(k), _) => k,
            (None, Some(e)) => e.dir.len(),
            (None, None) => return Err(D::Error::custom("empty entries require an explicit `k`")),
        };
        let mut terms = Vec::with_capacity(repr.entries.len());
        for e in &repr.entries {
            let deriv = DerivKey::new(repr.n, one_based_to_zero(&e.deriv).map_err(D::Error::custom)?)
                .map_err(D::Error::custom)?;
            let dir = MultiIndex::new(repr.n, one_based_to_zero(&e.dir).map_err(D::Error::custom)?)
                .map_err(D::Error::custom)?;
            terms.push((Key::new(deriv, dir), e.c));
        }
        Graded::from_terms(repr.n, k, terms).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_roundtrip_uses_one_based_indices() {
        let a =
            Element::monomial(3, Key::new(DerivKey::from_sorted(vec![0, 2]), MultiIndex::from_sorted(vec![1])), 2.5);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"n":3,"k":1,"entries":[{"deriv":[1,3],"dir":[2],"c":2.5}]}"#);
        let b: Element = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn json_rejects_mixed_grades_and_zero_index() {
        assert!(
            serde_json::from_str::<Element>(r#"{"n":2,"entries":[{"dir":[1],"c":1},{"dir":[1,2],"c":1}]}"#).is_err()
        );
        assert!(serde_json::from_str::<Element>(r#"{"n":2,"entries":[{"dir":[0],"c":1}]}"#).is_err());
        assert!(serde_json::from_str::<Element>(r#"{"n":2,"entries":[]}"#).is_err());
    }

    #[test]
    fn combine_cancels_and_prunes() {
        let a = Element::basis(2, MultiIndex::from_sorted(vec![0]));
        assert!(Element::combine(&a, 1.0, &a, -1.0).unwrap().is_zero());
        let b = Element::basis(2, MultiIndex::from_sorted(vec![0, 1]));
        assert!(Element::combine(&a, 1.0, &b, 1.0).is_err());
    }
}
