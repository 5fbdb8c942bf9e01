//! Finite sums `Σ aᵢ α_{pᵢ}` of elements supported at points.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, check_grade, Result};
use crate::exterior::Element;

/// Elements at points of ℝⁿ, merged when points coincide exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct ElementChain {
    n: usize,
    k: usize,
    entries: BTreeMap<Vec<u64>, (Vec<f64>, Element)>,
}

fn point_key(p: &[f64]) -> Vec<u64> {
    p.iter().map(|&x| if x == 0.0 { 0 } else { x.to_bits() }).collect()
}

impl ElementChain {
    pub fn new(n: usize, k: usize) -> Self {
        ElementChain { n, k, entries: BTreeMap::new() }
    }

    /// A single element at `p`.
    pub fn single(p: Vec<f64>, a: Element) -> Result<Self> {
        let mut c = ElementChain::new(a.dim(), a.grade());
        c.push(p, a)?;
        Ok(c)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn grade(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Adds `a` at `p`, merging with any element already there.
    pub fn push(&mut self, p: Vec<f64>, a: Element) -> Result<()> {
        check_dim(self.n, p.len())?;
        check_dim(self.n, a.dim())?;
        check_grade(self.k, a.grade())?;
        let key = point_key(&p);
        match self.entries.remove(&key) {
            Some((q, b)) => {
                let sum = b.add(&a)?;
                if !sum.is_zero() {
                    self.entries.insert(key, (q, sum));
                }
            }
            None => {
                if !a.is_zero() {
                    self.entries.insert(key, (p, a));
                }
            }
        }
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], &Element)> {
        self.entries.values().map(|(p, a)| (p.as_slice(), a))
    }

    pub fn add(&self, other: &ElementChain) -> Result<ElementChain> {
        let mut out = self.clone();
        for (p, a) in other.iter() {
            out.push(p.to_vec(), a.clone())?;
        }
        Ok(out)
    }

    pub fn scale(&self, s: f64) -> ElementChain {
        self.map_elements(self.k, |_, a| a.scale(s))
    }

    fn map_elements(&self, k: usize, f: impl Fn(&[f64], &Element) -> Element) -> ElementChain {
        let mut out = ElementChain::new(self.n, k);
        for (p, a) in self.iter() {
            out.push(p.to_vec(), f(p, a)).expect("mapped element keeps dimension and grade");
        }
        out
    }

    /// Pointwise `∂`, raising each element's order by one.
    pub fn boundary(&self) -> ElementChain {
        self.map_elements(self.k.saturating_sub(1), |_, a| a.boundary())
    }

    /// Pointwise `⊥`.
    pub fn perp(&self) -> ElementChain {
        self.map_elements(self.n - self.k, |_, a| a.perp())
    }

    /// `f·A`: each element scaled by the value of `f` at its point.
    pub fn multiply_by_function(&self, f: impl Fn(&[f64]) -> f64) -> ElementChain {
        self.map_elements(self.k, |p, a| a.scale(f(p)))
    }

    /// Sum of the element masses.
    pub fn mass(&self) -> f64 {
        let parts: Vec<f64> = self.iter().map(|(_, a)| a.mass()).collect();
        crate::chains::pairwise_sum(&parts)
    }

    /// Sum of the elements, forgetting their points.
    pub fn total(&self) -> Element {
        let mut acc = Element::zero(self.n, self.k);
        for (_, a) in self.iter() {
            acc = acc.add(a).expect("uniform grade");
        }
        acc
    }
}

#[derive(Serialize, Deserialize)]
struct EntryRepr {
    p: Vec<f64>,
    element: Element,
}

#[derive(Serialize, Deserialize)]
struct ChainRepr {
    n: usize,
    k: usize,
    entries: Vec<EntryRepr>,
}

impl Serialize for ElementChain {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ChainRepr {
            n: self.n,
            k: self.k,
            entries: self.iter().map(|(p, a)| EntryRepr { p: p.to_vec(), element: a.clone() }).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ElementChain {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = ChainRepr::deserialize(d)?;
        let mut c = ElementChain::new(repr.n, repr.k);
        for e in repr.entries {
            c.push(e.p, e.element).map_err(D::Error::custom)?;
        }
        Ok(c)
    }
}
