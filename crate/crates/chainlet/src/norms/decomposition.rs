use serde::{Deserialize, Serialize};

use crate::chains::{pairwise_sum, Cell, PolyChain};
use crate::error::{check_dim, check_grade, Error, Result};

/// A difference cell `a·Δ_{U^j} σ = a·(Id − T_{u_j})∘⋯∘(Id − T_{u_1}) σ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiffGen {
    pub coeff: f64,
    pub base: Cell,
    pub vectors: Vec<Vec<f64>>,
}

impl DiffGen {
    pub fn new(coeff: f64, base: Cell, vectors: Vec<Vec<f64>>) -> Result<Self> {
        base.validate()?;
        for u in &vectors {
            check_dim(base.dim(), u.len())?;
        }
        Ok(DiffGen { coeff, base, vectors })
    }

    pub fn order(&self) -> usize {
        self.vectors.len()
    }

    /// `‖a Δ_{U^j} σ‖_j = |a|·M(σ)·|u₁|⋯|u_j|`.
    pub fn norm(&self) -> f64 {
        let lengths: f64 = self.vectors.iter().map(|u| u.iter().map(|x| x * x).sum::<f64>().sqrt()).product();
        self.coeff.abs() * self.base.mass() * lengths
    }

    /// The `2^j` signed translates `Σ_S (−1)^{|S|} a·T_{Σ_S u} σ`.
    pub fn expand(&self) -> Vec<(f64, Cell)> {
        let j = self.order();
        (0..1usize << j)
            .map(|subset| {
                let mut v = vec![0.0; self.base.dim()];
                for (m, u) in self.vectors.iter().enumerate() {
                    if subset >> m & 1 == 1 {
                        for (vi, ui) in v.iter_mut().zip(u) {
                            *vi += ui;
                        }
                    }
                }
                let s = if subset.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                (s * self.coeff, self.base.translate(&v))
            })
            .collect()
    }

    /// `D − T_v D`, one order higher.
    pub fn difference(&self, v: &[f64]) -> DiffGen {
        let mut vectors = self.vectors.clone();
        vectors.push(v.to_vec());
        DiffGen { coeff: self.coeff, base: self.base.clone(), vectors }
    }

    /// Image under `x ↦ λx`.
    pub fn scale_space(&self, lambda: f64) -> DiffGen {
        DiffGen {
            coeff: self.coeff,
            base: self.base.scale(lambda),
            vectors: self.vectors.iter().map(|u| u.iter().map(|x| lambda * x).collect()).collect(),
        }
    }
}

/// `|a|·M(σ)·Π|uᵢ|`, the generator sum for a single difference cell.
pub fn difference_norm(d: &DiffGen) -> f64 {
    d.norm()
}

/// `P = Σ_{j=0}^{r} D^j + ∂B`, with `B` carrying its own decomposition of order `r−1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub n: usize,
    pub k: usize,
    pub r: usize,
    pub layers: Vec<Vec<DiffGen>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<Box<Decomposition>>,
}

impl Decomposition {
    /// `D⁰ = P` and nothing else.
    pub fn trivial(p: &PolyChain, r: usize) -> Decomposition {
        let d0 = p.terms().iter().map(|t| DiffGen { coeff: t.c, base: t.cell.clone(), vectors: Vec::new() }).collect();
        let mut layers = vec![Vec::new(); r + 1];
        layers[0] = d0;
        Decomposition { n: p.dim(), k: p.grade(), r, layers, boundary: None }
    }

    /// Checks the shape: layer `j` holds order-`j` generators of grade `k`, and `B`
    /// has grade `k+1` and order `r−1`.
    pub fn validate(&self) -> Result<()> {
        if self.layers.len() != self.r + 1 {
            return Err(Error::Invalid(format!("expected {} layers, found {}", self.r + 1, self.layers.len())));
        }
        for (j, layer) in self.layers.iter().enumerate() {
            for g in layer {
                check_dim(self.n, g.base.dim())?;
                check_grade(self.k, g.base.grade())?;
                if g.order() != j {
                    return Err(Error::Invalid(format!("generator of order {} in layer {j}", g.order())));
                }
                g.base.validate()?;
            }
        }
        if let Some(b) = &self.boundary {
            if self.r == 0 {
                return Err(Error::Invalid("an order-0 decomposition has no boundary term".into()));
            }
            check_dim(self.n, b.n)?;
            check_grade(self.k + 1, b.k)?;
            if b.r + 1 != self.r {
                return Err(Error::Invalid(format!("boundary term has order {}, expected {}", b.r, self.r - 1)));
            }
            b.validate()?;
        }
        Ok(())
    }

    /// The chain `Σ Dʲ + ∂B`.
    pub fn realize(&self) -> Result<PolyChain> {
        let items = self.layers.iter().flatten().flat_map(DiffGen::expand);
        let mut p = PolyChain::new(self.n, self.k, items)?;
        if let Some(b) = &self.boundary {
            p = p.add(&b.realize()?.boundary())?;
        }
        Ok(p)
    }

    /// `Σ_j Σ ‖Dʲ‖_j + value(B)`, recursing down to masses.
    pub fn value(&self) -> f64 {
        let norms: Vec<f64> = self.layers.iter().flatten().map(DiffGen::norm).collect();
        pairwise_sum(&norms) + self.boundary.as_ref().map_or(0.0, |b| b.value())
    }

    /// The same decomposition read at a higher order `r ≥ self.r`.
    pub fn raise(&self, r: usize) -> Decomposition {
        let mut out = self.clone();
        if r > self.r {
            out.layers.resize(r + 1, Vec::new());
            out.boundary = self.boundary.as_ref().map(|b| Box::new(b.raise(r - 1)));
            out.r = r;
        }
        out
    }

    /// A decomposition of `P − T_v P` of order `r+1`: `E^{j+1} = Dʲ − T_v Dʲ` and
    /// the boundary term `B − T_v B`.
    pub fn translate_difference(&self, v: &[f64]) -> Result<Decomposition> {
        check_dim(self.n, v.len())?;
        let mut layers = vec![Vec::new()];
        for layer in &self.layers {
            layers.push(layer.iter().map(|g| g.difference(v)).collect());
        }
        let boundary = match &self.boundary {
            Some(b) => Some(Box::new(b.translate_difference(v)?)),
            None => None,
        };
        Ok(Decomposition { n: self.n, k: self.k, r: self.r + 1, layers, boundary })
    }

    /// Image under `x ↦ λx`.
    pub fn scale_space(&self, lambda: f64) -> Decomposition {
        Decomposition {
            n: self.n,
            k: self.k,
            r: self.r,
            layers: self.layers.iter().map(|l| l.iter().map(|g| g.scale_space(lambda)).collect()).collect(),
            boundary: self.boundary.as_ref().map(|b| Box::new(b.scale_space(lambda))),
        }
    }
}

/// A decomposition of `P − T_v P` at order `r ≥ 1`, built from the trivial one of `P` at order `r−1`.
pub fn translation_decomposition(p: &PolyChain, v: &[f64], r: usize) -> Result<Decomposition> {
    if r == 0 {
        return Err(Error::Invalid("a translation difference needs order r ≥ 1".into()));
    }
    Decomposition::trivial(p, r - 1).translate_difference(v)
}
