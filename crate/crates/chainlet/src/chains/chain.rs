use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::cell::{division_point, norm, Cell, CellKey};
use crate::error::{check_dim, check_grade, Error, Result};
use crate::exterior::Element;

/// Coefficients at or below this magnitude are dropped when collecting like terms.
pub const CHAIN_ZERO_TOL: f64 = 1e-12;

/// A weighted cell in a [`PolyChain`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub c: f64,
    #[serde(flatten)]
    pub cell: Cell,
}

/// A polyhedral k-chain in ℝⁿ with like terms collected.
///
/// Cells are stored in canonical orientation, so two chains are equal exactly
/// when their vertex-exact representatives agree.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolyChain {
    n: usize,
    k: usize,
    terms: Vec<Term>,
}

/// Sum with pairwise reduction, independent of thread scheduling.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        len if len <= 8 => xs.iter().sum(),
        len => pairwise_sum(&xs[..len / 2]) + pairwise_sum(&xs[len / 2..]),
    }
}

impl PolyChain {
    pub fn zero(n: usize, k: usize) -> Self {
        PolyChain { n, k, terms: Vec::new() }
    }

    /// Collects `terms`; cells must already be valid and of dimension `n`, grade `k`.
    pub fn new(n: usize, k: usize, terms: impl IntoIterator<Item = (f64, Cell)>) -> Result<Self> {
        let mut map: BTreeMap<CellKey, Term> = BTreeMap::new();
        for (c, cell) in terms {
            check_dim(n, cell.dim())?;
            check_grade(k, cell.grade())?;
            let (key, s, canon) = cell.canonical();
            map.entry(key).and_modify(|t| t.c += s * c).or_insert(Term { c: s * c, cell: canon });
        }
        let terms = merge_rounded_bases(map.into_values().collect());
        let terms = terms.into_iter().filter(|t| t.c.abs() > CHAIN_ZERO_TOL).collect();
        Ok(PolyChain { n, k, terms })
    }

    /// A chain with a single unit cell.
    pub fn from_cell(cell: Cell) -> Self {
        let (n, k) = (cell.dim(), cell.grade());
        PolyChain::new(n, k, [(1.0, cell)]).expect("dimensions agree")
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn grade(&self) -> usize {
        self.k
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &PolyChain) -> Result<PolyChain> {
        self.combine(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &PolyChain) -> Result<PolyChain> {
        self.combine(1.0, other, -1.0)
    }

    /// `s·self + t·other`.
    pub fn combine(&self, s: f64, other: &PolyChain, t: f64) -> Result<PolyChain> {
        check_dim(self.n, other.n)?;
        check_grade(self.k, other.k)?;
        let terms = self
            .terms
            .iter()
            .map(|x| (s * x.c, x.cell.clone()))
            .chain(other.terms.iter().map(|x| (t * x.c, x.cell.clone())));
        PolyChain::new(self.n, self.k, terms)
    }

    pub fn scale(&self, s: f64) -> PolyChain {
        self.map_terms(|t| (s * t.c, t.cell.clone()))
    }

    fn map_terms(&self, f: impl Fn(&Term) -> (f64, Cell)) -> PolyChain {
        let k = self.k;
        let items: Vec<(f64, Cell)> = self.terms.iter().map(f).collect();
        let n = items.first().map_or(self.n, |(_, c)| c.dim());
        PolyChain::new(n, k, items).expect("mapped cells keep grade")
    }

    /// `∂P` with induced orientations; the zero chain for `k = 0`.
    pub fn boundary(&self) -> PolyChain {
        if self.k == 0 {
            return PolyChain::zero(self.n, 0);
        }
        let items = self.terms.iter().flat_map(|t| t.cell.boundary().into_iter().map(move |(s, f)| (s * t.c, f)));
        PolyChain::new(self.n, self.k - 1, items).expect("facets have grade k-1")
    }

    /// `Σ |aᵢ| m(σᵢ)`; the canonical representative is assumed non-overlapping.
    pub fn mass(&self) -> f64 {
        let parts: Vec<f64> = self.terms.iter().map(|t| t.c.abs() * t.cell.mass()).collect();
        pairwise_sum(&parts)
    }

    /// `Vec(P) = Σ aᵢ Vec(σᵢ)`.
    pub fn vec(&self) -> Element {
        let mut acc = Element::zero(self.n, self.k);
        for t in &self.terms {
            acc = Element::combine(&acc, 1.0, &t.cell.vec(), t.c).expect("uniform grade");
        }
        acc
    }

    /// `depth` levels of subdivision: binary for parallelepipeds, edgewise for simplices.
    pub fn subdivide(&self, depth: usize) -> PolyChain {
        let mut cur: Vec<(f64, Cell)> = self.terms.iter().map(|t| (t.c, t.cell.clone())).collect();
        for _ in 0..depth {
            cur =
                cur.into_iter().flat_map(|(c, cell)| cell.subdivide_once().into_iter().map(move |k| (c, k))).collect();
        }
        PolyChain::new(self.n, self.k, cur).expect("children keep grade")
    }

    /// Image under `x ↦ A x + b`. Cells whose image is degenerate are dropped.
    pub fn affine(&self, a: &nalgebra::DMatrix<f64>, b: &[f64]) -> Result<PolyChain> {
        check_dim(self.n, a.ncols())?;
        check_dim(a.nrows(), b.len())?;
        let items = self.terms.iter().map(|t| (t.c, t.cell.affine(a, b))).filter(|(_, c)| c.validate().is_ok());
        PolyChain::new(a.nrows(), self.k, items)
    }

    /// `T_v P`.
    pub fn translate(&self, v: &[f64]) -> PolyChain {
        self.map_terms(|t| (t.c, t.cell.translate(v)))
    }

    /// `φ_λ P`.
    pub fn scale_space(&self, lambda: f64) -> PolyChain {
        self.map_terms(|t| (t.c, t.cell.scale(lambda)))
    }

    /// Bounding box of the support, `None` for the empty chain.
    pub fn bbox(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        let mut acc: Option<(Vec<f64>, Vec<f64>)> = None;
        for t in &self.terms {
            let (lo, hi) = t.cell.bbox();
            acc = Some(match acc {
                None => (lo, hi),
                Some((a, b)) => (
                    a.iter().zip(&lo).map(|(x, y)| x.min(*y)).collect(),
                    b.iter().zip(&hi).map(|(x, y)| x.max(*y)).collect(),
                ),
            });
        }
        acc
    }

    /// Residual of `self − other` after collecting like terms and, if needed,
    /// one common refinement of the remaining cells. Empty means equivalent.
    pub fn equivalence_residual(&self, other: &PolyChain) -> Result<PolyChain> {
        let diff = self.sub(other)?;
        if diff.is_empty() {
            return Ok(diff);
        }
        // first refine each edge by the shortest residual edge parallel to it, then by the shortest overall
        let mut shortest: HashMap<Vec<i64>, f64> = HashMap::new();
        let mut h = f64::INFINITY;
        for e in diff.terms.iter().flat_map(|t| unit_edges(&t.cell)) {
            let len = norm(&e);
            h = h.min(len);
            let m = shortest.entry(direction_class(&e)).or_insert(f64::INFINITY);
            *m = m.min(len);
        }
        if !h.is_finite() || h <= 0.0 {
            return Ok(diff);
        }
        let refine = |step: &dyn Fn(&[f64]) -> f64| -> Result<PolyChain> {
            let items: Vec<(f64, Cell)> =
                diff.terms.iter().flat_map(|t| refine_cell(&t.cell, step).into_iter().map(move |c| (t.c, c))).collect();
            PolyChain::new(self.n, self.k, items)
        };
        let by_class = refine(&|e| shortest.get(&direction_class(e)).copied().unwrap_or(h))?;
        if by_class.is_empty() {
            return Ok(by_class);
        }
        let global = refine(&|_| h)?;
        Ok(if global.len() < by_class.len() { global } else { by_class })
    }

    /// Plain-text export: `v x y [z]` lines followed by `l`/`f` index lines
    /// (one-based); cells with negative coefficient are written reversed.
    pub fn to_obj(&self) -> Result<String> {
        if self.k == 0 || self.k > 2 {
            return Err(Error::Invalid(format!("OBJ export supports 1- and 2-chains, not grade {}", self.k)));
        }
        let mut out = String::new();
        let mut next = 1usize;
        for t in &self.terms {
            let mut verts = match &t.cell {
                Cell::Simplex { pts } => pts.clone(),
                Cell::Parallelepiped { base, edges } => {
                    let v = t.cell.vertices();
                    if edges.len() == 2 {
                        vec![base.clone(), v[1].clone(), v[3].clone(), v[2].clone()]
                    } else {
                        v
                    }
                }
            };
            if t.c < 0.0 {
                verts.reverse();
            }
            for v in &verts {
                let coords: Vec<String> = v.iter().map(|x| format!("{x}")).collect();
                writeln!(out, "v {}", coords.join(" ")).expect("write to string");
            }
            let idx: Vec<String> = (next..next + verts.len()).map(|i| i.to_string()).collect();
            let tag = if self.k == 1 { "l" } else { "f" };
            writeln!(out, "{tag} {}", idx.join(" ")).expect("write to string");
            next += verts.len();
        }
        Ok(out)
    }
}

/// Lengths of the 1-dimensional pieces a refinement can split.
fn unit_edges(cell: &Cell) -> Vec<Vec<f64>> {
    match cell {
        Cell::Simplex { pts } if pts.len() == 2 => vec![super::cell::sub(&pts[1], &pts[0])],
        Cell::Parallelepiped { edges, .. } => edges.clone(),
        _ => Vec::new(),
    }
}

/// Sign-normalized unit direction rounded to a grid, so parallel edges share a class.
fn direction_class(e: &[f64]) -> Vec<i64> {
    let len = norm(e);
    let first = e.iter().find(|x| x.abs() > 1e-9 * len).copied().unwrap_or(1.0);
    let s = first.signum() / len;
    e.iter().map(|x| (x * s * 1e7).round() as i64).collect()
}

/// Merges cells that agree up to rounding, as happens when the same facet is
/// reached through `(b + eᵢ) + eⱼ` and `(b + eⱼ) + eᵢ` or when a subdivided edge
/// meets a directly computed one. Parallelepipeds must share their canonical
/// edges bit for bit; simplex vertices may differ by rounding, which can also
/// reorder them, so the orientation is matched by permutation parity.
fn merge_rounded_bases(terms: Vec<Term>) -> Vec<Term> {
    let mut groups: HashMap<Vec<Vec<u64>>, Vec<usize>> = HashMap::new();
    for (i, t) in terms.iter().enumerate() {
        let key = match &t.cell {
            Cell::Parallelepiped { edges, .. } => {
                edges.iter().map(|e| e.iter().map(|x| x.to_bits()).collect()).collect()
            }
            Cell::Simplex { pts } => vec![vec![u64::MAX, pts.len() as u64]],
        };
        groups.entry(key).or_default().push(i);
    }
    let mut c: Vec<f64> = terms.iter().map(|t| t.c).collect();
    let mut alive = vec![true; terms.len()];
    for idx in groups.values().filter(|g| g.len() > 1) {
        let mut sorted: Vec<(f64, usize)> = idx.iter().map(|&i| (anchor(&terms[i].cell), i)).collect();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        for a in 0..sorted.len() {
            let (xa, ia) = sorted[a];
            if !alive[ia] {
                continue;
            }
            let tol = 16.0 * f64::EPSILON * rounding_scale(&terms[ia].cell);
            for &(xb, ib) in &sorted[a + 1..] {
                if xb - xa > tol {
                    break;
                }
                if !alive[ib] {
                    continue;
                }
                if let Some(sign) = rounded_match(&terms[ia].cell, &terms[ib].cell, tol) {
                    c[ia] += sign * c[ib];
                    alive[ib] = false;
                }
            }
        }
    }
    terms.into_iter().zip(c).zip(alive).filter(|(_, a)| *a).map(|((t, c), _)| Term { c, cell: t.cell }).collect()
}

/// A coordinate that moves by at most the rounding error: the base, or the vertex centroid.
fn anchor(cell: &Cell) -> f64 {
    match cell {
        Cell::Parallelepiped { base, .. } => base[0],
        Cell::Simplex { pts } => pts.iter().map(|p| p[0]).sum::<f64>() / pts.len() as f64,
    }
}

fn rounding_scale(cell: &Cell) -> f64 {
    let coords = |pts: &[Vec<f64>]| pts.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    match cell {
        Cell::Parallelepiped { base, edges } => {
            edges.iter().map(|e| norm(e)).sum::<f64>().max(coords(std::slice::from_ref(base)))
        }
        Cell::Simplex { pts } => coords(pts),
    }
}

/// `Some(±1)` when `b` is `a` up to rounding, with the relative orientation.
fn rounded_match(a: &Cell, b: &Cell, tol: f64) -> Option<f64> {
    let near = |x: &[f64], y: &[f64]| x.iter().zip(y).all(|(p, q)| (p - q).abs() <= tol);
    match (a, b) {
        (Cell::Parallelepiped { base: ba, .. }, Cell::Parallelepiped { base: bb, .. }) => near(ba, bb).then_some(1.0),
        (Cell::Simplex { pts: pa }, Cell::Simplex { pts: pb }) => {
            let mut perm = Vec::with_capacity(pa.len());
            for p in pa {
                let j = pb.iter().position(|q| near(p, q))?;
                if perm.contains(&j) {
                    return None;
                }
                perm.push(j);
            }
            Some(permutation_sign(&perm))
        }
        _ => None,
    }
}

fn permutation_sign(perm: &[usize]) -> f64 {
    let inversions = (0..perm.len())
        .flat_map(|i| (i + 1..perm.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| perm[i] > perm[j])
        .count();
    if inversions.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn pieces(len: f64, h: f64) -> usize {
    let r = len / h;
    let m = r.round();
    if m >= 2.0 && (r - m).abs() <= 1e-6 * m {
        m as usize
    } else {
        1
    }
}

/// Splits segments and parallelepiped edges whose length is an integer multiple of `h(edge)`.
fn refine_cell(cell: &Cell, h: &dyn Fn(&[f64]) -> f64) -> Vec<Cell> {
    match cell {
        Cell::Simplex { pts } if pts.len() == 2 => {
            let e = super::cell::sub(&pts[1], &pts[0]);
            let m = pieces(norm(&e), h(&e));
            (0..m)
                .map(|i| Cell::Simplex {
                    pts: vec![division_point(&pts[0], &pts[1], i, m), division_point(&pts[0], &pts[1], i + 1, m)],
                })
                .collect()
        }
        Cell::Parallelepiped { base, edges } => {
            let ms: Vec<usize> = edges.iter().map(|e| pieces(norm(e), h(e))).collect();
            let small: Vec<Vec<f64>> =
                edges.iter().zip(&ms).map(|(e, &m)| e.iter().map(|x| x / m as f64).collect()).collect();
            let mut out = Vec::new();
            let total: usize = ms.iter().product();
            for mut code in 0..total {
                let mut b = base.clone();
                for (e, &m) in edges.iter().zip(&ms) {
                    let i = code % m;
                    code /= m;
                    if i > 0 {
                        let t = i as f64 / m as f64;
                        for (bd, ed) in b.iter_mut().zip(e) {
                            *bd += ed * t;
                        }
                    }
                }
                out.push(Cell::Parallelepiped { base: b, edges: small.clone() });
            }
            out
        }
        _ => vec![cell.clone()],
    }
}

#[derive(Deserialize)]
struct ChainRepr {
    n: usize,
    k: usize,
    terms: Vec<Term>,
}

impl<'de> Deserialize<'de> for PolyChain {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = ChainRepr::deserialize(d)?;
        for t in &repr.terms {
            t.cell.validate().map_err(D::Error::custom)?;
        }
        PolyChain::new(repr.n, repr.k, repr.terms.into_iter().map(|t| (t.c, t.cell))).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg(a: f64, b: f64) -> Cell {
        Cell::Simplex { pts: vec![vec![a], vec![b]] }
    }

    #[test]
    fn like_terms_collect() {
        let s = Cell::Simplex { pts: vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]] };
        let r = Cell::Simplex { pts: vec![vec![1.0, 0.0], vec![0.0, 0.0], vec![0.0, 1.0]] };
        assert!(PolyChain::new(2, 2, [(1.0, s.clone()), (1.0, r)]).unwrap().is_empty());
        let five = PolyChain::new(2, 2, [(2.0, s.clone()), (3.0, s.clone())]).unwrap();
        assert_eq!(five.terms().len(), 1);
        let p = PolyChain::from_cell(s);
        assert_eq!(five, p.scale(5.0));
        assert!(p.add(&p.scale(-1.0)).unwrap().is_empty());
    }

    #[test]
    fn segment_boundary_is_endpoint_difference() {
        let b = PolyChain::from_cell(seg(0.0, 1.0)).boundary();
        let expect = PolyChain::new(1, 0, [(1.0, Cell::point(vec![1.0])), (-1.0, Cell::point(vec![0.0]))]).unwrap();
        assert_eq!(b, expect);
    }

    #[test]
    fn square_boundary_pairs_opposite_edges() {
        let sq = PolyChain::from_cell(Cell::cube(&[0.0, 0.0], 1.0));
        let b = sq.boundary();
        assert_eq!(b.len(), 4);
        assert!(b.vec().is_zero());
        assert!(b.boundary().is_empty());
        // counterclockwise: bottom edge runs in +x
        let bottom = b.terms().iter().find(|t| t.cell.bbox().1[1] == 0.0).unwrap();
        assert_eq!(bottom.c, 1.0);
    }

    #[test]
    fn refinement_matches_subdivided_segment() {
        let whole = PolyChain::from_cell(seg(0.0, 1.0));
        let parts = PolyChain::new(
            1,
            1,
            (0..3).map(|i| {
                (
                    1.0,
                    Cell::Simplex {
                        pts: vec![division_point(&[0.0], &[1.0], i, 3), division_point(&[0.0], &[1.0], i + 1, 3)],
                    },
                )
            }),
        )
        .unwrap();
        assert!(!whole.sub(&parts).unwrap().is_empty());
        assert!(whole.equivalence_residual(&parts).unwrap().is_empty());
    }

    #[test]
    fn json_roundtrip() {
        let sq = PolyChain::from_cell(Cell::cube(&[0.0, 0.0], 1.0));
        let s = serde_json::to_string(&sq).unwrap();
        assert!(s.contains(r#""kind":"pp""#));
        let back: PolyChain = serde_json::from_str(&s).unwrap();
        assert_eq!(back, sq);
        let bad = r#"{"n":2,"k":2,"terms":[{"c":1,"kind":"simplex","pts":[[0,0],[1,0],[2,0]]}]}"#;
        assert!(serde_json::from_str::<PolyChain>(bad).is_err());
    }

    #[test]
    fn obj_export() {
        let tri = PolyChain::from_cell(Cell::Simplex { pts: vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]] });
        let obj = tri.to_obj().unwrap();
        assert_eq!(obj.lines().filter(|l| l.starts_with('v')).count(), 3);
        assert!(obj.contains("f 1 2 3"));
        assert!(tri.boundary().to_obj().unwrap().contains("l 1 2"));
    }
}
