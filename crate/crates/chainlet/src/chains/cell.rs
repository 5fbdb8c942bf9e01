use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::exterior::Element;

/// Threshold on the normalized Gram determinant below which a cell is degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// An oriented simplex or parallelepiped.
///
/// A simplex is oriented by the order of its vertices; a parallelepiped
/// `σ(base; v₁..v_k)` by the order of its edges.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Cell {
    #[serde(rename = "simplex")]
    Simplex { pts: Vec<Vec<f64>> },
    #[serde(rename = "pp")]
    Parallelepiped { base: Vec<f64>, edges: Vec<Vec<f64>> },
}

/// Exact identity of a canonically oriented cell: coordinate bit patterns.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CellKey {
    Simplex(Vec<Vec<u64>>),
    Parallelepiped(Vec<u64>, Vec<Vec<u64>>),
}

fn bits(p: &[f64]) -> Vec<u64> {
    p.iter().map(|&x| if x == 0.0 { 0u64 } else { x.to_bits() }).collect()
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let (x, y) = (x + 0.0, y + 0.0);
        match x.total_cmp(&y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// Sorts `items` and returns the sign of the sorting permutation.
fn sort_with_parity(items: &mut [Vec<f64>]) -> f64 {
    let mut swaps = 0usize;
    for i in 1..items.len() {
        let mut j = i;
        while j > 0 && lex_cmp(&items[j - 1], &items[j]) == Ordering::Greater {
            items.swap(j - 1, j);
            swaps += 1;
            j -= 1;
        }
    }
    crate::exterior::sign(swaps)
}

pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub(crate) fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// The point with index `i` of `m` equal divisions of the segment `[a, b]`.
///
/// The result does not depend on which endpoint is named first, so segments
/// divided from either orientation share their division points bit for bit.
pub fn division_point(a: &[f64], b: &[f64], i: usize, m: usize) -> Vec<f64> {
    let (lo, hi, idx) = if lex_cmp(a, b) != Ordering::Greater { (a, b, i) } else { (b, a, m - i) };
    if idx == 0 {
        return lo.to_vec();
    }
    if idx == m {
        return hi.to_vec();
    }
    let t = idx as f64 / m as f64;
    lo.iter().zip(hi).map(|(x, y)| x + (y - x) * t).collect()
}

/// Determinant of the Gram matrix of `edges`.
pub fn gram_det(edges: &[Vec<f64>]) -> f64 {
    match edges.len() {
        0 => 1.0,
        1 => dot(&edges[0], &edges[0]),
        2 => {
            let (a, b) = (&edges[0], &edges[1]);
            dot(a, a) * dot(b, b) - dot(a, b) * dot(a, b)
        }
        k => nalgebra::DMatrix::from_fn(k, k, |i, j| dot(&edges[i], &edges[j])).determinant(),
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

fn check_independent(edges: &[Vec<f64>]) -> Result<()> {
    // Gram–Schmidt on the normalized edges; the squared residuals multiply to
    // the normalized Gram determinant.
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut det = 1.0;
    for e in edges {
        let len = norm(e);
        if len == 0.0 || !len.is_finite() {
            return Err(Error::DegenerateCell("zero or non-finite edge".into()));
        }
        let mut r: Vec<f64> = e.iter().map(|x| x / len).collect();
        for q in &basis {
            let p = dot(&r, q);
            for (ri, qi) in r.iter_mut().zip(q) {
                *ri -= p * qi;
            }
        }
        let rn = norm(&r);
        det *= rn * rn;
        if rn > 0.0 {
            basis.push(r.iter().map(|x| x / rn).collect());
        }
    }
    if det > DEGENERACY_TOL {
        Ok(())
    } else {
        Err(Error::DegenerateCell(format!("normalized Gram determinant {det:.3e}")))
    }
}

impl Cell {
    /// A simplex with the given vertex order.
    pub fn simplex(pts: Vec<Vec<f64>>) -> Result<Cell> {
        let c = Cell::Simplex { pts };
        c.validate()?;
        Ok(c)
    }

    /// The parallelepiped `σ(base; edges)`.
    pub fn parallelepiped(base: Vec<f64>, edges: Vec<Vec<f64>>) -> Result<Cell> {
        let c = Cell::Parallelepiped { base, edges };
        c.validate()?;
        Ok(c)
    }

    /// A 0-cell.
    pub fn point(p: Vec<f64>) -> Cell {
        Cell::Simplex { pts: vec![p] }
    }

    /// The axis-aligned cube `[lo, lo + h]ⁿ`.
    pub fn cube(lo: &[f64], h: f64) -> Cell {
        let n = lo.len();
        let edges = (0..n).map(|i| (0..n).map(|j| if i == j { h } else { 0.0 }).collect()).collect();
        Cell::Parallelepiped { base: lo.to_vec(), edges }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        let pts: Vec<&Vec<f64>> = match self {
            Cell::Simplex { pts } => {
                if pts.is_empty() {
                    return Err(Error::Invalid("simplex without vertices".into()));
                }
                pts.iter().collect()
            }
            Cell::Parallelepiped { base, edges } => std::iter::once(base).chain(edges).collect(),
        };
        for p in pts {
            check_dim(n, p.len())?;
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::Invalid("non-finite coordinate".into()));
            }
        }
        if self.grade() > n {
            return Err(Error::DegenerateCell(format!("{} edges in dimension {n}", self.grade())));
        }
        check_independent(&self.edges())
    }

    pub fn dim(&self) -> usize {
        match self {
            Cell::Simplex { pts } => pts.first().map_or(0, |p| p.len()),
            Cell::Parallelepiped { base, .. } => base.len(),
        }
    }

    pub fn grade(&self) -> usize {
        match self {
            Cell::Simplex { pts } => pts.len().saturating_sub(1),
            Cell::Parallelepiped { edges, .. } => edges.len(),
        }
    }

    /// Edge vectors spanning the cell, in orientation order.
    pub fn edges(&self) -> Vec<Vec<f64>> {
        match self {
            Cell::Simplex { pts } => pts[1..].iter().map(|p| sub(p, &pts[0])).collect(),
            Cell::Parallelepiped { edges, .. } => edges.clone(),
        }
    }

    /// k-dimensional volume; 1 for a point.
    pub fn mass(&self) -> f64 {
        let g = gram_det(&self.edges()).max(0.0).sqrt();
        match self {
            Cell::Simplex { .. } => g / factorial(self.grade()),
            Cell::Parallelepiped { .. } => g,
        }
    }

    /// `Vec(σ)`: mass times the oriented unit k-direction.
    pub fn vec(&self) -> Element {
        let e = Element::simple(self.dim(), &self.edges()).expect("valid cell");
        match self {
            Cell::Simplex { .. } => e.scale(1.0 / factorial(self.grade())),
            Cell::Parallelepiped { .. } => e,
        }
    }

    /// Barycenter.
    pub fn centroid(&self) -> Vec<f64> {
        match self {
            Cell::Simplex { pts } => {
                let m = pts.len() as f64;
                (0..self.dim()).map(|d| pts.iter().map(|p| p[d]).sum::<f64>() / m).collect()
            }
            Cell::Parallelepiped { base, edges } => {
                (0..base.len()).map(|d| base[d] + edges.iter().map(|e| 0.5 * e[d]).sum::<f64>()).collect()
            }
        }
    }

    /// All vertices (2^k corners for a parallelepiped).
    pub fn vertices(&self) -> Vec<Vec<f64>> {
        match self {
            Cell::Simplex { pts } => pts.clone(),
            Cell::Parallelepiped { base, edges } => (0..1usize << edges.len())
                .map(|mask| {
                    let mut p = base.clone();
                    for (i, e) in edges.iter().enumerate() {
                        if mask >> i & 1 == 1 {
                            for (pd, ed) in p.iter_mut().zip(e) {
                                *pd += ed;
                            }
                        }
                    }
                    p
                })
                .collect(),
        }
    }

    /// Axis-aligned bounding box `(lo, hi)`.
    pub fn bbox(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.dim();
        let mut lo = vec![f64::INFINITY; n];
        let mut hi = vec![f64::NEG_INFINITY; n];
        for v in self.vertices() {
            for d in 0..n {
                lo[d] = lo[d].min(v[d]);
                hi[d] = hi[d].max(v[d]);
            }
        }
        (lo, hi)
    }

    /// Signed facets with the induced orientation.
    pub fn boundary(&self) -> Vec<(f64, Cell)> {
        if self.grade() == 0 {
            return Vec::new();
        }
        match self {
            Cell::Simplex { pts } => (0..pts.len())
                .map(|i| {
                    let mut f = pts.clone();
                    f.remove(i);
                    (crate::exterior::sign(i), Cell::Simplex { pts: f })
                })
                .collect(),
            Cell::Parallelepiped { base, edges } => {
                let mut out = Vec::with_capacity(2 * edges.len());
                for i in 0..edges.len() {
                    let mut rest = edges.clone();
                    let ei = rest.remove(i);
                    let s = crate::exterior::sign(i);
                    let far = add(base, &ei);
                    out.push((s, Cell::facet(far, rest.clone())));
                    out.push((-s, Cell::facet(base.clone(), rest)));
                }
                out
            }
        }
    }

    fn facet(base: Vec<f64>, edges: Vec<Vec<f64>>) -> Cell {
        if edges.is_empty() {
            Cell::point(base)
        } else {
            Cell::Parallelepiped { base, edges }
        }
    }

    /// `x ↦ A x + b` applied to the cell; `a` is row-major `m × n`.
    pub fn affine(&self, a: &nalgebra::DMatrix<f64>, b: &[f64]) -> Cell {
        let lin = |v: &[f64]| -> Vec<f64> {
            (0..a.nrows()).map(|i| (0..a.ncols()).map(|j| a[(i, j)] * v[j]).sum()).collect()
        };
        match self {
            Cell::Simplex { pts } => Cell::Simplex { pts: pts.iter().map(|p| add(&lin(p), b)).collect() },
            Cell::Parallelepiped { base, edges } => {
                Cell::Parallelepiped { base: add(&lin(base), b), edges: edges.iter().map(|e| lin(e)).collect() }
            }
        }
    }

    /// `T_v σ`.
    pub fn translate(&self, v: &[f64]) -> Cell {
        match self {
            Cell::Simplex { pts } => Cell::Simplex { pts: pts.iter().map(|p| add(p, v)).collect() },
            Cell::Parallelepiped { base, edges } => Cell::Parallelepiped { base: add(base, v), edges: edges.clone() },
        }
    }

    /// `φ_λ σ`, the image under `x ↦ λx`.
    pub fn scale(&self, lambda: f64) -> Cell {
        let s = |p: &Vec<f64>| p.iter().map(|x| lambda * x).collect::<Vec<f64>>();
        match self {
            Cell::Simplex { pts } => Cell::Simplex { pts: pts.iter().map(s).collect() },
            Cell::Parallelepiped { base, edges } => {
                Cell::Parallelepiped { base: s(base), edges: edges.iter().map(s).collect() }
            }
        }
    }

    /// The canonically oriented representative and the sign relating it to `self`.
    ///
    /// Simplex vertices are sorted; parallelepiped edges are flipped to point
    /// lexicographically forward and then sorted.
    pub fn canonical(&self) -> (CellKey, f64, Cell) {
        match self {
            Cell::Simplex { pts } => {
                let mut p: Vec<Vec<f64>> = pts.iter().map(|v| v.iter().map(|x| x + 0.0).collect()).collect();
                let s = sort_with_parity(&mut p);
                (CellKey::Simplex(p.iter().map(|v| bits(v)).collect()), s, Cell::Simplex { pts: p })
            }
            Cell::Parallelepiped { base, edges } => {
                if edges.is_empty() {
                    return Cell::point(base.clone()).canonical();
                }
                let mut b: Vec<f64> = base.iter().map(|x| x + 0.0).collect();
                let mut s = 1.0;
                let mut es: Vec<Vec<f64>> = Vec::with_capacity(edges.len());
                for e in edges {
                    let first = e.iter().find(|x| **x != 0.0).copied().unwrap_or(0.0);
                    if first < 0.0 {
                        b = add(&b, e);
                        es.push(e.iter().map(|x| -x + 0.0).collect());
                        s = -s;
                    } else {
                        es.push(e.iter().map(|x| x + 0.0).collect());
                    }
                }
                s *= sort_with_parity(&mut es);
                let key = CellKey::Parallelepiped(bits(&b), es.iter().map(|e| bits(e)).collect());
                (key, s, Cell::Parallelepiped { base: b, edges: es })
            }
        }
    }

    /// One level of subdivision into `2^k` children of equal mass and the same orientation.
    pub fn subdivide_once(&self) -> Vec<Cell> {
        let k = self.grade();
        if k == 0 {
            return vec![self.clone()];
        }
        match self {
            Cell::Parallelepiped { base, edges } => {
                let half: Vec<Vec<f64>> = edges.iter().map(|e| e.iter().map(|x| 0.5 * x).collect()).collect();
                (0..1usize << k)
                    .map(|mask| {
                        let mut b = base.clone();
                        for (i, h) in half.iter().enumerate() {
                            if mask >> i & 1 == 1 {
                                for (bd, hd) in b.iter_mut().zip(h) {
                                    *bd += hd;
                                }
                            }
                        }
                        Cell::Parallelepiped { base: b, edges: half.clone() }
                    })
                    .collect()
            }
            Cell::Simplex { pts } => edgewise_children(pts),
        }
    }
}

/// Freudenthal–Kuhn edgewise subdivision of a k-simplex into `2^k` children.
///
/// In coordinates `x = v₀ + Σ yᵢ (vᵢ − vᵢ₋₁)/2` the doubled simplex is
/// `2 ≥ y₁ ≥ … ≥ y_k ≥ 0`, tiled by Kuhn simplices of the unit lattice.
fn edgewise_children(pts: &[Vec<f64>]) -> Vec<Cell> {
    let k = pts.len() - 1;
    let mut out = Vec::with_capacity(1 << k);
    let perms = permutations(k);
    for mask in 0..1usize << k {
        let c: Vec<i64> = (0..k).map(|i| (mask >> i & 1) as i64).collect();
        for perm in &perms {
            let mut ys: Vec<Vec<i64>> = Vec::with_capacity(k + 1);
            let mut y = c.clone();
            ys.push(y.clone());
            for &p in perm {
                y[p] += 1;
                ys.push(y.clone());
            }
            let inside = ys.iter().all(|y| {
                (0..k).all(|i| {
                    let prev = if i == 0 { 2 } else { y[i - 1] };
                    y[i] <= prev && y[i] >= 0
                })
            });
            if !inside {
                continue;
            }
            let det = int_det(
                &ys[1..].iter().map(|v| v.iter().zip(&ys[0]).map(|(a, b)| a - b).collect()).collect::<Vec<Vec<i64>>>(),
            );
            if det < 0 {
                let last = ys.len() - 1;
                ys.swap(last - 1, last);
            }
            let verts = ys.iter().map(|y| lattice_point(pts, y)).collect();
            out.push(Cell::Simplex { pts: verts });
        }
    }
    debug_assert_eq!(out.len(), 1 << k);
    out
}

/// Barycentric point with weights `(yᵢ − yᵢ₊₁)/2`, `y₀ = 2`, `y_{k+1} = 0`.
fn lattice_point(pts: &[Vec<f64>], y: &[i64]) -> Vec<f64> {
    let k = y.len();
    let weights: Vec<i64> = (0..=k)
        .map(|i| {
            let hi = if i == 0 { 2 } else { y[i - 1] };
            let lo = if i == k { 0 } else { y[i] };
            hi - lo
        })
        .collect();
    let nz: Vec<usize> = (0..=k).filter(|&i| weights[i] != 0).collect();
    match nz.as_slice() {
        [i] => pts[*i].clone(),
        [i, j] => pts[*i].iter().zip(&pts[*j]).map(|(a, b)| 0.5 * a + 0.5 * b).collect(),
        _ => unreachable!("lattice points have at most two nonzero weights"),
    }
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

fn int_det(m: &[Vec<i64>]) -> i64 {
    let k = m.len();
    if k == 0 {
        return 1;
    }
    let mut total = 0;
    for perm in &permutations(k) {
        let mut inv = 0;
        for i in 0..k {
            for j in i + 1..k {
                if perm[i] > perm[j] {
                    inv += 1;
                }
            }
        }
        let prod: i64 = (0..k).map(|i| m[i][perm[i]]).product();
        total += if inv % 2 == 0 { prod } else { -prod };
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn make_cell_examples() {
        let t = Cell::simplex(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(t.mass(), 0.5);
        let sq = Cell::parallelepiped(vec![0.0, 0.0], vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(sq.mass(), 1.0);
        let bad = Cell::simplex(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![2.0, 0.0]]);
        assert!(matches!(bad, Err(Error::DegenerateCell(_))));
        assert_eq!(Cell::point(vec![3.0]).mass(), 1.0);
        assert!(Cell::simplex(vec![vec![0.0], vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn canonical_parity() {
        let a = Cell::Simplex { pts: vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]] };
        let b = Cell::Simplex { pts: vec![vec![1.0, 0.0], vec![0.0, 0.0], vec![0.0, 1.0]] };
        let (ka, sa, _) = a.canonical();
        let (kb, sb, _) = b.canonical();
        assert_eq!(ka, kb);
        assert_eq!(sa, -sb);
        let p = Cell::Parallelepiped { base: vec![1.0, 0.0], edges: vec![vec![-1.0, 0.0]] };
        let q = Cell::Parallelepiped { base: vec![0.0, 0.0], edges: vec![vec![1.0, 0.0]] };
        let (kp, sp, _) = p.canonical();
        let (kq, sq, _) = q.canonical();
        assert_eq!(kp, kq);
        assert_eq!(sp, -sq);
        let z = Cell::point(vec![-0.0, 1.0]).canonical().0;
        assert_eq!(z, Cell::point(vec![0.0, 1.0]).canonical().0);
    }

    #[test]
    fn edgewise_subdivision_counts_and_orientation() {
        for k in 1..=4usize {
            let pts: Vec<Vec<f64>> = (0..=k)
                .map(|i| (0..k).map(|d| if d < i { 1.0 } else { 0.0 } + 0.1 * (i * d) as f64).collect())
                .collect();
            let s = Cell::Simplex { pts };
            let kids = s.subdivide_once();
            assert_eq!(kids.len(), 1 << k);
            let parent = s.vec();
            for kid in &kids {
                let r = kid.vec().scale((1 << k) as f64);
                assert!(r.max_abs_diff(&parent) < 1e-12, "k={k}");
            }
        }
    }

    #[test]
    fn division_points_agree_across_orientation() {
        let a = [0.1, 0.7];
        let b = [0.9, -0.3];
        for m in 1..7 {
            for i in 0..=m {
                assert_eq!(division_point(&a, &b, i, m), division_point(&b, &a, m - i, m));
            }
        }
        assert_eq!(division_point(&a, &b, 0, 3), a.to_vec());
    }
}
