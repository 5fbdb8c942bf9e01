//! Whitney decomposition of a bounded open set into non-overlapping binary cubes.

use super::cell::Cell;
use super::chain::PolyChain;

/// An open set, queried through boxes.
pub trait Region {
    fn dim(&self) -> usize;
    /// `true` only when the closed box `[lo, hi]` lies inside the open set.
    fn contains_box(&self, lo: &[f64], hi: &[f64]) -> bool;
    /// `false` only when the closed box misses the set.
    fn meets_box(&self, lo: &[f64], hi: &[f64]) -> bool;
}

/// The open box `(lo, hi)`.
#[derive(Clone, Debug)]
pub struct BoxRegion {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Region for BoxRegion {
    fn dim(&self) -> usize {
        self.lo.len()
    }

    fn contains_box(&self, lo: &[f64], hi: &[f64]) -> bool {
        (0..self.lo.len()).all(|d| lo[d] > self.lo[d] && hi[d] < self.hi[d])
    }

    fn meets_box(&self, lo: &[f64], hi: &[f64]) -> bool {
        (0..self.lo.len()).all(|d| hi[d] > self.lo[d] && lo[d] < self.hi[d])
    }
}

/// A point predicate probed on a regular grid of samples per box.
///
/// Box answers are heuristic: features thinner than the sample spacing can be missed.
pub struct SampledRegion<F> {
    n: usize,
    inside: F,
    samples: usize,
}

impl<F: Fn(&[f64]) -> bool> SampledRegion<F> {
    pub fn new(n: usize, inside: F, samples_per_axis: usize) -> Self {
        SampledRegion { n, inside, samples: samples_per_axis.max(2) }
    }

    fn probe(&self, lo: &[f64], hi: &[f64], want: bool) -> bool {
        let s = self.samples;
        let total = s.pow(self.n as u32);
        let mut p = vec![0.0; self.n];
        for mut code in 0..total {
            for d in 0..self.n {
                let i = code % s;
                code /= s;
                p[d] = lo[d] + (hi[d] - lo[d]) * i as f64 / (s - 1) as f64;
            }
            if (self.inside)(&p) == want {
                return true;
            }
        }
        false
    }
}

impl<F: Fn(&[f64]) -> bool> Region for SampledRegion<F> {
    fn dim(&self) -> usize {
        self.n
    }

    fn contains_box(&self, lo: &[f64], hi: &[f64]) -> bool {
        !self.probe(lo, hi, false)
    }

    fn meets_box(&self, lo: &[f64], hi: &[f64]) -> bool {
        self.probe(lo, hi, true)
    }
}

/// Interior of a simple closed polygon, with edges bucketed on a grid for box queries.
#[derive(Clone, Debug)]
pub struct Polygon {
    pts: Vec<[f64; 2]>,
    lo: [f64; 2],
    cell: [f64; 2],
    grid: usize,
    buckets: Vec<Vec<u32>>,
    bands: Vec<Vec<u32>>,
}

fn segment_meets_box(a: [f64; 2], b: [f64; 2], lo: &[f64], hi: &[f64]) -> bool {
    // Liang–Barsky clipping of the closed segment against the closed box.
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    for d in 0..2 {
        let delta = b[d] - a[d];
        if delta == 0.0 {
            if a[d] < lo[d] || a[d] > hi[d] {
                return false;
            }
            continue;
        }
        let (mut ta, mut tb) = ((lo[d] - a[d]) / delta, (hi[d] - a[d]) / delta);
        if ta > tb {
            std::mem::swap(&mut ta, &mut tb);
        }
        t0 = t0.max(ta);
        t1 = t1.min(tb);
        if t0 > t1 {
            return false;
        }
    }
    true
}

impl Polygon {
    pub fn new(pts: Vec<[f64; 2]>) -> Self {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in &pts {
            for d in 0..2 {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        let grid = ((pts.len() as f64).sqrt().ceil() as usize).clamp(1, 1024);
        let cell = [((hi[0] - lo[0]) / grid as f64).max(1e-300), ((hi[1] - lo[1]) / grid as f64).max(1e-300)];
        let mut poly =
            Polygon { pts, lo, cell, grid, buckets: vec![Vec::new(); grid * grid], bands: vec![Vec::new(); grid] };
        for i in 0..poly.pts.len() {
            let (a, b) = poly.edge(i);
            let (ix0, iy0) = poly.bucket_of([a[0].min(b[0]), a[1].min(b[1])]);
            let (ix1, iy1) = poly.bucket_of([a[0].max(b[0]), a[1].max(b[1])]);
            for iy in iy0..=iy1 {
                poly.bands[iy].push(i as u32);
                for ix in ix0..=ix1 {
                    poly.buckets[iy * grid + ix].push(i as u32);
                }
            }
        }
        poly
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.pts
    }

    fn edge(&self, i: usize) -> ([f64; 2], [f64; 2]) {
        (self.pts[i], self.pts[(i + 1) % self.pts.len()])
    }

    fn bucket_of(&self, p: [f64; 2]) -> (usize, usize) {
        let f = |d: usize| (((p[d] - self.lo[d]) / self.cell[d]).floor().max(0.0) as usize).min(self.grid - 1);
        (f(0), f(1))
    }

    /// Even–odd point-in-polygon test.
    pub fn contains_point(&self, p: &[f64]) -> bool {
        let mut inside = false;
        let band = if p[1] < self.lo[1] {
            return false;
        } else {
            self.bucket_of([p[0], p[1]]).1
        };
        for &i in &self.bands[band] {
            let (a, b) = self.edge(i as usize);
            if (a[1] > p[1]) != (b[1] > p[1]) {
                let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
                if p[0] < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Signed area by the shoelace formula (positive for counterclockwise).
    pub fn area(&self) -> f64 {
        let m = self.pts.len();
        (0..m)
            .map(|i| {
                let (a, b) = (self.pts[i], self.pts[(i + 1) % m]);
                a[0] * b[1] - b[0] * a[1]
            })
            .sum::<f64>()
            / 2.0
    }

    fn any_edge_meets(&self, lo: &[f64], hi: &[f64]) -> bool {
        if hi[0] < self.lo[0] || hi[1] < self.lo[1] {
            return false;
        }
        let (ix0, iy0) = self.bucket_of([lo[0], lo[1]]);
        let (ix1, iy1) = self.bucket_of([hi[0], hi[1]]);
        for iy in iy0..=iy1 {
            for ix in ix0..=ix1 {
                for &e in &self.buckets[iy * self.grid + ix] {
                    let (a, b) = self.edge(e as usize);
                    if segment_meets_box(a, b, lo, hi) {
                        return true;
                    }
                }
            }
        }
        false
    }
}

impl Region for Polygon {
    fn dim(&self) -> usize {
        2
    }

    fn contains_box(&self, lo: &[f64], hi: &[f64]) -> bool {
        let c = [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0];
        self.contains_point(&c) && !self.any_edge_meets(lo, hi)
    }

    fn meets_box(&self, lo: &[f64], hi: &[f64]) -> bool {
        let c = [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0];
        self.contains_point(&c) || self.any_edge_meets(lo, hi)
    }
}

/// Accepted binary cubes grouped by stage; stage `s` cubes have edge `2^{-(k0+s)}`.
#[derive(Clone, Debug)]
pub struct WhitneyDecomposition {
    pub n: usize,
    /// Level of the first stage, `None` when no cube was acceptable within the level cap.
    pub k0: Option<i32>,
    /// Integer lattice corners of the accepted cubes, per stage.
    pub stages: Vec<Vec<Vec<i64>>>,
}

/// Largest number of halvings searched for the first acceptable cube.
pub const MAX_HALVINGS: i32 = 30;

fn cube_box(m: &[i64], h: f64, pad: i64) -> (Vec<f64>, Vec<f64>) {
    let lo = m.iter().map(|&x| (x - pad) as f64 * h).collect();
    let hi = m.iter().map(|&x| (x + 1 + pad) as f64 * h).collect();
    (lo, hi)
}

impl WhitneyDecomposition {
    /// Runs the stage-wise construction on `region` inside `[lo, hi]` up to `max_stage`.
    ///
    /// A cube is acceptable when it and its `3ⁿ − 1` lattice neighbours lie in
    /// the region; it is accepted at the first stage it is acceptable and not
    /// already inside an accepted cube.
    pub fn build(region: &dyn Region, lo: &[f64], hi: &[f64], max_stage: usize) -> Self {
        let n = region.dim();
        let side = lo.iter().zip(hi).map(|(a, b)| b - a).fold(0.0, f64::max);
        let mut out = WhitneyDecomposition { n, k0: None, stages: Vec::new() };
        if side <= 0.0 || !side.is_finite() {
            return out;
        }
        let start = (-side.log2()).floor() as i32;
        let h0 = (2.0f64).powi(-start);
        let ranges: Vec<(i64, i64)> =
            lo.iter().zip(hi).map(|(a, b)| ((a / h0).floor() as i64, (b / h0).ceil() as i64)).collect();
        let mut active: Vec<Vec<i64>> = Vec::new();
        lattice_fill(&ranges, &mut Vec::new(), &mut active);
        for level in start..=start + MAX_HALVINGS {
            let h = (2.0f64).powi(-level);
            active.retain(|m| {
                let (a, b) = cube_box(m, h, 0);
                region.meets_box(&a, &b)
            });
            let (accepted, rest): (Vec<Vec<i64>>, Vec<Vec<i64>>) = active.into_iter().partition(|m| {
                let (a, b) = cube_box(m, h, 1);
                region.contains_box(&a, &b)
            });
            if out.k0.is_none() && !accepted.is_empty() {
                out.k0 = Some(level);
            }
            if out.k0.is_some() {
                out.stages.push(accepted);
                if out.stages.len() > max_stage {
                    break;
                }
            }
            active = rest.iter().flat_map(|m| children(m)).collect();
        }
        out
    }

    /// Edge length of the cubes of stage `s`.
    pub fn edge(&self, s: usize) -> Option<f64> {
        self.k0.map(|k| (2.0f64).powi(-(k + s as i32)))
    }

    /// Cells of stage `s`.
    pub fn stage_cells(&self, s: usize) -> Vec<Cell> {
        let Some(h) = self.edge(s) else {
            return Vec::new();
        };
        self.stages
            .get(s)
            .map_or(Vec::new(), |cubes| cubes.iter().map(|m| Cell::cube(&cube_box(m, h, 0).0, h)).collect())
    }

    /// The partial sum `R_s` of all cubes accepted up to stage `s`.
    pub fn chain(&self, s: usize) -> PolyChain {
        let cells =
            (0..=s.min(self.stages.len().saturating_sub(1))).flat_map(|t| self.stage_cells(t)).map(|c| (1.0, c));
        if self.stages.is_empty() {
            return PolyChain::zero(self.n, self.n);
        }
        PolyChain::new(self.n, self.n, cells).expect("cubes share dimension")
    }

    /// Checks on the binary lattice that no accepted cube contains another.
    pub fn non_overlapping(&self) -> bool {
        use std::collections::HashSet;
        let mut seen: Vec<HashSet<Vec<i64>>> = Vec::new();
        for (s, cubes) in self.stages.iter().enumerate() {
            for m in cubes {
                for (t, earlier) in seen.iter().enumerate() {
                    let shift = (s - t) as u32;
                    let anc: Vec<i64> = m.iter().map(|x| x >> shift).collect();
                    if earlier.contains(&anc) {
                        return false;
                    }
                }
            }
            let set: HashSet<Vec<i64>> = cubes.iter().cloned().collect();
            if set.len() != cubes.len() {
                return false;
            }
            seen.push(set);
        }
        true
    }
}

fn lattice_fill(ranges: &[(i64, i64)], cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
    if cur.len() == ranges.len() {
        out.push(cur.clone());
        return;
    }
    let (a, b) = ranges[cur.len()];
    for x in a..b.max(a + 1) {
        cur.push(x);
        lattice_fill(ranges, cur, out);
        cur.pop();
    }
}

fn children(m: &[i64]) -> Vec<Vec<i64>> {
    (0..1usize << m.len())
        .map(|mask| m.iter().enumerate().map(|(d, &x)| 2 * x + (mask >> d & 1) as i64).collect())
        .collect()
}

/// Whitney decomposition of the set `{x : inside(x)}` within the box `[lo, hi]`,
/// returning `R_{max_stage}`.
pub fn whitney_decompose(inside: impl Fn(&[f64]) -> bool, lo: &[f64], hi: &[f64], max_stage: usize) -> PolyChain {
    let region = SampledRegion::new(lo.len(), inside, 5);
    WhitneyDecomposition::build(&region, lo, hi, max_stage).chain(max_stage)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_region_gives_empty_chain() {
        let c = whitney_decompose(|_| false, &[0.0, 0.0], &[1.0, 1.0], 4);
        assert!(c.is_empty());
    }

    #[test]
    fn unit_square_mass_increases_towards_one() {
        let region = BoxRegion { lo: vec![0.0, 0.0], hi: vec![1.0, 1.0] };
        let w = WhitneyDecomposition::build(&region, &[0.0, 0.0], &[1.0, 1.0], 8);
        assert!(w.non_overlapping());
        let masses: Vec<f64> = (0..=8).map(|s| w.chain(s).mass()).collect();
        assert!(masses.windows(2).all(|p| p[1] >= p[0]));
        let h = w.edge(8).unwrap();
        // everything farther than two cube widths from the boundary is covered
        assert!(masses[8] >= (1.0 - 4.0 * h) * (1.0 - 4.0 * h));
        assert!(masses[8] < 1.0);
    }

    #[test]
    fn polygon_queries() {
        let sq = Polygon::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
        assert_eq!(sq.area(), 1.0);
        assert!(sq.contains_box(&[0.1, 0.1], &[0.9, 0.9]));
        assert!(!sq.contains_box(&[0.1, 0.1], &[1.0, 0.9]));
        assert!(sq.meets_box(&[0.9, 0.9], &[1.5, 1.5]));
        assert!(!sq.meets_box(&[1.1, 1.1], &[1.5, 1.5]));
    }

    #[test]
    fn predicate_and_polygon_agree_on_square() {
        let a = whitney_decompose(|p| p.iter().all(|x| *x > 0.0 && *x < 1.0), &[0.0, 0.0], &[1.0, 1.0], 5);
        let sq = Polygon::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
        let b = WhitneyDecomposition::build(&sq, &[0.0, 0.0], &[1.0, 1.0], 5).chain(5);
        assert_eq!(a, b);
    }
}
