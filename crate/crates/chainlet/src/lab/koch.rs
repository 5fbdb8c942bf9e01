use crate::chains::{division_point, Cell, PolyChain, Polygon};
use crate::error::{Error, Result};
use crate::norms::{upper_bound, Decomposition, NormBound};

/// Largest supported snowflake depth.
pub const MAX_KOCH_DEPTH: usize = 10;

const SIN60: f64 = 0.866_025_403_784_438_6;

/// The apex of the outward bump on the middle third `[p1, p2]` of a counterclockwise edge.
fn apex(p1: &[f64], p2: &[f64]) -> Vec<f64> {
    let (dx, dy) = (p2[0] - p1[0], p2[1] - p1[1]);
    vec![p1[0] + 0.5 * dx + SIN60 * dy, p1[1] - SIN60 * dx + 0.5 * dy]
}

/// Vertices of the depth-`d` snowflake polygon, counterclockwise from `(0,0)`.
///
/// Every edge `[a, b]` is replaced by `a, p₁, apex, p₂` with `p₁, p₂` the
/// division points of `[a, b]` into thirds, so the refinement of a coarse edge
/// reproduces the fine vertices bit for bit.
pub fn koch_vertices(depth: usize) -> Vec<Vec<f64>> {
    let mut pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, SIN60]];
    for _ in 0..depth {
        let m = pts.len();
        let mut next = Vec::with_capacity(4 * m);
        for i in 0..m {
            let (a, b) = (&pts[i], &pts[(i + 1) % m]);
            let p1 = division_point(a, b, 1, 3);
            let p2 = division_point(a, b, 2, 3);
            let top = apex(&p1, &p2);
            next.extend([a.clone(), p1, top, p2]);
        }
        pts = next;
    }
    pts
}

/// The snowflake approximant: its polygon for inside queries and its boundary 1-chain `P_d`.
#[derive(Clone, Debug)]
pub struct Koch {
    pub depth: usize,
    pub polygon: Polygon,
    pub boundary: PolyChain,
}

pub fn build_koch(depth: usize) -> Result<Koch> {
    if depth > MAX_KOCH_DEPTH {
        return Err(Error::Invalid(format!("snowflake depth {depth} exceeds {MAX_KOCH_DEPTH}")));
    }
    let pts = koch_vertices(depth);
    let m = pts.len();
    let boundary = PolyChain::new(
        2,
        1,
        (0..m).map(|i| (1.0, Cell::Simplex { pts: vec![pts[i].clone(), pts[(i + 1) % m].clone()] })),
    )?;
    let polygon = Polygon::new(pts.iter().map(|p| [p[0], p[1]]).collect());
    Ok(Koch { depth, polygon, boundary })
}

/// `T_d`: the `3·4^d` positively oriented bump triangles added at step `d → d+1`,
/// so that `P_{d+1} − P_d = ∂T_d`.
pub fn koch_bumps(depth: usize) -> Result<PolyChain> {
    let pts = koch_vertices(depth);
    let m = pts.len();
    let cells = (0..m).map(|i| {
        let (a, b) = (&pts[i], &pts[(i + 1) % m]);
        let p1 = division_point(a, b, 1, 3);
        let p2 = division_point(a, b, 2, 3);
        (1.0, Cell::Simplex { pts: vec![p1.clone(), apex(&p1, &p2), p2] })
    });
    PolyChain::new(2, 2, cells)
}

/// A 2-chain with boundary `P_d`: the base triangle plus all bumps before depth `d`.
pub fn koch_region(depth: usize) -> Result<PolyChain> {
    let base = koch_vertices(0);
    let mut region = PolyChain::from_cell(Cell::Simplex { pts: base });
    for m in 0..depth {
        region = region.add(&koch_bumps(m)?)?;
    }
    Ok(region)
}

/// The verified `♮1` decomposition `P_{d+1} − P_d = ∂T_d` and its bound `M(T_d)`.
pub fn koch_cauchy_bound(depth: usize) -> Result<(Decomposition, NormBound)> {
    let diff = build_koch(depth + 1)?.boundary.sub(&build_koch(depth)?.boundary)?;
    let bumps = koch_bumps(depth)?;
    let dec = Decomposition {
        n: 2,
        k: 1,
        r: 1,
        layers: vec![Vec::new(), Vec::new()],
        boundary: Some(Box::new(Decomposition::trivial(&bumps, 0))),
    };
    let bound = upper_bound(&diff, &dec)?.with_target(format!("P_{} - P_{depth}", depth + 1));
    Ok((dec, bound))
}

/// `M(T_d) = 3·4^d·(√3/4)·9^{−(d+1)} = (√3/12)(4/9)^d`.
pub fn koch_bump_mass(depth: usize) -> f64 {
    3f64.sqrt() / 12.0 * (4.0f64 / 9.0).powi(depth as i32)
}

/// Area of the limiting snowflake with side 1, `2√3/5`.
pub const SNOWFLAKE_AREA: f64 = 0.692_820_323_027_550_9;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_depths() {
        let k0 = build_koch(0).unwrap();
        assert!((k0.boundary.mass() - 3.0).abs() < 1e-15);
        let k1 = build_koch(1).unwrap();
        assert_eq!(k1.boundary.len(), 12);
        assert!((k1.boundary.mass() - 4.0).abs() < 1e-14);
        assert!(k1.polygon.area() > k0.polygon.area());
        assert!(build_koch(MAX_KOCH_DEPTH + 1).is_err());
    }

    #[test]
    fn bumps_close_the_gap() {
        for d in 0..4 {
            let (_, bound) = koch_cauchy_bound(d).unwrap();
            assert!((bound.value - koch_bump_mass(d)).abs() < 1e-12);
            let region = koch_region(d + 1).unwrap();
            let area = build_koch(d + 1).unwrap().polygon.area();
            assert!((region.mass() - area).abs() < 1e-12);
        }
    }
}
