use std::f64::consts::PI;

use crate::chains::Cell;

/// Quadrature degree used when none is given.
pub const DEFAULT_DEGREE: usize = 10;

/// Gauss–Legendre nodes and weights on `[0, 1]`, weights summing to one.
pub fn gauss_legendre(m: usize) -> Vec<(f64, f64)> {
    assert!(m > 0, "at least one node");
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(m, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(m, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push(((1.0 - x) / 2.0, w / 2.0));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// `P_m(x)` and `P_m'(x)` by the three-term recurrence.
fn legendre(m: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if m == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=m {
        let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A rule on a reference cell: coordinates and weights summing to one.
///
/// For simplices the coordinates are barycentric (length `k+1`), for
/// parallelepipeds they are the edge parameters in `[0,1]^k`.
#[derive(Clone, Debug)]
pub struct ReferenceRule {
    pub simplex: bool,
    pub nodes: Vec<(Vec<f64>, f64)>,
}

/// Exact for polynomials of total degree `degree` on a `k`-simplex, via the collapsed-coordinate map.
pub fn simplex_rule(k: usize, degree: usize) -> ReferenceRule {
    if k == 0 {
        return ReferenceRule { simplex: true, nodes: vec![(vec![1.0], 1.0)] };
    }
    let gl = gauss_legendre((degree + k) / 2 + 1);
    let factorial: f64 = (1..=k).map(|i| i as f64).product();
    let mut nodes = Vec::new();
    let mut idx = vec![0usize; k];
    loop {
        let mut lambda = vec![0.0; k + 1];
        let (mut rest, mut w) = (1.0, factorial);
        for (i, &q) in idx.iter().enumerate() {
            let (u, wu) = gl[q];
            lambda[i + 1] = rest * u;
            w *= wu * (1.0 - u).powi((k - 1 - i) as i32);
            rest *= 1.0 - u;
        }
        lambda[0] = rest;
        nodes.push((lambda, w));
        if !advance(&mut idx, gl.len()) {
            break;
        }
    }
    ReferenceRule { simplex: true, nodes }
}

/// Tensor Gauss–Legendre on `[0,1]^k`, exact for degree `degree` in each variable.
pub fn cube_rule(k: usize, degree: usize) -> ReferenceRule {
    let gl = gauss_legendre(degree / 2 + 1);
    let mut nodes = Vec::new();
    let mut idx = vec![0usize; k];
    loop {
        let t: Vec<f64> = idx.iter().map(|&q| gl[q].0).collect();
        let w: f64 = idx.iter().map(|&q| gl[q].1).product();
        nodes.push((t, w));
        if !advance(&mut idx, gl.len()) {
            break;
        }
    }
    ReferenceRule { simplex: false, nodes }
}

fn advance(idx: &mut [usize], m: usize) -> bool {
    for d in idx.iter_mut() {
        *d += 1;
        if *d < m {
            return true;
        }
        *d = 0;
    }
    false
}

/// Nodes in space and normalized weights for `cell`.
pub fn cell_nodes(cell: &Cell, degree: usize) -> Vec<(Vec<f64>, f64)> {
    match cell {
        Cell::Simplex { pts } => simplex_rule(pts.len() - 1, degree)
            .nodes
            .into_iter()
            .map(|(lambda, w)| {
                let mut x = vec![0.0; pts[0].len()];
                for (l, p) in lambda.iter().zip(pts) {
                    for (xi, pi) in x.iter_mut().zip(p) {
                        *xi += l * pi;
                    }
                }
                (x, w)
            })
            .collect(),
        Cell::Parallelepiped { base, edges } => cube_rule(edges.len(), degree)
            .nodes
            .into_iter()
            .map(|(t, w)| {
                let mut x = base.clone();
                for (ti, e) in t.iter().zip(edges) {
                    for (xi, ei) in x.iter_mut().zip(e) {
                        *xi += ti * ei;
                    }
                }
                (x, w)
            })
            .collect(),
    }
}
