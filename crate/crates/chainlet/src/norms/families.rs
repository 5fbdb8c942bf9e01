use serde::Serialize;

use crate::chains::{Cell, PolyChain};
use crate::error::{Error, Result};
use crate::exterior::{Coelement, DerivKey, Key, MultiIndex};
use crate::forms::{integrate_poly_chain, FormJet, Provenance, DEFAULT_DEGREE};

use super::bounds::{upper_bound, NormBound};
use super::decomposition::{Decomposition, DiffGen};

fn segment(a: [f64; 2], b: [f64; 2]) -> Cell {
    Cell::Simplex { pts: vec![a.to_vec(), b.to_vec()] }
}

/// The staircase with `2^i` steps under the diagonal of the unit square and
/// the certified `♮1` bound on its distance to the diagonal.
#[derive(Clone, Debug)]
pub struct Staircase {
    pub i: usize,
    pub staircase: PolyChain,
    pub diagonal: PolyChain,
    pub difference: PolyChain,
    pub decomposition: Decomposition,
    pub bound: NormBound,
}

/// `staircase_i − diagonal = ∂B` with `B` the `2^i` triangles between them.
pub fn staircase_decomposition(i: usize) -> Result<Staircase> {
    let m = 1usize << i;
    let x = |s: usize| s as f64 / m as f64;
    let mut steps = Vec::with_capacity(2 * m);
    let mut triangles = Vec::with_capacity(m);
    for s in 0..m {
        let (a, b) = (x(s), x(s + 1));
        steps.push((1.0, segment([a, a], [b, a])));
        steps.push((1.0, segment([b, a], [b, b])));
        triangles.push((1.0, Cell::Simplex { pts: vec![vec![a, a], vec![b, a], vec![b, b]] }));
    }
    let staircase = PolyChain::new(2, 1, steps)?;
    let diagonal = PolyChain::from_cell(segment([0.0, 0.0], [1.0, 1.0]));
    let difference = staircase.sub(&diagonal)?;
    let region = PolyChain::new(2, 2, triangles)?;
    let decomposition = Decomposition {
        n: 2,
        k: 1,
        r: 1,
        layers: vec![Vec::new(), Vec::new()],
        boundary: Some(Box::new(Decomposition::trivial(&region, 0))),
    };
    let bound = upper_bound(&difference, &decomposition)?.with_target(format!("staircase_{i} - diagonal"));
    Ok(Staircase { i, staircase, diagonal, difference, decomposition, bound })
}

/// `φ(x) dy` with `φ = clamp(x, 0, 1)`: equal to `x dy` over the unit square and
/// with `|ω|^♮1 = max{sup|φ|, Lip φ, sup|φ'|} = 1` on all of ℝ².
pub fn clamped_x_dy() -> FormJet {
    let dy = MultiIndex::from_sorted(vec![1]);
    FormJet::new(2, 1, "clamp(x) dy", Provenance::Analytic, move |p, j| match j {
        0 => Coelement::monomial(2, Key::direction(dy.clone()), p[0].clamp(0.0, 1.0)),
        1 if (0.0..=1.0).contains(&p[0]) => {
            Coelement::monomial(2, Key::new(DerivKey::from_sorted(vec![0]), dy.clone()), 1.0)
        }
        _ => Coelement::zero(2, 1),
    })
    .with_certified_norm(1.0)
}

/// The weighted square `Pᵢ = 4ⁱ σᵢ`, `σᵢ` the square of side `2^{−i}` centred at the origin.
pub fn dipole_chain(i: usize) -> PolyChain {
    let h = 0.5f64.powi(i as i32);
    PolyChain::new(2, 2, [(4f64.powi(i as i32), Cell::cube(&[-h / 2.0, -h / 2.0], h))]).expect("valid square")
}

#[derive(Clone, Debug)]
pub struct Dipole {
    pub i: usize,
    pub chain: PolyChain,
    pub difference: PolyChain,
    pub decomposition: Decomposition,
    pub bound: NormBound,
}

/// `Pᵢ − Pᵢ₊₁ = −4ⁱ Σ_q (σᵢ₊₁ − T_{c_q} σᵢ₊₁)`, pairing each quarter of `σᵢ`
/// with the centred copy `σᵢ₊₁`; the offsets are `c_q = (±2^{−i−2}, ±2^{−i−2})`.
pub fn dipole_sequence(i: usize) -> Result<Dipole> {
    let chain = dipole_chain(i);
    let difference = chain.sub(&dipole_chain(i + 1))?;
    let h = 0.5f64.powi(i as i32 + 1);
    let small = Cell::cube(&[-h / 2.0, -h / 2.0], h);
    let q = h / 2.0;
    let gens = [[-q, -q], [q, -q], [-q, q], [q, q]]
        .iter()
        .map(|c| DiffGen::new(-(4f64.powi(i as i32)), small.clone(), vec![c.to_vec()]))
        .collect::<Result<Vec<_>>>()?;
    let decomposition = Decomposition { n: 2, k: 2, r: 1, layers: vec![Vec::new(), gens], boundary: None };
    let bound = upper_bound(&difference, &decomposition)?.with_target(format!("P_{i} - P_{}", i + 1));
    Ok(Dipole { i, chain, difference, decomposition, bound })
}

/// Outcome of comparing a decomposition of `P` with its image under `x ↦ λx`.
#[derive(Clone, Debug, Serialize)]
pub struct ScalingReport {
    pub lambda: f64,
    pub k: usize,
    pub r: usize,
    pub upper: f64,
    pub scaled_upper: f64,
    pub allowed_factor: f64,
    pub observed_factor: f64,
    pub pass: bool,
}

/// Transports `dec` by `φ_λ`, verifies it realizes `φ_λ P`, and checks
/// `upper(φ_λ P) ≤ max{1, λ^{k+r}}·upper(P)`.
pub fn scaling_check(p: &PolyChain, dec: &Decomposition, lambda: f64) -> Result<ScalingReport> {
    if lambda.is_nan() || lambda <= 0.0 {
        return Err(Error::Invalid(format!("scaling factor must be positive, got {lambda}")));
    }
    let upper = upper_bound(p, dec)?.value;
    let scaled_upper = upper_bound(&p.scale_space(lambda), &dec.scale_space(lambda))?.value;
    let (k, r) = (p.grade(), dec.r);
    let allowed_factor = 1f64.max(lambda.powi((k + r) as i32));
    let observed_factor = if upper > 0.0 { scaled_upper / upper } else { 0.0 };
    let pass = scaled_upper <= allowed_factor * upper * (1.0 + 1e-9);
    Ok(ScalingReport { lambda, k, r, upper, scaled_upper, allowed_factor, observed_factor, pass })
}

/// Forms with `|ω|^♮0 = 1` used for the dual mass estimate: the constant `±dx^H`,
/// the normalized constant `♭Vec(P)` and, when the cells of `P` have pairwise
/// disjoint bounding boxes, the piecewise-constant form equal to the signed unit
/// direction of each cell on its box.
pub fn direction_form_family(p: &PolyChain) -> Vec<FormJet> {
    let (n, k) = (p.dim(), p.grade());
    let mut family: Vec<FormJet> = MultiIndex::all(n, k)
        .into_iter()
        .map(|h| FormJet::constant(Coelement::basis(n, h)).with_certified_norm(1.0))
        .collect();
    let v = p.vec();
    if v.mass() > 0.0 {
        family.push(FormJet::constant(Coelement::flat(&v.scale(1.0 / v.mass()))).with_certified_norm(1.0));
    }
    let pieces: Vec<(Vec<f64>, Vec<f64>, Coelement)> = p
        .terms()
        .iter()
        .map(|t| {
            let (lo, hi) = t.cell.bbox();
            let dir = t.cell.vec();
            (lo, hi, Coelement::flat(&dir.scale(t.c.signum() / dir.mass())))
        })
        .collect();
    let disjoint = pieces.iter().enumerate().all(|(a, (lo_a, hi_a, _))| {
        pieces[a + 1..].iter().all(|(lo_b, hi_b, _)| (0..n).any(|i| hi_a[i] < lo_b[i] || hi_b[i] < lo_a[i]))
    });
    if disjoint && !pieces.is_empty() {
        let zero = Coelement::zero(n, k);
        family.push(
            FormJet::new(n, k, "cellwise direction", Provenance::Analytic, move |x, j| {
                if j > 0 {
                    return zero.clone();
                }
                pieces
                    .iter()
                    .find(|(lo, hi, _)| x.iter().zip(lo.iter().zip(hi)).all(|(xi, (l, h))| *l <= *xi && *xi <= *h))
                    .map_or_else(|| zero.clone(), |(_, _, g)| g.clone())
            })
            .with_certified_norm(1.0),
        );
    }
    family
}

/// `sup |∫_P ω| / |ω|^♮0` over [`direction_form_family`], a lower estimate of `M(P)`.
pub fn mass_dual_estimate(p: &PolyChain) -> Result<f64> {
    let mut best = 0.0f64;
    for w in direction_form_family(p) {
        let c = w.certified_norm().unwrap_or(1.0);
        best = best.max(integrate_poly_chain(p, &w, DEFAULT_DEGREE)?.abs() / c);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::Domain;
    use crate::norms::bounds::lower_bound;

    #[test]
    fn staircase_bounds_and_mass() {
        for i in [0, 1, 3, 6] {
            let s = staircase_decomposition(i).unwrap();
            assert_eq!(s.bound.value, 0.5f64.powi(i as i32 + 1));
            assert!((s.difference.mass() - (2.0 + 2f64.sqrt())).abs() < 1e-12);
            let lo = lower_bound(Domain::Poly(&s.difference), &clamped_x_dy(), 1.0, 1, false).unwrap();
            assert!(lo.value <= s.bound.value * (1.0 + 1e-12));
            assert!(lo.value > 0.0);
        }
    }

    #[test]
    fn dipole_halves() {
        let mut prev: Option<f64> = None;
        for i in 0..6 {
            let d = dipole_sequence(i).unwrap();
            assert_eq!(d.chain.mass(), 1.0);
            if let Some(b) = prev {
                assert!((d.bound.value / b - 0.5).abs() < 1e-12);
            }
            prev = Some(d.bound.value);
        }
    }

    #[test]
    fn scaling_examples() {
        let seg = PolyChain::from_cell(Cell::Simplex { pts: vec![vec![0.0, 0.0], vec![1.0, 0.0]] });
        let dec = Decomposition::trivial(&seg, 1);
        let same = scaling_check(&seg, &dec, 1.0).unwrap();
        assert!(same.pass && same.observed_factor == 1.0);
        let two = scaling_check(&seg, &dec, 2.0).unwrap();
        assert!(two.pass && two.observed_factor == 2.0 && two.allowed_factor == 4.0);
        let half = scaling_check(&seg, &dec, 0.5).unwrap();
        assert!(half.pass && half.scaled_upper <= half.upper);
    }

    #[test]
    fn dual_estimate_reaches_mass() {
        let p = PolyChain::new(2, 1, [(2.0, segment([0.0, 0.0], [1.0, 0.3])), (-0.5, segment([2.0, 2.0], [2.5, 3.0]))])
            .unwrap();
        let e = mass_dual_estimate(&p).unwrap();
        assert!((e - p.mass()).abs() < 1e-12);
    }
}
