use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_dim, Error, Result};
use crate::exterior::{pair, Element, MultiIndex};

use super::jet::FormJet;

/// Sampled lower estimate of `‖ω‖_j = sup ω(Δ_{U^j} α) / (|u₁|⋯|u_j| M(α))` over
/// unit simple `α` supported at points of the box `[lo, hi]`, with every translate
/// kept inside the box.
///
/// The samples form a fixed sequence determined by `seed`, so the result is
/// non-decreasing in `budget`.
pub fn form_norm_estimate(w: &FormJet, lo: &[f64], hi: &[f64], j: usize, budget: usize, seed: u64) -> Result<f64> {
    let n = w.dim();
    check_dim(n, lo.len())?;
    check_dim(n, hi.len())?;
    if lo.iter().zip(hi).any(|(a, b)| a > b) {
        return Err(Error::Invalid("empty sampling box".into()));
    }
    let basis = MultiIndex::all(n, w.grade());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0.0f64;
    for s in 0..budget {
        let us = sample_vectors(&mut rng, lo, hi, j, s);
        let alpha = if s % 2 == 0 || w.grade() == 0 || w.grade() == n {
            Element::basis(n, basis[(s / 2) % basis.len()].clone())
        } else {
            random_unit_simple(&mut rng, n, w.grade())
        };
        // feasible base points keep every p + Σ_S u inside the box
        let mut lo_p = lo.to_vec();
        let mut hi_p = hi.to_vec();
        for i in 0..n {
            let neg: f64 = us.iter().map(|u| u[i].min(0.0)).sum();
            let pos: f64 = us.iter().map(|u| u[i].max(0.0)).sum();
            lo_p[i] -= neg;
            hi_p[i] -= pos;
        }
        let corner = s < (1usize << n.min(16));
        let p: Vec<f64> = (0..n)
            .map(|i| {
                let t: f64 = if corner { ((s >> i) & 1) as f64 } else { rng.gen() };
                lo_p[i] + t * (hi_p[i] - lo_p[i])
            })
            .collect();
        if lo_p.iter().zip(&hi_p).any(|(a, b)| a > b) {
            continue;
        }
        let mut total = 0.0;
        for subset in 0..(1usize << j) {
            let mut q = p.clone();
            for (m, u) in us.iter().enumerate() {
                if subset >> m & 1 == 1 {
                    for (qi, ui) in q.iter_mut().zip(u) {
                        *qi += ui;
                    }
                }
            }
            let sgn = if subset.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            total += sgn * pair(&w.value(&q), &alpha);
        }
        let scale: f64 = us.iter().map(|u| u.iter().map(|x| x * x).sum::<f64>().sqrt()).product();
        if scale > 0.0 {
            best = best.max(total.abs() / scale);
        }
    }
    Ok(best)
}

/// Difference vectors: axis-aligned on every other sample, otherwise in random directions,
/// with lengths spread over three decades of the box size.
fn sample_vectors(rng: &mut ChaCha8Rng, lo: &[f64], hi: &[f64], j: usize, s: usize) -> Vec<Vec<f64>> {
    let n = lo.len();
    (0..j)
        .map(|_| {
            let mut u = vec![0.0; n];
            if s % 4 < 2 {
                let a = rng.gen_range(0..n);
                u[a] = 1.0;
            } else {
                for x in u.iter_mut() {
                    *x = rng.gen_range(-1.0..1.0);
                }
            }
            let len = u.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
            let r = 10f64.powf(-3.0 * rng.gen::<f64>()) / j as f64;
            let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            u.iter().enumerate().map(|(i, x)| sign * x / len * r * (hi[i] - lo[i]).max(f64::MIN_POSITIVE)).collect()
        })
        .collect()
}

fn random_unit_simple(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Element {
    loop {
        let edges: Vec<Vec<f64>> = (0..k).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        if let Ok(a) = Element::simple(n, &edges) {
            let m = a.mass();
            if m > 1e-6 {
                return a.scale(1.0 / m);
            }
        }
    }
}

/// Sampled lower estimate of `|ω|^♮r = max{‖ω‖₀..‖ω‖_r, ‖dω‖₀..‖dω‖_{r−1}}`.
pub fn natural_norm_estimate(w: &FormJet, lo: &[f64], hi: &[f64], r: usize, budget: usize, seed: u64) -> Result<f64> {
    let mut best = 0.0f64;
    for j in 0..=r {
        best = best.max(form_norm_estimate(w, lo, hi, j, budget, seed)?);
    }
    if w.grade() < w.dim() {
        let dw = w.d();
        for j in 0..r {
            best = best.max(form_norm_estimate(&dw, lo, hi, j, budget, seed)?);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::Coelement;
    use crate::forms::poly::{Poly, PolyForm};

    #[test]
    fn constant_forms() {
        let dx = FormJet::constant(Coelement::dx(2, 0));
        let e0 = form_norm_estimate(&dx, &[0.0, 0.0], &[1.0, 1.0], 0, 200, 1).unwrap();
        assert!((e0 - 1.0).abs() < 1e-12);
        assert_eq!(form_norm_estimate(&dx, &[0.0, 0.0], &[1.0, 1.0], 1, 200, 1).unwrap(), 0.0);
    }

    #[test]
    fn x_dx_first_difference() {
        let w = FormJet::from_poly(PolyForm::term(MultiIndex::full(1), Poly::var(1, 0)));
        let e = form_norm_estimate(&w, &[0.0], &[1.0], 1, 1000, 7).unwrap();
        assert!((e - 1.0).abs() < 0.05, "{e}");
        assert!(e <= 1.0 + 1e-9);
    }

    #[test]
    fn monotone_in_budget() {
        let w = FormJet::from_poly(
            PolyForm::term(MultiIndex::new(2, vec![0]).unwrap(), Poly::monomial(vec![1, 1], 1.0))
                .add(&PolyForm::term(MultiIndex::new(2, vec![1]).unwrap(), Poly::var(2, 0)))
                .unwrap(),
        );
        let mut last = 0.0;
        for b in [1, 5, 20, 100, 400] {
            let e = form_norm_estimate(&w, &[0.0, 0.0], &[1.0, 1.0], 0, b, 3).unwrap();
            assert!(e >= last);
            last = e;
        }
    }
}
