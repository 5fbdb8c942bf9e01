use chainlet::exterior::{derived_product, pair, DerivKey, Key, MultiIndex, ProductKind};
use chainlet::{Coelement, Element};
use nalgebra::DMatrix;
use proptest::prelude::*;
use proptest::sample::subsequence;

fn e(n: usize, dir: &[usize]) -> Element {
    Element::basis(n, MultiIndex::new(n, dir.to_vec()).unwrap())
}

fn dx(n: usize, dir: &[usize]) -> Coelement {
    Coelement::basis(n, MultiIndex::new(n, dir.to_vec()).unwrap())
}

fn grad(n: usize, deriv: &[usize], dir: &[usize]) -> Key {
    Key::new(DerivKey::new(n, deriv.to_vec()).unwrap(), MultiIndex::new(n, dir.to_vec()).unwrap())
}

fn sign(p: usize) -> f64 {
    if p.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

#[test]
fn simple_element_coordinates() {
    assert_eq!(Element::simple(2, &[[1.0, 0.0]]).unwrap(), e(2, &[0]));
    // det [[2, 0], [1, 1]] = 2
    let a = Element::simple(2, &[[2.0, 1.0], [0.0, 1.0]]).unwrap();
    assert_eq!(a.coeff(&MultiIndex::full(2)), 2.0);
    assert!(Element::simple(2, &[[1.0, 0.0], [1.0, 0.0]]).unwrap().is_zero());
}

#[test]
fn combine_is_multilinear() {
    let a = e(2, &[0]);
    assert!(Element::combine(&a, 1.0, &a, -1.0).unwrap().is_zero());
    let two = Element::combine(&a, 2.0, &e(2, &[1]), 0.0).unwrap();
    assert_eq!(two, Element::simple(2, &[[2.0, 0.0]]).unwrap());
    assert_eq!(Element::combine(&a, 1.0, &a, 1.0).unwrap().coeff(&MultiIndex::new(2, vec![0]).unwrap()), 2.0);
}

#[test]
fn wedge_inner_mass() {
    assert_eq!(e(2, &[0]).wedge(&e(2, &[1])).unwrap(), e(2, &[0, 1]));
    assert!(e(2, &[0]).wedge(&e(2, &[0])).unwrap().is_zero());
    assert_eq!(e(2, &[1]).wedge(&e(2, &[0])).unwrap(), e(2, &[0, 1]).scale(-1.0));
    assert_eq!(e(3, &[0, 2]).inner(&e(3, &[0, 2])).unwrap(), 1.0);
    assert_eq!(e(3, &[0, 2]).inner(&e(3, &[1, 2])).unwrap(), 0.0);
    let (a2, a3) = (Element::simple(1, &[[2.0]]).unwrap(), Element::simple(1, &[[3.0]]).unwrap());
    assert_eq!(a2.inner(&a3).unwrap(), 6.0);
    assert_eq!(Element::vol(4).mass(), 1.0);
    assert_eq!(Element::zero(3, 1).mass(), 0.0);
    assert_eq!(Element::simple(2, &[[3.0, 4.0]]).unwrap().mass(), 5.0);
}

#[test]
fn perp_examples() {
    assert_eq!(e(2, &[0]).perp(), e(2, &[1]));
    assert_eq!(Element::vol(3).perp(), Element::one(3));
    assert_eq!(e(4, &[0, 2]).perp().perp(), e(4, &[0, 2]));
}

#[test]
fn boundary_examples() {
    // ∂α(v) = Σ vᵢ ∇_{eᵢ} α⁰, the limit of (T_v pt − pt)
    let v = [0.5, -2.0];
    let b = Element::simple(2, &[v]).unwrap().boundary();
    let expect = Element::from_terms(2, 0, [(grad(2, &[0], &[]), 0.5), (grad(2, &[1], &[]), -2.0)]).unwrap();
    assert_eq!(b, expect);
    let sq = e(2, &[0, 1]).boundary();
    let expect = Element::from_terms(2, 1, [(grad(2, &[0], &[1]), 1.0), (grad(2, &[1], &[0]), -1.0)]).unwrap();
    assert_eq!(sq, expect);
    assert!(sq.boundary().is_zero());
}

#[test]
fn nabla_examples() {
    let a = e(2, &[1]);
    assert!(a.nabla(&[0.0, 0.0]).unwrap().is_zero());
    assert_eq!(a.nabla(&[2.0, 0.0]).unwrap(), a.nabla(&[1.0, 0.0]).unwrap().scale(2.0));
    let (u, w) = ([1.0, 0.0], [0.0, 1.0]);
    assert_eq!(a.nabla(&u).unwrap().nabla(&w).unwrap(), a.nabla(&w).unwrap().nabla(&u).unwrap());
}

#[test]
fn coboundary_and_laplace() {
    let c = Element::one(2).coboundary();
    assert_eq!((c.grade(), c.max_order()), (1, 1));
    assert!(c.coboundary().is_zero());
    // □ vol = ∂⋄vol + ⋄∂vol; ⋄vol = ⊥∂(1) = 0 and ∂vol has order one with ⋄ raising grade back
    let lap = Element::vol(2).laplace();
    let by_hand = Element::vol(2).boundary().coboundary();
    assert!(lap.max_abs_diff(&by_hand) < 1e-15);
}

#[test]
fn derived_products() {
    assert_eq!(derived_product(ProductKind::Cross, &e(3, &[0]), &e(3, &[1])).unwrap(), e(3, &[2]));
    let a = Element::simple(3, &[[1.0, 2.0, 0.5], [0.0, 1.0, -1.0]]).unwrap();
    let ii = derived_product(ProductKind::Interior, &a, &a).unwrap();
    assert_eq!(ii.grade(), 0);
    assert!((ii.coeff(&MultiIndex::empty()) - a.mass().powi(2)).abs() < 1e-12);
    let x = derived_product(ProductKind::Intersection, &e(3, &[0]), &e(3, &[0])).unwrap();
    assert!(x.is_zero());
}

#[test]
fn pairing_examples() {
    assert_eq!(pair(&dx(2, &[0]), &e(2, &[0])), 1.0);
    let g1 = Coelement::monomial(2, grad(2, &[0], &[0]), 1.0);
    assert_eq!(pair(&g1, &e(2, &[0])), 0.0);
    assert_eq!(pair(&dx(2, &[0, 1]).scale(2.0), &e(2, &[0, 1])), 2.0);
}

#[test]
fn d_and_star_examples() {
    // ψ dual to ∇_{e1}α⁰: dψ(α(e1)) = ψ(∇_{e1}α⁰) = 1
    let psi = Coelement::monomial(2, grad(2, &[0], &[]), 1.0);
    assert_eq!(pair(&psi.d(), &e(2, &[0])), 1.0);
    assert!(dx(2, &[0]).d().is_zero());
    // ★dx¹(α(e2)) = dx¹(⊥α(e2)) = dx¹(−α(e1))
    assert_eq!(dx(2, &[0]).star(), dx(2, &[1]).scale(-1.0));
    assert_eq!(dx(2, &[0]).star().star(), dx(2, &[0]).scale(-1.0));
    assert_eq!(Coelement::vol(3).star(), Coelement::one(3));
}

#[test]
fn linear_pullback_examples() {
    let g = dx(2, &[0]).add(&dx(2, &[1]).scale(3.0)).unwrap();
    assert_eq!(g.pullback_linear(&DMatrix::identity(2, 2)).unwrap(), g);
    let v = Element::simple(2, &[[0.3, -0.7]]).unwrap();
    let two = DMatrix::identity(2, 2) * 2.0;
    let lhs = pair(&g.pullback_linear(&two).unwrap(), &v);
    assert!((lhs - 2.0 * pair(&g, &v)).abs() < 1e-14);
    // f(x, y) = x − y, f*dt = dx − dy
    let f = DMatrix::from_row_slice(1, 2, &[1.0, -1.0]);
    let expect = dx(2, &[0]).sub(&dx(2, &[1])).unwrap();
    assert_eq!(dx(1, &[0]).pullback_linear(&f).unwrap(), expect);
}

fn arb_key(n: usize, k: usize, max_order: usize) -> impl Strategy<Value = Key> {
    (proptest::collection::vec(0..n, 0..=max_order), subsequence((0..n).collect::<Vec<_>>(), k))
        .prop_map(move |(u, h)| Key::new(DerivKey::new(n, u).unwrap(), MultiIndex::new(n, h).unwrap()))
}

fn arb_terms(n: usize, k: usize, max_order: usize) -> impl Strategy<Value = Vec<(Key, f64)>> {
    proptest::collection::vec((arb_key(n, k, max_order), -2.0..2.0f64), 1..5)
}

fn arb_element(n: usize, k: usize, max_order: usize) -> impl Strategy<Value = Element> {
    arb_terms(n, k, max_order).prop_map(move |t| Element::from_terms(n, k, t).unwrap())
}

fn arb_coelement(n: usize, k: usize, max_order: usize) -> impl Strategy<Value = Coelement> {
    arb_terms(n, k, max_order).prop_map(move |t| Coelement::from_terms(n, k, t).unwrap())
}

fn dim_grade() -> impl Strategy<Value = (usize, usize)> {
    (1usize..=5).prop_flat_map(|n| (Just(n), 0..=n))
}

fn edges(n: usize, k: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    proptest::collection::vec(proptest::collection::vec(-2.0..2.0f64, n), k)
}

proptest! {
    #[test]
    fn boundary_squares_to_zero(a in dim_grade().prop_flat_map(|(n, k)| arb_element(n, k, 2))) {
        prop_assert!(a.boundary().boundary().norm() < 1e-12);
    }

    #[test]
    fn coelement_d_squares_to_zero(g in dim_grade().prop_flat_map(|(n, k)| arb_coelement(n, k, 3))) {
        prop_assert!(g.d().d().norm() < 1e-12);
    }

    #[test]
    fn perp_twice_is_signed_identity(a in dim_grade().prop_flat_map(|(n, k)| arb_element(n, k, 2))) {
        let (n, k) = (a.dim(), a.grade());
        prop_assert!(a.perp().perp().max_abs_diff(&a.scale(sign(k * (n - k)))) < 1e-12);
    }

    #[test]
    fn star_is_adjoint_of_perp(
        (g, a) in dim_grade().prop_flat_map(|(n, k)| (arb_coelement(n, k, 1), arb_element(n, n - k, 1)))
    ) {
        prop_assert!((pair(&g.star(), &a) - pair(&g, &a.perp())).abs() < 1e-12);
    }

    #[test]
    fn d_is_adjoint_of_boundary(
        (g, a) in (1usize..=5).prop_flat_map(|n| (Just(n), 1..=n))
            .prop_flat_map(|(n, k)| (arb_coelement(n, k - 1, 2), arb_element(n, k, 1)))
    ) {
        prop_assert!((pair(&g.d(), &a) - pair(&g, &a.boundary())).abs() < 1e-12);
    }

    #[test]
    fn wedge_laws(
        (a, b, c) in (1usize..=5)
            .prop_flat_map(|n| (Just(n), 0..=n, 0..=n, 0..=n))
            .prop_flat_map(|(n, ka, kb, kc)| (arb_element(n, ka, 1), arb_element(n, kb, 1), arb_element(n, kc, 1)))
    ) {
        let (ka, kb) = (a.grade(), b.grade());
        let ab = a.wedge(&b).unwrap();
        prop_assert!(ab.max_abs_diff(&b.wedge(&a).unwrap().scale(sign(ka * kb))) < 1e-12);
        let left = ab.wedge(&c).unwrap();
        let right = a.wedge(&b.wedge(&c).unwrap()).unwrap();
        prop_assert!(left.max_abs_diff(&right) < 1e-12);
        if ka > 0 && kb > 0 && ka + kb <= a.dim() {
            let rhs = a.boundary().wedge(&b).unwrap().add(&a.wedge(&b.boundary()).unwrap().scale(sign(ka))).unwrap();
            prop_assert!(ab.boundary().max_abs_diff(&rhs) < 1e-12);
        }
    }

    #[test]
    fn simple_mass_is_gram_volume((n, v) in dim_grade().prop_flat_map(|(n, k)| (Just(n), edges(n, k)))) {
        let a = Element::simple(n, &v).unwrap();
        let k = v.len();
        let m = DMatrix::from_fn(n, k, |i, j| v[j][i]);
        let gram = (m.transpose() * &m).determinant();
        prop_assert!((a.mass().powi(2) - gram).abs() < 1e-9 * (1.0 + gram.abs()));
    }

    #[test]
    fn linear_push_of_simple_element((n, v, l) in dim_grade()
        .prop_flat_map(|(n, k)| (Just(n), edges(n, k), proptest::collection::vec(-2.0..2.0f64, n * n))))
    {
        let l = DMatrix::from_row_slice(n, n, &l);
        let a = Element::simple(n, &v).unwrap();
        let lv: Vec<Vec<f64>> = v.iter().map(|x| (&l * nalgebra::DVector::from_column_slice(x)).iter().copied().collect()).collect();
        let expect = Element::simple(n, &lv).unwrap();
        prop_assert!(a.push_linear(&l).unwrap().max_abs_diff(&expect) < 1e-9);
    }

    #[test]
    fn pullback_is_dual_to_push(
        (g, a, l) in (1usize..=4).prop_flat_map(|n| (Just(n), 0..=n)).prop_flat_map(|(n, k)| {
            (arb_coelement(n, k, 1), arb_element(n, k, 1), proptest::collection::vec(-2.0..2.0f64, n * n))
        })
    ) {
        let n = g.dim();
        let l = DMatrix::from_row_slice(n, n, &l);
        let lhs = pair(&g.pullback_linear(&l).unwrap(), &a);
        let rhs = pair(&g, &a.push_linear(&l).unwrap());
        prop_assert!((lhs - rhs).abs() < 1e-9 * (1.0 + lhs.abs()));
    }
}
