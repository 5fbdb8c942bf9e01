use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chains::{element_approximation, Cell, PolyChain, Region, WhitneyDecomposition};
use crate::error::{Error, Result};
use crate::exterior::MultiIndex;
use crate::forms::{
    integrate_element_chain, integrate_poly_chain, quantize_form, stokes_residual, Domain, FormJet, Mode, Poly,
    PolyForm, DEFAULT_DEGREE,
};
use crate::norms::{
    clamped_x_dy, dipole_sequence, lower_bound, scaling_check, staircase_decomposition, translation_decomposition,
    Decomposition,
};

use super::cantor::build_cantor;
use super::koch::{build_koch, koch_bump_mass, koch_cauchy_bound, koch_region};
use super::pixel::pixel_area;
use super::report::{Check, ExperimentReport, Num, Params, Table, Verdict};

/// Names accepted by [`run_experiment`].
pub const EXPERIMENTS: [&str; 8] =
    ["whitney-koch", "stokes-koch", "cantor-boundary", "staircase", "dipole", "quantize", "element-approx", "scaling"];

/// Snowflake depth whose polygon stands in for the snowflake in the Whitney experiment.
pub const WHITNEY_KOCH_POLYGON_DEPTH: usize = 6;

/// Pixel grid of the area oracle.
pub const PIXEL_RESOLUTION: usize = 4096;

const CSV_STOKES_TOL: f64 = 1e-9;

fn defaults(name: &str, p: &Params) -> Params {
    let (depth, tol) = match name {
        "whitney-koch" => (8, 0.02),
        "stokes-koch" => (6, 1e-9),
        "cantor-boundary" => (15, 1e-12),
        "staircase" => (12, 1e-10),
        "dipole" => (10, 0.1),
        "quantize" => (8, 0.2),
        "element-approx" => (6, 1e-4),
        _ => (50, 1e-9),
    };
    Params { depth: Some(p.depth.unwrap_or(depth)), r: p.r, seed: p.seed, tol: Some(p.tol.unwrap_or(tol)) }
}

/// Runs a named experiment. Deterministic given `params`.
pub fn run_experiment(name: &str, params: &Params) -> Result<ExperimentReport> {
    if !EXPERIMENTS.contains(&name) {
        return Err(Error::Invalid(format!("unknown experiment `{name}`; valid names: {}", EXPERIMENTS.join(", "))));
    }
    let params = defaults(name, params);
    let depth = params.depth.expect("filled by defaults");
    let table = match name {
        "whitney-koch" => whitney_koch(depth)?,
        "stokes-koch" => stokes_koch(depth)?,
        "cantor-boundary" => cantor_boundary(depth)?,
        "staircase" => staircase(depth)?,
        "dipole" => dipole(depth)?,
        "quantize" => quantize(depth)?,
        "element-approx" => element_approx(depth)?,
        _ => scaling(depth, params.r, params.seed)?,
    };
    let verdict = evaluate(name, &params, &table);
    Ok(ExperimentReport {
        name: name.to_string(),
        params,
        table,
        verdict,
        version: env!("CARGO_PKG_VERSION").to_string(),
    })
}

fn check(name: &str, pass: bool, detail: String) -> Check {
    Check { name: name.to_string(), pass, detail }
}

fn max_of(xs: &[f64]) -> f64 {
    xs.iter().copied().fold(0.0, f64::max)
}

/// The acceptance rule of `name`, evaluated on the rows alone.
pub fn evaluate(name: &str, params: &Params, t: &Table) -> Verdict {
    let tol = params.tol.unwrap_or(0.0);
    let mut checks = Vec::new();
    if t.rows.is_empty() {
        return Verdict::new(vec![check("rows", false, "no rows".into())]);
    }
    match name {
        "whitney-koch" => {
            let mass = t.col("mass");
            let oracle = t.col("oracle_area")[0];
            let last = *mass.last().expect("non-empty");
            checks.push(check("mass non-decreasing", mass.windows(2).all(|w| w[1] >= w[0]), format!("{mass:?}")));
            let gap = (last - oracle).abs() / oracle;
            checks.push(check("final mass near oracle", gap <= tol, format!("relative gap {gap:.3e} (tol {tol})")));
            let res = max_of(&t.col("stokes_residual"));
            checks.push(check(
                "boundary integral equals area",
                res <= CSV_STOKES_TOL,
                format!("max residual {res:.3e}"),
            ));
            let bad = t.col("outside").iter().sum::<f64>() + t.col("overlaps").iter().sum::<f64>();
            checks.push(check("cubes inside and non-overlapping", bad == 0.0, format!("{bad} violations")));
        }
        "stokes-koch" => {
            let res = t.col("stokes_residual");
            let lhs = t.col("line_integral");
            let ok = res.iter().zip(&lhs).all(|(r, l)| *r <= tol * (1.0 + l.abs()));
            checks.push(check("Stokes residual", ok, format!("max {:.3e}", max_of(&res))));
            let ratios = t.col("mass_ratio");
            let worst = ratios.iter().map(|r| (r - 4.0 / 3.0).abs()).fold(0.0, f64::max);
            checks.push(check("mass ratio 4/3", worst <= 1e-12, format!("max deviation {worst:.3e}")));
            let (b, f) = (t.col("cauchy_bound"), t.col("bound_formula"));
            let worst = b.iter().zip(&f).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            checks.push(check("bound matches construction", worst <= 1e-12, format!("max deviation {worst:.3e}")));
            let ratio = t.col("increment_ratio");
            let worst = ratio.iter().skip(1).map(|r| (r - 4.0 / 9.0).abs()).fold(0.0, f64::max);
            checks.push(check("Cauchy ratio 4/9", worst <= 1e-6, format!("max deviation {worst:.3e}")));
        }
        "cantor-boundary" => {
            let (k, num, den) = (t.col("k"), t.col("exact_numerator"), t.col("exact_denominator"));
            let exact = k
                .iter()
                .zip(num.iter().zip(&den))
                .all(|(k, (n, d))| *n == 2f64.powi(*k as i32) && *d == 3f64.powi(*k as i32));
            checks.push(check("exact telescoping (2/3)^k", exact, "integer numerators".into()));
            let (v, e) = (t.col("integral"), t.col("expected"));
            let worst = v.iter().zip(&e).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            checks.push(check("floating integral", worst <= tol, format!("max deviation {worst:.3e}")));
        }
        "staircase" => {
            let (u, e) = (t.col("upper"), t.col("expected"));
            checks.push(check("upper bound 2^(-i-1)", u == e, format!("{u:?}")));
            let worst = t.col("mass_difference").iter().map(|m| (m - (2.0 + 2f64.sqrt())).abs()).fold(0.0, f64::max);
            checks.push(check("mass stays 2+√2", worst <= tol, format!("max deviation {worst:.3e}")));
            let ok = t.col("lower").iter().zip(&u).all(|(l, u)| *l <= u * (1.0 + 1e-12));
            checks.push(check("lower ≤ upper", ok, String::new()));
        }
        "dipole" => {
            let mass_ok = t.col("mass").iter().all(|m| *m == 1.0);
            checks.push(check("M(P_i) = 1", mass_ok, String::new()));
            let ratios = t.col("ratio");
            let worst = ratios.iter().skip(1).map(|r| (r - 0.5).abs() / 0.5).fold(0.0, f64::max);
            checks.push(check("bound halves", worst <= tol, format!("max relative deviation {worst:.3e}")));
            let vec_ok = t.col("vec_e12").iter().all(|v| *v == 1.0);
            checks.push(check("Vec(P_i) = e12", vec_ok, String::new()));
        }
        "quantize" => {
            let ratios = t.col("ratio");
            let worst = ratios.iter().skip(1).map(|r| (r - 0.5).abs() / 0.5).fold(0.0, f64::max);
            checks.push(check(
                "first-order decay (ratio 1/2)",
                worst <= tol,
                format!("observed ratios {:?}", &ratios[1..]),
            ));
        }
        "element-approx" => {
            let err = t.col("error");
            let dec = err.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9) || w[1] < 1e-14);
            checks.push(check("error non-increasing", dec, format!("{err:?}")));
            let last = *err.last().expect("non-empty");
            checks.push(check("final error", last <= tol, format!("{last:.3e} (tol {tol})")));
            let v = max_of(&t.col("vec_residual"));
            checks.push(check("Vec preserved", v <= 1e-12, format!("{v:.3e}")));
        }
        _ => {
            let fails = t.col("pass").iter().filter(|p| **p != 1.0).count();
            checks.push(check("scaling inequality", fails == 0, format!("{fails} failures")));
        }
    }
    Verdict::new(checks)
}

fn whitney_koch(stages: usize) -> Result<Table> {
    let koch = build_koch(WHITNEY_KOCH_POLYGON_DEPTH)?;
    let (lo, hi) = koch.boundary.bbox().expect("non-empty polygon");
    let w = WhitneyDecomposition::build(&koch.polygon, &lo, &hi, stages);
    let oracle = pixel_area(koch.polygon.vertices(), PIXEL_RESOLUTION);
    let overlaps = usize::from(!w.non_overlapping());
    let x_dy = x_dy();
    let mut t = Table::new(&[
        "stage",
        "cubes",
        "edge",
        "mass",
        "boundary_integral",
        "stokes_residual",
        "oracle_area",
        "outside",
        "overlaps",
    ]);
    for s in 1..=stages {
        let cells = w.stage_cells(s);
        let outside = cells
            .iter()
            .filter(|c| {
                let (a, b) = c.bbox();
                !koch.polygon.contains_box(&a, &b)
            })
            .count();
        let r = w.chain(s);
        let boundary_integral = integrate_poly_chain(&r.boundary(), &x_dy, 2)?;
        let mass = r.mass();
        t.push(vec![
            s.into(),
            cells.len().into(),
            w.edge(s).unwrap_or(f64::NAN).into(),
            mass.into(),
            boundary_integral.into(),
            (boundary_integral - mass).abs().into(),
            oracle.into(),
            outside.into(),
            overlaps.into(),
        ]);
    }
    Ok(t)
}

fn x_dy() -> FormJet {
    FormJet::from_poly(PolyForm::term(MultiIndex::from_sorted(vec![1]), Poly::var(2, 0))).with_name("x dy")
}

fn stokes_koch(depth: usize) -> Result<Table> {
    let w = x_dy();
    let mut t = Table::new(&[
        "depth",
        "edges",
        "mass",
        "mass_ratio",
        "line_integral",
        "area",
        "stokes_residual",
        "cauchy_bound",
        "bound_formula",
        "increment",
        "increment_ratio",
    ]);
    let mut prev: Option<f64> = None;
    let first = build_koch(0)?;
    let mut last_mass = first.boundary.mass();
    let mut last_line = integrate_poly_chain(&first.boundary, &w, DEFAULT_DEGREE)?;
    for d in 1..=depth {
        let k = build_koch(d)?;
        let region = koch_region(d)?;
        let res = stokes_residual(Domain::Poly(&region), &w, Mode::Stokes, DEFAULT_DEGREE)?;
        let line = integrate_poly_chain(&k.boundary, &w, DEFAULT_DEGREE)?;
        let mass = k.boundary.mass();
        let (_, bound) = koch_cauchy_bound(d)?;
        let increment = line - last_line;
        let ratio = prev.map_or(f64::NAN, |inc| increment / inc);
        t.push(vec![
            d.into(),
            k.boundary.len().into(),
            mass.into(),
            (mass / last_mass).into(),
            line.into(),
            res.rhs.into(),
            res.residual.into(),
            bound.value.into(),
            koch_bump_mass(d).into(),
            increment.into(),
            ratio.into(),
        ]);
        prev = Some(increment);
        last_mass = mass;
        last_line = line;
    }
    Ok(t)
}

fn cantor_boundary(depth: usize) -> Result<Table> {
    let f = FormJet::from_poly(PolyForm::term(MultiIndex::empty(), Poly::var(1, 0)));
    let mut t = Table::new(&[
        "k",
        "segments",
        "mass",
        "boundary_points",
        "integral",
        "exact_numerator",
        "exact_denominator",
        "expected",
    ]);
    for k in 0..=depth {
        let c = build_cantor(k)?;
        let integral = integrate_poly_chain(&c.boundary, &f, 0)?;
        let (num, den) = c.exact_boundary_integral();
        t.push(vec![
            k.into(),
            c.chain.len().into(),
            c.chain.mass().into(),
            c.boundary.len().into(),
            integral.into(),
            Num::Int(num as i64),
            Num::Int(den as i64),
            (2.0f64 / 3.0).powi(k as i32).into(),
        ]);
    }
    Ok(t)
}

fn staircase(depth: usize) -> Result<Table> {
    let form = clamped_x_dy();
    let mut t = Table::new(&["i", "upper", "expected", "lower", "mass_difference"]);
    for i in 0..=depth {
        let s = staircase_decomposition(i)?;
        let lower = lower_bound(Domain::Poly(&s.difference), &form, 1.0, 1, false)?;
        t.push(vec![
            i.into(),
            s.bound.value.into(),
            0.5f64.powi(i as i32 + 1).into(),
            lower.value.into(),
            s.difference.mass().into(),
        ]);
    }
    Ok(t)
}

fn dipole(depth: usize) -> Result<Table> {
    let mut t = Table::new(&["i", "mass", "bound", "ratio", "vec_e12"]);
    let mut prev: Option<f64> = None;
    for i in 0..=depth {
        let d = dipole_sequence(i)?;
        let ratio = prev.map_or(f64::NAN, |b| d.bound.value / b);
        t.push(vec![
            i.into(),
            d.chain.mass().into(),
            d.bound.value.into(),
            ratio.into(),
            d.chain.vec().coeff(&MultiIndex::full(2)).into(),
        ]);
        prev = Some(d.bound.value);
    }
    Ok(t)
}

/// `ω = (x + y²) dx + xy dy` and `η = x² dx + (1 + y) dy` on the unit square.
pub fn quantize_forms() -> (PolyForm, PolyForm) {
    let dx = MultiIndex::from_sorted(vec![0]);
    let dy = MultiIndex::from_sorted(vec![1]);
    let w = PolyForm::new(
        2,
        1,
        [
            (dx.clone(), Poly::var(2, 0).add(&Poly::monomial(vec![0, 2], 1.0))),
            (dy.clone(), Poly::monomial(vec![1, 1], 1.0)),
        ],
    )
    .expect("valid form");
    let eta = PolyForm::new(
        2,
        1,
        [(dx, Poly::monomial(vec![2, 0], 1.0)), (dy, Poly::constant(2, 1.0).add(&Poly::var(2, 1)))],
    )
    .expect("valid form");
    (w, eta)
}

fn quantize(depth: usize) -> Result<Table> {
    let (w, eta) = quantize_forms();
    let exact = eta.inner(&w)?.integrate_unit_cube();
    let (wj, ej) = (FormJet::from_poly(w), FormJet::from_poly(eta));
    let square = PolyChain::from_cell(Cell::cube(&[0.0, 0.0], 1.0));
    let mut t = Table::new(&["d", "cells", "pairing", "exact", "error", "ratio"]);
    let mut prev: Option<f64> = None;
    for d in 1..=depth {
        let ch = quantize_form(&wj, &square, d)?;
        let pairing = integrate_element_chain(&ch, &ej)?;
        let error = (pairing - exact).abs();
        let ratio = prev.map_or(f64::NAN, |e| error / e);
        t.push(vec![d.into(), ch.len().into(), pairing.into(), exact.into(), error.into(), ratio.into()]);
        prev = Some(error);
    }
    Ok(t)
}

fn element_approx(depth: usize) -> Result<Table> {
    let tri = Cell::simplex(vec![vec![0.0, 0.0], vec![1.0, 0.25], vec![0.25, 1.0]])?;
    let sq = Cell::cube(&[1.5, 0.0], 0.5);
    let p = PolyChain::new(2, 2, [(1.0, tri), (-2.0, sq)])?;
    let w = FormJet::from_poly(
        PolyForm::volume(2).mul_poly(&Poly::monomial(vec![2, 0], 1.0).add(&Poly::monomial(vec![1, 1], 1.0))),
    );
    let exact = integrate_poly_chain(&p, &w, DEFAULT_DEGREE)?;
    let vec_p = p.vec();
    let mut t = Table::new(&["d", "elements", "integral", "exact", "error", "vec_residual"]);
    for d in 0..=depth {
        let a = element_approximation(&p, d);
        let integral = integrate_element_chain(&a, &w)?;
        let vec_residual = a.total().max_abs_diff(&vec_p);
        t.push(vec![
            d.into(),
            a.len().into(),
            integral.into(),
            exact.into(),
            (integral - exact).abs().into(),
            vec_residual.into(),
        ]);
    }
    Ok(t)
}

/// A random chain with coordinates on the `1/16` lattice, so scaling by `m/16` stays exact.
pub fn random_dyadic_chain(rng: &mut impl Rng, n: usize, k: usize) -> PolyChain {
    let lattice = |rng: &mut dyn rand::RngCore, lo: i32, hi: i32| rng.gen_range(lo..=hi) as f64 / 16.0;
    loop {
        let cells: usize = rng.gen_range(1..=3);
        let mut items = Vec::new();
        for _ in 0..cells {
            let base: Vec<f64> = (0..n).map(|_| lattice(rng, -32, 32)).collect();
            let edges: Vec<Vec<f64>> = (0..k).map(|_| (0..n).map(|_| lattice(rng, -16, 16)).collect()).collect();
            let c: f64 = rng.gen_range(-4..=4) as f64 / 2.0;
            let cell = if rng.gen::<bool>() {
                Cell::parallelepiped(base, edges)
            } else {
                let mut pts = vec![base.clone()];
                pts.extend(edges.iter().map(|e| base.iter().zip(e).map(|(b, x)| b + x).collect()));
                Cell::simplex(pts)
            };
            if let (Ok(cell), true) = (cell, c != 0.0) {
                items.push((c, cell));
            }
        }
        if let Ok(p) = PolyChain::new(n, k, items) {
            if !p.is_empty() {
                return p;
            }
        }
    }
}

fn scaling(count: usize, r_param: Option<usize>, seed: u64) -> Result<Table> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Table::new(&[
        "index",
        "k",
        "r",
        "lambda",
        "upper",
        "scaled_upper",
        "allowed_factor",
        "observed_factor",
        "pass",
    ]);
    for index in 0..count {
        let n = rng.gen_range(1..=3);
        let k = rng.gen_range(0..=n);
        let r = r_param.unwrap_or_else(|| rng.gen_range(0..=3));
        let q = random_dyadic_chain(&mut rng, n, k);
        let lambda = rng.gen_range(1..=48) as f64 / 16.0;
        let (p, dec): (PolyChain, Decomposition) = if r > 0 && rng.gen::<bool>() {
            let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-16..=16) as f64 / 16.0).collect();
            (q.sub(&q.translate(&v))?, translation_decomposition(&q, &v, r)?)
        } else {
            (q.clone(), Decomposition::trivial(&q, r))
        };
        let rep = scaling_check(&p, &dec, lambda)?;
        t.push(vec![
            index.into(),
            k.into(),
            r.into(),
            lambda.into(),
            rep.upper.into(),
            rep.scaled_upper.into(),
            rep.allowed_factor.into(),
            rep.observed_factor.into(),
            rep.pass.into(),
        ]);
    }
    Ok(t)
}
