use chainlet::lab::{
    build_cantor, build_koch, koch_bumps, koch_region, koch_vertices, pixel_area, run_experiment, Params, EXPERIMENTS,
    SNOWFLAKE_AREA,
};
use chainlet::Error;
use proptest::prelude::*;

fn shoelace(pts: &[Vec<f64>]) -> f64 {
    let m = pts.len();
    0.5 * (0..m).map(|i| pts[i][0] * pts[(i + 1) % m][1] - pts[(i + 1) % m][0] * pts[i][1]).sum::<f64>()
}

fn params(depth: usize) -> Params {
    Params { depth: Some(depth), ..Params::default() }
}

#[test]
fn koch_first_depths() {
    let k0 = build_koch(0).unwrap();
    assert_eq!(k0.boundary.len(), 3);
    assert!((k0.boundary.mass() - 3.0).abs() < 1e-15);
    assert!(k0.boundary.boundary().is_empty());
    let k1 = build_koch(1).unwrap();
    assert_eq!(k1.boundary.len(), 12);
    assert!((k1.boundary.mass() - 4.0).abs() < 1e-14);
    assert!((shoelace(&koch_vertices(0)) - 3f64.sqrt() / 4.0).abs() < 1e-15);
    assert!(build_koch(11).is_err());
}

#[test]
fn koch_areas_approach_the_snowflake() {
    let mut prev = 0.0;
    for d in 0..7 {
        let area = shoelace(&koch_vertices(d));
        assert!((koch_region(d).unwrap().mass() - area).abs() < 1e-12, "depth {d}");
        assert_eq!(koch_bumps(d).unwrap().len(), 3 * 4usize.pow(d as u32));
        assert!(area > prev && area < SNOWFLAKE_AREA);
        prev = area;
    }
    // the remaining area after depth d is (√3/4)(3/5)(4/9)^d
    let tail = 3f64.sqrt() / 4.0 * 0.6 * (4.0f64 / 9.0).powi(6);
    assert!((SNOWFLAKE_AREA - prev - tail).abs() < 1e-12);
    let grid = pixel_area(&koch_vertices(2).iter().map(|p| [p[0], p[1]]).collect::<Vec<_>>(), 1024);
    assert!((grid - shoelace(&koch_vertices(2))).abs() < 5e-3);
}

#[test]
fn cantor_first_stages() {
    let c0 = build_cantor(0).unwrap();
    assert_eq!((c0.chain.len(), c0.boundary.len()), (1, 2));
    assert_eq!(c0.exact_boundary_integral(), (1, 1));
    let c1 = build_cantor(1).unwrap();
    assert_eq!(c1.numerators, vec![0, 2]);
    assert_eq!(c1.exact_boundary_integral(), (2, 3));
    assert!((c1.chain.mass() - 2.0 / 3.0).abs() < 1e-15);
    assert!(build_cantor(21).is_err());
}

#[test]
fn staircase_experiment_halves() {
    let r = run_experiment("staircase", &params(8)).unwrap();
    assert!(r.verdict.pass, "{:?}", r.verdict);
    let upper = r.table.col("upper");
    assert_eq!(upper.len(), 9);
    assert_eq!(upper[0], 0.5);
    assert!(upper.windows(2).all(|w| w[1] == w[0] / 2.0));
}

#[test]
fn stokes_koch_increments_shrink_by_four_ninths() {
    let r = run_experiment("stokes-koch", &params(5)).unwrap();
    assert!(r.verdict.pass, "{:?}", r.verdict);
    let inc = r.table.col("increment");
    for w in inc.windows(2) {
        assert!((w[1] / w[0] - 4.0 / 9.0).abs() < 1e-9);
    }
    let line = r.table.col("line_integral");
    for (d, l) in line.iter().enumerate() {
        assert!((l - shoelace(&koch_vertices(d + 1))).abs() < 1e-12);
    }
}

#[test]
fn report_shapes() {
    let r = run_experiment("dipole", &params(4)).unwrap();
    let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
    for key in ["name", "params", "rows", "verdict", "version"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["name"], "dipole");
    assert_eq!(v["params"]["depth"], 4);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0]["i"], 0);
    // the first ratio is undefined and serializes as null
    assert!(rows[0]["ratio"].is_null());
    assert_eq!(v["verdict"]["pass"], true);
    let csv = r.to_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], r.table.columns.join(","));
    assert_eq!(lines.len(), 6);
    assert!(lines[1..].iter().all(|l| l.split(',').count() == r.table.columns.len()));
}

#[test]
fn runs_are_deterministic_and_verdicts_recompute() {
    for name in EXPERIMENTS {
        let p = Params { depth: Some(if name == "scaling" { 12 } else { 3 }), seed: 7, ..Params::default() };
        let a = run_experiment(name, &p).unwrap();
        let b = run_experiment(name, &p).unwrap();
        assert_eq!(a.to_json(), b.to_json(), "{name}");
        assert_eq!(a.recompute_verdict(), a.verdict, "{name}");
    }
    let other = Params { depth: Some(12), seed: 8, ..Params::default() };
    let a = run_experiment("scaling", &Params { seed: 7, ..other.clone() }).unwrap();
    assert_ne!(a.to_json(), run_experiment("scaling", &other).unwrap().to_json());
}

#[test]
fn unknown_experiment_lists_names() {
    let err = run_experiment("nosuch", &Params::default()).unwrap_err();
    assert!(matches!(err, Error::Invalid(_)));
    let msg = err.to_string();
    assert!(EXPERIMENTS.iter().all(|n| msg.contains(n)), "{msg}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn cantor_numerators_use_digits_zero_and_two(k in 0usize..12) {
        let c = build_cantor(k).unwrap();
        prop_assert_eq!(c.numerators.len(), 1usize << k);
        prop_assert_eq!(c.exact_boundary_integral(), (1u64 << k, 3u64.pow(k as u32)));
        for &a in &c.numerators {
            let mut x = a;
            for _ in 0..k {
                prop_assert!(x % 3 != 1);
                x /= 3;
            }
        }
        prop_assert!((c.chain.mass() - (2.0f64 / 3.0).powi(k as i32)).abs() < 1e-12);
    }

    #[test]
    fn koch_boundary_is_closed_and_grows_by_four_thirds(d in 0usize..6) {
        let k = build_koch(d).unwrap();
        prop_assert!(k.boundary.boundary().is_empty());
        prop_assert!((k.boundary.mass() - 3.0 * (4.0f64 / 3.0).powi(d as i32)).abs() < 1e-11);
        prop_assert!(koch_region(d).unwrap().boundary().equivalence_residual(&k.boundary).unwrap().is_empty());
    }
}
