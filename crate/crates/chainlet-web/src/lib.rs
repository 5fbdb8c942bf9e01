//! Browser bindings for three interactive views: the snowflake with its Whitney
//! squares, the staircase approaching the diagonal, and a Stokes-family check
//! on user-supplied JSON. Every export returns a JSON string.

use chainlet::chains::{Cell, WhitneyDecomposition};
use chainlet::forms::{stokes_residual, Domain, FormJet, Mode, PolyForm, DEFAULT_DEGREE};
use chainlet::lab::{build_koch, pixel_area};
use chainlet::norms::{clamped_x_dy, lower_bound, staircase_decomposition};
use chainlet::{ElementChain, PolyChain};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Deepest snowflake the page may request.
pub const MAX_DEMO_KOCH_DEPTH: usize = 6;
/// Deepest Whitney stage the page may request.
pub const MAX_DEMO_STAGES: usize = 8;
/// Deepest staircase the page may request.
pub const MAX_DEMO_STAIRCASE: usize = 12;

const ORACLE_RESOLUTION: usize = 1024;

fn cell_box(c: &Cell) -> Value {
    let (lo, hi) = c.bbox();
    json!([lo[0], lo[1], hi[0] - lo[0]])
}

/// Snowflake polygon of `depth` and its Whitney squares through `stages`.
pub fn koch_whitney_json(depth: usize, stages: usize) -> Result<String, String> {
    if depth > MAX_DEMO_KOCH_DEPTH || stages > MAX_DEMO_STAGES {
        return Err(format!("depth ≤ {MAX_DEMO_KOCH_DEPTH} and stages ≤ {MAX_DEMO_STAGES}"));
    }
    let koch = build_koch(depth).map_err(|e| e.to_string())?;
    let (lo, hi) = koch.boundary.bbox().ok_or("empty polygon")?;
    let w = WhitneyDecomposition::build(&koch.polygon, &lo, &hi, stages);
    let rows: Vec<Value> = (0..=stages)
        .map(|s| {
            let cells = w.stage_cells(s);
            json!({
                "stage": s,
                "edge": w.edge(s),
                "mass": w.chain(s).mass(),
                "squares": cells.iter().map(cell_box).collect::<Vec<_>>(),
            })
        })
        .collect();
    Ok(json!({
        "depth": depth,
        "vertices": koch.polygon.vertices(),
        "perimeter": koch.boundary.mass(),
        "area": koch.polygon.area(),
        "pixel_area": pixel_area(koch.polygon.vertices(), ORACLE_RESOLUTION),
        "stages": rows,
    })
    .to_string())
}

/// The staircase with `2^i` steps, its vertices and the two certified bounds.
pub fn staircase_json(i: usize) -> Result<String, String> {
    if i > MAX_DEMO_STAIRCASE {
        return Err(format!("i ≤ {MAX_DEMO_STAIRCASE}"));
    }
    let s = staircase_decomposition(i).map_err(|e| e.to_string())?;
    let lower = lower_bound(Domain::Poly(&s.difference), &clamped_x_dy(), 1.0, 1, false).map_err(|e| e.to_string())?;
    let m = 1usize << i;
    let x = |k: usize| k as f64 / m as f64;
    let path: Vec<[f64; 2]> =
        std::iter::once([0.0, 0.0]).chain((0..m).flat_map(|k| [[x(k + 1), x(k)], [x(k + 1), x(k + 1)]])).collect();
    Ok(json!({
        "i": i,
        "path": path,
        "mass_difference": s.difference.mass(),
        "upper": s.bound.value,
        "lower": lower.value,
    })
    .to_string())
}

enum AnyChain {
    Poly(PolyChain),
    Elements(ElementChain),
}

fn parse_chain(text: &str) -> Result<AnyChain, String> {
    let v: Value = serde_json::from_str(text).map_err(|e| format!("chain:{}:{}: {e}", e.line(), e.column()))?;
    if v.get("terms").is_some() {
        serde_json::from_value(v).map(AnyChain::Poly).map_err(|e| format!("chain: {e}"))
    } else if v.get("entries").is_some() {
        serde_json::from_value(v).map(AnyChain::Elements).map_err(|e| format!("chain: {e}"))
    } else {
        Err("chain: expected `terms` or `entries`".into())
    }
}

/// Both sides of the identity `mode` for a chain and a polynomial form given as JSON.
pub fn stokes_check_json(chain: &str, form: &str, mode: &str) -> Result<String, String> {
    let mode: Mode = mode.parse().map_err(|e: chainlet::Error| e.to_string())?;
    let form: PolyForm = serde_json::from_str(form).map_err(|e| format!("form:{}:{}: {e}", e.line(), e.column()))?;
    let w = FormJet::from_poly(form);
    let res = match parse_chain(chain)? {
        AnyChain::Poly(p) => stokes_residual(Domain::Poly(&p), &w, mode, DEFAULT_DEGREE),
        AnyChain::Elements(a) => stokes_residual(Domain::Elements(&a), &w, mode, DEFAULT_DEGREE),
    }
    .map_err(|e| e.to_string())?;
    serde_json::to_string(&res).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn koch_whitney(depth: usize, stages: usize) -> Result<String, JsError> {
    koch_whitney_json(depth, stages).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn staircase(i: usize) -> Result<String, JsError> {
    staircase_json(i).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn stokes_check(chain: &str, form: &str, mode: &str) -> Result<String, JsError> {
    stokes_check_json(chain, form, mode).map_err(|e| JsError::new(&e))
}
