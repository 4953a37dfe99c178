//! wasm-bindgen bindings used by `www/index.html`. Results cross the
//! boundary as JSON strings.

use pareto_tour::concave::{concave_demo, ConcaveConfig};
use pareto_tour::instances::gen_euclidean;
use pareto_tour::metrics::{hv_exact_2d, reference_point, ReferencePoint};
use pareto_tour::search::{solve_front, SearchConfig};
use pareto_tour::{generate_preferences, BtspInstance, ObjectiveVector, RngSeed};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn js_err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

/// Concave test problem: `k` decomposition points and `weights` linear
/// scalarization points, as an array of CSV-shaped row objects.
#[wasm_bindgen(js_name = concaveFront)]
pub fn concave_front(k: usize, weights: usize) -> Result<String, JsError> {
    let rows = concave_demo(k, weights, &ConcaveConfig::default()).map_err(js_err)?;
    serde_json::to_string(&rows).map_err(js_err)
}

/// Random Euclidean instance with `n` cities, solved for `prefs` preferences.
/// Returns `{coords, front: [{tour, f1, f2}], hv_pct, ref}`.
#[wasm_bindgen(js_name = solveRandom)]
pub fn solve_random(n: usize, prefs: usize, inner_moves: usize, seed: u64) -> Result<String, JsError> {
    let e = gen_euclidean(n, RngSeed(seed)).map_err(js_err)?;
    let coords = serde_json::to_value(&e).map_err(js_err)?;
    let inst = BtspInstance::from(e);
    let cfg = SearchConfig { inner_moves, seed: RngSeed(seed), ..SearchConfig::default() };
    let prefs = generate_preferences(prefs).map_err(js_err)?;
    let archive = solve_front(&inst, &prefs, &cfg).map_err(js_err)?;
    let r = reference_point(n);
    let out = json!({
        "coords": coords["coords"],
        "front": archive,
        "hv_pct": hv_exact_2d(&archive.objectives(), &r),
        "ref": [r.r1, r.r2],
    });
    Ok(out.to_string())
}

/// Exact hypervolume percentage of `[f1, f2, f1, f2, ...]` against `(r1, r2)`.
#[wasm_bindgen]
pub fn hypervolume(flat: &[f64], r1: f64, r2: f64) -> Result<f64, JsError> {
    if flat.len() % 2 != 0 {
        return Err(JsError::new("odd number of coordinates"));
    }
    let r = ReferencePoint::new(r1, r2).map_err(js_err)?;
    let points: Vec<_> = flat.chunks(2).map(|p| ObjectiveVector::new(p[0], p[1])).collect();
    Ok(hv_exact_2d(&points, &r))
}
