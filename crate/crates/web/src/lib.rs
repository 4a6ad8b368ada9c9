//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Each export returns a JSON string; errors surface as thrown JS errors.

use wasm_bindgen::prelude::*;

pub mod ops;

fn js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

/// Exact `(j1 j2 j3; m1 m2 m3)`; arguments like `"1/2"` or `"-3"`.
#[wasm_bindgen]
pub fn wigner_3jm(j1: &str, j2: &str, j3: &str, m1: &str, m2: &str, m3: &str) -> Result<String, JsError> {
    js(ops::three_jm_json([j1, j2, j3, m1, m2, m3]))
}

/// Exact `{j1 j2 j3; j4 j5 j6}`.
#[wasm_bindgen]
pub fn wigner_6j(j1: &str, j2: &str, j3: &str, j4: &str, j5: &str, j6: &str) -> Result<String, JsError> {
    js(ops::six_j_json([j1, j2, j3, j4, j5, j6]))
}

/// Overlap table of the prime-dimension MUB construction.
#[wasm_bindgen]
pub fn mub_overlaps(d: usize) -> Result<String, JsError> {
    js(ops::mub_overlaps_json(d))
}

/// Covariant SIC search with a small restart budget.
#[wasm_bindgen]
pub fn sic_search(d: usize, seed: u32) -> Result<String, JsError> {
    js(ops::sic_search_json(d, u64::from(seed)))
}
