//! WebAssembly bindings for the boostlab demo page. Every function returns a
//! JSON string; errors surface as JS exceptions carrying a message.

pub mod demo;
pub mod toy;

use serde::Serialize;
use wasm_bindgen::prelude::*;

fn to_json<T: Serialize>(r: Result<T, String>) -> Result<String, JsError> {
    let value = r.map_err(|e| JsError::new(&e))?;
    serde_json::to_string(&value).map_err(|e| JsError::new(&e.to_string()))
}

/// Fits standard AdaBoost, DWA and (for two classes) gradient boosting on a
/// toy dataset; returns learning curves and decision regions.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn compare(
    dataset: &str,
    n: u32,
    spread: f64,
    flip: f64,
    rounds: u32,
    base: &str,
    cap_scale: f64,
    seed: u32,
) -> Result<String, JsError> {
    to_json(demo::compare(&demo::CompareRequest {
        dataset,
        n: n as usize,
        spread,
        flip,
        rounds: rounds as usize,
        base,
        cap_scale,
        seed: u64::from(seed),
    }))
}

/// One reweighting step under the indicator and dynamic rules.
#[wasm_bindgen(js_name = weightStep)]
pub fn weight_step(weights: &[f64], p_true: &[f64], cap_scale: f64) -> Result<String, JsError> {
    to_json(demo::weight_step(weights, p_true, cap_scale))
}

#[wasm_bindgen(js_name = alphaCurve)]
pub fn alpha_curve(n_classes: u32, samples: u32) -> Result<String, JsError> {
    to_json(demo::alpha_curve(n_classes as usize, samples as usize))
}
