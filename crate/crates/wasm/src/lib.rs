//! Browser bindings. Each exported function takes plain numbers and returns a JSON
//! string; the computations live in [`demo`] so they can be tested natively.

pub mod demo;

use wasm_bindgen::prelude::*;

fn to_js<T: serde::Serialize>(r: qlm_core::Result<T>) -> Result<String, JsError> {
    let v = r.map_err(|e| JsError::new(&e.to_string()))?;
    serde_json::to_string(&v).map_err(|e| JsError::new(&e.to_string()))
}

/// Theta and the Bartnik bound as functions of `tau` for a bump of height `eps`.
#[wasm_bindgen(js_name = boundCurve)]
pub fn bound_curve(eps: f64, tau_max: f64, samples: usize) -> Result<String, JsError> {
    to_js(demo::bound_curve(eps, tau_max, samples))
}

/// Slice radii, Hawking masses and scalar curvature along a collar with mass `-10^log_m`.
#[wasm_bindgen(js_name = collarProfile)]
pub fn collar_profile(eps: f64, tau: f64, log_m: f64, kappa: f64) -> Result<String, JsError> {
    to_js(demo::collar_profile(eps, tau, log_m, kappa))
}

/// Meridian of the isometric embedding and the Brown-York decomposition.
#[wasm_bindgen]
pub fn embedding(eps: f64, tau: f64) -> Result<String, JsError> {
    to_js(demo::embedding(eps, tau))
}
