//! Browser front end for the superspace engine.
//!
//! The functions below return JSON strings so the page needs no glue beyond
//! `JSON.parse`. Each has a plain Rust twin that the native tests call.

use serde_json::{json, Value};
use superspace_core::lattice::{
    classical_discrete_evolve, classical_exact, kernel_rows, loglog_slope, Integrator, LatticeConfig, System,
};
use superspace_core::model::Model;
use superspace_core::reduction::{cpi_component_lagrangian, quantize, Verdict};
use superspace_core::superspace::third_order_term;
use superspace_core::Result;
use wasm_bindgen::prelude::*;

/// Superfields and `L(Φ)` for a model given as text.
pub fn expand_model(text: &str) -> Result<Value> {
    let model = Model::parse(text)?;
    let sa = model.super_action()?;
    let fields: Vec<Value> = sa
        .fields()
        .iter()
        .map(|f| json!({ "coord": f.coord().name(), "superfield": f.element().to_string() }))
        .collect();
    let body = sa.integrand().body();
    Ok(json!({
        "fields": fields,
        "lagrangian": sa.lagrangian().to_string(),
        "superspace_lagrangian": sa.integrand().to_string(),
        "body_matches": body == *sa.lagrangian(),
        "third_order_vanishes": third_order_term(sa.lagrangian(), sa.fields())?.is_zero(),
    }))
}

/// Component Lagrangian and quantized exponent.
pub fn quantize_model(text: &str) -> Result<Value> {
    let model = Model::parse(text)?;
    let sa = model.super_action()?;
    let q = quantize(&sa)?;
    Ok(json!({
        "component": cpi_component_lagrangian(&sa)?.to_string(),
        "exponent": format!("(i/hbar) ∫dt ({})", sa.lagrangian()),
        "density": q.density.to_string(),
        "matches": Verdict::compare_scalar(&q.target, &q.density) == Verdict::Match,
        "ghost_free": q.ghost_free,
        "pairing": q.pairing.map(|p| p.to_string()),
    }))
}

/// Oscillator kernel error against the closed form for `N = 2^2 … 2^max_power`.
pub fn kernel_convergence(omega0: f64, t_total: f64, max_power: u32) -> Result<Value> {
    let cfg = LatticeConfig {
        omega0,
        t_total,
        ..LatticeConfig::default()
    };
    let ns: Vec<usize> = (2..=max_power.clamp(3, 12)).map(|k| 1usize << k).collect();
    let rows = kernel_rows(&cfg, System::Harmonic, &ns)?;
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (t_total / r.n as f64, r.abs_error)).collect();
    Ok(json!({
        "rows": rows,
        "slope": loglog_slope(&points),
    }))
}

/// Discrete and exact oscillator trajectories over one run of `steps`.
pub fn trajectory(omega0: f64, t_total: f64, steps: usize, symplectic: bool) -> Result<Value> {
    let cfg = LatticeConfig {
        omega0,
        t_total,
        steps,
        ..LatticeConfig::default()
    };
    let scheme = if symplectic {
        Integrator::SymplecticEuler
    } else {
        Integrator::ForwardEuler
    };
    let tr = classical_discrete_evolve(&cfg, System::Harmonic, scheme)?;
    let dt = cfg.dt();
    let exact: Vec<(f64, f64)> = (0..=steps)
        .map(|k| classical_exact(&cfg, System::Harmonic, k as f64 * dt))
        .collect();
    Ok(json!({
        "t": (0..=steps).map(|k| k as f64 * dt).collect::<Vec<_>>(),
        "q": tr.q,
        "p": tr.p,
        "q_exact": exact.iter().map(|e| e.0).collect::<Vec<_>>(),
        "p_exact": exact.iter().map(|e| e.1).collect::<Vec<_>>(),
    }))
}

fn to_js(r: Result<Value>) -> std::result::Result<String, JsError> {
    r.map(|v| v.to_string()).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn expand(text: &str) -> std::result::Result<String, JsError> {
    to_js(expand_model(text))
}

#[wasm_bindgen(js_name = quantize)]
pub fn quantize_js(text: &str) -> std::result::Result<String, JsError> {
    to_js(quantize_model(text))
}

#[wasm_bindgen]
pub fn convergence(omega0: f64, t_total: f64, max_power: u32) -> std::result::Result<String, JsError> {
    to_js(kernel_convergence(omega0, t_total, max_power))
}

#[wasm_bindgen(js_name = trajectory)]
pub fn trajectory_js(
    omega0: f64,
    t_total: f64,
    steps: usize,
    symplectic: bool,
) -> std::result::Result<String, JsError> {
    to_js(trajectory(omega0, t_total, steps, symplectic))
}
