//! Three computations exposed to the browser: the template curve ψ(q),
//! the phase field φ over the unit square, and the quarter-period orbit of
//! a lattice state.

use serde_json::json;
use wasm_bindgen::prelude::*;

use discrete_canonical::lattice_ops::{DiscreteState, LatticeWindow};
use discrete_canonical::numerics::RealLineGrid;
use discrete_canonical::oscillator::{quarter_evolution_with, table_for_resolution};
use discrete_canonical::phase_field::phi_unchecked;
use discrete_canonical::template_state::build_template_table;

fn js_error(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

/// ψ at `q = −qmax, −qmax+step, …, qmax`.
#[wasm_bindgen]
pub fn psi_curve(qmax: f64, step: f64) -> Result<Vec<f64>, JsError> {
    if !(qmax > 0.0 && qmax <= 20.0 && step >= 1.0 / 256.0) {
        return Err(JsError::new("need 0 < qmax ≤ 20 and step ≥ 1/256"));
    }
    let grid = RealLineGrid::symmetric(qmax, step).map_err(js_error)?;
    Ok(build_template_table(grid).map_err(js_error)?.values)
}

/// φ(η, ξ) at the cell centres of an `n × n` grid, row-major with η along
/// rows. Cell centres never land on the corner vortex.
#[wasm_bindgen]
pub fn phi_field(n: usize) -> Result<Vec<f64>, JsError> {
    if !(2..=1024).contains(&n) {
        return Err(JsError::new("need 2 ≤ n ≤ 1024"));
    }
    let centre = |k: usize| -0.5 + (k as f64 + 0.5) / n as f64;
    Ok((0..n * n).map(|i| phi_unchecked(centre(i / n), centre(i % n))).collect())
}

/// Four quarter periods of `|a, b⟩` as JSON: per step, the dominant site,
/// its probability and the phase of its amplitude (in turns).
#[wasm_bindgen]
pub fn quarter_orbit(a: i32, b: i32) -> Result<String, JsError> {
    let (a, b) = (a as i64, b as i64);
    let reach = a.abs().max(b.abs());
    if reach > 3 {
        return Err(JsError::new("need |a|, |b| ≤ 3"));
    }
    let grid = RealLineGrid::symmetric(13.0, 1.0 / 32.0).map_err(js_error)?;
    let window = LatticeWindow::centered(reach.max(1)).map_err(js_error)?;
    let table = table_for_resolution(&grid, window).map_err(js_error)?;
    let mut state = DiscreteState::basis(window, a, b).map_err(js_error)?;
    let mut steps = vec![json!({ "step": 0, "q": a, "p": b, "probability": 1.0, "phase": 0.0 })];
    for step in 1..=4 {
        let out = quarter_evolution_with(&state, &grid, &table).map_err(js_error)?;
        let ((q, p), probability) = out.dominant;
        steps.push(json!({ "step": step, "q": q, "p": p, "probability": probability, "phase": out.phase }));
        state = out.state;
    }
    Ok(serde_json::Value::Array(steps).to_string())
}
