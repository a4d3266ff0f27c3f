//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Rates are in units of the atom-1 coupling. Every export returns a JSON string;
//! the `*_json` functions hold the logic and are usable from native code.

use cavity_dj::dj::{run_ideal, run_physical};
use cavity_dj::dynamics::{DipoleVariant, ModelParams};
use cavity_dj::gates::{synthesize_cpf, CpfLabel};
use cavity_dj::hilbert::{build_space, Encoding};
use cavity_dj::lab::linspace;
use cavity_dj::oracles::{decompose_oracle, BooleanFunction};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest register the page will simulate.
pub const MAX_QUBITS: usize = 5;

fn params(n: usize, eta: f64, kappa: f64, delta: f64, dipole: &str) -> Result<ModelParams, String> {
    if !(2..=MAX_QUBITS).contains(&n) {
        return Err(format!("n must lie in 2..={MAX_QUBITS}"));
    }
    let variant: DipoleVariant = dipole
        .parse()
        .map_err(|e: cavity_dj::Error| e.to_string())?;
    let p = ModelParams::star(n, 1.0, eta)
        .map_err(|e| e.to_string())?
        .with_kappa(kappa)
        .with_dipole(delta, variant);
    p.validate().map_err(|e| e.to_string())?;
    Ok(p)
}

fn to_json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct GateView {
    label: String,
    atomic: String,
    duration: f64,
    inputs: Vec<String>,
    re: Vec<f64>,
    im: Vec<f64>,
    leakage: Vec<f64>,
}

pub fn synthesize_gate_json(
    n: usize,
    eta: f64,
    kappa: f64,
    delta: f64,
    dipole: &str,
    label: &str,
) -> Result<String, String> {
    let p = params(n, eta, kappa, delta, dipole)?;
    let label = if label.is_empty() {
        CpfLabel::native(n)
    } else {
        CpfLabel::parse(label, n)
    }
    .map_err(|e| e.to_string())?;
    let space = build_space(n, 1).map_err(|e| e.to_string())?;
    let encoding = Encoding::standard(n);
    let g = synthesize_cpf(&space, &encoding, &p, label).map_err(|e| e.to_string())?;
    let diag = g.diagonal();
    to_json(&GateView {
        label: label.to_string(),
        atomic: label.atomic(&encoding),
        duration: g.duration,
        inputs: (0..diag.len()).map(|x| format!("{x:0n$b}")).collect(),
        re: diag.iter().map(|z| z.re).collect(),
        im: diag.iter().map(|z| z.im).collect(),
        leakage: g.leakage,
    })
}

#[derive(Serialize)]
struct DjView {
    function: String,
    class: String,
    classification: String,
    gates: Vec<String>,
    probabilities: Vec<f64>,
    p_zero: f64,
    fidelity_raw: f64,
    fidelity_normalized: f64,
    leakage: f64,
}

pub fn run_dj_json(
    function: &str,
    n: usize,
    eta: f64,
    kappa: f64,
    delta: f64,
    dipole: &str,
    ideal: bool,
) -> Result<String, String> {
    let f = BooleanFunction::from_hex(n, function).map_err(|e| e.to_string())?;
    let gates = decompose_oracle(&f).map_err(|e| e.to_string())?;
    let out = if ideal {
        run_ideal(&f)
    } else {
        run_physical(&f, &params(n, eta, kappa, delta, dipole)?)
    }
    .map_err(|e| e.to_string())?;
    to_json(&DjView {
        function: f.to_hex(),
        class: f.class().to_string(),
        classification: out.classification.to_string(),
        gates: gates.labels.iter().map(ToString::to_string).collect(),
        probabilities: out.output_state.iter().map(|z| z.norm_sqr()).collect(),
        p_zero: out.p_zero,
        fidelity_raw: out.fidelity_raw,
        fidelity_normalized: out.fidelity_normalized,
        leakage: out.leakage,
    })
}

#[derive(Serialize)]
struct Curve {
    kappa: Vec<f64>,
    fidelity_raw: Vec<f64>,
    fidelity_normalized: Vec<f64>,
    p_zero: Vec<f64>,
}

/// Fidelity of one function against kappa on `[0, kappa_max]`.
pub fn fidelity_curve_json(
    function: &str,
    n: usize,
    eta: f64,
    kappa_max: f64,
    points: usize,
    delta: f64,
    dipole: &str,
) -> Result<String, String> {
    if !(2..=200).contains(&points) {
        return Err("points must lie in 2..=200".into());
    }
    let f = BooleanFunction::from_hex(n, function).map_err(|e| e.to_string())?;
    let kappa = linspace(0.0, kappa_max, points);
    let mut curve = Curve {
        kappa: kappa.clone(),
        fidelity_raw: Vec::with_capacity(points),
        fidelity_normalized: Vec::with_capacity(points),
        p_zero: Vec::with_capacity(points),
    };
    for k in kappa {
        let out =
            run_physical(&f, &params(n, eta, k, delta, dipole)?).map_err(|e| e.to_string())?;
        curve.fidelity_raw.push(out.fidelity_raw);
        curve.fidelity_normalized.push(out.fidelity_normalized);
        curve.p_zero.push(out.p_zero);
    }
    to_json(&curve)
}

#[wasm_bindgen]
pub fn synthesize_gate(
    n: usize,
    eta: f64,
    kappa: f64,
    delta: f64,
    dipole: &str,
    label: &str,
) -> Result<String, JsValue> {
    synthesize_gate_json(n, eta, kappa, delta, dipole, label).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn run_dj(
    function: &str,
    n: usize,
    eta: f64,
    kappa: f64,
    delta: f64,
    dipole: &str,
    ideal: bool,
) -> Result<String, JsValue> {
    run_dj_json(function, n, eta, kappa, delta, dipole, ideal).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn fidelity_curve(
    function: &str,
    n: usize,
    eta: f64,
    kappa_max: f64,
    points: usize,
    delta: f64,
    dipole: &str,
) -> Result<String, JsValue> {
    fidelity_curve_json(function, n, eta, kappa_max, points, delta, dipole)
        .map_err(|e| JsValue::from_str(&e))
}
