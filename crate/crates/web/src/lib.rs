//! Browser bindings for the demo page in `www/`.
//!
//! Every export takes plain numbers and strings and returns a JSON string, so
//! the page needs no generated typings. The `*_json` functions are ordinary
//! Rust and are what the tests exercise; the `#[wasm_bindgen]` wrappers only
//! convert errors.

use serde::Serialize;
use sheetgrasp::analysis::{sweep, Axis, GridAxis, MonteCarlo, Perturbation, SweepSpec};
use sheetgrasp::gripper::GripperModel;
use sheetgrasp::materials::{derive_stiffness, MaterialLibrary};
use sheetgrasp::mechanics::cantilever_deflection;
use sheetgrasp::scene::Scene;
use sheetgrasp::sim::{execute, Finger, TraceOptions};
use sheetgrasp::strategies::{GraspRequest, Planner, Strategy};
use wasm_bindgen::prelude::*;

const DESK: &str = include_str!("../../core/data/scenes/desk.json");

fn desk(gsm: f64) -> Result<(Scene, MaterialLibrary), String> {
    let lib = MaterialLibrary::builtin();
    let mut scene = Scene::from_json_str(DESK, &lib).map_err(|e| e.to_string())?;
    scene.sheet.material = lib.material_at_gsm(&scene.sheet.material, gsm).map_err(|e| e.to_string())?;
    Ok((scene, lib))
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse().map_err(|e: sheetgrasp::Error| e.to_string())
}

/// The two swept axes for each strategy: GSM against its position parameter.
fn map_axes(strategy: Strategy, n: usize) -> Vec<GridAxis> {
    let gsm = GridAxis::new(Axis::Gsm, vec![17.0, 35.0, 60.0, 80.0, 100.0, 120.0, 150.0, 200.0, 230.0, 250.0]);
    let second = match strategy {
        Strategy::TopGrasp | Strategy::TopScoop => GridAxis::linspace(Axis::XMm, 50.0, 130.0, n),
        Strategy::WallGrasp => GridAxis::linspace(Axis::ThetaDeg, 0.0, 90.0, n),
        Strategy::EdgeGrasp => GridAxis::linspace(Axis::ProtrusionMm, 10.0, 150.0, n),
    };
    vec![gsm, second]
}

#[derive(Serialize)]
struct MapView {
    strategy: Strategy,
    x_axis: &'static str,
    y_axis: &'static str,
    x: Vec<f64>,
    y: Vec<f64>,
    /// `estimate[i][j]` for `y[i]`, `x[j]`.
    estimate: Vec<Vec<f64>>,
    reason: Vec<Vec<Option<&'static str>>>,
    threshold: f64,
}

/// Feasibility map of `strategy` over GSM and its position parameter on the
/// built-in desk scene. `trials` = 0 gives deterministic verdicts.
pub fn feasibility_map_json(strategy: &str, columns: usize, trials: usize, seed: u64) -> Result<String, String> {
    let strategy = parse_strategy(strategy)?;
    if !(2..=60).contains(&columns) {
        return Err(format!("columns must be in 2..=60, got {columns}"));
    }
    let (scene, lib) = desk(80.0)?;
    let mut spec = SweepSpec::new(strategy, map_axes(strategy, columns));
    if trials > 0 {
        spec = spec.with_monte_carlo(MonteCarlo { perturbation: Perturbation::default(), trials: trials.min(500), seed });
    }
    let map = sweep(&spec, &scene, &GripperModel::default(), &lib).map_err(|e| e.to_string())?;
    let (rows, cols) = (map.axes[0].values.len(), map.axes[1].values.len());
    let cell = |i, j| map.cell(&[i, j]).expect("index within shape");
    let view = MapView {
        strategy,
        x_axis: map.axes[1].axis.name(),
        y_axis: map.axes[0].axis.name(),
        x: map.axes[1].values.clone(),
        y: map.axes[0].values.clone(),
        estimate: (0..rows).map(|i| (0..cols).map(|j| cell(i, j).estimate).collect()).collect(),
        reason: (0..rows).map(|i| (0..cols).map(|j| cell(i, j).verdict.reason().map(|r| r.code())).collect()).collect(),
        threshold: map.threshold,
    };
    Ok(serde_json::to_string(&view).expect("view serializes"))
}

#[derive(Serialize)]
struct DeflectionView {
    gsm: f64,
    ei: f64,
    /// (protrusion mm, sag mm) pairs.
    points: Vec<[f64; 2]>,
    grasp_space_mm: f64,
    /// Longest protrusion on the grid whose sag still fits, mm.
    max_protrusion_mm: Option<f64>,
}

/// Cantilever sag against protrusion for a sheet of the given GSM.
pub fn deflection_curve_json(gsm: f64, max_protrusion_mm: f64, n: usize) -> Result<String, String> {
    if !(max_protrusion_mm.is_finite() && max_protrusion_mm > 0.0) || !(2..=1000).contains(&n) {
        return Err("need a positive protrusion range and 2..=1000 points".into());
    }
    let (scene, _) = desk(gsm)?;
    let stiffness = derive_stiffness(&scene.sheet.material).map_err(|e| e.to_string())?;
    let space = GripperModel::default().grasp_space_height(0.0).map_err(|e| e.to_string())? * 1000.0;
    let mut points = Vec::with_capacity(n);
    let mut max_fit = None;
    for k in 0..n {
        let l = max_protrusion_mm * k as f64 / (n - 1) as f64;
        let r = cantilever_deflection(l / 1000.0, &stiffness).map_err(|e| e.to_string())? * 1000.0;
        if r < space {
            max_fit = Some(l);
        }
        points.push([l, r]);
    }
    let view = DeflectionView { gsm, ei: stiffness.ei, points, grasp_space_mm: space, max_protrusion_mm: max_fit };
    Ok(serde_json::to_string(&view).expect("view serializes"))
}

#[derive(Serialize)]
struct TraceView {
    strategy: Strategy,
    stages: Vec<(&'static str, f64)>,
    time: Vec<f64>,
    f_n: Vec<f64>,
    f_tau: Vec<f64>,
    f_z: Vec<f64>,
    f_y: Vec<f64>,
}

/// Force trace of one grasp on the desk scene. `param` is the strategy's
/// position parameter: x mm, tilt degrees or protrusion mm. The wall grasp
/// stands 2 mm outside its collision band with the contact at mid-sheet.
pub fn force_trace_json(strategy: &str, gsm: f64, param: f64, left_finger: bool, seed: u64) -> Result<String, String> {
    let strategy = parse_strategy(strategy)?;
    let (scene, _) = desk(gsm)?;
    let gripper = GripperModel::default();
    let req = match strategy {
        Strategy::TopGrasp => GraspRequest::top_grasp(param / 1000.0),
        Strategy::TopScoop => GraspRequest::top_scoop(0.090, param.to_radians()),
        Strategy::WallGrasp => {
            let theta = param.to_radians();
            GraspRequest::wall_grasp(theta, gripper.w1 * theta.cos() + 0.002, scene.sheet.length / 2.0)
        }
        Strategy::EdgeGrasp => GraspRequest::edge_grasp(param / 1000.0),
    };
    let plan = Planner::new(&gripper).plan(&req, &scene).map_err(|e| e.to_string())?;
    if let Some(reason) = plan.verdict.reason() {
        return Err(format!("infeasible: {}", reason.code()));
    }
    let finger = if left_finger { Finger::Left } else { Finger::Right };
    let opts = TraceOptions { finger, seed, ..TraceOptions::default() };
    let trace = execute(&plan, &scene.sheet.material, &gripper, &opts).map_err(|e| e.to_string())?;
    let mut stages: Vec<(&'static str, f64)> = Vec::new();
    for s in &trace.samples {
        if stages.last().map(|l| l.0) != Some(s.stage.as_str()) {
            stages.push((s.stage.as_str(), s.time));
        }
    }
    let col = |f: fn(&sheetgrasp::sim::TraceSample) -> f64| trace.samples.iter().map(f).collect();
    let view = TraceView {
        strategy,
        stages,
        time: col(|s| s.time),
        f_n: col(|s| s.f_n),
        f_tau: col(|s| s.f_tau),
        f_z: col(|s| s.f_z),
        f_y: col(|s| s.f_y),
    };
    Ok(serde_json::to_string(&view).expect("view serializes"))
}

#[wasm_bindgen]
pub fn feasibility_map(strategy: &str, columns: usize, trials: usize, seed: u32) -> Result<String, JsValue> {
    feasibility_map_json(strategy, columns, trials, seed as u64).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn deflection_curve(gsm: f64, max_protrusion_mm: f64, n: usize) -> Result<String, JsValue> {
    deflection_curve_json(gsm, max_protrusion_mm, n).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn force_trace(strategy: &str, gsm: f64, param: f64, left_finger: bool, seed: u32) -> Result<String, JsValue> {
    force_trace_json(strategy, gsm, param, left_finger, seed as u64).map_err(|e| JsValue::from_str(&e))
}
