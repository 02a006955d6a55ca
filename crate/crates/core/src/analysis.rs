//! Workspace sweeps, Monte-Carlo robustness and strategy selection.

use std::fmt;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gripper::GripperModel;
use crate::materials::MaterialLibrary;
use crate::scene::Scene;
use crate::strategies::{GraspRequest, InfeasibleReason, Margins, Planner, PlannerConfig, Strategy, Verdict, DEFAULT_NORMAL_FORCE};
use crate::{mm, to_mm};

/// Success fraction at or above which a cell counts as inside the workspace.
pub const DEFAULT_THRESHOLD: f64 = 0.6;

/// A swept parameter. Values are given in boundary units (g/m², mm, degrees,
/// newtons).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Gsm,
    XMm,
    ThetaDeg,
    DistanceMm,
    WrinkleMm,
    ProtrusionMm,
    NormalForce,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Gsm => "gsm",
            Axis::XMm => "x_mm",
            Axis::ThetaDeg => "theta_deg",
            Axis::DistanceMm => "distance_mm",
            Axis::WrinkleMm => "wrinkle_mm",
            Axis::ProtrusionMm => "protrusion_mm",
            Axis::NormalForce => "normal_force",
        }
    }

    fn applies_to(self, strategy: Strategy) -> bool {
        use Strategy::*;
        match self {
            Axis::Gsm => true,
            Axis::XMm => matches!(strategy, TopGrasp | TopScoop),
            Axis::ThetaDeg => matches!(strategy, TopScoop | WallGrasp),
            Axis::DistanceMm | Axis::WrinkleMm => strategy == WallGrasp,
            Axis::ProtrusionMm => strategy == EdgeGrasp,
            Axis::NormalForce => matches!(strategy, TopGrasp | TopScoop | EdgeGrasp),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Axis::Gsm, Axis::XMm, Axis::ThetaDeg, Axis::DistanceMm, Axis::WrinkleMm, Axis::ProtrusionMm, Axis::NormalForce]
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidRequest(format!("unknown axis '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub axis: Axis,
    pub values: Vec<f64>,
}

impl GridAxis {
    pub fn new(axis: Axis, values: Vec<f64>) -> Self {
        GridAxis { axis, values }
    }

    /// `n` evenly spaced values from `start` to `end` inclusive.
    pub fn linspace(axis: Axis, start: f64, end: f64, n: usize) -> Self {
        let values = match n {
            0 => vec![],
            1 => vec![start],
            _ => (0..n).map(|i| start + (end - start) * i as f64 / (n - 1) as f64).collect(),
        };
        GridAxis { axis, values }
    }
}

/// Values for the strategy parameters that are not swept. SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedParams {
    pub position: f64,
    pub tilt: f64,
    pub grasp_distance: f64,
    /// `None` uses half the sheet length.
    pub wrinkle_length: Option<f64>,
    pub protrusion: f64,
    pub normal_force: f64,
}

impl Default for FixedParams {
    fn default() -> Self {
        FixedParams {
            position: 0.090,
            tilt: 5f64.to_radians(),
            grasp_distance: 0.050,
            wrinkle_length: None,
            protrusion: 0.060,
            normal_force: DEFAULT_NORMAL_FORCE,
        }
    }
}

/// Relative (`*_rel`) and absolute (`position_abs`, m) half-widths of the
/// uniform perturbations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    pub mu0_rel: f64,
    pub mu1_rel: f64,
    pub normal_force_rel: f64,
    pub position_abs: f64,
}

impl Default for Perturbation {
    fn default() -> Self {
        Perturbation { mu0_rel: 0.10, mu1_rel: 0.10, normal_force_rel: 0.10, position_abs: 0.003 }
    }
}

impl Perturbation {
    pub fn none() -> Self {
        Perturbation { mu0_rel: 0.0, mu1_rel: 0.0, normal_force_rel: 0.0, position_abs: 0.0 }
    }

    fn validate(&self) -> Result<()> {
        let all = [self.mu0_rel, self.mu1_rel, self.normal_force_rel, self.position_abs];
        if all.iter().any(|v| !v.is_finite() || *v < 0.0) || self.mu0_rel >= 1.0 {
            return Err(Error::Domain(format!("perturbation bounds must be finite and >= 0 (mu0 < 100%): {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarlo {
    pub perturbation: Perturbation,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub strategy: Strategy,
    pub axes: Vec<GridAxis>,
    pub fixed: FixedParams,
    pub config: PlannerConfig,
    pub threshold: f64,
    pub monte_carlo: Option<MonteCarlo>,
}

impl SweepSpec {
    pub fn new(strategy: Strategy, axes: Vec<GridAxis>) -> Self {
        SweepSpec {
            strategy,
            axes,
            fixed: FixedParams::default(),
            config: PlannerConfig::default(),
            threshold: DEFAULT_THRESHOLD,
            monte_carlo: None,
        }
    }

    pub fn with_monte_carlo(mut self, mc: MonteCarlo) -> Self {
        self.monte_carlo = Some(mc);
        self
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.axes.is_empty() {
            return Err(Error::InvalidRequest("sweep needs at least one axis".into()));
        }
        for (i, a) in self.axes.iter().enumerate() {
            if a.values.is_empty() {
                return Err(Error::InvalidRequest(format!("axis {} is empty", a.axis)));
            }
            if !a.axis.applies_to(self.strategy) {
                return Err(Error::InvalidRequest(format!("axis {} does not apply to {}", a.axis, self.strategy)));
            }
            if self.axes[..i].iter().any(|b| b.axis == a.axis) {
                return Err(Error::InvalidRequest(format!("axis {} given twice", a.axis)));
            }
        }
        validate_threshold(self.threshold)?;
        if let Some(mc) = &self.monte_carlo {
            mc.perturbation.validate()?;
            if mc.trials == 0 {
                return Err(Error::Domain("Monte-Carlo needs at least one trial".into()));
            }
        }
        Ok(())
    }
}

fn validate_threshold(t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("threshold {t} outside [0, 1]")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    /// Axis values in boundary units, one per axis.
    pub values: Vec<f64>,
    pub verdict: Verdict,
    pub margins: Margins,
    pub estimate: f64,
    pub in_workspace: bool,
    /// Planner error message for `invalid_input` cells.
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityMap {
    pub strategy: Strategy,
    pub axes: Vec<GridAxis>,
    /// Row-major: the last axis varies fastest.
    pub cells: Vec<Cell>,
    pub threshold: f64,
    pub monte_carlo: Option<MonteCarlo>,
}

impl FeasibilityMap {
    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.values.len()).collect()
    }

    pub fn flat_index(&self, index: &[usize]) -> Option<usize> {
        if index.len() != self.axes.len() {
            return None;
        }
        let mut flat = 0;
        for (i, a) in index.iter().zip(&self.axes) {
            if *i >= a.values.len() {
                return None;
            }
            flat = flat * a.values.len() + i;
        }
        Some(flat)
    }

    pub fn cell(&self, index: &[usize]) -> Option<&Cell> {
        self.flat_index(index).map(|i| &self.cells[i])
    }
}

fn unravel(mut flat: usize, shape: &[usize]) -> Vec<usize> {
    let mut idx = vec![0; shape.len()];
    for (slot, n) in idx.iter_mut().zip(shape).rev() {
        *slot = flat % n;
        flat /= n;
    }
    idx
}

/// Scene and request for one grid point.
fn cell_problem(
    spec: &SweepSpec,
    values: &[f64],
    scene: &Scene,
    library: &MaterialLibrary,
) -> Result<(Scene, GraspRequest)> {
    let f = &spec.fixed;
    let (mut x, mut tilt, mut d, mut lp, mut force) = (f.position, f.tilt, f.grasp_distance, f.protrusion, f.normal_force);
    let mut wrinkle = f.wrinkle_length.unwrap_or(scene.sheet.length / 2.0);
    let mut scene = scene.clone();
    for (a, &v) in spec.axes.iter().zip(values) {
        match a.axis {
            Axis::Gsm => scene.sheet.material = library.material_at_gsm(&scene.sheet.material, v)?,
            Axis::XMm => x = mm(v),
            Axis::ThetaDeg => tilt = v.to_radians(),
            Axis::DistanceMm => d = mm(v),
            Axis::WrinkleMm => wrinkle = mm(v),
            Axis::ProtrusionMm => lp = mm(v),
            Axis::NormalForce => force = v,
        }
    }
    let req = match spec.strategy {
        Strategy::TopGrasp => GraspRequest::top_grasp(x),
        Strategy::TopScoop => GraspRequest::top_scoop(x, tilt),
        Strategy::WallGrasp => GraspRequest::wall_grasp(tilt, d, wrinkle),
        Strategy::EdgeGrasp => GraspRequest::edge_grasp(lp),
    };
    Ok((scene, req.with_normal_force(force)))
}

fn evaluate_cell(
    spec: &SweepSpec,
    flat: usize,
    shape: &[usize],
    scene: &Scene,
    gripper: &GripperModel,
    library: &MaterialLibrary,
) -> Cell {
    let idx = unravel(flat, shape);
    let values: Vec<f64> = idx.iter().zip(&spec.axes).map(|(i, a)| a.values[*i]).collect();
    let planner = Planner::with_config(gripper, spec.config);
    let outcome = cell_problem(spec, &values, scene, library)
        .and_then(|(scene, req)| planner.plan(&req, &scene).map(|plan| (scene, req, plan)));
    match outcome {
        Ok((cell_scene, req, plan)) => {
            let estimate = match &spec.monte_carlo {
                Some(mc) => success_fraction(&planner, &req, &cell_scene, mc, flat as u64),
                None => verdict_score(plan.is_feasible()),
            };
            Cell { values, verdict: plan.verdict, margins: plan.margins, estimate, in_workspace: false, note: None }
        }
        Err(e) => Cell {
            values,
            verdict: Verdict::Infeasible(InfeasibleReason::InvalidInput),
            margins: Margins::default(),
            estimate: 0.0,
            in_workspace: false,
            note: Some(e.to_string()),
        },
    }
}

fn verdict_score(feasible: bool) -> f64 {
    if feasible {
        1.0
    } else {
        0.0
    }
}

/// Evaluates the strategy planner at every grid point.
///
/// Points the planner rejects as malformed become `invalid_input` cells; only
/// a malformed sweep specification is an error. Cells are independent, so the
/// result does not depend on evaluation order or on the `parallel` feature.
pub fn sweep(spec: &SweepSpec, scene: &Scene, gripper: &GripperModel, library: &MaterialLibrary) -> Result<FeasibilityMap> {
    spec.validate()?;
    gripper.validate()?;
    let shape: Vec<usize> = spec.axes.iter().map(|a| a.values.len()).collect();
    let total: usize = shape.iter().product();
    let eval = |flat: usize| evaluate_cell(spec, flat, &shape, scene, gripper, library);

    #[cfg(feature = "parallel")]
    let cells: Vec<Cell> = {
        use rayon::prelude::*;
        (0..total).into_par_iter().map(eval).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let cells: Vec<Cell> = (0..total).map(eval).collect();

    let map = FeasibilityMap {
        strategy: spec.strategy,
        axes: spec.axes.clone(),
        cells,
        threshold: spec.threshold,
        monte_carlo: spec.monte_carlo,
    };
    Ok(classify_workspace(map))
}

/// Labels each cell in or out of the workspace: in iff its success estimate
/// is at least the map threshold.
pub fn classify_workspace(mut map: FeasibilityMap) -> FeasibilityMap {
    for c in &mut map.cells {
        c.in_workspace = c.estimate >= map.threshold;
    }
    map
}

/// Re-thresholds an existing map.
pub fn reclassify(map: FeasibilityMap, threshold: f64) -> Result<FeasibilityMap> {
    validate_threshold(threshold)?;
    Ok(classify_workspace(FeasibilityMap { threshold, ..map }))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent random stream for one trial of one cell.
pub(crate) fn trial_rng(seed: u64, cell: u64, trial: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(splitmix64(splitmix64(seed) ^ cell) ^ trial))
}

fn jitter(rng: &mut ChaCha8Rng, half_width: f64) -> f64 {
    if half_width > 0.0 {
        rng.gen_range(-half_width..=half_width)
    } else {
        0.0
    }
}

fn perturbed_trial(planner: &Planner, req: &GraspRequest, scene: &Scene, p: &Perturbation, rng: &mut ChaCha8Rng) -> bool {
    let m = &scene.sheet.material;
    let mu0 = m.mu0 * (1.0 + jitter(rng, p.mu0_rel));
    let mu1 = m.mu1 * (1.0 + jitter(rng, p.mu1_rel));
    let force = req.normal_force * (1.0 + jitter(rng, p.normal_force_rel));
    let shift = jitter(rng, p.position_abs);

    let mut scene = scene.clone();
    let Ok(material) = m.clone().with_friction(mu0, mu1.max(0.0)) else {
        return false;
    };
    scene.sheet.material = material;
    let mut req = req.with_normal_force(force.max(0.0));
    let moved = |v: Option<f64>| v.map(|v| (v + shift).max(0.0));
    match req.strategy {
        Strategy::TopGrasp | Strategy::TopScoop => req.position = moved(req.position),
        Strategy::WallGrasp => req.grasp_distance = moved(req.grasp_distance),
        Strategy::EdgeGrasp => req.protrusion = moved(req.protrusion),
    }
    planner.plan(&req, &scene).map(|p| p.is_feasible()).unwrap_or(false)
}

fn success_fraction(planner: &Planner, req: &GraspRequest, scene: &Scene, mc: &MonteCarlo, cell: u64) -> f64 {
    let hits = (0..mc.trials)
        .filter(|&t| perturbed_trial(planner, req, scene, &mc.perturbation, &mut trial_rng(mc.seed, cell, t as u64)))
        .count();
    hits as f64 / mc.trials as f64
}

/// Fraction of trials that stay feasible when μ₀, μ₁, the normal force and
/// the strategy's position parameter are perturbed uniformly. Trials whose
/// perturbed request cannot be planned count as failures.
pub fn monte_carlo_success(
    req: &GraspRequest,
    scene: &Scene,
    gripper: &GripperModel,
    perturbation: &Perturbation,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    if trials == 0 {
        return Err(Error::Domain("Monte-Carlo needs at least one trial".into()));
    }
    perturbation.validate()?;
    req.validate()?;
    let mc = MonteCarlo { perturbation: *perturbation, trials, seed };
    Ok(success_fraction(&Planner::new(gripper), req, scene, &mc, 0))
}

// Export.

const MARGIN_COLUMNS: [&str; 8] = [
    "friction_gap",
    "buckling_n",
    "contact_width_clearance_mm",
    "collision_clearance_mm",
    "slack_mm",
    "grasp_space_clearance_mm",
    "bulge_height_mm",
    "deflection_clearance_mm",
];

fn margin_cells(m: &Margins) -> [Option<f64>; 8] {
    [
        m.friction_gap,
        m.buckling,
        m.contact_width_clearance.map(to_mm),
        m.collision_clearance.map(to_mm),
        m.slack.map(to_mm),
        m.grasp_space_clearance.map(to_mm),
        m.bulge_height.map(to_mm),
        m.deflection_clearance.map(to_mm),
    ]
}

fn fmt_num(v: f64) -> String {
    // Shortest round-trip representation; rounds off noise below 1e-12.
    let r = (v * 1e12).round() / 1e12;
    format!("{}", if r == 0.0 { 0.0 } else { r })
}

#[derive(Serialize)]
struct Sidecar<'a> {
    strategy: Strategy,
    columns: Vec<&'a str>,
    axes: Vec<SidecarAxis<'a>>,
    cells: usize,
    threshold: f64,
    monte_carlo: Option<MonteCarlo>,
}

#[derive(Serialize)]
struct SidecarAxis<'a> {
    name: &'static str,
    values: &'a [f64],
}

impl FeasibilityMap {
    pub fn columns(&self) -> Vec<&'static str> {
        let mut cols: Vec<&'static str> = self.axes.iter().map(|a| a.axis.name()).collect();
        cols.extend(["verdict", "reason"]);
        cols.extend(MARGIN_COLUMNS);
        cols.extend(["estimate", "in_workspace"]);
        cols
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.columns())?;
        for c in &self.cells {
            let mut row: Vec<String> = c.values.iter().map(|v| fmt_num(*v)).collect();
            row.push(if c.verdict.is_feasible() { "feasible" } else { "infeasible" }.into());
            row.push(c.verdict.reason().map(|r| r.code().to_string()).unwrap_or_default());
            row.extend(margin_cells(&c.margins).iter().map(|m| m.map(fmt_num).unwrap_or_default()));
            row.push(fmt_num(c.estimate));
            row.push(c.in_workspace.to_string());
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    /// Axis and threshold metadata for the CSV.
    pub fn sidecar_json(&self) -> String {
        let sidecar = Sidecar {
            strategy: self.strategy,
            columns: self.columns(),
            axes: self.axes.iter().map(|a| SidecarAxis { name: a.axis.name(), values: &a.values }).collect(),
            cells: self.cells.len(),
            threshold: self.threshold,
            monte_carlo: self.monte_carlo,
        };
        serde_json::to_string_pretty(&sidecar).expect("sidecar serializes")
    }
}

// Strategy selection.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceQuality {
    Any,
    Good,
    Best,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoseControl {
    None,
    EdgeOk,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SizeClass {
    WithinWorkspace,
    ExceedsWorkspace,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaskRequirements {
    pub surface_quality: SurfaceQuality,
    pub place_pose_control: PoseControl,
    pub size_class: SizeClass,
    pub gsm: f64,
}

impl TaskRequirements {
    pub fn new(gsm: f64) -> Self {
        TaskRequirements {
            surface_quality: SurfaceQuality::Any,
            place_pose_control: PoseControl::None,
            size_class: SizeClass::WithinWorkspace,
            gsm,
        }
    }

    pub fn surface(mut self, q: SurfaceQuality) -> Self {
        self.surface_quality = q;
        self
    }

    pub fn pose(mut self, p: PoseControl) -> Self {
        self.place_pose_control = p;
        self
    }

    pub fn size(mut self, s: SizeClass) -> Self {
        self.size_class = s;
        self
    }
}

/// Strategy characteristics used by the selector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategyProfile {
    pub strategy: Strategy,
    pub max_gsm: Option<f64>,
    pub any_size: bool,
    pub surface: SurfaceQuality,
    pub pose: PoseControl,
}

pub const STRATEGY_PROFILES: [StrategyProfile; 4] = [
    StrategyProfile {
        strategy: Strategy::TopGrasp,
        max_gsm: Some(230.0),
        any_size: true,
        surface: SurfaceQuality::Any,
        pose: PoseControl::EdgeOk,
    },
    StrategyProfile {
        strategy: Strategy::TopScoop,
        max_gsm: Some(230.0),
        any_size: true,
        surface: SurfaceQuality::Any,
        pose: PoseControl::EdgeOk,
    },
    StrategyProfile {
        strategy: Strategy::WallGrasp,
        max_gsm: None,
        any_size: false,
        surface: SurfaceQuality::Good,
        pose: PoseControl::None,
    },
    StrategyProfile {
        strategy: Strategy::EdgeGrasp,
        max_gsm: None,
        any_size: false,
        surface: SurfaceQuality::Best,
        pose: PoseControl::Full,
    },
];

/// Ranking among strategies that pass every filter, simplest first.
pub const PREFERENCE: [Strategy; 4] = [Strategy::TopGrasp, Strategy::EdgeGrasp, Strategy::TopScoop, Strategy::WallGrasp];

fn quality_rank(q: SurfaceQuality) -> u8 {
    q as u8
}

fn pose_rank(p: PoseControl) -> u8 {
    p as u8
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Selection {
    pub strategy: Strategy,
    pub rank: usize,
    /// Filters this strategy passed.
    pub passed: Vec<&'static str>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rejection {
    pub strategy: Strategy,
    pub reasons: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionReport {
    pub ranked: Vec<Selection>,
    pub rejected: Vec<Rejection>,
}

impl SelectionReport {
    pub fn strategies(&self) -> Vec<Strategy> {
        self.ranked.iter().map(|s| s.strategy).collect()
    }
}

/// Filters strategies by surface quality, placement control, sheet size and
/// GSM capacity, plus constraint availability when a scene is given, then
/// ranks the survivors by [`PREFERENCE`].
pub fn select_strategy(req: &TaskRequirements, scene: Option<&Scene>) -> Result<SelectionReport> {
    if !(req.gsm.is_finite() && req.gsm > 0.0) {
        return Err(Error::InvalidRequest(format!("gsm must be > 0, got {}", req.gsm)));
    }
    let mut survivors = Vec::new();
    let mut rejected = Vec::new();
    for profile in STRATEGY_PROFILES {
        let s = profile.strategy;
        let mut passed = Vec::new();
        let mut reasons = Vec::new();
        if quality_rank(profile.surface) >= quality_rank(req.surface_quality) {
            passed.push("surface_quality");
        } else {
            reasons.push(format!("surface quality {:?} below required {:?}", profile.surface, req.surface_quality));
        }
        let pose_ok = match req.place_pose_control {
            PoseControl::None => true,
            PoseControl::EdgeOk => profile.pose != PoseControl::None,
            PoseControl::Full => pose_rank(profile.pose) >= pose_rank(PoseControl::Full),
        };
        if pose_ok {
            passed.push("place_pose_control");
        } else {
            reasons.push(format!("place pose control {:?} short of {:?}", profile.pose, req.place_pose_control));
        }
        if req.size_class == SizeClass::WithinWorkspace || profile.any_size {
            passed.push("size");
        } else {
            reasons.push("sheet must lie within the robot workspace".into());
        }
        match profile.max_gsm {
            Some(cap) if req.gsm > cap => reasons.push(format!("gsm {} above capacity {cap}", req.gsm)),
            _ => passed.push("gsm"),
        }
        if let Some(scene) = scene {
            let missing = match s {
                Strategy::WallGrasp if scene.wall().is_none() => Some("no wall in scene"),
                Strategy::EdgeGrasp if scene.table_edge().is_none() => Some("no table edge in scene"),
                _ => None,
            };
            match missing {
                Some(m) => reasons.push(m.into()),
                None => passed.push("constraints"),
            }
        }
        if reasons.is_empty() {
            survivors.push((s, passed));
        } else {
            rejected.push(Rejection { strategy: s, reasons });
        }
    }
    if survivors.is_empty() {
        return Err(Error::NoStrategy(
            rejected.iter().map(|r| format!("{}: {}", r.strategy, r.reasons.join("; "))).collect(),
        ));
    }
    survivors.sort_by_key(|(s, _)| PREFERENCE.iter().position(|p| p == s));
    let ranked = survivors
        .into_iter()
        .enumerate()
        .map(|(i, (strategy, passed))| Selection { strategy, rank: i + 1, passed })
        .collect();
    Ok(SelectionReport { ranked, rejected })
}
