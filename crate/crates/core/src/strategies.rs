//! The four grasp planners.
//!
//! | strategy    | constraint used | primitive | deciding check                          |
//! |-------------|-----------------|-----------|-----------------------------------------|
//! | top grasp   | tabletop        | pinch     | buckling at the contact                 |
//! | top scoop   | tabletop        | pinch     | buckling, contact width at the tilt     |
//! | wall grasp  | wall            | slide     | collision band, bulge in grasp span     |
//! | edge grasp  | table edge      | slide     | overhang sag within the grasp space     |
//!
//! Every planner returns a [`GraspPlan`] carrying a verdict, the margins of
//! every check it evaluated and the stage waypoints. Inputs that make the
//! question meaningless (a contact inside the natural finger gap, a tilt beyond
//! the gripper's range, a missing wall) are errors instead.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use nalgebra::{Point2, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gripper::GripperModel;
use crate::materials::derive_stiffness;
use crate::mechanics::{
    buckling_feasible_with_gain, cantilever_deflection, friction_condition, BucklingContext, EDGE_LENGTH_FACTOR,
    INTERIOR_LENGTH_FACTOR,
};
use crate::scene::{transform_between, Constraint, Pose2D, Scene, SheetInstance, TransformMatrix};
use crate::to_mm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    TopGrasp,
    TopScoop,
    WallGrasp,
    EdgeGrasp,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [Strategy::TopGrasp, Strategy::TopScoop, Strategy::WallGrasp, Strategy::EdgeGrasp];

    /// 1-based strategy number.
    pub fn number(self) -> u8 {
        match self {
            Strategy::TopGrasp => 1,
            Strategy::TopScoop => 2,
            Strategy::WallGrasp => 3,
            Strategy::EdgeGrasp => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Strategy::TopGrasp => "top_grasp",
            Strategy::TopScoop => "top_scoop",
            Strategy::WallGrasp => "wall_grasp",
            Strategy::EdgeGrasp => "edge_grasp",
        }
    }

    pub fn stage_order(self) -> &'static [StageName] {
        use StageName::*;
        match self {
            Strategy::TopGrasp | Strategy::TopScoop => &[Approach, Contact, Pressure, Lift],
            Strategy::WallGrasp | Strategy::EdgeGrasp => &[Approach, Contact, Slide, Lift],
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "top_grasp" | "1" => Ok(Strategy::TopGrasp),
            "top_scoop" | "2" => Ok(Strategy::TopScoop),
            "wall_grasp" | "3" => Ok(Strategy::WallGrasp),
            "edge_grasp" | "4" => Ok(Strategy::EdgeGrasp),
            other => Err(Error::InvalidRequest(format!("unknown strategy '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StageName {
    Approach,
    Contact,
    Pressure,
    Slide,
    Lift,
}

impl StageName {
    pub fn as_str(self) -> &'static str {
        match self {
            StageName::Approach => "approach",
            StageName::Contact => "contact",
            StageName::Pressure => "pressure",
            StageName::Slide => "slide",
            StageName::Lift => "lift",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GripperCommand {
    Open,
    Close,
    Natural,
    SetTilt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraspPositionClass {
    Edge,
    NonEdge,
}

/// Planner tuning. Defaults are model calibration constants, not measured
/// quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlannerConfig {
    /// Gain on the net push for non-edge scooping, from the scooping finger's
    /// sustained same-direction tangential force.
    pub scoop_gain: f64,
    /// Shortest bulge the fingers can close on, m.
    pub min_bulge_height: f64,
    /// Shortest overhang the fingers can grip, m.
    pub min_protrusion: f64,
    /// Height of the approach waypoint above the table, m.
    pub approach_height: f64,
    /// Height of the lift waypoint above the table, m.
    pub lift_height: f64,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            scoop_gain: 1.3,
            min_bulge_height: 0.010,
            min_protrusion: 0.015,
            approach_height: 0.05,
            lift_height: 0.10,
        }
    }
}

/// Planner normal force, N. Gives a tangential capacity `μ₀·F_N` of 12.5 N at
/// `μ₀ = 0.5`.
pub const DEFAULT_NORMAL_FORCE: f64 = 25.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraspRequest {
    pub strategy: Strategy,
    /// Distance of the contact from the sheet's free edge, m (strategies 1–2).
    pub position: Option<f64>,
    /// Gripper tilt, rad (strategies 2–3).
    pub tilt: Option<f64>,
    /// Gripper-to-wall distance at the grasp, m (strategy 3).
    pub grasp_distance: Option<f64>,
    /// Contact point to the sheet's leading edge, m (strategy 3).
    pub wrinkle_length: Option<f64>,
    /// Overhang beyond the table edge, m (strategy 4).
    pub protrusion: Option<f64>,
    /// Normal force the planner assumes the gripper applies, N.
    pub normal_force: f64,
}

impl GraspRequest {
    fn empty(strategy: Strategy) -> Self {
        GraspRequest {
            strategy,
            position: None,
            tilt: None,
            grasp_distance: None,
            wrinkle_length: None,
            protrusion: None,
            normal_force: DEFAULT_NORMAL_FORCE,
        }
    }

    pub fn top_grasp(position: f64) -> Self {
        GraspRequest { position: Some(position), ..Self::empty(Strategy::TopGrasp) }
    }

    pub fn top_scoop(position: f64, tilt: f64) -> Self {
        GraspRequest { position: Some(position), tilt: Some(tilt), ..Self::empty(Strategy::TopScoop) }
    }

    pub fn wall_grasp(tilt: f64, grasp_distance: f64, wrinkle_length: f64) -> Self {
        GraspRequest {
            tilt: Some(tilt),
            grasp_distance: Some(grasp_distance),
            wrinkle_length: Some(wrinkle_length),
            ..Self::empty(Strategy::WallGrasp)
        }
    }

    pub fn edge_grasp(protrusion: f64) -> Self {
        GraspRequest { protrusion: Some(protrusion), ..Self::empty(Strategy::EdgeGrasp) }
    }

    pub fn with_normal_force(mut self, f: f64) -> Self {
        self.normal_force = f;
        self
    }

    /// Checks that exactly the strategy's own parameters are set and that
    /// every length is non-negative.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("position", self.position),
            ("tilt", self.tilt),
            ("grasp_distance", self.grasp_distance),
            ("wrinkle_length", self.wrinkle_length),
            ("protrusion", self.protrusion),
        ];
        let needed: &[&str] = match self.strategy {
            Strategy::TopGrasp => &["position"],
            Strategy::TopScoop => &["position", "tilt"],
            Strategy::WallGrasp => &["tilt", "grasp_distance", "wrinkle_length"],
            Strategy::EdgeGrasp => &["protrusion"],
        };
        for (name, value) in fields {
            match (needed.contains(&name), value) {
                (true, None) => {
                    return Err(Error::InvalidRequest(format!("{} needs {name}", self.strategy)));
                }
                (false, Some(_)) => {
                    return Err(Error::InvalidRequest(format!("{name} is not a {} parameter", self.strategy)));
                }
                (true, Some(v)) if !v.is_finite() => {
                    return Err(Error::InvalidRequest(format!("{name} is not finite")));
                }
                (true, Some(v)) if name != "tilt" && v < 0.0 => {
                    return Err(Error::InvalidRequest(format!("{name} must be >= 0, got {v}")));
                }
                _ => {}
            }
        }
        if !(self.normal_force.is_finite() && self.normal_force >= 0.0) {
            return Err(Error::InvalidRequest(format!("normal force must be >= 0, got {}", self.normal_force)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InfeasibleReason {
    /// Fingertip friction does not exceed table friction.
    Friction,
    /// The push cannot exceed the critical load.
    Buckling,
    /// Contact closer to the edge than the tilted contact width.
    ContactWidth,
    /// Far finger would hit the wall.
    Collision,
    /// Grasp distance leaves no sheet to fold.
    NoSlack,
    /// Bulge crest outside the fingertip span.
    BulgeOutsideGraspSpace,
    /// Bulge too low to close on.
    BulgeTooSmall,
    /// Gripper body meets the tabletop.
    TableCollision,
    /// Overhang sags out of the grasp space.
    Deflection,
    /// Nothing, or too little, beyond the edge.
    InsufficientOverhang,
    /// The request could not be planned at all (sweeps only).
    InvalidInput,
}

impl InfeasibleReason {
    pub fn code(self) -> &'static str {
        match self {
            InfeasibleReason::Friction => "friction",
            InfeasibleReason::Buckling => "buckling",
            InfeasibleReason::ContactWidth => "contact_width",
            InfeasibleReason::Collision => "collision",
            InfeasibleReason::NoSlack => "no_slack",
            InfeasibleReason::BulgeOutsideGraspSpace => "bulge_outside_grasp_space",
            InfeasibleReason::BulgeTooSmall => "bulge_too_small",
            InfeasibleReason::TableCollision => "table_collision",
            InfeasibleReason::Deflection => "deflection",
            InfeasibleReason::InsufficientOverhang => "insufficient_overhang",
            InfeasibleReason::InvalidInput => "invalid_input",
        }
    }
}

impl fmt::Display for InfeasibleReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Feasible,
    Infeasible(InfeasibleReason),
}

impl Verdict {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Verdict::Feasible)
    }

    pub fn reason(&self) -> Option<InfeasibleReason> {
        match self {
            Verdict::Feasible => None,
            Verdict::Infeasible(r) => Some(*r),
        }
    }
}

/// Signed distances to each evaluated check's boundary; positive is the
/// feasible side. SI units.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Margins {
    pub friction_gap: Option<f64>,
    pub buckling: Option<f64>,
    pub contact_width_clearance: Option<f64>,
    pub collision_clearance: Option<f64>,
    pub slack: Option<f64>,
    pub grasp_space_clearance: Option<f64>,
    pub bulge_height: Option<f64>,
    pub deflection_clearance: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Waypoint {
    pub stage: StageName,
    /// Gripper pose; `z` is the fingertip height above the table.
    pub pose: Pose2D,
    pub tilt: f64,
    pub command: GripperCommand,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraspPlan {
    pub strategy: Strategy,
    pub verdict: Verdict,
    pub margins: Margins,
    pub stages: Vec<Waypoint>,
    /// Initial-to-objective slide transform (strategies 3–4).
    pub transform: Option<TransformMatrix>,
    pub tilt: f64,
    pub normal_force: f64,
    /// Critical load of the segment that has to buckle, if any.
    pub critical_load: Option<f64>,
    pub position_class: Option<GraspPositionClass>,
}

impl GraspPlan {
    pub fn is_feasible(&self) -> bool {
        self.verdict.is_feasible()
    }

    pub fn stage_names(&self) -> Vec<StageName> {
        self.stages.iter().map(|w| w.stage).collect()
    }
}

/// Running verdict: the first failed check wins, later checks still record
/// their margins.
struct Checks {
    verdict: Verdict,
    margins: Margins,
}

impl Checks {
    fn new() -> Self {
        Checks { verdict: Verdict::Feasible, margins: Margins::default() }
    }

    fn require(&mut self, ok: bool, reason: InfeasibleReason) {
        if !ok && self.verdict.is_feasible() {
            self.verdict = Verdict::Infeasible(reason);
        }
    }
}

/// Edge or non-edge contact and the matching Euler length factor.
pub fn classify_grasp_position(position: f64, gripper: &GripperModel) -> Result<(GraspPositionClass, f64)> {
    if !position.is_finite() || position <= gripper.w0 {
        return Err(Error::UngraspablePosition { x_mm: to_mm(position), w0_mm: to_mm(gripper.w0) });
    }
    Ok(if position <= gripper.w1 {
        (GraspPositionClass::Edge, EDGE_LENGTH_FACTOR)
    } else {
        (GraspPositionClass::NonEdge, INTERIOR_LENGTH_FACTOR)
    })
}

/// Segment that buckles when pinching at `position`: the run out to the free
/// edge for edge contacts, the span between the fingers otherwise.
pub fn deformed_length(class: GraspPositionClass, position: f64, gripper: &GripperModel) -> f64 {
    match class {
        GraspPositionClass::Edge => position,
        GraspPositionClass::NonEdge => gripper.w1,
    }
}

const SLIDE_FORCE_ANCHORS: [(f64, f64); 3] = [(5.0, 1.0), (30.0, 10.0), (60.0, 60.0)];

/// Steady normal force the tilted soft fingers press with while sliding, N.
///
/// Piecewise linear through 1 N at 5°, 10 N at 30° and 60 N at 60°; linear to
/// zero below 5° and extrapolated with the last slope above 60°.
pub fn slide_normal_force(tilt: f64) -> Result<f64> {
    let deg = tilt.to_degrees();
    if !(0.0..=90.0).contains(&deg) {
        return Err(Error::Domain(format!("tilt {deg:.2}° outside [0, 90]°")));
    }
    let (d0, f0) = SLIDE_FORCE_ANCHORS[0];
    if deg <= d0 {
        return Ok(f0 * deg / d0);
    }
    for pair in SLIDE_FORCE_ANCHORS.windows(2) {
        let ((a, fa), (b, fb)) = (pair[0], pair[1]);
        if deg <= b {
            return Ok(fa + (fb - fa) * (deg - a) / (b - a));
        }
    }
    let ((a, fa), (b, fb)) = (SLIDE_FORCE_ANCHORS[1], SLIDE_FORCE_ANCHORS[2]);
    Ok(fb + (fb - fa) * (deg - b) / (b - a))
}

fn waypoint(stage: StageName, at: Point2<f64>, yaw: f64, z: f64, tilt: f64, command: GripperCommand) -> Waypoint {
    Waypoint { stage, pose: Pose2D::new(at.x, at.y, yaw).with_z(z), tilt, command }
}

/// Direction along the sheet's long axis that points at `constraint`, the
/// distance from the sheet centre to it along that direction, and the hit
/// point.
fn toward(sheet: &SheetInstance, constraint: &Constraint) -> Result<(Vector2<f64>, f64)> {
    let centre = sheet.pose.position();
    let axis = sheet.axis();
    let hits = [axis, -axis]
        .into_iter()
        .filter_map(|d| constraint.ray_hit(&centre, &d).map(|t| (d, t)))
        .min_by(|a, b| a.1.total_cmp(&b.1));
    let (dir, dist) = hits.ok_or_else(|| Error::Geometry("sheet long axis is parallel to the constraint".into()))?;
    if dist < sheet.length / 2.0 {
        return Err(Error::Geometry(format!(
            "sheet already crosses the {:?} line ({:.1} mm from centre)",
            constraint.kind,
            to_mm(dist)
        )));
    }
    Ok((dir, dist))
}

#[derive(Debug, Clone)]
pub struct Planner<'a> {
    pub gripper: &'a GripperModel,
    pub config: PlannerConfig,
}

impl<'a> Planner<'a> {
    pub fn new(gripper: &'a GripperModel) -> Self {
        Planner { gripper, config: PlannerConfig::default() }
    }

    pub fn with_config(gripper: &'a GripperModel, config: PlannerConfig) -> Self {
        Planner { gripper, config }
    }

    /// Dispatches on the request's strategy, pulling the wall or edge from
    /// the scene as needed.
    pub fn plan(&self, req: &GraspRequest, scene: &Scene) -> Result<GraspPlan> {
        match req.strategy {
            Strategy::TopGrasp => self.top_grasp(req, &scene.sheet),
            Strategy::TopScoop => self.top_scoop(req, &scene.sheet),
            Strategy::WallGrasp => {
                let wall = scene.wall().ok_or(Error::MissingConstraint("wall grasp needs a wall"))?;
                self.wall_grasp(req, &scene.sheet, wall)
            }
            Strategy::EdgeGrasp => {
                let edge = scene.table_edge().ok_or(Error::MissingConstraint("edge grasp needs a table edge"))?;
                self.edge_grasp(req, &scene.sheet, edge)
            }
        }
    }

    fn expect(&self, req: &GraspRequest, strategy: Strategy) -> Result<()> {
        if req.strategy != strategy {
            return Err(Error::InvalidRequest(format!("{strategy} planner given a {} request", req.strategy)));
        }
        req.validate()
    }

    fn pinch_point(&self, sheet: &SheetInstance, position: f64) -> Result<Point2<f64>> {
        if position > sheet.length {
            return Err(Error::InvalidRequest(format!(
                "position {:.1} mm is beyond the {:.1} mm sheet",
                to_mm(position),
                to_mm(sheet.length)
            )));
        }
        Ok(sheet.point(sheet.length / 2.0 - position, 0.0))
    }

    /// Pinch-and-buckle verdict shared by both tabletop strategies.
    fn pinch_checks(&self, checks: &mut Checks, req: &GraspRequest, sheet: &SheetInstance, scoop: bool) -> Result<(GraspPositionClass, f64)> {
        let x = req.position.expect("validated");
        let (class, factor) = classify_grasp_position(x, self.gripper)?;
        let material = &sheet.material;
        let stiffness = derive_stiffness(material)?;
        let ctx = BucklingContext::new(deformed_length(class, x, self.gripper), factor, stiffness.ei)?;
        let gain = if scoop && class == GraspPositionClass::NonEdge { self.config.scoop_gain } else { 1.0 };
        let buckling = buckling_feasible_with_gain(req.normal_force, material, &ctx, gain)?;

        checks.margins.friction_gap = Some(material.mu0 - material.mu1);
        checks.margins.buckling = Some(buckling.margin);
        checks.require(friction_condition(material), InfeasibleReason::Friction);
        checks.require(buckling.feasible, InfeasibleReason::Buckling);
        Ok((class, buckling.critical_load))
    }

    fn top_stages(&self, at: Point2<f64>, yaw: f64, tilt: f64, scoop: bool) -> Vec<Waypoint> {
        use GripperCommand::*;
        use StageName::*;
        let (approach_cmd, contact_cmd) = if scoop { (SetTilt, Natural) } else { (Open, Open) };
        vec![
            waypoint(Approach, at, yaw, self.config.approach_height, tilt, approach_cmd),
            waypoint(Contact, at, yaw, 0.0, tilt, contact_cmd),
            waypoint(Pressure, at, yaw, 0.0, tilt, Close),
            waypoint(Lift, at, yaw, self.config.lift_height, tilt, Close),
        ]
    }

    /// Strategy 1: press both fingers on the sheet and lift; the closing
    /// fingers drag the sheet until it buckles into a wrinkle.
    pub fn top_grasp(&self, req: &GraspRequest, sheet: &SheetInstance) -> Result<GraspPlan> {
        self.expect(req, Strategy::TopGrasp)?;
        let at = self.pinch_point(sheet, req.position.expect("validated"))?;
        let mut checks = Checks::new();
        let (class, critical) = self.pinch_checks(&mut checks, req, sheet, false)?;
        Ok(GraspPlan {
            strategy: Strategy::TopGrasp,
            verdict: checks.verdict,
            margins: checks.margins,
            stages: self.top_stages(at, sheet.pose.yaw, 0.0, false),
            transform: None,
            tilt: 0.0,
            normal_force: req.normal_force,
            critical_load: Some(critical),
            position_class: Some(class),
        })
    }

    /// Strategy 2: tilt the gripper so one finger scoops under the sheet.
    pub fn top_scoop(&self, req: &GraspRequest, sheet: &SheetInstance) -> Result<GraspPlan> {
        self.expect(req, Strategy::TopScoop)?;
        let tilt = req.tilt.expect("validated");
        let limit = self.gripper.scoop_tilt_limit();
        if !(0.0..=limit + 1e-12).contains(&tilt) {
            return Err(Error::Tilt { tilt_deg: tilt.to_degrees(), limit_deg: limit.to_degrees() });
        }
        let x = req.position.expect("validated");
        let at = self.pinch_point(sheet, x)?;
        let mut checks = Checks::new();
        let scooping = tilt > 0.0;
        if scooping {
            let width = self.gripper.w_min(self.gripper.max_travel)?;
            checks.margins.contact_width_clearance = Some(x - width);
            checks.require(x >= width, InfeasibleReason::ContactWidth);
        }
        let (class, critical) = self.pinch_checks(&mut checks, req, sheet, scooping)?;
        Ok(GraspPlan {
            strategy: Strategy::TopScoop,
            verdict: checks.verdict,
            margins: checks.margins,
            stages: self.top_stages(at, sheet.pose.yaw, tilt, scooping),
            transform: None,
            tilt,
            normal_force: req.normal_force,
            critical_load: Some(critical),
            position_class: Some(class),
        })
    }

    /// Strategy 3: press the open, tilted gripper on the sheet, slide it into
    /// the wall until the sheet folds up, and close on the bulge.
    ///
    /// Poses follow the wall-grasp procedure: the initial pose sits `L` back
    /// from the sheet's leading edge, the objective pose `D` in front of the
    /// wall, and the returned transform maps one onto the other.
    pub fn wall_grasp(&self, req: &GraspRequest, sheet: &SheetInstance, wall: &Constraint) -> Result<GraspPlan> {
        self.expect(req, Strategy::WallGrasp)?;
        let tilt = req.tilt.expect("validated");
        let distance = req.grasp_distance.expect("validated");
        let wrinkle = req.wrinkle_length.expect("validated");
        if !(0.0..=FRAC_PI_2 + 1e-12).contains(&tilt) {
            return Err(Error::Tilt { tilt_deg: tilt.to_degrees(), limit_deg: 90.0 });
        }
        if wrinkle > sheet.length {
            return Err(Error::InvalidRequest(format!(
                "wrinkle length {:.1} mm exceeds the sheet",
                to_mm(wrinkle)
            )));
        }

        // Poses.
        let (dir, wall_dist) = toward(sheet, wall)?;
        let centre = sheet.pose.position();
        let leading_edge = centre + dir * (sheet.length / 2.0);
        let yaw = dir.y.atan2(dir.x);
        let initial = Pose2D::new((leading_edge - dir * wrinkle).x, (leading_edge - dir * wrinkle).y, yaw);
        let objective_at = centre + dir * (wall_dist - distance);
        let objective = Pose2D::new(objective_at.x, objective_at.y, yaw);
        let transform = transform_between(&initial, &objective);

        // Checks.
        let material = &sheet.material;
        let reach = self.gripper.w1 * tilt.cos();
        let bulge = 0.5 * (wrinkle * wrinkle - distance * distance).max(0.0).sqrt();
        let stiffness = derive_stiffness(material)?;
        let slide_force = slide_normal_force(tilt.min(FRAC_PI_2))?;
        let ctx = BucklingContext::new(wrinkle.max(f64::MIN_POSITIVE), EDGE_LENGTH_FACTOR, stiffness.ei)?;
        let buckling = buckling_feasible_with_gain(slide_force, material, &ctx, 1.0)?;

        let mut checks = Checks::new();
        checks.margins.collision_clearance = Some(distance - reach);
        checks.margins.slack = Some(wrinkle - distance);
        checks.margins.friction_gap = Some(material.mu0 - material.mu1);
        checks.margins.grasp_space_clearance = Some(reach - distance / 2.0);
        checks.margins.bulge_height = Some(bulge);
        checks.margins.buckling = Some(buckling.margin);

        checks.require(tilt < FRAC_PI_2, InfeasibleReason::TableCollision);
        checks.require(distance > reach, InfeasibleReason::Collision);
        checks.require(distance < wrinkle, InfeasibleReason::NoSlack);
        checks.require(friction_condition(material), InfeasibleReason::Friction);
        checks.require(distance / 2.0 <= reach, InfeasibleReason::BulgeOutsideGraspSpace);
        checks.require(bulge >= self.config.min_bulge_height, InfeasibleReason::BulgeTooSmall);
        checks.require(buckling.feasible, InfeasibleReason::Buckling);

        use GripperCommand::*;
        use StageName::*;
        let stages = vec![
            waypoint(Approach, initial.position(), yaw, self.config.approach_height, tilt, SetTilt),
            waypoint(Contact, initial.position(), yaw, 0.0, tilt, Open),
            waypoint(Slide, objective.position(), yaw, 0.0, tilt, Open),
            waypoint(Lift, objective.position(), yaw, self.config.lift_height, tilt, Close),
        ];
        Ok(GraspPlan {
            strategy: Strategy::WallGrasp,
            verdict: checks.verdict,
            margins: checks.margins,
            stages,
            transform: Some(transform),
            tilt,
            normal_force: slide_force,
            critical_load: Some(buckling.critical_load),
            position_class: None,
        })
    }

    /// Strategy 4: slide the sheet past the table edge and grip the
    /// overhang, which must not sag out of the open fingers.
    pub fn edge_grasp(&self, req: &GraspRequest, sheet: &SheetInstance, edge: &Constraint) -> Result<GraspPlan> {
        self.expect(req, Strategy::EdgeGrasp)?;
        let protrusion = req.protrusion.expect("validated");
        if protrusion >= sheet.length {
            return Err(Error::InvalidRequest(format!(
                "protrusion {:.1} mm would push the whole sheet off the table",
                to_mm(protrusion)
            )));
        }

        let (dir, edge_dist) = toward(sheet, edge)?;
        let centre = sheet.pose.position();
        let yaw = dir.y.atan2(dir.x);
        let push = edge_dist - sheet.length / 2.0 + protrusion;
        let initial = Pose2D::new(centre.x, centre.y, yaw);
        let objective_at = centre + dir * push;
        let objective = Pose2D::new(objective_at.x, objective_at.y, yaw);
        let overhang_mid = centre + dir * (edge_dist + protrusion / 2.0);

        let material = &sheet.material;
        let stiffness = derive_stiffness(material)?;
        let sag = cantilever_deflection(protrusion, &stiffness)?;
        let space = self.gripper.grasp_space_height(0.0)?;

        let mut checks = Checks::new();
        checks.margins.friction_gap = Some(material.mu0 - material.mu1);
        checks.margins.deflection_clearance = Some(space - sag);
        checks.require(protrusion > 0.0 && protrusion >= self.config.min_protrusion, InfeasibleReason::InsufficientOverhang);
        checks.require(friction_condition(material), InfeasibleReason::Friction);
        checks.require(sag < space, InfeasibleReason::Deflection);

        use GripperCommand::*;
        use StageName::*;
        let stages = vec![
            waypoint(Approach, centre, yaw, self.config.approach_height, 0.0, Natural),
            waypoint(Contact, centre, yaw, 0.0, 0.0, Natural),
            waypoint(Slide, objective.position(), yaw, 0.0, 0.0, Natural),
            waypoint(Lift, overhang_mid, yaw, 0.0, 0.0, Close),
        ];
        Ok(GraspPlan {
            strategy: Strategy::EdgeGrasp,
            verdict: checks.verdict,
            margins: checks.margins,
            stages,
            transform: Some(transform_between(&initial, &objective)),
            tilt: 0.0,
            normal_force: req.normal_force,
            critical_load: None,
            position_class: None,
        })
    }
}

pub fn plan_top_grasp(req: &GraspRequest, sheet: &SheetInstance, gripper: &GripperModel) -> Result<GraspPlan> {
    Planner::new(gripper).top_grasp(req, sheet)
}

pub fn plan_top_scoop(req: &GraspRequest, sheet: &SheetInstance, gripper: &GripperModel) -> Result<GraspPlan> {
    Planner::new(gripper).top_scoop(req, sheet)
}

pub fn plan_wall_grasp(req: &GraspRequest, sheet: &SheetInstance, gripper: &GripperModel, wall: &Constraint) -> Result<GraspPlan> {
    Planner::new(gripper).wall_grasp(req, sheet, wall)
}

pub fn plan_edge_grasp(req: &GraspRequest, sheet: &SheetInstance, gripper: &GripperModel, edge: &Constraint) -> Result<GraspPlan> {
    Planner::new(gripper).edge_grasp(req, sheet, edge)
}

// Plan report file format (millimetres, degrees).

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoseReport {
    pub x_mm: f64,
    pub y_mm: f64,
    pub z_mm: f64,
    pub yaw_deg: f64,
    pub tilt_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageReport {
    pub name: StageName,
    pub pose_mm_deg: PoseReport,
    pub command: GripperCommand,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub friction_gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub buckling_n: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contact_width_clearance_mm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub collision_clearance_mm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slack_mm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grasp_space_clearance_mm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bulge_height_mm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deflection_clearance_mm: Option<f64>,
}

impl From<&Margins> for MarginReport {
    fn from(m: &Margins) -> Self {
        MarginReport {
            friction_gap: m.friction_gap,
            buckling_n: m.buckling,
            contact_width_clearance_mm: m.contact_width_clearance.map(to_mm),
            collision_clearance_mm: m.collision_clearance.map(to_mm),
            slack_mm: m.slack.map(to_mm),
            grasp_space_clearance_mm: m.grasp_space_clearance.map(to_mm),
            bulge_height_mm: m.bulge_height.map(to_mm),
            deflection_clearance_mm: m.deflection_clearance.map(to_mm),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransformReport {
    pub tx_mm: f64,
    pub ty_mm: f64,
    pub yaw_deg: f64,
    /// Homogeneous matrix with the translation column in millimetres.
    pub matrix: [[f64; 3]; 3],
}

impl From<&TransformMatrix> for TransformReport {
    fn from(t: &TransformMatrix) -> Self {
        let (tx, ty) = t.translation();
        let mut matrix = t.matrix();
        matrix[0][2] = to_mm(matrix[0][2]);
        matrix[1][2] = to_mm(matrix[1][2]);
        TransformReport { tx_mm: to_mm(tx), ty_mm: to_mm(ty), yaw_deg: t.yaw().to_degrees(), matrix }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanReport {
    pub strategy: Strategy,
    pub verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<InfeasibleReason>,
    pub margins: MarginReport,
    pub stages: Vec<StageReport>,
    pub transform: Option<TransformReport>,
}

impl From<&GraspPlan> for PlanReport {
    fn from(p: &GraspPlan) -> Self {
        PlanReport {
            strategy: p.strategy,
            verdict: if p.is_feasible() { "feasible" } else { "infeasible" },
            reason: p.verdict.reason(),
            margins: MarginReport::from(&p.margins),
            stages: p
                .stages
                .iter()
                .map(|w| StageReport {
                    name: w.stage,
                    pose_mm_deg: PoseReport {
                        x_mm: to_mm(w.pose.x),
                        y_mm: to_mm(w.pose.y),
                        z_mm: to_mm(w.pose.z),
                        yaw_deg: w.pose.yaw.to_degrees(),
                        tilt_deg: w.tilt.to_degrees(),
                    },
                    command: w.command,
                })
                .collect(),
            transform: p.transform.as_ref().map(TransformReport::from),
        }
    }
}

impl GraspPlan {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&PlanReport::from(self)).expect("plan report serializes")
    }
}
