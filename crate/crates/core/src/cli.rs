//! Command-line front end. Millimetres and degrees at this boundary.
//!
//! Exit codes: 0 success, 2 the model says no (infeasible plan, no strategy),
//! 1 bad usage or input.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analysis::{
    select_strategy, sweep, Axis, FixedParams, GridAxis, MonteCarlo, Perturbation, PoseControl, SizeClass, SurfaceQuality,
    SweepSpec, TaskRequirements, DEFAULT_THRESHOLD,
};
use crate::error::Error;
use crate::gripper::{GripperModel, GripperProfile};
use crate::materials::{calibrate_ei, derive_stiffness, CantileverSample, MaterialLibrary};
use crate::scene::{Pose2D, Scene, SheetInstance};
use crate::sim::{execute, Finger, TraceOptions};
use crate::strategies::{GraspRequest, Planner, Strategy, DEFAULT_NORMAL_FORCE};
use crate::{mm, to_mm};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "sheetgrasp", version, about = "Plan soft-gripper grasps on thin sheets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Plan one grasp and print the plan as JSON.
    Plan(PlanArgs),
    /// Print the scoop tilt limit and contact width of a gripper.
    ScoopGeometry(GeometryArgs),
    /// Evaluate a strategy over a parameter grid and write CSV plus a JSON sidecar.
    Sweep(SweepArgs),
    /// Rank the strategies that suit a task.
    Select(SelectArgs),
    /// Fit bending stiffness from cantilever measurements.
    Calibrate(CalibrateArgs),
    /// Plan a grasp and write its synthetic force trace as CSV.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Scene file (JSON).
    #[arg(long)]
    pub scene: Option<PathBuf>,
    /// Material name, used when no scene is given (sheet 297 x 105 mm at the origin).
    #[arg(long)]
    pub material: Option<String>,
    /// Material library file (JSON); defaults to the built-in library.
    #[arg(long)]
    pub materials: Option<PathBuf>,
    /// Gripper profile file (JSON); defaults to the built-in profile.
    #[arg(long)]
    pub gripper: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct StrategyArgs {
    #[arg(long, value_parser = parse_strategy)]
    pub strategy: Strategy,
    /// Grasp position from the sheet edge, mm [top_grasp, top_scoop].
    #[arg(long = "x-mm")]
    pub x_mm: Option<f64>,
    /// Gripper tilt, degrees [top_scoop 0..7.5, wall_grasp 0..90].
    #[arg(long)]
    pub theta: Option<f64>,
    /// Gripper-to-wall distance, mm [wall_grasp].
    #[arg(long = "distance-mm")]
    pub distance_mm: Option<f64>,
    /// Contact to leading edge, mm [wall_grasp]; defaults to half the sheet length.
    #[arg(long = "wrinkle-mm")]
    pub wrinkle_mm: Option<f64>,
    /// Overhang beyond the table edge, mm [edge_grasp].
    #[arg(long = "protrusion-mm")]
    pub protrusion_mm: Option<f64>,
    /// Assumed normal force, N.
    #[arg(long = "normal-force", default_value_t = DEFAULT_NORMAL_FORCE)]
    pub normal_force: f64,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub strategy: StrategyArgs,
    /// Write the plan here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GeometryArgs {
    #[arg(long)]
    pub gripper: Option<PathBuf>,
    /// Fingertip travel, mm; defaults to full travel.
    #[arg(long = "travel-mm")]
    pub travel_mm: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_parser = parse_strategy)]
    pub strategy: Strategy,
    /// Grid axis: NAME=START:END:COUNT or NAME=V1,V2,... (gsm, x_mm, theta_deg,
    /// distance_mm, wrinkle_mm, protrusion_mm, normal_force). Repeatable.
    #[arg(long = "axis", required = true)]
    pub axes: Vec<String>,
    /// Fixed position for unswept parameters, mm.
    #[arg(long = "x-mm")]
    pub x_mm: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long = "distance-mm")]
    pub distance_mm: Option<f64>,
    #[arg(long = "wrinkle-mm")]
    pub wrinkle_mm: Option<f64>,
    #[arg(long = "protrusion-mm")]
    pub protrusion_mm: Option<f64>,
    #[arg(long = "normal-force")]
    pub normal_force: Option<f64>,
    /// Monte-Carlo trials per cell; 0 uses deterministic verdicts.
    #[arg(long, default_value_t = 0)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Workspace success threshold, in [0, 1].
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    pub threshold: f64,
    /// CSV output path; the sidecar goes next to it with a .json extension.
    /// Without it the CSV goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SizeArg {
    Within,
    Exceeds,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    #[arg(long)]
    pub gsm: f64,
    #[arg(long, value_enum, default_value = "any")]
    pub quality: QualityArg,
    #[arg(long, value_enum, default_value = "none")]
    pub pose: PoseArg,
    #[arg(long, value_enum, default_value = "within")]
    pub size: SizeArg,
    /// Reject strategies whose wall or edge is missing from this scene.
    #[arg(long)]
    pub scene: Option<PathBuf>,
    #[arg(long)]
    pub materials: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum QualityArg {
    Any,
    Good,
    Best,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PoseArg {
    None,
    EdgeOk,
    Full,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    /// CSV with columns L_mm,R_mm.
    #[arg(long)]
    pub samples: PathBuf,
    /// Material whose linear density to use.
    #[arg(long, conflicts_with = "lambda")]
    pub material: Option<String>,
    /// Linear density, kg/m.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub materials: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub strategy: StrategyArgs,
    #[arg(long, value_enum, default_value = "right")]
    pub finger: FingerArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Trace CSV path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FingerArg {
    Right,
    Left,
}

fn parse_strategy(s: &str) -> std::result::Result<Strategy, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Outcome of a subcommand short of an input error.
enum Outcome {
    Done,
    Infeasible,
}

type CmdResult = std::result::Result<Outcome, Error>;

/// Parses `args` (including the program name) and runs the command, writing
/// results to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INPUT,
            };
            let _ = write!(err, "{e}");
            return code;
        }
    };
    let result = match cli.command {
        Command::Plan(a) => cmd_plan(&a, out, err),
        Command::ScoopGeometry(a) => cmd_scoop_geometry(&a, out),
        Command::Sweep(a) => cmd_sweep(&a, out),
        Command::Select(a) => cmd_select(&a, out, err),
        Command::Calibrate(a) => cmd_calibrate(&a, out),
        Command::Simulate(a) => cmd_simulate(&a, out, err),
    };
    match result {
        Ok(Outcome::Done) => EXIT_OK,
        Ok(Outcome::Infeasible) => EXIT_INFEASIBLE,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Error> {
    fs::write(path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn in_file<T>(path: &Path, r: Result<T, Error>) -> Result<T, Error> {
    r.map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn load_library(path: Option<&Path>) -> Result<MaterialLibrary, Error> {
    match path {
        Some(p) => in_file(p, MaterialLibrary::from_json_str(&read(p)?)),
        None => Ok(MaterialLibrary::builtin()),
    }
}

fn load_gripper(path: Option<&Path>) -> Result<GripperModel, Error> {
    match path {
        Some(p) => in_file(p, GripperProfile::from_json_str(&read(p)?).and_then(GripperModel::try_from)),
        None => Ok(GripperModel::default()),
    }
}

struct Inputs {
    scene: Scene,
    gripper: GripperModel,
    library: MaterialLibrary,
}

fn load_inputs(a: &InputArgs) -> Result<Inputs, Error> {
    let library = load_library(a.materials.as_deref())?;
    let gripper = load_gripper(a.gripper.as_deref())?;
    let scene = match (&a.scene, &a.material) {
        (Some(p), None) => in_file(p, Scene::from_json_str(&read(p)?, &library))?,
        (None, Some(name)) => {
            let m = library.by_name(name)?.clone();
            Scene::new(SheetInstance::from_pose(m, 0.297, 0.105, Pose2D::default())?)
        }
        (Some(_), Some(_)) => return Err(Error::InvalidRequest("give either --scene or --material, not both".into())),
        (None, None) => return Err(Error::InvalidRequest("one of --scene or --material is required".into())),
    };
    Ok(Inputs { scene, gripper, library })
}

fn build_request(a: &StrategyArgs, scene: &Scene) -> Result<GraspRequest, Error> {
    let need = |v: Option<f64>, flag: &str| {
        v.ok_or_else(|| Error::InvalidRequest(format!("{} needs --{flag}", a.strategy)))
    };
    let extra = |present: &[(&str, Option<f64>)]| -> Result<(), Error> {
        match present.iter().find(|(_, v)| v.is_some()) {
            Some((flag, _)) => Err(Error::InvalidRequest(format!("--{flag} does not apply to {}", a.strategy))),
            None => Ok(()),
        }
    };
    let req = match a.strategy {
        Strategy::TopGrasp => {
            extra(&[("theta", a.theta), ("distance-mm", a.distance_mm), ("wrinkle-mm", a.wrinkle_mm), ("protrusion-mm", a.protrusion_mm)])?;
            GraspRequest::top_grasp(mm(need(a.x_mm, "x-mm")?))
        }
        Strategy::TopScoop => {
            extra(&[("distance-mm", a.distance_mm), ("wrinkle-mm", a.wrinkle_mm), ("protrusion-mm", a.protrusion_mm)])?;
            GraspRequest::top_scoop(mm(need(a.x_mm, "x-mm")?), need(a.theta, "theta")?.to_radians())
        }
        Strategy::WallGrasp => {
            extra(&[("x-mm", a.x_mm), ("protrusion-mm", a.protrusion_mm)])?;
            let wrinkle = a.wrinkle_mm.map(mm).unwrap_or(scene.sheet.length / 2.0);
            GraspRequest::wall_grasp(need(a.theta, "theta")?.to_radians(), mm(need(a.distance_mm, "distance-mm")?), wrinkle)
        }
        Strategy::EdgeGrasp => {
            extra(&[("x-mm", a.x_mm), ("theta", a.theta), ("distance-mm", a.distance_mm), ("wrinkle-mm", a.wrinkle_mm)])?;
            GraspRequest::edge_grasp(mm(need(a.protrusion_mm, "protrusion-mm")?))
        }
    };
    Ok(req.with_normal_force(a.normal_force))
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => write_file(p, text),
        None => out.write_all(text.as_bytes()).map_err(Error::from),
    }
}

fn cmd_plan(a: &PlanArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let inputs = load_inputs(&a.input)?;
    let req = build_request(&a.strategy, &inputs.scene)?;
    let plan = Planner::new(&inputs.gripper).plan(&req, &inputs.scene)?;
    emit(out, a.out.as_deref(), &(plan.to_json() + "\n"))?;
    if let Some(reason) = plan.verdict.reason() {
        let _ = writeln!(err, "infeasible: {reason}");
        return Ok(Outcome::Infeasible);
    }
    Ok(Outcome::Done)
}

#[derive(Serialize)]
struct GeometryReport {
    gripper: String,
    travel_mm: f64,
    theta_max_deg: f64,
    w_min_mm: f64,
    actuation_limit_deg: f64,
    scoop_tilt_limit_deg: f64,
    grasp_space_height_mm: f64,
}

fn cmd_scoop_geometry(a: &GeometryArgs, out: &mut dyn Write) -> CmdResult {
    let g = load_gripper(a.gripper.as_deref())?;
    let travel = a.travel_mm.map(mm).unwrap_or(g.max_travel);
    let report = GeometryReport {
        gripper: g.name.clone(),
        travel_mm: to_mm(travel),
        theta_max_deg: g.theta_max(travel)?.to_degrees(),
        w_min_mm: to_mm(g.w_min(travel)?),
        actuation_limit_deg: g.tilt_max_actuation.to_degrees(),
        scoop_tilt_limit_deg: g.scoop_tilt_limit().to_degrees(),
        grasp_space_height_mm: to_mm(g.grasp_space_height(0.0)?),
    };
    writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("report serializes"))?;
    Ok(Outcome::Done)
}

/// `NAME=START:END:COUNT` or `NAME=V1,V2,...`.
pub fn parse_axis(s: &str) -> Result<GridAxis, Error> {
    let bad = || Error::InvalidRequest(format!("axis '{s}' is not NAME=START:END:COUNT or NAME=V1,V2,..."));
    let (name, spec) = s.split_once('=').ok_or_else(bad)?;
    let axis: Axis = name.trim().parse()?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [start, end, count] => {
            let n: usize = count.trim().parse().map_err(|_| bad())?;
            Ok(GridAxis::linspace(axis, num(start)?, num(end)?, n))
        }
        [list] => {
            let values = list.split(',').filter(|t| !t.trim().is_empty()).map(num).collect::<Result<Vec<_>, _>>()?;
            Ok(GridAxis::new(axis, values))
        }
        _ => Err(bad()),
    }
}

fn cmd_sweep(a: &SweepArgs, out: &mut dyn Write) -> CmdResult {
    let inputs = load_inputs(&a.input)?;
    let axes = a.axes.iter().map(|s| parse_axis(s)).collect::<Result<Vec<_>, _>>()?;
    let defaults = FixedParams::default();
    let fixed = FixedParams {
        position: a.x_mm.map(mm).unwrap_or(defaults.position),
        tilt: a.theta.map(f64::to_radians).unwrap_or(defaults.tilt),
        grasp_distance: a.distance_mm.map(mm).unwrap_or(defaults.grasp_distance),
        wrinkle_length: a.wrinkle_mm.map(mm),
        protrusion: a.protrusion_mm.map(mm).unwrap_or(defaults.protrusion),
        normal_force: a.normal_force.unwrap_or(defaults.normal_force),
    };
    let mut spec = SweepSpec::new(a.strategy, axes).with_threshold(a.threshold);
    spec.fixed = fixed;
    if a.trials > 0 {
        spec = spec.with_monte_carlo(MonteCarlo { perturbation: Perturbation::default(), trials: a.trials, seed: a.seed });
    }
    let map = sweep(&spec, &inputs.scene, &inputs.gripper, &inputs.library)?;
    let csv = map.to_csv_string();
    match &a.out {
        Some(path) => {
            write_file(path, &csv)?;
            write_file(&path.with_extension("json"), &(map.sidecar_json() + "\n"))?;
        }
        None => out.write_all(csv.as_bytes())?,
    }
    Ok(Outcome::Done)
}

fn cmd_select(a: &SelectArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let library = load_library(a.materials.as_deref())?;
    let scene = match &a.scene {
        Some(p) => Some(in_file(p, Scene::from_json_str(&read(p)?, &library))?),
        None => None,
    };
    let req = TaskRequirements {
        surface_quality: match a.quality {
            QualityArg::Any => SurfaceQuality::Any,
            QualityArg::Good => SurfaceQuality::Good,
            QualityArg::Best => SurfaceQuality::Best,
        },
        place_pose_control: match a.pose {
            PoseArg::None => PoseControl::None,
            PoseArg::EdgeOk => PoseControl::EdgeOk,
            PoseArg::Full => PoseControl::Full,
        },
        size_class: match a.size {
            SizeArg::Within => SizeClass::WithinWorkspace,
            SizeArg::Exceeds => SizeClass::ExceedsWorkspace,
        },
        gsm: a.gsm,
    };
    match select_strategy(&req, scene.as_ref()) {
        Ok(report) => {
            writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("report serializes"))?;
            Ok(Outcome::Done)
        }
        Err(Error::NoStrategy(reasons)) => {
            for r in reasons {
                let _ = writeln!(err, "rejected {r}");
            }
            Ok(Outcome::Infeasible)
        }
        Err(e) => Err(e),
    }
}

#[derive(Serialize)]
struct CalibrationReport {
    lambda: f64,
    ei: f64,
    estimates: Vec<f64>,
    rms_residual_mm: f64,
    samples: usize,
}

fn read_samples(path: &Path) -> Result<Vec<CantileverSample>, Error> {
    let text = read(path)?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Parse(format!("{}: missing column {name}", path.display())))
    };
    let (li, ri) = (col("L_mm")?, col("R_mm")?);
    let mut samples = Vec::new();
    for (row, rec) in reader.records().enumerate() {
        let rec = rec?;
        let field = |i: usize| {
            rec.get(i).and_then(|v| v.parse::<f64>().ok()).ok_or_else(|| {
                Error::Parse(format!("{}: row {}: column {} is not a number", path.display(), row + 2, &headers[i]))
            })
        };
        samples.push(CantileverSample { protrusion: mm(field(li)?), deflection: mm(field(ri)?) });
    }
    Ok(samples)
}

fn cmd_calibrate(a: &CalibrateArgs, out: &mut dyn Write) -> CmdResult {
    let lambda = match (a.lambda, &a.material) {
        (Some(l), _) => l,
        (None, Some(name)) => {
            let library = load_library(a.materials.as_deref())?;
            derive_stiffness(library.by_name(name)?)?.lambda
        }
        (None, None) => return Err(Error::InvalidRequest("one of --lambda or --material is required".into())),
    };
    let samples = read_samples(&a.samples)?;
    let fit = calibrate_ei(&samples, lambda)?;
    let report = CalibrationReport {
        lambda,
        ei: fit.ei,
        estimates: fit.estimates,
        rms_residual_mm: to_mm(fit.rms_residual),
        samples: samples.len(),
    };
    writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("report serializes"))?;
    Ok(Outcome::Done)
}

fn cmd_simulate(a: &SimulateArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let inputs = load_inputs(&a.input)?;
    let req = build_request(&a.strategy, &inputs.scene)?;
    let plan = Planner::new(&inputs.gripper).plan(&req, &inputs.scene)?;
    if let Some(reason) = plan.verdict.reason() {
        let _ = writeln!(err, "infeasible: {reason}; nothing to simulate");
        return Ok(Outcome::Infeasible);
    }
    let opts = TraceOptions {
        finger: match a.finger {
            FingerArg::Right => Finger::Right,
            FingerArg::Left => Finger::Left,
        },
        seed: a.seed,
        ..TraceOptions::default()
    };
    let trace = execute(&plan, &inputs.scene.sheet.material, &inputs.gripper, &opts)?;
    emit(out, a.out.as_deref(), &trace.to_csv_string())?;
    Ok(Outcome::Done)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("sheetgrasp").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn axis_syntax() {
        let a = parse_axis("x_mm=50:130:5").unwrap();
        assert_eq!(a.values, vec![50.0, 70.0, 90.0, 110.0, 130.0]);
        let b = parse_axis("gsm=17, 35,60").unwrap();
        assert_eq!(b.values, vec![17.0, 35.0, 60.0]);
        assert!(parse_axis("nope=1").is_err());
        assert!(parse_axis("x_mm").is_err());
        assert!(parse_axis("x_mm=a:b:c").is_err());
        assert!(parse_axis("x_mm=1:2").is_err());
    }

    #[test]
    fn plan_by_material() {
        let (code, out, _) = run_str(&["plan", "--material", "printing-80", "--strategy", "top_grasp", "--x-mm", "90"]);
        assert_eq!(code, 0);
        assert!(out.contains("\"verdict\": \"feasible\""));
    }

    #[test]
    fn plan_flag_mismatch() {
        let (code, _, err) =
            run_str(&["plan", "--material", "printing-80", "--strategy", "top_grasp", "--x-mm", "90", "--theta", "5"]);
        assert_eq!(code, 1);
        assert!(err.contains("--theta"));
        let (code, _, _) = run_str(&["plan", "--material", "printing-80", "--strategy", "top_grasp"]);
        assert_eq!(code, 1);
    }

    #[test]
    fn usage_errors_exit_1() {
        assert_eq!(run_str(&["frobnicate"]).0, 1);
        assert_eq!(run_str(&["plan", "--strategy", "bogus", "--material", "printing-80"]).0, 1);
        assert_eq!(run_str(&["--help"]).0, 0);
    }

    #[test]
    fn scoop_geometry_defaults() {
        let (code, out, _) = run_str(&["scoop-geometry"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!((v["w_min_mm"].as_f64().unwrap() - 80.44).abs() < 0.01);
        assert!((v["theta_max_deg"].as_f64().unwrap() - 38.44).abs() < 0.01);
        assert!((v["scoop_tilt_limit_deg"].as_f64().unwrap() - 7.5).abs() < 1e-9);
    }

    #[test]
    fn select_cases() {
        let (code, out, _) = run_str(&["select", "--gsm", "80", "--quality", "best", "--pose", "full"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["ranked"][0]["strategy"], "edge_grasp");
        assert_eq!(v["ranked"].as_array().unwrap().len(), 1);
        let (code, _, err) = run_str(&["select", "--gsm", "300", "--size", "exceeds"]);
        assert_eq!(code, 2);
        assert!(err.contains("rejected"));
    }
}
