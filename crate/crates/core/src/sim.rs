//! Stage-by-stage force trace synthesis for a feasible plan.
//!
//! Traces are qualitative: each stage follows a fixed shape (linear ramps,
//! exponential decays) pinned to the model's force levels. Contact-frame forces
//! and wrist readings are tied together by the tilt rotation, so either can be
//! recovered from the other.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gripper::GripperModel;
use crate::materials::Material;
use crate::mechanics::{contact_to_wrench, SensorWrench};
use crate::strategies::{slide_normal_force, GraspPlan, StageName, Strategy};

/// Which finger of the pair the trace reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Finger {
    /// The finger that pinches toward the other; the reporting default.
    Right,
    /// In a top scoop, the finger that slides under the sheet.
    Left,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceOptions {
    pub finger: Finger,
    /// Seconds per stage.
    pub stage_duration: f64,
    /// Samples per second.
    pub sample_rate: f64,
    pub seed: u64,
    /// Multiplier on the lift-stage tangential peak.
    pub overshoot: f64,
    /// Decay time constant, s.
    pub decay_tau: f64,
    /// Normal force at first contact, N.
    pub preload: f64,
    /// Half-width of the edge-grasp slide fluctuation, relative.
    pub slide_band: f64,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions {
            finger: Finger::Right,
            stage_duration: 1.0,
            sample_rate: 100.0,
            seed: 0,
            overshoot: 1.1,
            decay_tau: 0.2,
            preload: 2.0,
            slide_band: 0.2,
        }
    }
}

impl TraceOptions {
    fn validate(&self) -> Result<()> {
        let positive = [self.stage_duration, self.sample_rate, self.overshoot, self.decay_tau];
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidRequest("trace durations, rate, overshoot and decay must be > 0".into()));
        }
        if !(self.preload.is_finite() && self.preload >= 0.0) || !(0.0..1.0).contains(&self.slide_band) {
            return Err(Error::InvalidRequest("preload must be >= 0 and slide band in [0, 1)".into()));
        }
        if (self.stage_duration * self.sample_rate).round() < 2.0 {
            return Err(Error::InvalidRequest("each stage needs at least two samples".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceSample {
    pub time: f64,
    pub stage: StageName,
    #[serde(rename = "F_Z")]
    pub f_z: f64,
    #[serde(rename = "F_Y")]
    pub f_y: f64,
    #[serde(rename = "F_N_f")]
    pub f_n: f64,
    #[serde(rename = "F_tau_f")]
    pub f_tau: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForceTrace {
    pub strategy: Strategy,
    pub tilt: f64,
    pub finger: Finger,
    pub samples: Vec<TraceSample>,
}

impl ForceTrace {
    /// Stages in the order they occur.
    pub fn stage_sequence(&self) -> Vec<StageName> {
        let mut seq: Vec<StageName> = Vec::new();
        for s in &self.samples {
            if seq.last() != Some(&s.stage) {
                seq.push(s.stage);
            }
        }
        seq
    }

    pub fn stage_samples(&self, stage: StageName) -> impl Iterator<Item = &TraceSample> {
        self.samples.iter().filter(move |s| s.stage == stage)
    }

    /// Largest tangential magnitude within a stage, with its sign.
    pub fn tangential_peak(&self, stage: StageName) -> Option<f64> {
        self.stage_samples(stage).map(|s| s.f_tau).max_by(|a, b| a.abs().total_cmp(&b.abs()))
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["time", "stage", "F_Z", "F_Y", "F_N_f", "F_tau_f"])?;
        for s in &self.samples {
            w.write_record([
                format!("{:.3}", s.time),
                s.stage.as_str().to_string(),
                fixed(s.f_z),
                fixed(s.f_y),
                fixed(s.f_n),
                fixed(s.f_tau),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }
}

fn fixed(v: f64) -> String {
    let s = format!("{v:.6}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        "0.000000".into()
    } else {
        s
    }
}

/// Force levels the stage shapes are pinned to, N.
#[derive(Debug, Clone, Copy)]
struct Levels {
    /// Normal force held while pressing or sliding.
    hold: f64,
    /// Tangential force built up before the lift (pressure or slide).
    drag: f64,
    /// Lift-stage tangential peak magnitude.
    peak: f64,
    /// Whether the lift tangential force keeps the drag's sign.
    same_direction: bool,
}

fn levels(plan: &GraspPlan, material: &Material, opts: &TraceOptions) -> Result<Levels> {
    let force = plan.normal_force;
    let buckle = plan.critical_load.unwrap_or(0.0);
    let peak = (material.mu0 * force).min(material.mu1 * force + buckle) * opts.overshoot;
    let (hold, drag) = match plan.strategy {
        Strategy::WallGrasp => {
            let n = slide_normal_force(plan.tilt)?;
            (n, material.mu1 * n)
        }
        _ => (force, material.mu1 * force),
    };
    let same_direction = plan.strategy == Strategy::TopScoop && plan.tilt > 0.0 && opts.finger == Finger::Left;
    Ok(Levels { hold, drag, peak, same_direction })
}

fn ramp(from: f64, to: f64, u: f64) -> f64 {
    from + (to - from) * u.clamp(0.0, 1.0)
}

/// Fraction of the lift stage spent building to the tangential peak.
const LIFT_RISE: f64 = 0.3;

/// Synthesizes the force trace of executing `plan`.
///
/// Stage shapes:
/// - approach: no load;
/// - contact: normal force ramps to the preload (to the slide level for
///   sliding strategies);
/// - pressure: normal force ramps to the planned force while the closing
///   fingers build tangential drag up to table friction;
/// - slide: wall grasp holds the wrist at the tilt's slide force with table
///   friction along the sheet; edge grasp holds the planned force with a
///   seeded fluctuation band around table friction;
/// - lift: normal force decays while the tangential force peaks at the
///   smaller of finger friction and the buckling demand, times the overshoot,
///   then decays. It reverses direction except on the scooping finger.
pub fn execute(plan: &GraspPlan, material: &Material, gripper: &GripperModel, opts: &TraceOptions) -> Result<ForceTrace> {
    if let Some(reason) = plan.verdict.reason() {
        return Err(Error::InfeasiblePlan(reason.code().to_string()));
    }
    opts.validate()?;
    material.validate()?;
    gripper.validate()?;
    let order = plan.strategy.stage_order();
    if plan.stage_names() != order {
        return Err(Error::InvalidRequest("plan stages do not follow the strategy's order".into()));
    }

    let lv = levels(plan, material, opts)?;
    let per_stage = (opts.stage_duration * opts.sample_rate).round() as usize;
    let dt = 1.0 / opts.sample_rate;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let wall = plan.strategy == Strategy::WallGrasp;
    let contact_level = if matches!(plan.strategy, Strategy::WallGrasp | Strategy::EdgeGrasp) {
        lv.hold
    } else {
        opts.preload.min(lv.hold)
    };
    let lift_sign = if lv.same_direction { 1.0 } else { -1.0 };

    let mut samples = Vec::with_capacity(per_stage * order.len());
    // Levels carried from the end of one stage into the next.
    let (mut n_prev, mut t_prev) = (0.0f64, 0.0f64);
    for (s, &stage) in order.iter().enumerate() {
        for k in 0..per_stage {
            let index = s * per_stage + k;
            let u = k as f64 / (per_stage - 1) as f64;
            let local = k as f64 * dt;
            let (n, t) = match stage {
                StageName::Approach => (0.0, 0.0),
                StageName::Contact => (ramp(0.0, contact_level, u), 0.0),
                StageName::Pressure => (ramp(n_prev, lv.hold, u), ramp(0.0, lv.drag, u)),
                StageName::Slide => {
                    if wall {
                        (lv.hold, lv.drag)
                    } else {
                        let band = if opts.slide_band > 0.0 {
                            rng.gen_range(-opts.slide_band..=opts.slide_band)
                        } else {
                            0.0
                        };
                        (lv.hold, lv.drag * (1.0 + band))
                    }
                }
                StageName::Lift => {
                    let n = n_prev * (-local / opts.decay_tau).exp();
                    let rise = LIFT_RISE * opts.stage_duration;
                    let mag = if local <= rise {
                        ramp(t_prev.abs(), lv.peak, local / rise)
                    } else {
                        lv.peak * (-(local - rise) / opts.decay_tau).exp()
                    };
                    // Reversing fingers pass through zero at the start of the lift.
                    let t = if lift_sign > 0.0 { mag } else if local <= rise { ramp(t_prev, -lv.peak, local / rise) } else { -mag };
                    (n, t)
                }
            };

            // Wall-grasp contact and slide levels are wrist readings: the
            // tilted fingers press down with F_Z and drag with F_Y.
            let sample = if wall && matches!(stage, StageName::Contact | StageName::Slide) {
                wrist_sample(index, dt, stage, SensorWrench { f_z: n, f_y: t, m_x: 0.0 }, plan.tilt)
            } else {
                contact_sample(index, dt, stage, n, t, plan.tilt)
            };
            if k == per_stage - 1 {
                n_prev = sample.f_n;
                t_prev = sample.f_tau;
            }
            samples.push(sample);
        }
    }
    Ok(ForceTrace { strategy: plan.strategy, tilt: plan.tilt, finger: opts.finger, samples })
}

fn contact_sample(index: usize, dt: f64, stage: StageName, n: f64, t: f64, tilt: f64) -> TraceSample {
    let w = contact_to_wrench(n, t, tilt);
    TraceSample { time: index as f64 * dt, stage, f_z: w.f_z, f_y: w.f_y, f_n: n, f_tau: t }
}

fn wrist_sample(index: usize, dt: f64, stage: StageName, w: SensorWrench, tilt: f64) -> TraceSample {
    let (n, t) = crate::mechanics::wrench_to_contact(&w, tilt);
    TraceSample { time: index as f64 * dt, stage, f_z: w.f_z, f_y: w.f_y, f_n: n, f_tau: t }
}
