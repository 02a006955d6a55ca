//! Two-sided soft gripper: opening widths, finger length, fingertip travel and
//! the tilted-scoop geometry.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{mm, to_mm};

const DEFAULT_PROFILE: &str = include_str!("../data/gripper_default.json");

/// Vacuum level at which the fingers reach full travel, kPa.
pub const FULL_TRAVEL_PRESSURE_KPA: f64 = -80.0;

/// Inter-finger distance in the closed state, m.
pub const CLOSED_OPENING: f64 = 1.0e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct GripperModel {
    pub name: String,
    /// Natural inter-finger distance, m.
    pub w0: f64,
    /// Maximum opening, m.
    pub w1: f64,
    /// Finger length, m.
    pub finger_length: f64,
    /// Fingertip travel at full vacuum, m.
    pub max_travel: f64,
    /// rad
    pub tilt_min: f64,
    /// rad
    pub tilt_max_actuation: f64,
}

impl Default for GripperModel {
    fn default() -> Self {
        GripperProfile::from_json_str(DEFAULT_PROFILE)
            .and_then(GripperModel::try_from)
            .expect("default gripper profile is valid")
    }
}

impl GripperModel {
    pub fn validate(&self) -> Result<()> {
        let all_finite = [self.w0, self.w1, self.finger_length, self.max_travel, self.tilt_min, self.tilt_max_actuation]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::InvalidGripper("non-finite dimension".into()));
        }
        if !(0.0 < self.w0 && self.w0 < self.w1) {
            return Err(Error::InvalidGripper(format!(
                "need 0 < W0 < W1, got W0={} W1={}",
                self.w0, self.w1
            )));
        }
        if !(0.0 < self.max_travel && self.max_travel < self.finger_length) {
            return Err(Error::InvalidGripper(format!(
                "need Lf > Hmax > 0, got Lf={} Hmax={}",
                self.finger_length, self.max_travel
            )));
        }
        if self.tilt_min > self.tilt_max_actuation {
            return Err(Error::InvalidGripper("tilt_min exceeds tilt_max_actuation".into()));
        }
        Ok(())
    }

    fn check_travel(&self, travel: f64) -> Result<()> {
        if !(0.0..=self.max_travel).contains(&travel) {
            return Err(Error::Domain(format!(
                "fingertip travel {:.2} mm outside [0, {:.2}] mm",
                to_mm(travel),
                to_mm(self.max_travel)
            )));
        }
        Ok(())
    }

    /// Steepest tilt at which a natural-state finger still clears the table,
    /// `atan(2(Lf − H)/(W1 + W0))`.
    pub fn theta_max(&self, travel: f64) -> Result<f64> {
        self.check_travel(travel)?;
        Ok((2.0 * (self.finger_length - travel)).atan2(self.w1 + self.w0))
    }

    /// Contact width at that tilt, `√((Lf − H)² + ((W1 + W0)/2)²)`.
    pub fn w_min(&self, travel: f64) -> Result<f64> {
        self.check_travel(travel)?;
        Ok((self.finger_length - travel).hypot((self.w1 + self.w0) / 2.0))
    }

    /// Tallest feature the open fingers can envelop at a given wrist tilt.
    pub fn grasp_space_height(&self, tilt: f64) -> Result<f64> {
        if !(0.0..=FRAC_PI_2).contains(&tilt) {
            return Err(Error::Domain(format!("tilt {:.2}° outside [0, 90]°", tilt.to_degrees())));
        }
        Ok((self.w1 * tilt.cos() / 2.0).max(0.0))
    }

    /// Tilt limit for scooping: the actuation range capped by the geometric
    /// clearance angle at full travel.
    pub fn scoop_tilt_limit(&self) -> f64 {
        let geometric = self.theta_max(self.max_travel).expect("max travel is in range");
        geometric.min(self.tilt_max_actuation)
    }

    /// Opening under a given vacuum, linear between natural (0 kPa) and full
    /// opening (−80 kPa). Approximate: no measured curve is available.
    pub fn opening_at_pressure(&self, kpa: f64) -> Result<f64> {
        let f = pressure_fraction(kpa)?;
        Ok(self.w0 + (self.w1 - self.w0) * f)
    }

    pub fn travel_at_pressure(&self, kpa: f64) -> Result<f64> {
        Ok(self.max_travel * pressure_fraction(kpa)?)
    }

    pub fn state(&self, mode: GripperMode, tilt: f64) -> GripperState {
        let opening = match mode {
            GripperMode::Open => self.w1,
            GripperMode::Natural => self.w0,
            GripperMode::Closed => CLOSED_OPENING,
        };
        GripperState { opening, tilt, mode }
    }
}

fn pressure_fraction(kpa: f64) -> Result<f64> {
    if !(FULL_TRAVEL_PRESSURE_KPA..=0.0).contains(&kpa) {
        return Err(Error::Domain(format!("pressure {kpa} kPa outside [-80, 0]")));
    }
    Ok(kpa / FULL_TRAVEL_PRESSURE_KPA)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GripperMode {
    Open,
    Closed,
    Natural,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GripperState {
    pub opening: f64,
    pub tilt: f64,
    pub mode: GripperMode,
}

/// Gripper profile file. Millimetres and degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GripperProfile {
    pub name: String,
    #[serde(rename = "W0_mm")]
    pub w0_mm: f64,
    #[serde(rename = "W1_mm")]
    pub w1_mm: f64,
    #[serde(rename = "Lf_mm")]
    pub lf_mm: f64,
    #[serde(rename = "Hmax_mm")]
    pub hmax_mm: f64,
    pub tilt_max_deg: f64,
}

impl GripperProfile {
    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

impl TryFrom<GripperProfile> for GripperModel {
    type Error = Error;

    fn try_from(p: GripperProfile) -> Result<Self> {
        let g = GripperModel {
            name: p.name,
            w0: mm(p.w0_mm),
            w1: mm(p.w1_mm),
            finger_length: mm(p.lf_mm),
            max_travel: mm(p.hmax_mm),
            tilt_min: 0.0,
            tilt_max_actuation: p.tilt_max_deg.to_radians(),
        };
        g.validate()?;
        Ok(g)
    }
}

impl From<&GripperModel> for GripperProfile {
    fn from(g: &GripperModel) -> Self {
        GripperProfile {
            name: g.name.clone(),
            w0_mm: to_mm(g.w0),
            w1_mm: to_mm(g.w1),
            lf_mm: to_mm(g.finger_length),
            hmax_mm: to_mm(g.max_travel),
            tilt_max_deg: g.tilt_max_actuation.to_degrees(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn g() -> GripperModel {
        GripperModel::default()
    }

    #[test]
    fn default_profile_dimensions() {
        let g = g();
        assert_relative_eq!(g.w0, 0.030, max_relative = 1e-12);
        assert_relative_eq!(g.w1, 0.096, max_relative = 1e-12);
        assert_relative_eq!(g.finger_length, 0.083, max_relative = 1e-12);
        assert_relative_eq!(g.max_travel, 0.033, max_relative = 1e-12);
        assert_relative_eq!(g.tilt_max_actuation, 7.5f64.to_radians(), max_relative = 1e-12);
    }

    #[test]
    fn theta_max_at_full_travel() {
        let t = g().theta_max(0.033).unwrap();
        assert_relative_eq!(t, (0.100f64 / 0.126).atan(), max_relative = 1e-12);
        assert!((t - 0.6708).abs() < 1e-4);
        assert!((t.to_degrees() - 38.4).abs() < 0.05);
    }

    #[test]
    fn theta_max_degenerate_cases() {
        let mut h = g();
        h.max_travel = h.finger_length;
        assert_eq!(h.theta_max(h.finger_length).unwrap(), 0.0);
        let mut wide = g();
        wide.w1 = 1e6;
        assert!(wide.theta_max(0.0).unwrap() < 1e-6);
    }

    #[test]
    fn w_min_matches_reported_contact_width() {
        let w = g().w_min(0.033).unwrap();
        assert_relative_eq!(w, (0.050f64.powi(2) + 0.063f64.powi(2)).sqrt(), max_relative = 1e-12);
        assert!((w - 0.0804).abs() < 1e-4);
    }

    #[test]
    fn w_min_degenerate_cases() {
        let mut h = g();
        h.max_travel = h.finger_length;
        assert_relative_eq!(h.w_min(h.finger_length).unwrap(), (h.w1 + h.w0) / 2.0, max_relative = 1e-15);
        let mut z = g();
        z.w0 = 0.0;
        z.w1 = 0.0;
        assert_relative_eq!(z.w_min(0.033).unwrap(), 0.050, max_relative = 1e-12);
    }

    #[test]
    fn travel_out_of_range() {
        assert!(matches!(g().theta_max(-0.001), Err(Error::Domain(_))));
        assert!(matches!(g().w_min(0.034), Err(Error::Domain(_))));
    }

    #[test]
    fn grasp_space() {
        let g = g();
        assert_relative_eq!(g.grasp_space_height(0.0).unwrap(), 0.048, max_relative = 1e-12);
        assert_relative_eq!(g.grasp_space_height(60f64.to_radians()).unwrap(), 0.024, max_relative = 1e-12);
        assert!(g.grasp_space_height(90f64.to_radians()).unwrap() < 1e-15);
        assert!(g.grasp_space_height(-0.1).is_err());
        assert!(g.grasp_space_height(1.6).is_err());
    }

    #[test]
    fn scoop_limit_is_actuation_bound() {
        assert_relative_eq!(g().scoop_tilt_limit(), 7.5f64.to_radians(), max_relative = 1e-12);
    }

    #[test]
    fn pressure_map() {
        let g = g();
        assert_relative_eq!(g.opening_at_pressure(0.0).unwrap(), g.w0);
        assert_relative_eq!(g.opening_at_pressure(-80.0).unwrap(), g.w1);
        assert_relative_eq!(g.travel_at_pressure(-40.0).unwrap(), 0.0165, max_relative = 1e-12);
        assert!(g.opening_at_pressure(10.0).is_err());
    }

    #[test]
    fn states() {
        let g = g();
        assert_eq!(g.state(GripperMode::Open, 0.0).opening, g.w1);
        assert_eq!(g.state(GripperMode::Natural, 0.0).opening, g.w0);
        assert!(g.state(GripperMode::Closed, 0.0).opening > 0.0);
    }

    #[test]
    fn invalid_profiles() {
        let bad = r#"{"name":"x","W0_mm":96,"W1_mm":30,"Lf_mm":83,"Hmax_mm":33,"tilt_max_deg":7.5}"#;
        let p = GripperProfile::from_json_str(bad).unwrap();
        assert!(matches!(GripperModel::try_from(p), Err(Error::InvalidGripper(_))));
        let travel = r#"{"name":"x","W0_mm":30,"W1_mm":96,"Lf_mm":30,"Hmax_mm":33,"tilt_max_deg":7.5}"#;
        assert!(GripperModel::try_from(GripperProfile::from_json_str(travel).unwrap()).is_err());
        assert!(GripperProfile::from_json_str("{").is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn right_triangle_identity(h in 0.0f64..0.033) {
                let g = GripperModel::default();
                let t = g.theta_max(h).unwrap();
                let w = g.w_min(h).unwrap();
                prop_assert!((w * t.cos() - (g.w1 + g.w0) / 2.0).abs() < 1e-15);
                prop_assert!((w * t.sin() - (g.finger_length - h)).abs() < 1e-15);
            }

            #[test]
            fn monotone_in_travel(h in 0.0f64..0.032, dh in 1e-5f64..0.001) {
                let g = GripperModel::default();
                prop_assert!(g.theta_max(h + dh).unwrap() < g.theta_max(h).unwrap());
                prop_assert!(g.w_min(h + dh).unwrap() < g.w_min(h).unwrap());
            }

            #[test]
            fn w_min_grows_with_opening(extra in 1e-4f64..0.1) {
                let g = GripperModel::default();
                let mut wider = g.clone();
                wider.w1 += extra;
                prop_assert!(wider.w_min(0.01).unwrap() > g.w_min(0.01).unwrap());
            }
        }
    }
}
