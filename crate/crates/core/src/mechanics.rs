//! Force criteria for the pinch and slide primitives.
//!
//! A pinch presses the fingertip onto the sheet with normal force `F_N` and
//! drags it with tangential force `F_τ`. While `F_τ ≤ μ₁·F_N` the sheet stays
//! put; above that and up to `μ₀·F_N` the sheet is carried by the finger and
//! compresses; beyond `μ₀·F_N` the finger slips. The compressed segment buckles
//! into a graspable wrinkle once the net push exceeds Euler's critical load,
//! which with `F_τ` capped at `μ₀·F_N` becomes `F_N·(μ₀ − μ₁) > π²EI/(μL)²`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::materials::{Material, StiffnessProfile};
use crate::GRAVITY;

/// Fixed–pinned column: contact near the free edge of the sheet.
pub const EDGE_LENGTH_FACTOR: f64 = 0.7;
/// Fixed–fixed column: contact away from any edge.
pub const INTERIOR_LENGTH_FACTOR: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ContactForces {
    /// Fingertip normal force (reaction to the pressing force), N.
    pub normal: f64,
    /// Fingertip tangential force, N.
    pub tangential: f64,
    /// Sheet–table friction, N.
    pub table_friction: f64,
    /// Deformation resistance of the sheet, N. Only tracked, never modelled.
    pub deformation_resistance: f64,
}

impl ContactForces {
    pub fn pinch(normal: f64, tangential: f64) -> Self {
        ContactForces { normal, tangential, ..Default::default() }
    }

    fn validate(&self, material: &Material) -> Result<()> {
        if !(self.normal.is_finite() && self.normal >= 0.0) {
            return Err(Error::InvalidForces(format!("normal force must be >= 0, got {}", self.normal)));
        }
        if !self.tangential.is_finite() {
            return Err(Error::InvalidForces("tangential force is not finite".into()));
        }
        if self.table_friction < 0.0 || self.table_friction > material.mu1 * self.normal + 1e-12 {
            return Err(Error::InvalidForces(format!(
                "table friction {} outside [0, mu1*F_N = {}]",
                self.table_friction,
                material.mu1 * self.normal
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PinchStage {
    /// Push stays inside the sheet–table friction cone.
    Rest,
    /// Sheet moves with the finger and compresses.
    Deforming,
    /// Finger slides over the sheet.
    Slipping,
}

/// Which pinch regime a contact is in. A tie at `μ₁·F_N` counts as rest.
pub fn pinch_stage(forces: &ContactForces, material: &Material) -> Result<PinchStage> {
    forces.validate(material)?;
    let push = forces.tangential.abs();
    Ok(if push <= material.mu1 * forces.normal {
        PinchStage::Rest
    } else if push <= material.mu0 * forces.normal {
        PinchStage::Deforming
    } else {
        PinchStage::Slipping
    })
}

/// The fingertip must grip the sheet better than the table does.
pub fn friction_condition(material: &Material) -> bool {
    material.mu1 < material.mu0
}

/// Sheet can be slid along the table without the finger slipping.
pub fn slide_condition(forces: &ContactForces, material: &Material) -> bool {
    let push = forces.tangential.abs();
    forces.normal >= 0.0 && material.mu1 * forces.normal < push && push <= material.mu0 * forces.normal
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BucklingContext {
    /// Length of the compressed segment, m.
    pub length: f64,
    /// Euler length factor.
    pub length_factor: f64,
    /// N·m²
    pub ei: f64,
}

impl BucklingContext {
    pub fn new(length: f64, length_factor: f64, ei: f64) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::Domain(format!("buckling length must be positive, got {length}")));
        }
        if length_factor != EDGE_LENGTH_FACTOR && length_factor != INTERIOR_LENGTH_FACTOR {
            return Err(Error::Domain(format!("length factor must be 0.5 or 0.7, got {length_factor}")));
        }
        if !(ei.is_finite() && ei > 0.0) {
            return Err(Error::Domain(format!("EI must be positive, got {ei}")));
        }
        Ok(BucklingContext { length, length_factor, ei })
    }
}

/// Euler critical load `π²·EI/(μL)²`, N.
pub fn critical_load(ctx: &BucklingContext) -> Result<f64> {
    if !ctx.length.is_finite() || ctx.length <= 0.0 {
        return Err(Error::Domain(format!("buckling length must be positive, got {}", ctx.length)));
    }
    let effective = ctx.length_factor * ctx.length;
    Ok(PI * PI * ctx.ei / (effective * effective))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BucklingCheck {
    pub feasible: bool,
    /// `F_N·(μ₀ − μ₁) − P_cr`, N.
    pub margin: f64,
    pub critical_load: f64,
}

/// Normal-force criterion for buckling the sheet into a wrinkle. Strict: a
/// push exactly at the critical load does not buckle.
pub fn buckling_feasible(normal: f64, material: &Material, ctx: &BucklingContext) -> Result<BucklingCheck> {
    buckling_feasible_with_gain(normal, material, ctx, 1.0)
}

/// As [`buckling_feasible`], with the net push scaled by `gain`.
pub(crate) fn buckling_feasible_with_gain(
    normal: f64,
    material: &Material,
    ctx: &BucklingContext,
    gain: f64,
) -> Result<BucklingCheck> {
    if !(normal.is_finite() && normal >= 0.0) {
        return Err(Error::InvalidForces(format!("normal force must be >= 0, got {normal}")));
    }
    let critical = critical_load(ctx)?;
    let margin = gain * normal * (material.mu0 - material.mu1) - critical;
    Ok(BucklingCheck { feasible: margin > 0.0, margin, critical_load: critical })
}

/// Tip sag of a sheet strip overhanging a support by `protrusion`,
/// `λ·g·L⁴/(8·EI)`.
pub fn cantilever_deflection(protrusion: f64, profile: &StiffnessProfile) -> Result<f64> {
    if !(protrusion.is_finite() && protrusion >= 0.0) {
        return Err(Error::Domain(format!("protrusion must be >= 0, got {protrusion}")));
    }
    Ok(profile.lambda * GRAVITY * protrusion.powi(4) / (8.0 * profile.ei))
}

/// Reaction wrench at the wrist force sensor.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SensorWrench {
    pub f_z: f64,
    pub f_y: f64,
    /// Carried for completeness; the planar equilibria do not use it.
    pub m_x: f64,
}

/// Fingertip normal and tangential force from the wrist wrench at a gripper
/// tilt. At zero tilt these are `F_Z` and `F_Y` themselves.
pub fn wrench_to_contact(wrench: &SensorWrench, tilt: f64) -> (f64, f64) {
    let (s, c) = tilt.sin_cos();
    (wrench.f_z * c + wrench.f_y * s, -wrench.f_z * s + wrench.f_y * c)
}

/// Inverse of [`wrench_to_contact`].
pub fn contact_to_wrench(normal: f64, tangential: f64, tilt: f64) -> SensorWrench {
    let (s, c) = tilt.sin_cos();
    SensorWrench { f_z: normal * c - tangential * s, f_y: normal * s + tangential * c, m_x: 0.0 }
}
