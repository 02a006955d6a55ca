//! Sheet materials: areal density, thickness, stiffness and friction.
//!
//! Thickness is derived from GSM through a volumetric density unless given
//! explicitly. The second moment of area is that of a rectangular strip,
//! `I = w·h³/12`, so `EI ∝ h³ ∝ GSM³` at fixed density.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::GRAVITY;

/// Typical office paper, kg/m³.
pub const DEFAULT_VOLUMETRIC_DENSITY: f64 = 800.0;
/// Typical machine-made paper, Pa.
pub const DEFAULT_YOUNGS_MODULUS: f64 = 2.0e9;
/// Half of an A4 sheet is 105 mm wide.
pub const DEFAULT_WIDTH: f64 = 0.105;
pub const DEFAULT_MU0: f64 = 0.5;
pub const DEFAULT_MU1: f64 = 0.45;

const BUILTIN_LIBRARY: &str = include_str!("../data/materials.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Material {
    pub name: String,
    /// Areal density, g/m².
    pub gsm: f64,
    /// m
    pub thickness: f64,
    /// Pa
    pub youngs_modulus: f64,
    /// kg/m³
    pub volumetric_density: f64,
    /// Fingertip–sheet friction coefficient.
    pub mu0: f64,
    /// Sheet–table friction coefficient.
    pub mu1: f64,
    /// Strip width, m.
    pub width: f64,
    /// True when `thickness` follows from `gsm` and `volumetric_density`.
    pub thickness_derived: bool,
    /// Preset never checked against physical trials.
    pub unvalidated: bool,
}

impl Material {
    /// Material with every optional property at its default.
    pub fn from_gsm(name: impl Into<String>, gsm: f64) -> Result<Self> {
        let m = Material {
            name: name.into(),
            gsm,
            thickness: derived_thickness(gsm, DEFAULT_VOLUMETRIC_DENSITY),
            youngs_modulus: DEFAULT_YOUNGS_MODULUS,
            volumetric_density: DEFAULT_VOLUMETRIC_DENSITY,
            mu0: DEFAULT_MU0,
            mu1: DEFAULT_MU1,
            width: DEFAULT_WIDTH,
            thickness_derived: true,
            unvalidated: false,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("gsm", self.gsm),
            ("thickness", self.thickness),
            ("youngs_modulus", self.youngs_modulus),
            ("volumetric_density", self.volumetric_density),
            ("width", self.width),
            ("mu0", self.mu0),
        ];
        for (field, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidMaterial(format!(
                    "{}: {field} must be positive and finite, got {v}",
                    self.name
                )));
            }
        }
        if !(self.mu1.is_finite() && self.mu1 >= 0.0) {
            return Err(Error::InvalidMaterial(format!(
                "{}: mu1 must be non-negative, got {}",
                self.name, self.mu1
            )));
        }
        Ok(())
    }

    /// Same material at another areal density. A derived thickness follows
    /// the new GSM; an explicit one is kept.
    pub fn with_gsm(&self, gsm: f64) -> Result<Self> {
        let mut m = self.clone();
        m.gsm = gsm;
        if m.thickness_derived {
            m.thickness = derived_thickness(gsm, m.volumetric_density);
        }
        m.validate()?;
        Ok(m)
    }

    pub fn with_friction(mut self, mu0: f64, mu1: f64) -> Result<Self> {
        self.mu0 = mu0;
        self.mu1 = mu1;
        self.validate()?;
        Ok(self)
    }

    pub fn with_youngs_modulus(mut self, e: f64) -> Result<Self> {
        self.youngs_modulus = e;
        self.validate()?;
        Ok(self)
    }

    pub fn with_volumetric_density(mut self, rho: f64) -> Result<Self> {
        self.volumetric_density = rho;
        if self.thickness_derived {
            self.thickness = derived_thickness(self.gsm, rho);
        }
        self.validate()?;
        Ok(self)
    }

    pub fn with_thickness(mut self, h: f64) -> Result<Self> {
        self.thickness = h;
        self.thickness_derived = false;
        self.validate()?;
        Ok(self)
    }

    pub fn with_width(mut self, w: f64) -> Result<Self> {
        self.width = w;
        self.validate()?;
        Ok(self)
    }

    /// Adopts a measured bending stiffness by back-solving Young's modulus
    /// for the current cross-section.
    pub fn with_calibrated_ei(mut self, ei: f64) -> Result<Self> {
        if !(ei.is_finite() && ei > 0.0) {
            return Err(Error::InvalidMaterial(format!("calibrated EI must be positive, got {ei}")));
        }
        self.youngs_modulus = ei / second_moment(self.width, self.thickness);
        self.validate()?;
        Ok(self)
    }
}

pub fn derived_thickness(gsm: f64, volumetric_density: f64) -> f64 {
    (gsm / 1000.0) / volumetric_density
}

fn second_moment(width: f64, thickness: f64) -> f64 {
    width * thickness.powi(3) / 12.0
}

/// Bending stiffness and linear mass density of a sheet strip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StiffnessProfile {
    /// N·m²
    pub ei: f64,
    /// kg/m
    pub lambda: f64,
}

impl StiffnessProfile {
    pub fn new(ei: f64, lambda: f64) -> Result<Self> {
        if !(ei.is_finite() && ei > 0.0 && lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidMaterial(format!(
                "stiffness profile needs EI > 0 and lambda > 0, got EI={ei}, lambda={lambda}"
            )));
        }
        Ok(StiffnessProfile { ei, lambda })
    }
}

pub fn derive_stiffness(material: &Material) -> Result<StiffnessProfile> {
    material.validate()?;
    let ei = material.youngs_modulus * second_moment(material.width, material.thickness);
    let lambda = (material.gsm / 1000.0) * material.width;
    StiffnessProfile::new(ei, lambda)
}

/// One cantilever measurement: protrusion beyond the support and the tip sag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CantileverSample {
    /// m
    pub protrusion: f64,
    /// m
    pub deflection: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EiFit {
    pub ei: f64,
    /// Per-sample EI estimates, in input order.
    pub estimates: Vec<f64>,
    /// Root-mean-square deflection residual of the fitted EI, m.
    pub rms_residual: f64,
}

/// Fits EI from cantilever samples of a strip with linear density `lambda`.
///
/// Each sample inverts `R = λ·g·L⁴/(8·EI)` exactly; the fit is the mean of
/// those per-sample estimates.
pub fn calibrate_ei(samples: &[CantileverSample], lambda: f64) -> Result<EiFit> {
    if samples.is_empty() {
        return Err(Error::Calibration("no cantilever samples".into()));
    }
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::Calibration(format!("linear density must be positive, got {lambda}")));
    }
    let mut estimates = Vec::with_capacity(samples.len());
    for (index, s) in samples.iter().enumerate() {
        if !(s.protrusion.is_finite() && s.protrusion > 0.0) {
            return Err(Error::InvalidSample {
                index,
                reason: format!("protrusion must be positive, got {}", s.protrusion),
            });
        }
        if !(s.deflection.is_finite() && s.deflection > 0.0) {
            return Err(Error::InvalidSample {
                index,
                reason: format!("deflection must be positive, got {}", s.deflection),
            });
        }
        estimates.push(lambda * GRAVITY * s.protrusion.powi(4) / (8.0 * s.deflection));
    }
    let ei = estimates.iter().sum::<f64>() / estimates.len() as f64;
    let sq: f64 = samples
        .iter()
        .map(|s| {
            let predicted = lambda * GRAVITY * s.protrusion.powi(4) / (8.0 * ei);
            (predicted - s.deflection).powi(2)
        })
        .sum();
    let rms_residual = (sq / samples.len() as f64).sqrt();
    Ok(EiFit { ei, estimates, rms_residual })
}

/// A known-good protrusion for some reference material.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtrusionReference {
    pub ei: f64,
    pub lambda: f64,
    pub protrusion: f64,
}

/// Protrusion giving a new material the same tip sag as the reference.
///
/// At equal linear density this is `L_ref·(EI_new/EI_ref)^¼`; a different
/// density scales it further by `(λ_ref/λ_new)^¼`.
pub fn required_protrusion(ei_new: f64, lambda_new: f64, reference: &ProtrusionReference) -> Result<f64> {
    let inputs = [
        ("EI_new", ei_new),
        ("lambda_new", lambda_new),
        ("EI_ref", reference.ei),
        ("lambda_ref", reference.lambda),
        ("L_ref", reference.protrusion),
    ];
    for (name, v) in inputs {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::Domain(format!("{name} must be positive, got {v}")));
        }
    }
    let stiffness_ratio = ei_new / reference.ei;
    let density_ratio = reference.lambda / lambda_new;
    Ok(reference.protrusion * (stiffness_ratio * density_ratio).powf(0.25))
}

/// Record shape of the material library file. Missing optional fields are
/// filled from the defaults above.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialRecord {
    pub name: String,
    pub gsm: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thickness: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub youngs_modulus: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub volumetric_density: Option<f64>,
    pub mu0: f64,
    pub mu1: f64,
    pub width: f64,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub unvalidated: bool,
}

impl TryFrom<MaterialRecord> for Material {
    type Error = Error;

    fn try_from(r: MaterialRecord) -> Result<Self> {
        let rho = r.volumetric_density.unwrap_or(DEFAULT_VOLUMETRIC_DENSITY);
        let m = Material {
            thickness: r.thickness.unwrap_or_else(|| derived_thickness(r.gsm, rho)),
            thickness_derived: r.thickness.is_none(),
            youngs_modulus: r.youngs_modulus.unwrap_or(DEFAULT_YOUNGS_MODULUS),
            volumetric_density: rho,
            name: r.name,
            gsm: r.gsm,
            mu0: r.mu0,
            mu1: r.mu1,
            width: r.width,
            unvalidated: r.unvalidated,
        };
        m.validate()?;
        Ok(m)
    }
}

impl From<&Material> for MaterialRecord {
    fn from(m: &Material) -> Self {
        MaterialRecord {
            name: m.name.clone(),
            gsm: m.gsm,
            thickness: (!m.thickness_derived).then_some(m.thickness),
            youngs_modulus: Some(m.youngs_modulus),
            volumetric_density: Some(m.volumetric_density),
            mu0: m.mu0,
            mu1: m.mu1,
            width: m.width,
            unvalidated: m.unvalidated,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaterialLibrary {
    materials: Vec<Material>,
}

impl MaterialLibrary {
    /// The shipped specimen set (copy paper, printing paper, white cardboard)
    /// plus unvalidated tablecloth/tissue presets.
    pub fn builtin() -> Self {
        Self::from_json_str(BUILTIN_LIBRARY).expect("builtin material library is valid")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let records: Vec<MaterialRecord> = serde_json::from_str(s)?;
        let materials = records.into_iter().map(Material::try_from).collect::<Result<Vec<_>>>()?;
        Ok(MaterialLibrary { materials })
    }

    pub fn to_json_string(&self) -> String {
        let records: Vec<MaterialRecord> = self.materials.iter().map(MaterialRecord::from).collect();
        serde_json::to_string_pretty(&records).expect("records serialize")
    }

    pub fn materials(&self) -> &[Material] {
        &self.materials
    }

    pub fn by_name(&self, name: &str) -> Result<&Material> {
        self.materials
            .iter()
            .find(|m| m.name == name)
            .ok_or_else(|| Error::UnknownMaterial(name.to_string()))
    }

    /// First validated specimen with exactly this GSM.
    pub fn by_gsm(&self, gsm: f64) -> Option<&Material> {
        self.materials.iter().find(|m| !m.unvalidated && m.gsm == gsm)
    }

    /// Library specimen at `gsm` if there is one, otherwise `base` moved to
    /// that GSM.
    pub fn material_at_gsm(&self, base: &Material, gsm: f64) -> Result<Material> {
        match self.by_gsm(gsm) {
            Some(m) => Ok(m.clone()),
            None => base.with_gsm(gsm),
        }
    }

    pub fn replace(&mut self, material: Material) {
        match self.materials.iter_mut().find(|m| m.name == material.name) {
            Some(slot) => *slot = material,
            None => self.materials.push(material),
        }
    }
}
