#![allow(dead_code)]

use sheetgrasp::gripper::GripperModel;
use sheetgrasp::materials::{Material, MaterialLibrary};
use sheetgrasp::scene::{Pose2D, Scene, SheetInstance};

pub const DESK_SCENE: &str = include_str!("../../data/scenes/desk.json");

pub fn gripper() -> GripperModel {
    GripperModel::default()
}

pub fn library() -> MaterialLibrary {
    MaterialLibrary::builtin()
}

pub fn specimen(gsm: f64) -> Material {
    library().by_gsm(gsm).unwrap_or_else(|| panic!("no {gsm} g specimen")).clone()
}

/// Desk scene with the sheet swapped for the given specimen.
pub fn desk(gsm: f64) -> Scene {
    let mut scene = Scene::from_json_str(DESK_SCENE, &library()).unwrap();
    scene.sheet.material = specimen(gsm);
    scene
}

pub fn sheet_of(material: Material) -> SheetInstance {
    SheetInstance::from_pose(material, 0.297, 0.105, Pose2D::new(0.4, 0.0, 0.0)).unwrap()
}

pub fn deg(d: f64) -> f64 {
    d.to_radians()
}

/// Relative difference.
pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
