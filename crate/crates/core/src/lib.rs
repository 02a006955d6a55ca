//! Grasp planning for thin flexible sheets with a two-sided soft gripper.
//!
//! The crate decides whether, and how, a soft gripper can pick a paper-like
//! sheet off a table by exploiting the environment:
//!
//! - **top grasp**: pinch the sheet against the tabletop until it buckles,
//! - **top scoop**: the same with a tilted gripper scooping one side,
//! - **wall grasp**: slide the sheet into a wall so it bulges up,
//! - **edge grasp**: push the sheet past the table edge and grip the overhang.
//!
//! Modules are layered bottom-up: [`materials`] and [`gripper`] describe the
//! physical parts, [`mechanics`] holds the force criteria, [`scene`] the planar
//! world, [`strategies`] the planners, [`analysis`] the workspace sweeps and
//! strategy selection, and [`sim`] a stage-by-stage force trace synthesizer.

pub mod analysis;
pub mod error;
pub mod gripper;
pub mod materials;
pub mod mechanics;
pub mod scene;
pub mod sim;
pub mod strategies;

#[cfg(feature = "cli")]
pub mod cli;

pub use error::{Error, Result};

/// Gravitational acceleration, m/s².
pub const GRAVITY: f64 = 9.81;

pub(crate) fn mm(v: f64) -> f64 {
    v / 1000.0
}

pub(crate) fn to_mm(v: f64) -> f64 {
    v * 1000.0
}
