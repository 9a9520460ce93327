//! Modeling toolkit for a deployable compliant quadruped leg.
//!
//! The crate is split along the physical pipeline:
//!
//! - [`lattice`]: TPMS implicit fields, sector-shaped module domains, relative
//!   density and watertight surface extraction with binary STL export.
//! - [`stiffness`]: cubic torque-angle law identified on the operating region,
//!   region enforcement and stored elastic energy.
//! - [`dynamics`]: planar vertical-jump model with a knee torque-speed envelope
//!   and a parallel elastic element, plus two-parameter calibration.
//! - [`mechanism`]: helical-cam flip mechanism with a bistable detent landscape.
//! - [`mocap`]: marker ingestion, three-marker rigid-body registration and
//!   jump-height statistics.
//!
//! Internally everything is SI (meters, radians, newton-meters) except
//! [`mocap`], which keeps millimeters end to end like the capture data.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod dynamics;
pub mod io;
pub mod lattice;
pub mod mechanism;
pub mod mocap;
pub mod stiffness;

pub use dynamics::{JumpMode, JumpResult, JumpScenario, RobotParams};
pub use lattice::{Domain, SectorDomain, SurfaceMesh, TpmsField, TpmsKind};
pub use mechanism::{CamProfile, MechanismState};
pub use mocap::{MarkerFrame, RigidBodyPose, TrialResult};
pub use stiffness::{StiffnessModel, TorqueAngleSample};
