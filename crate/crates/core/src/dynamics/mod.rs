//! Vertical jump of a quadruped with optional parallel elastic modules.
//!
//! Legs are massless symmetric two-link chains acting in unison, driven only
//! at the knee. The body moves vertically; its height above ground equals the
//! hip-to-foot distance `l(q)`.

mod calibrate;
mod sim;

pub use calibrate::{calibrate, CalibrationTargets};
pub use sim::{ballistic_apex, simulate_all, simulate_jump, TrajectoryPoint};

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constants::H_BASE_MM;
use crate::stiffness::{StiffnessError, StiffnessModel};

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("invalid {field}: {reason}")]
    InvalidParameter { field: &'static str, reason: String },
    #[error("squat height {squat:.4} m is not reachable (leg length range 0..{max:.4} m)")]
    Unreachable { squat: f64, max: f64 },
    #[error("deployed mode requires a stiffness model")]
    MissingStiffness,
    #[error(transparent)]
    Stiffness(#[from] StiffnessError),
    #[error("relative change undefined for baseline ΔH = {0}")]
    ZeroBaseline(f64),
    #[error("could not bracket {param} for target {target_mm:.2} mm; response:\n{dump}")]
    Bracket {
        param: &'static str,
        target_mm: f64,
        dump: String,
    },
    #[error("stance phase did not end within {0} s")]
    NoTermination(f64),
}

fn invalid(field: &'static str, reason: impl Into<String>) -> DynamicsError {
    DynamicsError::InvalidParameter {
        field,
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RobotParams {
    /// kg
    pub body_mass: f64,
    /// kg, per module
    pub module_mass: f64,
    pub n_modules: u32,
    /// m
    pub thigh_length: f64,
    /// m
    pub shank_length: f64,
    /// N·m per leg, stall torque of the knee actuator
    pub knee_torque_max: f64,
    /// rad/s, no-load knee speed
    pub knee_speed_max: f64,
    pub n_legs: u32,
    /// m/s²
    pub gravity: f64,
}

impl Default for RobotParams {
    fn default() -> Self {
        RobotParams {
            body_mass: 15.0,
            module_mass: 0.015,
            n_modules: 4,
            thigh_length: 0.213,
            shank_length: 0.213,
            knee_torque_max: 30.0,
            knee_speed_max: 30.0,
            n_legs: 4,
            gravity: 9.81,
        }
    }
}

impl RobotParams {
    pub fn validate(&self) -> Result<(), DynamicsError> {
        let positive = [
            ("body_mass", self.body_mass),
            ("thigh_length", self.thigh_length),
            ("shank_length", self.shank_length),
            ("knee_speed_max", self.knee_speed_max),
            ("gravity", self.gravity),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(name, format!("must be positive, got {v}")));
            }
        }
        for (name, v) in [
            ("module_mass", self.module_mass),
            ("knee_torque_max", self.knee_torque_max),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid(name, format!("must be non-negative, got {v}")));
            }
        }
        if self.n_legs == 0 {
            return Err(invalid("n_legs", "must be at least 1"));
        }
        if self.n_modules == 0 || self.n_modules > self.n_legs {
            return Err(invalid(
                "n_modules",
                format!("must be in 1..={}, got {}", self.n_legs, self.n_modules),
            ));
        }
        Ok(())
    }

    /// Fully extended leg length, m.
    pub fn max_leg_length(&self) -> f64 {
        self.thigh_length + self.shank_length
    }

    /// Moving mass for a scenario, kg.
    pub fn total_mass(&self, mode: JumpMode) -> f64 {
        match mode {
            JumpMode::Baseline => self.body_mass,
            JumpMode::Stowed | JumpMode::Deployed => {
                self.body_mass + self.n_modules as f64 * self.module_mass
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JumpMode {
    /// No modules mounted.
    Baseline,
    /// Modules mounted, flipped out of the load path.
    Stowed,
    /// Modules engaged in parallel with the knee.
    Deployed,
}

impl JumpMode {
    pub const ALL: [JumpMode; 3] = [JumpMode::Baseline, JumpMode::Stowed, JumpMode::Deployed];
}

impl fmt::Display for JumpMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            JumpMode::Baseline => "Baseline",
            JumpMode::Stowed => "Stowed",
            JumpMode::Deployed => "Deployed",
        })
    }
}

impl FromStr for JumpMode {
    type Err = DynamicsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "baseline" => Ok(JumpMode::Baseline),
            "stowed" => Ok(JumpMode::Stowed),
            "deployed" => Ok(JumpMode::Deployed),
            _ => Err(invalid("mode", format!("unknown jump mode '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpScenario {
    pub mode: JumpMode,
    /// Standardized squat height, m.
    pub squat_height: f64,
    pub stiffness: Option<StiffnessModel>,
    /// Knee flexion (π − q) at which the module starts to be compressed, rad.
    pub engagement_flexion: f64,
}

impl JumpScenario {
    /// Scenario at the standard squat depth, with the module compressed to the
    /// end of its operating region at the bottom of the squat.
    pub fn standard(
        mode: JumpMode,
        stiffness: Option<StiffnessModel>,
        params: &RobotParams,
    ) -> Result<Self, DynamicsError> {
        let squat_height = H_BASE_MM / 1000.0;
        let engagement_flexion =
            default_engagement_flexion(params, squat_height, stiffness.as_ref())?;
        Ok(JumpScenario {
            mode,
            squat_height,
            stiffness,
            engagement_flexion,
        })
    }

    pub fn with_mode(&self, mode: JumpMode) -> Self {
        JumpScenario {
            mode,
            ..self.clone()
        }
    }

    pub fn validate(&self, params: &RobotParams) -> Result<(), DynamicsError> {
        knee_angle_for_length(self.squat_height, params)?;
        if !(self.engagement_flexion.is_finite() && self.engagement_flexion >= 0.0) {
            return Err(invalid(
                "engagement_flexion",
                format!(
                    "must be a non-negative angle, got {}",
                    self.engagement_flexion
                ),
            ));
        }
        if self.mode == JumpMode::Deployed {
            self.stiffness
                .as_ref()
                .ok_or(DynamicsError::MissingStiffness)?
                .validate()?;
        }
        Ok(())
    }
}

/// Engagement flexion that compresses the module to its operating maximum at
/// the given squat height.
pub fn default_engagement_flexion(
    params: &RobotParams,
    squat_height: f64,
    stiffness: Option<&StiffnessModel>,
) -> Result<f64, DynamicsError> {
    let q0 = knee_angle_for_length(squat_height, params)?;
    let op_max = stiffness
        .map(|s| s.operating_max)
        .unwrap_or_else(|| crate::constants::OPERATING_MAX_DEG.to_radians());
    Ok((PI - q0 - op_max).max(0.0))
}

/// Hip-to-foot distance for knee angle `q` (π = straight leg), m.
pub fn leg_length(q: f64, params: &RobotParams) -> f64 {
    let (a, b) = (params.thigh_length, params.shank_length);
    (a * a + b * b - 2.0 * a * b * q.cos()).max(0.0).sqrt()
}

/// `dl/dq`, m/rad.
pub fn leg_length_derivative(q: f64, params: &RobotParams) -> f64 {
    let l = leg_length(q, params);
    if l == 0.0 {
        return 0.0;
    }
    params.thigh_length * params.shank_length * q.sin() / l
}

/// Inverse of [`leg_length`] on `(0, π]`.
pub fn knee_angle_for_length(l: f64, params: &RobotParams) -> Result<f64, DynamicsError> {
    let (a, b) = (params.thigh_length, params.shank_length);
    let (lo, hi) = ((a - b).abs(), a + b);
    if !(l > lo && l <= hi) {
        return Err(DynamicsError::Unreachable { squat: l, max: hi });
    }
    Ok(knee_angle_clamped(l, params))
}

pub(crate) fn knee_angle_clamped(l: f64, params: &RobotParams) -> f64 {
    let (a, b) = (params.thigh_length, params.shank_length);
    ((a * a + b * b - l * l) / (2.0 * a * b))
        .clamp(-1.0, 1.0)
        .acos()
}

/// `δ = (ΔH − ΔH_baseline) / ΔH_baseline · 100`.
pub fn relative_change(delta_h: f64, delta_h_baseline: f64) -> Result<f64, DynamicsError> {
    if !(delta_h_baseline > 0.0) {
        return Err(DynamicsError::ZeroBaseline(delta_h_baseline));
    }
    Ok((delta_h - delta_h_baseline) / delta_h_baseline * 100.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpResult {
    pub mode: JumpMode,
    /// Apex height, m.
    pub h_max: f64,
    /// `h_max − squat_height`, m.
    pub delta_h: f64,
    pub liftoff_velocity: f64,
    pub liftoff_height: f64,
    pub liftoff_time: f64,
    /// Work done by the knee motors, J.
    pub energy_motor: f64,
    /// Work released by the elastic modules, J.
    pub energy_elastic: f64,
    #[serde(skip)]
    pub trajectory: Vec<TrajectoryPoint>,
}

impl JumpResult {
    pub fn trajectory_csv(&self) -> String {
        let mut s = String::from("t,z,zdot,q_knee_deg,tau_motor,tau_exo\n");
        for p in &self.trajectory {
            s.push_str(&format!(
                "{:.6},{:.6},{:.6},{:.4},{:.5},{:.5}\n",
                p.t,
                p.z,
                p.zdot,
                p.q.to_degrees(),
                p.tau_motor,
                p.tau_exo
            ));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leg_length_examples() {
        let p = RobotParams::default();
        assert!((leg_length(PI, &p) - 0.426).abs() < 1e-12);
        assert!((leg_length(PI / 2.0, &p) - 0.213 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let p = RobotParams::default();
        let h = 1e-6;
        let q = PI / 2.0;
        let fd = (leg_length(q + h, &p) - leg_length(q - h, &p)) / (2.0 * h);
        assert!((leg_length_derivative(q, &p) - fd).abs() < 1e-8);
    }

    #[test]
    fn inverse_round_trip() {
        let p = RobotParams::default();
        let q = knee_angle_for_length(0.2831, &p).unwrap();
        assert!((leg_length(q, &p) - 0.2831).abs() < 1e-12);
        assert!(knee_angle_for_length(0.5, &p).is_err());
    }

    #[test]
    fn relative_change_examples() {
        assert!((relative_change(437.1, 373.1).unwrap() - 17.153).abs() < 1e-3);
        assert!((relative_change(371.7, 373.1).unwrap() + 0.3752).abs() < 1e-3);
        assert_eq!(relative_change(373.1, 373.1).unwrap(), 0.0);
        assert!(relative_change(1.0, 0.0).is_err());
    }

    #[test]
    fn params_validation() {
        let mut p = RobotParams::default();
        assert!(p.validate().is_ok());
        p.n_modules = 5;
        assert!(p.validate().is_err());
        let p = RobotParams {
            body_mass: -1.0,
            ..Default::default()
        };
        assert!(p.validate().unwrap_err().to_string().contains("body_mass"));
    }

    #[test]
    fn standard_engagement_compresses_to_operating_max() {
        let p = RobotParams::default();
        let s =
            JumpScenario::standard(JumpMode::Deployed, Some(StiffnessModel::zero()), &p).unwrap();
        let q0 = knee_angle_for_length(s.squat_height, &p).unwrap();
        let theta = (PI - q0) - s.engagement_flexion;
        assert!((theta.to_degrees() - 29.0).abs() < 1e-9);
    }
}
