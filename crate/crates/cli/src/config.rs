//! JSON run configuration. Lengths are millimetres and angles degrees;
//! everything is converted to SI before reaching the models.
//!
//! Every block is optional and every key has a default, so an empty file is
//! a valid configuration. Unknown keys are rejected to catch typos.

use std::path::{Path, PathBuf};

use dcl_core::constants::{
    DESIGN_LIMIT_DEG, H_BASE_MM, MOCAP_RESOLUTION_MM, OPERATING_MAX_DEG, PEAK_TORQUE_NM,
    SWEEP_MAX_DEG, TABLE, TRIALS_PER_GROUP,
};
use dcl_core::lattice::{BoxDomain, Domain, SectorDomain};
use dcl_core::mechanism::{CamProfile, Detent, ProfileKind};
use dcl_core::stiffness::SurrogateFea;
use dcl_core::{JumpMode, RobotParams, TpmsKind};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_OUTPUT_DIR: &str = "out";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(rename = "$schema", skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub lattice: LatticeConfig,
    pub stiffness: StiffnessConfig,
    pub robot: RobotConfig,
    pub scenario: ScenarioConfig,
    pub calibration: CalibrationConfig,
    pub cam: CamConfig,
    pub mocap: MocapConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                return Err(CliError::validation(
                    "config",
                    format!("{} does not exist", path.display()),
                ))
            }
            Err(e) => return Err(CliError::io("config", format!("{}: {e}", path.display()))),
        };
        serde_json::from_str(&text)
            .map_err(|e| CliError::validation("config", format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LatticeConfig {
    pub kind: String,
    pub cell_size_mm: f64,
    pub level: f64,
    /// Relative density to reach by tuning the shell half-width.
    pub target_density: Option<f64>,
    /// Used when no target density is given.
    pub shell_halfwidth: f64,
    /// Voxels per unit cell.
    pub resolution: usize,
    /// Stratified samples per axis for the density estimate.
    pub density_samples: usize,
    pub domain: DomainConfig,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        LatticeConfig {
            kind: "gyroid".into(),
            cell_size_mm: 8.0,
            level: 0.0,
            target_density: Some(0.3),
            shell_halfwidth: 0.5,
            resolution: 24,
            density_samples: 48,
            domain: DomainConfig::default(),
        }
    }
}

impl LatticeConfig {
    pub fn kind(&self) -> Result<TpmsKind> {
        self.kind
            .parse()
            .map_err(|e: String| CliError::validation("lattice", format!("invalid kind: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainConfig {
    Sector {
        inner_radius_mm: f64,
        outer_radius_mm: f64,
        span_deg: [f64; 2],
        thickness_mm: f64,
    },
    Box {
        min_mm: [f64; 3],
        max_mm: [f64; 3],
    },
}

impl Default for DomainConfig {
    fn default() -> Self {
        DomainConfig::Sector {
            inner_radius_mm: 12.0,
            outer_radius_mm: 28.0,
            span_deg: [30.0, 90.0],
            thickness_mm: 8.0,
        }
    }
}

impl DomainConfig {
    pub fn to_domain(&self) -> Result<Domain> {
        let mm = |v: f64| v / 1000.0;
        Ok(match self {
            DomainConfig::Sector {
                inner_radius_mm,
                outer_radius_mm,
                span_deg,
                thickness_mm,
            } => Domain::Sector(SectorDomain::new(
                mm(*inner_radius_mm),
                mm(*outer_radius_mm),
                [span_deg[0].to_radians(), span_deg[1].to_radians()],
                mm(*thickness_mm),
            )?),
            DomainConfig::Box { min_mm, max_mm } => Domain::Box(BoxDomain::new(
                min_mm.map(mm).into(),
                max_mm.map(mm).into(),
            )?),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StiffnessConfig {
    /// External characterization data, `theta_deg,torque_nm`. When absent
    /// the surrogate generator supplies the data.
    pub samples_csv: Option<PathBuf>,
    pub operating_max_deg: f64,
    pub surrogate: SurrogateConfig,
}

impl Default for StiffnessConfig {
    fn default() -> Self {
        StiffnessConfig {
            samples_csv: None,
            operating_max_deg: OPERATING_MAX_DEG,
            surrogate: SurrogateConfig::default(),
        }
    }
}

/// The peak torque is taken to be per module.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SurrogateConfig {
    pub peak_torque_nm: f64,
    pub operating_max_deg: f64,
    pub densification_onset_deg: f64,
    pub sweep_max_deg: f64,
    pub cubic_share: f64,
    pub stiffening_rate_per_rad: f64,
    pub noise_fraction: f64,
    pub samples: usize,
}

impl Default for SurrogateConfig {
    fn default() -> Self {
        let s = SurrogateFea::default();
        SurrogateConfig {
            peak_torque_nm: PEAK_TORQUE_NM,
            operating_max_deg: OPERATING_MAX_DEG,
            densification_onset_deg: DESIGN_LIMIT_DEG,
            sweep_max_deg: SWEEP_MAX_DEG,
            cubic_share: s.cubic_share,
            stiffening_rate_per_rad: s.stiffening_rate,
            noise_fraction: s.noise_fraction,
            samples: 91,
        }
    }
}

impl SurrogateConfig {
    pub fn to_surrogate(&self) -> Result<SurrogateFea> {
        let s = SurrogateFea {
            peak_torque: self.peak_torque_nm,
            operating_max: self.operating_max_deg.to_radians(),
            densification_onset: self.densification_onset_deg.to_radians(),
            sweep_max: self.sweep_max_deg.to_radians(),
            cubic_share: self.cubic_share,
            stiffening_rate: self.stiffening_rate_per_rad,
            noise_fraction: self.noise_fraction,
        };
        let bad = |field: &str, why: &str| {
            CliError::validation("stiffness", format!("invalid surrogate.{field}: {why}"))
        };
        if !(s.peak_torque > 0.0) {
            return Err(bad("peak_torque_nm", "must be positive"));
        }
        if !(s.operating_max > 0.0
            && s.operating_max < s.densification_onset
            && s.densification_onset <= s.sweep_max)
        {
            return Err(bad(
                "operating_max_deg",
                "need 0 < operating max < densification onset ≤ sweep max",
            ));
        }
        if !(0.0..=1.0).contains(&s.cubic_share) {
            return Err(bad("cubic_share", "must lie in [0, 1]"));
        }
        if !(s.stiffening_rate > 0.0) {
            return Err(bad("stiffening_rate_per_rad", "must be positive"));
        }
        if !(s.noise_fraction >= 0.0) {
            return Err(bad("noise_fraction", "must be non-negative"));
        }
        if self.samples < 16 {
            return Err(bad("samples", "need at least 16"));
        }
        Ok(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RobotConfig {
    pub body_mass_kg: f64,
    pub module_mass_kg: f64,
    pub n_modules: u32,
    pub thigh_length_mm: f64,
    pub shank_length_mm: f64,
    pub knee_torque_max_nm: f64,
    pub knee_speed_max_rad_s: f64,
    pub n_legs: u32,
    pub gravity: f64,
}

impl Default for RobotConfig {
    fn default() -> Self {
        let p = RobotParams::default();
        RobotConfig {
            body_mass_kg: p.body_mass,
            module_mass_kg: p.module_mass,
            n_modules: p.n_modules,
            thigh_length_mm: p.thigh_length * 1000.0,
            shank_length_mm: p.shank_length * 1000.0,
            knee_torque_max_nm: p.knee_torque_max,
            knee_speed_max_rad_s: p.knee_speed_max,
            n_legs: p.n_legs,
            gravity: p.gravity,
        }
    }
}

impl RobotConfig {
    pub fn to_params(&self) -> Result<RobotParams> {
        let p = RobotParams {
            body_mass: self.body_mass_kg,
            module_mass: self.module_mass_kg,
            n_modules: self.n_modules,
            thigh_length: self.thigh_length_mm / 1000.0,
            shank_length: self.shank_length_mm / 1000.0,
            knee_torque_max: self.knee_torque_max_nm,
            knee_speed_max: self.knee_speed_max_rad_s,
            n_legs: self.n_legs,
            gravity: self.gravity,
        };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub modes: Vec<JumpMode>,
    pub squat_height_mm: f64,
    /// Knee flexion where the module starts to compress. By default it is
    /// placed so the module reaches its operating maximum at the squat.
    pub engagement_flexion_deg: Option<f64>,
    pub dt_s: f64,
    /// Fitted model JSON from `stiffness fit`; when absent the stiffness
    /// block is fitted on the fly.
    pub stiffness_model: Option<PathBuf>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            modes: JumpMode::ALL.to_vec(),
            squat_height_mm: H_BASE_MM,
            engagement_flexion_deg: None,
            dt_s: 1e-4,
            stiffness_model: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrationConfig {
    pub enabled: bool,
    pub baseline_mm: f64,
    pub stowed_mm: f64,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        CalibrationConfig {
            enabled: true,
            baseline_mm: TABLE[0].delta_h_mm,
            stowed_mm: TABLE[1].delta_h_mm,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CamConfig {
    pub stroke_mm: f64,
    pub total_rotation_deg: f64,
    pub profile: ProfileKind,
    pub spring_rate_n_per_m: f64,
    pub spring_preload_n: f64,
    pub detent_depth_mj: f64,
    pub detent_width_mm: f64,
    /// Landscape samples written by `mechanism sweep`.
    pub samples: usize,
}

impl Default for CamConfig {
    fn default() -> Self {
        CamConfig {
            stroke_mm: 10.0,
            total_rotation_deg: 90.0,
            profile: ProfileKind::Linear,
            spring_rate_n_per_m: 500.0,
            spring_preload_n: 2.0,
            detent_depth_mj: 5.0,
            detent_width_mm: 1.2,
            samples: 501,
        }
    }
}

impl CamConfig {
    pub fn to_cam(&self) -> Result<CamProfile> {
        let stroke = self.stroke_mm / 1000.0;
        let width = self.detent_width_mm / 1000.0;
        let depth = self.detent_depth_mj / 1000.0;
        let cam = CamProfile {
            stroke,
            total_rotation: self.total_rotation_deg.to_radians(),
            profile: self.profile,
            spring_rate: self.spring_rate_n_per_m,
            spring_preload: self.spring_preload_n,
            detents: vec![
                Detent {
                    position: 0.5 * width,
                    depth,
                    width,
                },
                Detent {
                    position: stroke - 0.5 * width,
                    depth,
                    width,
                },
            ],
        };
        cam.validate()?;
        Ok(cam)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MocapConfig {
    /// Fixed squat height in mm, or `"auto"` to estimate it per trial.
    pub h_base: HBase,
    pub smoothing_window: usize,
    pub trunk_body: String,
    /// Group whose mean ΔH is the reference for relative change.
    pub baseline_group: String,
    pub synth: SynthConfig,
}

impl Default for MocapConfig {
    fn default() -> Self {
        MocapConfig {
            h_base: HBase::Fixed(H_BASE_MM),
            smoothing_window: 5,
            trunk_body: dcl_core::mocap::TRUNK.into(),
            baseline_group: "baseline".into(),
            synth: SynthConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HBase {
    Fixed(f64),
    Auto(AutoTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AutoTag {
    Auto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub groups: Vec<SynthGroup>,
    pub trials_per_group: usize,
    pub base_mm: f64,
    pub rate_hz: f64,
    pub noise_mm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthGroup {
    pub name: String,
    pub apex_mm: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            groups: TABLE
                .iter()
                .map(|r| SynthGroup {
                    name: r.group.to_ascii_lowercase(),
                    apex_mm: r.h_max_mm,
                })
                .collect(),
            trials_per_group: TRIALS_PER_GROUP,
            base_mm: H_BASE_MM,
            rate_hz: 240.0,
            noise_mm: MOCAP_RESOLUTION_MM,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_default() {
        let c: RunConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(c, RunConfig::default());
        c.lattice.domain.to_domain().unwrap();
        c.robot.to_params().unwrap();
        c.cam.to_cam().unwrap();
        c.stiffness.surrogate.to_surrogate().unwrap();
    }

    #[test]
    fn shipped_default_matches_code() {
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/default.json");
        let c = RunConfig::load(Path::new(path)).unwrap();
        let expected = RunConfig {
            schema: Some("./schema.json".into()),
            seed: Some(DEFAULT_SEED),
            output_dir: Some(DEFAULT_OUTPUT_DIR.into()),
            ..RunConfig::default()
        };
        assert_eq!(c, expected);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"lattice": {"cell": 3}}"#).is_err());
    }

    #[test]
    fn h_base_forms() {
        let m: MocapConfig = serde_json::from_str(r#"{"h_base": "auto"}"#).unwrap();
        assert_eq!(m.h_base, HBase::Auto(AutoTag::Auto));
        let m: MocapConfig = serde_json::from_str(r#"{"h_base": 280.0}"#).unwrap();
        assert_eq!(m.h_base, HBase::Fixed(280.0));
    }
}
