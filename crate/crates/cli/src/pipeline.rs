//! Computations shared by several commands, kept free of file output so they
//! can be exercised directly.

use std::path::{Path, PathBuf};

use dcl_core::constants::{DEPLOYED_BAND_PCT, TABLE, TABLE_DEPLOYED};
use dcl_core::dynamics::{
    calibrate, default_engagement_flexion, relative_change, simulate_all, CalibrationTargets,
};
use dcl_core::mocap::ReportRow;
use dcl_core::stiffness::{fit_operating_region, read_samples_csv};
use dcl_core::{
    JumpMode, JumpResult, JumpScenario, RobotParams, StiffnessModel, TorqueAngleSample,
};
use serde::Serialize;

use crate::config::{RunConfig, StiffnessConfig};
use crate::error::{CliError, Result};
use crate::require_file;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SampleSource {
    Surrogate { seed: u64 },
    External { path: PathBuf },
}

impl SampleSource {
    pub fn describe(&self) -> String {
        match self {
            SampleSource::Surrogate { seed } => {
                format!("surrogate characterization data (seed {seed})")
            }
            SampleSource::External { path } => {
                format!("characterization data from {}", path.display())
            }
        }
    }
}

/// Characterization data from `csv` if given, else from the surrogate.
pub fn load_samples(
    cfg: &StiffnessConfig,
    csv: Option<&Path>,
    seed: u64,
) -> Result<(Vec<TorqueAngleSample>, SampleSource)> {
    match csv.or(cfg.samples_csv.as_deref()) {
        Some(path) => {
            require_file("stiffness", path)?;
            Ok((
                read_samples_csv(path)?,
                SampleSource::External {
                    path: path.to_path_buf(),
                },
            ))
        }
        None => {
            let s = cfg.surrogate.to_surrogate()?;
            Ok((
                s.generate(cfg.surrogate.samples, seed),
                SampleSource::Surrogate { seed },
            ))
        }
    }
}

pub fn fit(cfg: &StiffnessConfig, samples: &[TorqueAngleSample]) -> Result<StiffnessModel> {
    if !(cfg.operating_max_deg > 0.0 && cfg.operating_max_deg < 90.0) {
        return Err(CliError::validation(
            "stiffness",
            format!("invalid operating_max_deg: {}", cfg.operating_max_deg),
        ));
    }
    Ok(fit_operating_region(
        samples,
        cfg.operating_max_deg.to_radians(),
    )?)
}

/// Scenario template shared by all modes.
pub fn scenario(
    cfg: &RunConfig,
    params: &RobotParams,
    model: StiffnessModel,
) -> Result<JumpScenario> {
    let squat = cfg.scenario.squat_height_mm / 1000.0;
    let engagement = match cfg.scenario.engagement_flexion_deg {
        Some(d) => d.to_radians(),
        None => default_engagement_flexion(params, squat, Some(&model))?,
    };
    let s = JumpScenario {
        mode: JumpMode::Deployed,
        squat_height: squat,
        stiffness: Some(model),
        engagement_flexion: engagement,
    };
    s.validate(params)?;
    Ok(s)
}

#[derive(Debug, Clone, Serialize)]
pub struct Table1 {
    pub rows: Vec<ReportRow>,
    pub results: Vec<JumpResult>,
    pub params: RobotParams,
    pub model: StiffnessModel,
    pub source: SampleSource,
    pub samples: Vec<TorqueAngleSample>,
    pub engagement_flexion_deg: f64,
    pub deployed_delta_pct: f64,
    pub band_pct: (f64, f64),
    pub measured_delta_pct: f64,
}

impl Table1 {
    pub fn result(&self, mode: JumpMode) -> &JumpResult {
        self.results
            .iter()
            .find(|r| r.mode == mode)
            .expect("all modes simulated")
    }

    pub fn in_band(&self) -> bool {
        (self.band_pct.0..=self.band_pct.1).contains(&self.deployed_delta_pct)
    }

    /// Text report: simulated table, measured table, band verdict, notes.
    pub fn render(&self) -> String {
        let mut s = String::from("Vertical jump, simulated\n\n");
        s.push_str(&dcl_core::mocap::format_table(&self.rows));
        s.push_str("\nVertical jump, measured on hardware (mean of 5 trials)\n\n");
        let measured: Vec<ReportRow> = TABLE
            .iter()
            .map(|r| ReportRow {
                group: r.group.into(),
                h_max_mm: r.h_max_mm,
                delta_h_mm: r.delta_h_mm,
                std_mm: None,
                relative_change_pct: r.relative_change_pct,
                note: None,
            })
            .collect();
        s.push_str(&dcl_core::mocap::format_table(&measured));
        s.push_str(&format!(
            "\nDeployed relative change: predicted {:+.1}%, acceptance band [{:+.1}%, {:+.1}%], measured {:+.1}% -> {}\n",
            self.deployed_delta_pct,
            self.band_pct.0,
            self.band_pct.1,
            self.measured_delta_pct,
            if self.in_band() { "inside band" } else { "OUTSIDE band" }
        ));
        let a = self.model.alpha;
        s.push_str(&format!(
            "\nNotes\n\
             [calibrated] knee_torque_max = {:.3} N·m and module_mass = {:.2} g are fitted so the\n\
             \x20            Baseline and Stowed rows match the measured effective jump heights.\n\
             [predicted]  the Deployed row is not fitted. Its stiffness law comes from {};\n\
             \x20            α0..α3 = {:.4}, {:.4}, {:.4}, {:.4} (R² = {:.4}) are fitted to that data.\n\
             \x20            Module engagement at knee flexion {:.2}°.\n",
            self.params.knee_torque_max,
            self.params.module_mass * 1000.0,
            self.source.describe(),
            a[0],
            a[1],
            a[2],
            a[3],
            self.model.r_squared,
            self.engagement_flexion_deg
        ));
        s
    }
}

/// Fit the stiffness law, calibrate on the Baseline and Stowed rows, and
/// simulate all three groups.
pub fn table1(cfg: &RunConfig, seed: u64, csv: Option<&Path>, dt: f64) -> Result<Table1> {
    let (samples, source) = load_samples(&cfg.stiffness, csv, seed)?;
    let model = fit(&cfg.stiffness, &samples)?;
    let params0 = cfg.robot.to_params()?;
    let template = scenario(cfg, &params0, model)?;
    let targets = CalibrationTargets {
        baseline_mm: cfg.calibration.baseline_mm,
        stowed_mm: cfg.calibration.stowed_mm,
    };
    let params = calibrate(targets, &params0, &template, dt)?;

    let scenarios: Vec<JumpScenario> = JumpMode::ALL
        .iter()
        .map(|&m| template.with_mode(m))
        .collect();
    let results = simulate_all(&scenarios, &params, dt)
        .into_iter()
        .collect::<std::result::Result<Vec<_>, _>>()?;

    let base = results[0].delta_h * 1000.0;
    let mut rows = Vec::new();
    for r in &results {
        let dh = r.delta_h * 1000.0;
        rows.push(ReportRow {
            group: r.mode.to_string(),
            h_max_mm: r.h_max * 1000.0,
            delta_h_mm: dh,
            std_mm: None,
            relative_change_pct: match r.mode {
                JumpMode::Baseline => None,
                _ => Some(relative_change(dh, base)?),
            },
            note: Some(match r.mode {
                JumpMode::Deployed => "predicted".into(),
                _ => "calibrated".into(),
            }),
        });
    }
    let deployed_delta_pct = rows[2].relative_change_pct.unwrap_or_default();
    Ok(Table1 {
        rows,
        results,
        params,
        model,
        source,
        samples,
        engagement_flexion_deg: template.engagement_flexion.to_degrees(),
        deployed_delta_pct,
        band_pct: DEPLOYED_BAND_PCT,
        measured_delta_pct: TABLE_DEPLOYED.relative_change_pct.unwrap_or_default(),
    })
}
