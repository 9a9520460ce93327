use dcl_core::dynamics::{calibrate, relative_change, simulate_all, CalibrationTargets};
use dcl_core::stiffness::ModelFile;
use dcl_core::{JumpMode, JumpResult, RobotParams, StiffnessModel};
use serde::Serialize;

use crate::error::CliError;
use crate::pipeline;
use crate::{plot, require_file, Ctx, JumpSimArgs, Result};

#[derive(Serialize)]
struct Summary<'a> {
    params: &'a RobotParams,
    calibrated: bool,
    stiffness_alpha: [f64; 4],
    stiffness_source: String,
    engagement_flexion_deg: f64,
    dt_s: f64,
    results: Vec<ModeSummary<'a>>,
}

#[derive(Serialize)]
struct ModeSummary<'a> {
    #[serde(flatten)]
    result: &'a JumpResult,
    delta_h_mm: f64,
    relative_change_pct: Option<f64>,
}

fn load_model(ctx: &Ctx, args: &JumpSimArgs) -> Result<(StiffnessModel, String)> {
    if let Some(path) = args
        .stiffness_model
        .as_ref()
        .or(ctx.cfg.scenario.stiffness_model.as_ref())
    {
        require_file("stiffness", path)?;
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io("stiffness", format!("{}: {e}", path.display())))?;
        let file: ModelFile = serde_json::from_str(&text)
            .map_err(|e| CliError::validation("stiffness", format!("{}: {e}", path.display())))?;
        return Ok((file.try_into()?, format!("model file {}", path.display())));
    }
    let (samples, source) = pipeline::load_samples(&ctx.cfg.stiffness, None, ctx.seed)?;
    let model = pipeline::fit(&ctx.cfg.stiffness, &samples)?;
    Ok((model, source.describe()))
}

pub fn sim(ctx: &mut Ctx, args: &JumpSimArgs) -> Result<()> {
    let mut robot = ctx.cfg.robot.clone();
    if let Some(v) = args.knee_torque_max_nm {
        robot.knee_torque_max_nm = v;
    }
    if let Some(v) = args.module_mass_kg {
        robot.module_mass_kg = v;
    }
    let modes: Vec<JumpMode> = if args.modes.is_empty() {
        ctx.cfg.scenario.modes.clone()
    } else {
        args.modes
            .iter()
            .map(|m| m.parse())
            .collect::<std::result::Result<_, _>>()?
    };
    if modes.is_empty() {
        return Err(CliError::validation("dynamics", "no jump modes selected"));
    }
    let dt = args.dt.unwrap_or(ctx.cfg.scenario.dt_s);

    let (model, source) = load_model(ctx, args)?;
    let mut params = robot.to_params()?;
    let template = pipeline::scenario(&ctx.cfg, &params, model)?;
    let calibrated = ctx.cfg.calibration.enabled && !args.no_calibrate;
    if calibrated {
        let targets = CalibrationTargets {
            baseline_mm: ctx.cfg.calibration.baseline_mm,
            stowed_mm: ctx.cfg.calibration.stowed_mm,
        };
        params = calibrate(targets, &params, &template, dt)?;
    }

    // the baseline is always simulated so relative changes can be reported
    let mut all = modes.clone();
    if !all.contains(&JumpMode::Baseline) {
        all.insert(0, JumpMode::Baseline);
    }
    let scenarios: Vec<_> = all.iter().map(|&m| template.with_mode(m)).collect();
    let results = simulate_all(&scenarios, &params, dt)
        .into_iter()
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let base = results[all
        .iter()
        .position(|&m| m == JumpMode::Baseline)
        .unwrap_or(0)]
    .delta_h
        * 1000.0;

    let mut summaries = Vec::new();
    let mut plots = Vec::new();
    for r in results.iter().filter(|r| modes.contains(&r.mode)) {
        let name = r.mode.to_string().to_ascii_lowercase();
        let csv = format!("jump_{name}_trajectory.csv");
        ctx.out.write(&csv, r.trajectory_csv().as_bytes())?;
        plots.push((r.mode.to_string(), csv));
        let dh = r.delta_h * 1000.0;
        let rel = match r.mode {
            JumpMode::Baseline => None,
            _ => Some(relative_change(dh, base)?),
        };
        println!(
            "{:<9} ΔH = {:7.2} mm  H_max = {:7.2} mm  liftoff {:.3} m/s  motor {:.2} J  elastic {:.2} J{}",
            r.mode.to_string(),
            dh,
            r.h_max * 1000.0,
            r.liftoff_velocity,
            r.energy_motor,
            r.energy_elastic,
            rel.map(|p| format!("  δ = {p:+.1}%")).unwrap_or_default()
        );
        summaries.push(ModeSummary {
            result: r,
            delta_h_mm: dh,
            relative_change_pct: rel,
        });
    }
    ctx.out
        .write("trajectory.gp", plot::trajectory(&plots).as_bytes())?;
    ctx.out.json(
        "jump_summary.json",
        &Summary {
            params: &params,
            calibrated,
            stiffness_alpha: model.alpha,
            stiffness_source: source,
            engagement_flexion_deg: template.engagement_flexion.to_degrees(),
            dt_s: dt,
            results: summaries,
        },
    )?;
    if calibrated {
        println!(
            "calibrated: knee_torque_max = {:.3} N·m, module_mass = {:.2} g",
            params.knee_torque_max,
            params.module_mass * 1000.0
        );
    }
    println!("wrote {}/jump_summary.json", ctx.out.dir().display());
    Ok(())
}
