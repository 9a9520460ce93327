use dcl_core::mechanism::{required_force, sweep as landscape, sweep_csv, ProfileKind};
use dcl_core::MechanismState;
use serde::Serialize;

use crate::error::CliError;
use crate::{plot, Ctx, MechanismSweepArgs, Result};

#[derive(Serialize)]
struct Report {
    stroke_mm: f64,
    stowed_lock_mm: f64,
    stowed_phi_deg: f64,
    deployed_lock_mm: f64,
    deployed_phi_deg: f64,
    required_force_n: f64,
}

pub fn sweep(ctx: &mut Ctx, args: &MechanismSweepArgs) -> Result<()> {
    let mut c = ctx.cfg.cam.clone();
    if let Some(n) = args.samples {
        c.samples = n;
    }
    if let Some(p) = &args.profile {
        c.profile = match p.to_ascii_lowercase().as_str() {
            "linear" => ProfileKind::Linear,
            "cycloidal" => ProfileKind::Cycloidal,
            _ => {
                return Err(CliError::validation(
                    "mechanism",
                    format!("invalid profile: '{p}'"),
                ))
            }
        };
    }
    let cam = c.to_cam()?;
    let rows = landscape(&cam, c.samples)?;
    let stowed = MechanismState::settle(0.0, &cam)?;
    let deployed = stowed.toggle(&cam)?;
    let report = Report {
        stroke_mm: cam.stroke * 1000.0,
        stowed_lock_mm: stowed.s * 1000.0,
        stowed_phi_deg: stowed.phi.to_degrees(),
        deployed_lock_mm: deployed.s * 1000.0,
        deployed_phi_deg: deployed.phi.to_degrees(),
        required_force_n: required_force(&cam)?,
    };
    ctx.out
        .write("mechanism_sweep.csv", sweep_csv(&rows).as_bytes())?;
    ctx.out
        .write("mechanism.gp", plot::mechanism().as_bytes())?;
    ctx.out.json("mechanism_report.json", &report)?;
    println!(
        "mechanism: stowed lock at {:.3} mm ({:.2}°), deployed lock at {:.3} mm ({:.2}°), deploy force {:.2} N",
        report.stowed_lock_mm,
        report.stowed_phi_deg,
        report.deployed_lock_mm,
        report.deployed_phi_deg,
        report.required_force_n
    );
    println!("wrote {}/mechanism_sweep.csv", ctx.out.dir().display());
    Ok(())
}
