use dcl_core::stiffness::{samples_to_csv, ModelFile};
use dcl_core::{StiffnessModel, TorqueAngleSample};
use serde::Serialize;

use crate::pipeline::{self, SampleSource};
use crate::{plot, Ctx, Output, Result, StiffnessFitArgs, SurrogateArgs};

#[derive(Serialize)]
pub(crate) struct ModelReport {
    #[serde(flatten)]
    model: ModelFile,
    source: SampleSource,
    torque_at_operating_max_nm: f64,
    stored_energy_at_operating_max_j: f64,
    note: &'static str,
}

const NOTE: &str =
    "coefficients are fitted to the data named in `source`; they are not published values";

/// Curve table: every sample, with the model where it is defined.
fn curve_csv(samples: &[TorqueAngleSample], model: &StiffnessModel) -> String {
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.theta.total_cmp(&b.theta));
    let mut s = String::from("theta_deg,torque_nm,model_nm\n");
    for p in &sorted {
        let m = model
            .torque_at(p.theta, true)
            .map(|t| format!("{t:.6}"))
            .unwrap_or_default();
        s.push_str(&format!(
            "{:.6},{:.6},{m}\n",
            p.theta.to_degrees(),
            p.torque
        ));
    }
    s
}

/// Write the fitted model, its data and the plot script.
pub(crate) fn write_model(
    out: &Output,
    samples: &[TorqueAngleSample],
    model: &StiffnessModel,
    source: &SampleSource,
) -> Result<()> {
    out.write("stiffness_samples.csv", samples_to_csv(samples).as_bytes())?;
    out.write("stiffness_curve.csv", curve_csv(samples, model).as_bytes())?;
    out.write(
        "stiffness.gp",
        plot::stiffness(
            model.operating_max.to_degrees(),
            model.safety_max.to_degrees(),
        )
        .as_bytes(),
    )?;
    let report = ModelReport {
        model: ModelFile::from(model),
        source: source.clone(),
        torque_at_operating_max_nm: model.torque_at(model.operating_max, true)?,
        stored_energy_at_operating_max_j: model.stored_energy(model.operating_max)?,
        note: NOTE,
    };
    out.json("stiffness_model.json", &report)?;
    Ok(())
}

pub fn fit(ctx: &mut Ctx, args: &StiffnessFitArgs) -> Result<()> {
    let mut cfg = ctx.cfg.stiffness.clone();
    if let Some(v) = args.operating_max_deg {
        cfg.operating_max_deg = v;
    }
    let (samples, source) = pipeline::load_samples(&cfg, args.samples_csv.as_deref(), ctx.seed)?;
    let model = pipeline::fit(&cfg, &samples)?;
    write_model(&ctx.out, &samples, &model, &source)?;
    let a = model.alpha;
    println!(
        "stiffness: τ(θ) = {:.4}θ³ + {:.4}θ² + {:.4}θ + {:.4}, R² = {:.4}, safety limit {:.2}° ({})",
        a[3],
        a[2],
        a[1],
        a[0],
        model.r_squared,
        model.safety_max.to_degrees(),
        source.describe()
    );
    println!("wrote {}/stiffness_model.json", ctx.out.dir().display());
    Ok(())
}

pub fn surrogate(ctx: &mut Ctx, args: &SurrogateArgs) -> Result<()> {
    let mut cfg = ctx.cfg.stiffness.surrogate.clone();
    if let Some(n) = args.samples {
        cfg.samples = n;
    }
    if let Some(v) = args.noise_fraction {
        cfg.noise_fraction = v;
    }
    let samples = cfg.to_surrogate()?.generate(cfg.samples, ctx.seed);
    ctx.out
        .write("stiffness_samples.csv", samples_to_csv(&samples).as_bytes())?;
    println!(
        "wrote {} surrogate samples to {}/stiffness_samples.csv",
        samples.len(),
        ctx.out.dir().display()
    );
    Ok(())
}
