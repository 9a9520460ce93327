use dcl_core::mocap::table_csv;

use crate::cmd::stiffness::write_model;
use crate::{pipeline, plot, Ctx, Result, Table1Args};

pub fn table1(ctx: &mut Ctx, args: &Table1Args) -> Result<()> {
    let dt = args.dt.unwrap_or(ctx.cfg.scenario.dt_s);
    let t = pipeline::table1(&ctx.cfg, ctx.seed, args.stiffness_csv.as_deref(), dt)?;
    let text = t.render();

    write_model(&ctx.out, &t.samples, &t.model, &t.source)?;
    let mut plots = Vec::new();
    for r in &t.results {
        let name = format!(
            "jump_{}_trajectory.csv",
            r.mode.to_string().to_ascii_lowercase()
        );
        ctx.out.write(&name, r.trajectory_csv().as_bytes())?;
        plots.push((r.mode.to_string(), name));
    }
    ctx.out
        .write("trajectory.gp", plot::trajectory(&plots).as_bytes())?;
    ctx.out.write("table1.txt", text.as_bytes())?;
    ctx.out.write("table1.csv", table_csv(&t.rows).as_bytes())?;
    ctx.out.json("table1.json", &t)?;
    print!("{text}");
    println!("wrote {}/table1.txt", ctx.out.dir().display());
    Ok(())
}
