use dcl_core::lattice::{mesh_module, solve_level_for_density, stl_bytes, volume_fraction};
use dcl_core::TpmsField;
use serde::Serialize;

use crate::{Ctx, LatticeGenArgs, Result};

#[derive(Serialize)]
struct Report {
    kind: String,
    cell_size_mm: f64,
    level: f64,
    shell_halfwidth: f64,
    target_density: Option<f64>,
    volume_fraction: f64,
    triangle_count: usize,
    vertex_count: usize,
    euler_characteristic: i64,
    surface_area_mm2: f64,
    volume_mm3: f64,
    domain_volume_mm3: f64,
}

pub fn gen(ctx: &mut Ctx, args: &LatticeGenArgs) -> Result<()> {
    let mut c = ctx.cfg.lattice.clone();
    if let Some(k) = &args.kind {
        c.kind = k.clone();
    }
    if let Some(v) = args.cell_size_mm {
        c.cell_size_mm = v;
    }
    if let Some(v) = args.level {
        c.level = v;
    }
    if let Some(v) = args.target_density {
        c.target_density = Some(v);
    }
    if let Some(v) = args.shell_halfwidth {
        c.shell_halfwidth = v;
        c.target_density = None;
    }
    if let Some(v) = args.resolution {
        c.resolution = v;
    }
    if let Some(v) = args.density_samples {
        c.density_samples = v;
    }

    let kind = c.kind()?;
    let domain = c.domain.to_domain()?;
    let template = TpmsField::new(kind, c.cell_size_mm / 1000.0, c.level, c.shell_halfwidth)?;
    let field = match c.target_density {
        Some(rho) => template.with_halfwidth(solve_level_for_density(
            &template,
            rho,
            &domain,
            c.density_samples,
        )?),
        None => template,
    };
    let vf = volume_fraction(&field, &domain, c.density_samples)?;
    let mesh = mesh_module(&field, &domain, c.resolution)?;

    ctx.out.write("lattice.stl", &stl_bytes(&mesh))?;
    let mm3 = 1e9;
    let report = Report {
        kind: format!("{kind:?}"),
        cell_size_mm: c.cell_size_mm,
        level: c.level,
        shell_halfwidth: field.shell_halfwidth,
        target_density: c.target_density,
        volume_fraction: vf,
        triangle_count: mesh.triangles.len(),
        vertex_count: mesh.vertices.len(),
        euler_characteristic: mesh.euler_characteristic(),
        surface_area_mm2: mesh.surface_area() * 1e6,
        volume_mm3: mesh.signed_volume() * mm3,
        domain_volume_mm3: domain.volume() * mm3,
    };
    ctx.out.json("lattice_report.json", &report)?;
    println!(
        "lattice: {kind:?} shell half-width {:.4}, volume fraction {:.4}, {} triangles (watertight, χ = {})",
        field.shell_halfwidth,
        vf,
        report.triangle_count,
        report.euler_characteristic
    );
    println!(
        "wrote {}/lattice.stl and lattice_report.json",
        ctx.out.dir().display()
    );
    Ok(())
}
