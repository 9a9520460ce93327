use std::f64::consts::{PI, TAU};

use dcl_core::lattice::{
    eval_field, export_stl, extract_surface, import_stl, mesh_module, read_stl,
    solve_level_for_density, stl_bytes, volume_fraction, BoxDomain, Domain, GridSpec, SectorDomain,
    TpmsField, TpmsKind,
};
use nalgebra::{Point3, Vector3};
use proptest::prelude::*;

const CELL: f64 = 0.008;

/// Cell-centred 256³ count of `|g| <= 0.5` over one gyroid period, computed
/// independently with numpy before the sampler was written.
const GYROID_W05_ORACLE: f64 = 0.3236236572265625;

fn gyroid(t: f64, w: f64) -> TpmsField {
    TpmsField::new(TpmsKind::Gyroid, CELL, t, w).unwrap()
}

fn unit_cell() -> Domain {
    Domain::Box(BoxDomain::cube(CELL).unwrap())
}

fn module_sector() -> Domain {
    Domain::Sector(
        SectorDomain::new(
            0.012,
            0.028,
            [30f64.to_radians(), 90f64.to_radians()],
            0.008,
        )
        .unwrap(),
    )
}

/// Brute-force grid count straight from the trigonometric definition.
fn grid_oracle(n: usize, w: f64) -> f64 {
    let mut count = 0u64;
    for i in 0..n {
        let x = (i as f64 + 0.5) / n as f64 * TAU;
        let (sx, cx) = x.sin_cos();
        for j in 0..n {
            let y = (j as f64 + 0.5) / n as f64 * TAU;
            let (sy, cy) = y.sin_cos();
            for k in 0..n {
                let z = (k as f64 + 0.5) / n as f64 * TAU;
                let (sz, cz) = z.sin_cos();
                if (sx * cy + sy * cz + sz * cx).abs() <= w {
                    count += 1;
                }
            }
        }
    }
    count as f64 / (n * n * n) as f64
}

#[test]
fn oracle_matches_frozen_value() {
    let v = grid_oracle(256, 0.5);
    assert!((v - GYROID_W05_ORACLE).abs() < 1e-12, "{v}");
}

#[test]
fn sampler_agrees_with_oracle() {
    for n in [32, 48, 64] {
        let v = volume_fraction(&gyroid(0.0, 0.5), &unit_cell(), n).unwrap();
        assert!((v - GYROID_W05_ORACLE).abs() < 0.01, "n={n}: {v}");
    }
}

#[test]
fn density_inversion_round_trip() {
    let w =
        solve_level_for_density(&gyroid(0.0, 0.0), GYROID_W05_ORACLE, &unit_cell(), 48).unwrap();
    assert!((w - 0.5).abs() < 0.01, "{w}");
}

#[test]
fn primitive_half_density_is_bracketed() {
    let f = TpmsField::new(TpmsKind::SchwarzPrimitive, CELL, 0.0, 0.0).unwrap();
    let w = solve_level_for_density(&f, 0.5, &unit_cell(), 32).unwrap();
    let v = volume_fraction(&f.with_halfwidth(w), &unit_cell(), 32).unwrap();
    assert!((v - 0.5).abs() <= 0.005);
    let below = volume_fraction(&f.with_halfwidth(0.9 * w), &unit_cell(), 32).unwrap();
    let above = volume_fraction(&f.with_halfwidth(1.1 * w), &unit_cell(), 32).unwrap();
    assert!(below < 0.5 && above > 0.5);
}

#[test]
fn sector_density_for_default_module() {
    let f = gyroid(0.0, 0.0);
    let w = solve_level_for_density(&f, 0.3, &module_sector(), 32).unwrap();
    let v = volume_fraction(&f.with_halfwidth(w), &module_sector(), 32).unwrap();
    assert!((v - 0.3).abs() <= 0.005, "{v}");
}

#[test]
fn doubling_samples_converges() {
    for (kind, w) in [
        (TpmsKind::Gyroid, 0.5),
        (TpmsKind::Diamond, 0.3),
        (TpmsKind::Lidinoid, 0.4),
    ] {
        let f = TpmsField::new(kind, CELL, 0.0, w).unwrap();
        for n in [16, 32] {
            let a = volume_fraction(&f, &module_sector(), n).unwrap();
            let b = volume_fraction(&f, &module_sector(), 2 * n).unwrap();
            assert!((a - b).abs() < 2.0 / n as f64, "{kind:?} n={n}: {a} vs {b}");
        }
    }
}

#[test]
fn density_is_thread_count_independent() {
    let f = gyroid(0.1, 0.45);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| volume_fraction(&f, &module_sector(), 40).unwrap())
    };
    assert_eq!(run(1).to_bits(), run(4).to_bits());
}

#[test]
fn sphere_hook_has_euler_characteristic_two() {
    let r = 0.004;
    for h in [r / 6.0, r / 10.0, r / 17.0] {
        let grid = GridSpec::covering(Point3::new(-r, -r, -r), Point3::new(r, r, r), h, 2);
        let mesh = extract_surface(|p: &Point3<f64>| p.coords.norm() - r, &grid).unwrap();
        mesh.validate().unwrap();
        assert_eq!(mesh.euler_characteristic(), 2);
    }
}

#[test]
fn unit_cell_mesh_volume_matches_density() {
    let f = gyroid(0.0, 0.4);
    let d = unit_cell();
    let mesh = mesh_module(&f, &d, 32).unwrap();
    mesh.validate().unwrap();
    let expected = volume_fraction(&f, &d, 64).unwrap() * d.volume();
    let rel = (mesh.signed_volume() - expected).abs() / expected;
    assert!(
        rel < 0.05,
        "mesh {} vs {expected} ({rel})",
        mesh.signed_volume()
    );
}

#[test]
fn sector_module_meshes_are_watertight() {
    for kind in [
        TpmsKind::Gyroid,
        TpmsKind::SchwarzPrimitive,
        TpmsKind::Diamond,
        TpmsKind::Lidinoid,
    ] {
        let f = TpmsField::new(kind, CELL, 0.0, 0.35).unwrap();
        let mesh = mesh_module(&f, &module_sector(), 16).unwrap();
        mesh.validate().unwrap_or_else(|e| panic!("{kind:?}: {e}"));
    }
}

#[test]
fn empty_lattice_is_reported() {
    // level above the field amplitude with a zero-width shell: nothing solid
    let f = gyroid(2.0, 0.0);
    let err = mesh_module(&f, &unit_cell(), 16).unwrap_err();
    assert!(err.to_string().contains("empty lattice"), "{err}");
}

#[test]
fn mesh_is_translation_covariant() {
    let f = gyroid(0.0, 0.4);
    let d = module_sector();
    let shift = Vector3::new(0.25, -0.125, 0.0625);
    let a = mesh_module(&f, &d, 16).unwrap();
    let b = mesh_module(
        &f.with_origin(Point3::from(shift)),
        &d.translated(&shift),
        16,
    )
    .unwrap();
    assert_eq!(a.triangles, b.triangles);
    assert_eq!(a.vertices.len(), b.vertices.len());
    for (p, q) in a.vertices.iter().zip(&b.vertices) {
        assert!(((q - p) - shift).norm() < 1e-9);
    }
    // pairwise distances along triangle edges are preserved
    for t in a.triangles.iter().take(2000) {
        for k in 0..3 {
            let (i, j) = (t[k] as usize, t[(k + 1) % 3] as usize);
            let da = (a.vertices[i] - a.vertices[j]).norm();
            let db = (b.vertices[i] - b.vertices[j]).norm();
            assert!((da - db).abs() < 1e-9);
        }
    }
}

#[test]
fn stl_round_trip_preserves_topology() {
    let mesh = mesh_module(&gyroid(0.0, 0.4), &unit_cell(), 16).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cell.stl");
    export_stl(&mesh, &path).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    assert_eq!(bytes.len(), 84 + 50 * mesh.triangles.len());
    let back = import_stl(&path).unwrap();
    assert_eq!(back.triangles.len(), mesh.triangles.len());
    assert_eq!(back.euler_characteristic(), mesh.euler_characteristic());
    for t in 0..mesh.triangles.len() {
        for (p, q) in mesh.triangle(t).iter().zip(back.triangle(t).iter()) {
            for a in 0..3 {
                assert!((p[a] - q[a]).abs() <= (p[a].abs() as f32 * f32::EPSILON) as f64);
            }
        }
    }
    assert_eq!(read_stl(&stl_bytes(&back)).unwrap(), back);
}

#[test]
fn meshing_is_thread_count_independent() {
    let f = gyroid(0.0, 0.4);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| stl_bytes(&mesh_module(&f, &module_sector(), 16).unwrap()))
    };
    assert_eq!(run(1), run(3));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn gyroid_is_odd(x in -1.0..1.0f64, y in -1.0..1.0f64, z in -1.0..1.0f64) {
        let f = gyroid(0.0, 0.0);
        let p = Point3::new(x, y, z) * CELL;
        prop_assert!((eval_field(&f, &p) + eval_field(&f, &(-p.coords).into())).abs() < 1e-12);
    }

    #[test]
    fn every_kind_is_periodic(
        x in -PI..PI, y in -PI..PI, z in -PI..PI, axis in 0usize..3, k in 0usize..4,
    ) {
        let kind = [TpmsKind::Gyroid, TpmsKind::SchwarzPrimitive, TpmsKind::Diamond, TpmsKind::Lidinoid][k];
        let mut q = [x, y, z];
        q[axis] += TAU;
        let a = kind.eval_normalized(x, y, z);
        let b = kind.eval_normalized(q[0], q[1], q[2]);
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn density_is_monotone_in_halfwidth(w1 in 0.0..1.6f64, w2 in 0.0..1.6f64) {
        let (lo, hi) = if w1 <= w2 { (w1, w2) } else { (w2, w1) };
        let d = unit_cell();
        let a = volume_fraction(&gyroid(0.0, lo), &d, 12).unwrap();
        let b = volume_fraction(&gyroid(0.0, hi), &d, 12).unwrap();
        prop_assert!(a <= b);
    }
}
