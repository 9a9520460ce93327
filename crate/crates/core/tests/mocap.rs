use dcl_core::constants::{H_BASE_MM, TABLE};
use dcl_core::mocap::{
    aggregate_trials, analyze_trial, detect_h_base, frames_from_csv, frames_to_csv, solve_pose,
    standard_body_map, trunk_height_series, MocapError, SyntheticTrial, TRUNK,
};
use dcl_core::TrialResult;
use nalgebra::{Point3, Rotation3, Unit, Vector3};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_distr::{Distribution, Normal};

fn tri() -> [Point3<f64>; 3] {
    [
        Point3::new(180.0, 0.0, 40.0),
        Point3::new(-90.0, 95.0, -20.0),
        Point3::new(-90.0, -95.0, -20.0),
    ]
}

fn rigid() -> impl Strategy<Value = (Rotation3<f64>, Vector3<f64>)> {
    (
        prop::array::uniform3(-1.0f64..1.0),
        -3.1f64..3.1,
        prop::array::uniform3(-500.0f64..500.0),
    )
        .prop_filter_map("axis", |(a, ang, t)| {
            let axis = Vector3::from(a);
            (axis.norm() > 0.1).then(|| {
                (
                    Rotation3::from_axis_angle(&Unit::new_normalize(axis), ang),
                    Vector3::from(t),
                )
            })
        })
}

proptest! {
    #[test]
    fn recovers_known_transforms((r, t) in rigid()) {
        let obs = tri().map(|p| r * p + t);
        let pose = solve_pose(&tri(), &obs).unwrap();
        prop_assert!((pose.rotation - r.matrix()).abs().max() < 1e-9);
        prop_assert!((pose.translation - t).abs().max() < 1e-9);
        prop_assert!((pose.rotation.determinant() - 1.0).abs() < 1e-9);
        let ortho = pose.rotation.transpose() * pose.rotation;
        prop_assert!((ortho - nalgebra::Matrix3::identity()).abs().max() < 1e-9);
    }

    #[test]
    fn rmsd_is_invariant_under_a_shared_rigid_motion(
        (r, t) in rigid(), (r2, t2) in rigid(), noise in prop::array::uniform9(-1.0f64..1.0)
    ) {
        let obs: Vec<Point3<f64>> = tri()
            .iter()
            .enumerate()
            .map(|(i, p)| r * p + t + Vector3::new(noise[3 * i], noise[3 * i + 1], noise[3 * i + 2]))
            .collect();
        let obs: [Point3<f64>; 3] = obs.try_into().unwrap();
        let a = solve_pose(&tri(), &obs).unwrap().rmsd;
        let b = solve_pose(&tri().map(|p| r2 * p + t2), &obs.map(|p| r2 * p + t2)).unwrap().rmsd;
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn aggregate_mean_ignores_order(mut d in prop::collection::vec(300.0f64..500.0, 2..10), seed in any::<u64>()) {
        let trials = |d: &[f64]| d.iter().map(|&x| TrialResult { h_max: x + 283.1, h_base: 283.1, delta_h: x }).collect::<Vec<_>>();
        let a = aggregate_trials(&trials(&d), 373.1).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        use rand::seq::SliceRandom;
        d.shuffle(&mut rng);
        let b = aggregate_trials(&trials(&d), 373.1).unwrap();
        prop_assert_eq!(a.mean_delta_h.to_bits(), b.mean_delta_h.to_bits());
        prop_assert_eq!(a.std_delta_h.to_bits(), b.std_delta_h.to_bits());
    }
}

#[test]
fn noisy_fit_residual_is_small() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let normal = Normal::new(0.0, 0.1).unwrap();
    let r = Rotation3::from_euler_angles(0.3, -0.2, 1.1);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let obs = tri().map(|p| {
            let q = r * p + Vector3::new(5.0, 6.0, 300.0);
            q + Vector3::from_fn(|_, _| normal.sample(&mut rng))
        });
        worst = worst.max(solve_pose(&tri(), &obs).unwrap().rmsd);
    }
    assert!(worst <= 0.3, "worst rmsd {worst}");
}

#[test]
fn static_trunk_gives_constant_series() {
    let trial = SyntheticTrial {
        noise_mm: 0.0,
        ..Default::default()
    };
    let frames: Vec<_> = trial
        .frames_exact()
        .unwrap()
        .into_iter()
        .take(100)
        .collect();
    let z = trunk_height_series(&frames, &standard_body_map(), TRUNK).unwrap();
    assert!(z.iter().all(|(_, v)| (v - H_BASE_MM).abs() < 1e-9));
}

#[test]
fn series_tracks_the_generator() {
    let trial = SyntheticTrial {
        noise_mm: 0.0,
        ..Default::default()
    };
    let frames = trial.frames_exact().unwrap();
    let z = trunk_height_series(&frames, &standard_body_map(), TRUNK).unwrap();
    for (t, v) in z {
        assert!((v - trial.trunk_height(t)).abs() < 1e-6, "t={t}");
    }
}

#[test]
fn gaps() {
    let trial = SyntheticTrial {
        noise_mm: 0.0,
        ..Default::default()
    };
    let map = standard_body_map();
    let mut frames = trial.frames_exact().unwrap();
    let full = trunk_height_series(&frames, &map, TRUNK).unwrap();

    // thigh markers do not matter
    frames[200].markers.remove("thigh_fl_mid");
    assert_eq!(trunk_height_series(&frames, &map, TRUNK).unwrap(), full);

    for f in &mut frames[10..15] {
        f.markers.remove("trunk_ant");
    }
    let bridged = trunk_height_series(&frames, &map, TRUNK).unwrap();
    assert!((bridged[12].1 - H_BASE_MM).abs() < 1e-9);

    frames[15].markers.remove("trunk_left");
    let err = trunk_height_series(&frames, &map, TRUNK).unwrap_err();
    assert!(matches!(err, MocapError::Gap { frames: 6, .. }), "{err}");
}

fn run_trial(trial: &SyntheticTrial, seed: u64, window: usize) -> TrialResult {
    let csv = frames_to_csv(&trial.frames(seed).unwrap());
    let frames = frames_from_csv(csv.as_bytes()).unwrap();
    let z = trunk_height_series(&frames, &standard_body_map(), TRUNK).unwrap();
    analyze_trial(&z, H_BASE_MM, window).unwrap()
}

#[test]
fn end_to_end_table() {
    let mut baseline = None;
    for row in TABLE {
        let trial = SyntheticTrial {
            apex_mm: row.h_max_mm,
            ..Default::default()
        };
        let results: Vec<_> = (0..5).map(|k| run_trial(&trial, 100 + k, 5)).collect();
        for r in &results {
            assert!(
                (r.delta_h - row.delta_h_mm).abs() < 0.5,
                "{}: {}",
                row.group,
                r.delta_h
            );
        }
        let base = *baseline.get_or_insert(row.delta_h_mm);
        let g = aggregate_trials(&results, base).unwrap();
        assert!((g.mean_delta_h - row.delta_h_mm).abs() < 0.5);
        if let Some(p) = row.relative_change_pct {
            assert!(
                (g.delta_percent - p).abs() < 0.2,
                "{}: {}",
                row.group,
                g.delta_percent
            );
        }
    }
}

#[test]
fn frame_rate_invariance() {
    let slow = SyntheticTrial {
        noise_mm: 0.0,
        rate_hz: 240.0,
        ..Default::default()
    };
    let fast = SyntheticTrial {
        rate_hz: 480.0,
        ..slow
    };
    let a = run_trial(&slow, 0, 5);
    let b = run_trial(&fast, 0, 9);
    assert!(
        (a.h_max - b.h_max).abs() < 0.05,
        "{} vs {}",
        a.h_max,
        b.h_max
    );
}

#[test]
fn automatic_squat_height() {
    let trial = SyntheticTrial::default();
    let frames = trial.frames(9).unwrap();
    let z = trunk_height_series(&frames, &standard_body_map(), TRUNK).unwrap();
    let h = detect_h_base(&z, 0.5, 5.0).unwrap();
    assert!((h - H_BASE_MM).abs() < 0.1, "{h}");
}
