use dcl_core::mechanism::{
    actuation_force, potential_energy, required_force, rotation_of, Lock, ProfileKind,
};
use dcl_core::{CamProfile, MechanismState};
use proptest::prelude::*;

/// Strict interior local minima of U on a dense grid.
fn grid_minima(cam: &CamProfile, n: usize) -> Vec<f64> {
    let s: Vec<f64> = (0..=n).map(|i| cam.stroke * i as f64 / n as f64).collect();
    let u: Vec<f64> = s.iter().map(|&x| potential_energy(x, cam)).collect();
    (1..n)
        .filter(|&i| u[i] < u[i - 1] && u[i] < u[i + 1])
        .map(|i| s[i])
        .collect()
}

#[test]
fn default_cam_is_bistable() {
    let cam = CamProfile::default();
    let minima = grid_minima(&cam, 100_000);
    assert_eq!(minima.len(), 2, "{minima:?}");
    for (m, d) in minima.iter().zip(&cam.detents) {
        assert!((m - d.position).abs() <= d.width / 2.0);
        assert!(potential_energy(d.position, &cam) < potential_energy(d.position + d.width, &cam));
    }
    // the boundary is not a minimum either
    assert!(actuation_force(0.0, &cam) < 0.0);
    assert!(actuation_force(cam.stroke, &cam) > 0.0);
}

#[test]
fn force_matches_finite_difference() {
    let cam = CamProfile::default();
    let h = 1e-9;
    for i in 1..200 {
        let s = cam.stroke * i as f64 / 200.0;
        let fd = (potential_energy(s + h, &cam) - potential_energy(s - h, &cam)) / (2.0 * h);
        assert!((actuation_force(s, &cam) - fd).abs() < 1e-6, "s={s}");
    }
}

#[test]
fn settling_finds_the_detents() {
    let cam = CamProfile::default();
    let lo = MechanismState::settle(0.01 * cam.stroke, &cam).unwrap();
    let hi = MechanismState::settle(0.99 * cam.stroke, &cam).unwrap();
    assert_eq!(lo.locked, Lock::StowedLock);
    assert_eq!(hi.locked, Lock::DeployedLock);
    assert!(actuation_force(lo.s, &cam).abs() < 1e-9);
    assert!(actuation_force(hi.s, &cam).abs() < 1e-9);
    let minima = grid_minima(&cam, 100_000);
    assert!((lo.s - minima[0]).abs() < 1e-6 && (hi.s - minima[1]).abs() < 1e-6);
    assert_eq!(hi.phi, rotation_of(hi.s, &cam).unwrap());
    for frac in [0.2, 0.4, 0.5, 0.6, 0.8] {
        let st = MechanismState::settle(frac * cam.stroke, &cam).unwrap();
        assert!(st.locked != Lock::Transit, "third attractor at {}", st.s);
    }
}

#[test]
fn toggle_round_trip() {
    let cam = CamProfile::default();
    let a = MechanismState::settle(0.0, &cam).unwrap();
    let b = a.toggle(&cam).unwrap();
    let c = b.toggle(&cam).unwrap();
    assert_eq!(b.locked, Lock::DeployedLock);
    assert_eq!(c.locked, Lock::StowedLock);
    assert!((a.s - c.s).abs() < 1e-9);
}

#[test]
fn deploying_takes_effort() {
    let f = required_force(&CamProfile::default()).unwrap();
    assert!(f > 2.0 && f.is_finite(), "{f}");
}

proptest! {
    #[test]
    fn rotation_is_monotone(a in 0.0f64..0.01, b in 0.0f64..0.01, cyc in any::<bool>()) {
        prop_assume!(a < b);
        let mut cam = CamProfile::default();
        if cyc { cam.profile = ProfileKind::Cycloidal; }
        prop_assert!(rotation_of(a, &cam).unwrap() < rotation_of(b, &cam).unwrap());
    }
}
