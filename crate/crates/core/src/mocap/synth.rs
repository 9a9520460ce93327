//! Synthetic capture of a single vertical jump with the 15-marker rig:
//! three markers on the trunk and three along each thigh.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::{Point3, Rotation3, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{BodyMap, MarkerFrame, MocapError};
use crate::constants::{H_BASE_MM, MOCAP_RESOLUTION_MM};

pub const TRUNK: &str = "trunk";
const LEGS: [&str; 4] = ["thigh_fl", "thigh_fr", "thigh_rl", "thigh_rr"];
const G_MM: f64 = 9810.0;

/// Trunk and thigh bodies of the standard rig.
pub fn standard_body_map() -> BodyMap {
    let mut map = BTreeMap::new();
    map.insert(
        TRUNK.to_string(),
        [
            "trunk_ant".to_string(),
            "trunk_left".to_string(),
            "trunk_right".to_string(),
        ],
    );
    for leg in LEGS {
        map.insert(
            leg.to_string(),
            ["prox", "mid", "dist"].map(|p| format!("{leg}_{p}")),
        );
    }
    map
}

/// Trunk marker offsets from the trunk centroid, mm.
fn trunk_markers() -> [(String, Vector3<f64>); 3] {
    [
        ("trunk_ant".into(), Vector3::new(180.0, 0.0, 40.0)),
        ("trunk_left".into(), Vector3::new(-90.0, 95.0, -20.0)),
        ("trunk_right".into(), Vector3::new(-90.0, -95.0, -20.0)),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticTrial {
    /// Apex trunk height, mm.
    pub apex_mm: f64,
    /// Squat trunk height, mm.
    pub base_mm: f64,
    /// Trunk height at liftoff above the squat, mm.
    pub push_mm: f64,
    /// s
    pub push_time: f64,
    /// Still squat before the push, s.
    pub hold_time: f64,
    pub rate_hz: f64,
    /// Per-coordinate marker noise, mm.
    pub noise_mm: f64,
    /// Trunk pitch swing amplitude during the jump, rad.
    pub pitch_amplitude: f64,
}

impl Default for SyntheticTrial {
    fn default() -> Self {
        SyntheticTrial {
            apex_mm: 656.3,
            base_mm: H_BASE_MM,
            push_mm: 115.0,
            push_time: 0.09,
            hold_time: 0.6,
            rate_hz: 240.0,
            noise_mm: MOCAP_RESOLUTION_MM,
            pitch_amplitude: 2f64.to_radians(),
        }
    }
}

impl SyntheticTrial {
    pub fn validate(&self) -> Result<(), MocapError> {
        let bad = |field, reason: &str| MocapError::InvalidParameter {
            field,
            reason: reason.into(),
        };
        if !(self.base_mm > 0.0 && self.push_mm > 0.0 && self.apex_mm > self.base_mm + self.push_mm)
        {
            return Err(bad("apex_mm", "apex must clear the liftoff height"));
        }
        if !(self.rate_hz > 0.0 && self.push_time > 0.0 && self.hold_time >= 0.0) {
            return Err(bad("rate_hz", "rates and durations must be positive"));
        }
        if !(self.noise_mm >= 0.0) {
            return Err(bad("noise_mm", "must be non-negative"));
        }
        Ok(())
    }

    fn liftoff_speed(&self) -> f64 {
        (2.0 * G_MM * (self.apex_mm - self.base_mm - self.push_mm)).sqrt()
    }

    fn flight_time(&self) -> f64 {
        2.0 * self.liftoff_speed() / G_MM
    }

    pub fn duration(&self) -> f64 {
        2.0 * self.hold_time + 2.0 * self.push_time + self.flight_time()
    }

    /// Noise-free trunk centroid height at time `t`, mm.
    pub fn trunk_height(&self, t: f64) -> f64 {
        let (h0, dz, tp, v) = (
            self.base_mm,
            self.push_mm,
            self.push_time,
            self.liftoff_speed(),
        );
        // cubic from rest at the squat to liftoff height and speed
        let push = |tau: f64| {
            let u = tau / tp;
            let (a, b) = (3.0 * dz - v * tp, v * tp - 2.0 * dz);
            h0 + a * u * u + b * u * u * u
        };
        let t1 = self.hold_time;
        let t2 = t1 + tp;
        let t3 = t2 + self.flight_time();
        let t4 = t3 + tp;
        if t <= t1 {
            h0
        } else if t <= t2 {
            push(t - t1)
        } else if t <= t3 {
            let tau = t - t2;
            h0 + dz + v * tau - 0.5 * G_MM * tau * tau
        } else if t <= t4 {
            push(t4 - t)
        } else {
            h0
        }
    }

    fn pitch(&self, t: f64) -> f64 {
        let (t1, d) = (self.hold_time, self.duration() - 2.0 * self.hold_time);
        if t <= t1 || t >= t1 + d {
            0.0
        } else {
            self.pitch_amplitude * (PI * (t - t1) / d).sin()
        }
    }

    /// Noise-free marker frames.
    pub fn frames_exact(&self) -> Result<Vec<MarkerFrame>, MocapError> {
        self.validate()?;
        let n = (self.duration() * self.rate_hz).floor() as usize + 1;
        Ok((0..n)
            .map(|i| {
                let t = i as f64 / self.rate_hz;
                let centre = Vector3::new(0.0, 0.0, self.trunk_height(t));
                let rot = Rotation3::from_axis_angle(&Vector3::y_axis(), self.pitch(t));
                let mut markers = BTreeMap::new();
                for (id, off) in trunk_markers() {
                    markers.insert(id, Point3::from(centre + rot * off));
                }
                let extension =
                    (self.trunk_height(t) - self.base_mm) / (self.apex_mm - self.base_mm);
                for (k, leg) in LEGS.iter().enumerate() {
                    let hip = Vector3::new(
                        if k < 2 { 190.0 } else { -190.0 },
                        if k % 2 == 0 { 95.0 } else { -95.0 },
                        -60.0,
                    );
                    let swing =
                        Rotation3::from_axis_angle(&Vector3::y_axis(), 0.8 - 0.6 * extension);
                    for (j, part) in ["prox", "mid", "dist"].iter().enumerate() {
                        let along =
                            swing * Vector3::new(0.0, 12.0 * j as f64, -70.0 * j as f64 - 10.0);
                        markers.insert(
                            format!("{leg}_{part}"),
                            Point3::from(centre + rot * (hip + along)),
                        );
                    }
                }
                MarkerFrame { t, markers }
            })
            .collect())
    }

    /// Marker frames with isotropic Gaussian noise, reproducible per seed.
    pub fn frames(&self, seed: u64) -> Result<Vec<MarkerFrame>, MocapError> {
        let mut frames = self.frames_exact()?;
        if self.noise_mm == 0.0 {
            return Ok(frames);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, self.noise_mm).map_err(|e| MocapError::InvalidParameter {
            field: "noise_mm",
            reason: e.to_string(),
        })?;
        for f in &mut frames {
            for p in f.markers.values_mut() {
                for c in p.iter_mut() {
                    *c += normal.sample(&mut rng);
                }
            }
        }
        Ok(frames)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trajectory_anchors() {
        let s = SyntheticTrial::default();
        assert_eq!(s.trunk_height(0.0), H_BASE_MM);
        let apex_t = s.hold_time + s.push_time + s.flight_time() / 2.0;
        assert!((s.trunk_height(apex_t) - 656.3).abs() < 1e-9);
        assert!((s.trunk_height(s.duration()) - H_BASE_MM).abs() < 1e-9);
        // continuous at liftoff
        let t2 = s.hold_time + s.push_time;
        assert!((s.trunk_height(t2 - 1e-9) - s.trunk_height(t2 + 1e-9)).abs() < 1e-5);
    }

    #[test]
    fn fifteen_markers() {
        let f = SyntheticTrial::default().frames(1).unwrap();
        assert!(f.iter().all(|fr| fr.markers.len() == 15));
        let map = standard_body_map();
        assert_eq!(map.values().flatten().count(), 15);
    }
}
