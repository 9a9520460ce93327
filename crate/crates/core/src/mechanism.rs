//! Flipping mechanism: a push-rod whose travel is turned into a quarter turn
//! of the module sleeve by a helical cam, held in either end state by detents.
//!
//! The toggle is treated quasi-statically. Its energy landscape combines the
//! return spring with two smooth wells standing in for the locking pin.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MechanismError {
    #[error("invalid {field}: {reason}")]
    InvalidParameter { field: &'static str, reason: String },
    #[error("push-rod position {s} m outside the stroke [0, {stroke}] m")]
    OutOfStroke { s: f64, stroke: f64 },
}

fn invalid(field: &'static str, reason: impl Into<String>) -> MechanismError {
    MechanismError::InvalidParameter {
        field,
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    /// Constant-lead helix.
    Linear,
    /// Zero cam velocity at both ends of the stroke.
    Cycloidal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detent {
    /// Well centre, m.
    pub position: f64,
    /// J
    pub depth: f64,
    /// m; the Gaussian's standard deviation is a quarter of this.
    pub width: f64,
}

impl Detent {
    fn sigma(&self) -> f64 {
        self.width / 4.0
    }

    fn energy(&self, s: f64) -> f64 {
        let x = (s - self.position) / self.sigma();
        -self.depth * (-0.5 * x * x).exp()
    }

    fn force(&self, s: f64) -> f64 {
        let sigma = self.sigma();
        let x = (s - self.position) / sigma;
        self.depth * x / sigma * (-0.5 * x * x).exp()
    }

    fn covers(&self, s: f64) -> bool {
        (s - self.position).abs() <= 0.5 * self.width
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CamProfile {
    /// Push-rod travel S, m.
    pub stroke: f64,
    /// rad
    pub total_rotation: f64,
    pub profile: ProfileKind,
    /// Return spring rate, N/m.
    pub spring_rate: f64,
    /// N
    pub spring_preload: f64,
    /// Stowed then deployed.
    pub detents: Vec<Detent>,
}

impl Default for CamProfile {
    /// Illustrative dimensions: 10 mm stroke, 500 N/m spring with 2 N
    /// preload, 5 mJ wells 1.2 mm wide sitting just inside each end.
    fn default() -> Self {
        CamProfile::with_end_detents(0.010, 500.0, 2.0, 5e-3, 1.2e-3)
    }
}

impl CamProfile {
    /// Linear quarter-turn cam with a detent well tucked inside each end of
    /// the stroke.
    pub fn with_end_detents(stroke: f64, k: f64, preload: f64, depth: f64, width: f64) -> Self {
        CamProfile {
            stroke,
            total_rotation: FRAC_PI_2,
            profile: ProfileKind::Linear,
            spring_rate: k,
            spring_preload: preload,
            detents: vec![
                Detent {
                    position: 0.5 * width,
                    depth,
                    width,
                },
                Detent {
                    position: stroke - 0.5 * width,
                    depth,
                    width,
                },
            ],
        }
    }

    pub fn validate(&self) -> Result<(), MechanismError> {
        if !(self.stroke.is_finite() && self.stroke > 0.0) {
            return Err(invalid(
                "stroke",
                format!("must be positive, got {}", self.stroke),
            ));
        }
        if !(self.total_rotation > 0.0 && self.total_rotation <= PI) {
            return Err(invalid("total_rotation", "must be in (0, π]"));
        }
        if !(self.spring_rate.is_finite() && self.spring_rate >= 0.0) {
            return Err(invalid("spring_rate", "must be non-negative"));
        }
        if !self.spring_preload.is_finite() {
            return Err(invalid("spring_preload", "must be finite"));
        }
        if self.detents.len() != 2 {
            return Err(invalid(
                "detents",
                format!("a bistable cam needs exactly 2, got {}", self.detents.len()),
            ));
        }
        for d in &self.detents {
            if !(d.depth > 0.0 && d.width > 0.0 && d.width < self.stroke) {
                return Err(invalid(
                    "detents",
                    "depth and width must be positive, width below the stroke",
                ));
            }
        }
        let (lo, hi) = (&self.detents[0], &self.detents[1]);
        if !(lo.covers(0.0) && lo.position >= 0.0) {
            return Err(invalid(
                "detents",
                "first well must cover the start of the stroke",
            ));
        }
        if !(hi.covers(self.stroke) && hi.position <= self.stroke) {
            return Err(invalid(
                "detents",
                "second well must cover the end of the stroke",
            ));
        }
        Ok(())
    }

    fn check_stroke(&self, s: f64) -> Result<(), MechanismError> {
        if !(s >= 0.0 && s <= self.stroke) {
            return Err(MechanismError::OutOfStroke {
                s,
                stroke: self.stroke,
            });
        }
        Ok(())
    }
}

/// Sleeve rotation for push-rod position `s`.
pub fn rotation_of(s: f64, cam: &CamProfile) -> Result<f64, MechanismError> {
    cam.check_stroke(s)?;
    if s == cam.stroke {
        return Ok(cam.total_rotation);
    }
    let u = s / cam.stroke;
    let frac = match cam.profile {
        ProfileKind::Linear => u,
        ProfileKind::Cycloidal => u - (2.0 * PI * u).sin() / (2.0 * PI),
    };
    Ok(cam.total_rotation * frac)
}

/// Stored energy of the spring and detents at `s`, J.
pub fn potential_energy(s: f64, cam: &CamProfile) -> f64 {
    0.5 * cam.spring_rate * s * s
        + cam.spring_preload * s
        + cam.detents.iter().map(|d| d.energy(s)).sum::<f64>()
}

/// Force the push-rod must supply to hold position `s`, `dU/ds`, N.
pub fn actuation_force(s: f64, cam: &CamProfile) -> f64 {
    cam.spring_rate * s + cam.spring_preload + cam.detents.iter().map(|d| d.force(s)).sum::<f64>()
}

/// Largest holding force between the two locked positions: what an actuator
/// must deliver to deploy the module.
pub fn required_force(cam: &CamProfile) -> Result<f64, MechanismError> {
    let a = MechanismState::settle(cam.detents[0].position, cam)?.s;
    let b = MechanismState::settle(cam.detents[1].position, cam)?.s;
    const N: usize = 20_000;
    Ok((0..=N)
        .map(|i| actuation_force(a + (b - a) * i as f64 / N as f64, cam))
        .fold(f64::NEG_INFINITY, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Lock {
    StowedLock,
    DeployedLock,
    Transit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MechanismState {
    pub s: f64,
    pub phi: f64,
    pub locked: Lock,
}

impl MechanismState {
    /// State at a given push-rod position, with the lock inferred from the
    /// detent it sits in.
    pub fn at(s: f64, cam: &CamProfile) -> Result<Self, MechanismError> {
        let phi = rotation_of(s, cam)?;
        let locked = if cam.detents[0].covers(s) {
            Lock::StowedLock
        } else if cam.detents[1].covers(s) {
            Lock::DeployedLock
        } else {
            Lock::Transit
        };
        Ok(MechanismState { s, phi, locked })
    }

    /// Release the push-rod at `s0` and follow the energy gradient to rest.
    pub fn settle(s0: f64, cam: &CamProfile) -> Result<Self, MechanismError> {
        cam.validate()?;
        cam.check_stroke(s0)?;
        // step below 1/max curvature of U for monotone descent
        let curvature = cam.spring_rate
            + cam
                .detents
                .iter()
                .map(|d| d.depth / (d.sigma() * d.sigma()))
                .sum::<f64>();
        let eta = 0.5 / curvature;
        let mut s = s0;
        for _ in 0..1_000_000 {
            let next = (s - eta * actuation_force(s, cam)).clamp(0.0, cam.stroke);
            let moved = (next - s).abs();
            s = next;
            if moved < 1e-15 {
                break;
            }
        }
        Self::at(s, cam)
    }

    /// Push the mechanism into the opposite detent and let it settle.
    pub fn toggle(&self, cam: &CamProfile) -> Result<Self, MechanismError> {
        let target = match self.locked {
            Lock::StowedLock => &cam.detents[1],
            Lock::DeployedLock | Lock::Transit => &cam.detents[0],
        };
        Self::settle(target.position, cam)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub s: f64,
    pub phi: f64,
    pub energy: f64,
    pub force: f64,
}

/// Sample the landscape at `n ≥ 2` evenly spaced positions over the stroke.
pub fn sweep(cam: &CamProfile, n: usize) -> Result<Vec<SweepRow>, MechanismError> {
    cam.validate()?;
    if n < 2 {
        return Err(invalid("samples", "need at least 2"));
    }
    (0..n)
        .map(|i| {
            let s = if i == n - 1 {
                cam.stroke
            } else {
                cam.stroke * i as f64 / (n - 1) as f64
            };
            Ok(SweepRow {
                s,
                phi: rotation_of(s, cam)?,
                energy: potential_energy(s, cam),
                force: actuation_force(s, cam),
            })
        })
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("s_mm,phi_deg,U_mJ,F_N\n");
    for r in rows {
        out.push_str(&format!(
            "{:.6},{:.6},{:.6},{:.6}\n",
            r.s * 1e3,
            r.phi.to_degrees(),
            r.energy * 1e3,
            r.force
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_endpoints() {
        let cam = CamProfile::default();
        assert_eq!(rotation_of(0.0, &cam).unwrap(), 0.0);
        assert_eq!(rotation_of(cam.stroke, &cam).unwrap(), FRAC_PI_2);
        assert!((rotation_of(cam.stroke / 2.0, &cam).unwrap() - PI / 4.0).abs() < 1e-15);
        assert!(rotation_of(-1e-9, &cam).is_err());
        assert!(rotation_of(cam.stroke * 1.001, &cam).is_err());
        let cyc = CamProfile {
            profile: ProfileKind::Cycloidal,
            ..cam
        };
        assert_eq!(rotation_of(cyc.stroke, &cyc).unwrap(), FRAC_PI_2);
        assert!((rotation_of(cyc.stroke / 2.0, &cyc).unwrap() - PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn flat_landscape() {
        let cam = CamProfile {
            spring_rate: 0.0,
            spring_preload: 0.0,
            detents: vec![],
            ..Default::default()
        };
        for s in [0.0, 0.003, 0.01] {
            assert_eq!(potential_energy(s, &cam), 0.0);
        }
    }

    #[test]
    fn quadratic_force() {
        let cam = CamProfile {
            detents: vec![],
            ..Default::default()
        };
        assert_eq!(actuation_force(0.004, &cam), 500.0 * 0.004 + 2.0);
    }

    #[test]
    fn validation() {
        assert!(CamProfile::default().validate().is_ok());
        let mut cam = CamProfile::default();
        cam.detents.pop();
        assert!(cam
            .validate()
            .unwrap_err()
            .to_string()
            .contains("exactly 2"));
        let mut cam = CamProfile::default();
        cam.detents[1].position = 0.005;
        assert!(cam.validate().is_err());
    }

    #[test]
    fn sweep_rows() {
        let rows = sweep(&CamProfile::default(), 11).unwrap();
        assert_eq!(rows.len(), 11);
        assert_eq!(rows[10].phi, FRAC_PI_2);
        assert!(sweep_csv(&rows).starts_with("s_mm,phi_deg,U_mJ,F_N\n"));
    }
}
