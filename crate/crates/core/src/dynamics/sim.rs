use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    invalid, knee_angle_clamped, knee_angle_for_length, leg_length_derivative, DynamicsError,
    JumpMode, JumpResult, JumpScenario, RobotParams,
};
use crate::stiffness::StiffnessModel;

const MAX_STANCE_TIME: f64 = 5.0;
const EVENT_BISECTIONS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub z: f64,
    pub zdot: f64,
    /// Knee angle, rad.
    pub q: f64,
    /// Per-leg motor torque, N·m.
    pub tau_motor: f64,
    /// Per-module elastic torque, N·m.
    pub tau_exo: f64,
}

/// Apex of a ballistic flight from height `z` with vertical speed `v`.
pub fn ballistic_apex(z: f64, v: f64, gravity: f64) -> f64 {
    z + v.max(0.0).powi(2) / (2.0 * gravity)
}

/// State: height, vertical speed, motor work, elastic work.
type State = [f64; 4];

struct Model<'a> {
    p: &'a RobotParams,
    mass: f64,
    exo: Option<&'a StiffnessModel>,
    engagement: f64,
    l_max: f64,
}

struct Forces {
    q: f64,
    tau_motor: f64,
    tau_exo: f64,
    /// Ground reaction force, N.
    force: f64,
    /// Rates of motor and elastic work, W.
    power: [f64; 2],
}

impl Model<'_> {
    fn forces(&self, z: f64, zdot: f64) -> Result<Forces, DynamicsError> {
        let p = self.p;
        let q = knee_angle_clamped(z.min(self.l_max), p);
        let dl = leg_length_derivative(q, p);
        let theta = ((PI - q) - self.engagement).max(0.0);
        let tau_exo = match self.exo {
            Some(m) => m.torque_at(theta, true)?,
            None => 0.0,
        };
        if dl <= 1e-12 {
            // straight leg: no moment arm
            return Ok(Forces {
                q,
                tau_motor: 0.0,
                tau_exo,
                force: 0.0,
                power: [0.0; 2],
            });
        }
        let qdot = zdot / dl;
        let tau_motor = p.knee_torque_max * (1.0 - qdot.abs() / p.knee_speed_max).max(0.0);
        let motor = p.n_legs as f64 * tau_motor;
        let elastic = p.n_modules as f64 * tau_exo;
        let force = (motor + elastic) / dl;
        Ok(Forces {
            q,
            tau_motor,
            tau_exo,
            force,
            power: [motor * zdot / dl, elastic * zdot / dl],
        })
    }

    fn deriv(&self, s: &State) -> Result<State, DynamicsError> {
        let f = self.forces(s[0], s[1])?;
        Ok([
            s[1],
            f.force / self.mass - self.p.gravity,
            f.power[0],
            f.power[1],
        ])
    }

    fn rk4(&self, s: &State, h: f64) -> Result<State, DynamicsError> {
        let add = |a: &State, k: &State, c: f64| -> State {
            [
                a[0] + c * k[0],
                a[1] + c * k[1],
                a[2] + c * k[2],
                a[3] + c * k[3],
            ]
        };
        let k1 = self.deriv(s)?;
        let k2 = self.deriv(&add(s, &k1, h / 2.0))?;
        let k3 = self.deriv(&add(s, &k2, h / 2.0))?;
        let k4 = self.deriv(&add(s, &k3, h))?;
        let mut out = *s;
        for i in 0..4 {
            out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        Ok(out)
    }

    fn extended(&self, s: &State) -> bool {
        s[0] >= self.l_max
    }

    fn unloaded(&self, s: &State) -> Result<bool, DynamicsError> {
        Ok(self.forces(s[0], s[1])?.force <= 0.0)
    }

    fn point(&self, t: f64, s: &State) -> Result<TrajectoryPoint, DynamicsError> {
        let f = self.forces(s[0], s[1])?;
        Ok(TrajectoryPoint {
            t,
            z: s[0],
            zdot: s[1],
            q: f.q,
            tau_motor: f.tau_motor,
            tau_exo: f.tau_exo,
        })
    }

    /// Smallest sub-step in `(0, h]` after which `event` holds, given that it
    /// holds at `h` and not at 0.
    fn locate(
        &self,
        s: &State,
        h: f64,
        event: impl Fn(&State) -> Result<bool, DynamicsError>,
    ) -> Result<(f64, State), DynamicsError> {
        let (mut lo, mut hi) = (0.0, h);
        let mut at_hi = self.rk4(s, h)?;
        for _ in 0..EVENT_BISECTIONS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let sm = self.rk4(s, mid)?;
            if event(&sm)? {
                hi = mid;
                at_hi = sm;
            } else {
                lo = mid;
            }
        }
        Ok((hi, at_hi))
    }
}

/// Integrate the stance phase with fixed-step RK4 and close the flight phase
/// analytically.
///
/// Stance ends at the first of: full leg extension, vanishing ground force,
/// or the body coming to rest (a stall, which yields no flight). Events are
/// refined by bisection inside the step so the result varies smoothly with
/// the parameters. When extension and unloading fall in the same sub-step
/// the extended state wins.
pub fn simulate_jump(
    scenario: &JumpScenario,
    params: &RobotParams,
    dt: f64,
) -> Result<JumpResult, DynamicsError> {
    if !(dt > 1e-5 && dt <= 1e-3) {
        return Err(invalid(
            "dt",
            format!("must be in (1e-5, 1e-3] s, got {dt}"),
        ));
    }
    params.validate()?;
    scenario.validate(params)?;
    let q0 = knee_angle_for_length(scenario.squat_height, params)?;

    let model = Model {
        p: params,
        mass: params.total_mass(scenario.mode),
        exo: match scenario.mode {
            JumpMode::Deployed => scenario.stiffness.as_ref(),
            _ => None,
        },
        engagement: scenario.engagement_flexion,
        l_max: params.max_leg_length(),
    };

    let mut s: State = [scenario.squat_height, 0.0, 0.0, 0.0];
    let mut t = 0.0;
    let mut trajectory = vec![model.point(t, &s)?];
    debug_assert!((trajectory[0].q - q0).abs() < 1e-9);

    // the squat is held by the joint stops unless the legs can lift the body
    let f0 = model.forces(s[0], s[1])?.force;
    if f0 <= model.mass * params.gravity {
        return Ok(finish(scenario, params, s, t, trajectory, false));
    }

    loop {
        let next = model.rk4(&s, dt)?;
        let ext = model.extended(&next);
        let unl = model.unloaded(&next)?;
        let stall = next[1] <= 0.0;
        if ext || unl || stall {
            let mut best: Option<(f64, State, bool)> = None;
            if ext {
                let (h, st) = model.locate(&s, dt, |x| Ok(model.extended(x)))?;
                best = Some((h, st, true));
            }
            if unl {
                let (h, st) = model.locate(&s, dt, |x| model.unloaded(x))?;
                if best.as_ref().is_none_or(|b| h < b.0) {
                    best = Some((h, st, true));
                }
            }
            if stall {
                let (h, st) = model.locate(&s, dt, |x| Ok(x[1] <= 0.0))?;
                if best.as_ref().is_none_or(|b| h < b.0) {
                    best = Some((h, st, false));
                }
            }
            let (h, mut st, flies) = best.expect("at least one event fired");
            if !flies {
                st[1] = 0.0;
            }
            t += h;
            trajectory.push(model.point(t, &st)?);
            return Ok(finish(scenario, params, st, t, trajectory, flies));
        }
        s = next;
        t += dt;
        trajectory.push(model.point(t, &s)?);
        if t > MAX_STANCE_TIME {
            return Err(DynamicsError::NoTermination(MAX_STANCE_TIME));
        }
    }
}

fn finish(
    scenario: &JumpScenario,
    params: &RobotParams,
    s: State,
    t_lo: f64,
    mut trajectory: Vec<TrajectoryPoint>,
    flies: bool,
) -> JumpResult {
    let g = params.gravity;
    let (z_lo, v_lo) = (s[0], if flies { s[1].max(0.0) } else { 0.0 });
    let h_max = ballistic_apex(z_lo, v_lo, g);

    let q_lo = trajectory.last().map(|p| p.q).unwrap_or(PI);
    let t_apex = v_lo / g;
    let n = (t_apex / 1e-3).ceil() as usize;
    for i in 1..=n {
        let tau = t_apex * i as f64 / n as f64;
        trajectory.push(TrajectoryPoint {
            t: t_lo + tau,
            z: z_lo + v_lo * tau - 0.5 * g * tau * tau,
            zdot: v_lo - g * tau,
            q: q_lo,
            tau_motor: 0.0,
            tau_exo: 0.0,
        });
    }

    JumpResult {
        mode: scenario.mode,
        h_max,
        delta_h: h_max - scenario.squat_height,
        liftoff_velocity: v_lo,
        liftoff_height: z_lo,
        liftoff_time: t_lo,
        energy_motor: s[2].max(0.0),
        energy_elastic: s[3].max(0.0),
        trajectory,
    }
}

/// Run several scenarios in parallel; results keep the input order.
pub fn simulate_all(
    scenarios: &[JumpScenario],
    params: &RobotParams,
    dt: f64,
) -> Vec<Result<JumpResult, DynamicsError>> {
    scenarios
        .par_iter()
        .map(|s| simulate_jump(s, params, dt))
        .collect()
}
