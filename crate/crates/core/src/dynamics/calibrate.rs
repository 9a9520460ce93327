use serde::{Deserialize, Serialize};

use super::{simulate_jump, DynamicsError, JumpMode, JumpScenario, RobotParams};

const MAX_BISECTIONS: usize = 200;
const BRACKET_GROWTH: usize = 40;

/// Measured mean jump heights the model is tuned to, mm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationTargets {
    pub baseline_mm: f64,
    pub stowed_mm: f64,
}

/// Tune `knee_torque_max` to the baseline jump, then `module_mass` to the
/// stowed jump. The deployed jump is left as a prediction.
///
/// Each stage is a bisection on a bracket verified to straddle the target;
/// it stops when the parameter interval collapses, which puts ΔH well inside
/// 0.5 mm of the target.
pub fn calibrate(
    targets: CalibrationTargets,
    params: &RobotParams,
    template: &JumpScenario,
    dt: f64,
) -> Result<RobotParams, DynamicsError> {
    for (name, v) in [
        ("baseline_mm", targets.baseline_mm),
        ("stowed_mm", targets.stowed_mm),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return Err(super::invalid(
                name,
                format!("target must be positive, got {v}"),
            ));
        }
    }
    params.validate()?;
    let mut p = *params;

    let baseline = template.with_mode(JumpMode::Baseline);
    let torque = solve(
        "knee_torque_max",
        targets.baseline_mm,
        p.knee_torque_max.max(1.0),
        true,
        |x| {
            let trial = RobotParams {
                knee_torque_max: x,
                ..p
            };
            Ok(simulate_jump(&baseline, &trial, dt)?.delta_h * 1000.0)
        },
    )?;
    p.knee_torque_max = torque;

    let stowed = template.with_mode(JumpMode::Stowed);
    let mass = solve(
        "module_mass",
        targets.stowed_mm,
        p.module_mass.max(1e-3),
        false,
        |x| {
            let trial = RobotParams {
                module_mass: x,
                ..p
            };
            Ok(simulate_jump(&stowed, &trial, dt)?.delta_h * 1000.0)
        },
    )?;
    p.module_mass = mass;
    Ok(p)
}

/// Find `x ≥ 0` with `f(x) = target` for a monotone `f`, increasing when
/// `increasing` is set.
fn solve(
    param: &'static str,
    target: f64,
    guess: f64,
    increasing: bool,
    f: impl Fn(f64) -> Result<f64, DynamicsError>,
) -> Result<f64, DynamicsError> {
    let mut probes: Vec<(f64, f64)> = Vec::new();
    let mut eval = |x: f64| -> Result<f64, DynamicsError> {
        let y = f(x)?;
        probes.push((x, y));
        Ok(y)
    };
    // below target on the `lo` side, above on the `hi` side
    let above = |y: f64| if increasing { y >= target } else { y <= target };

    let (mut lo, mut hi) = (0.0, guess);
    let y0 = eval(lo)?;
    if above(y0) {
        if y0 == target {
            return Ok(0.0);
        }
        return Err(bracket_error(param, target, &probes));
    }
    let mut grown = 0;
    while !above(eval(hi)?) {
        lo = hi;
        hi *= 2.0;
        grown += 1;
        if grown > BRACKET_GROWTH {
            return Err(bracket_error(param, target, &probes));
        }
    }
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if above(eval(mid)?) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let (ylo, yhi) = (f(lo)?, f(hi)?);
    Ok(if (ylo - target).abs() <= (yhi - target).abs() {
        lo
    } else {
        hi
    })
}

fn bracket_error(param: &'static str, target: f64, probes: &[(f64, f64)]) -> DynamicsError {
    let dump = probes
        .iter()
        .map(|(x, y)| format!("  {param} = {x:.6} -> ΔH = {y:.3} mm"))
        .collect::<Vec<_>>()
        .join("\n");
    DynamicsError::Bracket {
        param,
        target_mm: target,
        dump,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unreachable_stowed_target_reports_curve() {
        let p = RobotParams::default();
        let s = JumpScenario::standard(JumpMode::Baseline, None, &p).unwrap();
        let err = calibrate(
            CalibrationTargets {
                baseline_mm: 373.1,
                stowed_mm: 380.0,
            },
            &p,
            &s,
            1e-4,
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("module_mass") && msg.contains("ΔH ="), "{msg}");
    }
}
