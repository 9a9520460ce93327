use nalgebra::{DMatrix, DVector};

use super::{StiffnessError, StiffnessModel, TorqueAngleSample};
use crate::constants::DESIGN_LIMIT_DEG;

const MIN_REGION_SAMPLES: usize = 8;

/// Local secant stiffness must exceed this multiple of the operating-region
/// mean to count as densification.
pub const ONSET_STIFFNESS_RATIO: f64 = 3.0;

/// Minimum angular width of the local secant window, rad (2°).
pub const ONSET_WINDOW: f64 = 2.0 * std::f64::consts::PI / 180.0;

fn in_region(theta: f64, operating_max: f64) -> bool {
    theta >= 0.0 && theta <= operating_max
}

/// Least-squares cubic on the samples with `θ ≤ operating_max`.
///
/// Samples outside the region never influence the coefficients. They only
/// feed [`detect_densification_onset`], which can lower the safety limit
/// below the 39° design limit but never raise it.
pub fn fit_operating_region(
    samples: &[TorqueAngleSample],
    operating_max: f64,
) -> Result<StiffnessModel, StiffnessError> {
    let region: Vec<&TorqueAngleSample> = samples
        .iter()
        .filter(|s| in_region(s.theta, operating_max))
        .collect();
    if region.len() < MIN_REGION_SAMPLES {
        return Err(StiffnessError::TooFewSamples {
            needed: MIN_REGION_SAMPLES,
            found: region.len(),
        });
    }

    let design = DMatrix::from_fn(region.len(), 4, |r, c| region[r].theta.powi(c as i32));
    let rhs = DVector::from_iterator(region.len(), region.iter().map(|s| s.torque));
    let svd = design.svd(true, true);
    let (smax, smin) = svd
        .singular_values
        .iter()
        .fold((0.0f64, f64::INFINITY), |(hi, lo), &s| {
            (hi.max(s), lo.min(s))
        });
    let ratio = if smax > 0.0 { smin / smax } else { 0.0 };
    if ratio < 1e-10 {
        return Err(StiffnessError::RankDeficient(ratio));
    }
    let coeffs = svd
        .solve(&rhs, 0.0)
        .map_err(|e| StiffnessError::InvalidModel(e.to_string()))?;
    let alpha = [coeffs[0], coeffs[1], coeffs[2], coeffs[3]];

    let design_limit = DESIGN_LIMIT_DEG.to_radians();
    let safety_max = match detect_densification_onset(samples, operating_max) {
        Some(onset) if onset <= operating_max => {
            return Err(StiffnessError::EarlyDensification {
                onset_deg: onset.to_degrees(),
            })
        }
        Some(onset) => onset.min(design_limit),
        None => design_limit,
    };
    if safety_max <= operating_max {
        return Err(StiffnessError::InvalidModel(format!(
            "operating region ({:.2}°) reaches the design limit",
            operating_max.to_degrees()
        )));
    }

    let mut model = StiffnessModel {
        alpha,
        operating_max,
        safety_max,
        r_squared: 0.0,
    };
    model.r_squared = r_squared(&model, &region);
    model.check_monotone()?;
    Ok(model)
}

fn r_squared(model: &StiffnessModel, region: &[&TorqueAngleSample]) -> f64 {
    let n = region.len() as f64;
    let mean = region.iter().map(|s| s.torque).sum::<f64>() / n;
    let ss_tot: f64 = region.iter().map(|s| (s.torque - mean).powi(2)).sum();
    let ss_res: f64 = region
        .iter()
        .map(|s| (s.torque - model.polynomial(s.theta)).powi(2))
        .sum();
    if ss_tot == 0.0 {
        // flat data: perfect only if the fit is flat too
        let scale = region
            .iter()
            .map(|s| s.torque.abs())
            .fold(0.0, f64::max)
            .max(1.0);
        return if ss_res <= 1e-24 * scale * scale * n {
            1.0
        } else {
            0.0
        };
    }
    (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
}

/// Smallest compression past the operating region where the local secant
/// stiffness exceeds [`ONSET_STIFFNESS_RATIO`] times the operating-region
/// mean secant stiffness.
///
/// Local secants span at least [`ONSET_WINDOW`] so that characterization
/// noise does not trigger the detector; the onset is reported at the window
/// midpoint. Returns `None` if the data never stiffen that much.
pub fn detect_densification_onset(
    samples: &[TorqueAngleSample],
    operating_max: f64,
) -> Option<f64> {
    let mut sorted: Vec<TorqueAngleSample> = samples.to_vec();
    sorted.sort_by(|a, b| a.theta.total_cmp(&b.theta));

    let region: Vec<&TorqueAngleSample> = sorted
        .iter()
        .filter(|s| in_region(s.theta, operating_max))
        .collect();
    let (first, last) = (region.first()?, region.last()?);
    if last.theta <= first.theta {
        return None;
    }
    // mean of consecutive secants telescopes to the end-to-end secant
    let mean = (last.torque - first.torque) / (last.theta - first.theta);
    if !(mean > 0.0) {
        return None;
    }
    let threshold = ONSET_STIFFNESS_RATIO * mean;

    for (i, a) in sorted.iter().enumerate() {
        if a.theta < operating_max {
            continue;
        }
        let b = sorted[i + 1..]
            .iter()
            .find(|b| b.theta - a.theta >= ONSET_WINDOW * (1.0 - 1e-9))?;
        let secant = (b.torque - a.torque) / (b.theta - a.theta);
        if secant > threshold {
            return Some(0.5 * (a.theta + b.theta));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact(a1: f64, a3: f64, n: usize) -> Vec<TorqueAngleSample> {
        (0..n)
            .map(|i| {
                let t = 0.5 * i as f64 / (n - 1) as f64;
                TorqueAngleSample::new(t, a1 * t + a3 * t.powi(3))
            })
            .collect()
    }

    #[test]
    fn exact_recovery() {
        let m = fit_operating_region(&exact(2.0, 50.0, 30), 0.5).unwrap();
        let want = [0.0, 2.0, 0.0, 50.0];
        for (a, w) in m.alpha.iter().zip(want) {
            assert!((a - w).abs() < 1e-6, "{:?}", m.alpha);
        }
        assert!((m.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn flat_zero_data() {
        let s: Vec<_> = (0..10)
            .map(|i| TorqueAngleSample::new(0.05 * i as f64, 0.0))
            .collect();
        let m = fit_operating_region(&s, 0.5).unwrap();
        assert_eq!(m.alpha, [0.0; 4]);
        assert_eq!(m.r_squared, 1.0);
    }

    #[test]
    fn too_few_or_repeated_angles() {
        assert!(matches!(
            fit_operating_region(&exact(2.0, 50.0, 7), 0.5),
            Err(StiffnessError::TooFewSamples { found: 7, .. })
        ));
        let s: Vec<_> = (0..12)
            .map(|i| TorqueAngleSample::new(if i % 2 == 0 { 0.1 } else { 0.2 }, i as f64))
            .collect();
        assert!(matches!(
            fit_operating_region(&s, 0.5),
            Err(StiffnessError::RankDeficient(_))
        ));
    }

    #[test]
    fn softening_data_is_rejected() {
        // sqrt-like response: slope of the fitted cubic goes negative
        let s: Vec<_> = (0..20)
            .map(|i| {
                let t = 0.5 * i as f64 / 19.0;
                TorqueAngleSample::new(t, 10.0 * t - 60.0 * t.powi(3) + 30.0 * t.powi(2))
            })
            .collect();
        assert!(matches!(
            fit_operating_region(&s, 0.5),
            Err(StiffnessError::NotMonotone { .. })
        ));
    }

    #[test]
    fn no_onset_without_stiffening() {
        assert_eq!(detect_densification_onset(&exact(2.0, 0.0, 40), 0.25), None);
    }
}
