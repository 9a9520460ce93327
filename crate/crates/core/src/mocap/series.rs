use nalgebra::Point3;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{solve_pose, BodyMap, MarkerFrame, MocapError};
use crate::dynamics::relative_change;

/// Longest run of frames with missing trunk markers that is interpolated.
pub const MAX_GAP_FRAMES: usize = 5;

/// Trunk height per frame, `(t s, z mm)`.
///
/// The trunk's reference shape is its first complete frame, centred on the
/// marker centroid, so the pose translation tracks the centroid. Frames
/// where a trunk marker is missing are filled by linear interpolation over
/// gaps of up to [`MAX_GAP_FRAMES`]; gaps at either end cannot be bridged.
pub fn trunk_height_series(
    frames: &[MarkerFrame],
    body_map: &BodyMap,
    trunk: &str,
) -> Result<Vec<(f64, f64)>, MocapError> {
    let ids = body_map
        .get(trunk)
        .ok_or_else(|| MocapError::UnknownBody(trunk.to_string()))?;
    if frames.is_empty() {
        return Err(MocapError::EmptySeries);
    }
    let first = frames
        .iter()
        .find_map(|f| f.body_points(ids))
        .ok_or(MocapError::Gap {
            t: frames[0].t,
            frames: frames.len(),
            max: MAX_GAP_FRAMES,
        })?;
    let c = (first[0].coords + first[1].coords + first[2].coords) / 3.0;
    let reference = first.map(|p| Point3::from(p.coords - c));

    let z: Vec<Option<f64>> = frames
        .par_iter()
        .map(|f| match f.body_points(ids) {
            Some(obs) => solve_pose(&reference, &obs).map(|pose| Some(pose.translation.z)),
            None => Ok(None),
        })
        .collect::<Result<_, _>>()?;

    let mut out = Vec::with_capacity(frames.len());
    let mut i = 0;
    while i < z.len() {
        if let Some(v) = z[i] {
            out.push((frames[i].t, v));
            i += 1;
            continue;
        }
        let start = i;
        while i < z.len() && z[i].is_none() {
            i += 1;
        }
        let len = i - start;
        if start == 0 || i == z.len() || len > MAX_GAP_FRAMES {
            return Err(MocapError::Gap {
                t: frames[start].t,
                frames: len,
                max: MAX_GAP_FRAMES,
            });
        }
        let (t0, z0) = (frames[start - 1].t, z[start - 1].unwrap_or_default());
        let (t1, z1) = (frames[i].t, z[i].unwrap_or_default());
        for f in &frames[start..i] {
            let w = if t1 > t0 { (f.t - t0) / (t1 - t0) } else { 0.5 };
            out.push((f.t, z0 + w * (z1 - z0)));
        }
    }
    Ok(out)
}

/// Centred moving average over an odd `window`, shrinking near the ends.
pub fn moving_average(values: &[f64], window: usize) -> Result<Vec<f64>, MocapError> {
    if window == 0 || window.is_multiple_of(2) {
        return Err(MocapError::InvalidParameter {
            field: "smoothing_window",
            reason: format!("must be a positive odd frame count, got {window}"),
        });
    }
    let half = window / 2;
    let n = values.len();
    Ok((0..n)
        .map(|i| {
            let r = half.min(i).min(n - 1 - i);
            let slice = &values[i - r..=i + r];
            slice.iter().sum::<f64>() / slice.len() as f64
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    /// mm
    pub h_max: f64,
    pub h_base: f64,
    pub delta_h: f64,
}

/// Apex of the smoothed trunk trajectory and the effective jump height.
pub fn analyze_trial(
    series: &[(f64, f64)],
    h_base: f64,
    smoothing_window: usize,
) -> Result<TrialResult, MocapError> {
    if series.is_empty() {
        return Err(MocapError::EmptySeries);
    }
    let z: Vec<f64> = series.iter().map(|s| s.1).collect();
    let smooth = moving_average(&z, smoothing_window)?;
    let h_max = smooth.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(TrialResult {
        h_max,
        h_base,
        delta_h: h_max - h_base,
    })
}

/// Squat height estimated as the mean trunk height over `window_s` seconds
/// before launch. Launch is detected where the trunk first rises more than
/// `rise_mm` above its starting height, then traced back to the last sample
/// still within a tenth of that rise.
pub fn detect_h_base(
    series: &[(f64, f64)],
    window_s: f64,
    rise_mm: f64,
) -> Result<f64, MocapError> {
    let z0 = series.first().ok_or(MocapError::EmptySeries)?.1;
    let crossing = series
        .iter()
        .position(|s| s.1 > z0 + rise_mm)
        .ok_or_else(|| MocapError::InvalidParameter {
            field: "h_base",
            reason: "no launch found for automatic squat height".into(),
        })?;
    let onset = series[..crossing]
        .iter()
        .rposition(|s| s.1 <= z0 + 0.1 * rise_mm)
        .unwrap_or(0);
    let t_onset = series[onset].0;
    let pre: Vec<f64> = series[..=onset]
        .iter()
        .filter(|s| s.0 >= t_onset - window_s)
        .map(|s| s.1)
        .collect();
    Ok(pre.iter().sum::<f64>() / pre.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupStats {
    pub n: usize,
    /// Means and sample standard deviation over trials, mm.
    pub mean_h_max: f64,
    pub mean_delta_h: f64,
    pub std_delta_h: f64,
    /// Against the supplied baseline mean, %.
    pub delta_percent: f64,
}

fn sorted_sum(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v.iter().sum()
}

/// Mean and spread of a trial group, and its relative change against
/// `baseline_mean` (mm of effective jump height).
pub fn aggregate_trials(
    trials: &[TrialResult],
    baseline_mean: f64,
) -> Result<GroupStats, MocapError> {
    let n = trials.len();
    if n < 2 {
        return Err(MocapError::TooFewTrials(n));
    }
    // summing in sorted order makes the result independent of trial order
    let mean = sorted_sum(trials.iter().map(|t| t.delta_h).collect()) / n as f64;
    let mean_h_max = sorted_sum(trials.iter().map(|t| t.h_max).collect()) / n as f64;
    let var =
        sorted_sum(trials.iter().map(|t| (t.delta_h - mean).powi(2)).collect()) / (n - 1) as f64;
    let delta_percent =
        relative_change(mean, baseline_mean).map_err(|e| MocapError::InvalidParameter {
            field: "baseline_mean",
            reason: e.to_string(),
        })?;
    Ok(GroupStats {
        n,
        mean_h_max,
        mean_delta_h: mean,
        std_delta_h: var.sqrt(),
        delta_percent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial(d: f64) -> TrialResult {
        TrialResult {
            h_max: d + 283.1,
            h_base: 283.1,
            delta_h: d,
        }
    }

    #[test]
    fn window_one_is_raw() {
        let s = vec![(0.0, 1.0), (0.1, 5.0), (0.2, 2.0)];
        assert_eq!(analyze_trial(&s, 0.0, 1).unwrap().h_max, 5.0);
    }

    #[test]
    fn decreasing_series_peaks_first() {
        let s: Vec<_> = (0..20).map(|i| (i as f64, 100.0 - i as f64)).collect();
        let r = analyze_trial(&s, 50.0, 5).unwrap();
        // the edge window shrinks to the first sample alone
        assert_eq!(r.h_max, 100.0);
        assert_eq!(r.delta_h, 50.0);
    }

    #[test]
    fn even_window_rejected() {
        assert!(moving_average(&[1.0, 2.0], 4).is_err());
        assert!(matches!(
            analyze_trial(&[], 0.0, 5),
            Err(MocapError::EmptySeries)
        ));
    }

    #[test]
    fn aggregate_examples() {
        let g = aggregate_trials(&[trial(437.1); 5], 373.1).unwrap();
        assert!((g.mean_delta_h - 437.1).abs() < 1e-12);
        assert!(g.std_delta_h < 1e-12);
        assert!((g.delta_percent - 6400.0 / 373.1).abs() < 1e-9);
        let g = aggregate_trials(&[trial(371.7); 5], 373.1).unwrap();
        assert_eq!(format!("{:+.1}", g.delta_percent), "-0.4");
        assert!(g.std_delta_h < 1e-12);
        let err = aggregate_trials(&[trial(1.0)], 373.1).unwrap_err();
        assert!(err.to_string().contains("need ≥2 trials"));
    }

    #[test]
    fn plateau_detection() {
        let s: Vec<_> = (0..240)
            .map(|i| {
                let t = i as f64 / 240.0;
                (
                    t,
                    if t < 0.6 {
                        283.1
                    } else {
                        283.1 + 1000.0 * (t - 0.6)
                    },
                )
            })
            .collect();
        assert!((detect_h_base(&s, 0.5, 5.0).unwrap() - 283.1).abs() < 1e-9);
    }
}
