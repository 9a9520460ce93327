//! Motion-capture analysis: rigid-body poses from marker triples, trunk
//! height trajectories, and per-group jump statistics.
//!
//! Units are millimetres and seconds throughout; z is vertical.

mod io;
mod pose;
mod report;
mod series;
mod synth;

pub use io::{frames_from_csv, frames_to_csv, read_body_map, read_frames, BodyMap};
pub use pose::{solve_pose, RigidBodyPose};
pub use report::{format_table, table_csv, ReportRow};
pub use series::{
    aggregate_trials, analyze_trial, detect_h_base, moving_average, trunk_height_series,
    GroupStats, TrialResult, MAX_GAP_FRAMES,
};
pub use synth::{standard_body_map, SyntheticTrial, TRUNK};

use std::collections::BTreeMap;

use nalgebra::Point3;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MocapError {
    #[error("reference markers are collinear (triangle area {0:.3e} mm²)")]
    Collinear(f64),
    #[error("body '{body}' must have exactly 3 markers, found {found}")]
    BadBody { body: String, found: usize },
    #[error("body '{0}' not in the body map")]
    UnknownBody(String),
    #[error("trunk markers missing for {frames} consecutive frames starting at t = {t:.4} s (at most {max} can be bridged)")]
    Gap { t: f64, frames: usize, max: usize },
    #[error("empty series")]
    EmptySeries,
    #[error("need ≥2 trials, got {0}")]
    TooFewTrials(usize),
    #[error("invalid {field}: {reason}")]
    InvalidParameter { field: &'static str, reason: String },
    #[error("marker file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Marker positions observed at one instant. Markers that were not seen are
/// absent.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkerFrame {
    /// s
    pub t: f64,
    /// mm
    pub markers: BTreeMap<String, Point3<f64>>,
}

impl MarkerFrame {
    /// The body's three markers in body-map order, if all were seen.
    pub fn body_points(&self, ids: &[String; 3]) -> Option<[Point3<f64>; 3]> {
        Some([
            *self.markers.get(&ids[0])?,
            *self.markers.get(&ids[1])?,
            *self.markers.get(&ids[2])?,
        ])
    }
}
