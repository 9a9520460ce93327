//! Reference values from the physical prototype and its experiments.
//!
//! Angles are in degrees and lengths in millimeters here, as reported.
//! Convert with [`f64::to_radians`] before handing them to the models.

/// Compression reached by the compliant module in a standard jump.
pub const OPERATING_MAX_DEG: f64 = 29.0;

/// Design limit; compression beyond this enters densification.
pub const DESIGN_LIMIT_DEG: f64 = 39.0;

/// Extent of the characterization sweep.
pub const SWEEP_MAX_DEG: f64 = 45.0;

/// Module torque at the end of the operating region, N·m.
pub const PEAK_TORQUE_NM: f64 = 6.8;

/// Fit quality reported for the characterization data (not reproduced here).
pub const REPORTED_R_SQUARED: f64 = 0.87;

/// Standardized squat height.
pub const H_BASE_MM: f64 = 283.1;

/// Motion-capture tracking resolution.
pub const MOCAP_RESOLUTION_MM: f64 = 0.1;

/// Total tracking markers on the rig: trunk plus four thighs, three each.
pub const MARKER_COUNT: usize = 15;

/// Trials per experimental group.
pub const TRIALS_PER_GROUP: usize = 5;

/// One row of the vertical jumping results table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableRow {
    pub group: &'static str,
    pub h_max_mm: f64,
    pub delta_h_mm: f64,
    /// Relative change vs. baseline as printed, one decimal.
    pub relative_change_pct: Option<f64>,
}

pub const TABLE_BASELINE: TableRow = TableRow {
    group: "Baseline",
    h_max_mm: 656.3,
    delta_h_mm: 373.1,
    relative_change_pct: None,
};

pub const TABLE_STOWED: TableRow = TableRow {
    group: "Stowed",
    h_max_mm: 654.9,
    delta_h_mm: 371.7,
    relative_change_pct: Some(-0.4),
};

pub const TABLE_DEPLOYED: TableRow = TableRow {
    group: "Deployed",
    h_max_mm: 720.3,
    delta_h_mm: 437.1,
    relative_change_pct: Some(17.1),
};

pub const TABLE: [TableRow; 3] = [TABLE_BASELINE, TABLE_STOWED, TABLE_DEPLOYED];

/// Acceptance band for the model's deployed-mode prediction, percent.
pub const DEPLOYED_BAND_PCT: (f64, f64) = (10.0, 25.0);
