//! Torque-angle law of the compliant module.
//!
//! The module's reaction torque about the knee is modeled as a cubic in the
//! compression angle, identified only on the operating region:
//!
//! `τ(θ) = α3·θ³ + α2·θ² + α1·θ + α0`
//!
//! Beyond the operating region the law is trusted up to the safety limit;
//! past it the lattice densifies and evaluation is refused.

mod fit;
mod io;
mod surrogate;

pub use fit::{
    detect_densification_onset, fit_operating_region, ONSET_STIFFNESS_RATIO, ONSET_WINDOW,
};
pub use io::{read_samples_csv, samples_from_csv, samples_to_csv, ModelFile};
pub use surrogate::{generate_surrogate_fea, SurrogateFea};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constants::{DESIGN_LIMIT_DEG, OPERATING_MAX_DEG};

#[derive(Debug, Error)]
pub enum StiffnessError {
    #[error("densification region entered: {theta_deg:.2}° exceeds the {limit_deg:.2}° limit")]
    Densification { theta_deg: f64, limit_deg: f64 },
    #[error("invalid compression angle {0} rad")]
    InvalidAngle(f64),
    #[error("need at least {needed} samples in the operating region, found {found}")]
    TooFewSamples { needed: usize, found: usize },
    #[error("rank-deficient design matrix (condition ratio {0:e})")]
    RankDeficient(f64),
    #[error("fitted law is not monotone: slope {slope:.4} N·m/rad at {theta_deg:.2}°")]
    NotMonotone { theta_deg: f64, slope: f64 },
    #[error("densification detected at {onset_deg:.2}°, inside the operating region")]
    EarlyDensification { onset_deg: f64 },
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("sample file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One characterization point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorqueAngleSample {
    /// Compression angle, rad.
    pub theta: f64,
    /// Reaction torque, N·m.
    pub torque: f64,
}

impl TorqueAngleSample {
    pub fn new(theta: f64, torque: f64) -> Self {
        TorqueAngleSample { theta, torque }
    }
}

/// Identified cubic law with its validity bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StiffnessModel {
    /// `[α0, α1, α2, α3]`.
    pub alpha: [f64; 4],
    /// End of the fitted operating region, rad.
    pub operating_max: f64,
    /// Largest admissible compression, rad.
    pub safety_max: f64,
    pub r_squared: f64,
}

impl StiffnessModel {
    /// Model with explicit coefficients and the standard region bounds.
    pub fn from_coefficients(alpha: [f64; 4]) -> Result<Self, StiffnessError> {
        Self::new(
            alpha,
            OPERATING_MAX_DEG.to_radians(),
            DESIGN_LIMIT_DEG.to_radians(),
            1.0,
        )
    }

    pub fn new(
        alpha: [f64; 4],
        operating_max: f64,
        safety_max: f64,
        r_squared: f64,
    ) -> Result<Self, StiffnessError> {
        let m = StiffnessModel {
            alpha,
            operating_max,
            safety_max,
            r_squared,
        };
        m.validate()?;
        Ok(m)
    }

    /// A module that never pushes back.
    pub fn zero() -> Self {
        StiffnessModel {
            alpha: [0.0; 4],
            operating_max: OPERATING_MAX_DEG.to_radians(),
            safety_max: DESIGN_LIMIT_DEG.to_radians(),
            r_squared: 1.0,
        }
    }

    pub fn validate(&self) -> Result<(), StiffnessError> {
        if !self.alpha.iter().all(|a| a.is_finite()) {
            return Err(StiffnessError::InvalidModel(
                "non-finite coefficient".into(),
            ));
        }
        if !(self.operating_max > 0.0 && self.operating_max < self.safety_max) {
            return Err(StiffnessError::InvalidModel(format!(
                "need 0 < operating_max ({}) < safety_max ({})",
                self.operating_max, self.safety_max
            )));
        }
        if !(0.0..=1.0).contains(&self.r_squared) {
            return Err(StiffnessError::InvalidModel(format!(
                "r_squared {} outside [0, 1]",
                self.r_squared
            )));
        }
        self.check_monotone()
    }

    /// Raw cubic, no clamping.
    pub fn polynomial(&self, theta: f64) -> f64 {
        let [a0, a1, a2, a3] = self.alpha;
        ((a3 * theta + a2) * theta + a1) * theta + a0
    }

    pub fn slope(&self, theta: f64) -> f64 {
        let [_, a1, a2, a3] = self.alpha;
        (3.0 * a3 * theta + 2.0 * a2) * theta + a1
    }

    fn antiderivative(&self, theta: f64) -> f64 {
        let [a0, a1, a2, a3] = self.alpha;
        (((a3 / 4.0 * theta + a2 / 3.0) * theta + a1 / 2.0) * theta + a0) * theta
    }

    pub fn is_zero(&self) -> bool {
        self.alpha == [0.0; 4]
    }

    /// Smallest slope on `[0, safety_max]` and where it occurs.
    pub fn min_slope(&self) -> (f64, f64) {
        let [_, _, a2, a3] = self.alpha;
        let mut cands = vec![0.0, self.safety_max];
        if a3 != 0.0 {
            let v = -a2 / (3.0 * a3);
            if v > 0.0 && v < self.safety_max {
                cands.push(v);
            }
        }
        cands
            .into_iter()
            .map(|t| (t, self.slope(t)))
            .fold(
                (0.0, f64::INFINITY),
                |best, c| if c.1 < best.1 { c } else { best },
            )
    }

    pub(crate) fn check_monotone(&self) -> Result<(), StiffnessError> {
        let (theta, slope) = self.min_slope();
        let scale = self.alpha.iter().map(|a| a.abs()).fold(0.0, f64::max);
        if slope < -1e-9 * scale.max(1.0) {
            return Err(StiffnessError::NotMonotone {
                theta_deg: theta.to_degrees(),
                slope,
            });
        }
        Ok(())
    }

    fn check_angle(&self, theta: f64) -> Result<(), StiffnessError> {
        if !(theta >= 0.0) || !theta.is_finite() {
            return Err(StiffnessError::InvalidAngle(theta));
        }
        if theta > self.safety_max {
            return Err(StiffnessError::Densification {
                theta_deg: theta.to_degrees(),
                limit_deg: self.safety_max.to_degrees(),
            });
        }
        Ok(())
    }

    /// Reaction torque at compression `theta`.
    ///
    /// Stowed modules are out of the load path and contribute nothing. A
    /// deployed module cannot pull, so negative values of the cubic near
    /// `θ = 0` are clamped to zero.
    pub fn torque_at(&self, theta: f64, deployed: bool) -> Result<f64, StiffnessError> {
        if !deployed {
            if !(theta >= 0.0) {
                return Err(StiffnessError::InvalidAngle(theta));
            }
            return Ok(0.0);
        }
        self.check_angle(theta)?;
        Ok(self.polynomial(theta).max(0.0))
    }

    /// Where the cubic stops being clamped: zero unless `α0 < 0`.
    fn engagement_angle(&self) -> f64 {
        if self.polynomial(0.0) >= 0.0 {
            return 0.0;
        }
        if self.polynomial(self.safety_max) <= 0.0 {
            return self.safety_max;
        }
        // monotone on the admissible range, so the root is unique
        let (mut lo, mut hi) = (0.0, self.safety_max);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.polynomial(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }

    /// Elastic energy stored at compression `theta`, J: the integral of
    /// [`torque_at`](Self::torque_at) from zero. For `α0 ≥ 0` this is
    /// `α3θ⁴/4 + α2θ³/3 + α1θ²/2 + α0θ`.
    pub fn stored_energy(&self, theta: f64) -> Result<f64, StiffnessError> {
        self.check_angle(theta)?;
        let start = self.engagement_angle();
        if theta <= start {
            return Ok(0.0);
        }
        Ok(self.antiderivative(theta) - self.antiderivative(start))
    }
}
