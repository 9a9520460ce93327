//! Stand-in for finite-element characterization data.
//!
//! The curve is `a·θ + b·θ³` up to the densification onset, constrained to
//! pass through the peak torque at the end of the operating region, then
//! continues with an exponentially stiffening tail that matches value and
//! slope at the onset. Optional Gaussian noise uses a seeded generator.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::TorqueAngleSample;
use crate::constants::{DESIGN_LIMIT_DEG, OPERATING_MAX_DEG, PEAK_TORQUE_NM, SWEEP_MAX_DEG};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SurrogateFea {
    /// Torque at `operating_max`, N·m.
    pub peak_torque: f64,
    pub operating_max: f64,
    pub densification_onset: f64,
    /// Sweep end, rad.
    pub sweep_max: f64,
    /// Share of the peak torque carried by the cubic term, in `[0, 1]`.
    pub cubic_share: f64,
    /// Growth rate of the tangent stiffness past the onset, 1/rad.
    pub stiffening_rate: f64,
    /// Noise standard deviation as a fraction of `peak_torque`.
    pub noise_fraction: f64,
}

impl Default for SurrogateFea {
    fn default() -> Self {
        SurrogateFea {
            peak_torque: PEAK_TORQUE_NM,
            operating_max: OPERATING_MAX_DEG.to_radians(),
            densification_onset: DESIGN_LIMIT_DEG.to_radians(),
            sweep_max: SWEEP_MAX_DEG.to_radians(),
            cubic_share: 0.3,
            stiffening_rate: 20.0,
            noise_fraction: 0.02,
        }
    }
}

impl SurrogateFea {
    pub fn noise_free(mut self) -> Self {
        self.noise_fraction = 0.0;
        self
    }

    /// Linear and cubic coefficients of the pre-onset law.
    pub fn coefficients(&self) -> (f64, f64) {
        let t = self.operating_max;
        let linear = (1.0 - self.cubic_share) * self.peak_torque / t;
        let cubic = self.cubic_share * self.peak_torque / t.powi(3);
        (linear, cubic)
    }

    /// Noise-free torque at `theta`.
    pub fn torque(&self, theta: f64) -> f64 {
        let (a, b) = self.coefficients();
        let law = |t: f64| a * t + b * t.powi(3);
        let onset = self.densification_onset;
        if theta <= onset {
            law(theta)
        } else {
            let k = self.stiffening_rate;
            let slope = a + 3.0 * b * onset * onset;
            law(onset) + slope * ((k * (theta - onset)).exp() - 1.0) / k
        }
    }

    /// `n` evenly spaced samples over `[0, sweep_max]`. Noisy torques are
    /// clipped at zero since the module cannot pull.
    pub fn generate(&self, n: usize, seed: u64) -> Vec<TorqueAngleSample> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sigma = self.noise_fraction * self.peak_torque;
        let noise = (sigma > 0.0).then(|| Normal::new(0.0, sigma).expect("finite sigma"));
        (0..n)
            .map(|i| {
                let theta = if n > 1 {
                    self.sweep_max * i as f64 / (n - 1) as f64
                } else {
                    0.0
                };
                let mut torque = self.torque(theta);
                if let Some(d) = &noise {
                    torque = (torque + d.sample(&mut rng)).max(0.0);
                }
                TorqueAngleSample { theta, torque }
            })
            .collect()
    }
}

/// Surrogate sweep with the default curve shape and noise level.
pub fn generate_surrogate_fea(
    peak_torque: f64,
    operating_max: f64,
    densification_onset: f64,
    n: usize,
    seed: u64,
) -> Vec<TorqueAngleSample> {
    SurrogateFea {
        peak_torque,
        operating_max,
        densification_onset,
        ..SurrogateFea::default()
    }
    .generate(n, seed)
}
