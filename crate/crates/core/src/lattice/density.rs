use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{invalid, Domain, LatticeError, TpmsField};

/// Seed of the stratified jitter; fixed so estimates are bit-reproducible.
pub const SAMPLING_SEED: u64 = 0x5eed_6c61_7474;

/// Acceptable density error of [`solve_level_for_density`].
pub const DENSITY_TOLERANCE: f64 = 0.005;

const MAX_BISECTIONS: usize = 60;

/// Fraction of the domain occupied by the lattice shell.
///
/// The unit cube is split into `n³` strata mapped onto the domain by a
/// volume-preserving transform; each stratum contributes one jittered
/// sample. Every x-slab draws from its own seeded stream and the counts are
/// integers, so the result does not depend on the number of worker threads.
pub fn volume_fraction(
    field: &TpmsField,
    domain: &Domain,
    samples_per_axis: usize,
) -> Result<f64, LatticeError> {
    field.validate()?;
    domain.validate()?;
    if samples_per_axis < 8 {
        return Err(invalid(
            "samples_per_axis",
            format!("must be at least 8, got {samples_per_axis}"),
        ));
    }
    let n = samples_per_axis;
    let offset = domain.origin() - field.origin;
    let solid: u64 = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(
                SAMPLING_SEED ^ (i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15),
            );
            let mut count = 0u64;
            for j in 0..n {
                for k in 0..n {
                    let u = (i as f64 + rng.random::<f64>()) / n as f64;
                    let v = (j as f64 + rng.random::<f64>()) / n as f64;
                    let w = (k as f64 + rng.random::<f64>()) / n as f64;
                    let d = domain.local_sample(u, v, w) + offset;
                    if field.eval_offset(&d).abs() <= field.shell_halfwidth {
                        count += 1;
                    }
                }
            }
            count
        })
        .sum();
    Ok(solid as f64 / (n * n * n) as f64)
}

/// Shell half-width that gives the requested relative density.
///
/// Bisection on the monotone map `w ↦ volume_fraction(w)`, bracketed by
/// `[0, amplitude + |t|]` where the upper end is solid everywhere. The
/// half-width stored in `field` is ignored.
pub fn solve_level_for_density(
    field: &TpmsField,
    target_density: f64,
    domain: &Domain,
    samples_per_axis: usize,
) -> Result<f64, LatticeError> {
    if !(target_density > 0.0 && target_density < 1.0) {
        return Err(invalid(
            "target_density",
            format!("must lie in (0, 1), got {target_density}"),
        ));
    }
    let density = |w: f64| volume_fraction(&field.with_halfwidth(w), domain, samples_per_axis);

    let mut lo = 0.0;
    let mut hi = field.kind.amplitude_bound() + field.level.abs();
    let mut best = (hi, density(hi)?);
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        let f = density(mid)?;
        if (f - target_density).abs() < (best.1 - target_density).abs() {
            best = (mid, f);
        }
        if f < target_density {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi.max(1.0) {
            break;
        }
    }
    if (best.1 - target_density).abs() <= DENSITY_TOLERANCE {
        Ok(best.0)
    } else {
        Err(LatticeError::NonConvergence {
            target: target_density,
            achieved: best.1,
        })
    }
}
