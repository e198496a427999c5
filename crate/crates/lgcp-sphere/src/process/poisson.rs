use rand::Rng;
use rand_distr::{Distribution, Poisson};

use super::{IntensityModel, PointPattern};
use crate::error::{Error, Result};
use crate::geometry::{UnitVector, Window};

/// Simulates a Poisson process with intensity `lambda` on `window` by
/// thinning a homogeneous process of rate `lambda_max`.
///
/// `lambda_max` must dominate `lambda` on the window; the simulation fails
/// if a candidate point reveals a violation.
pub fn simulate_poisson(
    lambda: impl Fn(&UnitVector) -> f64,
    lambda_max: f64,
    window: &Window,
    rng: &mut impl Rng,
) -> Result<PointPattern> {
    if !(lambda_max > 0.0) || !lambda_max.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "dominating rate must be positive and finite, got {lambda_max}"
        )));
    }
    let mean = lambda_max * window.area();
    let n = sample_poisson(mean, rng)?;
    let mut points = Vec::new();
    for _ in 0..n {
        let u = window.sample_uniform(rng);
        let ratio = lambda(&u) / lambda_max;
        if ratio > 1.0 + 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "intensity {:.6} exceeds dominating rate {lambda_max:.6}",
                lambda(&u)
            )));
        }
        if rng.random::<f64>() < ratio {
            points.push(u);
        }
    }
    PointPattern::new(points, *window)
}

/// Draws a Poisson count with the given mean.
pub(crate) fn sample_poisson(mean: f64, rng: &mut impl Rng) -> Result<u64> {
    if mean == 0.0 {
        return Ok(0);
    }
    let dist = Poisson::new(mean)
        .map_err(|e| Error::InvalidArgument(format!("Poisson mean {mean}: {e}")))?;
    Ok(dist.sample(rng) as u64)
}

/// Independently retains each point with probability `retention(u)`.
///
/// Retention values must lie in [0, 1]. The window is unchanged.
pub fn thin_by_retention(
    pattern: &PointPattern,
    retention: impl Fn(&UnitVector) -> f64,
    rng: &mut impl Rng,
) -> Result<PointPattern> {
    let mut points = Vec::with_capacity(pattern.len());
    for u in pattern.points() {
        let p = retention(u);
        if !(0.0..=1.0 + 1e-12).contains(&p) {
            return Err(Error::InvalidArgument(format!(
                "retention probability {p} outside [0, 1]"
            )));
        }
        if rng.random::<f64>() < p {
            points.push(*u);
        }
    }
    PointPattern::new(points, *pattern.window())
}

/// Thins a pattern to homogeneity: each point of an inhomogeneous process
/// with intensity `intensity` survives with probability
/// lambda_min / lambda(u), leaving a process of constant rate lambda_min.
pub fn independent_thinning(
    pattern: &PointPattern,
    intensity: &IntensityModel,
    rng: &mut impl Rng,
) -> Result<PointPattern> {
    let lambda_min = intensity.min_intensity();
    thin_by_retention(pattern, |u| lambda_min / intensity.evaluate(u), rng)
}
