use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use super::poisson::sample_poisson;
use super::vmf::sample_vmf;
use super::{IntensityModel, PointPattern};
use crate::error::{Error, Result};
use crate::geometry::{uniform_on_sphere, Window};

/// Thomas cluster process parameters: parent rate `kappa` (per unit area)
/// and offspring concentration `xi` around each parent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThomasParams {
    kappa: f64,
    xi: f64,
}

impl ThomasParams {
    pub fn new(kappa: f64, xi: f64) -> Result<Self> {
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(Error::InvalidModel(format!(
                "parent rate kappa must be positive and finite, got {kappa}"
            )));
        }
        if !(xi > 0.0) || !xi.is_finite() {
            return Err(Error::InvalidModel(format!(
                "offspring concentration xi must be positive and finite, got {xi}"
            )));
        }
        Ok(Self { kappa, xi })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }
}

impl fmt::Display for ThomasParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "kappa={},xi={}", self.kappa, self.xi)
    }
}

impl FromStr for ThomasParams {
    type Err = Error;

    /// Parses `kappa=...,xi=...` in either order.
    fn from_str(s: &str) -> Result<Self> {
        let (mut kappa, mut xi) = (None, None);
        for part in s.split(',') {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("expected key=value, got '{part}'")))?;
            let v: f64 = value.trim().parse().map_err(|_| {
                Error::InvalidArgument(format!("bad number '{value}' for '{key}'"))
            })?;
            match key.trim() {
                "kappa" => kappa = Some(v),
                "xi" => xi = Some(v),
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "unknown Thomas parameter '{other}'"
                    )))
                }
            }
        }
        match (kappa, xi) {
            (Some(k), Some(x)) => ThomasParams::new(k, x),
            _ => Err(Error::InvalidArgument(
                "Thomas parameters require both kappa and xi".into(),
            )),
        }
    }
}

/// Simulates a Thomas process driven by the random intensity
/// Z(u) = lambda(u) / kappa * sum over parents of the vMF kernel at u.
///
/// Parents form a homogeneous Poisson process of rate `kappa` on the whole
/// sphere (clusters may straddle the window boundary); each parent receives
/// a Poisson(lambda_max / kappa) number of vMF offspring, which are kept
/// with probability lambda(u) / lambda_max and clipped to the window. The
/// construction is exact: E Z(u) = lambda(u).
pub fn simulate_thomas(
    params: &ThomasParams,
    intensity: &IntensityModel,
    window: &Window,
    rng: &mut impl Rng,
) -> Result<PointPattern> {
    let lambda_max = intensity.max_intensity();
    let n_parents = sample_poisson(params.kappa * 4.0 * PI, rng)?;
    let mean_offspring = lambda_max / params.kappa;
    let mut points = Vec::new();
    for _ in 0..n_parents {
        let parent = uniform_on_sphere(rng);
        let n_off = sample_poisson(mean_offspring, rng)?;
        for _ in 0..n_off {
            let u = sample_vmf(&parent, params.xi, rng)?;
            if rng.random::<f64>() < intensity.evaluate(&u) / lambda_max && window.contains(&u) {
                points.push(u);
            }
        }
    }
    PointPattern::new(points, *window)
}
