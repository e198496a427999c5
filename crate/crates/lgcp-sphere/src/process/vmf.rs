use std::f64::consts::{PI, TAU};

use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::UnitVector;

/// Draws from the von Mises-Fisher distribution on the sphere with mean
/// direction `center` and concentration `xi > 0`.
///
/// The cosine t of the angle to `center` has density proportional to
/// exp(xi t) on [-1, 1]; inverting its CDF at a uniform w gives
/// t = 1 + log(w + (1 - w) e^{-2 xi}) / xi, evaluated through `log1p` so
/// that concentrations beyond the underflow point of e^{-2 xi} still
/// produce finite, correctly distributed draws.
pub fn sample_vmf(center: &UnitVector, xi: f64, rng: &mut impl Rng) -> Result<UnitVector> {
    if !(xi > 0.0) || !xi.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "vMF concentration must be positive and finite, got {xi}"
        )));
    }
    let w: f64 = rng.random();
    // 1 - e^{-2 xi} computed without cancellation for small xi.
    let q = -(-2.0 * xi).exp_m1();
    let t = 1.0 + (-w * q).ln_1p() / xi;
    let t = t.clamp(-1.0, 1.0);
    let s = (1.0 - t * t).max(0.0).sqrt();
    let a = TAU * rng.random::<f64>();
    let e1 = center.any_orthonormal();
    let e2 = center.cross_normalized(&e1)?;
    let v = [
        t * center.x() + s * (a.cos() * e1.x() + a.sin() * e2.x()),
        t * center.y() + s * (a.cos() * e1.y() + a.sin() * e2.y()),
        t * center.z() + s * (a.cos() * e1.z() + a.sin() * e2.z()),
    ];
    UnitVector::new(v[0], v[1], v[2])
}

/// Von Mises-Fisher density at `u`, with respect to surface measure.
///
/// Uses the overflow-safe form xi e^{xi (t - 1)} / (2 pi (1 - e^{-2 xi}))
/// rather than xi e^{xi t} / (4 pi sinh xi), which they equal analytically.
pub fn vmf_density(center: &UnitVector, xi: f64, u: &UnitVector) -> Result<f64> {
    if !(xi > 0.0) || !xi.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "vMF concentration must be positive and finite, got {xi}"
        )));
    }
    let t = center.dot(u).clamp(-1.0, 1.0);
    let q = -(-2.0 * xi).exp_m1();
    Ok(xi * (xi * (t - 1.0)).exp() / (2.0 * PI * q))
}
