use std::f64::consts::PI;

use super::{CurveKind, DistanceGrid, SummaryCurve};
use crate::covariance::CovarianceModel;
use crate::error::{Error, Result};
use crate::process::ThomasParams;

/// K-function of the unit-rate Poisson process, 2 pi (1 - cos r).
pub fn k_poisson(grid: &DistanceGrid) -> SummaryCurve {
    let values = grid.values().iter().map(|&r| 2.0 * PI * (1.0 - r.cos())).collect();
    SummaryCurve::new(grid.clone(), values, CurveKind::K).expect("Poisson K is in range")
}

/// K-function from a pair correlation function: K(r) = 2 pi int_0^r g(s) sin s ds,
/// accumulated panel by panel with adaptive Simpson quadrature at absolute
/// tolerance 1e-9 per panel. A relative floor near machine precision lets
/// panels whose integral dwarfs 1e-9 terminate at full f64 accuracy instead
/// of chasing unrepresentable digits. Non-finite g values are reported as
/// errors.
pub fn k_from_pcf(g: impl Fn(f64) -> f64, grid: &DistanceGrid) -> Result<SummaryCurve> {
    let h = |s: f64| g(s) * s.sin();
    let mut values = Vec::with_capacity(grid.len());
    let mut acc = 0.0;
    let mut prev = 0.0;
    for &r in grid.values() {
        acc += integrate(&h, prev, r, 1e-9)?;
        values.push(2.0 * PI * acc);
        prev = r;
    }
    SummaryCurve::new(grid.clone(), values, CurveKind::K)
}

fn eval_finite(f: &impl Fn(f64) -> f64, x: f64) -> Result<f64> {
    let v = f(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidArgument(format!(
            "integrand is not finite at r = {x}"
        )))
    }
}

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
fn integrate(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (eval_finite(f, a)?, eval_finite(f, m)?, eval_finite(f, b)?);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, fa, b, fb, m, fm, whole, tol, 26)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    m: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (eval_finite(f, lm)?, eval_finite(f, rm)?);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    // The relative floor stops the recursion once delta is pure roundoff;
    // without it, panels with huge integrands could never meet an absolute
    // 1e-9 and would grind to the depth cap.
    if depth == 0 || delta.abs() <= 15.0 * tol.max(1e-13 * (left.abs() + right.abs())) {
        // Richardson extrapolation knocks out the leading error term.
        return Ok(left + right + delta / 15.0);
    }
    let l = simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1)?;
    let r = simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1)?;
    Ok(l + r)
}

/// Closed-form K-function of the Thomas process with vMF(xi) clusters and
/// parent rate kappa per unit area:
///
///   K(r) = K_Pois(r) + (cosh 2xi - cosh(2 xi cos(r/2))) / (2 kappa sinh^2 xi).
///
/// The cluster term integrates the Neyman-Scott pair correlation of the vMF
/// kernel and satisfies K(pi) = 4 pi + 1/kappa (a typical point sees, on
/// average, 1/kappa extra siblings beyond the Poisson background). Evaluated
/// through exp_m1 factorizations so arbitrarily large xi stays finite.
pub fn k_thomas(params: &ThomasParams, grid: &DistanceGrid) -> SummaryCurve {
    let values = grid.values().iter().map(|&r| thomas_k_at(params, r)).collect();
    SummaryCurve::new(grid.clone(), values, CurveKind::K).expect("Thomas K is in range")
}

/// Scalar form of `k_thomas`, used pointwise by the contrast objective.
pub(crate) fn thomas_k_at(params: &ThomasParams, r: f64) -> f64 {
    let xi = params.xi();
    let q = (-2.0 * xi).exp_m1();
    let c = (0.5 * r).cos();
    let cluster = (-2.0 * xi * (1.0 - c)).exp_m1() * (-2.0 * xi * (1.0 + c)).exp_m1()
        / (params.kappa() * q * q);
    2.0 * PI * (1.0 - r.cos()) + cluster
}

/// Thomas K-function evaluated exactly as printed in the common display,
/// with denominator 4 kappa sin^2(xi): a comparison mode only.
///
/// The circular sine of a concentration parameter makes the cluster term
/// oscillate in scale with xi, and the un-cancelled cosh(2 xi) factor grows
/// like e^{2 xi}, so values explode for large xi (about 1e230 at xi = 266.6)
/// and overflow to infinity past xi ~ 350. See `k_thomas` for the
/// derivation-consistent form.
pub fn k_thomas_printed(params: &ThomasParams, grid: &DistanceGrid) -> SummaryCurve {
    let xi = params.xi();
    let log_denom = (8.0 * params.kappa() * xi.sin() * xi.sin()).ln();
    let values = grid
        .values()
        .iter()
        .map(|&r| {
            let c = (0.5 * r).cos();
            // cosh 2xi - cosh 2xi c = e^{2 xi} X / 2 with X in [0, 1).
            let x = (-2.0 * xi * (1.0 - c)).exp_m1() * (-2.0 * xi * (1.0 + c)).exp_m1();
            let cluster = (2.0 * xi + x.ln() - log_denom).exp();
            2.0 * PI * (1.0 - r.cos()) + cluster
        })
        .collect();
    SummaryCurve::new(grid.clone(), values, CurveKind::K).expect("printed Thomas K is nonnegative")
}

/// Pair correlation function of an LGCP: g(r) = exp(c(r)).
pub fn pcf_lgcp(model: &CovarianceModel, grid: &DistanceGrid) -> SummaryCurve {
    let values = grid.values().iter().map(|&r| model.evaluate(r).exp()).collect();
    SummaryCurve::new(grid.clone(), values, CurveKind::Pcf).expect("exp(c) is positive")
}

/// Pair correlation function of the Thomas process:
///
///   g(r) = 1 + xi sinh(2 xi cos(r/2)) / (8 pi kappa cos(r/2) sinh^2 xi),
///
/// the Neyman-Scott form 1 + (f * f)(r) / kappa for the vMF(xi) kernel.
/// Differentiating `k_thomas` recovers it: g = K'(r) / (2 pi sin r).
pub fn pcf_thomas(params: &ThomasParams, grid: &DistanceGrid) -> SummaryCurve {
    let xi = params.xi();
    let q = (-2.0 * xi).exp_m1();
    let values = grid
        .values()
        .iter()
        .map(|&r| {
            let c = (0.5 * r).cos();
            // sinh(2 xi c)/sinh^2 xi = 2 e^{-2 xi (1-c)} (1 - e^{-4 xi c}) / q^2;
            // exp_m1 keeps the (1 - e^{-4 xi c})/c factor accurate as c -> 0.
            let scaled = 2.0 * (-2.0 * xi * (1.0 - c)).exp() * (-(-4.0 * xi * c).exp_m1());
            1.0 + xi * scaled / (8.0 * PI * params.kappa() * c * q * q)
        })
        .collect();
    SummaryCurve::new(grid.clone(), values, CurveKind::Pcf).expect("Thomas pcf is positive")
}
