//! Isotropic covariance models on the sphere.
//!
//! Ten parametric correlation families, each positive definite on the
//! 2-sphere within its documented parameter range. A model is a correlation
//! family plus a variance: c(r) = sigma^2 * c0(r) for geodesic distance
//! r in [0, pi].

mod bessel;
mod certificate;

pub use bessel::bessel_k;
pub use certificate::HoelderCertificate;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

/// Correlation family with its shape parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CovarianceFamily {
    /// exp(-r^alpha / phi); alpha in (0,1], phi > 0.
    PoweredExponential { alpha: f64, phi: f64 },
    /// (2/Gamma(nu)) (r/2phi)^nu K_nu(r/phi); nu in (0,1/2], phi > 0.
    Matern { nu: f64, phi: f64 },
    /// (1 + (r/phi)^alpha)^(-tau/alpha); alpha in (0,1], tau > 0, phi > 0.
    GeneralizedCauchy { alpha: f64, tau: f64, phi: f64 },
    /// 1 - ((r/phi)^tau / (1 + (r/phi)^tau))^(alpha/tau);
    /// tau in (0,1], alpha in (0,tau], phi > 0.
    Dagum { alpha: f64, tau: f64, phi: f64 },
    /// ((1-delta)^2 / (1 + delta^2 - 2 delta cos r))^tau;
    /// delta in (0,1), tau > 0.
    Multiquadric { delta: f64, tau: f64 },
    /// 1 - sin(r/2)^alpha; alpha in (0,2).
    SinePower { alpha: f64 },
    /// (1 + r/(2phi)) (1 - r/phi)_+^2; phi > 0.
    Spherical { phi: f64 },
    /// (1 - r/phi)_+^tau; phi > 0, tau >= 2.
    Askey { phi: f64, tau: f64 },
    /// (1 + tau r/phi) (1 - r/phi)_+^tau; phi in (0,pi], tau >= 4.
    C2Wendland { phi: f64, tau: f64 },
    /// (1 + tau r/phi + (tau^2-1)/3 (r/phi)^2) (1 - r/phi)_+^tau;
    /// phi in (0,pi], tau >= 6.
    C4Wendland { phi: f64, tau: f64 },
}

/// Covariance model: a correlation family scaled by a variance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CovarianceModel {
    family: CovarianceFamily,
    variance: f64,
}

/// Constants of the small-distance power law 1 - c0(r) ~ B * r^A.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LimitConstants {
    pub a: f64,
    pub b: f64,
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidModel(msg()))
    }
}

impl CovarianceFamily {
    pub fn name(&self) -> &'static str {
        match self {
            CovarianceFamily::PoweredExponential { .. } => "powered-exponential",
            CovarianceFamily::Matern { .. } => "matern",
            CovarianceFamily::GeneralizedCauchy { .. } => "generalized-cauchy",
            CovarianceFamily::Dagum { .. } => "dagum",
            CovarianceFamily::Multiquadric { .. } => "multiquadric",
            CovarianceFamily::SinePower { .. } => "sine-power",
            CovarianceFamily::Spherical { .. } => "spherical",
            CovarianceFamily::Askey { .. } => "askey",
            CovarianceFamily::C2Wendland { .. } => "c2-wendland",
            CovarianceFamily::C4Wendland { .. } => "c4-wendland",
        }
    }

    fn validate(&self) -> Result<()> {
        let pos = |v: f64| v.is_finite() && v > 0.0;
        match *self {
            CovarianceFamily::PoweredExponential { alpha, phi } => {
                require(pos(alpha) && alpha <= 1.0, || {
                    format!("powered-exponential needs alpha in (0,1], got {alpha}")
                })?;
                require(pos(phi), || format!("powered-exponential needs phi > 0, got {phi}"))
            }
            CovarianceFamily::Matern { nu, phi } => {
                require(pos(nu) && nu <= 0.5, || {
                    format!("matern needs nu in (0,1/2], got {nu}")
                })?;
                require(pos(phi), || format!("matern needs phi > 0, got {phi}"))
            }
            CovarianceFamily::GeneralizedCauchy { alpha, tau, phi } => {
                require(pos(alpha) && alpha <= 1.0, || {
                    format!("generalized-cauchy needs alpha in (0,1], got {alpha}")
                })?;
                require(pos(tau), || format!("generalized-cauchy needs tau > 0, got {tau}"))?;
                require(pos(phi), || format!("generalized-cauchy needs phi > 0, got {phi}"))
            }
            CovarianceFamily::Dagum { alpha, tau, phi } => {
                require(pos(tau) && tau <= 1.0, || {
                    format!("dagum needs tau in (0,1], got {tau}")
                })?;
                require(pos(alpha) && alpha <= tau, || {
                    format!("dagum needs alpha in (0,tau], got alpha={alpha}, tau={tau}")
                })?;
                require(pos(phi), || format!("dagum needs phi > 0, got {phi}"))
            }
            CovarianceFamily::Multiquadric { delta, tau } => {
                require(delta.is_finite() && delta > 0.0 && delta < 1.0, || {
                    format!("multiquadric needs delta in (0,1), got {delta}")
                })?;
                require(pos(tau), || format!("multiquadric needs tau > 0, got {tau}"))
            }
            CovarianceFamily::SinePower { alpha } => {
                require(pos(alpha) && alpha < 2.0, || {
                    format!("sine-power needs alpha in (0,2), got {alpha}")
                })
            }
            CovarianceFamily::Spherical { phi } => {
                require(pos(phi), || format!("spherical needs phi > 0, got {phi}"))
            }
            CovarianceFamily::Askey { phi, tau } => {
                require(pos(phi), || format!("askey needs phi > 0, got {phi}"))?;
                require(tau.is_finite() && tau >= 2.0, || {
                    format!("askey needs tau >= 2, got {tau}")
                })
            }
            CovarianceFamily::C2Wendland { phi, tau } => {
                require(pos(phi) && phi <= std::f64::consts::PI, || {
                    format!("c2-wendland needs phi in (0,pi], got {phi}")
                })?;
                require(tau.is_finite() && tau >= 4.0, || {
                    format!("c2-wendland needs tau >= 4, got {tau}")
                })
            }
            CovarianceFamily::C4Wendland { phi, tau } => {
                require(pos(phi) && phi <= std::f64::consts::PI, || {
                    format!("c4-wendland needs phi in (0,pi], got {phi}")
                })?;
                require(tau.is_finite() && tau >= 6.0, || {
                    format!("c4-wendland needs tau >= 6, got {tau}")
                })
            }
        }
    }

    /// Correlation c0(r) at geodesic distance r in [0, pi]; c0(0) = 1.
    fn correlation(&self, r: f64) -> f64 {
        debug_assert!((0.0..=std::f64::consts::PI + 1e-9).contains(&r));
        match *self {
            CovarianceFamily::PoweredExponential { alpha, phi } => (-r.powf(alpha) / phi).exp(),
            CovarianceFamily::Matern { nu, phi } => bessel::matern_correlation(nu, r / phi),
            CovarianceFamily::GeneralizedCauchy { alpha, tau, phi } => {
                (1.0 + (r / phi).powf(alpha)).powf(-tau / alpha)
            }
            CovarianceFamily::Dagum { alpha, tau, phi } => {
                if r == 0.0 {
                    return 1.0;
                }
                // (u/(1+u))^(a/t) with u = (r/phi)^t, computed via 1/(1+u^-1)
                // so huge u cannot overflow to inf/inf.
                let w = 1.0 / (1.0 + (phi / r).powf(tau));
                1.0 - w.powf(alpha / tau)
            }
            CovarianceFamily::Multiquadric { delta, tau } => {
                // 1 + delta^2 - 2 delta cos r = (1-delta)^2 + 2 delta (1-cos r);
                // the right side is exact at r = 0 and loses nothing for
                // small r, so c0(0) is exactly 1.
                let num = (1.0 - delta) * (1.0 - delta);
                (num / (num + 2.0 * delta * (1.0 - r.cos()))).powf(tau)
            }
            CovarianceFamily::SinePower { alpha } => 1.0 - (r / 2.0).sin().powf(alpha),
            CovarianceFamily::Spherical { phi } => {
                let t = (1.0 - r / phi).max(0.0);
                (1.0 + r / (2.0 * phi)) * t * t
            }
            CovarianceFamily::Askey { phi, tau } => (1.0 - r / phi).max(0.0).powf(tau),
            CovarianceFamily::C2Wendland { phi, tau } => {
                let x = r / phi;
                (1.0 + tau * x) * (1.0 - x).max(0.0).powf(tau)
            }
            CovarianceFamily::C4Wendland { phi, tau } => {
                let x = r / phi;
                (1.0 + tau * x + (tau * tau - 1.0) / 3.0 * x * x) * (1.0 - x).max(0.0).powf(tau)
            }
        }
    }
}

impl CovarianceModel {
    pub fn new(family: CovarianceFamily, variance: f64) -> Result<Self> {
        family.validate()?;
        require(variance.is_finite() && variance > 0.0, || {
            format!("variance must be positive, got {variance}")
        })?;
        Ok(Self { family, variance })
    }

    pub fn family(&self) -> &CovarianceFamily {
        &self.family
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    /// Covariance c(r) = sigma^2 * c0(r), for r in [0, pi].
    pub fn evaluate(&self, r: f64) -> f64 {
        self.variance * self.family.correlation(r)
    }

    /// Correlation c0(r).
    pub fn correlation(&self, r: f64) -> f64 {
        self.family.correlation(r)
    }

    /// Variogram c(0) - c(r) = sigma^2 (1 - c0(r)).
    pub fn variogram(&self, r: f64) -> f64 {
        self.variance * (1.0 - self.family.correlation(r))
    }

    /// Constants (A, B) of the small-r power law
    /// lim_{r -> 0} (1 - c0(r)) / r^A = B.
    ///
    /// Available for every family except the multiquadric, whose smoothness
    /// bound comes from its dedicated certificate instead.
    pub fn limit_constants(&self) -> Result<LimitConstants> {
        let lc = |a: f64, b: f64| Ok(LimitConstants { a, b });
        match *self.family() {
            CovarianceFamily::PoweredExponential { alpha, phi } => lc(alpha, 1.0 / phi),
            CovarianceFamily::Matern { nu, phi } => {
                let a_nu = std::f64::consts::PI / ((std::f64::consts::PI * nu).sin() * gamma(nu));
                lc(2.0 * nu, a_nu / ((2.0 * phi).powf(2.0 * nu) * gamma(nu + 1.0)))
            }
            CovarianceFamily::GeneralizedCauchy { alpha, tau, phi } => {
                lc(alpha, tau / (alpha * phi.powf(alpha)))
            }
            CovarianceFamily::Dagum { alpha, phi, .. } => lc(alpha, phi.powf(-alpha)),
            CovarianceFamily::Multiquadric { .. } => Err(Error::InvalidModel(
                "multiquadric has no tabulated limit constants; \
                 its smoothness is handled by the dedicated certificate"
                    .into(),
            )),
            CovarianceFamily::SinePower { alpha } => lc(alpha, 2.0f64.powf(-alpha)),
            CovarianceFamily::Spherical { phi } => lc(1.0, 1.5 / phi),
            CovarianceFamily::Askey { phi, tau } => lc(1.0, tau / phi),
            CovarianceFamily::C2Wendland { phi, tau } => lc(2.0, tau * (tau + 1.0) / (2.0 * phi * phi)),
            // Expanding (1 + tau x + (tau^2-1)/3 x^2)(1-x)^tau about 0 leaves
            // -(tau+1)(tau+2)/6 as the quadratic coefficient.
            CovarianceFamily::C4Wendland { phi, tau } => {
                lc(2.0, (tau + 1.0) * (tau + 2.0) / (6.0 * phi * phi))
            }
        }
    }

    /// All family names accepted by the parser, canonical order.
    pub const FAMILY_NAMES: [&'static str; 10] = [
        "powered-exponential",
        "matern",
        "generalized-cauchy",
        "dagum",
        "multiquadric",
        "sine-power",
        "spherical",
        "askey",
        "c2-wendland",
        "c4-wendland",
    ];

    /// Draws a random valid model of the named family over conservative
    /// parameter ranges. Intended for stress tests and demos.
    pub fn sample_valid(family: &str, rng: &mut impl Rng) -> Result<Self> {
        fn log_u(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
            let t: f64 = rng.random();
            (lo.ln() + t * (hi.ln() - lo.ln())).exp()
        }
        let phi = log_u(rng, 0.05, std::f64::consts::PI);
        let sigma2 = log_u(rng, 0.25, 4.0);
        let fam = match family {
            "powered-exponential" => CovarianceFamily::PoweredExponential {
                alpha: rng.random_range(0.05..=1.0),
                phi,
            },
            "matern" => CovarianceFamily::Matern {
                nu: rng.random_range(0.05..=0.5),
                phi,
            },
            "generalized-cauchy" => CovarianceFamily::GeneralizedCauchy {
                alpha: rng.random_range(0.05..=1.0),
                tau: log_u(rng, 0.1, 10.0),
                phi,
            },
            "dagum" => {
                let tau = rng.random_range(0.05..=1.0);
                CovarianceFamily::Dagum {
                    alpha: rng.random_range(0.02 * tau..=tau),
                    tau,
                    phi,
                }
            }
            "multiquadric" => CovarianceFamily::Multiquadric {
                delta: rng.random_range(0.02..=0.98),
                tau: log_u(rng, 0.1, 10.0),
            },
            "sine-power" => CovarianceFamily::SinePower {
                alpha: rng.random_range(0.05..=1.95),
            },
            "spherical" => CovarianceFamily::Spherical { phi },
            "askey" => CovarianceFamily::Askey {
                phi,
                tau: rng.random_range(2.0..=8.0),
            },
            "c2-wendland" => CovarianceFamily::C2Wendland {
                phi,
                tau: rng.random_range(4.0..=10.0),
            },
            "c4-wendland" => CovarianceFamily::C4Wendland {
                phi,
                tau: rng.random_range(6.0..=12.0),
            },
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown covariance family '{other}'"
                )))
            }
        };
        CovarianceModel::new(fam, sigma2)
    }
}

impl fmt::Display for CovarianceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.family.name())?;
        match *self.family() {
            CovarianceFamily::PoweredExponential { alpha, phi } => {
                write!(f, "alpha={alpha},phi={phi}")?
            }
            CovarianceFamily::Matern { nu, phi } => write!(f, "nu={nu},phi={phi}")?,
            CovarianceFamily::GeneralizedCauchy { alpha, tau, phi }
            | CovarianceFamily::Dagum { alpha, tau, phi } => {
                write!(f, "alpha={alpha},tau={tau},phi={phi}")?
            }
            CovarianceFamily::Multiquadric { delta, tau } => {
                write!(f, "delta={delta},tau={tau}")?
            }
            CovarianceFamily::SinePower { alpha } => write!(f, "alpha={alpha}")?,
            CovarianceFamily::Spherical { phi } => write!(f, "phi={phi}")?,
            CovarianceFamily::Askey { phi, tau }
            | CovarianceFamily::C2Wendland { phi, tau }
            | CovarianceFamily::C4Wendland { phi, tau } => write!(f, "phi={phi},tau={tau}")?,
        }
        write!(f, ",sigma2={}", self.variance)
    }
}

impl FromStr for CovarianceModel {
    type Err = Error;

    /// Parses `family:key=value,...` with a mandatory `sigma2` entry, e.g.
    /// `multiquadric:delta=0.87,tau=2.03,sigma2=1.3`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, rest) = s.split_once(':').ok_or_else(|| {
            Error::InvalidArgument(format!(
                "covariance model '{s}': expected 'family:key=value,...'"
            ))
        })?;
        let mut params = std::collections::BTreeMap::new();
        for piece in rest.split(',') {
            let (k, v) = piece.split_once('=').ok_or_else(|| {
                Error::InvalidArgument(format!("covariance model '{s}': bad entry '{piece}'"))
            })?;
            let value = v.trim().parse::<f64>().map_err(|_| {
                Error::InvalidArgument(format!("covariance model '{s}': bad number '{v}'"))
            })?;
            if params.insert(k.trim().to_string(), value).is_some() {
                return Err(Error::InvalidArgument(format!(
                    "covariance model '{s}': duplicate key '{k}'"
                )));
            }
        }
        let mut take = |key: &str| -> Result<f64> {
            params.remove(key).ok_or_else(|| {
                Error::InvalidArgument(format!("covariance model '{s}': missing '{key}'"))
            })
        };
        let family = match name {
            "powered-exponential" => CovarianceFamily::PoweredExponential {
                alpha: take("alpha")?,
                phi: take("phi")?,
            },
            "matern" => CovarianceFamily::Matern {
                nu: take("nu")?,
                phi: take("phi")?,
            },
            "generalized-cauchy" => CovarianceFamily::GeneralizedCauchy {
                alpha: take("alpha")?,
                tau: take("tau")?,
                phi: take("phi")?,
            },
            "dagum" => CovarianceFamily::Dagum {
                alpha: take("alpha")?,
                tau: take("tau")?,
                phi: take("phi")?,
            },
            "multiquadric" => CovarianceFamily::Multiquadric {
                delta: take("delta")?,
                tau: take("tau")?,
            },
            "sine-power" => CovarianceFamily::SinePower {
                alpha: take("alpha")?,
            },
            "spherical" => CovarianceFamily::Spherical { phi: take("phi")? },
            "askey" => CovarianceFamily::Askey {
                phi: take("phi")?,
                tau: take("tau")?,
            },
            "c2-wendland" => CovarianceFamily::C2Wendland {
                phi: take("phi")?,
                tau: take("tau")?,
            },
            "c4-wendland" => CovarianceFamily::C4Wendland {
                phi: take("phi")?,
                tau: take("tau")?,
            },
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown covariance family '{other}'; expected one of {:?}",
                    CovarianceModel::FAMILY_NAMES
                )))
            }
        };
        let variance = take("sigma2")?;
        if let Some(extra) = params.keys().next() {
            return Err(Error::InvalidArgument(format!(
                "covariance model '{s}': unexpected key '{extra}'"
            )));
        }
        CovarianceModel::new(family, variance)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::replicate_rng;
    use approx::assert_relative_eq;
    use ndarray::Array2;
    use ndarray_linalg::Eigh;
    use std::f64::consts::PI;

    fn model(s: &str) -> CovarianceModel {
        s.parse().unwrap()
    }

    #[test]
    fn construction_rejects_out_of_range_parameters() {
        let bad = [
            "powered-exponential:alpha=1.2,phi=1,sigma2=1",
            "powered-exponential:alpha=0.5,phi=0,sigma2=1",
            "matern:nu=0.6,phi=1,sigma2=1",
            "matern:nu=0,phi=1,sigma2=1",
            "generalized-cauchy:alpha=0,tau=1,phi=1,sigma2=1",
            "dagum:alpha=0.8,tau=0.5,phi=1,sigma2=1",
            "dagum:alpha=0.5,tau=1.5,phi=1,sigma2=1",
            "multiquadric:delta=1,tau=1,sigma2=1",
            "multiquadric:delta=0.5,tau=0,sigma2=1",
            "sine-power:alpha=2,sigma2=1",
            "spherical:phi=-1,sigma2=1",
            "askey:phi=1,tau=1.9,sigma2=1",
            "c2-wendland:phi=3.5,tau=4,sigma2=1",
            "c2-wendland:phi=1,tau=3.9,sigma2=1",
            "c4-wendland:phi=1,tau=5.9,sigma2=1",
            "multiquadric:delta=0.5,tau=1,sigma2=0",
            "multiquadric:delta=0.5,tau=1,sigma2=nan",
        ];
        for s in bad {
            assert!(s.parse::<CovarianceModel>().is_err(), "{s} should be rejected");
        }
    }

    #[test]
    fn parser_rejects_malformed_strings() {
        for s in [
            "multiquadric",
            "multiquadric:delta=0.5,tau=1",
            "multiquadric:delta=0.5,tau=1,sigma2=1,extra=2",
            "multiquadric:delta=0.5,delta=0.6,tau=1,sigma2=1",
            "multiquadric:delta;0.5",
            "multiquadric:delta=abc,tau=1,sigma2=1",
            "gaussian:phi=1,sigma2=1",
        ] {
            assert!(s.parse::<CovarianceModel>().is_err(), "{s} should fail");
        }
    }

    #[test]
    fn display_round_trips_all_families() {
        let mut rng = replicate_rng(31, 0);
        for name in CovarianceModel::FAMILY_NAMES {
            let m = CovarianceModel::sample_valid(name, &mut rng).unwrap();
            let back: CovarianceModel = m.to_string().parse().unwrap();
            assert_eq!(m, back, "{name}");
        }
    }

    #[test]
    fn multiquadric_endpoint_values() {
        let m = model("multiquadric:delta=0.87,tau=2.03,sigma2=1.3");
        assert_relative_eq!(m.evaluate(0.0), 1.3, max_relative = 1e-14);
        let want = 1.3 * ((1.0 - 0.87f64) / (1.0 + 0.87)).powi(2).powf(2.03);
        assert_relative_eq!(m.evaluate(PI), want, max_relative = 1e-13);
    }

    #[test]
    fn matern_half_matches_powered_exponential() {
        let ma = model("matern:nu=0.5,phi=0.7,sigma2=2.0");
        let pe = model("powered-exponential:alpha=1,phi=0.7,sigma2=2.0");
        for k in 0..=64 {
            let r = PI * k as f64 / 64.0;
            assert!(
                (ma.evaluate(r) - pe.evaluate(r)).abs() < 1e-10,
                "r={r}: {} vs {}",
                ma.evaluate(r),
                pe.evaluate(r)
            );
        }
    }

    #[test]
    fn spherical_matches_direct_formula() {
        let m = model("spherical:phi=1,sigma2=1");
        let r: f64 = 0.1;
        let direct = (1.0 + 0.05) * 0.9 * 0.9;
        assert_relative_eq!(m.evaluate(r), direct, max_relative = 1e-15);
        assert_relative_eq!(m.variogram(r), 1.0 - direct, max_relative = 1e-12);
        // Beyond the support the correlation is exactly zero.
        assert_eq!(m.evaluate(1.0), 0.0);
        assert_eq!(m.evaluate(2.5), 0.0);
    }

    #[test]
    fn variogram_vanishes_at_zero_and_respects_quadratic_bound() {
        let mut rng = replicate_rng(32, 0);
        for name in CovarianceModel::FAMILY_NAMES {
            let m = CovarianceModel::sample_valid(name, &mut rng).unwrap();
            assert_eq!(m.variogram(0.0), 0.0, "{name}");
        }
        // Multiquadric with tau <= 1: 1 - c0 <= p/(1-p) * r^2/2, where
        // p = 2 delta/(1+delta^2). The denominator 1 - p cos r >= 1 - p is
        // what makes the constant p/(1-p) rather than p.
        let m = model("multiquadric:delta=0.5,tau=0.7,sigma2=1");
        let p = 2.0 * 0.5 / 1.25;
        for k in 1..=100 {
            let r = PI * k as f64 / 100.0;
            let bound = p / (1.0 - p) * r * r / 2.0;
            assert!(
                m.variogram(r) <= bound * (1.0 + 1e-12),
                "r={r}: {} > {bound}",
                m.variogram(r)
            );
        }
    }

    #[test]
    fn dagum_is_stable_at_extreme_scales() {
        let m = model("dagum:alpha=0.5,tau=0.9,phi=1e-6,sigma2=1");
        for &r in &[0.0, 1e-9, 0.1, PI] {
            let c = m.correlation(r);
            assert!(c.is_finite() && (0.0..=1.0).contains(&c), "r={r}: {c}");
        }
        assert_eq!(m.correlation(0.0), 1.0);
        assert!(m.correlation(PI) < 1e-3);
    }

    #[test]
    fn limit_constants_match_tabulated_forms() {
        let gc = model("generalized-cauchy:alpha=0.6,tau=1.4,phi=0.9,sigma2=1");
        let lc = gc.limit_constants().unwrap();
        assert_relative_eq!(lc.a, 0.6);
        assert_relative_eq!(lc.b, 1.4 / (0.6 * 0.9f64.powf(0.6)), max_relative = 1e-14);

        let dg = model("dagum:alpha=0.4,tau=0.8,phi=1.3,sigma2=1");
        let lc = dg.limit_constants().unwrap();
        assert_relative_eq!(lc.a, 0.4);
        assert_relative_eq!(lc.b, 1.3f64.powf(-0.4), max_relative = 1e-14);

        let mq = model("multiquadric:delta=0.5,tau=1,sigma2=1");
        assert!(mq.limit_constants().is_err());

        let ma = model("matern:nu=0.5,phi=1,sigma2=1");
        let lc = ma.limit_constants().unwrap();
        assert_relative_eq!(lc.a, 1.0);
        assert_relative_eq!(lc.b, 1.0, max_relative = 1e-12);
        let r = 1e-6;
        let ratio = (1.0 - ma.correlation(r)) / r;
        assert!((ratio - lc.b).abs() < 0.01 * lc.b, "ratio {ratio}");
    }

    #[test]
    fn limit_ratio_converges_for_every_family_with_constants() {
        // Representative parameter choices; the ratio (1-c0(r))/r^A should
        // approach B as r decreases and sit within 5% at r = 1e-5.
        let models = [
            "powered-exponential:alpha=0.7,phi=0.8,sigma2=1",
            "matern:nu=0.3,phi=0.7,sigma2=1",
            "generalized-cauchy:alpha=0.8,tau=1.2,phi=1.1,sigma2=1",
            "dagum:alpha=0.5,tau=0.9,phi=1.2,sigma2=1",
            "sine-power:alpha=1.2,sigma2=1",
            "spherical:phi=1.4,sigma2=1",
            "askey:phi=2.0,tau=3.0,sigma2=1",
            "c2-wendland:phi=2.5,tau=5.0,sigma2=1",
            "c4-wendland:phi=2.5,tau=7.0,sigma2=1",
        ];
        for s in models {
            let m = model(s);
            let lc = m.limit_constants().unwrap();
            let ratio = |r: f64| (1.0 - m.correlation(r)) / r.powf(lc.a);
            let devs: Vec<f64> = [1e-3, 1e-4, 1e-5]
                .iter()
                .map(|&r| (ratio(r) - lc.b).abs())
                .collect();
            // For the smoothest families 1 - c0 underflows toward the f64
            // cancellation floor; a deviation that tiny counts as converged.
            let floor = 1e-6 * lc.b;
            let improved = (devs[1] <= devs[0] * (1.0 + 1e-9) || devs[1] <= floor) as u32
                + (devs[2] <= devs[1] * (1.0 + 1e-9) || devs[2] <= floor) as u32;
            assert!(improved >= 2, "{s}: deviations {devs:?} not shrinking");
            assert!(
                devs[2] <= 0.05 * lc.b,
                "{s}: ratio at 1e-5 off by {} (B = {})",
                devs[2],
                lc.b
            );
        }
    }

    #[test]
    fn correlation_is_bounded_for_random_draws() {
        let mut rng = replicate_rng(33, 0);
        for name in CovarianceModel::FAMILY_NAMES {
            for k in 0..100 {
                let m = CovarianceModel::sample_valid(name, &mut rng).unwrap();
                assert_eq!(m.correlation(0.0), 1.0, "{name} draw {k}");
                for j in 0..=64 {
                    let r = PI * j as f64 / 64.0;
                    let c = m.correlation(r);
                    assert!(
                        c.is_finite() && c.abs() <= 1.0 + 1e-12,
                        "{name} draw {k}: c0({r}) = {c}"
                    );
                }
            }
        }
    }

    #[test]
    fn random_gram_matrices_are_positive_semidefinite() {
        let mut rng = replicate_rng(34, 0);
        for set in 0..50 {
            let name = CovarianceModel::FAMILY_NAMES[set % 10];
            let m = CovarianceModel::sample_valid(name, &mut rng).unwrap();
            let n = rng.random_range(2..=40);
            let pts: Vec<_> = (0..n)
                .map(|_| crate::geometry::uniform_on_sphere(&mut rng))
                .collect();
            let mut gram = Array2::zeros((n, n));
            for i in 0..n {
                for j in 0..n {
                    gram[(i, j)] = m.evaluate(pts[i].distance(&pts[j]));
                }
            }
            let (eigs, _) = gram.eigh(ndarray_linalg::UPLO::Lower).unwrap();
            let min = eigs.iter().cloned().fold(f64::INFINITY, f64::min);
            assert!(
                min >= -1e-8 * m.variance(),
                "set {set} ({name}): min eigenvalue {min}"
            );
        }
    }
}
