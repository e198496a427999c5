//! Point processes on the sphere: Poisson, Thomas cluster, and log Gaussian
//! Cox simulation, independent thinning, and analytic moment identities.

mod lgcp;
mod poisson;
mod thomas;
mod vmf;

pub use lgcp::{nth_order_correlation, LgcpParams, LgcpSimulator};
pub use poisson::{independent_thinning, simulate_poisson, thin_by_retention};
pub use thomas::{simulate_thomas, ThomasParams};
pub use vmf::{sample_vmf, vmf_density};

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::{UnitVector, Window};

/// Finite point pattern observed in a window.
#[derive(Clone, Debug)]
pub struct PointPattern {
    points: Vec<UnitVector>,
    window: Window,
}

impl PointPattern {
    /// Builds a pattern, checking every point lies in the window.
    pub fn new(points: Vec<UnitVector>, window: Window) -> Result<Self> {
        if let Some((i, p)) = points
            .iter()
            .enumerate()
            .find(|(_, p)| !window.contains(p))
        {
            return Err(Error::InvalidArgument(format!(
                "point {i} at colatitude {:.6} lies outside the window {window}",
                p.colatitude()
            )));
        }
        Ok(Self { points, window })
    }

    pub fn points(&self) -> &[UnitVector] {
        &self.points
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Keeps only the points inside `window`, which becomes the pattern's
    /// new observation window.
    pub fn restrict_to(&self, window: Window) -> PointPattern {
        PointPattern {
            points: self
                .points
                .iter()
                .filter(|p| window.contains(p))
                .cloned()
                .collect(),
            window,
        }
    }
}

/// Intensity surface lambda(u) = beta0 + <u, beta> + gamma cos^2(theta),
/// with theta the colatitude. Required strictly positive on the sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntensityModel {
    beta0: f64,
    beta: [f64; 3],
    gamma: f64,
}

impl IntensityModel {
    pub fn new(beta0: f64, beta: [f64; 3], gamma: f64) -> Result<Self> {
        for v in [beta0, beta[0], beta[1], beta[2], gamma] {
            if !v.is_finite() {
                return Err(Error::InvalidModel(format!(
                    "intensity coefficients must be finite, got {v}"
                )));
            }
        }
        let m = Self { beta0, beta, gamma };
        let min = m.min_intensity();
        if min <= 0.0 {
            return Err(Error::InvalidModel(format!(
                "intensity must be positive on the sphere; minimum is {min:.6}"
            )));
        }
        Ok(m)
    }

    /// Homogeneous intensity of rate `lambda`.
    pub fn constant(lambda: f64) -> Result<Self> {
        Self::new(lambda, [0.0; 3], 0.0)
    }

    pub fn is_constant(&self) -> bool {
        self.beta == [0.0; 3] && self.gamma == 0.0
    }

    pub fn evaluate(&self, u: &UnitVector) -> f64 {
        self.beta0
            + self.beta[0] * u.x()
            + self.beta[1] * u.y()
            + self.beta[2] * u.z()
            + self.gamma * u.z() * u.z()
    }

    /// Exact infimum of the intensity over the sphere.
    ///
    /// For fixed colatitude the longitude-dependent part sweeps
    /// [-rho, rho] sin(theta) with rho = |(beta_x, beta_y)|, so the extremum
    /// reduces to a one-dimensional profile in theta, minimized on a grid
    /// and polished by golden-section search.
    pub fn min_intensity(&self) -> f64 {
        self.extremum(-1.0)
    }

    /// Exact supremum of the intensity over the sphere.
    pub fn max_intensity(&self) -> f64 {
        -self.negated().extremum(-1.0)
    }

    fn negated(&self) -> IntensityModel {
        IntensityModel {
            beta0: -self.beta0,
            beta: [-self.beta[0], -self.beta[1], -self.beta[2]],
            gamma: -self.gamma,
        }
    }

    fn extremum(&self, sign: f64) -> f64 {
        let rho = (self.beta[0] * self.beta[0] + self.beta[1] * self.beta[1]).sqrt();
        let h = |theta: f64| {
            self.beta0 + sign * rho * theta.sin() + self.beta[2] * theta.cos()
                + self.gamma * theta.cos() * theta.cos()
        };
        let n = 512;
        let mut best_k = 0usize;
        let mut best = f64::INFINITY;
        for k in 0..=n {
            let v = h(std::f64::consts::PI * k as f64 / n as f64);
            if v < best {
                best = v;
                best_k = k;
            }
        }
        let step = std::f64::consts::PI / n as f64;
        let a = step * (best_k.saturating_sub(1)) as f64;
        let b = (step * (best_k + 1) as f64).min(std::f64::consts::PI);
        golden_min(h, a, b, 1e-8).min(best)
    }
}

/// Golden-section minimization on [a, b] to the given x-tolerance; returns
/// the minimal function value found.
fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    fc.min(fd)
}

impl fmt::Display for IntensityModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{},{}",
            self.beta0, self.beta[0], self.beta[1], self.beta[2], self.gamma
        )
    }
}

impl FromStr for IntensityModel {
    type Err = Error;

    /// Parses `beta0,betax,betay,betaz,gamma`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 5 {
            return Err(Error::InvalidArgument(format!(
                "intensity '{s}': expected 5 comma-separated numbers \
                 (beta0,betax,betay,betaz,gamma)"
            )));
        }
        let mut v = [0.0; 5];
        for (k, p) in parts.iter().enumerate() {
            v[k] = p.trim().parse::<f64>().map_err(|_| {
                Error::InvalidArgument(format!("intensity '{s}': bad number '{p}'"))
            })?;
        }
        IntensityModel::new(v[0], [v[1], v[2], v[3]], v[4])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn pattern_rejects_points_outside_window() {
        let w = Window::cap(1.0).unwrap();
        let inside = UnitVector::from_spherical(0.5, 0.0).unwrap();
        let outside = UnitVector::from_spherical(2.0, 0.0).unwrap();
        assert!(PointPattern::new(vec![inside], w).is_ok());
        assert!(PointPattern::new(vec![inside, outside], w).is_err());
    }

    #[test]
    fn restrict_keeps_only_window_points() {
        let full = Window::full_sphere();
        let pts = vec![
            UnitVector::from_spherical(0.4, 0.0).unwrap(),
            UnitVector::from_spherical(1.5, 1.0).unwrap(),
            UnitVector::from_spherical(3.0, -2.0).unwrap(),
        ];
        let p = PointPattern::new(pts, full).unwrap();
        let cap = Window::cap(1.0).unwrap();
        let r = p.restrict_to(cap);
        assert_eq!(r.len(), 1);
        assert_eq!(*r.window(), cap);
    }

    #[test]
    fn intensity_positivity_is_enforced() {
        assert!(IntensityModel::constant(0.0).is_err());
        assert!(IntensityModel::constant(-1.0).is_err());
        assert!(IntensityModel::new(1.0, [0.0, 0.0, -1.5], 0.0).is_err());
        // Positive everywhere despite a negative gradient.
        assert!(IntensityModel::new(2.0, [0.0, 0.0, -1.5], 0.0).is_ok());
        assert!(IntensityModel::new(f64::NAN, [0.0; 3], 0.0).is_err());
    }

    #[test]
    fn extrema_match_analytic_values() {
        // With beta = (0,0,b) and gamma = 0 the extremes sit at the poles.
        let m = IntensityModel::new(5.0, [0.0, 0.0, 2.0], 0.0).unwrap();
        assert_relative_eq!(m.min_intensity(), 3.0, max_relative = 1e-9);
        assert_relative_eq!(m.max_intensity(), 7.0, max_relative = 1e-9);

        // Pure quadratic: min on the equator, max at the poles.
        let q = IntensityModel::new(1.0, [0.0; 3], 2.0).unwrap();
        assert_relative_eq!(q.min_intensity(), 1.0, max_relative = 1e-9);
        assert_relative_eq!(q.max_intensity(), 3.0, max_relative = 1e-9);

        // Horizontal gradient: extremes on the equator, offset +-rho = 5.
        let g = IntensityModel::new(6.0, [3.0, 4.0, 0.0], 0.0).unwrap();
        assert_relative_eq!(g.min_intensity(), 1.0, max_relative = 1e-9);
        assert_relative_eq!(g.max_intensity(), 11.0, max_relative = 1e-9);
    }

    #[test]
    fn extrema_bound_dense_samples() {
        let m = IntensityModel::new(6.06, [-0.112, -0.149, 0.32], 1.971).unwrap();
        let (lo, hi) = (m.min_intensity(), m.max_intensity());
        assert!(lo < hi);
        let mut rng = crate::rng::replicate_rng(51, 0);
        for _ in 0..20_000 {
            let u = crate::geometry::uniform_on_sphere(&mut rng);
            let v = m.evaluate(&u);
            assert!(v >= lo - 1e-9 && v <= hi + 1e-9, "lambda(u) = {v} not in [{lo}, {hi}]");
        }
        // The extrema are attained (up to search tolerance) somewhere.
        let grid = crate::geometry::GridMesh::build(4098).unwrap();
        let dense_min = grid
            .nodes()
            .iter()
            .map(|u| m.evaluate(u))
            .fold(f64::INFINITY, f64::min);
        assert!(dense_min >= lo - 1e-9 && dense_min - lo < 0.01);
    }

    #[test]
    fn intensity_parses_and_round_trips() {
        let m: IntensityModel = "6.06,-0.112,-0.149,0.32,1.971".parse().unwrap();
        let u = UnitVector::from_spherical(PI / 3.0, 0.7).unwrap();
        let want = 6.06 - 0.112 * u.x() - 0.149 * u.y() + 0.32 * u.z() + 1.971 * u.z() * u.z();
        assert_relative_eq!(m.evaluate(&u), want, max_relative = 1e-15);
        let back: IntensityModel = m.to_string().parse().unwrap();
        assert_eq!(m, back);
        assert!("1,2,3".parse::<IntensityModel>().is_err());
        assert!("1,2,3,4,x".parse::<IntensityModel>().is_err());
    }
}
