//! Points, distances, and sampling on the unit sphere.

mod grid;
mod window;

pub use grid::GridMesh;
pub use window::Window;

use rand::Rng;

use crate::error::{Error, Result};

/// Point on the unit sphere, stored as a Cartesian vector of length 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitVector {
    x: f64,
    y: f64,
    z: f64,
}

impl UnitVector {
    /// Builds from Cartesian components, normalizing. Errors on a zero or
    /// non-finite vector.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let n2 = x * x + y * y + z * z;
        if !n2.is_finite() || n2 == 0.0 {
            return Err(Error::InvalidArgument(format!(
                "cannot normalize ({x}, {y}, {z}) to the unit sphere"
            )));
        }
        let n = n2.sqrt();
        Ok(Self {
            x: x / n,
            y: y / n,
            z: z / n,
        })
    }

    /// Builds from components already known to have unit norm.
    pub(crate) fn from_normalized(x: f64, y: f64, z: f64) -> Self {
        debug_assert!((x * x + y * y + z * z - 1.0).abs() < 1e-9);
        Self { x, y, z }
    }

    /// Builds from colatitude `theta` in `[0, pi]` and longitude `phi`.
    pub fn from_spherical(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=std::f64::consts::PI).contains(&theta) {
            return Err(Error::InvalidArgument(format!(
                "colatitude {theta} outside [0, pi]"
            )));
        }
        if !phi.is_finite() {
            return Err(Error::InvalidArgument(format!("longitude {phi} not finite")));
        }
        let (st, ct) = (theta.sin(), theta.cos());
        let (sp, cp) = (phi.sin(), phi.cos());
        Ok(Self {
            x: st * cp,
            y: st * sp,
            z: ct,
        })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// Colatitude in `[0, pi]`: angle from the north pole `(0, 0, 1)`.
    pub fn colatitude(&self) -> f64 {
        self.z.clamp(-1.0, 1.0).acos()
    }

    /// Longitude in `(-pi, pi]`. Zero at the poles by convention.
    pub fn longitude(&self) -> f64 {
        if self.x == 0.0 && self.y == 0.0 {
            0.0
        } else {
            self.y.atan2(self.x)
        }
    }

    pub fn dot(&self, other: &UnitVector) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// Geodesic (great-circle) distance in `[0, pi]`.
    pub fn distance(&self, other: &UnitVector) -> f64 {
        // acos of the dot product loses precision near 0 and pi; the
        // chord-based form atan2(|u x v|, u.v) is accurate everywhere.
        let cx = self.y * other.z - self.z * other.y;
        let cy = self.z * other.x - self.x * other.z;
        let cz = self.x * other.y - self.y * other.x;
        let cross = (cx * cx + cy * cy + cz * cz).sqrt();
        cross.atan2(self.dot(other))
    }

    /// An arbitrary unit vector orthogonal to `self`.
    pub fn any_orthonormal(&self) -> UnitVector {
        // Pick the coordinate axis least aligned with self, then project.
        let (ax, ay, az) = (self.x.abs(), self.y.abs(), self.z.abs());
        let (ex, ey, ez) = if ax <= ay && ax <= az {
            (1.0, 0.0, 0.0)
        } else if ay <= az {
            (0.0, 1.0, 0.0)
        } else {
            (0.0, 0.0, 1.0)
        };
        let d = self.x * ex + self.y * ey + self.z * ez;
        let (px, py, pz) = (ex - d * self.x, ey - d * self.y, ez - d * self.z);
        let n = (px * px + py * py + pz * pz).sqrt();
        UnitVector::from_normalized(px / n, py / n, pz / n)
    }

    /// Cross product, normalized. Errors if the vectors are (anti)parallel.
    pub fn cross_normalized(&self, other: &UnitVector) -> Result<UnitVector> {
        let cx = self.y * other.z - self.z * other.y;
        let cy = self.z * other.x - self.x * other.z;
        let cz = self.x * other.y - self.y * other.x;
        UnitVector::new(cx, cy, cz)
    }
}

/// Surface area of a spherical cap of geodesic radius `r` around any centre.
pub fn cap_area(r: f64) -> f64 {
    debug_assert!((0.0..=std::f64::consts::PI + 1e-12).contains(&r));
    2.0 * std::f64::consts::PI * (1.0 - r.cos())
}

/// Uniform point on the whole sphere.
pub fn uniform_on_sphere(rng: &mut impl Rng) -> UnitVector {
    // z uniform on [-1, 1], longitude uniform: the standard area-preserving map.
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let s = (1.0 - z * z).max(0.0).sqrt();
    UnitVector::from_normalized(s * phi.cos(), s * phi.sin(), z)
}

/// Rotates `p` by the rotation that carries the north pole to `target`.
///
/// Used to recentre draws made in north-pole coordinates (for example von
/// Mises-Fisher offspring) onto an arbitrary axis.
pub fn rotate_north_to(target: &UnitVector, p: &UnitVector) -> UnitVector {
    let ct = target.z;
    if ct > 1.0 - 1e-14 {
        return *p;
    }
    if ct < -1.0 + 1e-14 {
        // Rotation by pi about the x axis.
        return UnitVector::from_normalized(p.x, -p.y, -p.z);
    }
    // Rodrigues' formula about axis k = north x target (normalized).
    let kx = -target.y;
    let ky = target.x;
    let kn = (kx * kx + ky * ky).sqrt();
    let (kx, ky) = (kx / kn, ky / kn);
    let st = kn; // |north x target| = sin(angle)
    let kdp = kx * p.x + ky * p.y;
    let cxp = ky * p.z; // (k x p).x with kz = 0
    let cyp = -kx * p.z;
    let czp = kx * p.y - ky * p.x;
    let one_m = 1.0 - ct;
    let x = p.x * ct + cxp * st + kx * kdp * one_m;
    let y = p.y * ct + cyp * st + ky * kdp * one_m;
    let z = p.z * ct + czp * st;
    let n = (x * x + y * y + z * z).sqrt();
    UnitVector::from_normalized(x / n, y / n, z / n)
}
