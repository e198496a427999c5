//! Observation windows: the full sphere, colatitude bands, and band
//! complements (a pair of polar caps).

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use super::{uniform_on_sphere, UnitVector};
use crate::error::{Error, Result};

/// Region of the sphere on which a point pattern is observed.
///
/// Windows are rotationally symmetric about the polar axis, so membership and
/// boundary distance depend only on colatitude. This covers the whole sphere,
/// caps, bands, and the two-cap complement of a band.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Window {
    /// The whole sphere; no boundary.
    FullSphere,
    /// Colatitudes in `[lo, hi]`. A cap when `lo == 0`.
    Band { lo: f64, hi: f64 },
    /// Colatitudes in `[0, lo] ∪ [hi, pi]`: everything outside the open band.
    BandComplement { lo: f64, hi: f64 },
}

fn check_band(lo: f64, hi: f64) -> Result<()> {
    if !lo.is_finite() || !hi.is_finite() || !(0.0..=PI).contains(&lo) || !(0.0..=PI).contains(&hi)
    {
        return Err(Error::InvalidArgument(format!(
            "band colatitudes ({lo}, {hi}) must lie in [0, pi]"
        )));
    }
    if lo >= hi {
        return Err(Error::InvalidArgument(format!(
            "band colatitudes must satisfy lo < hi, got ({lo}, {hi})"
        )));
    }
    Ok(())
}

impl Window {
    pub fn full_sphere() -> Self {
        Window::FullSphere
    }

    /// Band of colatitudes `[lo, hi]`, `0 <= lo < hi <= pi`.
    pub fn band(lo: f64, hi: f64) -> Result<Self> {
        check_band(lo, hi)?;
        Ok(Window::Band { lo, hi })
    }

    /// Polar cap of geodesic radius `r` around the north pole.
    pub fn cap(r: f64) -> Result<Self> {
        if !(r > 0.0 && r <= PI) {
            return Err(Error::InvalidArgument(format!(
                "cap radius {r} must lie in (0, pi]"
            )));
        }
        Ok(Window::Band { lo: 0.0, hi: r })
    }

    /// Complement of the open band `(lo, hi)`: the two polar caps
    /// `[0, lo]` and `[hi, pi]`.
    pub fn band_complement(lo: f64, hi: f64) -> Result<Self> {
        check_band(lo, hi)?;
        Ok(Window::BandComplement { lo, hi })
    }

    pub fn is_full_sphere(&self) -> bool {
        matches!(self, Window::FullSphere)
    }

    pub fn contains(&self, u: &UnitVector) -> bool {
        let theta = u.colatitude();
        match *self {
            Window::FullSphere => true,
            Window::Band { lo, hi } => (lo..=hi).contains(&theta),
            Window::BandComplement { lo, hi } => theta <= lo || theta >= hi,
        }
    }

    /// Surface area.
    pub fn area(&self) -> f64 {
        match *self {
            Window::FullSphere => 4.0 * PI,
            Window::Band { lo, hi } => 2.0 * PI * (lo.cos() - hi.cos()),
            Window::BandComplement { lo, hi } => {
                2.0 * PI * (1.0 - lo.cos()) + 2.0 * PI * (1.0 + hi.cos())
            }
        }
    }

    /// Geodesic distance from `u` to the window boundary; infinite on the
    /// full sphere. Negative values mean `u` lies outside, with the same
    /// magnitude convention.
    pub fn boundary_distance(&self, u: &UnitVector) -> f64 {
        let theta = u.colatitude();
        match *self {
            Window::FullSphere => f64::INFINITY,
            Window::Band { lo, hi } => {
                // A band edge at colatitude 0 or pi degenerates to a point of
                // measure zero, not a circle; it imposes no border.
                let from_lo = if lo > 0.0 { theta - lo } else { f64::INFINITY };
                let from_hi = if hi < PI { hi - theta } else { f64::INFINITY };
                from_lo.min(from_hi)
            }
            Window::BandComplement { lo, hi } => {
                // Signed distance to each cap, take the max: a point is in the
                // window when it is inside either cap.
                (lo - theta).max(theta - hi)
            }
        }
    }

    /// Whether `u` lies in the window at geodesic distance at least `r` from
    /// its boundary.
    pub fn eroded_contains(&self, u: &UnitVector, r: f64) -> bool {
        self.boundary_distance(u) >= r
    }

    /// Area of the erosion: points of the window at distance at least `r`
    /// from the boundary.
    pub fn eroded_area(&self, r: f64) -> f64 {
        debug_assert!(r >= 0.0);
        match *self {
            Window::FullSphere => 4.0 * PI,
            Window::Band { lo, hi } => {
                let a = if lo > 0.0 { lo + r } else { 0.0 };
                let b = if hi < PI { hi - r } else { PI };
                if a >= b {
                    0.0
                } else {
                    2.0 * PI * (a.cos() - b.cos())
                }
            }
            Window::BandComplement { lo, hi } => {
                let north = if lo - r > 0.0 {
                    2.0 * PI * (1.0 - (lo - r).cos())
                } else {
                    0.0
                };
                let south = if hi + r < PI {
                    2.0 * PI * (1.0 + (hi + r).cos())
                } else {
                    0.0
                };
                north + south
            }
        }
    }

    /// Uniform draw from the window.
    ///
    /// Colatitude bands are sampled by drawing `z = cos(theta)` uniformly on
    /// the matching interval (area on the sphere is uniform in `z`); the two
    /// caps of a complement are chosen in proportion to their areas.
    pub fn sample_uniform(&self, rng: &mut impl Rng) -> UnitVector {
        match *self {
            Window::FullSphere => uniform_on_sphere(rng),
            Window::Band { lo, hi } => sample_z_range(rng, hi.cos(), lo.cos()),
            Window::BandComplement { lo, hi } => {
                let north_area = 1.0 - lo.cos();
                let south_area = 1.0 + hi.cos();
                let p_north = north_area / (north_area + south_area);
                if rng.random::<f64>() < p_north {
                    sample_z_range(rng, lo.cos(), 1.0)
                } else {
                    sample_z_range(rng, -1.0, hi.cos())
                }
            }
        }
    }
}

fn sample_z_range(rng: &mut impl Rng, z_min: f64, z_max: f64) -> UnitVector {
    let z: f64 = rng.random_range(z_min..=z_max);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let s = (1.0 - z * z).max(0.0).sqrt();
    UnitVector::from_normalized(s * phi.cos(), s * phi.sin(), z)
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Window::FullSphere => write!(f, "full-sphere"),
            Window::Band { lo, hi } => write!(f, "band:{lo:.17},{hi:.17}"),
            Window::BandComplement { lo, hi } => {
                write!(f, "band-complement:{lo:.17},{hi:.17}")
            }
        }
    }
}

impl FromStr for Window {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "full-sphere" || s == "full" {
            return Ok(Window::FullSphere);
        }
        let parse_pair = |rest: &str| -> Result<(f64, f64)> {
            let (a, b) = rest.split_once(',').ok_or_else(|| {
                Error::InvalidArgument(format!("window '{s}': expected 'lo,hi'"))
            })?;
            let lo = a.trim().parse::<f64>().map_err(|_| {
                Error::InvalidArgument(format!("window '{s}': bad colatitude '{a}'"))
            })?;
            let hi = b.trim().parse::<f64>().map_err(|_| {
                Error::InvalidArgument(format!("window '{s}': bad colatitude '{b}'"))
            })?;
            Ok((lo, hi))
        };
        if let Some(rest) = s.strip_prefix("band-complement:") {
            let (lo, hi) = parse_pair(rest)?;
            Window::band_complement(lo, hi)
        } else if let Some(rest) = s.strip_prefix("band:") {
            let (lo, hi) = parse_pair(rest)?;
            Window::band(lo, hi)
        } else if let Some(rest) = s.strip_prefix("cap:") {
            let r = rest.trim().parse::<f64>().map_err(|_| {
                Error::InvalidArgument(format!("window '{s}': bad cap radius"))
            })?;
            Window::cap(r)
        } else {
            Err(Error::InvalidArgument(format!(
                "unrecognized window '{s}'; expected full-sphere, cap:R, band:LO,HI, or band-complement:LO,HI"
            )))
        }
    }
}
