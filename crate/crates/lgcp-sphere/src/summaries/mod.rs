//! Summary statistics for spherical point patterns: theoretical K and pair
//! correlation curves, and border-corrected empirical K, F, G, J estimates.
//!
//! Missing estimate values (for instance beyond the radius where the eroded
//! window vanishes) are carried as NaN sentinels and skipped by downstream
//! consumers.

mod estimate;
mod theory;

pub use estimate::{estimate_fgj, estimate_k_inhom};
pub use theory::{
    k_from_pcf, k_poisson, k_thomas, k_thomas_printed, pcf_lgcp, pcf_thomas,
};
pub(crate) use theory::thomas_k_at;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Strictly increasing evaluation distances in [0, pi].
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceGrid {
    r: Vec<f64>,
}

impl DistanceGrid {
    pub fn new(r: Vec<f64>) -> Result<Self> {
        if r.is_empty() {
            return Err(Error::InvalidArgument("distance grid is empty".into()));
        }
        if !(r[0] >= 0.0) || !(*r.last().unwrap() <= PI) {
            return Err(Error::InvalidArgument(format!(
                "distances must lie in [0, pi], got range [{}, {}]",
                r[0],
                r.last().unwrap()
            )));
        }
        if r.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidArgument(
                "distances must be strictly increasing".into(),
            ));
        }
        Ok(Self { r })
    }

    /// `n` equally spaced distances from `lo` to `hi` inclusive.
    pub fn uniform(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "need at least 2 grid points, got {n}"
            )));
        }
        let step = (hi - lo) / (n - 1) as f64;
        Self::new((0..n).map(|i| lo + step * i as f64).collect())
    }

    /// Default grid for F, G, J: 512 points on [0, pi/2].
    pub fn fgj_default() -> Self {
        Self::uniform(0.0, PI / 2.0, 512).expect("static grid bounds")
    }

    /// Default grid for K: 512 points on [0, `hi`].
    pub fn k_default(hi: f64) -> Result<Self> {
        Self::uniform(0.0, hi, 512)
    }

    pub fn values(&self) -> &[f64] {
        &self.r
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }
}

/// Which functional summary a curve represents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CurveKind {
    K,
    F,
    G,
    J,
    Pcf,
}

impl fmt::Display for CurveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CurveKind::K => "K",
            CurveKind::F => "F",
            CurveKind::G => "G",
            CurveKind::J => "J",
            CurveKind::Pcf => "pcf",
        };
        f.write_str(s)
    }
}

impl FromStr for CurveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "K" => Ok(CurveKind::K),
            "F" => Ok(CurveKind::F),
            "G" => Ok(CurveKind::G),
            "J" => Ok(CurveKind::J),
            "pcf" => Ok(CurveKind::Pcf),
            other => Err(Error::InvalidArgument(format!(
                "unknown curve kind '{other}' (expected K, F, G, J, or pcf)"
            ))),
        }
    }
}

/// A functional summary evaluated on a distance grid. NaN values mark
/// coordinates where the estimate is undefined.
#[derive(Clone, Debug)]
pub struct SummaryCurve {
    grid: DistanceGrid,
    values: Vec<f64>,
    kind: CurveKind,
}

impl SummaryCurve {
    pub fn new(grid: DistanceGrid, values: Vec<f64>, kind: CurveKind) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "{} values on a {}-point grid",
                values.len(),
                grid.len()
            )));
        }
        // Range sanity on the defined entries; estimators keep these by
        // construction, so violations indicate caller bugs.
        let tol = 1e-9;
        for &v in values.iter().filter(|v| !v.is_nan()) {
            let ok = match kind {
                CurveKind::F | CurveKind::G => (-tol..=1.0 + tol).contains(&v),
                CurveKind::K | CurveKind::J | CurveKind::Pcf => {
                    (v >= -tol && v.is_finite()) || v == f64::INFINITY
                }
            };
            if !ok {
                return Err(Error::InvalidArgument(format!(
                    "value {v} out of range for a {kind} curve"
                )));
            }
        }
        Ok(Self { grid, values, kind })
    }

    pub fn grid(&self) -> &DistanceGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// True where the curve is undefined.
    pub fn is_missing(&self, i: usize) -> bool {
        self.values[i].is_nan()
    }
}
