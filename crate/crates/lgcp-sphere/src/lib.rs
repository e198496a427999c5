//! Point processes on the unit sphere: log Gaussian Cox processes and
//! Thomas cluster processes, with simulation, nonparametric summary
//! statistics, minimum contrast fitting, and global rank envelope tests.

pub mod cli;
pub mod covariance;
pub mod envelope;
pub mod error;
pub mod field;
pub mod fitting;
pub mod geometry;
pub mod io;
pub mod process;
pub mod rng;
pub mod summaries;

pub use error::{Error, Result};
