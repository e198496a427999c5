use super::{CurveKind, DistanceGrid, SummaryCurve};
use crate::error::{Error, Result};
use crate::geometry::{GridMesh, UnitVector};
use crate::process::PointPattern;

/// Border-corrected inhomogeneous K estimate:
///
///   K(r) = [ sum over u in X with the cap C(u, r) inside W, v in X, v != u,
///            d(u, v) <= r of 1/(lambda(u) lambda(v)) ] / area(W eroded by r).
///
/// Values where the eroded window has vanished are reported as NaN.
///
/// Each ordered pair (u, v) contributes on the r-interval
/// [d(u, v), boundary_distance(u)], so the whole grid is filled with one
/// difference array in O(n^2 log m).
pub fn estimate_k_inhom(
    pattern: &PointPattern,
    lambda: impl Fn(&UnitVector) -> f64,
    grid: &DistanceGrid,
) -> Result<SummaryCurve> {
    let pts = pattern.points();
    let window = pattern.window();
    let mut weights = Vec::with_capacity(pts.len());
    for u in pts {
        let l = lambda(u);
        if !(l > 0.0) || !l.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "intensity must be positive and finite at every point, got {l}"
            )));
        }
        weights.push(1.0 / l);
    }
    let bdist: Vec<f64> = pts.iter().map(|u| window.boundary_distance(u)).collect();

    let r = grid.values();
    let mut diff = vec![0.0f64; r.len() + 1];
    for i in 0..pts.len() {
        for j in 0..pts.len() {
            if i == j {
                continue;
            }
            let d = pts[i].distance(&pts[j]);
            if d > bdist[i] {
                continue;
            }
            // Grid indices with d <= r_k <= bdist[i].
            let lo = r.partition_point(|&rk| rk < d);
            let hi = r.partition_point(|&rk| rk <= bdist[i]);
            if lo < hi {
                let w = weights[i] * weights[j];
                diff[lo] += w;
                diff[hi] -= w;
            }
        }
    }

    let mut values = Vec::with_capacity(r.len());
    let mut acc = 0.0;
    for (k, &rk) in r.iter().enumerate() {
        acc += diff[k];
        let area = window.eroded_area(rk);
        values.push(if area > 0.0 { acc / area } else { f64::NAN });
    }
    SummaryCurve::new(grid.clone(), values, CurveKind::K)
}

/// Border-corrected empty-space (F), nearest-neighbour (G), and J summaries
/// for a homogeneous pattern.
///
/// F uses `n_ref` quasi-uniform Fibonacci reference locations; at each r the
/// denominators keep only locations (respectively data points) whose cap of
/// radius r fits inside the window, and J = (1 - G)/(1 - F) wherever both
/// are defined and F < 1. Undefined coordinates are NaN.
pub fn estimate_fgj(
    pattern: &PointPattern,
    grid: &DistanceGrid,
    n_ref: usize,
) -> Result<(SummaryCurve, SummaryCurve, SummaryCurve)> {
    if n_ref < 100 {
        return Err(Error::InvalidArgument(format!(
            "need at least 100 reference locations, got {n_ref}"
        )));
    }
    let refs = GridMesh::build(n_ref)?;
    let pts = pattern.points();
    let window = pattern.window();

    let f = reduced_sample_fraction(
        refs.nodes().iter().map(|p| {
            let b = window.boundary_distance(p);
            (b, nearest_distance(p, pts, usize::MAX))
        }),
        grid,
        CurveKind::F,
    )?;
    let g = reduced_sample_fraction(
        pts.iter().enumerate().map(|(i, u)| {
            let b = window.boundary_distance(u);
            (b, nearest_distance(u, pts, i))
        }),
        grid,
        CurveKind::G,
    )?;

    let j_values = f
        .values()
        .iter()
        .zip(g.values())
        .map(|(&fv, &gv)| {
            if fv.is_nan() || gv.is_nan() || fv >= 1.0 {
                f64::NAN
            } else {
                (1.0 - gv) / (1.0 - fv)
            }
        })
        .collect();
    let j = SummaryCurve::new(grid.clone(), j_values, CurveKind::J)?;
    Ok((f, g, j))
}

/// Distance from `u` to the nearest point, skipping index `skip`; infinity
/// when there is none. Maximizing the dot product avoids one atan2 per pair.
fn nearest_distance(u: &UnitVector, pts: &[UnitVector], skip: usize) -> f64 {
    let mut best = usize::MAX;
    let mut best_dot = f64::NEG_INFINITY;
    for (i, v) in pts.iter().enumerate() {
        if i == skip {
            continue;
        }
        let d = u.dot(v);
        if d > best_dot {
            best_dot = d;
            best = i;
        }
    }
    if best == usize::MAX {
        f64::INFINITY
    } else {
        u.distance(&pts[best])
    }
}

/// Shared reduced-sample estimator: each site contributes to denominators
/// while r <= its boundary distance and to numerators once r reaches its
/// nearest-neighbour distance.
fn reduced_sample_fraction(
    sites: impl Iterator<Item = (f64, f64)>,
    grid: &DistanceGrid,
    kind: CurveKind,
) -> Result<SummaryCurve> {
    let r = grid.values();
    let mut hit = vec![0i64; r.len() + 1];
    let mut den = vec![0i64; r.len() + 1];
    for (bdist, nnd) in sites {
        let den_hi = r.partition_point(|&rk| rk <= bdist);
        if den_hi == 0 {
            continue;
        }
        den[0] += 1;
        den[den_hi] -= 1;
        let lo = r.partition_point(|&rk| rk < nnd);
        if lo < den_hi {
            hit[lo] += 1;
            hit[den_hi] -= 1;
        }
    }
    let mut values = Vec::with_capacity(r.len());
    let (mut h, mut d) = (0i64, 0i64);
    for k in 0..r.len() {
        h += hit[k];
        d += den[k];
        values.push(if d > 0 { h as f64 / d as f64 } else { f64::NAN });
    }
    SummaryCurve::new(grid.clone(), values, kind)
}
