//! Quasi-uniform node sets on the sphere.

use std::f64::consts::PI;

use super::UnitVector;
use crate::error::{Error, Result};

/// Above this size `nearest_node` switches from a linear scan to an
/// expanding search over the colatitude-sorted nodes.
const LINEAR_SCAN_MAX: usize = 512;

/// Fibonacci lattice on the sphere: `n` nodes of equal quadrature weight
/// `4*pi/n`, nearly equidistributed, sorted by decreasing `z`.
///
/// Node `i` sits at `z = 1 - (2i + 1)/n` and longitude `i` times the golden
/// angle `pi*(3 - sqrt(5))`.
#[derive(Clone, Debug)]
pub struct GridMesh {
    nodes: Vec<UnitVector>,
    weight: f64,
}

impl GridMesh {
    pub fn build(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "grid needs at least 2 nodes, got {n}"
            )));
        }
        let golden_angle = PI * (3.0 - 5.0f64.sqrt());
        let nodes = (0..n)
            .map(|i| {
                let z = 1.0 - (2 * i + 1) as f64 / n as f64;
                let phi = i as f64 * golden_angle;
                let s = (1.0 - z * z).max(0.0).sqrt();
                UnitVector::from_normalized(s * phi.cos(), s * phi.sin(), z)
            })
            .collect();
        Ok(Self {
            nodes,
            weight: 4.0 * PI / n as f64,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Quadrature weight shared by every node.
    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn nodes(&self) -> &[UnitVector] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &UnitVector {
        &self.nodes[i]
    }

    /// Index of the node closest to `u` in geodesic distance; exact ties go
    /// to the smaller index.
    pub fn nearest_node(&self, u: &UnitVector) -> usize {
        if self.nodes.len() <= LINEAR_SCAN_MAX {
            return self.nearest_by_scan(u);
        }
        self.nearest_by_expansion(u)
    }

    fn nearest_by_scan(&self, u: &UnitVector) -> usize {
        let mut best = 0usize;
        let mut best_dot = f64::NEG_INFINITY;
        for (i, v) in self.nodes.iter().enumerate() {
            let d = u.dot(v);
            if d > best_dot {
                best_dot = d;
                best = i;
            }
        }
        best
    }

    /// Expands outward from the node whose colatitude matches `u`, pruning a
    /// direction once even a longitude-aligned node there could not beat the
    /// best dot product found: `dot(u, v) <= cos(theta_u - theta_v)`.
    fn nearest_by_expansion(&self, u: &UnitVector) -> usize {
        let n = self.nodes.len();
        let zu = u.z();
        let su = (1.0 - zu * zu).max(0.0).sqrt();
        // z_i is linear in i, so the closest-colatitude index is direct.
        let j0 = (((1.0 - zu) * n as f64 - 1.0) / 2.0)
            .round()
            .clamp(0.0, (n - 1) as f64) as usize;

        let mut best = j0;
        let mut best_dot = u.dot(&self.nodes[j0]);
        let mut lo = j0 as isize - 1;
        let mut hi = j0 + 1;
        let mut lo_open = true;
        let mut hi_open = true;
        while lo_open || hi_open {
            if lo_open {
                if lo < 0 {
                    lo_open = false;
                } else {
                    let i = lo as usize;
                    let v = &self.nodes[i];
                    let zi = v.z();
                    let bound = zu * zi + su * (1.0 - zi * zi).max(0.0).sqrt();
                    if bound < best_dot {
                        lo_open = false;
                    } else {
                        let d = u.dot(v);
                        // i < best always holds on this side, so ties move here.
                        if d >= best_dot {
                            best_dot = d;
                            best = i;
                        }
                        lo -= 1;
                    }
                }
            }
            if hi_open {
                if hi >= n {
                    hi_open = false;
                } else {
                    let v = &self.nodes[hi];
                    let zi = v.z();
                    let bound = zu * zi + su * (1.0 - zi * zi).max(0.0).sqrt();
                    if bound < best_dot {
                        hi_open = false;
                    } else {
                        let d = u.dot(v);
                        if d > best_dot {
                            best_dot = d;
                            best = hi;
                        }
                        hi += 1;
                    }
                }
            }
        }
        best
    }
}
