use std::sync::Arc;

use rand::Rng;

use super::poisson::sample_poisson;
use super::{IntensityModel, PointPattern};
use crate::covariance::CovarianceModel;
use crate::error::{Error, Result};
use crate::field::{FieldFactorization, GridField};
use crate::geometry::{GridMesh, UnitVector, Window};

/// Log Gaussian Cox process: a Poisson process driven by the random
/// intensity exp(Y), where Y is a Gaussian field with covariance `model`
/// and mean mu(u) = log lambda(u) - c(0)/2, so that E exp(Y(u)) = lambda(u).
#[derive(Clone, Debug)]
pub struct LgcpParams {
    intensity: IntensityModel,
    model: CovarianceModel,
}

impl LgcpParams {
    pub fn new(intensity: IntensityModel, model: CovarianceModel) -> Self {
        // Both halves are validated by their own constructors, and
        // lambda > 0 keeps the derived mean finite everywhere.
        Self { intensity, model }
    }

    pub fn intensity_model(&self) -> &IntensityModel {
        &self.intensity
    }

    pub fn covariance(&self) -> &CovarianceModel {
        &self.model
    }

    /// Target intensity lambda(v).
    pub fn intensity(&self, v: &UnitVector) -> f64 {
        self.intensity.evaluate(v)
    }

    /// Mean of the driving log field, log lambda(v) - c(0)/2.
    pub fn mean(&self, v: &UnitVector) -> f64 {
        self.intensity.evaluate(v).ln() - 0.5 * self.model.variance()
    }

    /// Mean of the log field under the Palm distribution given a point of
    /// the process at `u`: the original mean shifted up by c(d(u, v)).
    pub fn palm_mean(&self, u: &UnitVector, v: &UnitVector) -> f64 {
        self.mean(v) + self.model.evaluate(u.distance(v))
    }
}

/// Reusable sampler for one LGCP model on a fixed mesh.
///
/// Construction factorizes the covariance once; each call to `simulate`
/// then costs one matrix-vector product plus Poisson thinning against the
/// piecewise-constant intensity exp(Y) read at nearest mesh nodes.
#[derive(Clone)]
pub struct LgcpSimulator {
    fact: Arc<FieldFactorization>,
    means: Vec<f64>,
    model: CovarianceModel,
}

impl LgcpSimulator {
    pub fn new(params: &LgcpParams, mesh: Arc<GridMesh>) -> Result<Self> {
        let means = mesh.nodes().iter().map(|u| params.mean(u)).collect();
        let fact = FieldFactorization::new(mesh, params.covariance())?;
        Ok(Self {
            fact: Arc::new(fact),
            means,
            model: params.covariance().clone(),
        })
    }

    pub fn mesh(&self) -> &Arc<GridMesh> {
        self.fact.mesh()
    }

    pub fn covariance(&self) -> &CovarianceModel {
        &self.model
    }

    /// Mean of the driving log field at each mesh node.
    pub fn node_means(&self) -> &[f64] {
        &self.means
    }

    /// Derived sampler for the process seen from a point at `anchor`: the
    /// log-field mean gains c(d(anchor, .)) while the covariance, and hence
    /// the shared factorization, is unchanged.
    pub fn palm(&self, anchor: &UnitVector) -> LgcpSimulator {
        let means = self
            .fact
            .mesh()
            .nodes()
            .iter()
            .zip(&self.means)
            .map(|(v, m)| m + self.model.evaluate(anchor.distance(v)))
            .collect();
        LgcpSimulator {
            fact: Arc::clone(&self.fact),
            means,
            model: self.model.clone(),
        }
    }

    /// Draws one point pattern on `window`.
    pub fn simulate(&self, window: &Window, rng: &mut impl Rng) -> Result<PointPattern> {
        self.simulate_with_field(window, rng).map(|(p, _)| p)
    }

    /// Draws one pattern together with the log-intensity field that
    /// produced it.
    pub fn simulate_with_field(
        &self,
        window: &Window,
        rng: &mut impl Rng,
    ) -> Result<(PointPattern, GridField)> {
        let log_field = self.fact.simulate_with_node_means(&self.means, rng)?;
        let intensity = log_field.exp()?;
        let lambda_max = intensity
            .values()
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        // The simulated intensity is exp(Y) at the nearest node, so the node
        // maximum dominates it exactly; no safety margin is needed.
        let n = sample_poisson(lambda_max * window.area(), rng)?;
        let mut points = Vec::new();
        for _ in 0..n {
            let u = window.sample_uniform(rng);
            if rng.random::<f64>() < intensity.value_at(&u) / lambda_max {
                points.push(u);
            }
        }
        Ok((PointPattern::new(points, *window)?, log_field))
    }
}

/// n-th order correlation of the LGCP at the given points:
/// exp of the sum of c(d(u_i, u_j)) over all pairs i < j.
pub fn nth_order_correlation(model: &CovarianceModel, points: &[UnitVector]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "correlation of order {} is not defined; need at least 2 points",
            points.len()
        )));
    }
    let mut sum = 0.0;
    for (i, u) in points.iter().enumerate() {
        for v in &points[i + 1..] {
            sum += model.evaluate(u.distance(v));
        }
    }
    Ok(sum.exp())
}
