//! Gaussian random fields on a grid mesh.
//!
//! A field is simulated by factoring the covariance Gram matrix over the
//! mesh nodes once and reusing the factor for any number of replicates:
//! values = mu(nodes) + L z with z i.i.d. standard normal and L L^T equal to
//! the Gram matrix up to eigenvalue clamping.

use std::sync::Arc;

use ndarray::{Array1, Array2};
use ndarray_linalg::{EighInto, UPLO};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::covariance::CovarianceModel;
use crate::error::{Error, Result};
use crate::geometry::{GridMesh, UnitVector};

/// Largest mesh the dense factorization accepts (n^2 doubles of memory and
/// an O(n^3) eigendecomposition; 8192 nodes is ~0.5 GB and about a minute).
pub const MAX_FACTOR_NODES: usize = 8192;

/// Eigenvalues below this fraction of the variance are treated as zero.
const CLAMP_FRACTION: f64 = 1e-10;

/// Log-intensities above this overflow `exp` into meaningless territory.
const EXP_GUARD: f64 = 700.0;

/// Reusable covariance factor over a mesh: L with L L^T ~ Gram matrix.
#[derive(Clone, Debug)]
pub struct FieldFactorization {
    mesh: Arc<GridMesh>,
    factor: Array2<f64>,
    clamped: usize,
}

/// Field values sampled at the mesh nodes; evaluation elsewhere snaps to the
/// nearest node.
#[derive(Clone, Debug)]
pub struct GridField {
    mesh: Arc<GridMesh>,
    values: Vec<f64>,
}

impl FieldFactorization {
    /// Factors the Gram matrix of `model` over the mesh nodes.
    pub fn new(mesh: Arc<GridMesh>, model: &CovarianceModel) -> Result<Self> {
        let n = mesh.len();
        if n > MAX_FACTOR_NODES {
            return Err(Error::InvalidArgument(format!(
                "mesh has {n} nodes; dense factorization caps at {MAX_FACTOR_NODES}"
            )));
        }
        let mut gram = Array2::zeros((n, n));
        for i in 0..n {
            gram[(i, i)] = model.variance();
            for j in (i + 1)..n {
                let c = model.evaluate(mesh.node(i).distance(mesh.node(j)));
                gram[(i, j)] = c;
                gram[(j, i)] = c;
            }
        }
        Self::from_gram(mesh, gram, model.variance())
    }

    /// Factors an explicit symmetric Gram matrix. `variance` sets the
    /// clamping scale (the matrix diagonal for a covariance Gram).
    pub fn from_gram(mesh: Arc<GridMesh>, gram: Array2<f64>, variance: f64) -> Result<Self> {
        let n = mesh.len();
        if gram.nrows() != n || gram.ncols() != n {
            return Err(Error::InvalidArgument(format!(
                "gram matrix is {}x{}, mesh has {n} nodes",
                gram.nrows(),
                gram.ncols()
            )));
        }
        let trace: f64 = gram.diag().sum();
        let (eigs, mut vecs) = gram
            .eigh_into(UPLO::Lower)
            .map_err(|e| Error::Linalg(format!("symmetric eigendecomposition failed: {e}")))?;
        let threshold = CLAMP_FRACTION * variance;
        let mut clamped = 0usize;
        let mut clamped_mass = 0.0;
        let mut scale = Array1::zeros(n);
        for (j, &lambda) in eigs.iter().enumerate() {
            if lambda < threshold {
                clamped += 1;
                clamped_mass += lambda.abs();
            } else {
                scale[j] = lambda.sqrt();
            }
        }
        if clamped_mass > 0.1 * trace {
            return Err(Error::IndefiniteCovariance {
                clamped: clamped_mass,
                trace,
            });
        }
        // L = V diag(sqrt(lambda)), scaling columns in place.
        for (j, mut col) in vecs.columns_mut().into_iter().enumerate() {
            col *= scale[j];
        }
        Ok(Self {
            mesh,
            factor: vecs,
            clamped,
        })
    }

    pub fn mesh(&self) -> &Arc<GridMesh> {
        &self.mesh
    }

    /// The factor L itself.
    pub fn factor(&self) -> &Array2<f64> {
        &self.factor
    }

    /// Number of eigenvalues clamped to zero during factorization.
    pub fn clamped_count(&self) -> usize {
        self.clamped
    }

    /// Draws one field replicate with the given mean function.
    pub fn simulate(
        &self,
        mean_fn: impl Fn(&UnitVector) -> f64,
        rng: &mut impl Rng,
    ) -> Result<GridField> {
        let n = self.mesh.len();
        let z = Array1::from_iter((0..n).map(|_| rng.sample::<f64, _>(StandardNormal)));
        let fluct = self.factor.dot(&z);
        let values: Vec<f64> = self
            .mesh
            .nodes()
            .iter()
            .zip(fluct.iter())
            .map(|(node, f)| mean_fn(node) + f)
            .collect();
        GridField::from_values(Arc::clone(&self.mesh), values)
    }

    /// Draws one mean-zero field replicate.
    pub fn simulate_zero_mean(&self, rng: &mut impl Rng) -> Result<GridField> {
        self.simulate(|_| 0.0, rng)
    }

    /// Draws one replicate with an explicit per-node mean vector.
    pub fn simulate_with_node_means(
        &self,
        means: &[f64],
        rng: &mut impl Rng,
    ) -> Result<GridField> {
        let n = self.mesh.len();
        if means.len() != n {
            return Err(Error::InvalidArgument(format!(
                "{} mean values for a {n}-node mesh",
                means.len()
            )));
        }
        let z = Array1::from_iter((0..n).map(|_| rng.sample::<f64, _>(StandardNormal)));
        let fluct = self.factor.dot(&z);
        let values: Vec<f64> = means.iter().zip(fluct.iter()).map(|(m, f)| m + f).collect();
        GridField::from_values(Arc::clone(&self.mesh), values)
    }
}

impl GridField {
    /// Wraps explicit node values; rejects mismatched length or non-finite
    /// entries.
    pub fn from_values(mesh: Arc<GridMesh>, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.len() {
            return Err(Error::InvalidArgument(format!(
                "{} values for a {}-node mesh",
                values.len(),
                mesh.len()
            )));
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite())
        {
            return Err(Error::InvalidArgument(format!(
                "non-finite field value {v} at node {i}"
            )));
        }
        Ok(Self { mesh, values })
    }

    pub fn mesh(&self) -> &Arc<GridMesh> {
        &self.mesh
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Field value at the node nearest to `u`.
    pub fn value_at(&self, u: &UnitVector) -> f64 {
        self.values[self.mesh.nearest_node(u)]
    }

    /// Nodewise exponential, turning a log-intensity field into a driving
    /// intensity. Guards against overflow rather than producing infinities.
    pub fn exp(&self) -> Result<GridField> {
        let max = self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if max > EXP_GUARD {
            return Err(Error::IntensityOverflow { max_log: max });
        }
        Ok(GridField {
            mesh: Arc::clone(&self.mesh),
            values: self.values.iter().map(|v| v.exp()).collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::replicate_rng;
    use approx::assert_relative_eq;
    use statrs::distribution::{ContinuousCDF, Normal};

    fn mesh(n: usize) -> Arc<GridMesh> {
        Arc::new(GridMesh::build(n).unwrap())
    }

    fn model(s: &str) -> CovarianceModel {
        s.parse().unwrap()
    }

    #[test]
    fn diagonal_gram_factors_to_scaled_identity() {
        let m = mesh(10);
        let sigma2 = 2.25;
        let gram = Array2::eye(10) * sigma2;
        let fact = FieldFactorization::from_gram(Arc::clone(&m), gram, sigma2).unwrap();
        let recon = fact.factor().dot(&fact.factor().t());
        for i in 0..10 {
            for j in 0..10 {
                let want = if i == j { sigma2 } else { 0.0 };
                assert!((recon[(i, j)] - want).abs() < 1e-12);
                let want_l = if i == j { sigma2.sqrt() } else { 0.0 };
                assert!((fact.factor()[(i, j)].abs() - want_l).abs() < 1e-8);
            }
        }
        assert_eq!(fact.clamped_count(), 0);
    }

    #[test]
    fn multiquadric_gram_reconstructs() {
        let m = mesh(100);
        let c = model("multiquadric:delta=0.6,tau=1.5,sigma2=1.7");
        let fact = FieldFactorization::new(Arc::clone(&m), &c).unwrap();
        let recon = fact.factor().dot(&fact.factor().t());
        let mut max_err = 0.0f64;
        for i in 0..100 {
            for j in 0..100 {
                let want = c.evaluate(m.node(i).distance(m.node(j)));
                max_err = max_err.max((recon[(i, j)] - want).abs());
            }
        }
        assert!(max_err <= 1e-8, "reconstruction error {max_err}");
    }

    #[test]
    fn two_node_factor_matches_analytic_eigenvalues() {
        let m = mesh(2);
        let c = model("powered-exponential:alpha=1,phi=1,sigma2=1.3");
        let r = m.node(0).distance(m.node(1));
        let fact = FieldFactorization::new(Arc::clone(&m), &c).unwrap();
        let recon = fact.factor().dot(&fact.factor().t());
        // 2x2 symmetric [[v, c],[c, v]] has eigenvalues v +- c and the
        // factor must reproduce it exactly.
        let off = c.evaluate(r);
        assert_relative_eq!(recon[(0, 0)], 1.3, max_relative = 1e-12);
        assert_relative_eq!(recon[(0, 1)], off, max_relative = 1e-12);
        let tr = recon[(0, 0)] + recon[(1, 1)];
        let det = recon[(0, 0)] * recon[(1, 1)] - recon[(0, 1)] * recon[(1, 0)];
        let disc = (tr * tr / 4.0 - det).sqrt();
        assert_relative_eq!(tr / 2.0 + disc, 1.3 + off, max_relative = 1e-12);
        assert_relative_eq!(tr / 2.0 - disc, 1.3 - off, max_relative = 1e-10);
    }

    #[test]
    fn far_from_psd_gram_is_rejected() {
        let m = mesh(2);
        let gram = ndarray::array![[1.0, 2.0], [2.0, 1.0]]; // eigenvalues 3, -1
        let err = FieldFactorization::from_gram(m, gram, 1.0).unwrap_err();
        assert_eq!(err.code(), "E_INDEFINITE");
    }

    #[test]
    fn oversized_mesh_is_rejected_before_allocation() {
        let m = mesh(MAX_FACTOR_NODES + 1);
        let c = model("spherical:phi=1,sigma2=1");
        let err = FieldFactorization::new(m, &c).unwrap_err();
        assert_eq!(err.code(), "E_ARGUMENT");
    }

    #[test]
    fn simulation_is_reproducible_and_linear_in_the_mean() {
        let m = mesh(40);
        let c = model("multiquadric:delta=0.5,tau=1,sigma2=0.8");
        let fact = FieldFactorization::new(m, &c).unwrap();
        let a = fact
            .simulate(|u| u.z(), &mut replicate_rng(5, 1))
            .unwrap();
        let b = fact
            .simulate(|u| u.z(), &mut replicate_rng(5, 1))
            .unwrap();
        assert_eq!(a.values(), b.values());

        let shifted = fact
            .simulate(|u| u.z() + 2.5, &mut replicate_rng(5, 1))
            .unwrap();
        for (x, y) in a.values().iter().zip(shifted.values()) {
            assert!((y - x - 2.5).abs() < 1e-12);
        }
    }

    #[test]
    fn sample_moments_match_model() {
        let m = mesh(50);
        let c = model("powered-exponential:alpha=0.8,phi=0.9,sigma2=1.44");
        let fact = FieldFactorization::new(Arc::clone(&m), &c).unwrap();
        let mu = |u: &UnitVector| 0.3 * u.x();
        let n_rep = 10_000;
        let mut rng = replicate_rng(6, 0);
        let pairs = [(0usize, 1usize), (3, 40), (10, 30)];
        let mut sums = vec![0.0; m.len()];
        let mut prods = [0.0; 3];
        for _ in 0..n_rep {
            let f = fact.simulate(mu, &mut rng).unwrap();
            for (s, v) in sums.iter_mut().zip(f.values()) {
                *s += v;
            }
            for (k, &(i, j)) in pairs.iter().enumerate() {
                prods[k] += f.values()[i] * f.values()[j];
            }
        }
        let tol_mean = 4.0 * 1.2 / (n_rep as f64).sqrt();
        for (i, s) in sums.iter().enumerate() {
            let want = mu(m.node(i));
            assert!(
                (s / n_rep as f64 - want).abs() < tol_mean,
                "node {i}: mean {} vs {want}",
                s / n_rep as f64
            );
        }
        let tol_cov = 4.0 * 1.44 / (n_rep as f64).sqrt();
        for (k, &(i, j)) in pairs.iter().enumerate() {
            let want = c.evaluate(m.node(i).distance(m.node(j)));
            let got = prods[k] / n_rep as f64 - sums[i] / n_rep as f64 * (sums[j] / n_rep as f64);
            assert!(
                (got - want).abs() < tol_cov,
                "pair {k}: cov {got} vs {want}"
            );
        }
    }

    #[test]
    fn node_marginals_are_normal() {
        // Kolmogorov-Smirnov against N(mu, sigma) at a fixed node; the 1%
        // critical value for n = 10^4 is 1.628/sqrt(n).
        let m = mesh(30);
        let c = model("spherical:phi=2,sigma2=0.49");
        let fact = FieldFactorization::new(Arc::clone(&m), &c).unwrap();
        let node = 7;
        let mu = 1.1;
        let dist = Normal::new(mu, 0.7).unwrap();
        let critical = 1.628 / (10_000f64).sqrt();
        let mut ok = 0;
        for batch in 0..20 {
            let mut rng = replicate_rng(7, batch);
            let mut xs: Vec<f64> = (0..10_000)
                .map(|_| fact.simulate(|_| mu, &mut rng).unwrap().values()[node])
                .collect();
            xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let n = xs.len() as f64;
            let mut d = 0.0f64;
            for (i, x) in xs.iter().enumerate() {
                let cdf = dist.cdf(*x);
                d = d.max((cdf - i as f64 / n).abs());
                d = d.max(((i + 1) as f64 / n - cdf).abs());
            }
            if d < critical {
                ok += 1;
            }
        }
        assert!(ok >= 19, "only {ok}/20 batches passed the KS check");
    }

    #[test]
    fn three_point_product_moment_matches_closed_form() {
        // For the unit-mean field Z0 = exp(Y0 - c(0)/2),
        // E[Z0(u1) Z0(u2) Z0(u3)] = exp(c12 + c13 + c23).
        let m = mesh(32);
        let c = model("multiquadric:delta=0.45,tau=1.2,sigma2=0.5");
        let fact = FieldFactorization::new(Arc::clone(&m), &c).unwrap();
        let (i, j, k) = (0usize, 11usize, 25usize);
        let want = (c.evaluate(m.node(i).distance(m.node(j)))
            + c.evaluate(m.node(i).distance(m.node(k)))
            + c.evaluate(m.node(j).distance(m.node(k))))
        .exp();
        let mut rng = replicate_rng(8, 0);
        let n_rep = 100_000;
        let half_var = c.variance() / 2.0;
        let mut sum = 0.0;
        for _ in 0..n_rep {
            let f = fact.simulate_zero_mean(&mut rng).unwrap();
            sum += ((f.values()[i] - half_var)
                + (f.values()[j] - half_var)
                + (f.values()[k] - half_var))
                .exp();
        }
        let got = sum / n_rep as f64;
        assert!(
            (got - want).abs() <= 0.05 * want,
            "three-point moment {got} vs {want}"
        );
    }

    #[test]
    fn exp_guard_and_field_access() {
        let m = mesh(16);
        let flat = GridField::from_values(Arc::clone(&m), vec![0.0; 16]).unwrap();
        assert!(flat.exp().unwrap().values().iter().all(|&v| v == 1.0));

        let mut vals = vec![0.0; 16];
        vals[3] = 701.0;
        let hot = GridField::from_values(Arc::clone(&m), vals).unwrap();
        assert_eq!(hot.exp().unwrap_err().code(), "E_OVERFLOW");

        let mut vals = vec![0.0; 16];
        vals[5] = 1.0;
        let f = GridField::from_values(Arc::clone(&m), vals).unwrap();
        assert_relative_eq!(f.exp().unwrap().values()[5], std::f64::consts::E);
        assert_eq!(f.value_at(m.node(5)), 1.0);

        let mut rng = replicate_rng(9, 0);
        for _ in 0..50 {
            let u = crate::geometry::uniform_on_sphere(&mut rng);
            assert_eq!(f.value_at(&u), f.values()[m.nearest_node(&u)]);
        }
    }

    #[test]
    fn from_values_validates() {
        let m = mesh(4);
        assert!(GridField::from_values(Arc::clone(&m), vec![0.0; 3]).is_err());
        assert!(GridField::from_values(Arc::clone(&m), vec![0.0, f64::NAN, 0.0, 0.0]).is_err());
        let fact = FieldFactorization::new(
            Arc::clone(&m),
            &model("sine-power:alpha=1,sigma2=1"),
        )
        .unwrap();
        let err = fact
            .simulate(|u| 1.0 / (u.z() - u.z()), &mut replicate_rng(1, 0))
            .unwrap_err();
        assert_eq!(err.code(), "E_ARGUMENT");
    }
}
