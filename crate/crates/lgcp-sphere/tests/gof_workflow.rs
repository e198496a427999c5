//! Full modelling chain on synthetic clustered data: estimate, fit both
//! model classes by minimum contrast, then judge each fit with the global
//! rank envelope test. Data generated by a strongly clustered LGCP should
//! keep the fitted LGCP but reject the fitted Thomas process, whose
//! pair correlation cannot bend fast enough at short range.

use std::sync::Arc;

use lgcp_sphere::covariance::{CovarianceFamily, CovarianceModel};
use lgcp_sphere::envelope::{informative_grid, run_gof_pipeline, FittedModel, GofConfig};
use lgcp_sphere::fitting::{
    default_lgcp_init, default_thomas_init, fit_lgcp, fit_thomas, ContrastSpec,
};
use lgcp_sphere::geometry::{GridMesh, Window};
use lgcp_sphere::process::{IntensityModel, LgcpParams, LgcpSimulator, ThomasParams};
use lgcp_sphere::rng::root_rng;
use lgcp_sphere::summaries::{estimate_k_inhom, DistanceGrid};

#[test]
fn lgcp_fit_is_kept_while_thomas_fit_is_rejected_on_clustered_data() {
    // Heavy-tailed clustering: high variance with a sharp correlation decay.
    let truth = CovarianceModel::new(
        CovarianceFamily::Multiquadric { delta: 0.99, tau: 0.25 },
        4.50,
    )
    .unwrap();
    let intensity = IntensityModel::constant(90.0).unwrap();
    let window = Window::full_sphere();
    let mesh = Arc::new(GridMesh::build(4098).unwrap());
    let simulator =
        LgcpSimulator::new(&LgcpParams::new(intensity.clone(), truth), Arc::clone(&mesh))
            .unwrap();
    let mut rng = root_rng(301);
    let data = simulator.simulate(&window, &mut rng).unwrap();
    assert!(data.len() > 200, "degenerate draw: {} points", data.len());

    // Fit both classes to the estimated K curve over the short interval.
    let k_grid = DistanceGrid::uniform(0.0, 0.18, 64).unwrap();
    let k_hat = estimate_k_inhom(&data, |u| intensity.evaluate(u), &k_grid).unwrap();
    let spec = ContrastSpec::short();
    let thomas_fit = fit_thomas(&k_hat, &spec, &default_thomas_init()).unwrap();
    let lgcp_fit = fit_lgcp(&k_hat, &spec, &default_lgcp_init()).unwrap();

    let config = GofConfig {
        n_sims: 199,
        level: 0.05,
        grid: informative_grid(&data, 8).unwrap(),
        n_ref: 512,
        mesh_nodes: 1002,
        seed: 302,
    };
    let thomas_model = FittedModel::Thomas(
        ThomasParams::new(thomas_fit.params[0], thomas_fit.params[1]).unwrap(),
    );
    let lgcp_model = FittedModel::Lgcp(
        CovarianceModel::new(
            CovarianceFamily::Multiquadric {
                delta: lgcp_fit.params[1],
                tau: lgcp_fit.params[2],
            },
            lgcp_fit.params[0],
        )
        .unwrap(),
    );

    let thomas_outcome = run_gof_pipeline(&thomas_model, &intensity, &data, &config).unwrap();
    let lgcp_outcome = run_gof_pipeline(&lgcp_model, &intensity, &data, &config).unwrap();
    let (t_lo, t_hi) = (thomas_outcome.envelope.p_lo, thomas_outcome.envelope.p_hi);
    let (l_lo, l_hi) = (lgcp_outcome.envelope.p_lo, lgcp_outcome.envelope.p_hi);
    println!("thomas fit p in [{t_lo:.3}, {t_hi:.3}], lgcp fit p in [{l_lo:.3}, {l_hi:.3}]");

    assert!(
        thomas_outcome.envelope.rejects(),
        "thomas fit should be rejected, p interval [{t_lo:.3}, {t_hi:.3}]"
    );
    assert!(
        !lgcp_outcome.envelope.rejects(),
        "lgcp fit should be kept, p interval [{l_lo:.3}, {l_hi:.3}]"
    );
    assert!(
        l_lo > t_hi,
        "lgcp p interval [{l_lo:.3}, {l_hi:.3}] should sit above thomas [{t_lo:.3}, {t_hi:.3}]"
    );
}
