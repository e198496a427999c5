//! Runs the global rank envelope test twice on the same clustered pattern:
//! once against the Poisson model it violates, once against the model that
//! generated it.

use lgcp_sphere::envelope::{informative_grid, run_gof_pipeline, FittedModel, GofConfig};
use lgcp_sphere::geometry::Window;
use lgcp_sphere::process::{simulate_thomas, IntensityModel, ThomasParams};
use lgcp_sphere::rng::root_rng;

fn main() -> lgcp_sphere::Result<()> {
    let intensity = IntensityModel::constant(100.0)?;
    let truth = ThomasParams::new(3.0, 100.0)?;
    let mut rng = root_rng(62);
    let data = simulate_thomas(&truth, &intensity, &Window::full_sphere(), &mut rng)?;
    println!("data: {} clustered points", data.len());

    let config = GofConfig {
        n_sims: 199,
        level: 0.1,
        grid: informative_grid(&data, 6)?,
        n_ref: 512,
        mesh_nodes: 400,
        seed: 63,
    };

    for (label, model) in [
        ("poisson", FittedModel::Poisson),
        ("thomas (truth)", FittedModel::Thomas(truth)),
    ] {
        let outcome = run_gof_pipeline(&model, &intensity, &data, &config)?;
        let env = &outcome.envelope;
        println!(
            "\n{label}: p in [{:.3}, {:.3}], k_level {}, rejects at {}%: {}",
            env.p_lo,
            env.p_hi,
            env.k_level,
            100.0 * env.level,
            env.rejects()
        );
    }
    Ok(())
}
