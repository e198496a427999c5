//! Estimates the four summary functions for a clustered pattern and prints
//! them next to their Poisson references, where clustering is visible as
//! K above Poisson and J below one.

use lgcp_sphere::envelope::informative_grid;
use lgcp_sphere::geometry::{cap_area, Window};
use lgcp_sphere::process::{simulate_thomas, IntensityModel, ThomasParams};
use lgcp_sphere::rng::root_rng;
use lgcp_sphere::summaries::{estimate_fgj, estimate_k_inhom, DistanceGrid};

fn main() -> lgcp_sphere::Result<()> {
    let mut rng = root_rng(31);
    let intensity = IntensityModel::constant(120.0)?;
    let pattern = simulate_thomas(
        &ThomasParams::new(6.0, 120.0)?,
        &intensity,
        &Window::full_sphere(),
        &mut rng,
    )?;
    println!("{} points from a Thomas process\n", pattern.len());

    let k_grid = DistanceGrid::uniform(0.02, 0.4, 8)?;
    let k_hat = estimate_k_inhom(&pattern, |u| intensity.evaluate(u), &k_grid)?;
    println!("{:>6} {:>12} {:>12}", "r", "K_hat", "K_poisson");
    for (r, k) in k_grid.values().iter().zip(k_hat.values()) {
        println!("{r:>6.3} {k:>12.5} {:>12.5}", cap_area(*r));
    }

    // F, G, J on a grid that stops before the empty-space function
    // saturates at one.
    let grid = informative_grid(&pattern, 8)?;
    let (f, g, j) = estimate_fgj(&pattern, &grid, 1024)?;
    println!("\n{:>6} {:>8} {:>8} {:>8}", "r", "F", "G", "J");
    for i in 0..grid.len() {
        println!(
            "{:>6.3} {:>8.4} {:>8.4} {:>8.4}",
            grid.values()[i],
            f.values()[i],
            g.values()[i],
            j.values()[i]
        );
    }
    println!("\nJ below one indicates clustering");
    Ok(())
}
