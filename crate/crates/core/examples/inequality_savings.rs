//! Aggregate saving rate as income inequality rises, for several homophily levels.
//!
//! cargo run --release --example inequality_savings -- [runs]

use netconsume::experiment::{sweep_inequality, SimConfig};

fn main() -> netconsume::Result<()> {
    let runs: usize = std::env::args()
        .nth(1)
        .map_or(10, |a| a.parse().expect("runs"));
    let sigmas = [0.1, 0.3, 0.5, 0.7, 0.9, 1.1];
    let rhos = [0.5, 1.0, 4.0];
    let points = sweep_inequality(
        &SimConfig::default().with_params(0.5, 0.5),
        &sigmas,
        &rhos,
        runs,
    )?;
    println!(
        "{:>5} {:>6} {:>8} {:>12}",
        "rho", "sigma", "gini", "saving rate"
    );
    for p in &points {
        println!(
            "{:>5} {:>6} {:>8.4} {:>12.4}",
            p.rho, p.sigma, p.gini_mean, p.saving_rate_mean
        );
    }
    Ok(())
}
