//! Fit a log-normal to simulated expenditures and run the KS test.
//!
//! cargo run --example lognormality_check -- [w] [c] [rho]

use netconsume::experiment::{run_single, SimConfig};
use netconsume::stats::ks_lognormality;

fn main() -> netconsume::Result<()> {
    let args: Vec<f64> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("number"))
        .collect();
    let (w, c, rho) = match args[..] {
        [w, c, rho] => (w, c, rho),
        _ => (0.5, 0.3, 0.5),
    };
    let config = SimConfig {
        rho,
        ..SimConfig::default().with_params(w, c)
    };
    let result = run_single(&config)?;
    let expenditure: Vec<f64> = result.agents.iter().map(|a| a.consumption).collect();
    let income: Vec<f64> = result.agents.iter().map(|a| a.income).collect();

    for (name, values) in [("income", &income), ("expenditure", &expenditure)] {
        let ks = ks_lognormality(values, config.alpha)?;
        println!(
            "{name:<12} mu={:.4} sigma={:.4} D={:.4} crit={:.4} {}",
            ks.fit.mu,
            ks.fit.sigma,
            ks.ks_statistic,
            ks.critical_value,
            if ks.reject {
                "rejected"
            } else {
                "not rejected"
            }
        );
    }
    Ok(())
}
