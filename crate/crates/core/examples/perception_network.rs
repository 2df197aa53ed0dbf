//! Build perception networks at several homophily levels and show how far
//! above themselves agents get to look.
//!
//! cargo run --example perception_network

use netconsume::income::{sample_incomes, IncomeRegime};
use netconsume::network::{generate_network, segregation_diagnostics, DEFAULT_LINKS};
use netconsume::seed::RunKey;

fn main() -> netconsume::Result<()> {
    let key = RunKey::new(1, 0);
    let incomes = sample_incomes(&IncomeRegime::default(), 1000, &mut key.income_rng())?;

    println!(
        "{:>5} {:>10} {:>12} {:>14}",
        "rho", "mean gap", "max in-deg", "links upward"
    );
    for rho in [0.0, 0.5, 1.0, 2.0, 4.0] {
        let graph = generate_network(&incomes, DEFAULT_LINKS, rho, key)?;
        let diag = segregation_diagnostics(&graph, &incomes)?;
        let y = incomes.incomes();
        let upward = graph
            .iter()
            .map(|(i, links)| links.iter().filter(|&&j| y[j] > y[i]).count())
            .sum::<usize>() as f64
            / (graph.len() * graph.links_per_agent()) as f64;
        let max_in = graph.in_degrees().into_iter().max().unwrap_or(0);
        println!(
            "{rho:>5} {:>10.4} {max_in:>12} {upward:>14.3}",
            diag.mean_gap()
        );
    }
    Ok(())
}
