//! Solve the consumption fixed point on small hand-built graphs and on a
//! generated one, and compare with the explicit chain expansion.
//!
//! cargo run --example consumption_fixed_point

use netconsume::consumption::oracle::recursive_expansion_oracle;
use netconsume::consumption::{solve_fixed_point, ConsumptionParams, SolverSettings, UpdateOrder};
use netconsume::experiment::{Population, SimConfig};
use netconsume::income::IncomeVector;
use netconsume::network::PerceptionGraph;
use netconsume::seed::RunKey;

fn main() -> netconsume::Result<()> {
    let params = ConsumptionParams::new(0.5, 0.5)?;
    let settings = SolverSettings::default();

    // 0 watches 1, 1 watches 2, 2 watches 0.
    let cycle = PerceptionGraph::from_out_links(vec![vec![1], vec![2], vec![0]], 0.0)?;
    let incomes = IncomeVector::from_incomes(vec![1.0, 2.0, 4.0])?;
    let s = solve_fixed_point(&cycle, &incomes, &params, &settings)?;
    println!(
        "cycle: C = {:?} after {} iterations",
        s.consumption, s.iterations
    );
    println!("       APC = {:?}", s.apc);

    let oracle = recursive_expansion_oracle(&cycle, &incomes, &params, 32)?;
    for i in 0..3 {
        println!(
            "       agent {i}: chain length {}, copies from {:?}",
            oracle.chain_length[i], oracle.copies_from[i]
        );
    }

    let config = SimConfig::default().with_params(0.4, 0.8);
    let population = Population::build(&config, RunKey::new(5, 0))?;
    for order in [UpdateOrder::Jacobi, UpdateOrder::GaussSeidel] {
        let mut cfg = config.clone();
        cfg.solver.order = order;
        let s = population.solve(&cfg)?;
        println!(
            "n=1000 {order:?}: {} iterations, total consumption {:.10}",
            s.iterations,
            s.total()
        );
    }
    let expanded =
        recursive_expansion_oracle(&population.graph, &population.incomes, &config.params, 1000)?;
    let solved = population.solve(&config)?;
    let worst = expanded
        .consumption
        .iter()
        .zip(&solved.consumption)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let longest = expanded.chain_length.iter().max().unwrap();
    println!("chain expansion: longest chain {longest}, max |diff| {worst:.2e}");
    Ok(())
}
