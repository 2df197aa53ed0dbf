//! Sample both income regimes and compare empirical and theoretical inequality.
//!
//! cargo run --example income_regimes -- [n] [seed]

use netconsume::income::{sample_incomes, IncomeRegime};
use netconsume::seed::RunKey;
use netconsume::stats;

fn main() -> netconsume::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(1000, |a| a.parse().expect("n"));
    let seed: u64 = args.next().map_or(0, |a| a.parse().expect("seed"));

    let mut regimes = vec![("exponential".to_string(), IncomeRegime::exponential(1.0)?)];
    for sigma in [0.25, 0.5, 1.0] {
        regimes.push((
            format!("lognormal sigma={sigma}"),
            IncomeRegime::lognormal_unit_mean(sigma)?,
        ));
    }

    println!(
        "{:<22} {:>8} {:>8} {:>8} {:>10}",
        "regime", "mean", "cov", "gini", "gini(th)"
    );
    for (name, regime) in &regimes {
        let v = sample_incomes(regime, n, &mut RunKey::new(seed, 0).income_rng())?;
        println!(
            "{name:<22} {:>8.4} {:>8.4} {:>8.4} {:>10.4}",
            v.total() / n as f64,
            stats::coefficient_of_variation(v.incomes())?,
            stats::gini(v.incomes())?,
            regime.theoretical_gini()
        );
    }
    Ok(())
}
