//! Check the four micro-level stylised facts for one parametrisation.
//!
//! cargo run --release --example stylised_facts -- [w] [c] [rho] [runs]

use netconsume::experiment::{stylised_facts_report, SimConfig};

fn main() -> netconsume::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let num = |i: usize, default: f64| args.get(i).map_or(default, |a| a.parse().expect("number"));
    let config = SimConfig {
        rho: num(2, 1.0),
        ..SimConfig::default().with_params(num(0, 0.5), num(1, 0.3))
    };
    let report = stylised_facts_report(&config, num(3, 20.0) as usize)?;
    for fact in &report.facts {
        println!(
            "({:>3}) {:<15} {:<55} {}",
            fact.id,
            fact.status.as_str(),
            fact.name,
            fact.criterion
        );
        println!("      measured {}", fact.measured);
    }
    println!(
        "all applicable facts hold: {}",
        report.all_applicable_pass()
    );
    Ok(())
}
