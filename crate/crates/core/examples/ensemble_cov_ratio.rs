//! Expenditure versus income dispersion over a coarse (w, c) grid at low and
//! high homophily.
//!
//! cargo run --release --example ensemble_cov_ratio -- [runs]

use netconsume::experiment::{sweep_wc_grid, SimConfig};

fn main() -> netconsume::Result<()> {
    let runs: usize = std::env::args()
        .nth(1)
        .map_or(20, |a| a.parse().expect("runs"));
    let values = [0.1, 0.3, 0.5, 0.7, 0.9];
    for rho in [0.5, 4.0] {
        let grid = sweep_wc_grid(
            &SimConfig {
                rho,
                ..SimConfig::default()
            },
            &values,
            &values,
            runs,
        )?;
        println!("rho = {rho}: mean CoV(C)/CoV(Y), rows w, columns c");
        print!("{:>6}", "");
        for c in values {
            print!("{c:>7}");
        }
        println!();
        for w in values {
            print!("{w:>6}");
            for c in values {
                print!("{:>7.3}", grid.cell(w, c).unwrap().summary.cov_ratio.mean);
            }
            println!();
        }
    }
    Ok(())
}
