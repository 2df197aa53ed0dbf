//! Write the decile-APC and density datasets with their SVG charts.
//!
//! cargo run --example figures_svg -- [out_dir]

use std::path::PathBuf;

use netconsume::experiment::{run_ensemble, run_single, SimConfig};
use netconsume::output::{charts, decile_apc_table, density_table, write_atomic, DecileSchedule};

fn main() -> netconsume::Result<()> {
    let out = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "out/figures".into()),
    );
    let base = SimConfig {
        rho: 4.0,
        ..SimConfig::default()
    };

    let mut schedules = Vec::new();
    for (w, c) in [(0.5, 0.3), (0.5, 0.5), (0.3, 0.5)] {
        let summary = run_ensemble(&base.with_params(w, c), 10)?;
        schedules.push(DecileSchedule {
            w,
            c,
            rho: base.rho,
            apc: summary.mean_decile_apc(),
        });
    }
    let table = decile_apc_table(&schedules);
    write_atomic(&out.join("decile_apc.csv"), table.render(&[]).as_bytes())?;
    write_atomic(
        &out.join("decile_apc.svg"),
        charts::decile_apc(&table).as_bytes(),
    )?;

    let single = run_single(&SimConfig { rho: 1.0, ..base })?;
    let table = density_table(&single);
    write_atomic(&out.join("density.csv"), table.render(&[]).as_bytes())?;
    write_atomic(&out.join("density.svg"), charts::density(&table).as_bytes())?;
    println!("wrote {}", out.display());
    Ok(())
}
