use serde::Serialize;

use crate::error::{Error, Result};
use crate::income::IncomeRegime;

use super::{build_populations, evaluate_populations, run_ensemble, EnsembleSummary, SimConfig};

/// `0.05, 0.10, …, 0.95`.
pub fn default_wc_grid() -> Vec<f64> {
    (1..=19).map(|i| f64::from(i) / 20.0).collect()
}

/// Log-normal dispersions spanning income Gini coefficients of roughly 0.03 to 0.56.
pub fn default_sigma_grid() -> Vec<f64> {
    let mut grid = vec![0.05];
    grid.extend((1..=11).map(|i| f64::from(i) / 10.0));
    grid
}

#[derive(Debug, Clone, PartialEq)]
pub struct WcCell {
    pub w: f64,
    pub c: f64,
    pub summary: EnsembleSummary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WcGrid {
    pub rho: f64,
    pub runs: usize,
    /// Row-major over `w` then `c`, in the order the values were given.
    pub cells: Vec<WcCell>,
}

impl WcGrid {
    pub fn cell(&self, w: f64, c: f64) -> Option<&WcCell> {
        self.cells.iter().find(|cell| cell.w == w && cell.c == c)
    }
}

/// Ensemble statistics for every `(w, c)` pair at the base config's `ρ`.
///
/// Run `r` of every cell uses the same population (incomes and network keyed
/// `(base.seed, r)`), exactly as separate ensembles would.
pub fn sweep_wc_grid(
    base: &SimConfig,
    w_values: &[f64],
    c_values: &[f64],
    runs: usize,
) -> Result<WcGrid> {
    if w_values.is_empty() || c_values.is_empty() {
        return Err(Error::invalid("grid", "w and c grids must not be empty"));
    }
    if runs == 0 {
        return Err(Error::invalid("runs", "must be at least 1"));
    }
    for &w in w_values {
        if !(w > 0.0 && w <= 1.0) {
            return Err(Error::invalid(
                "w",
                format!("grid value {w} outside (0, 1]"),
            ));
        }
    }
    for &c in c_values {
        if !(0.0..1.0).contains(&c) {
            return Err(Error::invalid(
                "c",
                format!("grid value {c} outside [0, 1)"),
            ));
        }
    }
    base.validate()?;
    let populations = build_populations(base, runs)?;
    let mut cells = Vec::with_capacity(w_values.len() * c_values.len());
    for &w in w_values {
        for &c in c_values {
            let config = base.with_params(w, c);
            let summary = evaluate_populations(&config, &populations)?;
            cells.push(WcCell { w, c, summary });
        }
    }
    Ok(WcGrid {
        rho: base.rho,
        runs,
        cells,
    })
}

/// One point of the saving-rate against inequality curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InequalityPoint {
    pub rho: f64,
    pub sigma: f64,
    /// Mean empirical Gini of the sampled incomes.
    pub gini_mean: f64,
    /// Gini of the log-normal distribution itself.
    pub gini_theoretical: f64,
    pub saving_rate_mean: f64,
    pub saving_rate_sd: f64,
}

/// Saving rate against income inequality, with log-normal incomes of unit
/// mean and dispersion taken from `sigma_values`. Points are ordered by `ρ`,
/// then `σ`.
pub fn sweep_inequality(
    base: &SimConfig,
    sigma_values: &[f64],
    rho_values: &[f64],
    runs: usize,
) -> Result<Vec<InequalityPoint>> {
    if sigma_values.is_empty() || rho_values.is_empty() {
        return Err(Error::invalid(
            "grid",
            "sigma and rho grids must not be empty",
        ));
    }
    let mut points = Vec::with_capacity(sigma_values.len() * rho_values.len());
    for &rho in rho_values {
        for &sigma in sigma_values {
            let regime = IncomeRegime::lognormal_unit_mean(sigma)?;
            let config = SimConfig {
                regime,
                rho,
                ..base.clone()
            };
            let summary = run_ensemble(&config, runs)?;
            points.push(InequalityPoint {
                rho,
                sigma,
                gini_mean: summary.income_gini.mean,
                gini_theoretical: regime.theoretical_gini(),
                saving_rate_mean: summary.saving_rate.mean,
                saving_rate_sd: summary.saving_rate.sd,
            });
        }
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> SimConfig {
        SimConfig {
            n: 200,
            rho: 0.5,
            ..SimConfig::default()
        }
    }

    #[test]
    fn default_grids() {
        let g = default_wc_grid();
        assert_eq!(g.len(), 19);
        assert_eq!(g[0], 0.05);
        assert_eq!(g[2], 0.15);
        assert_eq!(g[18], 0.95);
        assert_eq!(default_sigma_grid().first(), Some(&0.05));
    }

    #[test]
    fn rejects_out_of_range_grids() {
        assert!(sweep_wc_grid(&base(), &[0.0], &[0.5], 2).is_err());
        assert!(sweep_wc_grid(&base(), &[0.5], &[1.0], 2).is_err());
        assert!(sweep_wc_grid(&base(), &[], &[0.5], 2).is_err());
        assert!(sweep_inequality(&base(), &[], &[1.0], 2).is_err());
        assert!(sweep_inequality(&base(), &[-0.5], &[1.0], 2).is_err());
    }

    #[test]
    fn grid_cells_match_plain_ensembles() {
        let grid = sweep_wc_grid(&base(), &[0.3, 0.9], &[0.2, 0.6], 3).unwrap();
        assert_eq!(grid.cells.len(), 4);
        let direct = run_ensemble(&base().with_params(0.9, 0.2), 3).unwrap();
        assert_eq!(grid.cell(0.9, 0.2).unwrap().summary, direct);
    }

    #[test]
    fn cov_ratio_rises_toward_one_with_w() {
        let ws = [0.1, 0.3, 0.5, 0.7, 0.9, 1.0];
        let grid = sweep_wc_grid(&base(), &ws, &[0.5], 4).unwrap();
        let ratios: Vec<f64> = grid
            .cells
            .iter()
            .map(|c| c.summary.cov_ratio.mean)
            .collect();
        assert!(ratios.windows(2).all(|p| p[0] < p[1]), "{ratios:?}");
        assert!((ratios[5] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn near_equal_incomes_save_isolation_share() {
        let points = sweep_inequality(&base().with_params(0.5, 0.5), &[1e-6], &[0.5], 2).unwrap();
        assert!(points[0].gini_mean < 1e-5);
        assert!((points[0].saving_rate_mean - 0.5).abs() < 1e-5);
    }
}
