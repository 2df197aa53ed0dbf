//! Seeded runs, ensembles and parameter sweeps.
//!
//! A run has two phases. The population phase samples incomes and draws the
//! perception network; it depends only on the income regime, `n`, `k`, `ρ`
//! and the run's random stream. The consumption phase solves for expenditure
//! and computes every statistic. Sweeps over `(w, c)` therefore build each
//! run's population once and reuse it for every cell.

mod facts;
mod sweep;

pub use facts::{stylised_facts_report, FactOutcome, FactStatus, FactsReport, SCALE_FACTORS};
pub use sweep::{
    default_sigma_grid, default_wc_grid, sweep_inequality, sweep_wc_grid, InequalityPoint, WcCell,
    WcGrid,
};

use rayon::prelude::*;
use serde::Serialize;

use crate::consumption::{
    solve_fixed_point, ConsumptionParams, ConsumptionSolution, SolverSettings,
};
use crate::error::{Error, Result};
use crate::income::{sample_incomes, IncomeRegime, IncomeVector};
use crate::network::{generate_network, segregation_diagnostics, PerceptionGraph, DEFAULT_LINKS};
use crate::seed::RunKey;
use crate::stats::{
    self, aggregate_saving_rate, decile_apcs, ks_lognormality, DecileApcConvention,
    DistributionSummary, LogNormalityResult,
};

/// Full parameterisation of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub n: usize,
    pub k: usize,
    pub regime: IncomeRegime,
    pub params: ConsumptionParams,
    pub rho: f64,
    pub seed: u64,
    pub solver: SolverSettings,
    pub decile_convention: DecileApcConvention,
    /// Significance level of the log-normality test.
    pub alpha: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            n: 1000,
            k: DEFAULT_LINKS,
            regime: IncomeRegime::default(),
            params: ConsumptionParams { w: 0.5, c: 0.3 },
            rho: 1.0,
            seed: 0,
            solver: SolverSettings::default(),
            decile_convention: DecileApcConvention::default(),
            alpha: 0.05,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::invalid("k", "must be at least 1"));
        }
        if self.n <= self.k {
            return Err(Error::invalid(
                "n",
                format!("must exceed k = {}, got {}", self.k, self.n),
            ));
        }
        if !(self.rho >= 0.0 && self.rho.is_finite()) {
            return Err(Error::invalid(
                "rho",
                format!("must be finite and >= 0, got {}", self.rho),
            ));
        }
        self.regime.validate()?;
        self.params.validate()?;
        self.solver.validate()?;
        stats::ks_critical_value(self.n, self.alpha).map(|_| ())
    }

    pub fn with_params(&self, w: f64, c: f64) -> Self {
        SimConfig {
            params: ConsumptionParams { w, c },
            ..self.clone()
        }
    }
}

/// Phase-one output of a run: incomes and the perception network.
#[derive(Debug, Clone)]
pub struct Population {
    pub key: RunKey,
    pub incomes: IncomeVector,
    pub graph: PerceptionGraph,
    income_summary: DistributionSummary,
    mean_perception_gap: f64,
    perception_gap: Vec<f64>,
}

impl Population {
    pub fn build(config: &SimConfig, key: RunKey) -> Result<Self> {
        config.validate()?;
        let incomes = sample_incomes(&config.regime, config.n, &mut key.income_rng())?;
        let graph = generate_network(&incomes, config.k, config.rho, key)?;
        Self::from_parts(key, incomes, graph)
    }

    pub fn from_parts(key: RunKey, incomes: IncomeVector, graph: PerceptionGraph) -> Result<Self> {
        let diagnostics = segregation_diagnostics(&graph, &incomes)?;
        let income_summary = DistributionSummary::new(incomes.incomes(), &incomes)?;
        Ok(Population {
            key,
            income_summary,
            mean_perception_gap: diagnostics.mean_gap(),
            perception_gap: diagnostics.perception_gap,
            incomes,
            graph,
        })
    }

    pub fn income_summary(&self) -> &DistributionSummary {
        &self.income_summary
    }

    pub fn solve(&self, config: &SimConfig) -> Result<ConsumptionSolution> {
        solve_fixed_point(&self.graph, &self.incomes, &config.params, &config.solver)?
            .require_converged()
    }

    /// Runs the consumption phase and all statistics on this population.
    pub fn evaluate(&self, config: &SimConfig) -> Result<RunResult> {
        let solution = self.solve(config)?;
        let expenditure = &solution.consumption;
        let expenditure_summary = DistributionSummary::new(expenditure, &self.incomes)?;
        let lognormality = if expenditure.len() >= stats::KS_MIN_SAMPLE {
            match ks_lognormality(expenditure, config.alpha) {
                Ok(r) => Some(r),
                Err(Error::Degenerate(_)) => None,
                Err(e) => return Err(e),
            }
        } else {
            None
        };
        let saving_rate = aggregate_saving_rate(&self.incomes, &solution)?;
        let decile_apc = decile_apcs(&self.incomes, &solution, config.decile_convention)?;
        let agents = self
            .incomes
            .incomes()
            .iter()
            .zip(self.incomes.deciles())
            .zip(solution.consumption.iter().zip(&solution.apc))
            .zip(&self.perception_gap)
            .map(
                |(((&income, &decile), (&consumption, &apc)), &perception_gap)| AgentRecord {
                    income,
                    decile,
                    consumption,
                    apc,
                    perception_gap,
                },
            )
            .collect();
        Ok(RunResult {
            key: self.key,
            agents,
            cov_ratio: expenditure_summary.coefficient_of_variation
                / self.income_summary.coefficient_of_variation,
            income_summary: self.income_summary.clone(),
            expenditure_summary,
            lognormality,
            saving_rate,
            aggregate_apc: 1.0 - saving_rate,
            decile_apc,
            mean_perception_gap: self.mean_perception_gap,
            iterations: solution.iterations,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AgentRecord {
    pub income: f64,
    pub decile: u8,
    pub consumption: f64,
    pub apc: f64,
    pub perception_gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub key: RunKey,
    pub agents: Vec<AgentRecord>,
    pub income_summary: DistributionSummary,
    pub expenditure_summary: DistributionSummary,
    /// `None` when the sample is too small or has no spread.
    pub lognormality: Option<LogNormalityResult>,
    pub saving_rate: f64,
    pub aggregate_apc: f64,
    pub decile_apc: [f64; 10],
    /// `CoV(C) / CoV(Y)`.
    pub cov_ratio: f64,
    pub mean_perception_gap: f64,
    pub iterations: usize,
}

impl RunResult {
    pub fn ks_nonreject(&self) -> bool {
        self.lognormality.as_ref().is_some_and(|r| !r.reject)
    }
}

/// Runs the two phases for `config` with run index 0.
pub fn run_single(config: &SimConfig) -> Result<RunResult> {
    run_indexed(config, 0)
}

pub fn run_indexed(config: &SimConfig, run: u64) -> Result<RunResult> {
    Population::build(config, RunKey::new(config.seed, run))?.evaluate(config)
}

/// Builds the populations of runs `0..runs`.
pub fn build_populations(config: &SimConfig, runs: usize) -> Result<Vec<Population>> {
    (0..runs as u64)
        .into_par_iter()
        .map(|run| Population::build(config, RunKey::new(config.seed, run)))
        .collect()
}

/// Mean, spread and range of one statistic across runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StatSummary {
    pub mean: f64,
    /// Population standard deviation across runs.
    pub sd: f64,
    pub min: f64,
    pub max: f64,
}

impl StatSummary {
    pub fn from_values(values: &[f64]) -> Self {
        StatSummary {
            mean: stats::mean(values),
            sd: stats::std_dev(values),
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSummary {
    pub config: SimConfig,
    pub runs: usize,
    pub income_mean: StatSummary,
    pub income_gini: StatSummary,
    pub income_cov: StatSummary,
    pub expenditure_mean: StatSummary,
    pub expenditure_gini: StatSummary,
    pub expenditure_cov: StatSummary,
    pub cov_ratio: StatSummary,
    pub saving_rate: StatSummary,
    pub aggregate_apc: StatSummary,
    pub ks_statistic: StatSummary,
    pub mean_perception_gap: StatSummary,
    pub iterations: StatSummary,
    pub decile_apc: [StatSummary; 10],
    /// Share of runs whose expenditure passes the log-normality test.
    pub ks_nonreject_fraction: f64,
}

impl EnsembleSummary {
    /// Aggregates run results in the order given.
    pub fn from_runs(config: &SimConfig, results: &[RunResult]) -> Result<Self> {
        if results.is_empty() {
            return Err(Error::invalid("runs", "must be at least 1"));
        }
        let collect = |f: &dyn Fn(&RunResult) -> f64| {
            let values: Vec<f64> = results.iter().map(f).collect();
            StatSummary::from_values(&values)
        };
        let decile_apc = std::array::from_fn(|d| collect(&|r| r.decile_apc[d]));
        let nonreject = results.iter().filter(|r| r.ks_nonreject()).count();
        Ok(EnsembleSummary {
            config: config.clone(),
            runs: results.len(),
            income_mean: collect(&|r| r.income_summary.mean),
            income_gini: collect(&|r| r.income_summary.gini),
            income_cov: collect(&|r| r.income_summary.coefficient_of_variation),
            expenditure_mean: collect(&|r| r.expenditure_summary.mean),
            expenditure_gini: collect(&|r| r.expenditure_summary.gini),
            expenditure_cov: collect(&|r| r.expenditure_summary.coefficient_of_variation),
            cov_ratio: collect(&|r| r.cov_ratio),
            saving_rate: collect(&|r| r.saving_rate),
            aggregate_apc: collect(&|r| r.aggregate_apc),
            ks_statistic: collect(&|r| {
                r.lognormality.as_ref().map_or(f64::NAN, |l| l.ks_statistic)
            }),
            mean_perception_gap: collect(&|r| r.mean_perception_gap),
            iterations: collect(&|r| r.iterations as f64),
            decile_apc,
            ks_nonreject_fraction: nonreject as f64 / results.len() as f64,
        })
    }

    /// `(name, summary)` pairs in a fixed order, for tabular output.
    pub fn statistics(&self) -> Vec<(String, StatSummary)> {
        let mut out: Vec<(String, StatSummary)> = vec![
            ("income_mean".into(), self.income_mean),
            ("income_gini".into(), self.income_gini),
            ("income_cov".into(), self.income_cov),
            ("expenditure_mean".into(), self.expenditure_mean),
            ("expenditure_gini".into(), self.expenditure_gini),
            ("expenditure_cov".into(), self.expenditure_cov),
            ("cov_ratio".into(), self.cov_ratio),
            ("saving_rate".into(), self.saving_rate),
            ("aggregate_apc".into(), self.aggregate_apc),
            ("ks_statistic".into(), self.ks_statistic),
            ("mean_perception_gap".into(), self.mean_perception_gap),
            ("iterations".into(), self.iterations),
        ];
        for (d, s) in self.decile_apc.iter().enumerate() {
            out.push((format!("decile_apc_{}", d + 1), *s));
        }
        out
    }

    pub fn mean_decile_apc(&self) -> [f64; 10] {
        std::array::from_fn(|d| self.decile_apc[d].mean)
    }
}

/// Evaluates `config` on each population and aggregates in population order.
pub fn evaluate_populations(
    config: &SimConfig,
    populations: &[Population],
) -> Result<EnsembleSummary> {
    let results: Vec<RunResult> = populations
        .par_iter()
        .map(|p| p.evaluate(config))
        .collect::<Result<_>>()?;
    EnsembleSummary::from_runs(config, &results)
}

/// Runs `runs` independent replications keyed `(config.seed, 0..runs)`.
pub fn run_ensemble(config: &SimConfig, runs: usize) -> Result<EnsembleSummary> {
    if runs == 0 {
        return Err(Error::invalid("runs", "must be at least 1"));
    }
    let results: Vec<RunResult> = (0..runs as u64)
        .into_par_iter()
        .map(|run| run_indexed(config, run))
        .collect::<Result<_>>()?;
    EnsembleSummary::from_runs(config, &results)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(w: f64, c: f64, rho: f64) -> SimConfig {
        SimConfig {
            n: 300,
            rho,
            ..SimConfig::default().with_params(w, c)
        }
    }

    #[test]
    fn isolation_benchmark() {
        let r = run_single(&small(0.7, 0.0, 1.0)).unwrap();
        assert!((r.saving_rate - 0.3).abs() < 1e-15);
        assert!(r.decile_apc.iter().all(|&a| (a - 0.7).abs() < 1e-15));
    }

    #[test]
    fn runs_are_reproducible() {
        let cfg = small(0.5, 0.3, 1.0);
        assert_eq!(run_single(&cfg).unwrap(), run_single(&cfg).unwrap());
    }

    #[test]
    fn single_run_ensemble_matches_run() {
        let cfg = small(0.5, 0.4, 2.0);
        let r = run_single(&cfg).unwrap();
        let e = run_ensemble(&cfg, 1).unwrap();
        assert_eq!(e.runs, 1);
        assert_eq!(e.saving_rate.mean, r.saving_rate);
        assert_eq!(e.cov_ratio.mean, r.cov_ratio);
        assert_eq!(e.cov_ratio.sd, 0.0);
        assert_eq!(e.mean_decile_apc(), r.decile_apc);
        assert_eq!(
            e.ks_nonreject_fraction,
            if r.ks_nonreject() { 1.0 } else { 0.0 }
        );
    }

    #[test]
    fn ensemble_order_is_fixed() {
        let cfg = small(0.5, 0.4, 2.0);
        let a = run_ensemble(&cfg, 6).unwrap();
        let pops = build_populations(&cfg, 6).unwrap();
        let b = evaluate_populations(&cfg, &pops).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        assert!(SimConfig {
            n: 5,
            ..SimConfig::default()
        }
        .validate()
        .is_err());
        assert!(SimConfig {
            rho: -1.0,
            ..SimConfig::default()
        }
        .validate()
        .is_err());
        assert!(SimConfig::default()
            .with_params(1.5, 0.1)
            .validate()
            .is_err());
        assert!(SimConfig {
            alpha: 0.3,
            ..SimConfig::default()
        }
        .validate()
        .is_err());
        assert!(run_ensemble(&SimConfig::default(), 0).is_err());
    }

    #[test]
    fn cov_ratio_below_one_and_closer_to_one_with_homophily() {
        let low = run_ensemble(&small(0.5, 0.5, 0.5), 10).unwrap();
        let high = run_ensemble(&small(0.5, 0.5, 4.0), 10).unwrap();
        assert!(low.cov_ratio.max < 1.0);
        assert!(high.cov_ratio.max < 1.0);
        assert!(high.cov_ratio.mean > low.cov_ratio.mean);
    }

    #[test]
    fn post_sampling_rescaling_keeps_ratios() {
        let cfg = small(0.4, 0.6, 1.0);
        let pop = Population::build(&cfg, RunKey::new(3, 0)).unwrap();
        let base = pop.evaluate(&cfg).unwrap();
        for omega in [0.5, 2.0, 10.0, 123.0] {
            let scaled = Population::from_parts(
                pop.key,
                pop.incomes.scaled(omega).unwrap(),
                pop.graph.clone(),
            )
            .unwrap();
            let r = scaled.evaluate(&cfg).unwrap();
            assert!((r.saving_rate - base.saving_rate).abs() < 1e-12);
            for (a, b) in r.decile_apc.iter().zip(&base.decile_apc) {
                assert!((a - b).abs() < 1e-12);
            }
            for (a, b) in r.agents.iter().zip(&base.agents) {
                assert!((a.apc - b.apc).abs() < 1e-12);
            }
        }
    }
}
