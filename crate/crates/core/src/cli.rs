//! Batch command-line front end.
//!
//! Exit codes: 0 success, 1 bad arguments or config, 2 runtime failure
//! (solver non-convergence, I/O), 3 `validate` ran but a stylised fact failed.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{locate_error, parse_config_file, ConfigFile};
use crate::error::{Error, Result};
use crate::experiment::{
    default_sigma_grid, default_wc_grid, run_ensemble, run_single, stylised_facts_report,
    sweep_inequality, sweep_wc_grid, Population, SimConfig, WcGrid,
};
use crate::output::{self, charts, write_atomic, DecileSchedule, Table};
use crate::seed::RunKey;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;
pub const EXIT_FACT_FAILED: i32 = 3;

/// Environment variable holding the default output directory.
pub const OUT_DIR_ENV: &str = "NETCONSUME_OUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "netconsume",
    version,
    about = "Conspicuous consumption on homophilic perception networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    #[value(name = "csv+svg")]
    CsvSvg,
}

#[derive(Debug, Clone, Args)]
struct Common {
    /// JSON config file; missing keys take default values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, env = OUT_DIR_ENV, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    w: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    /// Number of replications (ignored by `run`).
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Figure {
    Fig1,
    Fig23,
    Fig45,
    Fig67,
    Fig8,
    All,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// One seeded run: per-agent records, summary, decile APCs and densities.
    Run {
        #[command(flatten)]
        common: Common,
        /// Also write the perception network as graph.csv.
        #[arg(long)]
        dump_graph: bool,
    },
    /// Replications of one config, aggregated.
    Ensemble {
        #[command(flatten)]
        common: Common,
    },
    /// Ensembles over a (w, c) grid: CoV ratios and log-normality shares.
    SweepWc {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        w_values: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        c_values: Vec<f64>,
        /// Homophily values; defaults to the config's rho.
        #[arg(long, value_delimiter = ',')]
        rho_values: Vec<f64>,
    },
    /// Saving rate against income Gini under log-normal incomes.
    SweepInequality {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        sigma_values: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        rho_values: Vec<f64>,
    },
    /// Check the four micro-level stylised facts.
    Validate {
        #[command(flatten)]
        common: Common,
    },
    /// Reproduce a figure dataset with its published parametrisation.
    Figure {
        #[arg(value_enum)]
        which: Figure,
        #[command(flatten)]
        common: Common,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config { .. } | Error::InvalidParameter { .. } | Error::TooFewAgents { .. } => {
            EXIT_CONFIG
        }
        _ => EXIT_RUNTIME,
    }
}

impl Common {
    /// Config file, then flag overrides, then validation.
    fn load(&self) -> Result<(ConfigFile, SimConfig)> {
        let text = match &self.config {
            Some(path) => Some(std::fs::read_to_string(path).map_err(|e| Error::Config {
                key: "--config".into(),
                line: None,
                message: format!("cannot read {}: {e}", path.display()),
            })?),
            None => None,
        };
        let mut file = match &text {
            Some(t) => parse_config_file(t)?,
            None => ConfigFile::default(),
        };
        let mut overridden: Vec<&'static str> = Vec::new();
        if let Some(v) = self.seed {
            file.seed = v;
            overridden.push("seed");
        }
        if let Some(v) = self.rho {
            file.rho = v;
            overridden.push("rho");
        }
        if let Some(v) = self.w {
            file.w = v;
            overridden.push("w");
        }
        if let Some(v) = self.c {
            file.c = v;
            overridden.push("c");
        }
        if let Some(v) = self.n {
            file.n = v;
            overridden.push("n");
        }
        let config = file.to_sim_config().map_err(|e| match e {
            Error::InvalidParameter { name, reason } if overridden.contains(&name) => {
                Error::Config {
                    key: format!("--{name}"),
                    line: None,
                    message: reason,
                }
            }
            other => locate_error(other, text.as_deref()),
        })?;
        Ok((ConfigFile::from(&config), config))
    }

    fn runs(&self, default: usize) -> Result<usize> {
        match self.runs {
            Some(0) => Err(Error::Config {
                key: "--runs".into(),
                line: None,
                message: "must be at least 1".into(),
            }),
            Some(r) => Ok(r),
            None => Ok(default),
        }
    }
}

struct Emitter {
    dir: PathBuf,
    svg: bool,
    comments: Vec<String>,
}

impl Emitter {
    fn new(common: &Common, command: &str, file: &ConfigFile) -> Self {
        Emitter {
            dir: common.out.clone(),
            svg: common.format == Format::CsvSvg,
            comments: vec![
                format!("command: {command}"),
                format!("config: {}", file.to_json()),
            ],
        }
    }

    fn note(&mut self, line: String) {
        self.comments.push(line);
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn csv(&self, name: &str, table: &Table) -> Result<()> {
        write_atomic(&self.path(name), table.render(&self.comments).as_bytes())
    }

    fn svg(&self, name: &str, render: impl FnOnce() -> String) -> Result<()> {
        if self.svg {
            write_atomic(&self.path(name), render().as_bytes())?;
        }
        Ok(())
    }
}

fn fmt_list(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(f64::to_string).collect();
    format!("[{}]", parts.join(","))
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Run { common, dump_graph } => {
            let (file, config) = common.load()?;
            let out = Emitter::new(&common, "run", &file);
            cmd_run(&out, &config, dump_graph)?;
            Ok(EXIT_OK)
        }
        Command::Ensemble { common } => {
            let (file, config) = common.load()?;
            let runs = common.runs(100)?;
            let mut out = Emitter::new(&common, "ensemble", &file);
            out.note(format!("runs: {runs}"));
            let summary = run_ensemble(&config, runs)?;
            out.csv("ensemble_summary.csv", &output::ensemble_table(&summary))?;
            let table = output::decile_apc_table(&[DecileSchedule {
                w: config.params.w,
                c: config.params.c,
                rho: config.rho,
                apc: summary.mean_decile_apc(),
            }]);
            out.csv("fig1_decile_apc.csv", &table)?;
            out.svg("fig1_decile_apc.svg", || charts::decile_apc(&table))?;
            Ok(EXIT_OK)
        }
        Command::SweepWc {
            common,
            w_values,
            c_values,
            rho_values,
        } => {
            let (file, config) = common.load()?;
            let runs = common.runs(100)?;
            let w_values = if w_values.is_empty() {
                default_wc_grid()
            } else {
                w_values
            };
            let c_values = if c_values.is_empty() {
                default_wc_grid()
            } else {
                c_values
            };
            let rho_values = if rho_values.is_empty() {
                vec![config.rho]
            } else {
                rho_values
            };
            let mut out = Emitter::new(&common, "sweep-wc", &file);
            out.note(format!(
                "sweep: runs={runs} w_values={} c_values={} rho_values={}",
                fmt_list(&w_values),
                fmt_list(&c_values),
                fmt_list(&rho_values)
            ));
            let grids = wc_grids(&config, &w_values, &c_values, &rho_values, runs)?;
            emit_wc(&out, &grids, true, true)?;
            Ok(EXIT_OK)
        }
        Command::SweepInequality {
            common,
            sigma_values,
            rho_values,
        } => {
            let (file, config) = common.load()?;
            let runs = common.runs(100)?;
            let sigma_values = if sigma_values.is_empty() {
                default_sigma_grid()
            } else {
                sigma_values
            };
            let rho_values = if rho_values.is_empty() {
                vec![0.5, 1.0, 1.5, 4.0]
            } else {
                rho_values
            };
            let mut out = Emitter::new(&common, "sweep-inequality", &file);
            out.note(format!(
                "sweep: runs={runs} sigma_values={} rho_values={}",
                fmt_list(&sigma_values),
                fmt_list(&rho_values)
            ));
            emit_inequality(&out, &config, &sigma_values, &rho_values, runs)?;
            Ok(EXIT_OK)
        }
        Command::Validate { common } => {
            let (file, config) = common.load()?;
            let runs = common.runs(100)?;
            let mut out = Emitter::new(&common, "validate", &file);
            out.note(format!("runs: {runs}"));
            let report = stylised_facts_report(&config, runs)?;
            out.csv("stylised_facts.csv", &output::facts_table(&report))?;
            for f in &report.facts {
                println!(
                    "fact ({}) {:<58} {:<14} measured {}",
                    f.id,
                    f.name,
                    f.status.as_str(),
                    f.measured
                );
            }
            Ok(if report.all_applicable_pass() {
                EXIT_OK
            } else {
                EXIT_FACT_FAILED
            })
        }
        Command::Figure { which, common } => {
            let (file, config) = common.load()?;
            cmd_figure(&common, &file, &config, which)?;
            Ok(EXIT_OK)
        }
    }
}

fn cmd_run(out: &Emitter, config: &SimConfig, dump_graph: bool) -> Result<()> {
    let population = Population::build(config, RunKey::new(config.seed, 0))?;
    let result = population.evaluate(config)?;
    out.csv("agents.csv", &output::agents_table(&result))?;
    out.csv("run_summary.csv", &output::run_summary_table(&result))?;
    let fig1 = output::decile_apc_table(&[DecileSchedule {
        w: config.params.w,
        c: config.params.c,
        rho: config.rho,
        apc: result.decile_apc,
    }]);
    out.csv("fig1_decile_apc.csv", &fig1)?;
    out.svg("fig1_decile_apc.svg", || charts::decile_apc(&fig1))?;
    let fig45 = output::density_table(&result);
    out.csv("fig45_density.csv", &fig45)?;
    out.svg("fig45_density.svg", || charts::density(&fig45))?;
    if dump_graph {
        out.csv("graph.csv", &output::graph_table(&population.graph))?;
    }
    Ok(())
}

fn wc_grids(
    config: &SimConfig,
    w: &[f64],
    c: &[f64],
    rhos: &[f64],
    runs: usize,
) -> Result<Vec<WcGrid>> {
    rhos.iter()
        .map(|&rho| {
            sweep_wc_grid(
                &SimConfig {
                    rho,
                    ..config.clone()
                },
                w,
                c,
                runs,
            )
        })
        .collect()
}

fn emit_wc(out: &Emitter, grids: &[WcGrid], cov: bool, lognormal: bool) -> Result<()> {
    if cov {
        let table = output::cov_ratio_table(grids);
        out.csv("fig23_cov_ratio.csv", &table)?;
        for g in grids {
            let rho = g.rho.to_string();
            out.svg(&format!("fig23_cov_ratio_rho{rho}.svg"), || {
                charts::wc_heatmap(&table, "cov_ratio_mean", &rho, "CoV(C) / CoV(Y)")
            })?;
        }
    }
    if lognormal {
        let table = output::lognormality_table(grids);
        out.csv("fig67_lognormality.csv", &table)?;
        for g in grids {
            let rho = g.rho.to_string();
            out.svg(&format!("fig67_lognormality_rho{rho}.svg"), || {
                charts::wc_heatmap(
                    &table,
                    "nonreject_fraction",
                    &rho,
                    "Share not rejecting log-normality",
                )
            })?;
        }
    }
    Ok(())
}

fn emit_inequality(
    out: &Emitter,
    config: &SimConfig,
    sigmas: &[f64],
    rhos: &[f64],
    runs: usize,
) -> Result<()> {
    let points = sweep_inequality(config, sigmas, rhos, runs)?;
    let table = output::savings_gini_table(&points);
    out.csv("fig8_savings_gini.csv", &table)?;
    out.svg("fig8_savings_gini.svg", || charts::savings_gini(&table))
}

/// Parametrisations of the decile-APC figure, all at `ρ = 4`.
pub const FIG1_PARAMS: [(f64, f64); 3] = [(0.5, 0.3), (0.5, 0.5), (0.3, 0.5)];
pub const FIG1_RHO: f64 = 4.0;
pub const FIG23_RHOS: [f64; 2] = [0.5, 4.0];
pub const FIG45_PARAMS: (f64, f64, f64) = (0.5, 0.3, 1.0);
pub const FIG8_RHOS: [f64; 4] = [0.5, 1.0, 1.5, 4.0];
pub const FIG8_PARAMS: (f64, f64) = (0.5, 0.5);

fn cmd_figure(common: &Common, file: &ConfigFile, config: &SimConfig, which: Figure) -> Result<()> {
    let wants = |f: Figure| which == f || which == Figure::All;
    let mut out = Emitter::new(common, "figure", file);
    out.note(format!("figure: {which:?}").to_lowercase());

    if wants(Figure::Fig1) {
        let runs = common.runs(1)?;
        let schedules = FIG1_PARAMS
            .iter()
            .map(|&(w, c)| {
                let cfg = SimConfig {
                    rho: FIG1_RHO,
                    ..config.with_params(w, c)
                };
                run_ensemble(&cfg, runs).map(|s| DecileSchedule {
                    w,
                    c,
                    rho: FIG1_RHO,
                    apc: s.mean_decile_apc(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let table = output::decile_apc_table(&schedules);
        out.csv("fig1_decile_apc.csv", &table)?;
        out.svg("fig1_decile_apc.svg", || charts::decile_apc(&table))?;
    }
    if wants(Figure::Fig23) || wants(Figure::Fig67) {
        let runs = common.runs(100)?;
        let grid = default_wc_grid();
        let grids = wc_grids(config, &grid, &grid, &FIG23_RHOS, runs)?;
        emit_wc(&out, &grids, wants(Figure::Fig23), wants(Figure::Fig67))?;
    }
    if wants(Figure::Fig45) {
        let (w, c, rho) = FIG45_PARAMS;
        let r = run_single(&SimConfig {
            rho,
            ..config.with_params(w, c)
        })?;
        let table = output::density_table(&r);
        out.csv("fig45_density.csv", &table)?;
        out.svg("fig45_density.svg", || charts::density(&table))?;
    }
    if wants(Figure::Fig8) {
        let runs = common.runs(100)?;
        let (w, c) = FIG8_PARAMS;
        emit_inequality(
            &out,
            &config.with_params(w, c),
            &default_sigma_grid(),
            &FIG8_RHOS,
            runs,
        )?;
    }
    Ok(())
}

/// Default output directory: `$NETCONSUME_OUT_DIR` or `out`.
pub fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV).map_or_else(|| Path::new("out").to_path_buf(), PathBuf::from)
}
