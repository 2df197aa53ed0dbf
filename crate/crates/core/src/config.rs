//! JSON run configuration.
//!
//! The file is a single flat object whose keys mirror [`SimConfig`]. Every key
//! is optional and falls back to the default run:
//!
//! ```json
//! {
//!   "n": 1000, "k": 5,
//!   "income": "exponential", "lambda": 1.0,
//!   "w": 0.5, "c": 0.3, "rho": 1.0, "seed": 42
//! }
//! ```
//!
//! Log-normal incomes take `"income": "lognormal"` with `"sigma"`; `"mu"`
//! defaults to the unit-mean location `−σ²/2`.

use serde::{Deserialize, Serialize};

use crate::consumption::{ConsumptionParams, SolverSettings, UpdateOrder};
use crate::error::{Error, Result};
use crate::experiment::SimConfig;
use crate::income::{lognormal_location_for_unit_mean, IncomeRegime};
use crate::stats::DecileApcConvention;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IncomeKind {
    Exponential,
    Lognormal,
}

/// On-disk form of [`SimConfig`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConfigFile {
    pub n: usize,
    pub k: usize,
    pub income: IncomeKind,
    pub lambda: f64,
    pub sigma: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    pub w: f64,
    pub c: f64,
    pub rho: f64,
    pub seed: u64,
    pub tol: f64,
    pub max_iter: usize,
    pub update_order: UpdateOrder,
    pub clamp: bool,
    pub decile_apc: DecileApcConvention,
    pub alpha: f64,
}

impl Default for ConfigFile {
    fn default() -> Self {
        ConfigFile::from(&SimConfig::default())
    }
}

impl From<&SimConfig> for ConfigFile {
    fn from(config: &SimConfig) -> Self {
        let (income, lambda, sigma, mu) = match config.regime {
            IncomeRegime::Exponential { rate } => (IncomeKind::Exponential, rate, 1.0, None),
            IncomeRegime::LogNormal {
                location,
                dispersion,
            } => {
                let unit_mean = lognormal_location_for_unit_mean(dispersion).ok();
                let mu = if unit_mean == Some(location) {
                    None
                } else {
                    Some(location)
                };
                (IncomeKind::Lognormal, 1.0, dispersion, mu)
            }
        };
        ConfigFile {
            n: config.n,
            k: config.k,
            income,
            lambda,
            sigma,
            mu,
            w: config.params.w,
            c: config.params.c,
            rho: config.rho,
            seed: config.seed,
            tol: config.solver.tol,
            max_iter: config.solver.max_iter,
            update_order: config.solver.order,
            clamp: config.solver.clamp,
            decile_apc: config.decile_convention,
            alpha: config.alpha,
        }
    }
}

impl ConfigFile {
    /// Builds and validates the run configuration.
    pub fn to_sim_config(&self) -> Result<SimConfig> {
        let regime = match self.income {
            IncomeKind::Exponential => IncomeRegime::Exponential { rate: self.lambda },
            IncomeKind::Lognormal => {
                let location = match self.mu {
                    Some(mu) => mu,
                    None => lognormal_location_for_unit_mean(self.sigma)?,
                };
                IncomeRegime::LogNormal {
                    location,
                    dispersion: self.sigma,
                }
            }
        };
        let config = SimConfig {
            n: self.n,
            k: self.k,
            regime,
            params: ConsumptionParams {
                w: self.w,
                c: self.c,
            },
            rho: self.rho,
            seed: self.seed,
            solver: SolverSettings {
                tol: self.tol,
                max_iter: self.max_iter,
                order: self.update_order,
                clamp: self.clamp,
            },
            decile_convention: self.decile_apc,
            alpha: self.alpha,
        };
        config.validate()?;
        Ok(config)
    }

    /// Compact single-line JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serialises")
    }
}

/// Line (1-based) on which `"key":` appears in `text`.
pub fn line_of_key(text: &str, key: &str) -> Option<usize> {
    let quoted = format!("\"{key}\"");
    text.lines().enumerate().find_map(|(i, line)| {
        let pos = line.find(&quoted)?;
        line[pos + quoted.len()..]
            .trim_start()
            .starts_with(':')
            .then_some(i + 1)
    })
}

fn key_on_line(text: &str, line: usize) -> Option<String> {
    let content = text.lines().nth(line.checked_sub(1)?)?;
    let start = content.find('"')? + 1;
    let end = start + content[start..].find('"')?;
    Some(content[start..end].to_string())
}

/// Parses a config file. Errors name the offending key and its line.
pub fn parse_config_file(text: &str) -> Result<ConfigFile> {
    serde_json::from_str(text).map_err(|e| {
        let message = e.to_string();
        let key = message
            .split('`')
            .nth(1)
            .filter(|_| {
                message.starts_with("unknown field") || message.starts_with("missing field")
            })
            .map(str::to_string)
            .or_else(|| key_on_line(text, e.line()))
            .unwrap_or_else(|| "<document>".to_string());
        Error::Config {
            key,
            line: Some(e.line()),
            message,
        }
    })
}

/// Converts a validation failure of `file` into a config error pointing at the
/// key's line in `text` (if it is there).
pub fn locate_error(err: Error, text: Option<&str>) -> Error {
    match err {
        Error::InvalidParameter { name, reason } => Error::Config {
            key: name.to_string(),
            line: text.and_then(|t| line_of_key(t, name)),
            message: reason,
        },
        other => other,
    }
}

/// Parses and validates in one step.
pub fn parse_config(text: &str) -> Result<SimConfig> {
    parse_config_file(text)?
        .to_sim_config()
        .map_err(|e| locate_error(e, Some(text)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_is_the_default_run() {
        assert_eq!(parse_config("{}").unwrap(), SimConfig::default());
    }

    #[test]
    fn round_trip_through_json() {
        let text = r#"{"income": "lognormal", "sigma": 0.7, "w": 0.4, "c": 0.6, "rho": 4, "seed": 9, "n": 50}"#;
        let cfg = parse_config(text).unwrap();
        let again = parse_config(&ConfigFile::from(&cfg).to_json()).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(
            cfg.regime,
            IncomeRegime::LogNormal {
                location: lognormal_location_for_unit_mean(0.7).unwrap(),
                dispersion: 0.7
            }
        );
    }

    #[test]
    fn unknown_key_reports_key_and_line() {
        let text = "{\n  \"w\": 0.5,\n  \"gamma\": 3\n}";
        match parse_config(text) {
            Err(Error::Config { key, line, .. }) => {
                assert_eq!(key, "gamma");
                assert_eq!(line, Some(3));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_value_reports_key_and_line() {
        let text = "{\n  \"seed\": 1,\n  \"rho\": \"high\"\n}";
        match parse_config(text) {
            Err(Error::Config { key, line, .. }) => {
                assert_eq!(key, "rho");
                assert_eq!(line, Some(3));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn range_error_reports_key_and_line() {
        let text = "{\n  \"c\": 0.2,\n  \"w\": 1.5\n}";
        match parse_config(text) {
            Err(Error::Config { key, line, .. }) => {
                assert_eq!(key, "w");
                assert_eq!(line, Some(3));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn finds_key_lines() {
        let text = "{\n \"w\" : 1,\n \"c\":2}";
        assert_eq!(line_of_key(text, "w"), Some(2));
        assert_eq!(line_of_key(text, "c"), Some(3));
        assert_eq!(line_of_key(text, "rho"), None);
    }
}
