//! Upward-looking social consumption.
//!
//! In isolation an agent consumes `w·Y`. With social comparison it also tries
//! to close a fraction of the gap to the highest consumption it observes:
//!
//! ```text
//! C(i) = w·Y(i) + (1 − w)·c·max(0, max_{j ∈ out(i)} C(j) − w·Y(i))
//! ```
//!
//! The right-hand side is a sup-norm contraction with modulus `(1 − w)·c`, so
//! the consumption vector is the unique fixed point of that map.

pub mod oracle;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::income::IncomeVector;
use crate::network::PerceptionGraph;

/// Behavioural parameters shared by all agents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConsumptionParams {
    /// Idiosyncratic propensity to consume, in `(0, 1]`.
    pub w: f64,
    /// Catching-up intensity, in `[0, 1)`.
    pub c: f64,
}

impl ConsumptionParams {
    pub fn new(w: f64, c: f64) -> Result<Self> {
        let params = ConsumptionParams { w, c };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.w > 0.0 && self.w <= 1.0) {
            return Err(Error::invalid(
                "w",
                format!("must lie in (0, 1], got {}", self.w),
            ));
        }
        if !(self.c >= 0.0 && self.c < 1.0) {
            return Err(Error::invalid(
                "c",
                format!("must lie in [0, 1), got {}", self.c),
            ));
        }
        Ok(())
    }

    /// Weight `(1 − w)·c` passed on per step of a comparison chain; also the
    /// contraction modulus.
    pub fn pass_through(&self) -> f64 {
        (1.0 - self.w) * self.c
    }
}

/// Order in which agents are updated during the fixed-point iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpdateOrder {
    /// Synchronous: every agent reads the previous sweep.
    #[default]
    Jacobi,
    /// Sequential in agent index order, reading values updated earlier in the sweep.
    GaussSeidel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    /// Stop once the sup-norm change of a sweep drops below this.
    pub tol: f64,
    pub max_iter: usize,
    pub order: UpdateOrder,
    /// Ignore observed consumption below one's own isolated consumption.
    /// Turning this off gives the literal linear rule, for sensitivity runs.
    pub clamp: bool,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            tol: 1e-12,
            max_iter: 10_000,
            order: UpdateOrder::Jacobi,
            clamp: true,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::invalid(
                "tol",
                format!("must be > 0, got {}", self.tol),
            ));
        }
        if self.max_iter == 0 {
            return Err(Error::invalid("max_iter", "must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsumptionSolution {
    pub consumption: Vec<f64>,
    /// `C(i) / Y(i)`.
    pub apc: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Sup-norm change of the final sweep.
    pub last_change: f64,
}

impl ConsumptionSolution {
    pub fn total(&self) -> f64 {
        self.consumption.iter().sum()
    }

    /// Turns a non-converged solution into an error.
    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NotConverged {
                iterations: self.iterations,
                last_change: self.last_change,
            })
        }
    }
}

pub fn isolated_consumption(income: f64, params: &ConsumptionParams) -> Result<f64> {
    if !(income > 0.0) {
        return Err(Error::invalid(
            "income",
            format!("must be > 0, got {income}"),
        ));
    }
    Ok(params.w * income)
}

#[inline]
fn social_update(own_isolated: f64, observed_max: f64, q: f64, clamp: bool) -> f64 {
    let gap = observed_max - own_isolated;
    let gap = if clamp { gap.max(0.0) } else { gap };
    own_isolated + q * gap
}

#[inline]
fn observed_max(links: &[usize], consumption: &[f64]) -> f64 {
    links
        .iter()
        .map(|&j| consumption[j])
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Iterates the social consumption map from the isolation solution until the
/// sup-norm change falls below `settings.tol`.
///
/// Hitting `max_iter` is not an error here: the last iterate comes back with
/// `converged = false`.
pub fn solve_fixed_point(
    graph: &PerceptionGraph,
    incomes: &IncomeVector,
    params: &ConsumptionParams,
    settings: &SolverSettings,
) -> Result<ConsumptionSolution> {
    params.validate()?;
    settings.validate()?;
    if graph.len() != incomes.len() {
        return Err(Error::LengthMismatch {
            what: "graph and incomes",
            left: graph.len(),
            right: incomes.len(),
        });
    }
    let y = incomes.incomes();

    if params.w == 1.0 {
        // Full pass-through: nothing is left to react to others with.
        return Ok(ConsumptionSolution {
            apc: vec![1.0; y.len()],
            consumption: y.to_vec(),
            iterations: 0,
            converged: true,
            last_change: 0.0,
        });
    }

    let q = params.pass_through();
    let isolated: Vec<f64> = y.iter().map(|yi| params.w * yi).collect();
    let mut current = isolated.clone();
    let mut next = vec![0.0; y.len()];
    let mut iterations = 0;
    let mut last_change = f64::INFINITY;
    let mut converged = false;

    while iterations < settings.max_iter {
        iterations += 1;
        let mut change = 0.0f64;
        match settings.order {
            UpdateOrder::Jacobi => {
                for (i, links) in graph.iter() {
                    let value = social_update(
                        isolated[i],
                        observed_max(links, &current),
                        q,
                        settings.clamp,
                    );
                    change = change.max((value - current[i]).abs());
                    next[i] = value;
                }
                std::mem::swap(&mut current, &mut next);
            }
            UpdateOrder::GaussSeidel => {
                for (i, links) in graph.iter() {
                    let value = social_update(
                        isolated[i],
                        observed_max(links, &current),
                        q,
                        settings.clamp,
                    );
                    change = change.max((value - current[i]).abs());
                    current[i] = value;
                }
            }
        }
        last_change = change;
        if change < settings.tol {
            converged = true;
            break;
        }
    }

    let apc = current.iter().zip(y).map(|(ci, yi)| ci / yi).collect();
    Ok(ConsumptionSolution {
        consumption: current,
        apc,
        iterations,
        converged,
        last_change,
    })
}

/// Individual average propensities to consume.
pub fn apc_vector(solution: &ConsumptionSolution, incomes: &IncomeVector) -> Result<Vec<f64>> {
    if solution.consumption.len() != incomes.len() {
        return Err(Error::LengthMismatch {
            what: "solution and incomes",
            left: solution.consumption.len(),
            right: incomes.len(),
        });
    }
    Ok(solution
        .consumption
        .iter()
        .zip(incomes.incomes())
        .map(|(c, y)| c / y)
        .collect())
}
