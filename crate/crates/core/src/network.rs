//! Homophilic perception networks.
//!
//! Each agent picks `k` distinct others to observe. Agent `j` enters `i`'s
//! draw with weight `exp(−ρ |y_j − y_i|)`; draws are sequential, and every
//! pick is removed before the weights are renormalised for the next one.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::income::IncomeVector;
use crate::seed::RunKey;

/// Links per agent used throughout the model.
pub const DEFAULT_LINKS: usize = 5;

/// Directed "who observes whom" graph.
#[derive(Debug, Clone, PartialEq)]
pub struct PerceptionGraph {
    n: usize,
    k: usize,
    rho: f64,
    /// Row-major `n × k`, each row in draw order.
    links: Vec<usize>,
}

impl PerceptionGraph {
    /// Builds a graph from explicit out-link lists, checking the invariants.
    pub fn from_out_links(out_links: Vec<Vec<usize>>, rho: f64) -> Result<Self> {
        check_rho(rho)?;
        let n = out_links.len();
        let k = out_links.first().map_or(0, Vec::len);
        if k == 0 {
            return Err(Error::invalid(
                "k",
                "every agent needs at least one out-link",
            ));
        }
        if n <= k {
            return Err(Error::TooFewAgents {
                required: k + 1,
                got: n,
            });
        }
        let mut links = Vec::with_capacity(n * k);
        for (i, row) in out_links.iter().enumerate() {
            if row.len() != k {
                return Err(Error::invalid(
                    "out_links",
                    format!("agent {i} has {} links, expected {k}", row.len()),
                ));
            }
            for (pos, &j) in row.iter().enumerate() {
                if j >= n {
                    return Err(Error::invalid(
                        "out_links",
                        format!("agent {i} links to unknown agent {j}"),
                    ));
                }
                if j == i {
                    return Err(Error::invalid(
                        "out_links",
                        format!("agent {i} links to itself"),
                    ));
                }
                if row[..pos].contains(&j) {
                    return Err(Error::invalid(
                        "out_links",
                        format!("agent {i} links to {j} twice"),
                    ));
                }
            }
            links.extend_from_slice(row);
        }
        Ok(PerceptionGraph { n, k, rho, links })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn links_per_agent(&self) -> usize {
        self.k
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Agents observed by `agent`, in draw order.
    pub fn out_links(&self, agent: usize) -> &[usize] {
        &self.links[agent * self.k..(agent + 1) * self.k]
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &[usize])> {
        self.links.chunks_exact(self.k).enumerate()
    }

    /// How many agents observe each agent. Not used for perception.
    pub fn in_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &j in &self.links {
            deg[j] += 1;
        }
        deg
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho >= 0.0 && rho.is_finite()) {
        return Err(Error::invalid(
            "rho",
            format!("must be finite and >= 0, got {rho}"),
        ));
    }
    Ok(())
}

/// Weight of agent `j` in agent `i`'s draw.
pub fn link_weight(y_i: f64, y_j: f64, rho: f64) -> f64 {
    (-rho * (y_j - y_i).abs()).exp()
}

/// Unnormalised draw weights of every agent for one chooser.
///
/// Weights are taken relative to the closest remaining candidate, which leaves
/// the normalised probabilities unchanged but keeps at least one weight at 1
/// even for very strong homophily.
struct DrawWeights {
    weights: Vec<f64>,
}

impl DrawWeights {
    fn new(chooser: usize, incomes: &[f64], rho: f64, excluded: &[bool]) -> Self {
        let own = incomes[chooser];
        let closest = incomes
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != chooser && !excluded[j])
            .map(|(_, y)| (y - own).abs())
            .fold(f64::INFINITY, f64::min);
        let weights = incomes
            .iter()
            .enumerate()
            .map(|(j, y)| {
                if j == chooser || excluded[j] {
                    0.0
                } else {
                    (-rho * ((y - own).abs() - closest)).exp()
                }
            })
            .collect();
        DrawWeights { weights }
    }

    fn total(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Probability that `chooser` picks each agent on its next draw.
///
/// The chooser itself is always excluded. Excluded agents get probability zero.
pub fn choice_probabilities(
    chooser: usize,
    incomes: &IncomeVector,
    rho: f64,
    excluded: &[usize],
) -> Result<Vec<f64>> {
    check_rho(rho)?;
    let n = incomes.len();
    if chooser >= n {
        return Err(Error::invalid(
            "chooser",
            format!("agent {chooser} out of range"),
        ));
    }
    let mut mask = vec![false; n];
    mask[chooser] = true;
    for &j in excluded {
        if j < n {
            mask[j] = true;
        }
    }
    if mask.iter().all(|&m| m) {
        return Err(Error::EmptyCandidates { chooser });
    }
    let draw = DrawWeights::new(chooser, incomes.incomes(), rho, &mask);
    let total = draw.total();
    Ok(draw.weights.into_iter().map(|w| w / total).collect())
}

fn draw_links<R: Rng>(
    chooser: usize,
    incomes: &[f64],
    k: usize,
    rho: f64,
    rng: &mut R,
) -> Vec<usize> {
    let n = incomes.len();
    let mut excluded = vec![false; n];
    excluded[chooser] = true;
    let mut draw = DrawWeights::new(chooser, incomes, rho, &excluded);
    let mut picks = Vec::with_capacity(k);
    for _ in 0..k {
        let mut total = draw.total();
        if !(total > 0.0) || !total.is_finite() {
            // All remaining weights underflowed; rebase them on the closest remaining candidate.
            draw = DrawWeights::new(chooser, incomes, rho, &excluded);
            total = draw.total();
        }
        let target = rng.random::<f64>() * total;
        let mut cumulative = 0.0;
        let mut pick = None;
        for (j, &w) in draw.weights.iter().enumerate() {
            if w > 0.0 {
                cumulative += w;
                pick = Some(j);
                if cumulative > target {
                    break;
                }
            }
        }
        let j = pick.expect("at least one candidate remains");
        picks.push(j);
        excluded[j] = true;
        draw.weights[j] = 0.0;
    }
    picks
}

/// Draws `k` out-links for every agent.
///
/// Agent `i` uses its own random stream `key.agent_rng(i)`, so the result does
/// not depend on the order in which agents are processed.
pub fn generate_network(
    incomes: &IncomeVector,
    k: usize,
    rho: f64,
    key: RunKey,
) -> Result<PerceptionGraph> {
    check_rho(rho)?;
    let n = incomes.len();
    if k == 0 {
        return Err(Error::invalid("k", "must be at least 1"));
    }
    if n <= k {
        return Err(Error::TooFewAgents {
            required: k + 1,
            got: n,
        });
    }
    let y = incomes.incomes();
    let rows: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|i| draw_links(i, y, k, rho, &mut key.agent_rng(i)))
        .collect();
    let links = rows.into_iter().flatten().collect();
    Ok(PerceptionGraph { n, k, rho, links })
}

/// Per-agent view of how much richer the observed agents are.
#[derive(Debug, Clone, PartialEq)]
pub struct SegregationDiagnostics {
    pub max_observed_income: Vec<f64>,
    /// `max(0, max observed income − own income)`.
    pub perception_gap: Vec<f64>,
}

impl SegregationDiagnostics {
    pub fn mean_gap(&self) -> f64 {
        self.perception_gap.iter().sum::<f64>() / self.perception_gap.len() as f64
    }
}

pub fn segregation_diagnostics(
    graph: &PerceptionGraph,
    incomes: &IncomeVector,
) -> Result<SegregationDiagnostics> {
    if graph.len() != incomes.len() {
        return Err(Error::LengthMismatch {
            what: "graph and incomes",
            left: graph.len(),
            right: incomes.len(),
        });
    }
    let y = incomes.incomes();
    let max_observed_income: Vec<f64> = graph
        .iter()
        .map(|(_, row)| row.iter().map(|&j| y[j]).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let perception_gap = max_observed_income
        .iter()
        .zip(y)
        .map(|(m, own)| (m - own).max(0.0))
        .collect();
    Ok(SegregationDiagnostics {
        max_observed_income,
        perception_gap,
    })
}
