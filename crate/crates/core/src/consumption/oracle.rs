//! Independent recomputation of the consumption fixed point by expanding the
//! recursion along comparison chains. Test and validation use only; the
//! simulation pipeline never calls it.
//!
//! Every non-clamped agent copies part of the consumption of its
//! richest-consuming neighbour `j*(i)`, who in turn copies from `j*(j*(i))`,
//! and so on until a clamped agent is reached. Substituting the rule into
//! itself along that chain `i = j_0, j_1, …, j_d` gives, with `q = (1 − w)c`,
//!
//! ```text
//! C(i) = Σ_{t<d} q^t (1 − q) w Y(j_t) + q^d w Y(j_d)
//! ```
//!
//! The chains are found bottom-up: the agent with the highest consumption is
//! always clamped, and every unclamped agent consumes strictly less than the
//! neighbour it copies from. Agents are therefore settled in decreasing order
//! of consumption, each one from neighbours settled before it.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::income::IncomeVector;
use crate::network::PerceptionGraph;

use super::ConsumptionParams;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleExpansion {
    pub consumption: Vec<f64>,
    /// `d` for each agent: number of comparison steps before a clamped agent.
    pub chain_length: Vec<usize>,
    /// `j*(i)`, or `None` for clamped agents.
    pub copies_from: Vec<Option<usize>>,
    /// Agents whose chain exceeded the depth cap. Their value is truncated.
    pub truncated: Vec<usize>,
}

#[derive(PartialEq)]
struct Candidate {
    value: f64,
    agent: usize,
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.value
            .total_cmp(&other.value)
            .then_with(|| other.agent.cmp(&self.agent))
    }
}

/// Finds `j*(i)` for every agent by settling agents in decreasing order of
/// consumption.
fn comparison_targets(
    graph: &PerceptionGraph,
    y: &[f64],
    params: &ConsumptionParams,
) -> Vec<Option<usize>> {
    let n = y.len();
    let q = params.pass_through();
    let mut observers: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, links) in graph.iter() {
        for &j in links {
            observers[j].push(i);
        }
    }
    let mut tentative: Vec<f64> = y.iter().map(|yi| params.w * yi).collect();
    let mut target: Vec<Option<usize>> = vec![None; n];
    let mut settled_value: Vec<Option<f64>> = vec![None; n];
    let mut heap: BinaryHeap<Candidate> = (0..n)
        .map(|agent| Candidate {
            value: tentative[agent],
            agent,
        })
        .collect();

    while let Some(Candidate { value, agent }) = heap.pop() {
        if settled_value[agent].is_some() || value != tentative[agent] {
            continue;
        }
        settled_value[agent] = Some(value);
        for &i in &observers[agent] {
            if settled_value[i].is_some() {
                continue;
            }
            let isolated = params.w * y[i];
            if value > isolated {
                let candidate = isolated + q * (value - isolated);
                if candidate > tentative[i] {
                    tentative[i] = candidate;
                    target[i] = Some(agent);
                    heap.push(Candidate {
                        value: candidate,
                        agent: i,
                    });
                }
            }
        }
    }
    target
}

/// Expands each agent's consumption along its comparison chain.
///
/// Assumes the clamped rule. Chains longer than `depth_cap` are cut at the
/// cap (the agent there is treated as terminal) and reported in `truncated`.
pub fn recursive_expansion_oracle(
    graph: &PerceptionGraph,
    incomes: &IncomeVector,
    params: &ConsumptionParams,
    depth_cap: usize,
) -> Result<OracleExpansion> {
    params.validate()?;
    if depth_cap == 0 {
        return Err(Error::invalid("depth_cap", "must be at least 1"));
    }
    if graph.len() != incomes.len() {
        return Err(Error::LengthMismatch {
            what: "graph and incomes",
            left: graph.len(),
            right: incomes.len(),
        });
    }
    let y = incomes.incomes();
    let n = y.len();
    if params.w == 1.0 {
        return Ok(OracleExpansion {
            consumption: y.to_vec(),
            chain_length: vec![0; n],
            copies_from: vec![None; n],
            truncated: Vec::new(),
        });
    }

    let copies_from = comparison_targets(graph, y, params);
    let q = params.pass_through();
    let w = params.w;
    let mut consumption = Vec::with_capacity(n);
    let mut chain_length = Vec::with_capacity(n);
    let mut truncated = Vec::new();

    for i in 0..n {
        let mut total = 0.0;
        let mut weight = 1.0;
        let mut current = i;
        let mut depth = 0;
        while let Some(next) = copies_from[current] {
            if depth == depth_cap {
                truncated.push(i);
                break;
            }
            total += weight * (1.0 - q) * w * y[current];
            weight *= q;
            current = next;
            depth += 1;
        }
        total += weight * w * y[current];
        consumption.push(total);
        chain_length.push(depth);
    }

    Ok(OracleExpansion {
        consumption,
        chain_length,
        copies_from,
        truncated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_agent_chain() {
        let g = PerceptionGraph::from_out_links(vec![vec![1], vec![0]], 0.0).unwrap();
        let inc = IncomeVector::from_incomes(vec![1.0, 2.0]).unwrap();
        let o =
            recursive_expansion_oracle(&g, &inc, &ConsumptionParams::new(0.5, 0.5).unwrap(), 10)
                .unwrap();
        assert!((o.consumption[0] - 0.625).abs() < 1e-15);
        assert_eq!(o.consumption[1], 1.0);
        assert_eq!(o.chain_length, vec![1, 0]);
        assert_eq!(o.copies_from, vec![Some(1), None]);
    }

    #[test]
    fn three_step_chain_weights() {
        // 0 -> 1 -> 2 -> 3, 3 observes 0 and is the richest.
        let g =
            PerceptionGraph::from_out_links(vec![vec![1], vec![2], vec![3], vec![0]], 0.0).unwrap();
        let y = [1.0, 1.5, 2.5, 4.0];
        let inc = IncomeVector::from_incomes(y.to_vec()).unwrap();
        let (w, c) = (0.4, 0.7);
        let q = (1.0 - w) * c;
        let o = recursive_expansion_oracle(&g, &inc, &ConsumptionParams::new(w, c).unwrap(), 10)
            .unwrap();
        let expected = w * (1.0 - q) * y[0]
            + w * q * (1.0 - q) * y[1]
            + w * q * q * (1.0 - q) * y[2]
            + w * q.powi(3) * y[3];
        assert!((o.consumption[0] - expected).abs() < 1e-15);
        assert_eq!(o.chain_length[0], 3);
    }

    #[test]
    fn depth_cap_truncates() {
        let g =
            PerceptionGraph::from_out_links(vec![vec![1], vec![2], vec![3], vec![0]], 0.0).unwrap();
        let inc = IncomeVector::from_incomes(vec![1.0, 1.5, 2.5, 4.0]).unwrap();
        let o = recursive_expansion_oracle(&g, &inc, &ConsumptionParams::new(0.4, 0.7).unwrap(), 2)
            .unwrap();
        assert_eq!(o.truncated, vec![0]);
        assert!(recursive_expansion_oracle(
            &g,
            &inc,
            &ConsumptionParams::new(0.4, 0.7).unwrap(),
            0
        )
        .is_err());
    }

    #[test]
    fn clamped_agents_have_empty_chains() {
        let g = PerceptionGraph::from_out_links(vec![vec![1], vec![0]], 0.0).unwrap();
        let inc = IncomeVector::from_incomes(vec![3.0, 2.0]).unwrap();
        let o =
            recursive_expansion_oracle(&g, &inc, &ConsumptionParams::new(0.5, 0.5).unwrap(), 10)
                .unwrap();
        // agent 1 observes 0 (richer), agent 0 observes a poorer agent
        assert_eq!(o.chain_length[0], 0);
        assert_eq!(o.consumption[0], 1.5);
    }
}
