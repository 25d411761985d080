//! The five run metrics plus exploration rounds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GroundTruthMaze, Knowledge, KnowledgeMap};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub rounds: u64,
    pub exploration_cost: u64,
    /// Explored cells per move; `f64::INFINITY` when no agent ever moved.
    pub exploration_efficiency: f64,
    pub exploration_time: f64,
    pub map_quality: f64,
    pub explored_cells: usize,
}

impl MetricsReport {
    /// True when the efficiency is the no-movement sentinel.
    pub fn efficiency_is_sentinel(&self) -> bool {
        self.exploration_efficiency.is_infinite()
    }
}

/// Total one-cell moves made by the fleet.
pub fn exploration_cost(distances: &[u64]) -> u64 {
    distances.iter().sum()
}

pub fn exploration_efficiency(explored_cells: usize, cost: u64) -> f64 {
    match (explored_cells, cost) {
        (0, 0) => 0.0,
        (_, 0) => f64::INFINITY,
        (m, c) => m as f64 / c as f64,
    }
}

/// Mean over rounds of the per-round step-time sum divided by the agent
/// count, times the number of rounds. `step_times[r][i]` is agent `i`'s
/// step duration in round `r`, in seconds.
pub fn exploration_time(step_times: &[Vec<f64>], n_agents: usize, rounds: u64) -> Result<f64> {
    if n_agents == 0 {
        return Err(Error::invalid("exploration time needs at least one agent"));
    }
    if rounds == 0 || step_times.is_empty() {
        return Ok(0.0);
    }
    let per_round: f64 = step_times
        .iter()
        .map(|steps| steps.iter().sum::<f64>() / n_agents as f64)
        .sum::<f64>()
        / step_times.len() as f64;
    Ok(per_round * rounds as f64)
}

/// Known cells whose value disagrees with ground truth.
pub fn map_errors(explored: &KnowledgeMap, truth: &GroundTruthMaze) -> Result<usize> {
    if explored.width() != truth.width() || explored.height() != truth.height() {
        return Err(Error::invalid("map and maze dimensions differ"));
    }
    Ok(explored
        .coords()
        .filter(|&c| {
            let k = explored.get(c);
            k != Knowledge::Unexplored && k != Knowledge::from(truth.get(c))
        })
        .count())
}

/// `(known - wrong) / area`.
pub fn map_quality(explored: &KnowledgeMap, truth: &GroundTruthMaze) -> Result<f64> {
    let errors = map_errors(explored, truth)?;
    let known = explored.known_count();
    Ok((known - errors) as f64 / truth.area() as f64)
}
