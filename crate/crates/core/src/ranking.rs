//! Per-configuration aggregation and Copeland pairwise voting.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::MetricsReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Rounds,
    Cost,
    Efficiency,
    #[serde(rename = "time_s")]
    Time,
    MapQuality,
    ExploredCells,
}

impl Metric {
    pub const ALL: [Metric; 6] = [
        Metric::Rounds,
        Metric::Cost,
        Metric::Efficiency,
        Metric::Time,
        Metric::MapQuality,
        Metric::ExploredCells,
    ];

    /// The metrics with a ranking figure of their own.
    pub const RANKED: [Metric; 4] = [
        Metric::Rounds,
        Metric::Cost,
        Metric::Efficiency,
        Metric::Time,
    ];

    /// Column name in the run CSV.
    pub fn name(self) -> &'static str {
        match self {
            Metric::Rounds => "rounds",
            Metric::Cost => "cost",
            Metric::Efficiency => "efficiency",
            Metric::Time => "time_s",
            Metric::MapQuality => "map_quality",
            Metric::ExploredCells => "explored_cells",
        }
    }

    pub fn direction(self) -> Direction {
        match self {
            Metric::Rounds | Metric::Cost | Metric::Time => Direction::LowerBetter,
            Metric::Efficiency | Metric::MapQuality | Metric::ExploredCells => {
                Direction::HigherBetter
            }
        }
    }

    pub fn value(self, m: &MetricsReport) -> f64 {
        match self {
            Metric::Rounds => m.rounds as f64,
            Metric::Cost => m.exploration_cost as f64,
            Metric::Efficiency => m.exploration_efficiency,
            Metric::Time => m.exploration_time,
            Metric::MapQuality => m.map_quality,
            Metric::ExploredCells => m.explored_cells as f64,
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown metric {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    LowerBetter,
    HigherBetter,
}

/// One experiment configuration apart from the method.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ConfigCell {
    pub maze_w: usize,
    pub maze_h: usize,
    pub obstacle_prob: f64,
    pub n_agents: usize,
}

impl ConfigCell {
    fn key(&self) -> (usize, usize, u64, usize) {
        (
            self.maze_w,
            self.maze_h,
            self.obstacle_prob.to_bits(),
            self.n_agents,
        )
    }
}

impl PartialEq for ConfigCell {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for ConfigCell {}

impl PartialOrd for ConfigCell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ConfigCell {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.maze_w, self.maze_h)
            .cmp(&(other.maze_w, other.maze_h))
            .then(self.obstacle_prob.total_cmp(&other.obstacle_prob))
            .then(self.n_agents.cmp(&other.n_agents))
            .then(self.key().cmp(&other.key()))
    }
}

impl fmt::Display for ConfigCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}x{} p={} agents={}",
            self.maze_w, self.maze_h, self.obstacle_prob, self.n_agents
        )
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub mean: f64,
    pub std: f64,
}

impl Stats {
    /// Mean and sample standard deviation; a single value has zero spread.
    pub fn of(values: &[f64]) -> Stats {
        if values.is_empty() {
            return Stats {
                mean: f64::NAN,
                std: f64::NAN,
            };
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Stats { mean, std }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateEntry {
    pub method: String,
    pub cell: ConfigCell,
    /// Completed runs contributing to the statistics.
    pub runs: usize,
    pub failed_runs: usize,
    /// Runs left out of the efficiency statistics because nobody moved.
    pub efficiency_sentinels: usize,
    pub metrics: BTreeMap<Metric, Stats>,
}

impl AggregateEntry {
    pub fn mean(&self, metric: Metric) -> Option<f64> {
        self.metrics.get(&metric).map(|s| s.mean)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AggregateTable {
    pub entries: Vec<AggregateEntry>,
}

impl AggregateTable {
    /// Aggregates `(method, cell, outcome)` samples; `None` outcomes count
    /// as failed runs.
    pub fn from_samples<'a, I>(samples: I) -> AggregateTable
    where
        I: IntoIterator<Item = (&'a str, ConfigCell, Option<&'a MetricsReport>)>,
    {
        let mut groups: BTreeMap<(String, ConfigCell), (Vec<&MetricsReport>, usize)> =
            BTreeMap::new();
        for (method, cell, outcome) in samples {
            let g = groups.entry((method.to_string(), cell)).or_default();
            match outcome {
                Some(m) => g.0.push(m),
                None => g.1 += 1,
            }
        }
        let entries = groups
            .into_iter()
            .map(|((method, cell), (reports, failed))| {
                let mut metrics = BTreeMap::new();
                let mut sentinels = 0;
                for metric in Metric::ALL {
                    let mut values: Vec<f64> = reports.iter().map(|r| metric.value(r)).collect();
                    if metric == Metric::Efficiency {
                        let before = values.len();
                        values.retain(|v| v.is_finite());
                        sentinels = before - values.len();
                        if values.is_empty() && before > 0 {
                            metrics.insert(
                                metric,
                                Stats {
                                    mean: f64::INFINITY,
                                    std: 0.0,
                                },
                            );
                            continue;
                        }
                    }
                    if !values.is_empty() {
                        metrics.insert(metric, Stats::of(&values));
                    }
                }
                AggregateEntry {
                    method,
                    cell,
                    runs: reports.len(),
                    failed_runs: failed,
                    efficiency_sentinels: sentinels,
                    metrics,
                }
            })
            .collect();
        AggregateTable { entries }
    }

    pub fn methods(&self) -> Vec<String> {
        let set: BTreeSet<&str> = self.entries.iter().map(|e| e.method.as_str()).collect();
        set.into_iter().map(str::to_string).collect()
    }

    pub fn cells(&self) -> Vec<ConfigCell> {
        let set: BTreeSet<ConfigCell> = self.entries.iter().map(|e| e.cell).collect();
        set.into_iter().collect()
    }

    pub fn obstacle_probs(&self) -> Vec<f64> {
        let mut p: Vec<f64> = self.cells().iter().map(|c| c.obstacle_prob).collect();
        p.dedup_by(|a, b| a.to_bits() == b.to_bits());
        p.sort_by(f64::total_cmp);
        p.dedup_by(|a, b| a.to_bits() == b.to_bits());
        p
    }

    pub fn get(&self, method: &str, cell: &ConfigCell) -> Option<&AggregateEntry> {
        self.entries
            .iter()
            .find(|e| e.method == method && e.cell == *cell)
    }

    /// The sub-table whose cells satisfy `keep`.
    pub fn filter(&self, keep: impl Fn(&ConfigCell) -> bool) -> AggregateTable {
        AggregateTable {
            entries: self
                .entries
                .iter()
                .filter(|e| keep(&e.cell))
                .cloned()
                .collect(),
        }
    }

    /// Applies `f` to every mean of `metric`.
    pub fn map_means(&self, metric: Metric, f: impl Fn(f64) -> f64) -> AggregateTable {
        let mut out = self.clone();
        for e in &mut out.entries {
            if let Some(s) = e.metrics.get_mut(&metric) {
                s.mean = f(s.mean);
            }
        }
        out
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CopelandScore {
    pub votes: BTreeMap<String, f64>,
}

impl CopelandScore {
    /// Standard competition rank: one plus the number of methods with
    /// strictly more votes.
    pub fn rank(&self, method: &str) -> Option<usize> {
        let mine = *self.votes.get(method)?;
        Some(1 + self.votes.values().filter(|&&v| v > mine).count())
    }

    /// Methods ordered by descending votes, then name.
    pub fn standings(&self) -> Vec<(String, f64, usize)> {
        let mut rows: Vec<(String, f64, usize)> = self
            .votes
            .iter()
            .map(|(m, &v)| (m.clone(), v, self.rank(m).unwrap_or(0)))
            .collect();
        rows.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        rows
    }

    pub fn total(&self) -> f64 {
        self.votes.values().sum()
    }
}

/// Copeland votes over every configuration cell: for each unordered pair of
/// methods the one with the better mean gains a vote, exact ties give half
/// a vote each.
pub fn copeland(
    table: &AggregateTable,
    metric: Metric,
    direction: Direction,
) -> Result<CopelandScore> {
    let methods = table.methods();
    let cells = table.cells();
    let mut means: Vec<Vec<f64>> = Vec::with_capacity(methods.len());
    for m in &methods {
        let mut row = Vec::with_capacity(cells.len());
        for cell in &cells {
            let mean = table
                .get(m, cell)
                .and_then(|e| e.mean(metric))
                .ok_or_else(|| Error::MissingCell {
                    method: m.clone(),
                    cell: format!("{cell} ({metric})"),
                })?;
            row.push(mean);
        }
        means.push(row);
    }
    let mut votes = vec![0.0; methods.len()];
    for i in 0..methods.len() {
        for j in i + 1..methods.len() {
            for (&a, &b) in means[i].iter().zip(&means[j]) {
                let ord = match direction {
                    Direction::LowerBetter => b.partial_cmp(&a),
                    Direction::HigherBetter => a.partial_cmp(&b),
                };
                match ord {
                    Some(Ordering::Greater) => votes[i] += 1.0,
                    Some(Ordering::Less) => votes[j] += 1.0,
                    _ => {
                        votes[i] += 0.5;
                        votes[j] += 0.5;
                    }
                }
            }
        }
    }
    Ok(CopelandScore {
        votes: methods.into_iter().zip(votes).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankRow {
    pub method: String,
    pub votes: f64,
    pub rank: usize,
}

/// One Copeland election: a metric over a scope of cells.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankingReport {
    pub metric: Metric,
    pub direction: Direction,
    /// `pooled` or `obstacle_prob=<p>`.
    pub scope: String,
    pub cells: usize,
    pub rows: Vec<RankRow>,
}

impl RankingReport {
    pub fn rank_of(&self, method: &str) -> Option<usize> {
        self.rows
            .iter()
            .find(|r| r.method == method)
            .map(|r| r.rank)
    }

    pub fn leaders(&self) -> Vec<&str> {
        self.rows
            .iter()
            .filter(|r| r.rank == 1)
            .map(|r| r.method.as_str())
            .collect()
    }
}

impl fmt::Display for RankingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "# {} ({:?}), {}, {} cells",
            self.metric, self.direction, self.scope, self.cells
        )?;
        writeln!(f, "{:<28} {:>8} {:>5}", "method", "votes", "rank")?;
        for r in &self.rows {
            writeln!(f, "{:<28} {:>8.1} {:>5}", r.method, r.votes, r.rank)?;
        }
        Ok(())
    }
}

fn report(table: &AggregateTable, metric: Metric, scope: String) -> Result<RankingReport> {
    let score = copeland(table, metric, metric.direction())?;
    Ok(RankingReport {
        metric,
        direction: metric.direction(),
        scope,
        cells: table.cells().len(),
        rows: score
            .standings()
            .into_iter()
            .map(|(method, votes, rank)| RankRow {
                method,
                votes,
                rank,
            })
            .collect(),
    })
}

/// Pooled and per-density elections for each ranked metric.
pub fn ranking_reports(table: &AggregateTable) -> Result<Vec<RankingReport>> {
    let mut out = Vec::new();
    for metric in Metric::RANKED {
        out.push(report(table, metric, "pooled".into())?);
        for p in table.obstacle_probs() {
            let sub = table.filter(|c| c.obstacle_prob.to_bits() == p.to_bits());
            out.push(report(&sub, metric, format!("obstacle_prob={p}"))?);
        }
    }
    Ok(out)
}
