//! Goal-selection strategies.
//!
//! Five of the seven strategies pick a frontier cell as each agent's goal
//! and share one skeleton: an agent keeps its goal while the goal is still
//! unexplored and its last move was not blocked, otherwise it picks a new
//! goal among the reachable frontiers. They differ in how that pick is made:
//!
//! | token        | candidate set           | selection                                     | distinct goals |
//! |--------------|-------------------------|-----------------------------------------------|----------------|
//! | `new-cu`     | nearest frontiers       | `N(u_mnm) + λ·N(u_jgr)` over the path         | yes            |
//! | `nf`         | nearest frontiers       | first in row-major order                      | no             |
//! | `cu-mnm`     | nearest frontiers       | `u_mnm`                                       | no             |
//! | `cu-jgr`     | nearest frontiers       | `N(u_mnm) + λ_jgr·N(unexplored at the goal)`  | no             |
//! | `cu-bso`     | all reachable frontiers | fewest nearby agents, then distance           | no             |
//! | `flood-fill` | all reachable frontiers | distance from a fill rooted at each frontier  | no             |
//!
//! `hedac` has no goals: each agent climbs a diffused attraction field one
//! cell at a time (see [`hedac_field`] and [`hedac_step`]).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::engine::AgentState;
use crate::error::{Error, Result};
use crate::grid::{neighbors, segment_interior, square_around, Coord, Knowledge, KnowledgeMap};
use crate::pathfield::{
    extract_path, find_frontiers, nearest_among, wavefront_with, DistanceField, Passability, Path,
};

pub const DEFAULT_LAMBDA: f64 = 0.2;
pub const DEFAULT_LAMBDA_JGR: f64 = 0.8;
pub const DEFAULT_HEDAC_ITERATIONS: usize = 100;
pub const DEFAULT_HEDAC_A: f64 = 10.0;
pub const DEFAULT_BSO_RADIUS: u32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StrategyKind {
    NewCu,
    NearestFrontier,
    CuMnm,
    CuJgr,
    CuBso,
    FloodFill,
    Hedac,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 7] = [
        StrategyKind::NewCu,
        StrategyKind::NearestFrontier,
        StrategyKind::CuMnm,
        StrategyKind::CuJgr,
        StrategyKind::CuBso,
        StrategyKind::FloodFill,
        StrategyKind::Hedac,
    ];

    pub fn token(self) -> &'static str {
        match self {
            StrategyKind::NewCu => "new-cu",
            StrategyKind::NearestFrontier => "nf",
            StrategyKind::CuMnm => "cu-mnm",
            StrategyKind::CuJgr => "cu-jgr",
            StrategyKind::CuBso => "cu-bso",
            StrategyKind::FloodFill => "flood-fill",
            StrategyKind::Hedac => "hedac",
        }
    }

    pub fn uses_goals(self) -> bool {
        self != StrategyKind::Hedac
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StrategyKind::ALL
            .into_iter()
            .find(|k| k.token() == s)
            .ok_or_else(|| Error::Parse(format!("unknown strategy {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyConfig {
    pub kind: StrategyKind,
    pub lambda: f64,
    pub lambda_jgr: f64,
    pub hedac_iterations: usize,
    pub hedac_a: f64,
    pub hedac_anti_collision: bool,
    /// Hold the other agents' cells at zero in the field so they repel.
    pub hedac_agent_sinks: bool,
    pub bso_radius: u32,
    /// Count each unexplored cell once along a path instead of once per path
    /// cell that sees it.
    pub jgr_dedup: bool,
}

impl StrategyConfig {
    pub fn new(kind: StrategyKind) -> Self {
        StrategyConfig {
            kind,
            lambda: DEFAULT_LAMBDA,
            lambda_jgr: DEFAULT_LAMBDA_JGR,
            hedac_iterations: DEFAULT_HEDAC_ITERATIONS,
            hedac_a: DEFAULT_HEDAC_A,
            hedac_anti_collision: true,
            hedac_agent_sinks: false,
            bso_radius: DEFAULT_BSO_RADIUS,
            jgr_dedup: false,
        }
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_lambda_jgr(mut self, lambda_jgr: f64) -> Self {
        self.lambda_jgr = lambda_jgr;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::invalid(format!(
                "lambda must be >= 0, got {}",
                self.lambda
            )));
        }
        if !(self.lambda_jgr >= 0.0 && self.lambda_jgr.is_finite()) {
            return Err(Error::invalid(format!(
                "lambda_jgr must be >= 0, got {}",
                self.lambda_jgr
            )));
        }
        if self.hedac_iterations == 0 {
            return Err(Error::invalid("hedac_iterations must be >= 1"));
        }
        if self.bso_radius == 0 {
            return Err(Error::invalid("bso_radius must be >= 1"));
        }
        if !self.hedac_a.is_finite() {
            return Err(Error::invalid("hedac_a must be finite"));
        }
        Ok(())
    }

    /// Method token: the bare kind token when every parameter relevant to
    /// the kind is at its default, otherwise `kind:key=value;...`.
    pub fn token(&self) -> String {
        let d = StrategyConfig::new(self.kind);
        let mut params = Vec::new();
        match self.kind {
            StrategyKind::NewCu => {
                if self.lambda != d.lambda {
                    params.push(format!("lambda={}", self.lambda));
                }
                if self.jgr_dedup {
                    params.push("dedup=true".to_string());
                }
            }
            StrategyKind::CuJgr => {
                if self.lambda_jgr != d.lambda_jgr {
                    params.push(format!("lambda_jgr={}", self.lambda_jgr));
                }
            }
            StrategyKind::CuBso => {
                if self.bso_radius != d.bso_radius {
                    params.push(format!("radius={}", self.bso_radius));
                }
            }
            StrategyKind::Hedac => {
                if self.hedac_iterations != d.hedac_iterations {
                    params.push(format!("iterations={}", self.hedac_iterations));
                }
                if self.hedac_a != d.hedac_a {
                    params.push(format!("a={}", self.hedac_a));
                }
                if !self.hedac_anti_collision {
                    params.push("ac=false".to_string());
                }
                if self.hedac_agent_sinks {
                    params.push("sinks=true".to_string());
                }
            }
            StrategyKind::NearestFrontier | StrategyKind::CuMnm | StrategyKind::FloodFill => {}
        }
        if params.is_empty() {
            self.kind.token().to_string()
        } else {
            format!("{}:{}", self.kind.token(), params.join(";"))
        }
    }
}

impl fmt::Display for StrategyConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.token())
    }
}

impl FromStr for StrategyConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, params) = match s.split_once(':') {
            Some((k, p)) => (k, Some(p)),
            None => (s, None),
        };
        let mut cfg = StrategyConfig::new(kind.trim().parse()?);
        for kv in params.into_iter().flat_map(|p| p.split(';')) {
            let kv = kv.trim();
            if kv.is_empty() {
                continue;
            }
            let (key, value) = kv
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("bad strategy parameter {kv:?}")))?;
            let bad = || Error::Parse(format!("bad value for {key}: {value:?}"));
            match key.trim() {
                "lambda" => cfg.lambda = value.trim().parse().map_err(|_| bad())?,
                "lambda_jgr" => cfg.lambda_jgr = value.trim().parse().map_err(|_| bad())?,
                "radius" => cfg.bso_radius = value.trim().parse().map_err(|_| bad())?,
                "iterations" => cfg.hedac_iterations = value.trim().parse().map_err(|_| bad())?,
                "a" => cfg.hedac_a = value.trim().parse().map_err(|_| bad())?,
                "ac" => cfg.hedac_anti_collision = value.trim().parse().map_err(|_| bad())?,
                "sinks" => cfg.hedac_agent_sinks = value.trim().parse().map_err(|_| bad())?,
                "dedup" => cfg.jgr_dedup = value.trim().parse().map_err(|_| bad())?,
                other => {
                    return Err(Error::Parse(format!(
                        "unknown strategy parameter {other:?}"
                    )))
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// One entry per agent, in agent order; `None` means the agent waits.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoalAssignment {
    pub goals: Vec<Option<Coord>>,
}

impl GoalAssignment {
    /// True when no two agents share a goal.
    pub fn is_distinct(&self) -> bool {
        let mut seen: Vec<Coord> = self.goals.iter().flatten().copied().collect();
        let n = seen.len();
        seen.sort_unstable();
        seen.dedup();
        seen.len() == n
    }
}

/// `(x - min) / (max - min)`; a constant vector maps to all zeros.
pub fn minmax_normalize(values: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::invalid("cannot normalise an empty list"));
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = max - min;
    Ok(values
        .iter()
        .map(|&v| if span > 0.0 { (v - min) / span } else { 0.0 })
        .collect())
}

/// Sum of Manhattan distances from `f` to every agent.
pub fn u_mnm(f: Coord, agents: &[Coord]) -> usize {
    agents.iter().map(|&a| f.manhattan(a)).sum()
}

/// Unexplored cells the sensor would cover from `cell`, judged against the
/// knowledge map: known obstacles occlude, unexplored cells do not.
pub fn unexplored_in_view(map: &KnowledgeMap, cell: Coord, view_range: usize) -> usize {
    visible_unexplored(map, cell, view_range).count()
}

fn visible_unexplored(
    map: &KnowledgeMap,
    cell: Coord,
    view_range: usize,
) -> impl Iterator<Item = Coord> + '_ {
    square_around(map.width(), map.height(), cell, view_range).filter(move |&c| {
        map.get(c) == Knowledge::Unexplored
            && segment_interior(cell, c).all(|m| map.get(m) != Knowledge::KnownObstacle)
    })
}

/// Information gain along a path: the per-cell unexplored counts summed over
/// every path cell, start and goal included.
pub fn u_jgr_path(path: &Path, map: &KnowledgeMap, view_range: usize) -> usize {
    path.cells()
        .iter()
        .map(|&c| unexplored_in_view(map, c, view_range))
        .sum()
}

/// Like [`u_jgr_path`] but each unexplored cell counts once.
pub fn u_jgr_path_dedup(path: &Path, map: &KnowledgeMap, view_range: usize) -> usize {
    let mut seen = vec![false; map.width() * map.height()];
    let mut n = 0;
    for &cell in path.cells() {
        for c in visible_unexplored(map, cell, view_range) {
            let i = c.row * map.width() + c.col;
            if !seen[i] {
                seen[i] = true;
                n += 1;
            }
        }
    }
    n
}

/// `N(a) + weight * N(b)` elementwise.
pub fn combine_normalized(a: &[f64], b: &[f64], weight: f64) -> Result<Vec<f64>> {
    if a.len() != b.len() {
        return Err(Error::invalid("score vectors differ in length"));
    }
    let na = minmax_normalize(a)?;
    let nb = minmax_normalize(b)?;
    Ok(na.iter().zip(&nb).map(|(x, y)| x + weight * y).collect())
}

/// Index of the first maximum.
pub fn argmax_first(scores: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &s) in scores.iter().enumerate() {
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((i, s));
        }
    }
    best.map(|(i, _)| i)
}

/// A tied nearest frontier together with the wavefront path leading to it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub frontier: Coord,
    pub path: Path,
}

/// Cost-utility scores of every candidate: normalised dispersion plus
/// `lambda` times normalised information gain along the path.
pub fn new_cu_scores(
    candidates: &[Candidate],
    agents: &[Coord],
    map: &KnowledgeMap,
    view_range: usize,
    lambda: f64,
    dedup: bool,
) -> Result<Vec<f64>> {
    if candidates.is_empty() {
        return Err(Error::invalid("empty candidate set"));
    }
    let mnm: Vec<f64> = candidates
        .iter()
        .map(|c| u_mnm(c.frontier, agents) as f64)
        .collect();
    let jgr: Vec<f64> = candidates
        .iter()
        .map(|c| {
            let gain = if dedup {
                u_jgr_path_dedup(&c.path, map, view_range)
            } else {
                u_jgr_path(&c.path, map, view_range)
            };
            gain as f64
        })
        .collect();
    combine_normalized(&mnm, &jgr, lambda)
}

/// Per-cell unexplored-view counts for one map, filled on demand. Paths to
/// tied frontiers overlap heavily, so most cells are asked for repeatedly.
struct ViewCounts {
    range: usize,
    counts: Vec<u32>,
}

impl ViewCounts {
    const UNSET: u32 = u32::MAX;

    fn new(map: &KnowledgeMap) -> Self {
        ViewCounts {
            range: 0,
            counts: vec![Self::UNSET; map.width() * map.height()],
        }
    }

    fn path_gain(&mut self, path: &Path, map: &KnowledgeMap, view_range: usize) -> usize {
        if view_range != self.range {
            self.range = view_range;
            self.counts.fill(Self::UNSET);
        }
        path.cells()
            .iter()
            .map(|&c| {
                let slot = &mut self.counts[c.row * map.width() + c.col];
                if *slot == Self::UNSET {
                    *slot = unexplored_in_view(map, c, view_range) as u32;
                }
                *slot as usize
            })
            .sum()
    }
}

/// Utility of frontier `f` within `candidates`.
pub fn utility_new_cu(
    f: Coord,
    candidates: &[Candidate],
    agents: &[Coord],
    map: &KnowledgeMap,
    view_range: usize,
    lambda: f64,
) -> Result<f64> {
    let idx = candidates
        .iter()
        .position(|c| c.frontier == f)
        .ok_or_else(|| Error::invalid(format!("frontier {f} is not a candidate")))?;
    Ok(new_cu_scores(candidates, agents, map, view_range, lambda, false)?[idx])
}

/// CU-JGR scores: normalised dispersion plus `lambda_jgr` times the
/// normalised unexplored count at the goal cell alone.
pub fn cu_jgr_scores(
    frontiers: &[Coord],
    agents: &[Coord],
    map: &KnowledgeMap,
    view_range: usize,
    lambda_jgr: f64,
) -> Result<Vec<f64>> {
    let mnm: Vec<f64> = frontiers.iter().map(|&f| u_mnm(f, agents) as f64).collect();
    let gain: Vec<f64> = frontiers
        .iter()
        .map(|&f| unexplored_in_view(map, f, view_range) as f64)
        .collect();
    combine_normalized(&mnm, &gain, lambda_jgr)
}

/// How ties among equally near frontiers are settled.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TieBreak {
    RowMajor,
    Mnm,
    GoalGain { lambda: f64 },
    PathGain { lambda: f64, dedup: bool },
}

/// Parameters of the nearest-frontier family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrontierRules {
    /// Withhold each assigned frontier from later agents while there are at
    /// least as many frontiers as agents.
    pub distinct_goals: bool,
    pub tie_break: TieBreak,
}

fn positions(agents: &[AgentState]) -> Vec<Coord> {
    agents.iter().map(|a| a.pos).collect()
}

fn keeps_goal(agent: &AgentState, map: &KnowledgeMap) -> Option<Coord> {
    agent
        .goal
        .filter(|&g| !agent.stalled && map.in_bounds(g) && map.get(g) == Knowledge::Unexplored)
}

fn others(all: &[Coord], i: usize) -> Vec<Coord> {
    all.iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, &c)| c)
        .collect()
}

fn agent_field(map: &KnowledgeMap, all: &[Coord], i: usize) -> DistanceField {
    let blocked = others(all, i);
    wavefront_with(
        map,
        all[i],
        Passability {
            frontier_sinks: true,
            blocked: &blocked,
            terminals: &[],
        },
    )
    .expect("agent positions are known free")
}

/// Goal update shared by the nearest-frontier family.
///
/// Agents are handled in index order. An agent whose goal is still
/// unexplored (and whose last move was not blocked) keeps it; with
/// `distinct_goals` and at least as many frontiers as agents, kept and newly
/// assigned goals are removed from the pool. Every other agent takes the
/// nearest reachable frontiers from the pool, treating the other agents'
/// cells as impassable, and settles ties with `rules.tie_break`.
pub fn assign_goals_frontier(
    agents: &[AgentState],
    map: &KnowledgeMap,
    rules: FrontierRules,
) -> GoalAssignment {
    let mut pool = find_frontiers(map);
    let exclusive = rules.distinct_goals && pool.len() >= agents.len();
    let all = positions(agents);
    let mut goals: Vec<Option<Coord>> = agents.iter().map(|a| keeps_goal(a, map)).collect();
    let mut views = ViewCounts::new(map);

    if exclusive {
        for goal in goals.iter_mut() {
            if let Some(g) = *goal {
                match pool.binary_search(&g) {
                    Ok(at) => {
                        pool.remove(at);
                    }
                    // Shared with an earlier agent: pick afresh.
                    Err(_) => *goal = None,
                }
            }
        }
    }

    for (i, agent) in agents.iter().enumerate() {
        if goals[i].is_some() {
            continue;
        }
        let field = agent_field(map, &all, i);
        let Some((_, tied)) = nearest_among(&field, &pool) else {
            continue;
        };
        let pick = if tied.len() == 1 {
            tied[0]
        } else {
            tied[break_tie(
                &tied,
                &field,
                &all,
                map,
                agent.view_range,
                rules.tie_break,
                &mut views,
            )]
        };
        goals[i] = Some(pick);
        if exclusive {
            if let Ok(at) = pool.binary_search(&pick) {
                pool.remove(at);
            }
        }
    }
    GoalAssignment { goals }
}

fn break_tie(
    tied: &[Coord],
    field: &DistanceField,
    agents: &[Coord],
    map: &KnowledgeMap,
    view_range: usize,
    rule: TieBreak,
    views: &mut ViewCounts,
) -> usize {
    let scores = match rule {
        TieBreak::RowMajor => return 0,
        TieBreak::Mnm => tied.iter().map(|&f| u_mnm(f, agents) as f64).collect(),
        TieBreak::GoalGain { lambda } => {
            cu_jgr_scores(tied, agents, map, view_range, lambda).expect("tied set is non-empty")
        }
        TieBreak::PathGain { lambda, dedup } => {
            let paths: Vec<Path> = tied
                .iter()
                .map(|&f| {
                    extract_path(field, f)
                        .expect("in bounds")
                        .expect("tied frontiers are reachable")
                })
                .collect();
            let mnm: Vec<f64> = tied.iter().map(|&f| u_mnm(f, agents) as f64).collect();
            let gain: Vec<f64> = paths
                .iter()
                .map(|p| {
                    if dedup {
                        u_jgr_path_dedup(p, map, view_range) as f64
                    } else {
                        views.path_gain(p, map, view_range) as f64
                    }
                })
                .collect();
            combine_normalized(&mnm, &gain, lambda).expect("tied set is non-empty")
        }
    };
    argmax_first(&scores).unwrap_or(0)
}

pub fn assign_goals_new_cu(
    agents: &[AgentState],
    map: &KnowledgeMap,
    cfg: &StrategyConfig,
) -> GoalAssignment {
    assign_goals_frontier(
        agents,
        map,
        FrontierRules {
            distinct_goals: true,
            tie_break: TieBreak::PathGain {
                lambda: cfg.lambda,
                dedup: cfg.jgr_dedup,
            },
        },
    )
}

pub fn assign_goals_nearest_frontier(agents: &[AgentState], map: &KnowledgeMap) -> GoalAssignment {
    assign_goals_frontier(
        agents,
        map,
        FrontierRules {
            distinct_goals: false,
            tie_break: TieBreak::RowMajor,
        },
    )
}

pub fn assign_goals_cu_mnm(agents: &[AgentState], map: &KnowledgeMap) -> GoalAssignment {
    assign_goals_frontier(
        agents,
        map,
        FrontierRules {
            distinct_goals: false,
            tie_break: TieBreak::Mnm,
        },
    )
}

pub fn assign_goals_cu_jgr(
    agents: &[AgentState],
    map: &KnowledgeMap,
    cfg: &StrategyConfig,
) -> GoalAssignment {
    assign_goals_frontier(
        agents,
        map,
        FrontierRules {
            distinct_goals: false,
            tie_break: TieBreak::GoalGain {
                lambda: cfg.lambda_jgr,
            },
        },
    )
}

/// One wavefront rooted at each frontier. Agent cells are terminals, so a
/// distance to an agent never runs through another agent.
pub fn frontier_fields(
    map: &KnowledgeMap,
    frontiers: &[Coord],
    agents: &[Coord],
) -> Vec<DistanceField> {
    frontiers
        .iter()
        .map(|&f| {
            wavefront_with(
                map,
                f,
                Passability {
                    frontier_sinks: false,
                    blocked: &[],
                    terminals: agents,
                },
            )
            .expect("frontiers are unexplored cells")
        })
        .collect()
}

/// Shared driver for the frontier-rooted strategies: `pick` receives the
/// per-frontier fields and returns the chosen frontier index for agent `i`.
fn assign_by_frontier_fields(
    agents: &[AgentState],
    map: &KnowledgeMap,
    mut pick: impl FnMut(usize, &[Coord], &[DistanceField]) -> Option<usize>,
) -> GoalAssignment {
    let mut goals: Vec<Option<Coord>> = agents.iter().map(|a| keeps_goal(a, map)).collect();
    if goals.iter().all(Option::is_some) {
        return GoalAssignment { goals };
    }
    let frontiers = find_frontiers(map);
    let all = positions(agents);
    let fields = frontier_fields(map, &frontiers, &all);
    for (i, goal) in goals.iter_mut().enumerate() {
        if goal.is_none() {
            *goal = pick(i, &all, &fields).map(|k| frontiers[k]);
        }
    }
    GoalAssignment { goals }
}

/// CU-BSO: minimise (agents within `bso_radius` of the frontier, own
/// distance, row-major index).
pub fn assign_goals_cu_bso(
    agents: &[AgentState],
    map: &KnowledgeMap,
    cfg: &StrategyConfig,
) -> GoalAssignment {
    let radius = cfg.bso_radius;
    assign_by_frontier_fields(agents, map, |i, all, fields| {
        fields
            .iter()
            .enumerate()
            .filter_map(|(k, field)| {
                let own = field.get(all[i])?;
                let crowd = all
                    .iter()
                    .enumerate()
                    .filter(|&(j, &p)| j != i && field.get(p).is_some_and(|d| d <= radius))
                    .count();
                Some(((crowd, own, k), k))
            })
            .min()
            .map(|(_, k)| k)
    })
}

/// Flood fill: distance measured by a fill rooted at each frontier.
pub fn assign_goals_flood_fill(agents: &[AgentState], map: &KnowledgeMap) -> GoalAssignment {
    assign_by_frontier_fields(agents, map, |i, all, fields| {
        fields
            .iter()
            .enumerate()
            .filter_map(|(k, field)| field.get(all[i]).map(|d| (d, k)))
            .min()
            .map(|(_, k)| k)
    })
}

/// Goal update for any goal-based strategy; HEDAC returns no goals.
pub fn assign_goals(
    agents: &[AgentState],
    map: &KnowledgeMap,
    cfg: &StrategyConfig,
) -> GoalAssignment {
    match cfg.kind {
        StrategyKind::NewCu => assign_goals_new_cu(agents, map, cfg),
        StrategyKind::NearestFrontier => assign_goals_nearest_frontier(agents, map),
        StrategyKind::CuMnm => assign_goals_cu_mnm(agents, map),
        StrategyKind::CuJgr => assign_goals_cu_jgr(agents, map, cfg),
        StrategyKind::CuBso => assign_goals_cu_bso(agents, map, cfg),
        StrategyKind::FloodFill => assign_goals_flood_fill(agents, map),
        StrategyKind::Hedac => GoalAssignment {
            goals: vec![None; agents.len()],
        },
    }
}

/// Scalar field over a grid, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn get(&self, c: Coord) -> f64 {
        self.values[c.row * self.width + c.col]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }
}

/// Cells that feed the attraction field: frontiers and known-free cells
/// bordering unexplored space.
pub fn hedac_sources(map: &KnowledgeMap) -> Vec<bool> {
    map.coords()
        .map(|c| match map.get(c) {
            Knowledge::KnownObstacle => false,
            Knowledge::KnownFree => map
                .neighbors(c)
                .any(|n| map.get(n) == Knowledge::Unexplored),
            Knowledge::Unexplored => map.neighbors(c).any(|n| map.get(n) == Knowledge::KnownFree),
        })
        .collect()
}

/// Discrete attraction field.
///
/// Starting from zero, each of `cfg.hedac_iterations` Jacobi sweeps sets
/// every non-obstacle cell to the mean of its non-obstacle neighbours plus
/// `cfg.hedac_a` on source cells. Known obstacles are held at zero, and so
/// are the cells in `agent_positions` when `cfg.hedac_agent_sinks` is set.
pub fn hedac_field(
    map: &KnowledgeMap,
    agent_positions: &[Coord],
    cfg: &StrategyConfig,
) -> ScalarField {
    let (w, h) = (map.width(), map.height());
    let sources = hedac_sources(map);
    let mut held = vec![false; w * h];
    for c in map.coords() {
        held[c.row * w + c.col] = map.get(c) == Knowledge::KnownObstacle;
    }
    if cfg.hedac_agent_sinks {
        for c in agent_positions.iter().filter(|c| map.in_bounds(**c)) {
            held[c.row * w + c.col] = true;
        }
    }
    let adjacency: Vec<Vec<usize>> = map
        .coords()
        .map(|c| {
            neighbors(w, h, c)
                .filter(|n| map.get(*n) != Knowledge::KnownObstacle)
                .map(|n| n.row * w + n.col)
                .collect()
        })
        .collect();

    let mut cur = vec![0.0; w * h];
    let mut next = vec![0.0; w * h];
    for _ in 0..cfg.hedac_iterations {
        for i in 0..w * h {
            if held[i] {
                next[i] = 0.0;
                continue;
            }
            let adj = &adjacency[i];
            let mean = if adj.is_empty() {
                0.0
            } else {
                adj.iter().map(|&j| cur[j]).sum::<f64>() / adj.len() as f64
            };
            next[i] = mean + if sources[i] { cfg.hedac_a } else { 0.0 };
        }
        std::mem::swap(&mut cur, &mut next);
    }
    ScalarField {
        width: w,
        height: h,
        values: cur,
    }
}

/// Next cell for a field-climbing agent: the known-free neighbour with the
/// largest field value, ties in row-major order. With anti-collision on,
/// neighbours in `occupied` are skipped. Stays put when nothing qualifies.
pub fn hedac_step(
    pos: Coord,
    field: &ScalarField,
    map: &KnowledgeMap,
    occupied: &[Coord],
    anti_collision: bool,
) -> Coord {
    let mut cand: Vec<Coord> = map
        .neighbors(pos)
        .filter(|n| map.get(*n) == Knowledge::KnownFree)
        .filter(|n| !(anti_collision && occupied.contains(n)))
        .collect();
    cand.sort_unstable();
    let mut best: Option<(Coord, f64)> = None;
    for c in cand {
        let v = field.get(c);
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((c, v));
        }
    }
    best.map_or(pos, |(c, _)| c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn agent(id: usize, pos: Coord, map: &KnowledgeMap) -> AgentState {
        AgentState::new(id, pos, 2, map.clone())
    }

    fn kmap(text: &str) -> KnowledgeMap {
        KnowledgeMap::from_text(text).unwrap()
    }

    #[test]
    fn normalisation_examples() {
        assert_eq!(
            minmax_normalize(&[2.0, 4.0, 6.0]).unwrap(),
            vec![0.0, 0.5, 1.0]
        );
        assert_eq!(minmax_normalize(&[3.0, 3.0, 3.0]).unwrap(), vec![0.0; 3]);
        assert_eq!(minmax_normalize(&[-1.0, 1.0]).unwrap(), vec![0.0, 1.0]);
        assert!(minmax_normalize(&[]).is_err());
    }

    #[test]
    fn mnm_examples() {
        assert_eq!(u_mnm(Coord::new(2, 3), &[Coord::new(0, 0)]), 5);
        assert_eq!(u_mnm(Coord::new(2, 3), &[Coord::new(2, 3)]), 0);
        let agents = [Coord::new(0, 0), Coord::new(1, 1), Coord::new(4, 0)];
        assert_eq!(u_mnm(Coord::new(2, 2), &agents), 10);
    }

    #[test]
    fn jgr_on_known_map_is_zero() {
        let m = kmap("3 3\n...\n...\n...\n");
        let p = Path::new(vec![Coord::new(0, 0), Coord::new(0, 1)]).unwrap();
        assert_eq!(u_jgr_path(&p, &m, 2), 0);
    }

    #[test]
    fn jgr_single_cell_path_counts_its_view() {
        let m = kmap("5 1\n..?#?\n");
        let p = Path::new(vec![Coord::new(0, 1)]).unwrap();
        // (0,2) visible, (0,3) known, (0,4) out of range 2 from (0,1)? no: distance 3.
        assert_eq!(u_jgr_path(&p, &m, 2), 1);
        let p = Path::new(vec![Coord::new(0, 2)]).unwrap();
        // From (0,2): itself, and (0,4) is behind the known wall.
        assert_eq!(unexplored_in_view(&m, Coord::new(0, 2), 2), 1);
        assert_eq!(u_jgr_path(&p, &m, 2), 1);
    }

    #[test]
    fn jgr_literal_sum_repeats_overlaps() {
        let m = kmap("4 1\n..??\n");
        let p = Path::new(vec![Coord::new(0, 0), Coord::new(0, 1)]).unwrap();
        // (0,0) sees (0,2); (0,1) sees (0,2),(0,3).
        assert_eq!(u_jgr_path(&p, &m, 2), 3);
        assert_eq!(u_jgr_path_dedup(&p, &m, 2), 2);
    }

    #[test]
    fn utility_requires_membership() {
        let m = kmap("3 1\n?.?\n");
        let cand = vec![
            Candidate {
                frontier: Coord::new(0, 0),
                path: Path::new(vec![Coord::new(0, 1), Coord::new(0, 0)]).unwrap(),
            },
            Candidate {
                frontier: Coord::new(0, 2),
                path: Path::new(vec![Coord::new(0, 1), Coord::new(0, 2)]).unwrap(),
            },
        ];
        let agents = [Coord::new(0, 1)];
        let u = utility_new_cu(Coord::new(0, 0), &cand, &agents, &m, 2, 0.2).unwrap();
        assert_eq!(u, 0.0);
        assert!(utility_new_cu(Coord::new(5, 5), &cand, &agents, &m, 2, 0.2).is_err());
        assert!(new_cu_scores(&[], &agents, &m, 2, 0.2, false).is_err());
    }

    #[test]
    fn single_frontier_is_assigned_directly() {
        let m = kmap("3 1\n..?\n");
        let a = [agent(0, Coord::new(0, 0), &m)];
        let cfg = StrategyConfig::new(StrategyKind::NewCu);
        assert_eq!(
            assign_goals_new_cu(&a, &m, &cfg).goals,
            vec![Some(Coord::new(0, 2))]
        );
    }

    #[test]
    fn new_cu_gives_distinct_goals_when_enough_frontiers() {
        let m = kmap("7 3\n???????\n?.....?\n???????\n");
        let a = [
            agent(0, Coord::new(1, 2), &m),
            agent(1, Coord::new(1, 3), &m),
        ];
        let cfg = StrategyConfig::new(StrategyKind::NewCu);
        let g = assign_goals_new_cu(&a, &m, &cfg);
        assert!(g.goals.iter().all(Option::is_some));
        assert!(g.is_distinct());
    }

    #[test]
    fn single_frontier_is_shared_by_everyone() {
        // Two rows so neither agent walls the other off.
        let m = kmap("5 2\n....?\n.....\n");
        let a = [
            agent(0, Coord::new(0, 0), &m),
            agent(1, Coord::new(0, 2), &m),
        ];
        let cfg = StrategyConfig::new(StrategyKind::NewCu);
        for g in [
            assign_goals_new_cu(&a, &m, &cfg),
            assign_goals_nearest_frontier(&a, &m),
            assign_goals_flood_fill(&a, &m),
        ] {
            assert_eq!(g.goals, vec![Some(Coord::new(0, 4)); 2]);
        }
    }

    #[test]
    fn nearest_frontier_takes_the_adjacent_one() {
        let m = kmap("6 1\n?....?\n");
        let a = [agent(0, Coord::new(0, 1), &m)];
        assert_eq!(
            assign_goals_nearest_frontier(&a, &m).goals,
            vec![Some(Coord::new(0, 0))]
        );
    }

    #[test]
    fn cu_mnm_prefers_the_frontier_away_from_others() {
        // Agent 0 at (1,2) is equidistant from (0,2) and (2,2); agent 1 sits
        // near the top, so dispersion favours the bottom frontier.
        let m = kmap("5 3\n#.?.#\n#...#\n#.?.#\n");
        let a = [
            agent(0, Coord::new(1, 2), &m),
            agent(1, Coord::new(0, 1), &m),
        ];
        let g = assign_goals_cu_mnm(&a, &m);
        assert_eq!(g.goals[0], Some(Coord::new(2, 2)));
        // Row-major tie-break picks the top one.
        let g = assign_goals_nearest_frontier(&a, &m);
        assert_eq!(g.goals[0], Some(Coord::new(0, 2)));
    }

    #[test]
    fn cu_jgr_prefers_the_frontier_opening_to_unknown_space() {
        // Both frontiers are 2 hops away; the left one is a pocket whose
        // surroundings are known, the right one opens onto unknown space.
        let m = kmap("9 3\n#########\n#?.....??\n#########\n");
        let a = [agent(0, Coord::new(1, 4), &m)];
        let cfg = StrategyConfig::new(StrategyKind::CuJgr);
        let g = assign_goals_cu_jgr(&a, &m, &cfg);
        let tied = [Coord::new(1, 1), Coord::new(1, 7)];
        let f = crate::pathfield::wavefront(&m, Coord::new(1, 4), true).unwrap();
        assert_eq!(f.get(tied[0]), Some(3));
        assert_eq!(f.get(tied[1]), Some(3));
        assert_eq!(g.goals[0], Some(Coord::new(1, 7)));
    }

    #[test]
    fn bso_avoids_crowded_frontiers() {
        let m = kmap("7 3\n#######\n?.....?\n#.#####\n");
        // A at (1,3) is equidistant from both ends; B sits below the left one.
        let a = [
            agent(0, Coord::new(1, 3), &m),
            agent(1, Coord::new(2, 1), &m),
        ];
        let cfg = StrategyConfig::new(StrategyKind::CuBso);
        let g = assign_goals_cu_bso(&a, &m, &cfg);
        assert_eq!(g.goals[0], Some(Coord::new(1, 6)));
        let lone = [agent(0, Coord::new(1, 3), &m)];
        assert_eq!(
            assign_goals_cu_bso(&lone, &m, &cfg).goals[0],
            Some(Coord::new(1, 0))
        );
        let solo = [agent(0, Coord::new(1, 2), &m)];
        assert_eq!(
            assign_goals_cu_bso(&solo, &m, &cfg).goals,
            assign_goals_nearest_frontier(&solo, &m).goals
        );
    }

    #[test]
    fn kept_goal_survives_and_stalled_goal_is_dropped() {
        let m = kmap("6 1\n?....?\n");
        let mut a = [agent(0, Coord::new(0, 1), &m)];
        a[0].goal = Some(Coord::new(0, 5));
        assert_eq!(
            assign_goals_nearest_frontier(&a, &m).goals,
            vec![Some(Coord::new(0, 5))]
        );
        a[0].stalled = true;
        assert_eq!(
            assign_goals_nearest_frontier(&a, &m).goals,
            vec![Some(Coord::new(0, 0))]
        );
    }

    #[test]
    fn hedac_fully_known_is_flat_zero() {
        let m = kmap("4 4\n....\n.#..\n....\n....\n");
        let f = hedac_field(&m, &[], &StrategyConfig::new(StrategyKind::Hedac));
        assert!(f.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn hedac_agent_sinks_only_when_asked() {
        let m = kmap("5 1\n....?\n");
        let agent = [Coord::new(0, 2)];
        let plain = StrategyConfig::new(StrategyKind::Hedac);
        let sinks: StrategyConfig = "hedac:sinks=true".parse().unwrap();
        assert!(hedac_field(&m, &agent, &plain).get(agent[0]) > 0.0);
        assert_eq!(hedac_field(&m, &agent, &sinks).get(agent[0]), 0.0);
        assert_eq!(sinks.token(), "hedac:sinks=true");
    }

    #[test]
    fn hedac_step_rules() {
        let m = kmap("3 3\n...\n...\n...\n");
        let mut field = ScalarField {
            width: 3,
            height: 3,
            values: vec![0.0; 9],
        };
        field.values[5] = 2.0; // (1,2)
        field.values[1] = 1.0; // (0,1)
        let here = Coord::new(1, 1);
        assert_eq!(hedac_step(here, &field, &m, &[], true), Coord::new(1, 2));
        assert_eq!(
            hedac_step(here, &field, &m, &[Coord::new(1, 2)], true),
            Coord::new(0, 1)
        );
        let all = [
            Coord::new(0, 1),
            Coord::new(1, 0),
            Coord::new(1, 2),
            Coord::new(2, 1),
        ];
        assert_eq!(hedac_step(here, &field, &m, &all, true), here);
    }

    #[test]
    fn config_tokens_round_trip() {
        for kind in StrategyKind::ALL {
            let cfg = StrategyConfig::new(kind);
            assert_eq!(cfg.token(), kind.token());
            assert_eq!(cfg.token().parse::<StrategyConfig>().unwrap(), cfg);
        }
        let cfg = StrategyConfig::new(StrategyKind::NewCu).with_lambda(0.5);
        assert_eq!(cfg.token(), "new-cu:lambda=0.5");
        assert_eq!("new-cu:lambda=0.5".parse::<StrategyConfig>().unwrap(), cfg);
        assert!("new-cu:lambda=-1".parse::<StrategyConfig>().is_err());
        assert!("bogus".parse::<StrategyConfig>().is_err());
    }
}
