//! The exploration loop.
//!
//! A run starts by placing agents on distinct free cells, letting each sense
//! once, sharing maps and assigning initial goals. Every round then lets the
//! agents act one after the other in id order: plan a wavefront path to the
//! goal around the other agents, step one cell along it (or wait when no path
//! exists), sense and publish to the shared map. Once all agents have acted,
//! personal maps are synchronised and goals are refreshed. The loop ends when
//! every cell is known.

use std::time::Instant;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{coverage, merge_maps, sense, Coord, GroundTruthMaze, Knowledge, KnowledgeMap};
use crate::metrics::{self, MetricsReport};
use crate::pathfield::{extract_path, find_frontiers, wavefront_with, Passability, Path};
use crate::strategy::{assign_goals, hedac_field, hedac_step, StrategyConfig, StrategyKind};

pub const DEFAULT_VIEW_RANGE: usize = 2;

/// Rounds allowed per grid cell before a run is aborted.
pub const ROUND_LIMIT_PER_CELL: u64 = 50;

#[derive(Clone, Debug, PartialEq)]
pub struct AgentState {
    pub id: usize,
    pub pos: Coord,
    pub goal: Option<Coord>,
    pub planned_path: Option<Path>,
    pub view_range: usize,
    pub personal_map: KnowledgeMap,
    pub distance_traveled: u64,
    /// Set when the agent had a goal but no path to it in its last turn.
    pub stalled: bool,
}

impl AgentState {
    pub fn new(id: usize, pos: Coord, view_range: usize, personal_map: KnowledgeMap) -> Self {
        AgentState {
            id,
            pos,
            goal: None,
            planned_path: None,
            view_range,
            personal_map,
            distance_traveled: 0,
            stalled: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveEvent {
    pub round: u64,
    pub agent: usize,
    pub from: Coord,
    pub to: Coord,
}

/// One line of the optional per-round trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub round: u64,
    pub positions: Vec<Coord>,
    pub goals: Vec<Option<Coord>>,
    pub coverage: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SimOptions {
    /// Check collision freedom, single-cell motion, knowledge monotonicity,
    /// map sharing and the distinct-goal rule after every action. Checks run
    /// outside the timed sections.
    pub check_invariants: bool,
    pub record_trace: bool,
}

#[derive(Clone, Debug)]
pub struct SimulationState {
    pub maze: GroundTruthMaze,
    pub agents: Vec<AgentState>,
    pub total_map: KnowledgeMap,
    pub round: u64,
    /// `step_times[r][i]`: seconds spent on agent `i`'s step in round `r + 1`.
    pub step_times: Vec<Vec<f64>>,
    pub strategy: StrategyConfig,
    pub moves: Vec<MoveEvent>,
    pub trace: Vec<TraceRecord>,
    pub options: SimOptions,
    pub rng: ChaCha8Rng,
    pub seed: u64,
}

/// Placement stream: independent of the maze-generation stream for the same seed.
fn placement_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    rng
}

pub fn init_simulation(
    maze: GroundTruthMaze,
    n_agents: usize,
    strategy: StrategyConfig,
    view_range: usize,
    seed: u64,
) -> Result<SimulationState> {
    init_simulation_with(
        maze,
        n_agents,
        strategy,
        view_range,
        seed,
        SimOptions::default(),
    )
}

pub fn init_simulation_with(
    maze: GroundTruthMaze,
    n_agents: usize,
    strategy: StrategyConfig,
    view_range: usize,
    seed: u64,
    options: SimOptions,
) -> Result<SimulationState> {
    if n_agents == 0 {
        return Err(Error::invalid("need at least one agent"));
    }
    let free = maze.free_cells();
    if free.len() < n_agents {
        return Err(Error::invalid(format!(
            "{n_agents} agents do not fit on {} free cells",
            free.len()
        )));
    }
    let mut rng = placement_rng(seed);
    let starts: Vec<Coord> = sample(&mut rng, free.len(), n_agents)
        .into_iter()
        .map(|i| free[i])
        .collect();
    init_at(maze, &starts, strategy, view_range, seed, options, rng)
}

/// Starts a simulation with agents at explicit positions.
pub fn init_simulation_at(
    maze: GroundTruthMaze,
    starts: &[Coord],
    strategy: StrategyConfig,
    view_range: usize,
    seed: u64,
    options: SimOptions,
) -> Result<SimulationState> {
    let rng = placement_rng(seed);
    init_at(maze, starts, strategy, view_range, seed, options, rng)
}

fn init_at(
    maze: GroundTruthMaze,
    starts: &[Coord],
    strategy: StrategyConfig,
    view_range: usize,
    seed: u64,
    options: SimOptions,
    rng: ChaCha8Rng,
) -> Result<SimulationState> {
    strategy.validate()?;
    if starts.is_empty() {
        return Err(Error::invalid("need at least one agent"));
    }
    if view_range == 0 {
        return Err(Error::invalid("view range must be at least 1"));
    }
    for (i, &s) in starts.iter().enumerate() {
        if !maze.is_free(s) {
            return Err(Error::invalid(format!("start {s} is not a free cell")));
        }
        if starts[..i].contains(&s) {
            return Err(Error::invalid(format!("two agents start on {s}")));
        }
    }
    let mut total_map = KnowledgeMap::for_maze(&maze);
    let mut agents = Vec::with_capacity(starts.len());
    for (id, &pos) in starts.iter().enumerate() {
        let mut personal = KnowledgeMap::for_maze(&maze);
        sense(&maze, &mut personal, pos, view_range)?;
        merge_maps(&mut total_map, &personal)?;
        agents.push(AgentState::new(id, pos, view_range, personal));
    }
    for a in &mut agents {
        merge_maps(&mut a.personal_map, &total_map)?;
    }
    if strategy.kind.uses_goals() {
        let assignment = assign_goals(&agents, &total_map, &strategy);
        for (a, g) in agents.iter_mut().zip(assignment.goals) {
            a.goal = g;
        }
    }
    let mut state = SimulationState {
        maze,
        agents,
        total_map,
        round: 0,
        step_times: Vec::new(),
        strategy,
        moves: Vec::new(),
        trace: Vec::new(),
        options,
        rng,
        seed,
    };
    if state.options.check_invariants {
        state.check_positions()?;
        state.check_goals()?;
    }
    if state.options.record_trace {
        state.push_trace();
    }
    Ok(state)
}

impl SimulationState {
    pub fn coverage(&self) -> f64 {
        coverage(&self.total_map)
    }

    pub fn is_complete(&self) -> bool {
        self.total_map.known_count() == self.maze.area()
    }

    pub fn positions(&self) -> Vec<Coord> {
        self.agents.iter().map(|a| a.pos).collect()
    }

    pub fn round_limit(&self) -> u64 {
        ROUND_LIMIT_PER_CELL * self.maze.area() as u64
    }

    /// One pass of the main loop.
    pub fn step_round(&mut self) -> Result<()> {
        self.round += 1;
        let n = self.agents.len();
        let known_before = self.total_map.known_count();
        let start_positions = self.positions();
        let mut steps = vec![0.0; n];

        for (i, step) in steps.iter_mut().enumerate() {
            let t0 = Instant::now();
            self.act(i)?;
            *step = t0.elapsed().as_secs_f64();
            if self.options.check_invariants {
                self.check_positions()?;
                let a = &self.agents[i];
                if a.pos.manhattan(start_positions[i]) > 1 {
                    return Err(self.violation(format!("agent {i} moved more than one cell")));
                }
            }
        }

        let t0 = Instant::now();
        for a in &mut self.agents {
            merge_maps(&mut a.personal_map, &self.total_map)?;
        }
        if self.strategy.kind.uses_goals() {
            let assignment = assign_goals(&self.agents, &self.total_map, &self.strategy);
            for (a, g) in self.agents.iter_mut().zip(assignment.goals) {
                if a.goal != g {
                    a.planned_path = None;
                }
                a.goal = g;
            }
        }
        let share = t0.elapsed().as_secs_f64() / n as f64;
        for s in &mut steps {
            *s += share;
        }
        self.step_times.push(steps);

        if self.options.check_invariants {
            if self.total_map.known_count() < known_before {
                return Err(self.violation("shared knowledge shrank".into()));
            }
            if let Some(a) = self
                .agents
                .iter()
                .find(|a| a.personal_map != self.total_map)
            {
                return Err(self.violation(format!("agent {} missed the map exchange", a.id)));
            }
            self.check_goals()?;
        }
        if self.options.record_trace {
            self.push_trace();
        }
        Ok(())
    }

    fn act(&mut self, i: usize) -> Result<()> {
        let others: Vec<Coord> = self
            .agents
            .iter()
            .filter(|a| a.id != i)
            .map(|a| a.pos)
            .collect();
        let pos = self.agents[i].pos;
        let next = if self.strategy.kind == StrategyKind::Hedac {
            let field = hedac_field(&self.total_map, &others, &self.strategy);
            let target = hedac_step(
                pos,
                &field,
                &self.total_map,
                &others,
                self.strategy.hedac_anti_collision,
            );
            let agent = &mut self.agents[i];
            agent.goal = (target != pos).then_some(target);
            (target != pos && !others.contains(&target)).then_some(target)
        } else {
            self.plan_step(i, &others)?
        };

        let round = self.round;
        let agent = &mut self.agents[i];
        if let Some(to) = next {
            self.moves.push(MoveEvent {
                round,
                agent: i,
                from: agent.pos,
                to,
            });
            agent.pos = to;
            agent.distance_traveled += 1;
        }
        let revealed = sense(
            &self.maze,
            &mut agent.personal_map,
            agent.pos,
            agent.view_range,
        )?;
        for c in revealed {
            if self.total_map.get(c) == Knowledge::Unexplored {
                self.total_map.set(c, agent.personal_map.get(c));
            }
        }
        Ok(())
    }

    fn plan_step(&mut self, i: usize, others: &[Coord]) -> Result<Option<Coord>> {
        let agent = &mut self.agents[i];
        let Some(goal) = agent.goal else {
            agent.planned_path = None;
            agent.stalled = false;
            return Ok(None);
        };
        let field = wavefront_with(
            &self.total_map,
            agent.pos,
            Passability {
                frontier_sinks: true,
                blocked: others,
                terminals: &[],
            },
        )?;
        let path = extract_path(&field, goal)?;
        agent.stalled = path.is_none();
        let next = path.as_ref().and_then(Path::next_step);
        agent.planned_path = path;
        Ok(next)
    }

    /// Loops until every cell is known and reports the run's metrics.
    pub fn run(&mut self) -> Result<MetricsReport> {
        let limit = self.round_limit();
        while !self.is_complete() {
            if self.round >= limit {
                return Err(Error::RoundLimit {
                    limit,
                    coverage: self.coverage(),
                });
            }
            self.step_round()?;
        }
        self.metrics()
    }

    pub fn metrics(&self) -> Result<MetricsReport> {
        let distances: Vec<u64> = self.agents.iter().map(|a| a.distance_traveled).collect();
        let cost = metrics::exploration_cost(&distances);
        let explored = self.total_map.known_count();
        Ok(MetricsReport {
            rounds: self.round,
            exploration_cost: cost,
            exploration_efficiency: metrics::exploration_efficiency(explored, cost),
            exploration_time: metrics::exploration_time(
                &self.step_times,
                self.agents.len(),
                self.round,
            )?,
            map_quality: metrics::map_quality(&self.total_map, &self.maze)?,
            explored_cells: explored,
        })
    }

    fn push_trace(&mut self) {
        self.trace.push(TraceRecord {
            round: self.round,
            positions: self.positions(),
            goals: self.agents.iter().map(|a| a.goal).collect(),
            coverage: self.coverage(),
        });
    }

    fn violation(&self, what: String) -> Error {
        Error::Invariant {
            round: self.round,
            what,
        }
    }

    fn check_positions(&self) -> Result<()> {
        let pos = self.positions();
        for (i, p) in pos.iter().enumerate() {
            if !self.maze.is_free(*p) {
                return Err(self.violation(format!("agent {i} stands on a non-free cell {p}")));
            }
            if pos[..i].contains(p) {
                return Err(self.violation(format!("two agents share {p}")));
            }
        }
        Ok(())
    }

    fn check_goals(&self) -> Result<()> {
        if !self.strategy.kind.uses_goals() {
            return Ok(());
        }
        for a in &self.agents {
            if let Some(g) = a.goal {
                if self.total_map.get(g) != Knowledge::Unexplored {
                    return Err(self.violation(format!("agent {} targets explored cell {g}", a.id)));
                }
            }
        }
        if self.strategy.kind == StrategyKind::NewCu
            && find_frontiers(&self.total_map).len() >= self.agents.len()
        {
            let goals: Vec<Coord> = self.agents.iter().filter_map(|a| a.goal).collect();
            for (i, g) in goals.iter().enumerate() {
                if goals[..i].contains(g) {
                    return Err(self.violation(format!("goal {g} assigned twice")));
                }
            }
        }
        Ok(())
    }
}
